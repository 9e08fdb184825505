//! Subcommands of the `mtmd` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mtmd_core::distance::simplified_distance_report;
use mtmd_core::field::{
    linf_distance, perturb_field, synth_baseline, triangulate, BaselineParams, ScalarGrid,
};
use mtmd_core::mergetree::{
    extract_join_tree, extract_split_tree, simplify_persistence, simplify_to_node_count, MergeTree,
};
use mtmd_core::persistence::{bottleneck_distance, elder_rule_diagram};

#[derive(Debug, Parser)]
#[command(
    name = "mtmd",
    version,
    about = "Merge tree matching distances between scalar fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Split,
    Join,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the merge tree of a grid file.
    Extract {
        grid: PathBuf,
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Split)]
        kind: Kind,
    },
    /// Remove low-persistence features from a tree file.
    Simplify {
        tree: PathBuf,
        out: PathBuf,
        /// Keep at most this many nodes.
        #[arg(long, value_parser = parse_even, conflicts_with = "threshold", required_unless_present = "threshold")]
        nodes: Option<usize>,
        /// Remove every pair with persistence below this.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Print the elder-rule persistence diagram of a tree or grid as CSV.
    Diagram {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Split)]
        kind: Kind,
    },
    /// Distance between two trees (or grids, extracted with --kind).
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Simplify both trees to at most this many nodes first.
        #[arg(long, default_value_t = 14, value_parser = parse_even)]
        simplify_to: usize,
        /// Also print the bottleneck distance of the compared trees.
        #[arg(long)]
        bottleneck: bool,
        #[arg(long, value_enum, default_value_t = Kind::Split)]
        kind: Kind,
    },
    /// Pairwise distance matrix over the .tree and .grid files in a directory.
    Matrix {
        dir: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        #[arg(long, default_value_t = 14, value_parser = parse_even)]
        simplify_to: usize,
        /// Write an 8-bit PGM heatmap of the matrix.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Kind::Split)]
        kind: Kind,
    },
    /// Write the baseline field, perturbed copies and a manifest.
    SynthStability {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 36)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instability scale; perturbation amplitudes run up to 2 * eps.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Time distances after simplifying a corpus to several sizes.
    Bench {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,10,12,14", value_parser = parse_even)]
        sizes: Vec<usize>,
        /// Number of pairs timed per size.
        #[arg(long, default_value_t = 6)]
        pairs: usize,
        #[arg(long, value_enum, default_value_t = Kind::Split)]
        kind: Kind,
    },
}

fn parse_even(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(format!("{n} is not an even node count >= 2"));
    }
    Ok(n)
}

/// Outcome of [`run`]: 0 success, 1 usage error, 2 data error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

pub fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Extract {
            grid,
            out: path,
            kind,
        } => {
            let g = read_grid(&grid)?;
            let tree = extract(&g, kind)?;
            write_file(&path, &tree.to_text())?;
            writeln!(out, "{} nodes", tree.len())?;
        }
        Command::Simplify {
            tree,
            out: path,
            nodes,
            threshold,
        } => {
            let t = read_tree(&tree)?;
            let (s, eps) = match (nodes, threshold) {
                (Some(n), _) => simplify_to_node_count(&t, n),
                (None, Some(e)) => (simplify_persistence(&t, e), e),
                (None, None) => unreachable!("clap requires one of them"),
            };
            write_file(&path, &s.to_text())?;
            writeln!(out, "nodes={} eps={}", s.len(), eps)?;
        }
        Command::Diagram { input, kind } => {
            let t = load_tree(&input, kind)?;
            write!(out, "{}", elder_rule_diagram(&t).to_csv())?;
        }
        Command::Dist {
            a,
            b,
            simplify_to,
            bottleneck,
            kind,
        } => {
            let (f, g) = (load_tree(&a, kind)?, load_tree(&b, kind)?);
            let r = simplified_distance_report(&f, &g, simplify_to)?;
            writeln!(
                out,
                "distance={} eps1={} eps2={} bound={}",
                r.distance, r.eps1, r.eps2, r.bound
            )?;
            if bottleneck {
                let (sf, _) = simplify_to_node_count(&f, simplify_to);
                let (sg, _) = simplify_to_node_count(&g, simplify_to);
                let b = bottleneck_distance(&elder_rule_diagram(&sf), &elder_rule_diagram(&sg));
                writeln!(out, "bottleneck={b}")?;
            }
        }
        Command::Matrix {
            dir,
            out: path,
            jobs,
            simplify_to,
            heatmap,
            kind,
        } => {
            let (names, trees, skipped) = load_dir(&dir, kind)?;
            for s in &skipped {
                writeln!(err, "warning: skipped {s}")?;
            }
            let mut log = String::new();
            for s in &skipped {
                log.push_str(&format!("skipped {s}\n"));
            }
            write_file(&sidecar(&path), &log)?;
            if trees.is_empty() {
                bail!("no readable trees in {}", dir.display());
            }
            let m = distance_matrix(&trees, simplify_to, jobs as usize)?;
            write_file(&path, &matrix_csv(&names, &m))?;
            if let Some(h) = heatmap {
                fs::write(&h, heatmap_pgm(&m))
                    .with_context(|| format!("writing {}", h.display()))?;
            }
            writeln!(out, "{} trees, {} skipped", trees.len(), skipped.len())?;
        }
        Command::SynthStability {
            out_dir,
            count,
            seed,
            eps,
        } => {
            let manifest = synth_stability(&out_dir, count, seed, eps)?;
            writeln!(out, "{} fields", manifest.len() + 1)?;
        }
        Command::Bench {
            dir,
            sizes,
            pairs,
            kind,
        } => {
            let (_, trees, skipped) = load_dir(&dir, kind)?;
            for s in &skipped {
                writeln!(err, "warning: skipped {s}")?;
            }
            if trees.len() < 2 {
                bail!("need at least two readable trees in {}", dir.display());
            }
            writeln!(out, "size,mean_seconds,mean_eps,pairs")?;
            for row in bench(&trees, &sizes, pairs)? {
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.size, row.mean_seconds, row.mean_eps, row.pairs
                )?;
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_grid(path: &Path) -> Result<ScalarGrid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ScalarGrid::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_tree(path: &Path) -> Result<MergeTree> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MergeTree::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn extract(grid: &ScalarGrid, kind: Kind) -> Result<MergeTree> {
    let field = triangulate(grid)?;
    Ok(match kind {
        Kind::Split => extract_split_tree(&field),
        Kind::Join => extract_join_tree(&field),
    })
}

/// A `.grid` file is extracted with `kind`; anything else is read as a tree.
pub fn load_tree(path: &Path, kind: Kind) -> Result<MergeTree> {
    if path.extension().is_some_and(|e| e == "grid") {
        extract(&read_grid(path)?, kind)
    } else {
        read_tree(path)
    }
}

/// Trees of every `.tree` and `.grid` file in `dir`, sorted by file name.
/// Unreadable files are reported as `"<name>: <error>"` instead.
pub fn load_dir(dir: &Path, kind: Kind) -> Result<(Vec<String>, Vec<MergeTree>, Vec<String>)> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "tree" || e == "grid"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .tree or .grid files in {}", dir.display());
    }
    let mut names = Vec::new();
    let mut trees = Vec::new();
    let mut skipped = Vec::new();
    for f in files {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match load_tree(&f, kind) {
            Ok(t) => {
                names.push(name);
                trees.push(t);
            }
            Err(e) => skipped.push(format!("{name}: {e:#}")),
        }
    }
    Ok((names, trees, skipped))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".log");
    PathBuf::from(s)
}

/// Symmetric matrix of simplified distances, computed on `jobs` threads.
pub fn distance_matrix(
    trees: &[MergeTree],
    simplify_to: usize,
    jobs: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = trees.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let values: Vec<f64> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| {
                simplified_distance_report(&trees[i], &trees[j], simplify_to).map(|r| r.distance)
            })
            .collect::<std::result::Result<_, _>>()
    })?;
    let mut m = vec![vec![0.0; n]; n];
    for (&(i, j), d) in pairs.iter().zip(values) {
        m[i][j] = d;
        m[j][i] = d;
    }
    Ok(m)
}

pub fn matrix_csv(names: &[String], m: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for name in names {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for (name, row) in names.iter().zip(m) {
        s.push_str(name);
        for d in row {
            s.push_str(&format!(",{d}"));
        }
        s.push('\n');
    }
    s
}

/// Binary PGM, smallest value white, largest black.
pub fn heatmap_pgm(m: &[Vec<f64>]) -> Vec<u8> {
    let n = m.len();
    let values = m.iter().flatten();
    let lo = values.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = values.copied().fold(f64::NEG_INFINITY, f64::max);
    let mut bytes = format!("P5\n{n} {n}\n255\n").into_bytes();
    for row in m {
        for &d in row {
            let t = if hi > lo { (d - lo) / (hi - lo) } else { 0.0 };
            bytes.push(255 - (255.0 * t).round() as u8);
        }
    }
    bytes
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub file: String,
    pub seed: u64,
    pub amplitude: f64,
    pub linf: f64,
}

/// Writes `baseline.grid`, `perturbed_NN.grid` and `manifest.csv`. Field `k`
/// (1-based) uses seed `seed + k` and amplitude `2 * eps * k / count`.
pub fn synth_stability(dir: &Path, count: usize, seed: u64, eps: f64) -> Result<Vec<ManifestRow>> {
    let params = BaselineParams {
        eps,
        ..Default::default()
    };
    let base = synth_baseline(&params)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(&dir.join("baseline.grid"), &base.to_text())?;
    let width = count.to_string().len().max(2);
    let mut rows = Vec::with_capacity(count);
    for k in 1..=count {
        let s = seed + k as u64;
        let amplitude = 2.0 * eps * k as f64 / count as f64;
        let g = perturb_field(&base, s, amplitude)?;
        let file = format!("perturbed_{k:0width$}.grid");
        write_file(&dir.join(&file), &g.to_text())?;
        rows.push(ManifestRow {
            file,
            seed: s,
            amplitude,
            linf: linf_distance(&base, &g)?,
        });
    }
    let mut csv = String::from("file,seed,amplitude,linf\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.file, r.seed, r.amplitude, r.linf
        ));
    }
    write_file(&dir.join("manifest.csv"), &csv)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub mean_seconds: f64,
    pub mean_eps: f64,
    pub pairs: usize,
}

/// Times the first `pairs` pairs `(i, j)`, `i < j`, at each size.
pub fn bench(trees: &[MergeTree], sizes: &[usize], pairs: usize) -> Result<Vec<BenchRow>> {
    let n = trees.len();
    let sample: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .take(pairs.max(1))
        .collect();
    let mut rows = Vec::new();
    for &size in sizes {
        let mut seconds = 0.0;
        let mut eps = 0.0;
        for &(i, j) in &sample {
            let start = Instant::now();
            let r = simplified_distance_report(&trees[i], &trees[j], size)?;
            seconds += start.elapsed().as_secs_f64();
            eps += r.eps1.max(r.eps2);
        }
        let k = sample.len() as f64;
        rows.push(BenchRow {
            size,
            mean_seconds: seconds / k,
            mean_eps: eps / k,
            pairs: sample.len(),
        });
    }
    Ok(rows)
}
