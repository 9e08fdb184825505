//! Synthetic fields for the stability experiment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{GridError, ScalarGrid};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error(
        "saddles {0} and {1} must differ by less than 2*eps ({2}) to be horizontally unstable"
    )]
    SaddlesTooFar(f64, f64, f64),
    #[error("maximum {peak} must exceed its saddle {saddle} by more than 2*eps ({eps})")]
    PeakTooLow { peak: f64, saddle: f64, eps: f64 },
    #[error("non-dominant maxima {0} and {1} must differ by more than eps ({2})")]
    MaximaTooClose(f64, f64, f64),
    #[error("maximum {0} must be the dominant peak (strictly above {1} and {2})")]
    NotDominant(f64, f64, f64),
    #[error("grid {width}x{height} is too small for the baseline layout (need width >= 11, height >= 3)")]
    GridTooSmall { width: usize, height: usize },
    #[error("flank slope {slope} must exceed the steepest ridge slope {ridge}")]
    SlopeTooShallow { slope: f64, ridge: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Parameters of the horizontally unstable baseline field.
///
/// The field is a single ridge along the middle row. Along the ridge sit, from
/// left to right: `peaks[1]`, `saddles[1]`, `peaks[2]`, `saddles[0]`,
/// `peaks[0]`. Away from the ridge the field falls off linearly with `slope`.
/// With the defaults the split tree is
/// `min -> saddles[0] -> { peaks[0], saddles[1] -> { peaks[1], peaks[2] } }`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    pub width: usize,
    pub height: usize,
    /// `peaks[0]` is the dominant maximum.
    pub peaks: [f64; 3],
    /// `saddles[0]` joins `peaks[2]` and `peaks[0]`; `saddles[1]` joins
    /// `peaks[1]` and `peaks[2]`.
    pub saddles: [f64; 2],
    pub eps: f64,
    pub slope: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            width: 41,
            height: 21,
            peaks: [10.0, 5.0, 5.2],
            saddles: [1.0, 1.05],
            eps: 0.1,
            slope: 2.5,
        }
    }
}

impl BaselineParams {
    /// Column positions of the five ridge features, left to right.
    pub fn feature_columns(&self) -> [usize; 5] {
        let margin = (self.width / 10).max(1);
        let span = self.width - 1 - 2 * margin;
        std::array::from_fn(|k| margin + k * span / 4)
    }

    pub fn ridge_row(&self) -> usize {
        self.height / 2
    }

    fn ridge_profile(&self) -> [f64; 5] {
        [
            self.peaks[1],
            self.saddles[1],
            self.peaks[2],
            self.saddles[0],
            self.peaks[0],
        ]
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let eps = self.eps;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(SynthError::BadEpsilon(eps));
        }
        if self.width < 11 || self.height < 3 {
            return Err(SynthError::GridTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        let [s0, s1] = self.saddles;
        if (s0 - s1).abs() >= 2.0 * eps {
            return Err(SynthError::SaddlesTooFar(s0, s1, eps));
        }
        let [p0, p1, p2] = self.peaks;
        if !(p0 > p1 && p0 > p2) {
            return Err(SynthError::NotDominant(p0, p1, p2));
        }
        let top_saddle = s0.max(s1);
        for peak in self.peaks {
            if peak - top_saddle <= 2.0 * eps {
                return Err(SynthError::PeakTooLow {
                    peak,
                    saddle: top_saddle,
                    eps,
                });
            }
        }
        if (p1 - p2).abs() <= eps {
            return Err(SynthError::MaximaTooClose(p1, p2, eps));
        }
        let cols = self.feature_columns();
        let profile = self.ridge_profile();
        let ridge = (0..4)
            .map(|k| (profile[k + 1] - profile[k]).abs() / (cols[k + 1] - cols[k]) as f64)
            .fold(0.0, f64::max);
        if !(self.slope > ridge) {
            return Err(SynthError::SlopeTooShallow {
                slope: self.slope,
                ridge,
            });
        }
        Ok(())
    }

    fn ridge_height(&self, col: usize) -> f64 {
        let cols = self.feature_columns();
        let profile = self.ridge_profile();
        if col <= cols[0] {
            return profile[0] - self.slope * (cols[0] - col) as f64;
        }
        if col >= cols[4] {
            return profile[4] - self.slope * (col - cols[4]) as f64;
        }
        if let Some(k) = cols.iter().position(|&c| c == col) {
            return profile[k];
        }
        let k = (0..4).find(|&k| col < cols[k + 1]).unwrap_or(3);
        let t = (col - cols[k]) as f64 / (cols[k + 1] - cols[k]) as f64;
        profile[k] + t * (profile[k + 1] - profile[k])
    }
}

/// Generates the baseline field with three maxima and two adjacent saddles.
pub fn synth_baseline(params: &BaselineParams) -> Result<ScalarGrid, SynthError> {
    params.validate()?;
    let ridge_row = params.ridge_row();
    let grid = ScalarGrid::from_fn(params.width, params.height, |row, col| {
        params.ridge_height(col) - params.slope * row.abs_diff(ridge_row) as f64
    })?;
    Ok(grid)
}

/// Adds a random plane multiplied by a Gaussian bump to `grid`.
///
/// Plane coefficients, bump center and bump width are drawn from a ChaCha8
/// generator seeded with `seed`; the additive field is rescaled so that its
/// maximum absolute value is exactly `amplitude`.
pub fn perturb_field(
    grid: &ScalarGrid,
    seed: u64,
    amplitude: f64,
) -> Result<ScalarGrid, GridError> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(GridError::NegativeAmplitude(amplitude));
    }
    let noise = perturbation(grid.width(), grid.height(), seed);
    let peak = noise.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amplitude == 0.0 || peak == 0.0 {
        return Ok(grid.clone());
    }
    let scale = amplitude / peak;
    let values = grid
        .values()
        .iter()
        .zip(&noise)
        .map(|(v, n)| v + n * scale)
        .collect();
    ScalarGrid::new(grid.width(), grid.height(), values)
}

fn perturbation(width: usize, height: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: f64 = rng.gen_range(-1.0..1.0);
    let b: f64 = rng.gen_range(-1.0..1.0);
    let c: f64 = rng.gen_range(-1.0..1.0);
    let cx: f64 = rng.gen_range(-1.0..1.0);
    let cy: f64 = rng.gen_range(-1.0..1.0);
    let sigma: f64 = rng.gen_range(0.25..0.75);

    let norm = |i: usize, n: usize| {
        if n > 1 {
            2.0 * i as f64 / (n - 1) as f64 - 1.0
        } else {
            0.0
        }
    };
    let mut out = Vec::with_capacity(width * height);
    for row in 0..height {
        let y = norm(row, height);
        for col in 0..width {
            let x = norm(col, width);
            let r2 = (x - cx).powi(2) + (y - cy).powi(2);
            out.push((a * x + b * y + c) * (-r2 / (2.0 * sigma * sigma)).exp());
        }
    }
    out
}
