//! Merge tree matching distance between scalar fields.
//!
//! The pipeline: sample a field on a grid ([`field`]), extract split or join
//! trees ([`mergetree`]), enumerate branch decomposition trees ([`bdt`]),
//! search for a minimum-cost matching ([`matching`]) whose cost is the
//! spread of the induced zigzag diagram ([`zigzag`]), and minimize over all
//! decomposition pairs ([`distance`]). [`persistence`] provides the
//! bottleneck baseline.

pub mod bdt;
pub mod distance;
pub mod field;
pub mod matching;
pub mod mergetree;
pub mod persistence;
pub mod zigzag;
