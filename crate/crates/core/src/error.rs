// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// The coupled length is zero, so there is nothing to model.
    #[error("no coupling: lc_len must be > 0")]
    NoCoupling,

    /// One or more input invariants do not hold.
    #[error("invalid input: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("threshold {threshold:e} is at or above the peak noise {peak:e}; width undefined")]
    ThresholdAbovePeak { threshold: f64, peak: f64 },

    #[error("asymmetric resistance unsupported (dr = {0}); the decoupled forms require equal line resistances")]
    AsymmetricResistance(f64),

    #[error("traveling-wave fast path rejected: mode is overdamped (zeta = {0:.3} > 1.5), use the ladder method")]
    OverdampedMode(f64),

    #[error("zero segments requested")]
    ZeroSegments,

    #[error("singular MNA matrix at node `{0}`")]
    SingularMna(String),

    #[error("integration diverged at t = {0:e} s")]
    Diverged(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(vec![msg.into()])
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SingularMna(_) | Error::Diverged(_))
    }
}
