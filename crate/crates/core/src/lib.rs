// SPDX-License-Identifier: Apache-2.0

//! Crosstalk noise estimation for on-chip interconnects.
//!
//! Two analytic models are provided:
//!
//! * [`rc2pi`]: a reduced two-π RC victim model driven by a saturated-ramp
//!   aggressor, with an exact third-order waveform (poles/residues) and
//!   dominant-pole closed forms for peak noise and noise width.
//! * [`rlc_decouple`]: even/odd decoupling of two coupled RLC lines into
//!   independent mode lines, and a time-of-flight peak noise estimate.
//!
//! Both are checked against [`ladder_sim`], a lumped π-segment transient
//! simulator that plays the role of a circuit simulator. [`sweep_report`]
//! runs randomized corpora and parameter sweeps of model vs. simulator.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ladder_sim;
pub mod net_model;
pub mod numerics;
pub mod rc2pi;
pub mod rlc_decouple;
pub mod sweep_report;

pub use error::{Error, Result};
pub use ladder_sim::{Waveform, WaveformMetrics};
pub use net_model::{LumpedVictimParams, VictimNetGeometry};
pub use rc2pi::{NoiseMetrics, PoleResidueForm, RampInput, Threshold, TransferCoeffs, TwoPiModel};
pub use rlc_decouple::{
    CcPrimeVariant, CoupledRlcPair, DecoupledLine, EffectiveParams, Mode, NormalizedVars, RlcMethod, RlcNoiseEstimate,
};

/// Unit conversion factors into the SI values used internally.
pub mod units {
    pub const FEMTO: f64 = 1e-15;
    pub const PICO: f64 = 1e-12;
    pub const NANO: f64 = 1e-9;
}
