// SPDX-License-Identifier: Apache-2.0

//! Lumped-ladder transient simulator used as the reference for the models.
//!
//! Lines are cut into π segments (series R and L, half of the shunt
//! capacitance at each end); coupled lines add coupling capacitance and
//! mutual inductance between aligned segments. Integration uses the
//! trapezoidal rule at a fixed step.

mod band;
mod circuit;
mod netlist;
mod transient;
mod waveform;

pub use circuit::{Circuit, RlBranch, Stimulus, Terminal};
pub use netlist::{
    build_coupled, build_rc_victim, build_single, build_two_pi, LadderLine, LadderNetlist, LineParams, LineTotals,
    Segmentation, DEFAULT_SEGMENT_UM,
};
pub use transient::{transient, SimConfig, Simulator, TimeScales};
pub use waveform::{write_waveforms, write_waveforms_csv, Waveform, WaveformMetrics};

impl LadderNetlist {
    pub fn simulate(&self, cfg: &SimConfig) -> crate::Result<Vec<Waveform>> {
        transient(&self.circuit()?, cfg)
    }
}
