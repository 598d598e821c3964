// SPDX-License-Identifier: Apache-2.0

//! Benchmark fixtures shared by the criterion targets.

pub use xtalk_core;

use xtalk_core::rlc_decouple::ReferenceLine;
use xtalk_core::sweep_report::RlcPoint;
use xtalk_core::{CoupledRlcPair, TwoPiModel, VictimNetGeometry};

/// A small two-pi circuit with well separated poles.
pub fn two_pi() -> TwoPiModel {
    TwoPiModel { rd: 100.0, rs: 50.0, re: 50.0, c1: 10e-15, c2: 30e-15, cl: 20e-15, cx: 50e-15, tr: 100e-12, vdd: 1.0 }
}

/// A 1.5 mm victim coupled over its middle 800 µm.
pub fn rc_net() -> VictimNetGeometry {
    VictimNetGeometry {
        ls_len: 400.0,
        lc_len: 800.0,
        le_len: 300.0,
        r_pul: 0.1,
        c_pul: 0.15e-15,
        cc_pul: 0.12e-15,
        rd: 150.0,
        cload: 10e-15,
        tr: 80e-12,
        vdd: 1.0,
    }
}

/// Tightly coupled, critically damped 1 mm pair.
pub fn rlc_pair() -> CoupledRlcPair {
    RlcPoint::symmetric(0.769, 0.217, 1.0, 0.25, 0.05).pair(&ReferenceLine::default()).expect("valid fixture")
}
