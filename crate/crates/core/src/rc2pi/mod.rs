// SPDX-License-Identifier: Apache-2.0

//! Two-π reduced victim model.
//!
//! The victim is cut at the center of the coupled region (node 2). Upstream
//! wire becomes a π section `C1 - Rs - C2/2` behind the driver resistance
//! `Rd`, downstream wire becomes `C2/2 - Re - C_L` into the receiver, and the
//! aggressor ramp is injected at node 2 through `Cx`:
//!
//! ```text
//!        Rd        Rs            Re
//!  gnd --/\/\-- 1 --/\/\-- 2 --/\/\-- 3 (out)
//!               |          |  \        |
//!              C1         C2   Cx     C_L
//!               |          |    \      |
//!              gnd        gnd  v_agg  gnd
//! ```
//!
//! Two routes to the noise are provided: the exact third-order response
//! ([`waveform_exact`]) and the single-pole closed forms for peak and width
//! ([`peak_noise`], [`noise_width`]).

mod cubic;
mod residue;
mod transfer;

use serde::{Deserialize, Serialize};

pub use cubic::{solve_cubic_stable, solve_quadratic};
pub use residue::{poles, residues, waveform_exact, PoleResidueForm, RampInput, REPEATED_POLE_TOL};
pub use transfer::{transfer_coeffs, MonicCubic, TransferCoeffs};

use crate::error::{Error, Result};
use crate::net_model::{LumpedVictimParams, VictimNetGeometry};
use crate::numerics::one_minus_exp_neg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPiModel {
    pub rd: f64,
    pub rs: f64,
    pub re: f64,
    pub c1: f64,
    pub c2: f64,
    pub cl: f64,
    pub cx: f64,
    pub tr: f64,
    pub vdd: f64,
}

/// Closed-form noise summary of a [`TwoPiModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMetrics {
    /// `(Rd + Rs) Cx`
    pub tx: f64,
    /// Elmore-like delay of the victim seen from the coupling node.
    pub tv: f64,
    pub vmax: f64,
    pub t_peak: f64,
    /// Width at half of `vmax`.
    pub width: f64,
}

/// Threshold at which [`noise_width`] measures the pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    HalfPeak,
    /// Absolute voltage, same units as the peak.
    Absolute(f64),
}

impl TwoPiModel {
    /// Builds the reduced circuit from a split victim net.
    pub fn reduce(params: &LumpedVictimParams, rd: f64, cload: f64, tr: f64) -> Self {
        Self {
            rd,
            rs: params.rs_up,
            re: params.re_down,
            c1: params.cs_up / 2.0,
            c2: (params.cs_up + params.ce_down) / 2.0,
            cl: params.ce_down / 2.0 + cload,
            cx: params.cx,
            tr,
            vdd: 1.0,
        }
    }

    pub fn from_geometry(geom: &VictimNetGeometry) -> Result<Self> {
        let lumped = geom.derive_lumped()?;
        Ok(Self { vdd: geom.vdd, ..Self::reduce(&lumped, geom.rd, geom.cload, geom.tr) })
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let fields =
            [("rs", self.rs), ("re", self.re), ("c1", self.c1), ("c2", self.c2), ("cl", self.cl), ("cx", self.cx)];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(format!("{name} must be >= 0"));
            }
        }
        for (name, v) in [("rd", self.rd), ("tr", self.tr), ("vdd", self.vdd)] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{name} must be > 0"));
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn ramp(&self) -> RampInput {
        RampInput { tr: self.tr, vdd: self.vdd }
    }

    pub fn transfer_coeffs(&self) -> TransferCoeffs {
        transfer_coeffs(self)
    }

    pub fn pole_residue(&self) -> PoleResidueForm {
        self.transfer_coeffs().pole_residue()
    }

    /// Exact third-order noise at `t`.
    pub fn waveform_exact(&self, t: f64) -> f64 {
        waveform_exact(&self.pole_residue(), &self.ramp(), t)
    }

    /// Single-pole noise waveform: `(tx/tr)(1 - e^{-t/tv})` while the ramp
    /// rises, then `(tx/tr)(e^{-(t-tr)/tv} - e^{-t/tv})`.
    pub fn waveform_dominant(&self, t: f64) -> f64 {
        let (tx, tv) = dominant_pole_metrics(self);
        if t <= 0.0 || tv == 0.0 {
            return 0.0;
        }
        let a = self.vdd * tx / self.tr;
        if t <= self.tr {
            a * one_minus_exp_neg(t / tv)
        } else {
            a * (-(t - self.tr) / tv).exp() * one_minus_exp_neg(self.tr / tv)
        }
    }

    pub fn metrics(&self) -> NoiseMetrics {
        let (tx, tv) = dominant_pole_metrics(self);
        let (vmax, t_peak) = peak_noise(self);
        NoiseMetrics { tx, tv, vmax, t_peak, width: half_peak_width(self.tr, tv) }
    }
}

/// `(tx, tv)`: coupling time constant and victim delay at the coupling node.
pub fn dominant_pole_metrics(m: &TwoPiModel) -> (f64, f64) {
    let upstream = m.rd + m.rs;
    let tx = upstream * m.cx;
    let tv = upstream * (m.cx + m.c2 + m.cl) + (m.re * m.cl + m.rd * m.c1);
    (tx, tv)
}

/// Peak of the single-pole waveform, reached when the aggressor ramp ends.
pub fn peak_noise(m: &TwoPiModel) -> (f64, f64) {
    let (tx, tv) = dominant_pole_metrics(m);
    if tv == 0.0 || tx == 0.0 {
        return (0.0, m.tr);
    }
    (m.vdd * tx / m.tr * one_minus_exp_neg(m.tr / tv), m.tr)
}

/// Older estimate `tx / (tv + tr/2)`, the first-order expansion of [`peak_noise`]
/// in `tr / tv`. Overestimates badly once the ramp is slow compared to `tv`.
pub fn peak_noise_first_order(m: &TwoPiModel) -> f64 {
    let (tx, tv) = dominant_pole_metrics(m);
    if tx == 0.0 {
        return 0.0;
    }
    m.vdd * tx / (tv + m.tr / 2.0)
}

/// Time the single-pole waveform spends at or above the threshold.
pub fn noise_width(m: &TwoPiModel, threshold: Threshold) -> Result<f64> {
    let (tx, tv) = dominant_pole_metrics(m);
    let (vmax, _) = peak_noise(m);
    match threshold {
        Threshold::HalfPeak => {
            if vmax == 0.0 {
                return Err(Error::ThresholdAbovePeak { threshold: 0.0, peak: 0.0 });
            }
            Ok(half_peak_width(m.tr, tv))
        }
        Threshold::Absolute(vt) => {
            if vt >= vmax {
                return Err(Error::ThresholdAbovePeak { threshold: vt, peak: vmax });
            }
            if vt <= 0.0 {
                return Err(Error::invalid("threshold must be > 0"));
            }
            let amp = m.vdd * tx / m.tr;
            let x = m.tr / tv;
            // rising crossing on the first branch, falling one on the second
            let t1 = -tv * (-vt / amp).ln_1p();
            let t2 = m.tr + tv * (amp * one_minus_exp_neg(x) / vt).ln();
            Ok(t2 - t1)
        }
    }
}

/// `tr + tv ln[(1 - e^{-2 tr/tv}) / (1 - e^{-tr/tv})]`.
pub fn half_peak_width(tr: f64, tv: f64) -> f64 {
    if tv == 0.0 {
        return tr;
    }
    let x = tr / tv;
    tr + tv * (one_minus_exp_neg(2.0 * x) / one_minus_exp_neg(x)).ln()
}

#[cfg(test)]
mod tests;
