// SPDX-License-Identifier: Apache-2.0

//! Victim net description and its lumping into upstream/downstream RC.
//!
//! Lengths are in µm, per-unit-length values per µm, everything else SI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layout of a victim net with one aggressor running alongside it over `lc_len`.
///
/// The aggressor is characterized only by its saturated-ramp transition
/// time `tr` and swing `vdd` at the coupling location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VictimNetGeometry {
    /// Victim length before the coupled region (µm).
    pub ls_len: f64,
    /// Coupled length (µm).
    pub lc_len: f64,
    /// Victim length after the coupled region (µm).
    pub le_len: f64,
    /// Wire resistance (Ω/µm).
    pub r_pul: f64,
    /// Ground capacitance (F/µm).
    pub c_pul: f64,
    /// Coupling capacitance to the aggressor (F/µm), present over `lc_len` only.
    pub cc_pul: f64,
    /// Victim driver holding resistance (Ω).
    pub rd: f64,
    /// Receiver input capacitance (F).
    pub cload: f64,
    /// Aggressor transition time (s).
    pub tr: f64,
    pub vdd: f64,
}

/// Upstream/downstream totals seen from the coupling node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LumpedVictimParams {
    pub rs_up: f64,
    pub cs_up: f64,
    pub re_down: f64,
    pub ce_down: f64,
    pub cx: f64,
}

impl VictimNetGeometry {
    pub fn total_len(&self) -> f64 {
        self.ls_len + self.lc_len + self.le_len
    }

    /// Distance of the coupling node from the driver: the center of the coupled region.
    pub fn coupling_node_pos(&self) -> f64 {
        self.ls_len + self.lc_len / 2.0
    }

    /// Lists every violated invariant; empty when the geometry is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                out.push(msg.to_string());
            }
        };
        need(self.ls_len >= 0.0, "ls_len must be >= 0");
        need(self.lc_len > 0.0, "lc_len must be > 0");
        need(self.le_len >= 0.0, "le_len must be >= 0");
        need(self.r_pul >= 0.0, "r_pul must be >= 0");
        need(self.c_pul >= 0.0, "c_pul must be >= 0");
        need(self.cc_pul >= 0.0, "cc_pul must be >= 0");
        need(self.rd > 0.0, "rd must be > 0");
        need(self.cload >= 0.0, "cload must be >= 0");
        need(self.tr > 0.0, "tr must be > 0");
        need(self.vdd > 0.0, "vdd must be > 0");
        // NaN fails every comparison above, so it is already reported.
        out
    }

    /// Splits the victim wire at the coupling node.
    pub fn derive_lumped(&self) -> Result<LumpedVictimParams> {
        if self.lc_len == 0.0 {
            return Err(Error::NoCoupling);
        }
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let x2 = self.coupling_node_pos();
        let total = self.total_len();
        let r_total = self.r_pul * total;
        let c_total = self.c_pul * total;
        let rs_up = self.r_pul * x2;
        let cs_up = self.c_pul * x2;
        // Downstream values are taken as remainders so the split conserves the totals.
        Ok(LumpedVictimParams {
            rs_up,
            cs_up,
            re_down: (r_total - rs_up).max(0.0),
            ce_down: (c_total - cs_up).max(0.0),
            cx: self.cc_pul * self.lc_len,
        })
    }
}

impl Default for VictimNetGeometry {
    fn default() -> Self {
        Self {
            ls_len: 0.0,
            lc_len: 0.0,
            le_len: 0.0,
            r_pul: 0.0,
            c_pul: 0.0,
            cc_pul: 0.0,
            rd: 0.0,
            cload: 0.0,
            tr: 0.0,
            vdd: 1.0,
        }
    }
}
