// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::TwoPiModel;

/// `H(s) = V_out / V_agg` of the two-π circuit, scaled so the denominator's
/// constant term is one:
///
/// ```text
///          n1 s + n2 s^2
/// H(s) = ---------------------------------
///        1 + d1 s + d2 s^2 + d3 s^3
/// ```
///
/// In this scaling `n1` is the coupling time constant and `d1` the victim's
/// Elmore-like time constant. A zero `d3` (or `d2`) means the circuit has
/// collapsed to lower order, e.g. coupling right at the driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferCoeffs {
    pub num: [f64; 2],
    pub den: [f64; 3],
}

/// The same transfer function with a monic cubic denominator,
/// `(a2 s^2 + a1 s) / (s^3 + b2 s^2 + b1 s + b0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonicCubic {
    pub a2: f64,
    pub a1: f64,
    pub b2: f64,
    pub b1: f64,
    pub b0: f64,
}

impl TransferCoeffs {
    /// Degree of the denominator.
    pub fn order(&self) -> usize {
        self.den.iter().rposition(|&d| d != 0.0).map_or(0, |i| i + 1)
    }

    pub fn is_order_reduced(&self) -> bool {
        self.order() < 3
    }

    /// Monic form; `None` when the circuit is order-reduced.
    pub fn monic(&self) -> Option<MonicCubic> {
        let d3 = self.den[2];
        (d3 != 0.0).then(|| MonicCubic {
            a2: self.num[1] / d3,
            a1: self.num[0] / d3,
            b2: self.den[1] / d3,
            b1: self.den[0] / d3,
            b0: 1.0 / d3,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num == [0.0, 0.0]
    }

    /// Characteristic time used to bring coefficients near unity before
    /// root finding.
    pub fn time_scale(&self) -> f64 {
        match self.order() {
            0 => 1.0,
            k => {
                // geometric mean of the per-order scales d_k^(1/k)
                let logs: f64 = self.den[..k]
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d > 0.0)
                    .map(|(i, d)| d.ln() / (i + 1) as f64)
                    .sum();
                let n = self.den[..k].iter().filter(|d| **d > 0.0).count().max(1);
                (logs / n as f64).exp()
            }
        }
    }

    /// Coefficients in the normalized variable `p = s * tau`, constant term first.
    pub(crate) fn normalized(&self, tau: f64) -> (Vec<f64>, Vec<f64>) {
        let order = self.order();
        let mut den = vec![1.0];
        let mut scale = 1.0;
        for d in &self.den[..order] {
            scale *= tau;
            den.push(d / scale);
        }
        let num = vec![0.0, self.num[0] / tau, self.num[1] / (tau * tau)];
        (num, den)
    }

    pub fn eval(&self, s: num_complex::Complex64) -> num_complex::Complex64 {
        let n = (self.num[1] * s + self.num[0]) * s;
        let d = ((self.den[2] * s + self.den[1]) * s + self.den[0]) * s + 1.0;
        n / d
    }
}

/// Transfer function of the two-π circuit from the victim driver node, through
/// the upstream resistor, to the coupling node and on through the downstream
/// resistor to the receiver.
///
/// Obtained by eliminating the driver-side and receiver-side node voltages
/// from the three nodal equations and clearing denominators.
pub fn transfer_coeffs(m: &TwoPiModel) -> TransferCoeffs {
    let TwoPiModel { rd, rs, re, c1, c2, cl, cx, .. } = *m;
    let n1 = cx * (rd + rs);
    let n2 = c1 * cx * rd * rs;
    let d1 = c1 * rd + c2 * rd + c2 * rs + cl * rd + cl * re + cl * rs + cx * rd + cx * rs;
    let d2 = c1 * c2 * rd * rs
        + c1 * cl * rd * re
        + c1 * cl * rd * rs
        + c1 * cx * rd * rs
        + c2 * cl * rd * re
        + c2 * cl * re * rs
        + cl * cx * rd * re
        + cl * cx * re * rs;
    let d3 = c1 * cl * rd * re * rs * (c2 + cx);
    TransferCoeffs { num: [n1, n2], den: [d1, d2, d3] }
}
