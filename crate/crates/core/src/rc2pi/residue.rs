// SPDX-License-Identifier: Apache-2.0

//! Pole/residue expansion of the two-π transfer function and its exact
//! response to a saturated ramp.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cubic::poly_roots;
use super::transfer::TransferCoeffs;
use crate::numerics::{phi1, phi2};

/// Relative pole separation below which a pair is treated as repeated.
pub const REPEATED_POLE_TOL: f64 = 1e-6;

/// `H(s) = direct + sum_i k_i / (s - s_i)`.
///
/// `direct` is nonzero only for order-reduced circuits whose numerator
/// degree reaches the denominator degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleResidueForm {
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    pub direct: f64,
    /// Set when near-repeated poles were split apart before computing residues.
    pub pole_perturbation_applied: bool,
}

/// Saturated ramp from 0 to `vdd` over `tr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampInput {
    pub tr: f64,
    pub vdd: f64,
}

impl RampInput {
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= self.tr {
            self.vdd
        } else {
            self.vdd * t / self.tr
        }
    }

    /// `vdd (1 - e^{-s tr}) / (s^2 tr)`.
    pub fn laplace(&self, s: Complex64) -> Complex64 {
        self.vdd * (1.0 - (-s * self.tr).exp()) / (s * s * self.tr)
    }
}

/// Poles of `H` in rad/s, ascending `|Re|`.
pub fn poles(c: &TransferCoeffs) -> Vec<Complex64> {
    let tau = c.time_scale();
    let (_, den) = c.normalized(tau);
    let mut p: Vec<Complex64> = poly_roots(&den).into_iter().map(|z| z / tau).collect();
    p.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()).then(a.im.total_cmp(&b.im)));
    p
}

/// Partial-fraction residues at the given poles.
///
/// Poles closer than [`REPEATED_POLE_TOL`] (relative to the largest pole
/// magnitude) are pushed apart symmetrically by that amount first.
pub fn residues(c: &TransferCoeffs, poles: &[Complex64]) -> PoleResidueForm {
    let order = c.order();
    assert_eq!(poles.len(), order, "pole count must match the denominator order");
    let tau = c.time_scale();
    let (num, den) = c.normalized(tau);
    let mut p: Vec<Complex64> = poles.iter().map(|z| z * tau).collect();
    let perturbed = separate_repeated(&mut p);

    if order == 0 {
        return PoleResidueForm {
            poles: Vec::new(),
            residues: Vec::new(),
            direct: 0.0,
            pole_perturbation_applied: false,
        };
    }

    // Strip a direct term when the numerator degree reaches the denominator's.
    let lead = den[order];
    let direct = num.get(order).copied().unwrap_or(0.0) / lead;
    let proper: Vec<f64> = (0..order).map(|k| num.get(k).copied().unwrap_or(0.0) - direct * den[k]).collect();

    let residues_p: Vec<Complex64> = (0..order)
        .map(|i| {
            let si = p[i];
            let n = proper.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * si + a);
            let prod = (0..order).filter(|&j| j != i).fold(Complex64::new(lead, 0.0), |acc, j| acc * (si - p[j]));
            n / prod
        })
        .collect();

    PoleResidueForm {
        poles: p.iter().map(|z| z / tau).collect(),
        residues: residues_p.iter().map(|k| k / tau).collect(),
        direct,
        pole_perturbation_applied: perturbed,
    }
}

fn separate_repeated(p: &mut [Complex64]) -> bool {
    let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let delta = REPEATED_POLE_TOL * scale;
    let mut applied = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if (p[i] - p[j]).norm() < delta {
                // a near-repeated conjugate pair is effectively real; split along the real axis
                let center = 0.5 * (p[i] + p[j]).re;
                p[i] = Complex64::new(center - delta, 0.0);
                p[j] = Complex64::new(center + delta, 0.0);
                applied = true;
            }
        }
    }
    applied
}

impl TransferCoeffs {
    pub fn pole_residue(&self) -> PoleResidueForm {
        residues(self, &poles(self))
    }
}

impl PoleResidueForm {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.poles.iter().zip(&self.residues).fold(Complex64::new(self.direct, 0.0), |acc, (p, k)| acc + k / (s - p))
    }

    pub fn residue_sum(&self) -> Complex64 {
        self.residues.iter().sum()
    }
}

/// Ramp response of a single `k / (s - p)` term.
fn pole_ramp_response(k: Complex64, p: Complex64, tr: f64, t: f64) -> Complex64 {
    if t <= tr {
        k * (t * t / tr) * phi2(p * t)
    } else {
        (k / p) * ((p * (t - tr)).exp() * phi1(p * tr) - 1.0)
    }
}

/// Exact noise voltage at `t` for a saturated-ramp aggressor, summed over poles.
pub fn waveform_exact(pr: &PoleResidueForm, ramp: &RampInput, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let (sum, mag) = pr.poles.iter().zip(&pr.residues).fold((Complex64::new(0.0, 0.0), 0.0), |(acc, mag), (&p, &k)| {
        let v = pole_ramp_response(k, p, ramp.tr, t);
        (acc + v, mag + v.norm())
    });
    // conjugate-pair contributions cancel in the imaginary part
    debug_assert!(sum.im.abs() <= 1e-12 * mag.max(1.0), "Im = {} at t = {t}", sum.im);
    ramp.vdd * sum.re + pr.direct * ramp.value(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-12
    }

    #[test]
    fn hand_partial_fractions() {
        // s / ((s+1)(s+2)) = s / (2 + 3 s + s^2); scaled form divides by 2
        let c = TransferCoeffs { num: [0.5, 0.0], den: [1.5, 0.5, 0.0] };
        let pr = c.pole_residue();
        assert_eq!(pr.poles.len(), 2);
        for (p, k) in pr.poles.iter().zip(&pr.residues) {
            if approx(*p, -1.0) {
                assert!(approx(*k, -1.0), "k at -1: {k}");
            } else {
                assert!(approx(*p, -2.0));
                assert!(approx(*k, 2.0), "k at -2: {k}");
            }
        }
        assert_eq!(pr.direct, 0.0);
    }

    #[test]
    fn zero_numerator_gives_zero_residues() {
        let c = TransferCoeffs { num: [0.0, 0.0], den: [6.0, 11.0, 6.0] };
        let pr = c.pole_residue();
        assert!(pr.residues.iter().all(|k| k.norm() == 0.0));
    }

    #[test]
    fn repeated_poles_are_split_and_flagged() {
        // (1 + s)^2 (1 + s/2): the double root comes back within sqrt(eps)
        let c = TransferCoeffs { num: [1.0, 0.0], den: [2.5, 2.0, 0.5] };
        let pr = c.pole_residue();
        assert!(pr.pole_perturbation_applied);
        for i in 0..3 {
            for j in i + 1..3 {
                assert!((pr.poles[i] - pr.poles[j]).norm() >= 0.99e-6);
            }
        }
        // H is still reproduced well away from the poles
        let s = Complex64::new(0.3, 0.7);
        let rel = (pr.eval(s) - c.eval(s)).norm() / c.eval(s).norm();
        assert!(rel < 1e-4, "rel = {rel}");
    }

    #[test]
    fn triple_root_still_reproduces_transfer() {
        // (1 + s)^3; a triple root separates by ~eps^(1/3) under rounding
        let c = TransferCoeffs { num: [1.0, 0.0], den: [3.0, 3.0, 1.0] };
        let pr = c.pole_residue();
        for s in [Complex64::new(0.3, 0.7), Complex64::new(2.0, -1.0)] {
            let rel = (pr.eval(s) - c.eval(s)).norm() / c.eval(s).norm();
            assert!(rel < 1e-4, "rel = {rel}");
        }
    }

    #[test]
    fn direct_term_for_improper_reduced_order() {
        // (s + 0.5 s^2) / (1 + s + s^2) has a direct part 0.5
        let c = TransferCoeffs { num: [1.0, 0.5], den: [1.0, 1.0, 0.0] };
        let pr = c.pole_residue();
        assert!((pr.direct - 0.5).abs() < 1e-15);
        for s in [Complex64::new(0.1, 0.2), Complex64::new(3.0, -1.0)] {
            assert!((pr.eval(s) - c.eval(s)).norm() < 1e-12);
        }
    }

    #[test]
    fn ramp_laplace_matches_quadrature() {
        let ramp = RampInput { tr: 2.0, vdd: 1.0 };
        let s = Complex64::new(0.7, 0.0);
        // integral of v(t) e^{-st}, trapezoid on a fine grid out to t = 60
        let n = 600_000;
        let h = 60.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * ramp.value(t) * (-s.re * t).exp();
        }
        acc *= h;
        assert!((ramp.laplace(s).re - acc).abs() < 1e-8, "{} vs {acc}", ramp.laplace(s).re);
    }

    #[test]
    fn single_pole_ramp_response_is_continuous_at_tr() {
        let (k, p, tr) = (Complex64::new(2.0, 0.0), Complex64::new(-3.0, 0.0), 0.4);
        let a = pole_ramp_response(k, p, tr, tr);
        let b = (k / p) * ((p * 0.0).exp() * phi1(p * tr) - 1.0);
        assert!((a - b).norm() < 1e-14);
    }
}
