// SPDX-License-Identifier: Apache-2.0

//! Small numerically careful primitives shared by the models.

use num_complex::Complex64;

/// `1 - exp(-x)` without cancellation for small `x`.
#[inline]
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// `(e^z - 1) / z`, continuous through `z = 0`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-2 {
        // Horner on the Taylor series; six terms reach round-off for |z| < 1e-2.
        let mut acc = Complex64::new(1.0 / 720.0, 0.0);
        for k in (1..=5).rev() {
            acc = acc * z + 1.0 / factorial(k);
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `(e^z - 1 - z) / z^2`, continuous through `z = 0`.
pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 1e-1 {
        let mut acc = Complex64::new(1.0 / factorial(10), 0.0);
        for k in (2..=9).rev() {
            acc = acc * z + 1.0 / factorial(k);
        }
        acc
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_series_matches_direct_near_switchover() {
        for &r in &[0.0099, 0.011, 0.099, 0.101] {
            for &ang in &[0.0, 1.0, 2.5, std::f64::consts::PI] {
                let z = Complex64::from_polar(r, ang);
                let d1 = (z.exp() - 1.0) / z;
                let d2 = (z.exp() - 1.0 - z) / (z * z);
                assert!((phi1(z) - d1).norm() < 1e-12, "phi1 at {z}");
                // direct phi2 loses ~eps/|z|^2 to cancellation
                assert!((phi2(z) - d2).norm() < 1e-11, "phi2 at {z}");
            }
        }
        assert_eq!(phi1(Complex64::new(0.0, 0.0)).re, 1.0);
        assert_eq!(phi2(Complex64::new(0.0, 0.0)).re, 0.5);
    }

    #[test]
    fn one_minus_exp_small_argument() {
        let x = 1e-12;
        assert!((one_minus_exp_neg(x) - x).abs() < 1e-24);
        assert_eq!(one_minus_exp_neg(0.0), 0.0);
        assert_eq!(one_minus_exp_neg(f64::INFINITY), 1.0);
    }
}
