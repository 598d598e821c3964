// SPDX-License-Identifier: Apache-2.0

use approx::assert_relative_eq;
use nalgebra::{Complex, Matrix3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

const F: f64 = 1e-15;
const PS: f64 = 1e-12;

fn case_a() -> TwoPiModel {
    TwoPiModel {
        rd: 100.0,
        rs: 50.0,
        re: 50.0,
        c1: 10.0 * F,
        c2: 30.0 * F,
        cl: 20.0 * F,
        cx: 50.0 * F,
        tr: 100.0 * PS,
        vdd: 1.0,
    }
}

fn random_model(rng: &mut impl Rng) -> TwoPiModel {
    TwoPiModel {
        rd: rng.random_range(10.0..1000.0),
        rs: rng.random_range(1.0..1000.0),
        re: rng.random_range(1.0..1000.0),
        c1: rng.random_range(1.0..200.0) * F,
        c2: rng.random_range(1.0..200.0) * F,
        cl: rng.random_range(1.0..200.0) * F,
        cx: rng.random_range(1.0..200.0) * F,
        tr: rng.random_range(5.0..500.0) * PS,
        vdd: 1.0,
    }
}

/// V_out / V_agg from the three nodal equations, solved numerically.
fn nodal_transfer(m: &TwoPiModel, s: Complex64) -> Complex64 {
    let c = |x: f64| Complex::new(x, 0.0);
    let (g_d, g_s, g_e) = (1.0 / m.rd, 1.0 / m.rs, 1.0 / m.re);
    let y = Matrix3::new(
        c(g_d + g_s) + s * m.c1,
        c(-g_s),
        c(0.0),
        c(-g_s),
        c(g_s + g_e) + s * (m.c2 + m.cx),
        c(-g_e),
        c(0.0),
        c(-g_e),
        c(g_e) + s * m.cl,
    );
    let rhs = Vector3::new(c(0.0), s * m.cx, c(0.0));
    let v = y.lu().solve(&rhs).expect("nonsingular");
    v[2]
}

fn companion_eigs(b2: f64, b1: f64, b0: f64) -> Vec<Complex64> {
    // rescale s so the companion entries are O(1); the eigen-solver does not balance
    let w = b0.abs().cbrt().max(f64::MIN_POSITIVE);
    let (c2, c1, c0) = (b2 / w, b1 / (w * w), b0 / (w * w * w));
    let m = Matrix3::new(0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2);
    m.complex_eigenvalues().iter().map(|z| z * w).collect()
}

fn cubic_residual(b2: f64, b1: f64, b0: f64, s: Complex64) -> f64 {
    let scale = b0.abs().max((b1 * s).norm()).max((b2 * s * s).norm()).max(s.norm().powi(3));
    (((s + b2) * s + b1) * s + b0).norm() / scale
}

fn match_sets(a: &[Complex64], b: &[Complex64]) -> f64 {
    // greedy nearest matching, worst relative distance
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d / x.norm().max(1e-300));
    }
    worst
}

#[test]
fn reduce_places_half_capacitances() {
    let lumped = LumpedVictimParams { rs_up: 20.0, cs_up: 40.0 * F, re_down: 20.0, ce_down: 40.0 * F, cx: 50.0 * F };
    let m = TwoPiModel::reduce(&lumped, 100.0, 5.0 * F, 100.0 * PS);
    assert_relative_eq!(m.c1, 20.0 * F, max_relative = 1e-15);
    assert_relative_eq!(m.c2, 40.0 * F, max_relative = 1e-15);
    assert_relative_eq!(m.cl, 25.0 * F, max_relative = 1e-15);
    assert_eq!(m.vdd, 1.0);

    let at_driver = TwoPiModel::reduce(&LumpedVictimParams { cs_up: 0.0, ..lumped }, 100.0, 5.0 * F, 1e-10);
    assert_eq!(at_driver.c1, 0.0);
    let at_receiver = TwoPiModel::reduce(&LumpedVictimParams { ce_down: 0.0, ..lumped }, 100.0, 5.0 * F, 1e-10);
    assert_eq!(at_receiver.cl, 5.0 * F);
}

#[test]
fn case_a_anchor_values() {
    let m = case_a();
    let (tx, tv) = dominant_pole_metrics(&m);
    assert_relative_eq!(tx, 7.5 * PS, max_relative = 1e-12);
    assert_relative_eq!(tv, 17.0 * PS, max_relative = 1e-12);
    let mc = m.transfer_coeffs().monic().unwrap();
    assert_relative_eq!(mc.a1 / mc.b0, 7.5 * PS, max_relative = 1e-12);
    assert_relative_eq!(mc.b1 / mc.b0, 17.0 * PS, max_relative = 1e-12);
}

#[test]
fn transfer_matches_nodal_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let m = random_model(&mut rng);
        let c = m.transfer_coeffs();
        let (_, tv) = dominant_pole_metrics(&m);
        for w in [0.01, 0.3, 1.0, 7.0, 100.0] {
            let s = Complex64::new(0.2 * w, w) / tv;
            let want = nodal_transfer(&m, s);
            let got = c.eval(s);
            assert!((got - want).norm() <= 1e-10 * want.norm(), "{got} vs {want}");
        }
    }
}

#[test]
fn zero_coupling_is_zero_transfer() {
    let m = TwoPiModel { cx: 0.0, ..case_a() };
    let c = m.transfer_coeffs();
    assert!(c.is_zero());
    let pr = c.pole_residue();
    assert!(pr.residues.iter().all(|k| k.norm() == 0.0));
    assert_eq!(m.waveform_exact(50.0 * PS), 0.0);
}

#[test]
fn order_reduced_when_coupling_at_driver() {
    let m = TwoPiModel { c1: 0.0, ..case_a() };
    let c = m.transfer_coeffs();
    assert!(c.is_order_reduced());
    assert_eq!(c.order(), 2);
    assert!(c.monic().is_none());
    // still reproduces the circuit
    let s = Complex64::new(1e10, 3e10);
    assert!((c.pole_residue().eval(s) - nodal_transfer(&m, s)).norm() < 1e-9 * nodal_transfer(&m, s).norm());
}

#[test]
fn poles_in_left_half_plane_against_companion_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let m = random_model(&mut rng);
        let mc = m.transfer_coeffs().monic().unwrap();
        let eig = companion_eigs(mc.b2, mc.b1, mc.b0);
        assert!(eig.iter().all(|z| z.re < 0.0));
        let p = poles(&m.transfer_coeffs());
        assert!(p.iter().all(|z| z.re < 0.0));
        for z in &p {
            assert!(cubic_residual(mc.b2, mc.b1, mc.b0, *z) < 1e-12);
        }
        let d = match_sets(&p, &eig);
        assert!(d < 1e-7, "{d:e} {p:?} {eig:?}");
    }
}

#[test]
fn random_stable_cubics_match_companion_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        // one real root and either two real or a conjugate pair, all stable
        let r0 = -rng.random_range(0.01..100.0);
        let (b2, b1, b0) = if i % 2 == 0 {
            let (r1, r2) = (-rng.random_range(0.01..100.0), -rng.random_range(0.01..100.0));
            (-(r0 + r1 + r2), r0 * r1 + r0 * r2 + r1 * r2, -r0 * r1 * r2)
        } else {
            let (a, w) = (-rng.random_range(0.01..100.0), rng.random_range(0.01..100.0));
            // (s - r0)(s^2 - 2a s + a^2 + w^2)
            let q = a * a + w * w;
            (-r0 - 2.0 * a, q + 2.0 * a * r0, -r0 * q)
        };
        let roots = solve_cubic_stable(b2, b1, b0);
        for s in roots {
            let f = ((s + b2) * s + b1) * s + b0;
            assert!(f.norm() <= 1e-9 * b0.abs().max(s.norm().powi(3)), "residual {f} at {s}");
        }
        assert!(roots.windows(2).all(|w| w[0].re.abs() <= w[1].re.abs()));
        let eig = companion_eigs(b2, b1, b0);
        let err = match_sets(&roots, &eig);
        assert!(err < 1e-7, "case {i}: {roots:?} vs {eig:?} ({err})");
        let n_complex = roots.iter().filter(|z| z.im != 0.0).count();
        if n_complex > 0 {
            assert_eq!(n_complex, 2);
            let pair: Vec<_> = roots.iter().filter(|z| z.im != 0.0).collect();
            assert_eq!(*pair[0], pair[1].conj());
        }
    }
}

#[test]
fn residue_sum_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let m = random_model(&mut rng);
        let c = m.transfer_coeffs();
        let pr = c.pole_residue();
        let a2 = c.monic().unwrap().a2;
        let sum = pr.residue_sum();
        let scale = pr.residues.iter().map(|k| k.norm()).fold(0.0, f64::max);
        assert!((sum - Complex64::new(a2, 0.0)).norm() <= 1e-9 * scale, "{sum} vs {a2}");
        // reconstruction at test frequencies
        let (_, tv) = dominant_pole_metrics(&m);
        for w in [0.1, 1.0, 10.0] {
            let s = Complex64::new(0.0, w / tv);
            assert!((pr.eval(s) - c.eval(s)).norm() <= 1e-9 * c.eval(s).norm());
        }
    }
}

#[test]
fn exact_waveform_boundary_values() {
    let m = case_a();
    assert_eq!(m.waveform_exact(0.0), 0.0);
    assert!(m.waveform_exact(20_000.0 * PS).abs() < 1e-12);
    let peak = (0..500).map(|i| m.waveform_exact(i as f64 * PS)).fold(0.0, f64::max);
    assert!(peak > 0.05 && peak < 0.08, "peak {peak}");
}

#[test]
fn exact_waveform_agrees_with_numeric_inverse_laplace_of_ramp_response() {
    // convolution of the impulse response with the ramp, by extrapolated trapezoid
    let m = case_a();
    let pr = m.pole_residue();
    let h = |t: f64| -> f64 { pr.poles.iter().zip(&pr.residues).map(|(p, k)| (k * (p * t).exp()).re).sum() };
    let ramp = m.ramp();
    let conv = |t: f64, dt: f64| {
        let n = (t / dt).round() as usize;
        let mut acc = 0.0;
        for i in 0..=n {
            let u = i as f64 * dt;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * h(t - u) * ramp.value(u);
        }
        acc * dt
    };
    for t_ps in [20.0, 100.0, 140.0, 300.0] {
        let t = t_ps * PS;
        // trapezoid error is O(dt^2); the fastest pole is near 3e12 /s
        let (coarse, fine) = (conv(t, 0.002 * PS), conv(t, 0.001 * PS));
        let acc = fine + (fine - coarse) / 3.0;
        let got = m.waveform_exact(t);
        assert!((got - acc).abs() < 1e-5 * 0.075, "t={t_ps} ps: {got} vs {acc}");
    }
}

#[test]
fn case_a_peak_noise_and_first_order() {
    let m = case_a();
    let (vmax, t_peak) = peak_noise(&m);
    assert!((vmax - 0.0748).abs() < 5e-5, "vmax = {vmax}");
    assert_eq!(t_peak, m.tr);
    let v1 = peak_noise_first_order(&m);
    assert_relative_eq!(v1, 7.5 / 67.0, max_relative = 1e-12);
}

#[test]
fn peak_noise_limits() {
    let m = case_a();
    // slow-victim limit: vmax -> tx/tv
    let fast = TwoPiModel { tr: 1e-9 * PS, ..m };
    let (v, _) = peak_noise(&fast);
    assert_relative_eq!(v, 7.5 / 17.0, max_relative = 1e-9);
    assert_relative_eq!(peak_noise_first_order(&fast), 7.5 / 17.0, max_relative = 1e-9);
    assert_eq!(peak_noise(&TwoPiModel { cx: 0.0, ..m }).0, 0.0);
    let (tx, _) = dominant_pole_metrics(&TwoPiModel { rd: 0.0, rs: 0.0, ..m });
    assert_eq!(tx, 0.0);
    // tr/tv = 0.2: first-order form within 1%
    let m2 = TwoPiModel { tr: 0.2 * 17.0 * PS, ..m };
    let rel = (peak_noise_first_order(&m2) - peak_noise(&m2).0).abs() / peak_noise(&m2).0;
    assert!(rel <= 0.01, "rel = {rel}");
}

#[test]
fn case_a_half_peak_width() {
    let m = case_a();
    let w = noise_width(&m, Threshold::HalfPeak).unwrap();
    let expect = 100.0 * PS + 17.0 * PS * (1.0 + (-100.0f64 / 17.0).exp()).ln();
    assert_relative_eq!(w, expect, max_relative = 1e-12);
    assert!((w / PS - 100.047).abs() < 1e-3);
    // absolute threshold at half peak takes the general path to the same width
    let (vmax, _) = peak_noise(&m);
    let w_abs = noise_width(&m, Threshold::Absolute(vmax / 2.0)).unwrap();
    assert_relative_eq!(w_abs, w, max_relative = 1e-9);
}

#[test]
fn width_identity_and_limits() {
    for x in [1e-6, 1e-3, 0.1, 1.0, 5.0, 30.0, 700.0] {
        let (tr, tv) = (x * 1e-11, 1e-11);
        let a = half_peak_width(tr, tv);
        let b = tr + tv * (-x).exp().ln_1p();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
    assert_relative_eq!(half_peak_width(1e-9, 1e-13), 1e-9, max_relative = 1e-12);
}

#[test]
fn width_threshold_errors() {
    let m = case_a();
    let (vmax, _) = peak_noise(&m);
    assert!(matches!(noise_width(&m, Threshold::Absolute(vmax)), Err(Error::ThresholdAbovePeak { .. })));
    assert!(noise_width(&m, Threshold::Absolute(1.1 * vmax)).is_err());
}

#[test]
fn general_threshold_width_matches_bisection() {
    let m = case_a();
    let (vmax, _) = peak_noise(&m);
    for frac in [0.1, 0.3, 0.7, 0.95] {
        let vt = frac * vmax;
        let w = noise_width(&m, Threshold::Absolute(vt)).unwrap();
        let bisect = |mut lo: f64, mut hi: f64, rising: bool| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let above = m.waveform_dominant(mid) >= vt;
                if above == rising {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let t1 = bisect(0.0, m.tr, true);
        let t2 = bisect(m.tr, 100.0 * m.tr, false);
        assert_relative_eq!(w, t2 - t1, max_relative = 1e-9);
    }
}

#[test]
fn dominant_waveform_shape() {
    let m = case_a();
    let dt = 0.5 * PS;
    let samples: Vec<f64> = (0..2000).map(|i| m.waveform_dominant(i as f64 * dt)).collect();
    let n_tr = (m.tr / dt).round() as usize;
    assert!(samples[..=n_tr].windows(2).all(|w| w[1] >= w[0]));
    assert!(samples[n_tr..].windows(2).all(|w| w[1] <= w[0]));
    let argmax = samples.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert!((argmax as f64 * dt - m.tr).abs() <= dt);
    assert_relative_eq!(samples[n_tr], peak_noise(&m).0, max_relative = 1e-12);
}

proptest! {
    #[test]
    fn metric_invariants(seed in 0u64..10_000) {
        let m = random_model(&mut ChaCha8Rng::seed_from_u64(seed));
        let met = m.metrics();
        prop_assert!(met.tx <= met.tv);
        prop_assert!(met.vmax >= 0.0 && met.vmax < met.tx / met.tv);
        prop_assert!(met.width >= m.tr);
    }

    #[test]
    fn scaling_covariance(seed in 0u64..10_000, alpha in 0.1..10.0f64, beta in 0.1..10.0f64) {
        let m = random_model(&mut ChaCha8Rng::seed_from_u64(seed));
        let k = alpha * beta;
        let s = TwoPiModel {
            rd: m.rd * alpha, rs: m.rs * alpha, re: m.re * alpha,
            c1: m.c1 * beta, c2: m.c2 * beta, cl: m.cl * beta, cx: m.cx * beta,
            tr: m.tr * k, vdd: 1.0,
        };
        let (tx0, tv0) = dominant_pole_metrics(&m);
        let (tx1, tv1) = dominant_pole_metrics(&s);
        prop_assert!((tx1 / (k * tx0) - 1.0).abs() < 1e-12);
        prop_assert!((tv1 / (k * tv0) - 1.0).abs() < 1e-12);
        prop_assert!((peak_noise(&s).0 / peak_noise(&m).0 - 1.0).abs() < 1e-12);
        let (p0, p1) = (poles(&m.transfer_coeffs()), poles(&s.transfer_coeffs()));
        for (a, b) in p0.iter().zip(&p1) {
            prop_assert!((b * k - a).norm() <= 1e-9 * a.norm());
        }
    }
}
