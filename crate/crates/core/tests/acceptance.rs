// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use xtalk_core::ladder_sim::{
    build_coupled, build_single, build_two_pi, transient, LineParams, Segmentation, SimConfig, Simulator, Stimulus,
    Waveform,
};
use xtalk_core::rc2pi::{
    dominant_pole_metrics, noise_width, peak_noise, peak_noise_first_order, Threshold, TwoPiModel,
};
use xtalk_core::rlc_decouple::{
    decouple, mode_waveforms, peak_noise_rlc, sim_config_for, CcPrimeVariant, CoupledRlcPair, ReferenceLine, RlcOptions,
};
use xtalk_core::sweep_report::{
    rlc_oracle_peak, run_rc_corpus, run_rlc_corpus, sweep, Corpus, RlcPoint, SweepBase, SweepParam,
};

const F: f64 = 1e-15;
const PS: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_model(rng: &mut ChaCha8Rng) -> TwoPiModel {
    TwoPiModel {
        rd: rng.random_range(20.0..500.0),
        rs: rng.random_range(5.0..500.0),
        re: rng.random_range(5.0..500.0),
        c1: rng.random_range(1.0..100.0) * F,
        c2: rng.random_range(1.0..100.0) * F,
        cl: rng.random_range(1.0..100.0) * F,
        cx: rng.random_range(1.0..100.0) * F,
        tr: rng.random_range(10.0..500.0) * PS,
        vdd: 1.0,
    }
}

fn exact_vs_circuit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let models: Vec<TwoPiModel> = (0..50).map(|_| random_model(&mut rng)).collect();
    let worst = models
        .par_iter()
        .map(|m| {
            let fastest = m.pole_residue().poles.iter().map(|p| p.norm()).fold(0.0, f64::max);
            let (_, tv) = dominant_pole_metrics(m);
            let dt = (m.tr / 1000.0).min(0.05 / fastest);
            let cfg = SimConfig { dt, t_stop: m.tr + 8.0 * tv };
            let w = transient(&build_two_pi(m).unwrap(), &cfg).unwrap().remove(0);
            let peak = w.peak().0;
            let dev = (0..w.len()).map(|k| (w.samples[k] - m.waveform_exact(w.time(k))).abs()).fold(0.0, f64::max);
            dev / peak
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 0.005, format!("worst max|sim - exact| / peak = {:.2e} over 50 models", worst))
}

fn closed_form_anchors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = random_model(&mut rng);
        let mc = m.transfer_coeffs().monic().unwrap();
        let tx = (m.rd + m.rs) * m.cx;
        let tv = (m.rd + m.rs) * (m.cx + m.c2 + m.cl) + (m.re * m.cl + m.rd * m.c1);
        worst = worst.max(((mc.a1 / mc.b0) / tx - 1.0).abs());
        worst = worst.max(((mc.b1 / mc.b0) / tv - 1.0).abs());
    }
    outcome(worst <= 1e-12, format!("worst relative deviation {:.2e} over 1000 models", worst))
}

/// Crossing of a monotone function by bisection to machine precision.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let rising = f(hi) > f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn width_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut numeric, mut identity): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let (_, tv) = dominant_pole_metrics(&m);
        let w = noise_width(&m, Threshold::HalfPeak).unwrap();
        let (vmax, t_peak) = peak_noise(&m);
        let f = |t: f64| m.waveform_dominant(t) - 0.5 * vmax;
        let t1 = bisect(f, 0.0, t_peak);
        let t2 = bisect(f, t_peak, t_peak + 50.0 * tv);
        numeric = numeric.max(((t2 - t1) / w - 1.0).abs());
        let closed = m.tr + tv * (1.0 + (-m.tr / tv).exp()).ln();
        identity = identity.max((closed / w - 1.0).abs());
    }
    outcome(
        numeric <= 1e-6 && identity <= 1e-12,
        format!("numeric {:.2e} (tol 1e-6), identity {:.2e} (tol 1e-12)", numeric, identity),
    )
}

fn rc_corpus() -> Outcome {
    let r = run_rc_corpus(&Corpus::default_rc(2024, 100)).unwrap();
    let s = r.peak.summary();
    outcome(
        s.mean_abs_err <= 0.10 && r.peak.failed.is_empty(),
        format!(
            "mean peak error {:.2}% (max {:.2}%, {} cases, {} excluded, {} failed); mean width error {:.2}%",
            100.0 * s.mean_abs_err,
            100.0 * s.max_abs_err,
            s.n_cases,
            s.n_excluded,
            r.peak.failed.len(),
            100.0 * r.width.mean_abs_err
        ),
    )
}

fn first_order_comparison() -> Outcome {
    let base = TwoPiModel {
        rd: 100.0,
        rs: 50.0,
        re: 50.0,
        c1: 10.0 * F,
        c2: 30.0 * F,
        cl: 20.0 * F,
        cx: 50.0 * F,
        tr: 100.0 * PS,
        vdd: 1.0,
    };
    let (_, tv) = dominant_pole_metrics(&base);
    let rel = |x: f64| {
        let m = TwoPiModel { tr: x * tv, ..base };
        let vmax = peak_noise(&m).0;
        (vmax - peak_noise_first_order(&m)).abs() / vmax
    };
    let small = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5].map(rel).into_iter().fold(0.0, f64::max);
    let large = [5.0, 7.5, 10.0, 20.0, 50.0].map(rel).into_iter().fold(f64::INFINITY, f64::min);
    outcome(
        small <= 0.02 && large >= 0.30,
        format!(
            "max deviation for tr/tv <= 0.5: {:.2}%, min deviation for tr/tv >= 5: {:.1}%",
            100.0 * small,
            100.0 * large
        ),
    )
}

fn decoupling_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let pairs: Vec<CoupledRlcPair> = (0..10)
        .map(|_| {
            CoupledRlcPair::from_normalized(
                rng.random_range(0.0..0.9),
                rng.random_range(0.0..1.5),
                rng.random_range(0.0..5.0),
                rng.random_range(0.1..2.0),
                rng.random_range(0.0..1.0),
                &ReferenceLine::default(),
            )
        })
        .collect();
    let opts = RlcOptions { segmentation: Segmentation::Count(100), ..RlcOptions::default() };
    let worst = pairs
        .par_iter()
        .map(|p| {
            let (c, d) = decouple(p, CcPrimeVariant::Eigen).unwrap();
            let cfg = sim_config_for(&[c, d], &opts);
            let coupled = build_coupled(p, opts.segmentation).unwrap().simulate(&cfg).unwrap();
            let (ve, vo) = mode_waveforms(p, &opts).unwrap();
            (0..ve.len())
                .map(|k| (coupled[1].samples[k] - 0.5 * (ve.samples[k] - vo.samples[k])).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 1e-6, format!("worst max|victim - (Ve - Vo)/2| = {:.2e} vdd over 10 pairs", worst))
}

fn rlc_corpus() -> Outcome {
    let c = Corpus::default_rlc(2024, 100);
    let s = run_rlc_corpus(&c, &RlcOptions::default()).unwrap();
    let sum = s.summary();
    outcome(
        sum.mean_abs_err <= 0.15 && s.failed.is_empty(),
        format!(
            "mean peak error {:.2}% (max {:.1}%, {} cases, {} excluded, {} failed)",
            100.0 * sum.mean_abs_err,
            100.0 * sum.max_abs_err,
            sum.n_cases,
            sum.n_excluded,
            s.failed.len()
        ),
    )
}

fn fig4_point(zeta: f64) -> RlcPoint {
    RlcPoint::symmetric(0.769, 0.217, zeta, 0.25, 0.05)
}

fn zeta_trend() -> Outcome {
    let opts = RlcOptions::default();
    let grid = [0.25, 0.5, 1.0, 1.5, 2.0];
    let t = sweep(SweepParam::Zeta, &grid, &SweepBase::Rlc(fig4_point(1.0)), &opts).unwrap();
    let peaks: Vec<f64> = t.rows.iter().map(|r| r.model_peak).collect();
    let decreasing = t.rejected.is_empty() && peaks.windows(2).all(|w| w[1] < w[0]);
    let pair = fig4_point(2.0).pair(&ReferenceLine::default()).unwrap();
    let rlc = rlc_oracle_peak(&pair, &opts, false).unwrap();
    let rc = rlc_oracle_peak(&pair, &opts, true).unwrap();
    let gap = (rc - rlc).abs() / rlc;
    outcome(
        decreasing && gap <= 0.15,
        format!(
            "model peaks {:?}; RC vs RLC oracle at zeta 2: {:.4} vs {:.4} ({:.1}%)",
            peaks.iter().map(|p| (p * 1e4).round() / 1e4).collect::<Vec<_>>(),
            rc,
            rlc,
            100.0 * gap
        ),
    )
}

fn normalized_trends() -> Outcome {
    let opts = RlcOptions::default();
    let base = SweepBase::Rlc(fig4_point(1.0));
    let ct = sweep(SweepParam::Ct, &[0.005, 0.01, 0.025, 0.05, 0.075, 0.1], &base, &opts).unwrap();
    let ct_peaks: Vec<f64> = ct.rows.iter().map(|r| r.model_peak).collect();
    let (hi, lo) =
        (ct_peaks.iter().cloned().fold(0.0, f64::max), ct_peaks.iter().cloned().fold(f64::INFINITY, f64::min));
    let ct_var = (hi - lo) / hi;

    let rt = sweep(SweepParam::Rt, &[0.1, 0.25, 0.5, 1.0], &base, &opts).unwrap();
    let rt_peaks: Vec<f64> = rt.rows.iter().map(|r| r.model_peak).collect();
    let rt_decreasing = rt.rejected.is_empty() && rt_peaks.windows(2).all(|w| w[1] < w[0]);

    let kl_grid: Vec<f64> = (1..=18).map(|k| 0.05 * k as f64).collect();
    let kl = sweep(SweepParam::Kl, &kl_grid, &base, &opts).unwrap();
    let diffs: Vec<f64> = kl.rows.windows(2).map(|w| w[1].model_peak - w[0].model_peak).collect();
    let sign_changes = diffs.windows(2).filter(|d| d[0] * d[1] < 0.0).count();

    outcome(
        ct.rejected.is_empty() && ct_var <= 0.10 && rt_decreasing && sign_changes >= 1,
        format!(
            "ct variation {:.1}%; rt peaks {:?}; kl first-difference sign changes {}",
            100.0 * ct_var,
            rt_peaks.iter().map(|p| (p * 1e4).round() / 1e4).collect::<Vec<_>>(),
            sign_changes
        ),
    )
}

fn peak_time_localization() -> Outcome {
    let pair = fig4_point(1.0).pair(&ReferenceLine::default()).unwrap();
    let opts = RlcOptions::default();
    let est = peak_noise_rlc(&pair, &opts).unwrap();
    let (c, d) = decouple(&pair, opts.cc_variant).unwrap();
    let cfg = sim_config_for(&[c, d], &opts);
    let victim = build_coupled(&pair, opts.segmentation).unwrap().simulate(&cfg).unwrap().remove(1);
    let (v_min, t_min) = victim.trough();
    let off = (t_min - est.tf1) / est.tf1;
    outcome(
        v_min < 0.0 && off.abs() <= 0.20,
        format!(
            "negative peak {:.4} at {:.2} ps, tf1 = {:.2} ps ({:+.1}%)",
            v_min,
            t_min / PS,
            est.tf1 / PS,
            100.0 * off
        ),
    )
}

fn max_gap(a: &Waveform, b: &Waveform) -> f64 {
    // b is on a grid refined by an integer factor
    let k = ((a.dt / b.dt).round() as usize).max(1);
    (0..a.len()).map(|i| (a.samples[i] - b.samples[i * k]).abs()).fold(0.0, f64::max)
}

fn oracle_quality() -> Outcome {
    // self-convergence over three halvings
    let line = LineParams {
        r_pul: 0.05,
        l_pul: 0.5e-12,
        c_pul: 0.2e-15,
        h: 1000.0,
        rs: 25.0,
        c_load: 10e-15,
        input: Stimulus::Ramp { tr: 20e-12, vdd: 1.0 },
    };
    let seg = Segmentation::Count(20);
    let dts = [0.4e-12, 0.2e-12, 0.1e-12, 0.05e-12, 0.025e-12];
    let runs: Vec<Waveform> = dts
        .par_iter()
        .map(|&dt| build_single(&line, seg).unwrap().simulate(&SimConfig { dt, t_stop: 80e-12 }).unwrap().remove(0))
        .collect();
    let errs: Vec<f64> = runs.windows(2).map(|w| max_gap(&w[0], &w[1])).collect();
    let xs: Vec<f64> = dts[..errs.len()].iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let order_ok = (1.7..=2.3).contains(&slope);

    // zero-input energy
    let p = CoupledRlcPair::from_normalized(0.5, 0.4, 1.0, 0.5, 0.2, &ReferenceLine::default());
    let mut net = build_coupled(&p, Segmentation::Count(30)).unwrap();
    net.lines[0].input = Stimulus::Zero;
    let ckt = net.circuit().unwrap();
    let mut sim = Simulator::new(&ckt, 0.05e-12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let v: Vec<f64> = (0..ckt.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let i: Vec<f64> = (0..ckt.branches().len()).map(|_| rng.random_range(-0.02..0.02)).collect();
    sim.set_state(&v, &i);
    let e0 = sim.stored_energy();
    let mut e = e0;
    let mut energy_ok = true;
    for _ in 0..4000 {
        sim.step().unwrap();
        let next = sim.stored_energy();
        energy_ok &= next <= e + 1e-9 * e0;
        e = next;
    }

    // Elmore sanity on a single RC ladder
    let rc = LineParams {
        r_pul: 0.1,
        l_pul: 0.0,
        c_pul: 0.2e-15,
        h: 1000.0,
        rs: 100.0,
        c_load: 5e-15,
        input: Stimulus::Step { vdd: 1.0 },
    };
    let w = build_single(&rc, Segmentation::default())
        .unwrap()
        .simulate(&SimConfig { dt: 0.1e-12, t_stop: 200e-12 })
        .unwrap()
        .remove(0);
    let (rw, cw) = (rc.r_pul * rc.h, rc.c_pul * rc.h);
    let elmore = rc.rs * (cw + rc.c_load) + rw * (cw / 2.0 + rc.c_load);
    let t50 = w.crossings(0.5)[0];
    let elmore_gap = t50 / (0.69 * elmore) - 1.0;

    outcome(
        order_ok && energy_ok && elmore_gap.abs() <= 0.10,
        format!(
            "convergence exponent {:.3}; energy non-increasing: {} ({:.1e} of initial left); t50 vs 0.69 Elmore {:+.1}%",
            slope,
            energy_ok,
            e / e0,
            100.0 * elmore_gap
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        ("C1 two-pi closed form vs circuit transient", exact_vs_circuit, Duration::from_secs(10)),
        ("C2 closed-form anchors", closed_form_anchors, Duration::from_secs(1)),
        ("C3 width identity", width_identity, Duration::from_secs(1)),
        ("C4 RC corpus accuracy", rc_corpus, Duration::from_secs(300)),
        ("C5 first-order comparison", first_order_comparison, Duration::from_secs(1)),
        ("C6 decoupling exactness", decoupling_exactness, Duration::from_secs(60)),
        ("C7 RLC corpus accuracy", rlc_corpus, Duration::from_secs(600)),
        ("C8 damping trend", zeta_trend, Duration::from_secs(60)),
        ("C9 normalized-variable trends", normalized_trends, Duration::from_secs(120)),
        ("C10 negative peak time", peak_time_localization, Duration::from_secs(60)),
        ("C11 oracle quality gates", oracle_quality, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "{} {name}: {} [{:.2} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
