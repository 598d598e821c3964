// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use xtalk_core::ladder_sim::{
    build_coupled, build_rc_victim, build_two_pi, transient, write_waveforms, Segmentation, SimConfig, TimeScales,
    Waveform,
};
use xtalk_core::rc2pi::peak_noise_first_order;
use xtalk_core::rlc_decouple::{
    decouple, effective_params, estimate_from_modes, mode_waveforms, normalized_vars, sim_config_for, times_of_flight,
    victim_from_modes,
};
use xtalk_core::sweep_report::{
    fmt_sig, rc_sim_config, run_rc_corpus, run_rlc_corpus, sweep as run_sweep, write_cases_csv, write_sweep_rows,
    Corpus, CorpusKind, ErrorStats, SweepBase, SweepParam,
};
use xtalk_core::{CcPrimeVariant, RlcMethod, TwoPiModel};

use crate::config::{implied_rr, parse_config, parse_kind, AnalysisConfig, ModelInput, SweepSpec};
use crate::{CommonArgs, NumericalFailure, Overrides, SweepArgs, ValidateArgs, DEFAULT_COUNT, DEFAULT_SEED};

const PICO: f64 = 1e-12;
const DEFAULT_WAVEFORM_SAMPLES: usize = 501;

fn load(path: &Path) -> Result<AnalysisConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("config {}", path.display()))
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        bail!("--{name} must be a positive number, got {x}")
    }
}

/// Folds command-line overrides into the config so they are echoed too.
fn apply(cfg: &mut AnalysisConfig, o: &Overrides) -> Result<()> {
    if let Some(n) = o.samples {
        if n < 2 {
            bail!("--samples must be at least 2");
        }
        cfg.output.samples = Some(n);
    }
    if let Some(dt) = o.dt {
        cfg.sim.dt = Some(positive("dt", dt)? * PICO);
    }
    if let Some(t) = o.tstop {
        cfg.sim.t_stop = Some(positive("tstop", t)? * PICO);
    }
    if let Some(s) = o.segment_um {
        cfg.sim.segment_um = positive("segment-um", s)?;
    }
    if o.twa {
        cfg.sim.method = RlcMethod::Twa;
    }
    if o.ccprime_printed {
        cfg.sim.cc_variant = CcPrimeVariant::Printed;
    }
    Ok(())
}

fn resolve(path: &Path, o: &Overrides) -> Result<AnalysisConfig> {
    let mut cfg = load(path)?;
    apply(&mut cfg, o)?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

/// `<path>.<suffix>`, for files written next to the main artifact.
fn beside(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn require_finite(what: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(NumericalFailure(format!("{what} is not finite")).into())
    }
}

fn with_overrides(mut sim: SimConfig, cfg: &AnalysisConfig) -> Result<SimConfig> {
    if let Some(dt) = cfg.sim.dt {
        sim.dt = dt;
    }
    if let Some(t) = cfg.sim.t_stop {
        sim.t_stop = t;
    }
    let v = sim.validate();
    if !v.is_empty() {
        bail!("simulation grid: {}", v.join("; "));
    }
    Ok(sim)
}

fn rc_model(cfg: &AnalysisConfig) -> Result<(TwoPiModel, Option<Value>)> {
    match &cfg.model {
        Some(ModelInput::Geometry(g)) => {
            Ok((TwoPiModel::from_geometry(g)?, Some(serde_json::to_value(g.derive_lumped()?)?)))
        }
        Some(ModelInput::TwoPi(m)) => {
            m.check()?;
            Ok((*m, None))
        }
        Some(m) => bail!("analyze-rc needs a \"geometry\" or \"two_pi\" section, got an {} input", m.mode().name()),
        None => bail!("analyze-rc needs a \"geometry\" or \"two_pi\" section"),
    }
}

fn csv_header_and_rows(header: &str, t: impl Iterator<Item = f64>, cols: &[&dyn Fn(f64) -> f64]) -> String {
    let mut s = format!("{header}\n");
    for t in t {
        s.push_str(&fmt_sig(t));
        for c in cols {
            s.push(',');
            s.push_str(&fmt_sig(c(t)));
        }
        s.push('\n');
    }
    s
}

pub fn analyze_rc(args: &CommonArgs) -> Result<()> {
    let cfg = resolve(&args.config, &args.overrides)?;
    let (m, lumped) = rc_model(&cfg)?;
    let metrics = m.metrics();
    let coeffs = m.transfer_coeffs();
    let pr = m.pole_residue();
    require_finite("peak noise", &[metrics.vmax, metrics.t_peak])?;
    if let Some(path) = &cfg.output.waveform_csv {
        let n = cfg.output.samples.unwrap_or(DEFAULT_WAVEFORM_SAMPLES);
        let t_end = (2.0 * m.tr).max(m.tr + 8.0 * metrics.tv);
        let step = t_end / (n - 1) as f64;
        let exact = |t: f64| m.waveform_exact(t);
        let dominant = |t: f64| m.waveform_dominant(t);
        let text = csv_header_and_rows("t_s,v_exact,v_dominant", (0..n).map(|i| i as f64 * step), &[&exact, &dominant]);
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = json!({
        "config": cfg.echo(),
        "model": m,
        "lumped": lumped,
        "transfer": coeffs,
        "order_reduced": coeffs.is_order_reduced(),
        "pole_perturbation_applied": pr.pole_perturbation_applied,
        "metrics": metrics,
        "vmax_first_order": peak_noise_first_order(&m),
    });
    emit_json(args.overrides.out.as_deref(), &report)
}

pub fn analyze_rlc(args: &CommonArgs) -> Result<()> {
    let cfg = resolve(&args.config, &args.overrides)?;
    let model = cfg.model.as_ref().ok_or_else(|| anyhow!("analyze-rlc needs a \"pair\" or \"normalized\" section"))?;
    let pair = model
        .rlc_pair()?
        .ok_or_else(|| anyhow!("analyze-rlc needs a \"pair\" or \"normalized\" section, got an rc input"))?;
    let opts = cfg.sim.rlc_options();
    let eff = effective_params(&pair, opts.cc_variant)?;
    let (common, diff) = decouple(&pair, opts.cc_variant)?;
    let (tf1, tf2) = times_of_flight(&pair, opts.cc_variant)?;
    let (v1, v2) = mode_waveforms(&pair, &opts)?;
    let est = estimate_from_modes(tf1, tf2, &v1, &v2);
    require_finite("peak noise", &[est.v_neg, est.v_pos])?;
    if let Some(path) = &cfg.output.waveform_csv {
        let n = cfg.output.samples.unwrap_or(0);
        let (a, b) = (v1.limit_samples(n), v2.limit_samples(n));
        let mut s = String::from("t_s,v_common,v_differential,v_victim\n");
        for i in 0..a.len() {
            let (c, d) = (a.samples[i], b.samples[i]);
            s.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig(a.time(i)),
                fmt_sig(c),
                fmt_sig(d),
                fmt_sig(victim_from_modes(c, d))
            ));
        }
        fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    }
    let rr = match model {
        ModelInput::Normalized { point, .. } => Some(implied_rr(point)),
        _ => None,
    };
    let report = json!({
        "config": cfg.echo(),
        "pair": pair,
        "normalized": normalized_vars(&pair),
        "implied_rr": rr,
        "effective": eff,
        "modes": [common, diff],
        "estimate": est,
    });
    emit_json(args.overrides.out.as_deref(), &report)
}

pub fn simulate(args: &CommonArgs) -> Result<()> {
    let cfg = resolve(&args.config, &args.overrides)?;
    let (traces, sim): (Vec<Waveform>, SimConfig) = match &cfg.model {
        Some(ModelInput::Geometry(g)) => {
            let ckt = build_rc_victim(g, cfg.sim.segment_um)?;
            let sim = with_overrides(rc_sim_config(g)?, &cfg)?;
            (transient(&ckt, &sim)?, sim)
        }
        Some(ModelInput::TwoPi(m)) => {
            let ckt = build_two_pi(m)?;
            let tv = m.metrics().tv;
            let sim = with_overrides(SimConfig::auto(TimeScales { tf: None, tr: Some(m.tr), tv: Some(tv) }), &cfg)?;
            (transient(&ckt, &sim)?, sim)
        }
        Some(m @ (ModelInput::Pair(_) | ModelInput::Normalized { .. })) => {
            let pair = m.rlc_pair()?.expect("rlc input");
            let opts = cfg.sim.rlc_options();
            let net = build_coupled(&pair, Segmentation::Length(cfg.sim.segment_um))?;
            let (c, d) = decouple(&pair, opts.cc_variant)?;
            let sim = with_overrides(sim_config_for(&[c, d], &opts), &cfg)?;
            (net.simulate(&sim)?, sim)
        }
        None => bail!("simulate needs a model section"),
    };
    let n = cfg.output.samples.unwrap_or(0);
    let traces: Vec<Waveform> = traces.iter().map(|w| w.limit_samples(n)).collect();
    for w in &traces {
        require_finite("simulated waveform", &w.samples)?;
    }
    let mut buf = Vec::new();
    write_waveforms(&mut buf, &traces.iter().collect::<Vec<_>>())?;
    let out = args.overrides.out.as_deref();
    emit(out, &String::from_utf8(buf)?)?;
    if let Some(p) = out {
        emit_json(Some(&beside(p, "json")), &json!({"config": cfg.echo(), "sim": sim}))?;
    }
    Ok(())
}

fn stats_json(stats: &ErrorStats) -> Value {
    json!({"summary": stats.summary(), "stats": stats})
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => load(p)?,
        None => parse_config("{}")?,
    };
    apply(&mut cfg, &args.overrides)?;
    let flag_kind = args.kind.as_deref().map(parse_kind).transpose()?;
    let mut corpus = match (cfg.corpus.take(), flag_kind) {
        (Some(c), Some(k)) if c.kind != k => bail!("--kind disagrees with corpus.kind in the config"),
        (Some(c), _) => c,
        (None, Some(CorpusKind::Rc)) => Corpus::default_rc(DEFAULT_SEED, DEFAULT_COUNT),
        (None, Some(CorpusKind::Rlc)) => Corpus::default_rlc(DEFAULT_SEED, DEFAULT_COUNT),
        (None, None) => bail!("validate needs --kind rc|rlc or a corpus section in the config"),
    };
    if let Some(s) = args.seed {
        corpus.seed = s;
    }
    if let Some(n) = args.count {
        corpus.count = n;
    }
    let v = corpus.validate();
    if !v.is_empty() {
        bail!("corpus: {}", v.join("; "));
    }
    cfg.corpus = Some(corpus.clone());
    let out = args.overrides.out.as_deref();
    match corpus.kind {
        CorpusKind::Rc => {
            if args.overrides.segment_um.is_some() {
                eprintln!("note: the rc corpus always uses the default segment length");
            }
            let r = run_rc_corpus(&corpus)?;
            emit_json(out, &json!({"config": cfg.echo(), "peak": stats_json(&r.peak), "width": stats_json(&r.width)}))?;
            if let Some(p) = out {
                write_cases_csv(&beside(p, "peak_cases.csv"), &r.peak)?;
                write_cases_csv(&beside(p, "width_cases.csv"), &r.width)?;
            }
        }
        CorpusKind::Rlc => {
            let stats = run_rlc_corpus(&corpus, &cfg.sim.rlc_options())?;
            let mut report = stats_json(&stats);
            report["config"] = cfg.echo();
            emit_json(out, &report)?;
            if let Some(p) = out {
                write_cases_csv(&beside(p, "cases.csv"), &stats)?;
            }
        }
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let mut cfg = resolve(&args.config, &args.overrides)?;
    let from_cfg = cfg.sweep.take().unwrap_or(SweepSpec { param: None, grid: Vec::new() });
    let param: SweepParam = match (&args.param, from_cfg.param) {
        (Some(p), _) => p.parse()?,
        (None, Some(p)) => p,
        (None, None) => bail!("sweep needs --param or sweep.param in the config"),
    };
    let grid: Vec<f64> = match &args.grid {
        Some(g) => g.iter().map(|x| if param == SweepParam::Tr { x * PICO } else { *x }).collect(),
        None if from_cfg.param.is_some_and(|p| p != param) => {
            bail!("--param differs from sweep.param; give --grid too")
        }
        None => from_cfg.grid,
    };
    if grid.is_empty() {
        bail!("sweep needs a non-empty grid (--grid or sweep.grid)");
    }
    let base = match (&cfg.model, param.is_rlc()) {
        (Some(ModelInput::Normalized { point, reference }), true) => {
            if *reference != Default::default() {
                bail!("rlc sweeps run on the default reference line; drop normalized.reference");
            }
            SweepBase::Rlc(*point)
        }
        (Some(ModelInput::Geometry(g)), false) => SweepBase::Rc(*g),
        (_, true) => bail!("{} sweeps need a \"normalized\" section", param.name()),
        (_, false) => bail!("{} sweeps need a \"geometry\" section", param.name()),
    };
    cfg.sweep = Some(SweepSpec { param: Some(param), grid: grid.clone() });
    let table = run_sweep(param, &grid, &base, &cfg.sim.rlc_options())?;
    for (v, why) in &table.rejected {
        eprintln!("rejected {} = {}: {why}", param.name(), fmt_sig(*v));
    }
    if table.rows.is_empty() {
        bail!("no grid point could be evaluated");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    write_sweep_rows(&mut w, &table)?;
    let text = String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?;
    let out = args.overrides.out.as_deref();
    emit(out, &text)?;
    if let Some(p) = out {
        emit_json(Some(&beside(p, "json")), &json!({"config": cfg.echo(), "rejected": table.rejected}))?;
    }
    Ok(())
}
