// SPDX-License-Identifier: Apache-2.0

//! Random corpora, model-vs-oracle error statistics and one-parameter sweeps.
//!
//! Every case is drawn up front from a seeded ChaCha stream, evaluated in
//! parallel, and folded back in case order, so a given `(seed, ranges,
//! count)` always produces the same report bytes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder_sim::{
    build_coupled, build_rc_victim, transient, LadderNetlist, Segmentation, SimConfig, TimeScales, DEFAULT_SEGMENT_UM,
};
use crate::net_model::VictimNetGeometry;
use crate::rc2pi::{noise_width, Threshold, TwoPiModel};
use crate::rlc_decouple::{
    decouple, peak_noise_rlc, rr_for_zeta, sim_config_for, zeta, CoupledRlcPair, ReferenceLine, RlcOptions,
};

/// Oracle peaks below this fraction of vdd are excluded from error statistics.
pub const ORACLE_FLOOR: f64 = 1e-6;

/// Fixed scientific format (9 significant digits) used for every number written to CSV.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    Rc,
    Rlc,
}

/// Recipe for a reproducible set of random cases.
///
/// RC ranges are keyed by [`VictimNetGeometry`] field names in SI units
/// (lengths in µm). RLC ranges use the normalized variables `kl`, `kc`,
/// `rr`, `rt`, `ct` and the asymmetries `dc`, `dl`, applied on
/// [`ReferenceLine::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub seed: u64,
    pub ranges: BTreeMap<String, [f64; 2]>,
    pub count: usize,
    pub kind: CorpusKind,
}

const RC_KEYS: [&str; 9] = ["r_pul", "c_pul", "cc_pul", "rd", "cload", "tr", "ls_len", "lc_len", "le_len"];
const RLC_KEYS: [&str; 7] = ["kl", "kc", "rr", "rt", "ct", "dc", "dl"];

fn ranges(pairs: &[(&str, f64, f64)]) -> BTreeMap<String, [f64; 2]> {
    pairs.iter().map(|&(k, a, b)| (k.to_string(), [a, b])).collect()
}

impl Corpus {
    /// Desk-scale RC nets from 150 µm to 6 mm.
    pub fn default_rc(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            kind: CorpusKind::Rc,
            ranges: ranges(&[
                ("r_pul", 0.02, 0.4),
                ("c_pul", 0.05e-15, 0.4e-15),
                ("cc_pul", 0.02e-15, 0.5e-15),
                ("rd", 20.0, 500.0),
                ("cload", 1e-15, 50e-15),
                ("tr", 10e-12, 500e-12),
                ("ls_len", 50.0, 2000.0),
                ("lc_len", 50.0, 2000.0),
                ("le_len", 50.0, 2000.0),
            ]),
        }
    }

    /// Tightly coupled RLC pairs with asymmetries up to 30%.
    pub fn default_rlc(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            kind: CorpusKind::Rlc,
            ranges: ranges(&[
                ("kl", 0.2, 0.8),
                ("kc", 0.2, 1.0),
                ("rr", 0.2, 5.0),
                ("rt", 0.1, 1.0),
                ("ct", 0.01, 0.5),
                ("dc", -0.3, 0.3),
                ("dl", -0.3, 0.3),
            ]),
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.count == 0 {
            v.push("count must be >= 1".to_string());
        }
        let keys: &[&str] = match self.kind {
            CorpusKind::Rc => &RC_KEYS,
            CorpusKind::Rlc => &RLC_KEYS,
        };
        for k in keys {
            match self.ranges.get(*k) {
                None => v.push(format!("ranges.{k} is missing")),
                Some([a, b]) if !(a.is_finite() && b.is_finite() && a <= b) => {
                    v.push(format!("ranges.{k} must be a finite [min, max] with min <= max"))
                }
                _ => {}
            }
        }
        for k in self.ranges.keys() {
            if !keys.contains(&k.as_str()) {
                v.push(format!("ranges.{k} is not a parameter of this corpus kind"));
            }
        }
        v
    }

    fn check(&self, kind: CorpusKind) -> Result<()> {
        let mut v = self.validate();
        if self.kind != kind {
            v.insert(0, format!("corpus kind must be {kind:?}"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, key: &str) -> f64 {
        let [a, b] = self.ranges[key];
        if a == b {
            a
        } else {
            rng.random_range(a..=b)
        }
    }

    /// The RC cases of this corpus, in case order.
    pub fn rc_cases(&self) -> Result<Vec<VictimNetGeometry>> {
        self.check(CorpusKind::Rc)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.count)
            .map(|_| {
                let mut d = |k| self.draw(&mut rng, k);
                VictimNetGeometry {
                    r_pul: d("r_pul"),
                    c_pul: d("c_pul"),
                    cc_pul: d("cc_pul"),
                    rd: d("rd"),
                    cload: d("cload"),
                    tr: d("tr"),
                    ls_len: d("ls_len"),
                    lc_len: d("lc_len"),
                    le_len: d("le_len"),
                    vdd: 1.0,
                }
            })
            .collect())
    }

    /// The RLC cases of this corpus, in case order. Draws whose asymmetry
    /// would make the effective mutual inductance non-passive are redrawn.
    pub fn rlc_cases(&self) -> Result<Vec<CoupledRlcPair>> {
        self.check(CorpusKind::Rlc)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let reference = ReferenceLine::default();
        let mut out = Vec::with_capacity(self.count);
        let mut attempts = 0usize;
        while out.len() < self.count {
            attempts += 1;
            if attempts > 100 * self.count {
                return Err(Error::invalid("rlc ranges rarely produce valid pairs"));
            }
            let mut d = |k| self.draw(&mut rng, k);
            let (kl, kc, rr, rt, ct, dc, dl) = (d("kl"), d("kc"), d("rr"), d("rt"), d("ct"), d("dc"), d("dl"));
            let pair = CoupledRlcPair { dc, dl, ..CoupledRlcPair::from_normalized(kl, kc, rr, rt, ct, &reference) };
            if decouple(&pair, Default::default()).is_ok() {
                out.push(pair);
            }
        }
        Ok(out)
    }
}

/// One evaluated case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseError {
    pub id: usize,
    pub model: f64,
    pub oracle: f64,
    pub rel_err: f64,
}

/// Peak-referenced error statistics, `|model - oracle| / |oracle|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub cases: Vec<CaseError>,
    pub mean_abs_err: f64,
    pub max_abs_err: f64,
    pub worst_case_id: Option<usize>,
    /// Cases whose oracle value is below the floor.
    pub excluded: Vec<usize>,
    /// Cases where the model or the oracle could not be evaluated.
    pub failed: Vec<(usize, String)>,
}

/// The stable summary schema written next to corpus reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub mean_abs_err: f64,
    pub max_abs_err: f64,
    pub n_cases: usize,
    pub n_excluded: usize,
    pub worst_case_id: Option<usize>,
}

/// Outcome of one case before aggregation.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseOutcome {
    Compared {
        model: f64,
        oracle: f64,
    },
    /// Oracle below the floor.
    Excluded,
    Failed(String),
}

impl ErrorStats {
    /// Ordered fold over per-case outcomes; `floor` is absolute.
    pub fn from_outcomes(outcomes: &[CaseOutcome], floor: f64) -> Self {
        let mut cases = Vec::new();
        let mut excluded = Vec::new();
        let mut failed = Vec::new();
        for (id, o) in outcomes.iter().enumerate() {
            match o {
                CaseOutcome::Compared { oracle, .. } if oracle.abs() <= floor => excluded.push(id),
                CaseOutcome::Compared { model, oracle } => cases.push(CaseError {
                    id,
                    model: *model,
                    oracle: *oracle,
                    rel_err: (model.abs() - oracle.abs()).abs() / oracle.abs(),
                }),
                CaseOutcome::Excluded => excluded.push(id),
                CaseOutcome::Failed(msg) => failed.push((id, msg.clone())),
            }
        }
        let (mut max, mut worst, mut sum) = (0.0f64, None, 0.0);
        for c in &cases {
            sum += c.rel_err;
            if worst.is_none() || c.rel_err > max {
                max = c.rel_err;
                worst = Some(c.id);
            }
        }
        let mean = if cases.is_empty() { 0.0 } else { sum / cases.len() as f64 };
        Self { cases, mean_abs_err: mean, max_abs_err: max, worst_case_id: worst, excluded, failed }
    }

    pub fn summary(&self) -> ErrorSummary {
        ErrorSummary {
            mean_abs_err: self.mean_abs_err,
            max_abs_err: self.max_abs_err,
            n_cases: self.cases.len(),
            n_excluded: self.excluded.len(),
            worst_case_id: self.worst_case_id,
        }
    }
}

/// Peak and width statistics of an RC corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcCorpusReport {
    pub peak: ErrorStats,
    pub width: ErrorStats,
}

/// Oracle victim waveform for an RC geometry: the distributed ladder with
/// the aggressor ramp injected through the distributed coupling capacitance.
pub fn rc_oracle(geom: &VictimNetGeometry, seg_len: f64) -> Result<crate::ladder_sim::Waveform> {
    let ckt = build_rc_victim(geom, seg_len)?;
    let mut w = transient(&ckt, &rc_sim_config(geom)?)?;
    Ok(w.remove(0))
}

/// Default simulation grid for the distributed RC victim of `geom`.
pub fn rc_sim_config(geom: &VictimNetGeometry) -> Result<SimConfig> {
    let m = TwoPiModel::from_geometry(geom)?;
    // the grid only needs the rough time scales; the victim's total RC is an upper bound
    let total_c = geom.c_pul * geom.total_len() + geom.cc_pul * geom.lc_len + geom.cload;
    let rc = (geom.rd + geom.r_pul * geom.total_len()) * total_c;
    let tv = m.metrics().tv.max(1e-3 * geom.tr);
    let mut cfg = SimConfig::auto(TimeScales { tf: None, tr: Some(geom.tr), tv: Some(tv) });
    cfg.t_stop = cfg.t_stop.max(geom.tr + 3.0 * rc);
    Ok(cfg)
}

fn rc_case(geom: &VictimNetGeometry) -> (CaseOutcome, CaseOutcome) {
    let fail = |e: Error| (CaseOutcome::Failed(e.to_string()), CaseOutcome::Failed(e.to_string()));
    let m = match TwoPiModel::from_geometry(geom) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let metrics = m.metrics();
    let w = match rc_oracle(geom, DEFAULT_SEGMENT_UM) {
        Ok(w) => w,
        Err(e) => return fail(e),
    };
    let (o_peak, _) = w.peak();
    let peak = CaseOutcome::Compared { model: metrics.vmax, oracle: o_peak };
    let width = match (noise_width(&m, Threshold::HalfPeak), w.width_at(0.5 * o_peak)) {
        (Ok(mw), Some(ow)) if o_peak > ORACLE_FLOOR * geom.vdd => CaseOutcome::Compared { model: mw, oracle: ow },
        (Err(e), _) => CaseOutcome::Failed(e.to_string()),
        _ => CaseOutcome::Excluded,
    };
    (peak, width)
}

/// Two-π closed forms against the distributed ladder, for peak and half-peak width.
pub fn run_rc_corpus(corpus: &Corpus) -> Result<RcCorpusReport> {
    let cases = corpus.rc_cases()?;
    let outcomes: Vec<(CaseOutcome, CaseOutcome)> = cases.par_iter().map(rc_case).collect();
    let (peaks, widths): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    Ok(RcCorpusReport {
        peak: ErrorStats::from_outcomes(&peaks, ORACLE_FLOOR),
        width: ErrorStats::from_outcomes(&widths, 0.0),
    })
}

/// Peak magnitude of the victim in the coupled ladder. With `rc_only` the
/// inductances are dropped, leaving the distributed RC reference.
pub fn rlc_oracle_peak(pair: &CoupledRlcPair, opts: &RlcOptions, rc_only: bool) -> Result<f64> {
    let mut net: LadderNetlist = build_coupled(pair, opts.segmentation)?;
    if rc_only {
        net.lines.iter_mut().for_each(|l| l.l_seg = 0.0);
        net.lm_seg = 0.0;
    }
    let (c, d) = decouple(pair, opts.cc_variant)?;
    let cfg = sim_config_for(&[c, d], opts);
    let out = net.simulate(&cfg)?;
    Ok(out[1].peak_abs().0.abs())
}

fn rlc_case(pair: &CoupledRlcPair, opts: &RlcOptions) -> CaseOutcome {
    let run = || -> Result<CaseOutcome> {
        let est = peak_noise_rlc(pair, opts)?;
        let oracle = rlc_oracle_peak(pair, opts, false)?;
        Ok(CaseOutcome::Compared { model: est.v_peak, oracle })
    };
    run().unwrap_or_else(|e| CaseOutcome::Failed(e.to_string()))
}

/// Time-of-flight peak model against the coupled RLC ladder.
pub fn run_rlc_corpus(corpus: &Corpus, opts: &RlcOptions) -> Result<ErrorStats> {
    let cases = corpus.rlc_cases()?;
    let outcomes: Vec<CaseOutcome> = cases.par_iter().map(|p| rlc_case(p, opts)).collect();
    Ok(ErrorStats::from_outcomes(&outcomes, ORACLE_FLOOR))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Damping, realized through the line resistance at fixed `rt`, `ct`.
    /// The other normalized sweeps hold `zeta` fixed the same way.
    Zeta,
    Ct,
    Rt,
    Kl,
    Kc,
    /// Aggressor transition time (s).
    Tr,
    /// Position of the coupled region as a fraction of the uncoupled length
    /// placed before it: 0 is at the driver, 1 at the receiver.
    CouplingPosition,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Zeta => "zeta",
            SweepParam::Ct => "ct",
            SweepParam::Rt => "rt",
            SweepParam::Kl => "kl",
            SweepParam::Kc => "kc",
            SweepParam::Tr => "tr",
            SweepParam::CouplingPosition => "coupling_position",
        }
    }

    pub fn is_rlc(self) -> bool {
        matches!(self, SweepParam::Zeta | SweepParam::Ct | SweepParam::Rt | SweepParam::Kl | SweepParam::Kc)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "zeta" => SweepParam::Zeta,
            "ct" => SweepParam::Ct,
            "rt" => SweepParam::Rt,
            "kl" => SweepParam::Kl,
            "kc" => SweepParam::Kc,
            "tr" => SweepParam::Tr,
            "coupling_position" | "position" => SweepParam::CouplingPosition,
            other => {
                return Err(Error::invalid(format!(
                    "unknown sweep parameter '{other}' (expected zeta, ct, rt, kl, kc, tr or coupling_position)"
                )))
            }
        })
    }
}

/// Operating point in the five normalized variables plus asymmetries.
/// The line resistance follows from `zeta`, `rt` and `ct`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlcPoint {
    pub kl: f64,
    pub kc: f64,
    pub zeta: f64,
    pub rt: f64,
    pub ct: f64,
    #[serde(default)]
    pub dc: f64,
    #[serde(default)]
    pub dl: f64,
}

impl RlcPoint {
    /// Identical lines.
    pub fn symmetric(kl: f64, kc: f64, zeta: f64, rt: f64, ct: f64) -> Self {
        Self { kl, kc, zeta, rt, ct, dc: 0.0, dl: 0.0 }
    }

    pub fn rr(&self) -> f64 {
        rr_for_zeta(self.zeta, self.rt, self.ct)
    }

    pub fn pair(&self, reference: &ReferenceLine) -> Result<CoupledRlcPair> {
        let rr = self.rr();
        if !(rr >= 0.0) {
            return Err(Error::invalid(format!(
                "zeta {} needs negative line resistance at rt = {}, ct = {}",
                self.zeta, self.rt, self.ct
            )));
        }
        if !(self.ct >= 0.0 && self.rt > 0.0 && (0.0..1.0).contains(&self.kl) && self.kc >= 0.0) {
            return Err(Error::invalid("need ct >= 0, rt > 0, 0 <= kl < 1, kc >= 0"));
        }
        let pair = CoupledRlcPair {
            dc: self.dc,
            dl: self.dl,
            ..CoupledRlcPair::from_normalized(self.kl, self.kc, rr, self.rt, self.ct, reference)
        };
        let v = pair.validate();
        if v.is_empty() {
            Ok(pair)
        } else {
            Err(Error::Invalid(v))
        }
    }
}

/// Fixed part of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepBase {
    Rc(VictimNetGeometry),
    Rlc(RlcPoint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    /// Swept value; for damping sweeps the realized `zeta`.
    pub value: f64,
    pub model_peak: f64,
    pub oracle_peak: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Grid points that could not be evaluated, with the reason.
    pub rejected: Vec<(f64, String)>,
}

fn sweep_point(param: SweepParam, value: f64, base: &SweepBase, opts: &RlcOptions) -> Result<SweepRow> {
    let row = |value: f64, model: f64, oracle: f64| SweepRow {
        param: param.name().to_string(),
        value,
        model_peak: model,
        oracle_peak: oracle,
        rel_err: if oracle.abs() > 0.0 { (model.abs() - oracle.abs()).abs() / oracle.abs() } else { f64::NAN },
    };
    match (base, param.is_rlc()) {
        (SweepBase::Rlc(p), true) => {
            let mut p = *p;
            match param {
                SweepParam::Zeta => p.zeta = value,
                SweepParam::Ct => p.ct = value,
                SweepParam::Rt => p.rt = value,
                SweepParam::Kl => p.kl = value,
                SweepParam::Kc => p.kc = value,
                _ => unreachable!(),
            }
            let pair = p.pair(&ReferenceLine::default())?;
            let est = peak_noise_rlc(&pair, opts)?;
            let oracle = rlc_oracle_peak(&pair, opts, false)?;
            // report the damping actually realized by the derived line resistance
            let shown = if param == SweepParam::Zeta {
                zeta(pair.r * pair.h / (pair.l / pair.cg).sqrt(), p.rt, p.ct)
            } else {
                value
            };
            Ok(row(shown, est.v_peak, oracle))
        }
        (SweepBase::Rc(g), false) => {
            let mut g = *g;
            match param {
                SweepParam::Tr => g.tr = value,
                SweepParam::CouplingPosition => {
                    if !(0.0..=1.0).contains(&value) {
                        return Err(Error::invalid("coupling position must lie in [0, 1]"));
                    }
                    let free = g.ls_len + g.le_len;
                    g.ls_len = value * free;
                    g.le_len = free - g.ls_len;
                }
                _ => unreachable!(),
            }
            let m = TwoPiModel::from_geometry(&g)?;
            let w = rc_oracle(&g, opts_seg_len(opts, &g))?;
            Ok(row(value, m.metrics().vmax, w.peak().0))
        }
        _ => unreachable!("base kind checked by the caller"),
    }
}

fn opts_seg_len(opts: &RlcOptions, g: &VictimNetGeometry) -> f64 {
    match opts.segmentation {
        Segmentation::Length(l) => l,
        Segmentation::Count(n) => g.total_len() / n.max(1) as f64,
    }
}

/// Model and oracle peaks over a grid, in grid order.
///
/// Points that violate the model's preconditions are reported in
/// `rejected` instead of aborting the sweep. A base of the wrong kind for
/// the parameter is an error.
pub fn sweep(param: SweepParam, grid: &[f64], base: &SweepBase, opts: &RlcOptions) -> Result<SweepTable> {
    if param.is_rlc() != matches!(base, SweepBase::Rlc(_)) {
        let need = if param.is_rlc() { "an rlc" } else { "an rc" };
        return Err(Error::invalid(format!("{} sweeps need {need} base", param.name())));
    }
    let results: Vec<Result<SweepRow>> = grid.par_iter().map(|&v| sweep_point(param, v, base, opts)).collect();
    let mut table = SweepTable { rows: Vec::new(), rejected: Vec::new() };
    for (v, r) in grid.iter().zip(results) {
        match r {
            Ok(row) => table.rows.push(row),
            Err(e) => table.rejected.push((*v, e.to_string())),
        }
    }
    Ok(table)
}

pub const SWEEP_HEADER: [&str; 5] = ["param", "value", "model_peak", "oracle_peak", "rel_err"];
pub const CASES_HEADER: [&str; 4] = ["case_id", "model", "oracle", "rel_err"];

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

/// Writes a sweep table. The header is always present.
pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    write_sweep_rows(&mut w, table).map_err(csv_err(path))?;
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_sweep_rows<W: Write>(w: &mut csv::Writer<W>, table: &SweepTable) -> csv::Result<()> {
    w.write_record(SWEEP_HEADER)?;
    for r in &table.rows {
        w.write_record([
            r.param.clone(),
            fmt_sig(r.value),
            fmt_sig(r.model_peak),
            fmt_sig(r.oracle_peak),
            fmt_sig(r.rel_err),
        ])?;
    }
    Ok(())
}

/// Writes per-case errors of a corpus run.
pub fn write_cases_csv(path: &Path, stats: &ErrorStats) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    write_case_rows(&mut w, stats).map_err(csv_err(path))?;
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_case_rows<W: Write>(w: &mut csv::Writer<W>, stats: &ErrorStats) -> csv::Result<()> {
    w.write_record(CASES_HEADER)?;
    for c in &stats.cases {
        w.write_record([c.id.to_string(), fmt_sig(c.model), fmt_sig(c.oracle), fmt_sig(c.rel_err)])?;
    }
    Ok(())
}

/// Writes `{mean_abs_err, max_abs_err, n_cases, n_excluded, worst_case_id}`.
pub fn write_summary_json(path: &Path, stats: &ErrorStats) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    serde_json::to_writer_pretty(&mut f, &stats.summary()).map_err(|e| io(e.into()))?;
    writeln!(f).map_err(io)?;
    f.flush().map_err(io)
}
