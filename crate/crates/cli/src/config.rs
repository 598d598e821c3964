// SPDX-License-Identifier: Apache-2.0

//! Strict JSON analysis configs.
//!
//! Quantities are plain numbers in the boundary units (µm, Ω, fF, pH, ps, V)
//! or strings with an explicit unit such as `"0.2 fF/um"` or `"1 ns"`.
//! Unknown keys are errors, with a suggestion when one is close.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};
use xtalk_core::ladder_sim::Segmentation;
use xtalk_core::ladder_sim::DEFAULT_SEGMENT_UM;
use xtalk_core::rlc_decouple::{rr_for_zeta, zeta, ReferenceLine, RlcOptions};
use xtalk_core::sweep_report::{Corpus, CorpusKind, RlcPoint, SweepParam};
use xtalk_core::{CcPrimeVariant, CoupledRlcPair, Error as CoreError, RlcMethod, TwoPiModel, VictimNetGeometry};

/// Physical dimension of a config value, with accepted unit spellings and
/// their factors into the internal units. The first entry is the unit of a
/// bare number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Length,
    Resistance,
    ResPerLen,
    Cap,
    CapPerLen,
    IndPerLen,
    Time,
    Voltage,
    Ratio,
}

impl Dim {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dim::Length => &[("um", 1.0), ("nm", 1e-3), ("mm", 1e3)],
            Dim::Resistance => &[("ohm", 1.0), ("kohm", 1e3)],
            Dim::ResPerLen => &[("ohm/um", 1.0), ("ohm/mm", 1e-3)],
            Dim::Cap => &[("fF", 1e-15), ("aF", 1e-18), ("pF", 1e-12), ("F", 1.0)],
            Dim::CapPerLen => &[("fF/um", 1e-15), ("aF/um", 1e-18), ("fF/mm", 1e-18), ("pF/mm", 1e-15)],
            Dim::IndPerLen => &[("pH/um", 1e-12), ("fH/um", 1e-15), ("nH/mm", 1e-12)],
            Dim::Time => &[("ps", 1e-12), ("fs", 1e-15), ("ns", 1e-9), ("s", 1.0)],
            Dim::Voltage => &[("V", 1.0), ("mV", 1e-3)],
            Dim::Ratio => &[("", 1.0)],
        }
    }

    /// Factor from a bare number to the internal unit.
    fn bare(self) -> f64 {
        self.units()[0].1
    }
}

fn normalize_unit(u: &str) -> String {
    u.trim().replace(['µ', 'μ'], "u").replace('Ω', "ohm").replace("Ohm", "ohm").replace(' ', "")
}

/// Converts a number or unit-suffixed string into internal units.
pub fn quantity(v: &Value, dim: Dim, key: &str) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| anyhow!("{key}: not a finite number"))? * dim.bare(),
        Value::String(s) => {
            let s = s.trim();
            let split = (1..=s.len())
                .rev()
                .filter(|&i| s.is_char_boundary(i))
                .find(|&i| s[..i].trim().parse::<f64>().is_ok())
                .ok_or_else(|| anyhow!("{key}: \"{s}\" does not start with a number"))?;
            let num: f64 = s[..split].trim().parse()?;
            let unit = normalize_unit(&s[split..]);
            if dim == Dim::Ratio {
                if !unit.is_empty() {
                    bail!("{key}: is dimensionless, drop the unit \"{}\"", s[split..].trim());
                }
                num
            } else if unit.is_empty() {
                num * dim.bare()
            } else {
                let factor = dim.units().iter().find(|(u, _)| *u == unit).map(|(_, f)| *f).ok_or_else(|| {
                    let names: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
                    anyhow!(
                        "{key}: unit \"{}\" not accepted here, expected one of {}",
                        s[split..].trim(),
                        names.join(", ")
                    )
                })?;
                num * factor
            }
        }
        other => bail!("{key}: expected a number or a string with a unit, got {other}"),
    };
    if !x.is_finite() {
        bail!("{key}: value must be finite");
    }
    Ok(x)
}

/// Common misnamings, keyed by the squashed spelling. The first target that
/// exists in the section is suggested.
const ALIASES: &[(&str, &[&str])] = &[
    ("couplingcap", &["cc_pul", "cc", "cx"]),
    ("couplingcapacitance", &["cc_pul", "cc", "cx"]),
    ("ccoupling", &["cc_pul", "cc", "cx"]),
    ("ccouple", &["cc_pul", "cc", "cx"]),
    ("groundcap", &["c_pul", "cg"]),
    ("groundcapacitance", &["c_pul", "cg"]),
    ("cground", &["c_pul", "cg"]),
    ("cgnd", &["c_pul", "cg"]),
    ("loadcap", &["cload", "cl_load", "cl"]),
    ("loadcapacitance", &["cload", "cl_load", "cl"]),
    ("load", &["cload", "cl_load", "cl"]),
    ("risetime", &["tr"]),
    ("rise", &["tr"]),
    ("trise", &["tr"]),
    ("slew", &["tr"]),
    ("transition", &["tr"]),
    ("driver", &["rd", "rs_drv"]),
    ("driverresistance", &["rd", "rs_drv"]),
    ("rdriver", &["rd", "rs_drv"]),
    ("rdrv", &["rd", "rs_drv"]),
    ("resistance", &["r_pul", "r"]),
    ("inductance", &["l"]),
    ("mutual", &["lm"]),
    ("mutualinductance", &["lm"]),
    ("length", &["h", "lc_len"]),
    ("supply", &["vdd"]),
    ("vcc", &["vdd"]),
    ("voltage", &["vdd"]),
    ("timestep", &["dt"]),
    ("step", &["dt"]),
    ("tstop", &["t_stop"]),
    ("tend", &["t_stop"]),
    ("segment", &["segment_um"]),
    ("seglen", &["segment_um"]),
    ("segmentlength", &["segment_um"]),
];

fn squash(s: &str) -> String {
    s.chars().filter(|c| !matches!(c, '_' | '-' | ' ')).flat_map(char::to_lowercase).collect()
}

/// Closest valid key for a misspelled one.
pub fn suggest(key: &str, valid: &[&str]) -> Option<String> {
    let k = squash(key);
    if let Some((_, targets)) = ALIASES.iter().find(|(a, _)| *a == k) {
        if let Some(t) = targets.iter().find(|t| valid.contains(t)) {
            return Some(t.to_string());
        }
    }
    let (score, best) = valid
        .iter()
        .map(|v| {
            (strsim::normalized_damerau_levenshtein(&k, &squash(v)).max(strsim::jaro_winkler(&k, &squash(v)) - 0.3), *v)
        })
        .fold((0.0, ""), |a, b| if b.0 > a.0 { b } else { a });
    (score >= 0.5).then(|| best.to_string())
}

/// A JSON object whose keys are checked against a fixed list.
struct Section<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Section<'a> {
    fn new(path: &str, v: &'a Value, keys: &[&str]) -> Result<Self> {
        let map = v.as_object().ok_or_else(|| anyhow!("{path}: expected an object"))?;
        for k in map.keys() {
            if !keys.contains(&k.as_str()) {
                let full = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                return Err(match suggest(k, keys) {
                    Some(s) => anyhow!("unknown key \"{full}\"; did you mean \"{s}\"?"),
                    None => anyhow!("unknown key \"{full}\"; expected one of {}", keys.join(", ")),
                });
            }
        }
        Ok(Self { path: path.to_string(), map })
    }

    fn name(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn opt(&self, key: &str, dim: Dim) -> Result<Option<f64>> {
        self.get(key).map(|v| quantity(v, dim, &self.name(key))).transpose()
    }

    fn req(&self, key: &str, dim: Dim) -> Result<f64> {
        self.opt(key, dim)?.ok_or_else(|| anyhow!("missing required key \"{}\"", self.name(key)))
    }

    fn or(&self, key: &str, dim: Dim, default: f64) -> Result<f64> {
        Ok(self.opt(key, dim)?.unwrap_or(default))
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        self.get(key).map(|v| v.as_str().ok_or_else(|| anyhow!("{}: expected a string", self.name(key)))).transpose()
    }

    fn uint(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| v.as_u64().ok_or_else(|| anyhow!("{}: expected a non-negative integer", self.name(key))))
            .transpose()
    }
}

/// Which model family a config describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Rc,
    Rlc,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Rc => "rc",
            ModeKind::Rlc => "rlc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelInput {
    Geometry(VictimNetGeometry),
    TwoPi(TwoPiModel),
    Pair(CoupledRlcPair),
    Normalized { point: RlcPoint, reference: ReferenceLine },
}

impl ModelInput {
    pub fn mode(&self) -> ModeKind {
        match self {
            ModelInput::Geometry(_) | ModelInput::TwoPi(_) => ModeKind::Rc,
            ModelInput::Pair(_) | ModelInput::Normalized { .. } => ModeKind::Rlc,
        }
    }

    /// The coupled pair for RLC inputs.
    pub fn rlc_pair(&self) -> Result<Option<CoupledRlcPair>> {
        Ok(match self {
            ModelInput::Pair(p) => Some(*p),
            ModelInput::Normalized { point, reference } => Some(point.pair(reference)?),
            _ => None,
        })
    }
}

/// Simulation and model switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    /// s
    pub dt: Option<f64>,
    /// s
    pub t_stop: Option<f64>,
    /// µm
    pub segment_um: f64,
    pub method: RlcMethod,
    pub cc_variant: CcPrimeVariant,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            dt: None,
            t_stop: None,
            segment_um: DEFAULT_SEGMENT_UM,
            method: RlcMethod::Ladder,
            cc_variant: CcPrimeVariant::Eigen,
        }
    }
}

impl SimSettings {
    pub fn rlc_options(&self) -> RlcOptions {
        RlcOptions {
            method: self.method,
            segmentation: Segmentation::Length(self.segment_um),
            cc_variant: self.cc_variant,
            dt: self.dt,
            t_stop: self.t_stop,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputSettings {
    pub samples: Option<usize>,
    pub waveform_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: Option<SweepParam>,
    /// Internal units (seconds for `tr`).
    pub grid: Vec<f64>,
}

/// A fully parsed and validated config, in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub model: Option<ModelInput>,
    pub sim: SimSettings,
    pub output: OutputSettings,
    pub corpus: Option<Corpus>,
    pub sweep: Option<SweepSpec>,
}

const TOP_KEYS: &[&str] = &["mode", "geometry", "two_pi", "pair", "normalized", "sim", "output", "corpus", "sweep"];
const GEOMETRY_KEYS: &[&str] = &["ls_len", "lc_len", "le_len", "r_pul", "c_pul", "cc_pul", "rd", "cload", "tr", "vdd"];
const TWO_PI_KEYS: &[&str] = &["rd", "rs", "re", "c1", "c2", "cl", "cx", "tr", "vdd"];
const PAIR_KEYS: &[&str] = &["r", "dr", "l", "dl", "lm", "cg", "dc", "cc", "h", "rs_drv", "cl_load", "vdd"];
const NORMALIZED_KEYS: &[&str] = &["kl", "kc", "zeta", "rr", "rt", "ct", "dc", "dl", "reference"];
const REFERENCE_KEYS: &[&str] = &["l", "cg", "h"];
const SIM_KEYS: &[&str] = &["dt", "t_stop", "segment_um", "method", "ccprime"];
const OUTPUT_KEYS: &[&str] = &["samples", "waveform_csv"];
const CORPUS_KEYS: &[&str] = &["kind", "seed", "count", "ranges"];
const SWEEP_KEYS: &[&str] = &["param", "grid"];

fn geometry_dim(key: &str) -> Option<Dim> {
    Some(match key {
        "ls_len" | "lc_len" | "le_len" => Dim::Length,
        "r_pul" => Dim::ResPerLen,
        "c_pul" | "cc_pul" => Dim::CapPerLen,
        "rd" => Dim::Resistance,
        "cload" => Dim::Cap,
        "tr" => Dim::Time,
        "vdd" => Dim::Voltage,
        _ => return None,
    })
}

fn corpus_dim(kind: CorpusKind, key: &str) -> Option<Dim> {
    match kind {
        CorpusKind::Rc => geometry_dim(key).filter(|_| key != "vdd"),
        CorpusKind::Rlc => ["kl", "kc", "rr", "rt", "ct", "dc", "dl"].contains(&key).then_some(Dim::Ratio),
    }
}

fn sweep_dim(param: SweepParam) -> Dim {
    if param == SweepParam::Tr {
        Dim::Time
    } else {
        Dim::Ratio
    }
}

fn invalid(section: &str, violations: Vec<String>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        bail!("{section}: {}", violations.join("; "))
    }
}

fn parse_geometry(v: &Value) -> Result<VictimNetGeometry> {
    let s = Section::new("geometry", v, GEOMETRY_KEYS)?;
    let g = VictimNetGeometry {
        ls_len: s.or("ls_len", Dim::Length, 0.0)?,
        lc_len: s.req("lc_len", Dim::Length)?,
        le_len: s.or("le_len", Dim::Length, 0.0)?,
        r_pul: s.req("r_pul", Dim::ResPerLen)?,
        c_pul: s.req("c_pul", Dim::CapPerLen)?,
        cc_pul: s.req("cc_pul", Dim::CapPerLen)?,
        rd: s.req("rd", Dim::Resistance)?,
        cload: s.req("cload", Dim::Cap)?,
        tr: s.req("tr", Dim::Time)?,
        vdd: s.or("vdd", Dim::Voltage, 1.0)?,
    };
    invalid("geometry", g.validate())?;
    Ok(g)
}

fn parse_two_pi(v: &Value) -> Result<TwoPiModel> {
    let s = Section::new("two_pi", v, TWO_PI_KEYS)?;
    let m = TwoPiModel {
        rd: s.req("rd", Dim::Resistance)?,
        rs: s.req("rs", Dim::Resistance)?,
        re: s.req("re", Dim::Resistance)?,
        c1: s.req("c1", Dim::Cap)?,
        c2: s.req("c2", Dim::Cap)?,
        cl: s.req("cl", Dim::Cap)?,
        cx: s.req("cx", Dim::Cap)?,
        tr: s.req("tr", Dim::Time)?,
        vdd: s.or("vdd", Dim::Voltage, 1.0)?,
    };
    invalid("two_pi", m.validate())?;
    Ok(m)
}

fn parse_pair(v: &Value) -> Result<CoupledRlcPair> {
    let s = Section::new("pair", v, PAIR_KEYS)?;
    let dr = s.or("dr", Dim::Ratio, 0.0)?;
    if dr != 0.0 {
        return Err(CoreError::AsymmetricResistance(dr)).context("pair.dr");
    }
    let p = CoupledRlcPair {
        r: s.req("r", Dim::ResPerLen)?,
        dr,
        l: s.req("l", Dim::IndPerLen)?,
        dl: s.or("dl", Dim::Ratio, 0.0)?,
        lm: s.or("lm", Dim::IndPerLen, 0.0)?,
        cg: s.req("cg", Dim::CapPerLen)?,
        dc: s.or("dc", Dim::Ratio, 0.0)?,
        cc: s.or("cc", Dim::CapPerLen, 0.0)?,
        h: s.req("h", Dim::Length)?,
        rs_drv: s.req("rs_drv", Dim::Resistance)?,
        cl_load: s.or("cl_load", Dim::Cap, 0.0)?,
        vdd: s.or("vdd", Dim::Voltage, 1.0)?,
    };
    invalid("pair", p.validate())?;
    Ok(p)
}

fn parse_normalized(v: &Value) -> Result<(RlcPoint, ReferenceLine)> {
    let s = Section::new("normalized", v, NORMALIZED_KEYS)?;
    let rt = s.req("rt", Dim::Ratio)?;
    let ct = s.req("ct", Dim::Ratio)?;
    let z = match (s.opt("zeta", Dim::Ratio)?, s.opt("rr", Dim::Ratio)?) {
        (Some(z), None) => z,
        (None, Some(rr)) => zeta(rr, rt, ct),
        (Some(_), Some(_)) => bail!("normalized: give either \"zeta\" or \"rr\", not both"),
        (None, None) => bail!("normalized: missing \"zeta\" (or \"rr\")"),
    };
    let point = RlcPoint {
        kl: s.req("kl", Dim::Ratio)?,
        kc: s.req("kc", Dim::Ratio)?,
        zeta: z,
        rt,
        ct,
        dc: s.or("dc", Dim::Ratio, 0.0)?,
        dl: s.or("dl", Dim::Ratio, 0.0)?,
    };
    let reference = match s.get("reference") {
        None => ReferenceLine::default(),
        Some(r) => {
            let d = ReferenceLine::default();
            let r = Section::new("normalized.reference", r, REFERENCE_KEYS)?;
            ReferenceLine {
                l: r.or("l", Dim::IndPerLen, d.l)?,
                cg: r.or("cg", Dim::CapPerLen, d.cg)?,
                h: r.or("h", Dim::Length, d.h)?,
            }
        }
    };
    point.pair(&reference).context("normalized")?;
    Ok((point, reference))
}

fn parse_sim(v: Option<&Value>) -> Result<SimSettings> {
    let mut out = SimSettings::default();
    let Some(v) = v else { return Ok(out) };
    let s = Section::new("sim", v, SIM_KEYS)?;
    out.dt = s.opt("dt", Dim::Time)?;
    out.t_stop = s.opt("t_stop", Dim::Time)?;
    out.segment_um = s.or("segment_um", Dim::Length, DEFAULT_SEGMENT_UM)?;
    if let Some(m) = s.string("method")? {
        out.method = match m {
            "ladder" => RlcMethod::Ladder,
            "twa" => RlcMethod::Twa,
            _ => bail!("sim.method: expected \"ladder\" or \"twa\", got \"{m}\""),
        };
    }
    if let Some(c) = s.string("ccprime")? {
        out.cc_variant = match c {
            "eigen" => CcPrimeVariant::Eigen,
            "printed" => CcPrimeVariant::Printed,
            _ => bail!("sim.ccprime: expected \"eigen\" or \"printed\", got \"{c}\""),
        };
    }
    Ok(out)
}

fn parse_output(v: Option<&Value>) -> Result<OutputSettings> {
    let Some(v) = v else { return Ok(OutputSettings::default()) };
    let s = Section::new("output", v, OUTPUT_KEYS)?;
    Ok(OutputSettings {
        samples: s.uint("samples")?.map(|n| n as usize),
        waveform_csv: s.string("waveform_csv")?.map(PathBuf::from),
    })
}

pub fn parse_kind(s: &str) -> Result<CorpusKind> {
    match s {
        "rc" => Ok(CorpusKind::Rc),
        "rlc" => Ok(CorpusKind::Rlc),
        _ => bail!("corpus kind must be \"rc\" or \"rlc\", got \"{s}\""),
    }
}

fn parse_corpus(v: &Value) -> Result<Corpus> {
    let s = Section::new("corpus", v, CORPUS_KEYS)?;
    let kind = parse_kind(s.string("kind")?.ok_or_else(|| anyhow!("missing required key \"corpus.kind\""))?)?;
    let seed = s.uint("seed")?.unwrap_or(crate::DEFAULT_SEED);
    let count = s.uint("count")?.map(|n| n as usize).unwrap_or(crate::DEFAULT_COUNT);
    let mut corpus = match kind {
        CorpusKind::Rc => Corpus::default_rc(seed, count),
        CorpusKind::Rlc => Corpus::default_rlc(seed, count),
    };
    if let Some(r) = s.get("ranges") {
        let map = r.as_object().ok_or_else(|| anyhow!("corpus.ranges: expected an object"))?;
        let valid: Vec<&str> = corpus.ranges.keys().map(String::as_str).collect();
        let mut ranges = BTreeMap::new();
        for (k, v) in map {
            let name = format!("corpus.ranges.{k}");
            let dim = corpus_dim(kind, k).ok_or_else(|| match suggest(k, &valid) {
                Some(s) => anyhow!("unknown key \"{name}\"; did you mean \"{s}\"?"),
                None => anyhow!("unknown key \"{name}\"; expected one of {}", valid.join(", ")),
            })?;
            let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| anyhow!("{name}: expected [min, max]"))?;
            ranges.insert(k.clone(), [quantity(&arr[0], dim, &name)?, quantity(&arr[1], dim, &name)?]);
        }
        // keys left out keep their default interval
        corpus.ranges.extend(ranges);
    }
    invalid("corpus", corpus.validate())?;
    Ok(corpus)
}

fn parse_sweep(v: &Value) -> Result<SweepSpec> {
    let s = Section::new("sweep", v, SWEEP_KEYS)?;
    let param = s.string("param")?.map(str::parse::<SweepParam>).transpose().context("sweep.param")?;
    let grid = match s.get("grid") {
        None => Vec::new(),
        Some(g) => {
            let arr = g.as_array().ok_or_else(|| anyhow!("sweep.grid: expected an array"))?;
            let dim = param.map(sweep_dim);
            arr.iter()
                .map(|x| match dim {
                    Some(d) => quantity(x, d, "sweep.grid"),
                    None => bail!("sweep.grid needs sweep.param to know its unit"),
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(SweepSpec { param, grid })
}

/// Parses and validates a config; unit conversion and defaults are applied.
pub fn parse_config(text: &str) -> Result<AnalysisConfig> {
    let root: Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let top = Section::new("", &root, TOP_KEYS)?;
    let mut models = Vec::new();
    if let Some(v) = top.get("geometry") {
        models.push(ModelInput::Geometry(parse_geometry(v)?));
    }
    if let Some(v) = top.get("two_pi") {
        models.push(ModelInput::TwoPi(parse_two_pi(v)?));
    }
    if let Some(v) = top.get("pair") {
        models.push(ModelInput::Pair(parse_pair(v)?));
    }
    if let Some(v) = top.get("normalized") {
        let (point, reference) = parse_normalized(v)?;
        models.push(ModelInput::Normalized { point, reference });
    }
    if models.len() > 1 {
        bail!("give exactly one of \"geometry\", \"two_pi\", \"pair\" or \"normalized\"");
    }
    let model = models.pop();
    if let Some(mode) = top.string("mode")? {
        let want = match mode {
            "rc" => ModeKind::Rc,
            "rlc" => ModeKind::Rlc,
            _ => bail!("mode: expected \"rc\" or \"rlc\", got \"{mode}\""),
        };
        match &model {
            Some(m) if m.mode() != want => {
                bail!("mode is \"{mode}\" but the model section describes an {} input", m.mode().name())
            }
            None => bail!("mode is \"{mode}\" but no model section is given"),
            _ => {}
        }
    }
    Ok(AnalysisConfig {
        model,
        sim: parse_sim(top.get("sim"))?,
        output: parse_output(top.get("output"))?,
        corpus: top.get("corpus").map(parse_corpus).transpose()?,
        sweep: top.get("sweep").map(parse_sweep).transpose()?,
    })
}

/// Internal value back in boundary units, rounded to 12 significant digits
/// so that unit round trips do not leak float noise into reports.
fn to(x: f64, dim: Dim) -> f64 {
    format!("{:.11e}", x / dim.bare()).parse().unwrap_or(f64::NAN)
}

impl AnalysisConfig {
    /// The resolved config in boundary units. It is itself a valid config,
    /// so any report can be rerun from the config it embeds.
    pub fn echo(&self) -> Value {
        let mut root = Map::new();
        if let Some(m) = &self.model {
            root.insert("mode".into(), json!(m.mode().name()));
            let (key, body) = match m {
                ModelInput::Geometry(g) => (
                    "geometry",
                    json!({
                        "ls_len": g.ls_len, "lc_len": g.lc_len, "le_len": g.le_len,
                        "r_pul": g.r_pul,
                        "c_pul": to(g.c_pul, Dim::CapPerLen), "cc_pul": to(g.cc_pul, Dim::CapPerLen),
                        "rd": g.rd, "cload": to(g.cload, Dim::Cap), "tr": to(g.tr, Dim::Time), "vdd": g.vdd,
                    }),
                ),
                ModelInput::TwoPi(t) => (
                    "two_pi",
                    json!({
                        "rd": t.rd, "rs": t.rs, "re": t.re,
                        "c1": to(t.c1, Dim::Cap), "c2": to(t.c2, Dim::Cap),
                        "cl": to(t.cl, Dim::Cap), "cx": to(t.cx, Dim::Cap),
                        "tr": to(t.tr, Dim::Time), "vdd": t.vdd,
                    }),
                ),
                ModelInput::Pair(p) => (
                    "pair",
                    json!({
                        "r": p.r, "dr": p.dr,
                        "l": to(p.l, Dim::IndPerLen), "dl": p.dl, "lm": to(p.lm, Dim::IndPerLen),
                        "cg": to(p.cg, Dim::CapPerLen), "dc": p.dc, "cc": to(p.cc, Dim::CapPerLen),
                        "h": p.h, "rs_drv": p.rs_drv, "cl_load": to(p.cl_load, Dim::Cap), "vdd": p.vdd,
                    }),
                ),
                ModelInput::Normalized { point, reference } => (
                    "normalized",
                    json!({
                        "kl": point.kl, "kc": point.kc, "zeta": point.zeta, "rt": point.rt, "ct": point.ct,
                        "dc": point.dc, "dl": point.dl,
                        "reference": {
                            "l": to(reference.l, Dim::IndPerLen),
                            "cg": to(reference.cg, Dim::CapPerLen),
                            "h": reference.h,
                        },
                    }),
                ),
            };
            root.insert(key.into(), body);
        }
        let mut sim = Map::new();
        if let Some(dt) = self.sim.dt {
            sim.insert("dt".into(), json!(to(dt, Dim::Time)));
        }
        if let Some(t) = self.sim.t_stop {
            sim.insert("t_stop".into(), json!(to(t, Dim::Time)));
        }
        sim.insert("segment_um".into(), json!(self.sim.segment_um));
        let method = match self.sim.method {
            RlcMethod::Ladder => "ladder",
            RlcMethod::Twa => "twa",
        };
        let cc = match self.sim.cc_variant {
            CcPrimeVariant::Eigen => "eigen",
            CcPrimeVariant::Printed => "printed",
        };
        sim.insert("method".into(), json!(method));
        sim.insert("ccprime".into(), json!(cc));
        root.insert("sim".into(), Value::Object(sim));
        let mut out = Map::new();
        if let Some(n) = self.output.samples {
            out.insert("samples".into(), json!(n));
        }
        if let Some(p) = &self.output.waveform_csv {
            out.insert("waveform_csv".into(), json!(p.display().to_string()));
        }
        if !out.is_empty() {
            root.insert("output".into(), Value::Object(out));
        }
        if let Some(c) = &self.corpus {
            let kind = match c.kind {
                CorpusKind::Rc => "rc",
                CorpusKind::Rlc => "rlc",
            };
            let ranges: Map<String, Value> = c
                .ranges
                .iter()
                .map(|(k, [a, b])| {
                    let d = corpus_dim(c.kind, k).unwrap_or(Dim::Ratio);
                    (k.clone(), json!([to(*a, d), to(*b, d)]))
                })
                .collect();
            root.insert("corpus".into(), json!({"kind": kind, "seed": c.seed, "count": c.count, "ranges": ranges}));
        }
        if let Some(s) = &self.sweep {
            let mut m = Map::new();
            if let Some(p) = s.param {
                m.insert("param".into(), json!(p.name()));
                m.insert("grid".into(), json!(s.grid.iter().map(|x| to(*x, sweep_dim(p))).collect::<Vec<_>>()));
            }
            root.insert("sweep".into(), Value::Object(m));
        }
        Value::Object(root)
    }
}

/// Line resistance implied by a normalized point, for reports.
pub fn implied_rr(point: &RlcPoint) -> f64 {
    rr_for_zeta(point.zeta, point.rt, point.ct)
}
