// SPDX-License-Identifier: Apache-2.0

//! Two coupled RLC lines reduced to two independent mode lines.
//!
//! For lines with equal resistance the coupled pair separates into a common
//! (even) mode with inductance `l' + lm'` over capacitance `cg'`, and a
//! differential (odd) mode with `l' - lm'` over `cg' + 2 cc'`. An aggressor
//! step is half even and half odd excitation, so the quiet victim sees
//! `(V_even - V_odd) / 2` at its far end. The noise peaks are read off the
//! two mode responses at the slower mode's time of flight and three times it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder_sim::{build_single, LineParams, Segmentation, SimConfig, Stimulus, TimeScales, Waveform};

/// Mode damping above which the traveling-wave picture is not used.
pub const TWA_MAX_ZETA: f64 = 1.5;

/// Two coupled lines. Line 1 carries the `(1 + Δ)` values, line 2 the `(1 - Δ)` ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledRlcPair {
    /// Ω/µm
    pub r: f64,
    pub dr: f64,
    /// H/µm
    pub l: f64,
    pub dl: f64,
    /// H/µm
    pub lm: f64,
    /// F/µm
    pub cg: f64,
    pub dc: f64,
    /// F/µm
    pub cc: f64,
    /// Line length (µm).
    pub h: f64,
    /// Driver resistance on each line (Ω).
    pub rs_drv: f64,
    /// Load capacitance on each line (F).
    pub cl_load: f64,
    /// Aggressor step amplitude.
    pub vdd: f64,
}

/// Which expression to use for the effective coupling capacitance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcPrimeVariant {
    /// `sqrt(cc^2 + cg^2 dc^2)`: the larger capacitance-matrix eigenvalue is `cg' + 2 cc'`.
    #[default]
    Eigen,
    /// `cc sqrt(1 + (cc/2) dc^2)`, evaluated in F/µm as written in the original derivation.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub cg_eff: f64,
    pub cc_eff: f64,
    pub l_eff: f64,
    pub lm_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Common,
    Differential,
}

/// One independent mode line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoupledLine {
    pub mode: Mode,
    /// H/µm
    pub l_mode: f64,
    /// F/µm
    pub c_mode: f64,
    pub r: f64,
    pub h: f64,
    pub rs_drv: f64,
    pub cl_load: f64,
    pub vdd: f64,
}

/// Dimensionless description of an identical pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedVars {
    pub z0: f64,
    pub tf: f64,
    pub rr: f64,
    pub rt: f64,
    pub ct: f64,
    pub kc: f64,
    pub kl: f64,
    pub zeta: f64,
}

/// Reference line that fixes the absolute scale when building a pair from
/// normalized variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    /// H/µm
    pub l: f64,
    /// F/µm
    pub cg: f64,
    /// µm
    pub h: f64,
}

impl Default for ReferenceLine {
    /// 0.5 pH/µm over 0.2 fF/µm, 1 mm long: Z0 = 50 Ω, tf = 10 ps.
    fn default() -> Self {
        Self { l: 0.5e-12, cg: 0.2e-15, h: 1000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RlcMethod {
    /// Simulate each mode line as a lumped ladder.
    #[default]
    Ladder,
    /// Piecewise traveling-wave approximation of each mode line.
    Twa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlcOptions {
    pub method: RlcMethod,
    pub segmentation: Segmentation,
    pub cc_variant: CcPrimeVariant,
    /// Overrides for the simulation grid.
    pub dt: Option<f64>,
    pub t_stop: Option<f64>,
}

impl Default for RlcOptions {
    fn default() -> Self {
        Self {
            method: RlcMethod::Ladder,
            segmentation: Segmentation::default(),
            cc_variant: CcPrimeVariant::Eigen,
            dt: None,
            t_stop: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlcNoiseEstimate {
    pub tf1: f64,
    pub tf2: f64,
    pub tf_max: f64,
    /// Noise at `tf_max`. Negative when the common mode is the slower one.
    pub v_neg: f64,
    /// Noise at `3 tf_max`.
    pub v_pos: f64,
    /// Larger of the two magnitudes.
    pub v_peak: f64,
}

/// `(rt + rt ct + rr ct + rr/2) / (2 sqrt(1 + ct))`
pub fn zeta(rr: f64, rt: f64, ct: f64) -> f64 {
    (rt + rt * ct + rr * ct + 0.5 * rr) / (2.0 * (1.0 + ct).sqrt())
}

/// Line resistance that gives damping `zeta` at fixed driver and load.
pub fn rr_for_zeta(zeta: f64, rt: f64, ct: f64) -> f64 {
    (2.0 * zeta * (1.0 + ct).sqrt() - rt * (1.0 + ct)) / (ct + 0.5)
}

impl CoupledRlcPair {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                v.push(msg.to_string());
            }
        };
        need(self.l > 0.0, "l must be > 0");
        need(self.cg > 0.0, "cg must be > 0");
        need(self.h > 0.0, "h must be > 0");
        need(self.r >= 0.0, "r must be >= 0");
        need(self.lm.abs() < self.l, "|lm| must be < l");
        need(self.cc >= 0.0, "cc must be >= 0");
        need(self.dr.abs() < 1.0, "|dr| must be < 1");
        need(self.dl.abs() < 1.0, "|dl| must be < 1");
        need(self.dc.abs() < 1.0, "|dc| must be < 1");
        need(self.rs_drv > 0.0, "rs_drv must be > 0");
        need(self.cl_load >= 0.0, "cl_load must be >= 0");
        need(self.vdd > 0.0, "vdd must be > 0");
        v
    }

    fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Builds a symmetric pair from normalized variables on a reference line.
    pub fn from_normalized(kl: f64, kc: f64, rr: f64, rt: f64, ct: f64, reference: &ReferenceLine) -> Self {
        let z0 = (reference.l / reference.cg).sqrt();
        Self {
            r: rr * z0 / reference.h,
            dr: 0.0,
            l: reference.l,
            dl: 0.0,
            lm: kl * reference.l,
            cg: reference.cg,
            dc: 0.0,
            cc: kc * reference.cg,
            h: reference.h,
            rs_drv: rt * z0,
            cl_load: ct * reference.h * reference.cg,
            vdd: 1.0,
        }
    }
}

pub fn effective_params(pair: &CoupledRlcPair, variant: CcPrimeVariant) -> Result<EffectiveParams> {
    if pair.dr != 0.0 {
        return Err(Error::AsymmetricResistance(pair.dr));
    }
    pair.check()?;
    let CoupledRlcPair { l, lm, cg, cc, dc, dl, .. } = *pair;
    if dc == 0.0 {
        // every correction carries a factor of dc
        return Ok(EffectiveParams { cg_eff: cg, cc_eff: cc, l_eff: l, lm_eff: lm });
    }
    let radical = (cc * cc + cg * cg * dc * dc).sqrt();
    let cg_eff = cg + cc - radical;
    let cc_eff = match variant {
        CcPrimeVariant::Eigen => radical,
        CcPrimeVariant::Printed => cc * (1.0 + 0.5 * cc * dc * dc).sqrt(),
    };
    let lm_eff = (lm * cc - l * cg * dc * dl) / radical;
    if lm_eff.abs() >= l {
        return Err(Error::invalid(format!(
            "effective mutual inductance {lm_eff:e} reaches the self inductance {l:e}"
        )));
    }
    Ok(EffectiveParams { cg_eff, cc_eff, l_eff: l, lm_eff })
}

/// Common and differential mode lines of the pair.
pub fn decouple(pair: &CoupledRlcPair, variant: CcPrimeVariant) -> Result<(DecoupledLine, DecoupledLine)> {
    let e = effective_params(pair, variant)?;
    let line = |mode, l_mode, c_mode| DecoupledLine {
        mode,
        l_mode,
        c_mode,
        r: pair.r,
        h: pair.h,
        rs_drv: pair.rs_drv,
        cl_load: pair.cl_load,
        vdd: pair.vdd,
    };
    Ok((
        line(Mode::Common, e.l_eff + e.lm_eff, e.cg_eff),
        line(Mode::Differential, e.l_eff - e.lm_eff, e.cg_eff + 2.0 * e.cc_eff),
    ))
}

/// Victim far-end voltage from the two mode responses to a full-swing step.
pub fn victim_from_modes(v_common: f64, v_differential: f64) -> f64 {
    0.5 * (v_common - v_differential)
}

/// Aggressor far-end voltage from the two mode responses to a full-swing step.
pub fn aggressor_from_modes(v_common: f64, v_differential: f64) -> f64 {
    0.5 * (v_common + v_differential)
}

pub fn normalized_vars(pair: &CoupledRlcPair) -> NormalizedVars {
    let z0 = (pair.l / pair.cg).sqrt();
    let rr = pair.h * pair.r / z0;
    let rt = pair.rs_drv / z0;
    let ct = pair.cl_load / (pair.h * pair.cg);
    NormalizedVars {
        z0,
        tf: pair.h * (pair.l * pair.cg).sqrt(),
        rr,
        rt,
        ct,
        kc: pair.cc / pair.cg,
        kl: pair.lm / pair.l,
        zeta: zeta(rr, rt, ct),
    }
}

/// Times of flight of the common and differential modes.
pub fn times_of_flight(pair: &CoupledRlcPair, variant: CcPrimeVariant) -> Result<(f64, f64)> {
    let (common, diff) = decouple(pair, variant)?;
    Ok((common.time_of_flight(), diff.time_of_flight()))
}

impl DecoupledLine {
    /// Lossless characteristic impedance `sqrt(l/c)`.
    pub fn z0(&self) -> f64 {
        (self.l_mode / self.c_mode).sqrt()
    }

    pub fn time_of_flight(&self) -> f64 {
        self.h * (self.l_mode * self.c_mode).sqrt()
    }

    /// Propagation constant per µm, `sqrt(s c (r + s l))`.
    pub fn theta(&self, s: Complex64) -> Complex64 {
        (s * self.c_mode * (self.r + s * self.l_mode)).sqrt()
    }

    /// Characteristic impedance `sqrt((r + s l) / (s c))`.
    pub fn impedance(&self, s: Complex64) -> Complex64 {
        ((self.r + s * self.l_mode) / (s * self.c_mode)).sqrt()
    }

    pub fn normalized(&self) -> NormalizedVars {
        normalized_vars(&CoupledRlcPair {
            r: self.r,
            dr: 0.0,
            l: self.l_mode,
            dl: 0.0,
            lm: 0.0,
            cg: self.c_mode,
            dc: 0.0,
            cc: 0.0,
            h: self.h,
            rs_drv: self.rs_drv,
            cl_load: self.cl_load,
            vdd: self.vdd,
        })
    }

    /// Elmore delay of the line from the driver to the load.
    pub fn elmore(&self) -> f64 {
        let (rw, cw) = (self.r * self.h, self.c_mode * self.h);
        self.rs_drv * (cw + self.cl_load) + rw * (0.5 * cw + self.cl_load)
    }

    pub fn line_params(&self) -> LineParams {
        LineParams {
            r_pul: self.r,
            l_pul: self.l_mode,
            c_pul: self.c_mode,
            h: self.h,
            rs: self.rs_drv,
            c_load: self.cl_load,
            input: Stimulus::Step { vdd: self.vdd },
        }
    }
}

/// Default grid for a set of mode lines sharing one time base.
pub fn sim_config_for(lines: &[DecoupledLine], opts: &RlcOptions) -> SimConfig {
    let tf = lines.iter().map(|l| l.time_of_flight()).fold(0.0, f64::max);
    let tv = lines.iter().map(|l| l.elmore()).fold(0.0, f64::max);
    let mut cfg = SimConfig::auto(TimeScales { tf: Some(tf), tr: None, tv: Some(tv) });
    // the peak estimate reads the responses up to 3 tf
    cfg.t_stop = cfg.t_stop.max(4.0 * tf);
    if let Some(dt) = opts.dt {
        cfg.dt = dt;
    }
    if let Some(t) = opts.t_stop {
        cfg.t_stop = t;
    }
    cfg
}

/// Far-end step response of one mode line.
pub fn decoupled_transient(
    line: &DecoupledLine,
    method: RlcMethod,
    seg: Segmentation,
    cfg: &SimConfig,
) -> Result<Waveform> {
    match method {
        RlcMethod::Ladder => {
            let net = build_single(&line.line_params(), seg)?;
            let mut out = net.simulate(cfg)?;
            Ok(out.remove(0))
        }
        RlcMethod::Twa => twa_response(line, cfg),
    }
}

/// Piecewise traveling-wave response of a mode line to a step.
///
/// The launched wave `vdd z0/(z0 + rs)` is attenuated by `exp(-r h / 2 z0)`
/// per pass, doubles at the (nearly open) load and bounces off the driver
/// with reflection `(rs - z0)/(rs + z0)`, so the output jumps at every odd
/// multiple of the time of flight. Arrivals rise with the load's
/// `z0 * C_L` time constant. What the lossy wave train does not deliver
/// reaches the load by RC charging with the line's Elmore delay.
pub fn twa_response(line: &DecoupledLine, cfg: &SimConfig) -> Result<Waveform> {
    let zeta = line.normalized().zeta;
    if zeta > TWA_MAX_ZETA {
        return Err(Error::OverdampedMode(zeta));
    }
    let z0 = line.z0();
    let tf = line.time_of_flight();
    let gamma_s = (line.rs_drv - z0) / (line.rs_drv + z0);
    let atten = (-line.r * line.h / (2.0 * z0)).exp();
    let launched = line.vdd * z0 / (z0 + line.rs_drv);
    let tau_load = z0 * line.cl_load;
    let tau_rc = line.elmore();
    let wave_final = 2.0 * launched * atten / (1.0 - gamma_s * atten * atten);
    let deficit = line.vdd - wave_final;

    let n = cfg.steps() + 1;
    let arrivals = ((cfg.t_stop / tf.max(f64::MIN_POSITIVE) - 1.0) / 2.0).ceil().max(0.0) as usize + 1;
    let jumps: Vec<(f64, f64)> = (0..arrivals.min(100_000))
        .map(|k| {
            let t_k = (2 * k + 1) as f64 * tf;
            let dv = 2.0 * launched * atten.powi(2 * k as i32 + 1) * gamma_s.powi(k as i32);
            (t_k, dv)
        })
        .take_while(|&(_, dv)| dv.abs() > 1e-12 * line.vdd)
        .collect();

    let samples = (0..n)
        .map(|i| {
            let t = i as f64 * cfg.dt;
            let mut v = 0.0;
            for &(t_k, dv) in &jumps {
                if t < t_k {
                    break;
                }
                let edge = if tau_load > 0.0 { -(-(t - t_k) / tau_load).exp_m1() } else { 1.0 };
                v += dv * edge;
            }
            if t >= tf && tau_rc > 0.0 {
                v += deficit * -(-(t - tf) / tau_rc).exp_m1();
            }
            v
        })
        .collect();
    Ok(Waveform::new(0.0, cfg.dt, samples))
}

/// Decoupled mode waveforms of a pair on a shared grid.
pub fn mode_waveforms(pair: &CoupledRlcPair, opts: &RlcOptions) -> Result<(Waveform, Waveform)> {
    let (common, diff) = decouple(pair, opts.cc_variant)?;
    let cfg = sim_config_for(&[common, diff], opts);
    let (a, b) = rayon::join(
        || decoupled_transient(&common, opts.method, opts.segmentation, &cfg),
        || decoupled_transient(&diff, opts.method, opts.segmentation, &cfg),
    );
    Ok((a?, b?))
}

/// Peak victim noise from the two mode responses, read at the slower mode's
/// time of flight and at three times it.
pub fn peak_noise_rlc(pair: &CoupledRlcPair, opts: &RlcOptions) -> Result<RlcNoiseEstimate> {
    let (tf1, tf2) = times_of_flight(pair, opts.cc_variant)?;
    let (v1, v2) = mode_waveforms(pair, opts)?;
    Ok(estimate_from_modes(tf1, tf2, &v1, &v2))
}

/// Applies the time-of-flight sampling rule to given mode responses.
pub fn estimate_from_modes(tf1: f64, tf2: f64, v1: &Waveform, v2: &Waveform) -> RlcNoiseEstimate {
    let tf_max = tf1.max(tf2);
    // Noise at the slower arrival. The faster mode is read at tf_max; the
    // slower one is read at the faster arrival, before its own wave gets there,
    // so it contributes nothing unless the two arrivals coincide and cancel.
    let v_neg = victim_from_modes(v1.value_at(tf2), v2.value_at(tf1));
    // At 3 tf_max the slower mode sits at the top of its charging plateau.
    let slow = if tf1 >= tf2 { v1 } else { v2 };
    let t_top = plateau_top_time(slow, 2.0 * tf_max, 3.0 * tf_max);
    let v_pos = victim_from_modes(v1.value_at(t_top), v2.value_at(t_top));
    RlcNoiseEstimate { tf1, tf2, tf_max, v_neg, v_pos, v_peak: v_neg.abs().max(v_pos.abs()) }
}

/// Time of the largest sample of `w` in `[t_lo, t_hi]`.
fn plateau_top_time(w: &Waveform, t_lo: f64, t_hi: f64) -> f64 {
    let i_lo = ((t_lo - w.t0) / w.dt).ceil().max(0.0) as usize;
    let i_hi = (((t_hi - w.t0) / w.dt).floor() as usize).min(w.len().saturating_sub(1));
    if i_lo > i_hi {
        return t_hi;
    }
    let k = (i_lo..=i_hi).max_by(|&a, &b| w.samples[a].total_cmp(&w.samples[b])).unwrap_or(i_hi);
    w.time(k)
}
