// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled voltage trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

/// Summary of a noise pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformMetrics {
    pub peak: f64,
    pub peak_time: f64,
    /// Width at half of `peak`; `None` when the level is never crossed twice.
    pub half_peak_width: Option<f64>,
    /// Crossings of the half-peak level.
    pub crossings: Vec<f64>,
}

impl Waveform {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Self {
        assert!(dt > 0.0, "waveform step must be positive");
        Self { t0, dt, samples }
    }

    /// Samples `f` on `n` points starting at `t0`.
    pub fn from_fn(t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::new(t0, dt, (0..n).map(|i| f(t0 + i as f64 * dt)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// Linear interpolation, clamped to the end samples.
    pub fn value_at(&self, t: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let x = (t - self.t0) / self.dt;
        if x <= 0.0 {
            return self.samples[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= self.len() {
            return *self.samples.last().unwrap();
        }
        let f = x - i as f64;
        self.samples[i] * (1.0 - f) + self.samples[i + 1] * f
    }

    /// Largest value, refined by a parabola through the neighbouring samples.
    pub fn peak(&self) -> (f64, f64) {
        self.extremum(1.0)
    }

    /// Most negative value and its time.
    pub fn trough(&self) -> (f64, f64) {
        let (v, t) = self.extremum(-1.0);
        (v, t)
    }

    /// Signed value of largest magnitude.
    pub fn peak_abs(&self) -> (f64, f64) {
        let (hi, lo) = (self.peak(), self.trough());
        if hi.0.abs() >= lo.0.abs() {
            hi
        } else {
            lo
        }
    }

    fn extremum(&self, sign: f64) -> (f64, f64) {
        let y = &self.samples;
        if y.is_empty() {
            return (0.0, self.t0);
        }
        let k = (0..y.len()).max_by(|&a, &b| (sign * y[a]).total_cmp(&(sign * y[b]))).unwrap();
        if k == 0 || k + 1 == y.len() {
            return (y[k], self.time(k));
        }
        let (a, b, c) = (y[k - 1], y[k], y[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom == 0.0 {
            return (b, self.time(k));
        }
        let d = 0.5 * (a - c) / denom;
        (b - 0.25 * (a - c) * d, self.time(k) + d * self.dt)
    }

    /// Times where the trace crosses `level`, linearly interpolated.
    pub fn crossings(&self, level: f64) -> Vec<f64> {
        let y = &self.samples;
        let mut out = Vec::new();
        for i in 1..y.len() {
            let (a, b) = (y[i - 1] - level, y[i] - level);
            if (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0) {
                let f = a / (a - b);
                out.push(self.time(i - 1) + f * self.dt);
            }
        }
        out
    }

    /// Span between the first and last crossing of `level`.
    pub fn width_at(&self, level: f64) -> Option<f64> {
        let c = self.crossings(level);
        (c.len() >= 2).then(|| c[c.len() - 1] - c[0])
    }

    pub fn metrics(&self) -> WaveformMetrics {
        let (peak, peak_time) = self.peak();
        let crossings = if peak > 0.0 { self.crossings(0.5 * peak) } else { Vec::new() };
        let half_peak_width = (crossings.len() >= 2).then(|| crossings[crossings.len() - 1] - crossings[0]);
        WaveformMetrics { peak, peak_time, half_peak_width, crossings }
    }

    /// Keeps every `k`-th sample.
    pub fn decimate(&self, k: usize) -> Waveform {
        let k = k.max(1);
        Waveform::new(self.t0, self.dt * k as f64, self.samples.iter().step_by(k).copied().collect())
    }

    /// Resamples to at most `n` points by decimation.
    pub fn limit_samples(&self, n: usize) -> Waveform {
        if n == 0 || self.len() <= n {
            return self.clone();
        }
        self.decimate(self.len().div_ceil(n))
    }
}

/// Writes traces sharing one time base as CSV: `t_s,v_out` for one trace,
/// `t_s,v_line1,v_line2,...` for several.
pub fn write_waveforms_csv(path: &Path, traces: &[&Waveform]) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    write_waveforms(&mut f, traces).map_err(io_err)?;
    f.flush().map_err(io_err)
}

pub fn write_waveforms(out: &mut impl Write, traces: &[&Waveform]) -> std::io::Result<()> {
    let Some(first) = traces.first() else {
        return writeln!(out, "t_s");
    };
    assert!(
        traces.iter().all(|w| w.len() == first.len() && w.dt == first.dt && w.t0 == first.t0),
        "traces must share a time base"
    );
    if traces.len() == 1 {
        writeln!(out, "t_s,v_out")?;
    } else {
        let names: Vec<String> = (1..=traces.len()).map(|i| format!("v_line{i}")).collect();
        writeln!(out, "t_s,{}", names.join(","))?;
    }
    for i in 0..first.len() {
        write!(out, "{}", crate::sweep_report::fmt_sig(first.time(i)))?;
        for w in traces {
            write!(out, ",{}", crate::sweep_report::fmt_sig(w.samples[i]))?;
        }
        writeln!(out)?;
    }
    Ok(())
}
