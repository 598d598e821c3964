// SPDX-License-Identifier: Apache-2.0

//! Trapezoidal-rule transient analysis.
//!
//! The circuit equations are the usual MNA pair with node voltages `v` and
//! inductor branch currents `i` as state:
//!
//! ```text
//! C v' + G v + A i = Bg u + Bc u'
//! L i' + R i - A^T v = 0
//! ```
//!
//! Each trapezoidal step is solved for `v` after eliminating the new branch
//! currents, which leaves a symmetric positive definite banded system. The
//! matrix depends only on the step size and is factored once per run.

use serde::{Deserialize, Serialize};

use super::band::{BandCholesky, SymBand};
use super::circuit::{Circuit, Terminal};
use super::waveform::Waveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time step (s).
    pub dt: f64,
    /// End time (s).
    pub t_stop: f64,
}

/// Physical time scales of a problem, used to pick a default step and stop time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimeScales {
    /// Longest time of flight among RLC modes.
    pub tf: Option<f64>,
    /// Aggressor transition time.
    pub tr: Option<f64>,
    /// RC delay of the victim.
    pub tv: Option<f64>,
}

impl SimConfig {
    /// `dt = min(tf/200, tr/100, tv/100)` and `t_stop = 6 max(tf, tv)`,
    /// extended to cover the ramp.
    pub fn auto(s: TimeScales) -> Self {
        let dt = [s.tf.map(|x| x / 200.0), s.tr.map(|x| x / 100.0), s.tv.map(|x| x / 100.0)]
            .into_iter()
            .flatten()
            .filter(|x| *x > 0.0)
            .fold(f64::INFINITY, f64::min);
        let span = [s.tf, s.tv].into_iter().flatten().fold(0.0, f64::max);
        let t_stop = (6.0 * span).max(s.tr.unwrap_or(0.0) + 6.0 * span).max(s.tr.unwrap_or(0.0) * 2.0);
        Self { dt, t_stop }
    }

    pub fn steps(&self) -> usize {
        (self.t_stop / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            v.push("dt must be > 0".into());
        }
        if !(self.t_stop > 0.0 && self.t_stop.is_finite()) {
            v.push("t_stop must be > 0".into());
        }
        v
    }
}

/// One inductor group: a single branch, or two branches joined by a mutual.
#[derive(Debug, Clone)]
struct Group {
    branches: Vec<usize>,
    /// inductance matrix, row major
    l: Vec<f64>,
    /// `(L + h/2 R)^{-1}`
    z: Vec<f64>,
    /// `L - h/2 R`
    q: Vec<f64>,
}

/// A circuit set up for stepping with a fixed time step.
#[derive(Debug, Clone)]
pub struct Simulator<'c> {
    circuit: &'c Circuit,
    h: f64,
    /// `C - h/2 G` applied to the previous voltages
    history: SymBand,
    cap: SymBand,
    factor: BandCholesky,
    groups: Vec<Group>,
    algebraic: Vec<bool>,
    g_src: Vec<(usize, usize, f64)>,
    c_src: Vec<(usize, usize, f64)>,
    v: Vec<f64>,
    i: Vec<f64>,
    t: f64,
    step_index: usize,
    rhs: Vec<f64>,
    rhs_i: Vec<f64>,
}

impl<'c> Simulator<'c> {
    pub fn new(circuit: &'c Circuit, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt must be > 0"));
        }
        let n = circuit.node_count();
        if n == 0 {
            return Err(Error::invalid("circuit has no nodes"));
        }
        let h = dt;
        let bw = circuit.half_bandwidth();
        let mut cap = SymBand::new(n, bw);
        let mut cond = SymBand::new(n, bw);
        let mut g_src = Vec::new();
        let mut c_src = Vec::new();

        let stamp = |m: &mut SymBand, src: &mut Vec<(usize, usize, f64)>, a: Terminal, b: Terminal, x: f64| {
            use Terminal::*;
            match (a, b) {
                (Node(i), Node(j)) => {
                    m.add(i, i, x);
                    m.add(j, j, x);
                    m.add(i, j, -x);
                }
                (Node(i), Ground) | (Ground, Node(i)) => m.add(i, i, x),
                (Node(i), Source(s)) | (Source(s), Node(i)) => {
                    m.add(i, i, x);
                    src.push((i, s, x));
                }
                _ => {}
            }
        };
        for &(a, b, g) in &circuit.conductances {
            stamp(&mut cond, &mut g_src, a, b, g);
        }
        for &(a, b, c) in &circuit.capacitors {
            stamp(&mut cap, &mut c_src, a, b, c);
        }

        let groups = build_groups(circuit, h)?;
        let mut k = cap.combine(1.0, &cond, 0.5 * h);
        let hh = 0.25 * h * h;
        for g in &groups {
            let nb = g.branches.len();
            for (p, &bp) in g.branches.iter().enumerate() {
                for (q, &bq) in g.branches.iter().enumerate() {
                    let z = g.z[p * nb + q] * hh;
                    let (ap, bp_) = (circuit.branches[bp].from, circuit.branches[bp].to);
                    let (aq, bq_) = (circuit.branches[bq].from, circuit.branches[bq].to);
                    // A Z A^T with A[from] = +1, A[to] = -1
                    for (x, sx) in [(ap, 1.0), (bp_, -1.0)] {
                        for (y, sy) in [(aq, 1.0), (bq_, -1.0)] {
                            if x >= y {
                                k.add(x, y, sx * sy * z);
                            }
                        }
                    }
                }
            }
        }
        let factor = k.cholesky().map_err(|row| Error::SingularMna(circuit.node_name(row).to_string()))?;

        let mut algebraic = vec![false; n];
        for (row, alg) in algebraic.iter_mut().enumerate() {
            let touches_cap = (row.saturating_sub(bw)..=(row + bw).min(n - 1)).any(|j| cap.get(row, j) != 0.0);
            *alg = !touches_cap;
        }

        Ok(Self {
            circuit,
            h,
            history: cap.combine(1.0, &cond, -0.5 * h),
            cap,
            factor,
            groups,
            algebraic,
            g_src,
            c_src,
            v: vec![0.0; n],
            i: vec![0.0; circuit.branches.len()],
            t: 0.0,
            step_index: 0,
            rhs: vec![0.0; n],
            rhs_i: vec![0.0; circuit.branches.len()],
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn voltages(&self) -> &[f64] {
        &self.v
    }

    pub fn currents(&self) -> &[f64] {
        &self.i
    }

    /// Overrides the state (all-zero by default).
    pub fn set_state(&mut self, v: &[f64], i: &[f64]) {
        self.v.copy_from_slice(v);
        self.i.copy_from_slice(i);
    }

    /// `(v^T C v + i^T L i) / 2`, with source terminals taken as ground.
    pub fn stored_energy(&self) -> f64 {
        let mut e = 0.5 * self.cap.quad_form(&self.v);
        for g in &self.groups {
            let nb = g.branches.len();
            for p in 0..nb {
                for q in 0..nb {
                    e += 0.5 * self.i[g.branches[p]] * g.l[p * nb + q] * self.i[g.branches[q]];
                }
            }
        }
        e
    }

    pub fn step(&mut self) -> Result<()> {
        let h = self.h;
        let t0 = self.t;
        self.step_index += 1;
        let t1 = self.step_index as f64 * h;
        let sources = &self.circuit.sources;
        let branches = &self.circuit.branches;

        self.history.mul_vec(&self.v, &mut self.rhs);
        // -h/2 A i0
        for (k, b) in branches.iter().enumerate() {
            self.rhs[b.from] -= 0.5 * h * self.i[k];
            self.rhs[b.to] += 0.5 * h * self.i[k];
        }
        for (row, alg) in self.algebraic.iter().enumerate() {
            if *alg {
                self.rhs[row] = 0.0;
            }
        }
        for &(node, s, g) in &self.g_src {
            let (u0, u1) = (sources[s].value(t0), sources[s].value(t1));
            self.rhs[node] += if self.algebraic[node] { 0.5 * h * g * u1 } else { 0.5 * h * g * (u0 + u1) };
        }
        for &(node, s, c) in &self.c_src {
            self.rhs[node] += c * (sources[s].value(t1) - sources[s].value(t0));
        }

        // rhs_i = (L - h/2 R) i0 + h/2 A^T v0, then fold Z rhs_i into the nodal rhs
        for g in &self.groups {
            let nb = g.branches.len();
            for (p, &bp) in g.branches.iter().enumerate() {
                let mut acc = 0.5 * h * (self.v[branches[bp].from] - self.v[branches[bp].to]);
                for (q, &bq) in g.branches.iter().enumerate() {
                    acc += g.q[p * nb + q] * self.i[bq];
                }
                self.rhs_i[bp] = acc;
            }
            for (p, &bp) in g.branches.iter().enumerate() {
                let zr: f64 = g.branches.iter().enumerate().map(|(q, &bq)| g.z[p * nb + q] * self.rhs_i[bq]).sum();
                self.rhs[branches[bp].from] -= 0.5 * h * zr;
                self.rhs[branches[bp].to] += 0.5 * h * zr;
            }
        }

        self.factor.solve_in_place(&mut self.rhs);
        std::mem::swap(&mut self.v, &mut self.rhs);

        for g in &self.groups {
            let nb = g.branches.len();
            let mut next = [0.0; 2];
            for (p, acc) in next.iter_mut().enumerate().take(nb) {
                for (q, &bq) in g.branches.iter().enumerate() {
                    let vb = self.v[branches[bq].from] - self.v[branches[bq].to];
                    *acc += g.z[p * nb + q] * (self.rhs_i[bq] + 0.5 * h * vb);
                }
            }
            for (p, &bp) in g.branches.iter().enumerate() {
                self.i[bp] = next[p];
            }
        }
        self.t = t1;

        if self.v.iter().chain(&self.i).any(|x| !x.is_finite()) {
            return Err(Error::Diverged(t1));
        }
        Ok(())
    }
}

fn build_groups(circuit: &Circuit, h: f64) -> Result<Vec<Group>> {
    let mut in_mutual = vec![None; circuit.branches.len()];
    for (k, &(a, b, _)) in circuit.mutuals.iter().enumerate() {
        in_mutual[a] = Some(k);
        in_mutual[b] = Some(k);
    }
    let mut groups = Vec::new();
    for (k, br) in circuit.branches.iter().enumerate() {
        match in_mutual[k] {
            None => {
                let p = br.l + 0.5 * h * br.r;
                groups.push(Group {
                    branches: vec![k],
                    l: vec![br.l],
                    z: vec![1.0 / p],
                    q: vec![br.l - 0.5 * h * br.r],
                });
            }
            Some(mk) => {
                let (a, b, m) = circuit.mutuals[mk];
                if k != a {
                    continue;
                }
                let (ba, bb) = (&circuit.branches[a], &circuit.branches[b]);
                if m * m >= ba.l * bb.l {
                    return Err(Error::invalid(format!(
                        "mutual inductance {m:e} is not passive for self inductances {:e}, {:e}",
                        ba.l, bb.l
                    )));
                }
                let p = [ba.l + 0.5 * h * ba.r, m, m, bb.l + 0.5 * h * bb.r];
                let det = p[0] * p[3] - p[1] * p[2];
                groups.push(Group {
                    branches: vec![a, b],
                    l: vec![ba.l, m, m, bb.l],
                    z: vec![p[3] / det, -p[1] / det, -p[2] / det, p[0] / det],
                    q: vec![ba.l - 0.5 * h * ba.r, m, m, bb.l - 0.5 * h * bb.r],
                });
            }
        }
    }
    Ok(groups)
}

/// Runs `circuit` from the all-zero state and samples every probed node at each step.
pub fn transient(circuit: &Circuit, cfg: &SimConfig) -> Result<Vec<Waveform>> {
    let violations = cfg.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let mut sim = Simulator::new(circuit, cfg.dt)?;
    let steps = cfg.steps();
    let outs = circuit.outputs();
    let mut samples: Vec<Vec<f64>> = outs.iter().map(|_| Vec::with_capacity(steps + 1)).collect();
    for (s, &o) in samples.iter_mut().zip(outs) {
        s.push(sim.voltages()[o]);
    }
    for _ in 0..steps {
        sim.step()?;
        for (s, &o) in samples.iter_mut().zip(outs) {
            s.push(sim.voltages()[o]);
        }
    }
    Ok(samples.into_iter().map(|s| Waveform::new(0.0, cfg.dt, s)).collect())
}
