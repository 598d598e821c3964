// SPDX-License-Identifier: Apache-2.0

//! Lumped π-segment ladders for single and coupled lines.

use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Stimulus, Terminal};
use crate::error::{Error, Result};
use crate::net_model::VictimNetGeometry;
use crate::rc2pi::TwoPiModel;
use crate::rlc_decouple::CoupledRlcPair;

/// Default segment length (µm).
pub const DEFAULT_SEGMENT_UM: f64 = 10.0;

/// How finely to cut a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Segmentation {
    /// Target segment length in µm; the count is rounded up.
    Length(f64),
    Count(usize),
}

impl Default for Segmentation {
    fn default() -> Self {
        Segmentation::Length(DEFAULT_SEGMENT_UM)
    }
}

impl Segmentation {
    pub fn count(&self, h: f64) -> Result<usize> {
        match *self {
            Segmentation::Count(0) => Err(Error::ZeroSegments),
            Segmentation::Count(n) => Ok(n),
            Segmentation::Length(seg) => {
                if !(seg > 0.0 && seg.is_finite()) {
                    return Err(Error::ZeroSegments);
                }
                // tolerate round-off in h / seg before rounding up
                let n = (h / seg * (1.0 - 1e-12)).ceil();
                if n < 1.0 {
                    Err(Error::ZeroSegments)
                } else {
                    Ok(n as usize)
                }
            }
        }
    }
}

/// A single uniform line with a resistive driver and capacitive load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineParams {
    /// Ω/µm
    pub r_pul: f64,
    /// H/µm
    pub l_pul: f64,
    /// F/µm
    pub c_pul: f64,
    /// µm
    pub h: f64,
    pub rs: f64,
    pub c_load: f64,
    pub input: Stimulus,
}

/// One line of a ladder, values per segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderLine {
    pub r_seg: f64,
    pub l_seg: f64,
    pub c_seg: f64,
    pub rs: f64,
    pub c_load: f64,
    pub input: Stimulus,
}

/// One or two parallel π-segment ladders with aligned segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderNetlist {
    pub segments: usize,
    /// µm
    pub seg_len: f64,
    pub lines: Vec<LadderLine>,
    /// Coupling capacitance per segment (two-line ladders).
    pub cc_seg: f64,
    /// Mutual inductance per segment (two-line ladders).
    pub lm_seg: f64,
}

/// Per-line totals of a ladder, for conservation checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineTotals {
    pub r: f64,
    pub l: f64,
    pub c: f64,
}

pub fn build_single(line: &LineParams, seg: Segmentation) -> Result<LadderNetlist> {
    check_line(line)?;
    let n = seg.count(line.h)?;
    let len = line.h / n as f64;
    Ok(LadderNetlist {
        segments: n,
        seg_len: len,
        lines: vec![LadderLine {
            r_seg: line.r_pul * len,
            l_seg: line.l_pul * len,
            c_seg: line.c_pul * len,
            rs: line.rs,
            c_load: line.c_load,
            input: line.input,
        }],
        cc_seg: 0.0,
        lm_seg: 0.0,
    })
}

/// Two coupled lines: line 1 (aggressor) takes the `(1 + Δ)` values and a
/// step, line 2 (victim) the `(1 - Δ)` values and a grounded input.
pub fn build_coupled(pair: &CoupledRlcPair, seg: Segmentation) -> Result<LadderNetlist> {
    let violations = pair.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let n = seg.count(pair.h)?;
    let len = pair.h / n as f64;
    let line = |sign: f64, input: Stimulus| LadderLine {
        r_seg: pair.r * (1.0 + sign * pair.dr) * len,
        l_seg: pair.l * (1.0 + sign * pair.dl) * len,
        c_seg: pair.cg * (1.0 + sign * pair.dc) * len,
        rs: pair.rs_drv,
        c_load: pair.cl_load,
        input,
    };
    Ok(LadderNetlist {
        segments: n,
        seg_len: len,
        lines: vec![line(1.0, Stimulus::Step { vdd: pair.vdd }), line(-1.0, Stimulus::Zero)],
        cc_seg: pair.cc * len,
        lm_seg: pair.lm * len,
    })
}

fn check_line(line: &LineParams) -> Result<()> {
    let mut v = Vec::new();
    if !(line.h > 0.0) {
        v.push("h must be > 0".to_string());
    }
    if !(line.rs > 0.0) {
        v.push("rs must be > 0".to_string());
    }
    if !(line.r_pul >= 0.0 && line.l_pul >= 0.0 && line.c_pul >= 0.0 && line.c_load >= 0.0) {
        v.push("per-unit-length values and load must be >= 0".to_string());
    }
    if line.r_pul == 0.0 && line.l_pul == 0.0 {
        v.push("line needs resistance or inductance".to_string());
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

impl LadderNetlist {
    pub fn totals(&self) -> Vec<LineTotals> {
        let n = self.segments as f64;
        self.lines.iter().map(|l| LineTotals { r: l.r_seg * n, l: l.l_seg * n, c: l.c_seg * n }).collect()
    }

    /// Lowers the ladder to a circuit whose outputs are the far ends of each line.
    pub fn circuit(&self) -> Result<Circuit> {
        if self.segments == 0 {
            return Err(Error::ZeroSegments);
        }
        let nl = self.lines.len();
        if !(1..=2).contains(&nl) {
            return Err(Error::invalid("ladders have one or two lines"));
        }
        if nl == 2 {
            let (l1, l2) = (self.lines[0].l_seg, self.lines[1].l_seg);
            if self.lm_seg * self.lm_seg >= l1 * l2 && self.lm_seg != 0.0 {
                return Err(Error::invalid("mutual inductance per segment exceeds sqrt(l1 l2)"));
            }
        }
        let mut ckt = Circuit::new();
        let sources: Vec<Terminal> = self.lines.iter().map(|l| ckt.source(l.input)).collect();
        // node index = segment boundary * lines + line, so the band stays narrow
        let mut nodes = vec![Vec::with_capacity(self.segments + 1); nl];
        for j in 0..=self.segments {
            for (k, line_nodes) in nodes.iter_mut().enumerate() {
                line_nodes.push(ckt.node(format!("line{}.n{j}", k + 1)));
            }
        }
        for (k, line) in self.lines.iter().enumerate() {
            ckt.resistor(sources[k], nodes[k][0], line.rs);
            ckt.capacitor(nodes[k][self.segments], Terminal::Ground, line.c_load);
        }
        for j in 0..self.segments {
            let mut br = Vec::with_capacity(nl);
            for (k, line) in self.lines.iter().enumerate() {
                let (a, b) = (nodes[k][j], nodes[k][j + 1]);
                br.push(ckt.series_rl(a, b, line.r_seg, line.l_seg));
                ckt.capacitor(a, Terminal::Ground, line.c_seg / 2.0);
                ckt.capacitor(b, Terminal::Ground, line.c_seg / 2.0);
            }
            if nl == 2 {
                ckt.capacitor(nodes[0][j], nodes[1][j], self.cc_seg / 2.0);
                ckt.capacitor(nodes[0][j + 1], nodes[1][j + 1], self.cc_seg / 2.0);
                if let (Some(b1), Some(b2)) = (br[0], br[1]) {
                    ckt.mutual(b1, b2, self.lm_seg);
                }
            }
        }
        for line_nodes in &nodes {
            ckt.probe(line_nodes[self.segments]);
        }
        Ok(ckt)
    }
}

/// Distributed victim driven through `rd` to ground, with an ideal ramp
/// aggressor coupled through `cc_pul` along the coupled region. The output is
/// the receiver end.
pub fn build_rc_victim(geom: &VictimNetGeometry, seg_len: f64) -> Result<Circuit> {
    let violations = geom.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    if !(geom.r_pul > 0.0) {
        return Err(Error::invalid("r_pul must be > 0 for the distributed victim"));
    }
    let mut ckt = Circuit::new();
    let agg = ckt.source(Stimulus::Ramp { tr: geom.tr, vdd: geom.vdd });
    let mut here = ckt.node("victim.n0");
    ckt.resistor(Terminal::Ground, here, geom.rd);
    let mut idx = 0;
    for (len, coupled) in [(geom.ls_len, false), (geom.lc_len, true), (geom.le_len, false)] {
        if len <= 0.0 {
            continue;
        }
        let n = Segmentation::Length(seg_len).count(len)?;
        let seg = len / n as f64;
        let (r, c, cc) = (geom.r_pul * seg, geom.c_pul * seg, geom.cc_pul * seg);
        for _ in 0..n {
            idx += 1;
            let next = ckt.node(format!("victim.n{idx}"));
            ckt.resistor(here, next, r);
            for end in [here, next] {
                ckt.capacitor(end, Terminal::Ground, c / 2.0);
                if coupled {
                    ckt.capacitor(end, agg, cc / 2.0);
                }
            }
            here = next;
        }
    }
    ckt.capacitor(here, Terminal::Ground, geom.cload);
    ckt.probe(here);
    Ok(ckt)
}

/// The six-element two-π circuit itself, with its ramp aggressor.
pub fn build_two_pi(m: &TwoPiModel) -> Result<Circuit> {
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    if !(m.rs > 0.0 && m.re > 0.0) {
        return Err(Error::invalid("rs and re must be > 0 to simulate the two-pi circuit"));
    }
    let mut ckt = Circuit::new();
    let agg = ckt.source(Stimulus::Ramp { tr: m.tr, vdd: m.vdd });
    let n1 = ckt.node("n1");
    let n2 = ckt.node("n2");
    let n3 = ckt.node("n3");
    ckt.resistor(Terminal::Ground, n1, m.rd);
    ckt.capacitor(n1, Terminal::Ground, m.c1);
    ckt.resistor(n1, n2, m.rs);
    ckt.capacitor(n2, Terminal::Ground, m.c2);
    ckt.capacitor(n2, agg, m.cx);
    ckt.resistor(n2, n3, m.re);
    ckt.capacitor(n3, Terminal::Ground, m.cl);
    ckt.probe(n3);
    Ok(ckt)
}
