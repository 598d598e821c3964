// SPDX-License-Identifier: Apache-2.0

//! Linear RLC circuit description consumed by the transient engine.

use serde::{Deserialize, Serialize};

/// Independent voltage waveform applied at a source terminal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stimulus {
    /// Held at ground.
    Zero,
    /// `vdd` from `t = 0` on.
    Step { vdd: f64 },
    /// Saturated ramp reaching `vdd` at `tr`.
    Ramp { tr: f64, vdd: f64 },
}

impl Stimulus {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Stimulus::Zero => 0.0,
            Stimulus::Step { vdd } => {
                if t >= 0.0 {
                    vdd
                } else {
                    0.0
                }
            }
            Stimulus::Ramp { tr, vdd } => {
                if t <= 0.0 {
                    0.0
                } else if t >= tr {
                    vdd
                } else {
                    vdd * t / tr
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Ground,
    Node(usize),
    /// Ideal voltage source, indexing [`Circuit::sources`].
    Source(usize),
}

/// Series `R + L` branch between two nodes; its current is a state variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlBranch {
    pub from: usize,
    pub to: usize,
    pub r: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Circuit {
    pub(crate) node_names: Vec<String>,
    pub(crate) sources: Vec<Stimulus>,
    pub(crate) conductances: Vec<(Terminal, Terminal, f64)>,
    pub(crate) capacitors: Vec<(Terminal, Terminal, f64)>,
    pub(crate) branches: Vec<RlBranch>,
    /// Mutual inductance between two branches; a branch appears in at most one entry.
    pub(crate) mutuals: Vec<(usize, usize, f64)>,
    pub(crate) outputs: Vec<usize>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, name: impl Into<String>) -> Terminal {
        self.node_names.push(name.into());
        Terminal::Node(self.node_names.len() - 1)
    }

    pub fn source(&mut self, stim: Stimulus) -> Terminal {
        self.sources.push(stim);
        Terminal::Source(self.sources.len() - 1)
    }

    pub fn resistor(&mut self, a: Terminal, b: Terminal, r: f64) {
        assert!(r > 0.0, "resistor must be positive, got {r}");
        self.conductances.push((a, b, 1.0 / r));
    }

    pub fn capacitor(&mut self, a: Terminal, b: Terminal, c: f64) {
        if c != 0.0 {
            self.capacitors.push((a, b, c));
        }
    }

    /// Adds a series R-L branch and returns its index. A pure resistor is
    /// stamped as a conductance instead and `None` is returned.
    pub fn series_rl(&mut self, a: Terminal, b: Terminal, r: f64, l: f64) -> Option<usize> {
        match (a, b) {
            (Terminal::Node(from), Terminal::Node(to)) if l > 0.0 => {
                self.branches.push(RlBranch { from, to, r, l });
                Some(self.branches.len() - 1)
            }
            _ => {
                assert!(l == 0.0, "inductive branches must join two nodes");
                self.resistor(a, b, r);
                None
            }
        }
    }

    pub fn mutual(&mut self, b1: usize, b2: usize, m: f64) {
        assert!(b1 != b2);
        assert!(
            !self.mutuals.iter().any(|&(x, y, _)| [x, y].contains(&b1) || [x, y].contains(&b2)),
            "branch already mutually coupled"
        );
        if m != 0.0 {
            self.mutuals.push((b1, b2, m));
        }
    }

    pub fn probe(&mut self, t: Terminal) {
        match t {
            Terminal::Node(i) => self.outputs.push(i),
            _ => panic!("only nodes can be probed"),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.node_names[i]
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn branches(&self) -> &[RlBranch] {
        &self.branches
    }

    pub fn sources(&self) -> &[Stimulus] {
        &self.sources
    }

    /// Sum of all capacitance with at least one end on a node.
    pub fn total_capacitance(&self) -> f64 {
        self.capacitors.iter().map(|c| c.2).sum()
    }

    pub(crate) fn half_bandwidth(&self) -> usize {
        let span = |a: Terminal, b: Terminal| match (a, b) {
            (Terminal::Node(i), Terminal::Node(j)) => i.abs_diff(j),
            _ => 0,
        };
        let mut bw = 0;
        for &(a, b, _) in self.conductances.iter().chain(&self.capacitors) {
            bw = bw.max(span(a, b));
        }
        // a branch couples its own two nodes; a mutual pair couples all four
        let nodes_of = |k: usize| [self.branches[k].from, self.branches[k].to];
        for k in 0..self.branches.len() {
            let [a, b] = nodes_of(k);
            bw = bw.max(a.abs_diff(b));
        }
        for &(x, y, _) in &self.mutuals {
            for a in nodes_of(x) {
                for b in nodes_of(y) {
                    bw = bw.max(a.abs_diff(b));
                }
            }
        }
        bw
    }
}
