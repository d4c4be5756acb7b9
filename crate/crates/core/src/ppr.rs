//! Push-pull-relabel: a preflow kept valid under source increases and vertex removals.

use crate::error::{Error, Result};
use crate::flow::{decompose_flow, OpCounts, PreflowState, Terminals};
use crate::graph::Graph;

#[derive(Debug, Clone)]
pub struct ValidState {
    g: Graph,
    st: PreflowState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Flow per edge with negative-excess-sourced paths removed.
    Feasible(Vec<i64>),
    /// Levels of the stuck state.
    Stuck(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PprStats {
    pub ops: OpCounts,
    pub flips: Vec<u32>,
    pub neg_total: i64,
}

impl ValidState {
    /// Flow capacities are `cap_scale * c(e)`; requires sink(v) ≥ deg_G(v).
    pub fn init(
        g: &Graph,
        cap_scale: i64,
        delta0: Vec<i64>,
        sink: Vec<i64>,
        h: u64,
        gap: bool,
    ) -> Result<Self> {
        if h == 0 {
            return Err(Error::Contract("height must be positive".into()));
        }
        if delta0.len() != g.n() || sink.len() != g.n() {
            return Err(Error::Contract(
                "source/sink length differs from vertex count".into(),
            ));
        }
        for v in 0..g.n() {
            if sink[v] < g.degree(v) as i64 {
                return Err(Error::Contract(format!("sink at {v} below its degree")));
            }
            if delta0[v] < 0 {
                return Err(Error::Contract(format!("negative source at {v}")));
            }
        }
        let caps = g.edges().iter().map(|e| e.cap as i64 * cap_scale).collect();
        let mut st = PreflowState::new(g, caps, delta0, sink, h, gap);
        st.push_relabel();
        Ok(ValidState { g: g.clone(), st })
    }

    pub fn state(&self) -> &PreflowState {
        &self.st
    }
    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn increase_source(&mut self, v: usize, amt: i64) -> Result<()> {
        if v >= self.g.n() || !self.st.is_active(v) {
            return Err(Error::Contract(format!(
                "source increase on removed vertex {v}"
            )));
        }
        if amt < 0 {
            return Err(Error::Contract(
                "source increase must be non-negative".into(),
            ));
        }
        if amt > 0 {
            self.st.increase_source(v, amt);
            self.st.push_relabel();
        }
        Ok(())
    }

    /// Several increases followed by a single PushRelabel.
    pub fn increase_sources(&mut self, amts: &[i64]) -> Result<()> {
        for (v, &a) in amts.iter().enumerate() {
            if a > 0 {
                if !self.st.is_active(v) {
                    return Err(Error::Contract(format!(
                        "source increase on removed vertex {v}"
                    )));
                }
                self.st.increase_source(v, a);
            }
        }
        self.st.push_relabel();
        Ok(())
    }

    pub fn remove_vertices(&mut self, set: &[usize]) -> Result<()> {
        if set
            .iter()
            .any(|&v| v >= self.g.n() || !self.st.is_active(v))
        {
            return Err(Error::Contract(
                "removal of a vertex outside the active set".into(),
            ));
        }
        self.st.remove(set);
        self.st.pull_relabel();
        self.st.push_relabel();
        Ok(())
    }

    pub fn pull_relabel(&mut self) {
        self.st.pull_relabel();
    }

    /// Levels go back to 0 (flow kept), sinks rise by `extra`, then the state is revalidated.
    pub fn reset_and_raise_sinks(&mut self, extra: &[i64]) {
        self.st.reset_levels();
        for (v, &x) in extra.iter().enumerate() {
            if x > 0 && self.st.is_active(v) {
                self.st.raise_sink(v, x);
            }
        }
    }

    pub fn revalidate(&mut self) {
        self.st.pull_relabel();
        self.st.push_relabel();
    }

    pub fn is_stuck(&self) -> bool {
        self.st.has_positive_excess()
    }

    pub fn feasibility(&self) -> Result<Verdict> {
        if self.is_stuck() {
            return Ok(Verdict::Stuck(self.st.levels().to_vec()));
        }
        let n = self.g.n();
        let act = self.st.active();
        let flow: Vec<i64> = self
            .g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, ed)| {
                if act[ed.tail] && act[ed.head] {
                    self.st.flow()[e]
                } else {
                    0
                }
            })
            .collect();
        let pick = |f: &dyn Fn(usize) -> i64| {
            (0..n)
                .map(|v| if act[v] { f(v) } else { 0 })
                .collect::<Vec<i64>>()
        };
        let terms = Terminals {
            supply: pick(&|v| self.st.delta()[v]),
            supply_drop: pick(&|v| self.st.ex_neg(v)),
            demand: pick(&|v| self.st.absorbed(v)),
            demand_drop: pick(&|v| self.st.ex_pos(v)),
        };
        let dec = decompose_flow(&self.g, &flow, &terms, true)?;
        let kept = dec
            .loads(self.g.m(), |p| p.keep)
            .expect("explicit paths requested");
        Ok(Verdict::Feasible(kept))
    }

    pub fn stats(&self) -> PprStats {
        PprStats {
            ops: self.st.stats.clone(),
            flips: self.st.flips().to_vec(),
            neg_total: (0..self.g.n())
                .filter(|&v| self.st.is_active(v))
                .map(|v| self.st.neg()[v])
                .sum(),
        }
    }

    pub fn scan(&self) -> std::result::Result<(), String> {
        self.st.scan(false)
    }
}
