//! Preflow/level state shared by bounded-height push-relabel and push-pull-relabel.

use crate::graph::Graph;
use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub pushes_saturating: u64,
    pub pushes_partial: u64,
    pub pulls_saturating: u64,
    pub pulls_partial: u64,
    pub relabels_up: u64,
    pub relabels_down: u64,
    pub gap_moves: u64,
}

/// Flow units per edge plus vertex levels. Vertex mass uses the
/// positive/negative unit split: available(v) = p(v) - n(v) + sink(v).
#[derive(Debug, Clone)]
pub struct PreflowState {
    n: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    cap: Vec<i64>,
    pub(crate) f: Vec<i64>,
    arcs: Vec<Vec<usize>>,
    cur: Vec<usize>,
    level: Vec<u64>,
    h: u64,
    delta: Vec<i64>,
    sink: Vec<i64>,
    p: Vec<i64>,
    neg: Vec<i64>,
    active: Vec<bool>,
    removed_out: Vec<i64>,
    removed_in: Vec<i64>,
    flips: Vec<u32>,
    last_up: Vec<bool>,
    counts: BTreeMap<u64, usize>,
    gap: bool,
    pub stats: OpCounts,
}

impl PreflowState {
    /// Levels start at 0 and no flow is routed; call `push_relabel` to settle.
    pub fn new(
        g: &Graph,
        caps: Vec<i64>,
        delta: Vec<i64>,
        sink: Vec<i64>,
        h: u64,
        gap: bool,
    ) -> Self {
        let n = g.n();
        assert_eq!(caps.len(), g.m());
        assert_eq!(delta.len(), n);
        assert_eq!(sink.len(), n);
        let mut arcs = vec![Vec::new(); n];
        for (i, e) in g.edges().iter().enumerate() {
            arcs[e.tail].push(i);
            arcs[e.head].push(i);
        }
        for a in &mut arcs {
            a.sort_unstable();
        }
        let mut counts = BTreeMap::new();
        if n > 0 {
            counts.insert(0, n);
        }
        PreflowState {
            n,
            tail: g.edges().iter().map(|e| e.tail).collect(),
            head: g.edges().iter().map(|e| e.head).collect(),
            cap: caps,
            f: vec![0; g.m()],
            arcs,
            cur: vec![0; n],
            level: vec![0; n],
            h: h.max(1),
            p: delta.clone(),
            neg: sink.clone(),
            delta,
            sink,
            active: vec![true; n],
            removed_out: vec![0; n],
            removed_in: vec![0; n],
            flips: vec![0; n],
            last_up: vec![true; n],
            counts,
            gap,
            stats: OpCounts::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> u64 {
        self.h
    }
    pub fn flow(&self) -> &[i64] {
        &self.f
    }
    pub fn caps(&self) -> &[i64] {
        &self.cap
    }
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.tail[e], self.head[e])
    }
    pub fn level(&self, v: usize) -> u64 {
        self.level[v]
    }
    pub fn levels(&self) -> &[u64] {
        &self.level
    }
    pub fn delta(&self) -> &[i64] {
        &self.delta
    }
    pub fn sink(&self) -> &[i64] {
        &self.sink
    }
    pub fn p(&self) -> &[i64] {
        &self.p
    }
    pub fn neg(&self) -> &[i64] {
        &self.neg
    }
    pub fn is_active(&self, v: usize) -> bool {
        self.active[v]
    }
    pub fn active(&self) -> &[bool] {
        &self.active
    }
    pub fn flips(&self) -> &[u32] {
        &self.flips
    }
    pub fn removed_out(&self) -> &[i64] {
        &self.removed_out
    }
    pub fn removed_in(&self) -> &[i64] {
        &self.removed_in
    }

    pub fn available(&self, v: usize) -> i64 {
        self.p[v] - self.neg[v] + self.sink[v]
    }
    pub fn ex_pos(&self, v: usize) -> i64 {
        (self.p[v] - self.neg[v]).max(0)
    }
    pub fn ex_neg(&self, v: usize) -> i64 {
        (self.neg[v] - self.p[v] - self.sink[v]).max(0)
    }
    pub fn absorbed(&self, v: usize) -> i64 {
        self.available(v).clamp(0, self.sink[v])
    }
    pub fn total_excess(&self) -> i64 {
        (0..self.n)
            .filter(|&v| self.active[v])
            .map(|v| self.ex_pos(v))
            .sum()
    }
    pub fn has_positive_excess(&self) -> bool {
        (0..self.n).any(|v| self.active[v] && self.ex_pos(v) > 0)
    }

    fn other(&self, e: usize, v: usize) -> usize {
        if self.tail[e] == v {
            self.head[e]
        } else {
            self.tail[e]
        }
    }

    fn live(&self, e: usize) -> bool {
        self.active[self.tail[e]] && self.active[self.head[e]]
    }

    /// Residual capacity from `from` across edge `e`.
    pub fn residual_from(&self, e: usize, from: usize) -> i64 {
        if self.tail[e] == from {
            self.cap[e] - self.f[e]
        } else {
            self.f[e]
        }
    }

    fn move_mass(&mut self, e: usize, from: usize, amt: i64) {
        if self.tail[e] == from {
            self.f[e] += amt;
        } else {
            self.f[e] -= amt;
        }
    }

    fn set_level(&mut self, v: usize, new: u64) {
        let old = self.level[v];
        if new == old {
            return;
        }
        let up = new > old;
        if up != self.last_up[v] {
            self.flips[v] += 1;
            self.last_up[v] = up;
        }
        if self.active[v] {
            if let Some(c) = self.counts.get_mut(&old) {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(&old);
                }
            }
            *self.counts.entry(new).or_insert(0) += 1;
        }
        self.level[v] = new;
    }

    fn level_empty(&self, k: u64) -> bool {
        !self.counts.contains_key(&k)
    }

    /// Every vertex strictly above an emptied level `k` moves to h.
    fn gap_lift(&mut self, k: u64) {
        let targets: Vec<usize> = (0..self.n)
            .filter(|&v| self.active[v] && self.level[v] > k && self.level[v] < self.h)
            .collect();
        for v in targets {
            self.set_level(v, self.h);
            self.stats.gap_moves += 1;
        }
    }

    /// Every vertex strictly between 0 and an emptied level `k` moves to 0.
    fn gap_drop(&mut self, k: u64) {
        let targets: Vec<usize> = (0..self.n)
            .filter(|&v| self.active[v] && self.level[v] > 0 && self.level[v] < k)
            .collect();
        for v in targets {
            self.set_level(v, 0);
            self.stats.gap_moves += 1;
        }
    }

    fn needs_push(&self, v: usize) -> bool {
        self.active[v] && self.ex_pos(v) > 0 && self.level[v] < self.h
    }

    fn needs_pull(&self, v: usize) -> bool {
        self.active[v] && self.ex_neg(v) > 0 && self.level[v] > 0
    }

    /// Pushes positive excess downhill until every vertex with excess sits at h.
    pub fn push_relabel(&mut self) {
        self.cur.iter_mut().for_each(|c| *c = 0);
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| self.needs_push(v)).collect();
        let mut queued = vec![false; self.n];
        for &v in &queue {
            queued[v] = true;
        }
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            while self.needs_push(u) {
                if self.cur[u] == self.arcs[u].len() {
                    self.relabel_up(u);
                    self.cur[u] = 0;
                    continue;
                }
                let e = self.arcs[u][self.cur[u]];
                let v = self.other(e, u);
                let r = self.residual_from(e, u);
                if self.live(e) && r > 0 && self.level[u] == self.level[v] + 1 {
                    let ex = self.ex_pos(u);
                    let amt = ex.min(r);
                    self.move_mass(e, u, amt);
                    self.p[u] -= amt;
                    self.p[v] += amt;
                    if amt == r {
                        self.stats.pushes_saturating += 1;
                        self.cur[u] += 1;
                    } else {
                        self.stats.pushes_partial += 1;
                    }
                    if self.needs_push(v) && !queued[v] {
                        queued[v] = true;
                        queue.push_back(v);
                    }
                } else {
                    self.cur[u] += 1;
                }
            }
        }
    }

    fn relabel_up(&mut self, u: usize) {
        let old = self.level[u];
        let mut best = self.h;
        for &e in &self.arcs[u] {
            if self.live(e) && self.residual_from(e, u) > 0 {
                best = best.min(self.level[self.other(e, u)] + 1);
            }
        }
        if best <= old {
            // an arc became admissible again; rescan without relabelling
            return;
        }
        self.stats.relabels_up += 1;
        self.set_level(u, best);
        if self.gap && old >= 1 && self.level_empty(old) {
            self.gap_lift(old);
        }
    }

    /// Pulls negative excess uphill until every vertex with negative excess sits at 0.
    pub fn pull_relabel(&mut self) {
        self.cur.iter_mut().for_each(|c| *c = 0);
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| self.needs_pull(v)).collect();
        let mut queued = vec![false; self.n];
        for &v in &queue {
            queued[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            while self.needs_pull(v) {
                if self.cur[v] == self.arcs[v].len() {
                    self.relabel_down(v);
                    self.cur[v] = 0;
                    continue;
                }
                let e = self.arcs[v][self.cur[v]];
                let u = self.other(e, v);
                let r = self.residual_from(e, u);
                if self.live(e) && r > 0 && self.level[u] == self.level[v] + 1 {
                    let amt = self.ex_neg(v).min(r);
                    self.move_mass(e, u, amt);
                    self.neg[u] += amt;
                    self.neg[v] -= amt;
                    if amt == r {
                        self.stats.pulls_saturating += 1;
                        self.cur[v] += 1;
                    } else {
                        self.stats.pulls_partial += 1;
                    }
                    if self.needs_pull(u) && !queued[u] {
                        queued[u] = true;
                        queue.push_back(u);
                    }
                } else {
                    self.cur[v] += 1;
                }
            }
        }
    }

    fn relabel_down(&mut self, v: usize) {
        let old = self.level[v];
        let mut best = 0u64;
        for &e in &self.arcs[v] {
            let u = self.other(e, v);
            if self.live(e) && self.residual_from(e, u) > 0 {
                best = best.max(self.level[u].saturating_sub(1));
            }
        }
        if best >= old {
            return;
        }
        self.stats.relabels_down += 1;
        self.set_level(v, best);
        if self.gap && old < self.h && self.level_empty(old) {
            self.gap_drop(old);
        }
    }

    pub fn increase_source(&mut self, v: usize, amt: i64) {
        self.delta[v] += amt;
        self.p[v] += amt;
    }

    /// Raises the sink while keeping available mass unchanged.
    pub fn raise_sink(&mut self, v: usize, amt: i64) {
        self.sink[v] += amt;
        self.neg[v] += amt;
    }

    pub fn reset_levels(&mut self) {
        for v in 0..self.n {
            self.set_level(v, 0);
        }
    }

    /// Deactivates `set`; flow exchanged with it becomes local units.
    pub fn remove(&mut self, set: &[usize]) {
        let mut gone = vec![false; self.n];
        for &s in set {
            if self.active[s] {
                gone[s] = true;
            }
        }
        for e in 0..self.f.len() {
            let (t, h) = (self.tail[e], self.head[e]);
            if !self.active[t] || !self.active[h] {
                continue;
            }
            let fl = self.f[e];
            if gone[h] && !gone[t] {
                self.p[t] += fl;
                self.removed_out[t] += fl;
            } else if gone[t] && !gone[h] {
                self.neg[h] += fl;
                self.removed_in[h] += fl;
            }
        }
        for (s, &g) in gone.iter().enumerate() {
            if g {
                let l = self.level[s];
                if let Some(c) = self.counts.get_mut(&l) {
                    *c -= 1;
                    if *c == 0 {
                        self.counts.remove(&l);
                    }
                }
                self.active[s] = false;
            }
        }
    }

    /// Flow over live edges: (out, in) for each vertex.
    pub fn live_net(&self) -> (Vec<i64>, Vec<i64>) {
        let mut out = vec![0; self.n];
        let mut inn = vec![0; self.n];
        for e in 0..self.f.len() {
            if self.live(e) {
                out[self.tail[e]] += self.f[e];
                inn[self.head[e]] += self.f[e];
            }
        }
        (out, inn)
    }

    /// Full scan of the valid-state conditions. `sink_saturation` additionally
    /// demands absorbed = sink above level 0 (static push-relabel only).
    pub fn scan(&self, sink_saturation: bool) -> Result<(), String> {
        let (out, inn) = self.live_net();
        for e in 0..self.f.len() {
            if self.f[e] < 0 || self.f[e] > self.cap[e] {
                return Err(format!(
                    "edge {e} flow {} outside [0, {}]",
                    self.f[e], self.cap[e]
                ));
            }
            if !self.live(e) {
                continue;
            }
            let (u, v) = (self.tail[e], self.head[e]);
            if self.f[e] < self.cap[e] && self.level[u] > self.level[v] + 1 {
                return Err(format!("unsaturated edge {e} skips levels downward"));
            }
            if self.f[e] > 0 && self.level[v] > self.level[u] + 1 {
                return Err(format!("flow on edge {e} skips levels upward"));
            }
        }
        for v in 0..self.n {
            if !self.active[v] {
                continue;
            }
            if self.level[v] > self.h {
                return Err(format!("vertex {v} above h"));
            }
            if self.p[v] < 0 || self.neg[v] < 0 {
                return Err(format!("vertex {v} has negative unit counts"));
            }
            let avail = self.delta[v] + inn[v] - out[v];
            if avail != self.available(v) {
                return Err(format!(
                    "vertex {v} conservation: {avail} != {}",
                    self.available(v)
                ));
            }
            if self.ex_pos(v) > 0 && self.level[v] != self.h {
                return Err(format!("vertex {v} has positive excess below h"));
            }
            if self.ex_neg(v) > 0 && self.level[v] != 0 {
                return Err(format!("vertex {v} has negative excess above 0"));
            }
            if sink_saturation && self.level[v] >= 1 && self.absorbed(v) != self.sink[v] {
                return Err(format!("vertex {v} above level 0 with unsaturated sink"));
            }
        }
        Ok(())
    }
}
