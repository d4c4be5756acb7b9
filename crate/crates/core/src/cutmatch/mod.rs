//! Non-stop cut-matching game: random-projection bisections, flow-based
//! matchings with partial deletions, cut reconciliation, early termination
//! and grafting of deleted vertices.

pub mod flowmatrix;

pub use flowmatrix::{
    dense_f64, potential, potential_f64, ExactMatrix, FlowMatrixImplicit, RoundOps, EXACT_LIMIT,
};

use crate::cert::{CutCertificate, CutKind};
use crate::error::{Error, Result};
use crate::flow::{
    decompose_flow, default_height, extract_sparse_level_cut, max_flow, push_relabel_bounded,
    FlowInstance, FlowResult, Terminals,
};
use crate::graph::{members, sparsity_at_most, Graph, Weighting};
use crate::rational::Q;
use crate::witness::{Witness, WitnessRound};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchMode {
    /// Max flow with min-cut certificates.
    Exact,
    /// Bounded-height push-relabel with level cuts; needs d ≥ deg/κ.
    PushRelabel { kappa: u64 },
}

#[derive(Debug, Clone)]
pub struct CutMatchConfig {
    pub phi: Q,
    pub tau: Q,
    pub c_t: f64,
    pub seed: u64,
    pub mode: MatchMode,
    /// Overrides the computed round count.
    pub rounds: Option<usize>,
}

impl CutMatchConfig {
    pub fn new(phi: Q, seed: u64) -> Self {
        CutMatchConfig {
            phi,
            tau: Q::from_integer(10_000),
            c_t: 10.0,
            seed,
            mode: MatchMode::Exact,
            rounds: None,
        }
    }
}

/// ⌈c_T · log₂n · log₂(nW)⌉, zero for n ≤ 1.
pub fn round_count(n: usize, w: u64, c_t: f64) -> usize {
    if n <= 1 {
        return 0;
    }
    let n = n as f64;
    (c_t * n.log2() * (n * w.max(1) as f64).log2()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    EarlyTermination,
    NearExpander,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bisection {
    /// (vertex, projection) over the active set.
    pub proj: Vec<(usize, f64)>,
    /// (vertex, weight) assigned to each side; a split vertex appears on both.
    pub left: Vec<(usize, i64)>,
    pub right: Vec<(usize, i64)>,
    pub eta: f64,
    pub split: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundLog {
    pub t: usize,
    pub bisection: Bisection,
    pub cuts_added: usize,
    /// d(C), d(D) and d_t(A_t) after the round, in flow units.
    pub cut_weight: i128,
    pub deleted_weight: i128,
    pub active_weight: i128,
    pub fallbacks: u32,
}

/// Conversion between weights and flow units: d(v) ↦ vertex·d(v), c(e) ↦ edge·c(e).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowUnits {
    pub vertex: i128,
    pub edge: i128,
    pub w0: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct CutMatchingOutcome {
    pub tag: Termination,
    /// Cut sequence; each host is the scope minus earlier cuts.
    pub cuts: Vec<CutCertificate>,
    /// V minus all cuts.
    pub survivors: Vec<usize>,
    /// Vertices deleted outside cuts at the end of the game.
    pub deleted: Vec<usize>,
    pub witness: Witness,
    pub flow_matrix: FlowMatrixImplicit,
    pub rounds: Vec<RoundLog>,
    pub t_max: usize,
    pub units: FlowUnits,
    /// Max over edges of total routed flow / (vertex unit · capacity).
    pub congestion: Q,
    /// 7T/φ and 26T/φ.
    pub congestion_bounds: (f64, f64),
    pub fallbacks: u32,
}

/// Samples a Gaussian direction over the active halves and bisects the
/// active set by projection of rows (or columns) of the flow matrix.
pub fn cut_player(
    fm: &FlowMatrixImplicit,
    rng: &mut ChaCha8Rng,
    columns: bool,
) -> Result<Bisection> {
    let t = fm.len();
    let n = fm.n();
    let d = fm.weights(t);
    let act: Vec<usize> = (0..n).filter(|&v| d[v] > 0).collect();
    if act.is_empty() {
        return Err(Error::Contract(
            "cut player called with an empty active set".into(),
        ));
    }
    let mut r: Vec<f64> = act.iter().map(|_| StandardNormal.sample(rng)).collect();
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        r.iter_mut().for_each(|x| *x /= norm);
    }
    let mut x = vec![0.0; 2 * n];
    for (i, &v) in act.iter().enumerate() {
        x[v] = r[i] / (d[v] as f64).sqrt();
    }
    let y = if columns {
        fm.mul_left(t, &x)
    } else {
        fm.mul_right(t, &x)
    };
    let mut proj: Vec<(usize, f64)> = act.iter().map(|&v| (v, y[v] / d[v] as f64)).collect();
    proj.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(bisect(&proj, d))
}

/// Weighted bisection of projections sorted ascending; the left side gets ⌊total/2⌋.
pub fn bisect(sorted: &[(usize, f64)], d: &[i64]) -> Bisection {
    let total: i64 = sorted.iter().map(|&(v, _)| d[v]).sum();
    let half = total / 2;
    let (mut left, mut right, mut split) = (Vec::new(), Vec::new(), None);
    let mut cum = 0i64;
    for &(v, _) in sorted {
        let w = d[v];
        if cum + w <= half {
            left.push((v, w));
        } else if cum < half {
            left.push((v, half - cum));
            right.push((v, w - (half - cum)));
            split = Some(v);
        } else {
            right.push((v, w));
        }
        cum += w;
    }
    let p = |v: usize| sorted.iter().find(|x| x.0 == v).map(|x| x.1).unwrap_or(0.0);
    let eta = match split {
        Some(v) => p(v),
        None => match (left.last(), right.first()) {
            (Some(&(a, _)), Some(&(b, _))) => (p(a) + p(b)) / 2.0,
            (Some(&(a, _)), None) => p(a),
            (None, Some(&(b, _))) => p(b),
            (None, None) => 0.0,
        },
    };
    Bisection {
        proj: sorted.to_vec(),
        left,
        right,
        eta,
        split,
    }
}

/// A candidate sparse cut: scope mask, claimed bound, kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub side: Vec<bool>,
    pub bound: Q,
    pub kind: CutKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconciled {
    /// Cuts to append, in order.
    pub appended: Vec<Cut>,
    /// Vertices moved to the deleted set.
    pub deferred: Vec<bool>,
    pub early: bool,
}

/// Orders the round's cuts by weight and decides what to append.
/// `triggers(x)` reports whether appending weight x causes early termination.
pub fn reconcile_cuts(
    s1: Option<Cut>,
    s2: Option<Cut>,
    w: &[i64],
    phi: Q,
    triggers: impl Fn(i128) -> bool,
) -> Reconciled {
    let n = w.len();
    let wt = |m: &[bool]| (0..n).filter(|&v| m[v]).map(|v| w[v] as i128).sum::<i128>();
    let mut cs: Vec<Cut> = s1.into_iter().chain(s2).collect();
    let none = vec![false; n];
    match cs.len() {
        0 => Reconciled {
            appended: Vec::new(),
            deferred: none,
            early: false,
        },
        1 => {
            let early = triggers(wt(&cs[0].side));
            Reconciled {
                appended: cs,
                deferred: none,
                early,
            }
        }
        _ => {
            if wt(&cs[1].side) < wt(&cs[0].side) {
                cs.swap(0, 1);
            }
            let (a, b) = (cs[0].clone(), cs[1].clone());
            if triggers(wt(&a.side)) {
                return Reconciled {
                    appended: vec![a],
                    deferred: none,
                    early: true,
                };
            }
            if triggers(wt(&b.side)) {
                return Reconciled {
                    appended: vec![b],
                    deferred: none,
                    early: true,
                };
            }
            let diff: Vec<bool> = (0..n).map(|v| b.side[v] && !a.side[v]).collect();
            let three = phi * Q::from_integer(3);
            if 2 * wt(&diff) >= wt(&b.side) {
                let total = wt(&a.side) + wt(&diff);
                let mut appended = vec![a];
                if diff.iter().any(|&x| x) {
                    appended.push(Cut {
                        side: diff,
                        bound: three,
                        kind: CutKind::Reconciled,
                    });
                }
                Reconciled {
                    appended,
                    deferred: none,
                    early: triggers(total),
                }
            } else {
                let inter: Vec<bool> = (0..n).map(|v| a.side[v] && b.side[v]).collect();
                let sym: Vec<bool> = (0..n).map(|v| a.side[v] != b.side[v]).collect();
                let early = triggers(wt(&inter));
                Reconciled {
                    appended: vec![Cut {
                        side: inter,
                        bound: three,
                        kind: CutKind::Reconciled,
                    }],
                    deferred: sym,
                    early,
                }
            }
        }
    }
}

/// One routed flow problem mapped back to scope ids.
struct Routed {
    /// (src, dst, amount, keep) in scope ids, in the orientation of the solved graph.
    paths: Vec<(usize, usize, i64, bool)>,
    round: WitnessRound,
    cut: Option<Cut>,
    fallback: bool,
}

struct Game<'a> {
    g: &'a Graph,
    d: &'a Weighting,
    cfg: &'a CutMatchConfig,
    n: usize,
    units: FlowUnits,
    dcur: Vec<i64>,
    in_cut: Vec<bool>,
    in_d: Vec<bool>,
    cuts: Vec<CutCertificate>,
    cut_w: i128,
    total_w: i128,
    fm: FlowMatrixImplicit,
    witness: Witness,
    logs: Vec<RoundLog>,
    fallbacks: u32,
}

impl<'a> Game<'a> {
    fn host(&self) -> Vec<bool> {
        self.in_cut.iter().map(|&c| !c).collect()
    }

    fn triggers(&self, extra: i128) -> bool {
        let tau = self.cfg.tau;
        (self.cut_w + extra) * *tau.numer() > self.total_w * *tau.denom()
    }

    fn active_weight(&self) -> i128 {
        self.dcur.iter().map(|&x| x as i128).sum()
    }

    fn early(&self) -> bool {
        self.triggers(0) || 100 * self.active_weight() < 99 * self.total_w
    }

    fn deleted_weight(&self) -> i128 {
        (0..self.n)
            .filter(|&v| self.in_d[v])
            .map(|v| self.units.w0[v] as i128)
            .sum()
    }

    fn route(
        &self,
        host: &[bool],
        source: &[i64],
        sink: &[i64],
        reversed: bool,
        balanced: bool,
        exact_only: bool,
        round: usize,
    ) -> Result<Routed> {
        let mem = members(host);
        let sub = self.g.induced(&mem);
        let graph = if reversed {
            sub.graph.reverse()
        } else {
            sub.graph.clone()
        };
        let caps: Vec<i64> = graph
            .edges()
            .iter()
            .map(|e| e.cap as i64 * self.units.edge as i64)
            .collect();
        let src: Vec<i64> = mem.iter().map(|&v| source[v]).collect();
        let snk: Vec<i64> = mem.iter().map(|&v| sink[v]).collect();
        let b: Vec<i64> = mem.iter().map(|&v| self.units.w0[v]).collect();
        let k = mem.len();
        let mut fallback = false;
        let mut solved = None;
        if let (MatchMode::PushRelabel { kappa }, false) = (self.cfg.mode, exact_only) {
            let phi = crate::rational::to_f64(&self.cfg.phi);
            let h = default_height(k, self.g.w(), kappa, phi);
            let inst = FlowInstance {
                host: &graph,
                caps: caps.clone(),
                source: src.clone(),
                sink: snk.clone(),
                h,
            };
            match push_relabel_bounded(&inst, true) {
                FlowResult::Feasible(st) => {
                    let terms = Terminals::simple(
                        st.delta().to_vec(),
                        (0..k).map(|v| st.absorbed(v)).collect(),
                    );
                    solved = Some((st.flow().to_vec(), terms, None));
                }
                FlowResult::Stuck(st) => {
                    let bound = self.cfg.phi * Q::new(11, 10);
                    let lc = extract_sparse_level_cut(&st, &b).ok().and_then(|lc| {
                        let side: Vec<bool> = {
                            let mut s = vec![false; self.n];
                            for i in 0..k {
                                s[mem[i]] = lc.side[i];
                            }
                            s
                        };
                        sparsity_at_most(self.g, self.d, &side, host, bound).then_some(side)
                    });
                    match lc {
                        Some(side) => {
                            let terms = Terminals {
                                supply: st.delta().to_vec(),
                                supply_drop: (0..k).map(|v| st.ex_neg(v)).collect(),
                                demand: (0..k).map(|v| st.absorbed(v)).collect(),
                                demand_drop: (0..k).map(|v| st.ex_pos(v)).collect(),
                            };
                            let cut = Cut {
                                side,
                                bound,
                                kind: CutKind::LevelCut,
                            };
                            solved = Some((st.flow().to_vec(), terms, Some(cut)));
                        }
                        None => fallback = true,
                    }
                }
            }
        }
        let (flow, terms, cut) = match solved {
            Some(s) => s,
            None => {
                let mf = max_flow(&graph, &caps, &src, &snk);
                let total: i64 = src.iter().sum();
                let cut = (mf.value < total).then(|| {
                    let x: Vec<bool> = mf.source_side.clone();
                    let bx: i128 = (0..k).filter(|&i| x[i]).map(|i| b[i] as i128).sum();
                    let bt: i128 = b.iter().map(|&v| v as i128).sum();
                    let take_x = !balanced || 3 * bx <= 2 * bt;
                    let mut side = vec![false; self.n];
                    for i in 0..k {
                        side[mem[i]] = x[i] == take_x;
                    }
                    let kind = if balanced {
                        CutKind::Matching
                    } else {
                        CutKind::Grafting
                    };
                    Cut {
                        side,
                        bound: self.cfg.phi,
                        kind,
                    }
                });
                (mf.flow, Terminals::simple(mf.routed, mf.absorbed), cut)
            }
        };
        let dec = decompose_flow(&graph, &flow, &terms, false)?;
        let paths = dec
            .paths
            .iter()
            .map(|p| (mem[p.src], mem[p.dst], p.amount, p.keep))
            .collect();
        let mut scope_flow = vec![0i64; self.g.m()];
        for (e, &f) in flow.iter().enumerate() {
            scope_flow[sub.edge_to_parent[e]] += f;
        }
        let round = WitnessRound {
            round,
            to_parent: mem,
            edge_to_parent: sub.edge_to_parent,
            reversed,
            transcript: dec.transcript,
            excluded: vec![false; self.n],
            flow: scope_flow,
        };
        Ok(Routed {
            paths,
            round,
            cut,
            fallback,
        })
    }

    fn append_cut(&mut self, c: &Cut) {
        let host = members(&self.host());
        let side = members(&c.side);
        debug_assert!(side.iter().all(|&v| !self.in_cut[v]));
        for &v in &side {
            self.in_cut[v] = true;
            self.in_d[v] = false;
            self.dcur[v] = 0;
            self.cut_w += self.units.w0[v] as i128;
        }
        self.cuts
            .push(CutCertificate::new(side, host, c.bound, c.kind));
    }

    /// One cut step and matching step; returns true on early termination.
    fn round(&mut self, t: usize, t_max: usize, rng: &mut ChaCha8Rng) -> Result<bool> {
        let bis = cut_player(&self.fm, rng, 2 * t > t_max)?;
        let d_prev = self.dcur.clone();
        let (mut lw, mut rw) = (vec![0i64; self.n], vec![0i64; self.n]);
        for &(v, w) in &bis.left {
            lw[v] += w;
        }
        for &(v, w) in &bis.right {
            rw[v] += w;
        }
        let host = self.host();
        let mut r1 = self.route(&host, &lw, &rw, false, true, false, t)?;
        let mut r2 = self.route(&host, &rw, &lw, false, true, false, t)?;
        let fb = r1.fallback as u32 + r2.fallback as u32;
        self.fallbacks += fb;
        let rec = reconcile_cuts(
            r1.cut.take(),
            r2.cut.take(),
            &self.units.w0,
            self.cfg.phi,
            |x| self.triggers(x),
        );
        let mut removed = rec.deferred.clone();
        for c in &rec.appended {
            for v in 0..self.n {
                removed[v] |= c.side[v];
            }
            self.append_cut(c);
        }
        for v in 0..self.n {
            if rec.deferred[v] {
                self.in_d[v] = true;
            }
        }
        let mut m: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for r in [&r1, &r2] {
            for &(src, dst, x, keep) in &r.paths {
                if keep && x > 0 && !removed[src] && !removed[dst] {
                    *m.entry((dst, src)).or_insert(0) += x;
                }
            }
        }
        let entries: Vec<(usize, usize, i64)> =
            m.into_iter().map(|((u, v), x)| (u, v, x)).collect();
        let (mut rs, mut cs) = (vec![0i64; self.n], vec![0i64; self.n]);
        for &(u, v, x) in &entries {
            rs[u] += x;
            cs[v] += x;
        }
        let mut d_new = vec![0i64; self.n];
        for u in 0..self.n {
            if d_prev[u] == 0 || removed[u] {
                continue;
            }
            let x = rs[u].min(cs[u]);
            d_new[u] = if 2 * x < self.units.w0[u] { 0 } else { x };
            if d_new[u] == 0 {
                self.in_d[u] = true;
            }
        }
        self.fm.push(RoundOps::new(d_prev, d_new.clone(), entries)?);
        self.dcur = d_new;
        for mut r in [r1, r2] {
            r.round.excluded = removed.clone();
            self.witness.rounds.push(r.round);
        }
        self.logs.push(RoundLog {
            t,
            bisection: bis,
            cuts_added: rec.appended.len(),
            cut_weight: self.cut_w,
            deleted_weight: self.deleted_weight(),
            active_weight: self.active_weight(),
            fallbacks: fb,
        });
        Ok(rec.early || self.early())
    }

    /// Routes deleted vertices into the active set forward and backward.
    fn graft(&mut self, t: usize) -> Result<bool> {
        for reversed in [false, true] {
            if !self.in_d.iter().any(|&x| x) {
                return Ok(false);
            }
            let src: Vec<i64> = (0..self.n)
                .map(|v| if self.in_d[v] { self.units.w0[v] } else { 0 })
                .collect();
            let snk: Vec<i64> = (0..self.n)
                .map(|v| {
                    if self.dcur[v] > 0 {
                        self.units.w0[v]
                    } else {
                        0
                    }
                })
                .collect();
            let host = self.host();
            let mut r = self.route(&host, &src, &snk, reversed, false, true, t)?;
            let mut excluded = vec![false; self.n];
            if let Some(c) = r.cut.take() {
                excluded.clone_from(&c.side);
                self.append_cut(&c);
            }
            r.round.excluded = excluded;
            self.witness.rounds.push(r.round);
            if self.early() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn finish(self, tag: Termination, t_max: usize) -> CutMatchingOutcome {
        let survivors = members(&self.host());
        let deleted = members(&self.in_d);
        let mut congestion = Q::from_integer(0);
        for (e, &l) in self.witness.loads().iter().enumerate() {
            let q = Q::new(l as i128, self.units.vertex * self.g.edge(e).cap as i128);
            if q > congestion {
                congestion = q;
            }
        }
        let phi = crate::rational::to_f64(&self.cfg.phi);
        CutMatchingOutcome {
            tag,
            cuts: self.cuts,
            survivors,
            deleted,
            witness: self.witness,
            flow_matrix: self.fm,
            rounds: self.logs,
            t_max,
            units: self.units,
            congestion,
            congestion_bounds: (7.0 * t_max as f64 / phi, 26.0 * t_max as f64 / phi),
            fallbacks: self.fallbacks,
        }
    }
}

pub fn run_cut_matching(
    g: &Graph,
    d: &Weighting,
    cfg: &CutMatchConfig,
) -> Result<CutMatchingOutcome> {
    let n = g.n();
    let zero = Q::from_integer(0);
    if cfg.phi <= zero || cfg.phi >= Q::from_integer(1) {
        return Err(Error::Contract("phi must lie in (0, 1)".into()));
    }
    if cfg.tau < Q::from_integer(10_000) {
        return Err(Error::Contract("tau must be at least 1e4".into()));
    }
    if d.num.len() != n || d.den == 0 {
        return Err(Error::Contract("weighting does not match the graph".into()));
    }
    let (a, b) = (*cfg.phi.numer(), *cfg.phi.denom());
    let vertex = 2 * a * d.den as i128;
    let edge = 2 * b * d.den as i128;
    let w0: Vec<i64> = d
        .num
        .iter()
        .map(|&x| {
            i64::try_from(2 * a * x as i128)
                .map_err(|_| Error::Contract("vertex weight overflows".into()))
        })
        .collect::<Result<_>>()?;
    let max_cap = g.edges().iter().map(|e| e.cap).max().unwrap_or(0) as i128;
    if edge * max_cap > i64::MAX as i128 / 4 {
        return Err(Error::Contract("edge capacity overflows flow units".into()));
    }
    let units = FlowUnits {
        vertex,
        edge,
        w0: w0.clone(),
    };
    let t_max = cfg.rounds.unwrap_or_else(|| round_count(n, g.w(), cfg.c_t));
    let mut game = Game {
        g,
        d,
        cfg,
        n,
        units,
        dcur: w0.clone(),
        in_cut: vec![false; n],
        in_d: vec![false; n],
        cuts: Vec::new(),
        cut_w: 0,
        total_w: w0.iter().map(|&x| x as i128).sum(),
        fm: FlowMatrixImplicit::new(w0.clone()),
        witness: Witness::empty(n, g.m(), vertex, edge),
        logs: Vec::new(),
        fallbacks: 0,
    };
    if w0.iter().filter(|&&x| x > 0).count() <= 1 {
        return Ok(game.finish(Termination::NearExpander, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for t in 1..=t_max {
        if game.round(t, t_max, &mut rng)? {
            return Ok(game.finish(Termination::EarlyTermination, t_max));
        }
    }
    if game.graft(t_max + 1)? {
        return Ok(game.finish(Termination::EarlyTermination, t_max));
    }
    Ok(game.finish(Termination::NearExpander, t_max))
}
