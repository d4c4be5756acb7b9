//! Flow instances, bounded-height push-relabel, level cuts, exact max flow
//! and path decomposition.

pub mod decompose;
pub mod dinic;
pub mod preflow;

pub use decompose::{decompose_flow, decompose_flow_naive, FlowPath, PathDecomposition, Terminals};
pub use dinic::{max_flow, MaxFlow};
pub use preflow::{OpCounts, PreflowState};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Integer flow instance: capacities are already scaled into flow units.
#[derive(Debug, Clone)]
pub struct FlowInstance<'a> {
    pub host: &'a Graph,
    pub caps: Vec<i64>,
    pub source: Vec<i64>,
    pub sink: Vec<i64>,
    pub h: u64,
}

impl<'a> FlowInstance<'a> {
    pub fn new(host: &'a Graph, cap_scale: i64, source: Vec<i64>, sink: Vec<i64>, h: u64) -> Self {
        let caps = host
            .edges()
            .iter()
            .map(|e| e.cap as i64 * cap_scale)
            .collect();
        FlowInstance {
            host,
            caps,
            source,
            sink,
            h,
        }
    }
}

#[derive(Debug, Clone)]
pub enum FlowResult {
    Feasible(PreflowState),
    Stuck(PreflowState),
}

impl FlowResult {
    pub fn state(&self) -> &PreflowState {
        match self {
            FlowResult::Feasible(s) | FlowResult::Stuck(s) => s,
        }
    }
    pub fn is_feasible(&self) -> bool {
        matches!(self, FlowResult::Feasible(_))
    }
}

/// h = ceil(100 * kappa * log2(nW) / phi).
pub fn default_height(n: usize, w: u64, kappa: u64, phi: f64) -> u64 {
    let lg = ((n.max(2) as f64) * w as f64).log2();
    (100.0 * kappa as f64 * lg / phi).ceil() as u64
}

pub fn push_relabel_bounded(inst: &FlowInstance, gap: bool) -> FlowResult {
    let mut st = PreflowState::new(
        inst.host,
        inst.caps.clone(),
        inst.source.clone(),
        inst.sink.clone(),
        inst.h,
        gap,
    );
    st.push_relabel();
    if st.has_positive_excess() {
        FlowResult::Stuck(st)
    } else {
        FlowResult::Feasible(st)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCut {
    /// The returned side S.
    pub side: Vec<bool>,
    pub k: u64,
    /// True when S = L_{>=k}; false when S = L_{<k}.
    pub upper: bool,
    /// 2 * min(b(S), b(rest)): source to discard so the rest is feasible.
    pub extra_source: u128,
}

/// Capacity of live edges between levels k and k-1, both directions.
fn consecutive_boundary(st: &PreflowState, k: u64) -> i64 {
    let mut tot = 0;
    for e in 0..st.caps().len() {
        let (u, v) = st.endpoints(e);
        if !st.is_active(u) || !st.is_active(v) {
            continue;
        }
        let (a, b) = (st.level(u), st.level(v));
        if (a == k && b + 1 == k) || (b == k && a + 1 == k) {
            tot += st.caps()[e];
        }
    }
    tot
}

/// First level k (scanning h..1) with δ_con(L≥k) ≤ min(b(L≥k), b(L<k)) / 10,
/// as (k, L≥k, b(L≥k), b(L<k)).
fn first_sparse_level(st: &PreflowState, b: &[i64]) -> Option<(u64, Vec<bool>, i128, i128)> {
    let n = st.n();
    let mut occupied: Vec<u64> = (0..n)
        .filter(|&v| st.is_active(v))
        .map(|v| st.level(v))
        .collect();
    occupied.sort_unstable();
    occupied.dedup();
    let total: i128 = (0..n)
        .filter(|&v| st.is_active(v))
        .map(|v| b[v] as i128)
        .sum();
    // L≥k only changes at occupied levels; between them δ_con is 0 unless
    // k and k-1 are both occupied, so candidates are occupied levels and
    // the level just above each occupied one.
    let mut cands: Vec<u64> = Vec::new();
    for &l in &occupied {
        if l >= 1 {
            cands.push(l);
        }
        if l < st.h() {
            cands.push(l + 1);
        }
    }
    cands.sort_unstable_by(|a, b| b.cmp(a));
    cands.dedup();
    for k in cands {
        let upper: Vec<bool> = (0..n)
            .map(|v| st.is_active(v) && st.level(v) >= k)
            .collect();
        let bu: i128 = (0..n).filter(|&v| upper[v]).map(|v| b[v] as i128).sum();
        let bl = total - bu;
        let has_lower = (0..n).any(|v| st.is_active(v) && st.level(v) < k);
        let has_upper = upper.iter().any(|&x| x);
        if !has_lower || !has_upper {
            continue;
        }
        let dc = consecutive_boundary(st, k) as i128;
        if 10 * dc <= bu.min(bl) {
            return Some((k, upper, bu, bl));
        }
    }
    None
}

/// Scans k = h..1 for the first level with δ_con(L≥k) ≤ min(b(L≥k), b(L<k)) / 10
/// (b in flow units), then returns the side with b(S) ≤ 2b(V)/3. The caller
/// verifies the sparsity of the side it receives.
pub fn extract_sparse_level_cut(st: &PreflowState, b: &[i64]) -> Result<LevelCut> {
    if !st.has_positive_excess() {
        return Err(Error::Contract(
            "level cut requested from a feasible state".into(),
        ));
    }
    let (k, upper, bu, bl) = first_sparse_level(st, b).ok_or_else(|| {
        Error::Contract("no level satisfies the sparse consecutive-level condition".into())
    })?;
    let take_upper = 3 * bu <= 2 * (bu + bl);
    let side: Vec<bool> = (0..st.n())
        .map(|v| st.is_active(v) && (upper[v] == take_upper))
        .collect();
    Ok(LevelCut {
        side,
        k,
        upper: take_upper,
        extra_source: 2 * bu.min(bl) as u128,
    })
}

/// Like `extract_sparse_level_cut` but always returns the upper set L≥k.
/// When no level qualifies, falls back to the highest occupied level that
/// leaves something below it, then to the vertices that cannot drain into
/// any sink with room. None when neither yields a proper subset.
pub fn extract_upper_level_cut(st: &PreflowState, b: &[i64]) -> Result<Option<(LevelCut, bool)>> {
    if !st.has_positive_excess() {
        return Err(Error::Contract(
            "level cut requested from a feasible state".into(),
        ));
    }
    let n = st.n();
    if let Some((k, upper, bu, bl)) = first_sparse_level(st, b) {
        return Ok(Some((
            LevelCut {
                side: upper,
                k,
                upper: true,
                extra_source: 2 * bu.min(bl) as u128,
            },
            false,
        )));
    }
    let act: Vec<usize> = (0..n).filter(|&v| st.is_active(v)).collect();
    let top = act.iter().map(|&v| st.level(v)).max().unwrap_or(0);
    if act.iter().all(|&v| st.level(v) == top) {
        return Ok(undrainable_side(st).map(|side| {
            let bu: i128 = act
                .iter()
                .filter(|&&v| side[v])
                .map(|&v| b[v] as i128)
                .sum();
            let bl: i128 = act
                .iter()
                .filter(|&&v| !side[v])
                .map(|&v| b[v] as i128)
                .sum();
            (
                LevelCut {
                    side,
                    k: top,
                    upper: true,
                    extra_source: 2 * bu.min(bl) as u128,
                },
                true,
            )
        }));
    }
    let side: Vec<bool> = (0..n)
        .map(|v| st.is_active(v) && st.level(v) >= top)
        .collect();
    let bu: i128 = act
        .iter()
        .filter(|&&v| side[v])
        .map(|&v| b[v] as i128)
        .sum();
    let bl: i128 = act
        .iter()
        .filter(|&&v| !side[v])
        .map(|&v| b[v] as i128)
        .sum();
    Ok(Some((
        LevelCut {
            side,
            k: top,
            upper: true,
            extra_source: 2 * bu.min(bl) as u128,
        },
        true,
    )))
}

/// Active vertices with no residual path to a sink that still has room.
/// None unless that set is a nonempty proper subset of the active vertices.
fn undrainable_side(st: &PreflowState) -> Option<Vec<bool>> {
    let n = st.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in 0..st.caps().len() {
        let (u, v) = st.endpoints(e);
        if st.is_active(u) && st.is_active(v) {
            adj[u].push((e, v));
            adj[v].push((e, u));
        }
    }
    // reverse search from vertices with spare sink capacity
    let mut reach = vec![false; n];
    let mut stack: Vec<usize> = (0..n)
        .filter(|&v| st.is_active(v) && st.available(v) < st.sink()[v])
        .collect();
    for &v in &stack {
        reach[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &(e, u) in &adj[v] {
            if !reach[u] && st.residual_from(e, u) > 0 {
                reach[u] = true;
                stack.push(u);
            }
        }
    }
    let side: Vec<bool> = (0..n).map(|v| st.is_active(v) && !reach[v]).collect();
    let k = side.iter().filter(|&&x| x).count();
    let live = (0..n).filter(|&v| st.is_active(v)).count();
    (k > 0 && k < live).then_some(side)
}

/// min(δ out, δ in) of `side` over live edges with the state's scaled capacities.
pub fn scaled_boundary(st: &PreflowState, side: &[bool]) -> (i64, i64) {
    let (mut out, mut inn) = (0, 0);
    for e in 0..st.caps().len() {
        let (u, v) = st.endpoints(e);
        if !st.is_active(u) || !st.is_active(v) {
            continue;
        }
        match (side[u], side[v]) {
            (true, false) => out += st.caps()[e],
            (false, true) => inn += st.caps()[e],
            _ => {}
        }
    }
    (out, inn)
}

/// Exact max flow; returns the flow and the source side of a min cut.
pub fn exact_max_flow(inst: &FlowInstance) -> MaxFlow {
    max_flow(inst.host, &inst.caps, &inst.source, &inst.sink)
}
