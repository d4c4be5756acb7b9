//! Expansion witness built from the matching rounds, with crossing sources
//! computed by transcript replay.

use crate::error::{Error, Result};
use crate::linkcut::{replay_crossings, Op, Transcript};
use crate::oracle;
use crate::rational::Q;
use serde::{Deserialize, Serialize};

/// One path decomposition that contributed witness edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessRound {
    pub round: usize,
    /// Local vertex -> scope vertex.
    pub to_parent: Vec<usize>,
    /// Local edge -> scope edge.
    pub edge_to_parent: Vec<usize>,
    /// Paths were computed on the reversed graph; witness edges point the other way.
    pub reversed: bool,
    pub transcript: Transcript,
    /// Scope vertices whose paths this round were discarded.
    pub excluded: Vec<bool>,
    /// Flow per scope edge, in flow units.
    pub flow: Vec<i64>,
}

impl WitnessRound {
    fn accepts(&self, src: usize, dst: usize, keep: bool) -> bool {
        keep && !self.excluded[self.to_parent[src]] && !self.excluded[self.to_parent[dst]]
    }

    fn oriented(&self, src: usize, dst: usize) -> (usize, usize) {
        let (a, b) = (self.to_parent[src], self.to_parent[dst]);
        if self.reversed {
            (b, a)
        } else {
            (a, b)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEdge {
    pub tail: usize,
    pub head: usize,
    pub cap: i64,
    pub round: usize,
}

/// Capacities and flows are in flow units: a vertex of weight d(v) carries
/// `vertex_unit * d(v)` and an edge of capacity c admits `edge_unit * c` per round.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Witness {
    pub n: usize,
    pub m: usize,
    pub rounds: Vec<WitnessRound>,
    pub vertex_unit: i128,
    pub edge_unit: i128,
}

impl Witness {
    pub fn empty(n: usize, m: usize, vertex_unit: i128, edge_unit: i128) -> Self {
        Witness {
            n,
            m,
            rounds: Vec::new(),
            vertex_unit,
            edge_unit,
        }
    }

    pub fn edges(&self) -> Vec<WitnessEdge> {
        let mut out = Vec::new();
        for r in &self.rounds {
            for op in &r.transcript.ops {
                if let Op::Emit {
                    src,
                    dst,
                    amount,
                    keep,
                } = *op
                {
                    if amount > 0 && r.accepts(src, dst, keep) {
                        let (tail, head) = r.oriented(src, dst);
                        out.push(WitnessEdge {
                            tail,
                            head,
                            cap: amount,
                            round: r.round,
                        });
                    }
                }
            }
        }
        out
    }

    /// (out-degree, in-degree) per scope vertex; self-matches count on both.
    pub fn degrees(&self) -> (Vec<i64>, Vec<i64>) {
        let (mut o, mut i) = (vec![0; self.n], vec![0; self.n]);
        for e in self.edges() {
            o[e.tail] += e.cap;
            i[e.head] += e.cap;
        }
        (o, i)
    }

    /// Total routed flow per scope edge over all rounds; bounds the embedding load.
    pub fn loads(&self) -> Vec<i64> {
        let mut l = vec![0; self.m];
        for r in &self.rounds {
            for (x, y) in l.iter_mut().zip(&r.flow) {
                *x += y;
            }
        }
        l
    }

    /// Adds 100 × capacity to each endpoint in `restrict` of every witness edge
    /// whose path uses a `boundary` edge.
    pub fn crossing_sources(&self, boundary: &[bool], restrict: &[bool]) -> Result<Vec<i64>> {
        if boundary.len() != self.m || restrict.len() != self.n {
            return Err(Error::Contract(
                "boundary or vertex mask has the wrong length".into(),
            ));
        }
        let mut add = vec![0i64; self.n];
        if !boundary.iter().any(|&b| b) {
            return Ok(add);
        }
        for r in &self.rounds {
            let tagged: Vec<bool> = r.edge_to_parent.iter().map(|&e| boundary[e]).collect();
            if !tagged.iter().any(|&b| b) {
                continue;
            }
            for p in replay_crossings(&r.transcript, &tagged)? {
                if p.crosses && p.amount > 0 && r.accepts(p.src, p.dst, p.keep) {
                    let (a, b) = r.oriented(p.src, p.dst);
                    for v in [a, b] {
                        if restrict[v] {
                            add[v] += 100 * p.amount;
                        }
                    }
                }
            }
        }
        Ok(add)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    /// Largest per-edge load over capacity, in units of 1/φ per round.
    pub congestion: Q,
    pub congestion_ok: bool,
    pub degree_ok: bool,
    /// Exhaustive near-expansion check, when the set is small enough.
    pub expansion_ok: Option<bool>,
    pub worst_expansion: Option<Q>,
}

/// Checks per-round congestion, the degree bound `rounds * d(v)` per
/// direction, and for |A| ≤ 14 that A is `target`-nearly expanding in W.
pub fn verify_witness(
    w: &Witness,
    caps: &[u64],
    a: &[usize],
    weights: &[i64],
    target: Q,
) -> WitnessReport {
    let rounds = w.rounds.iter().map(|r| r.round).max().unwrap_or(0) as i128;
    let mut congestion = Q::from_integer(0);
    let mut congestion_ok = true;
    for r in &w.rounds {
        for (e, &f) in r.flow.iter().enumerate() {
            let cap = caps[e] as i128 * w.edge_unit;
            if f as i128 > cap {
                congestion_ok = false;
            }
        }
    }
    for (e, &l) in w.loads().iter().enumerate() {
        let q = Q::new(l as i128, caps[e] as i128 * w.edge_unit);
        if q > congestion {
            congestion = q;
        }
    }
    let (o, i) = w.degrees();
    let degree_ok = (0..w.n).all(|v| {
        let lim = rounds * weights[v] as i128;
        o[v] as i128 <= lim && i[v] as i128 <= lim
    });
    let (expansion_ok, worst_expansion) = if a.len() <= 14 {
        let edges: Vec<(usize, usize, i128)> = w
            .edges()
            .iter()
            .map(|e| (e.tail, e.head, e.cap as i128))
            .collect();
        let wt: Vec<i128> = weights.iter().map(|&x| x as i128).collect();
        match oracle::worst_near_expansion(w.n, &edges, &wt, a) {
            Ok(Some((q, _))) => (Some(q >= target), Some(q)),
            Ok(None) => (Some(true), None),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    WitnessReport {
        congestion,
        congestion_ok,
        degree_ok,
        expansion_ok,
        worst_expansion,
    }
}
