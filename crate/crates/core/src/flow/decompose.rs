//! Path decomposition of a flow with vertex supplies and demands, driven by a
//! dynamic forest so that the run can be replayed from its transcript.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linkcut::{Forest, LinkCutForest, NaiveForest, Op, Transcript};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowPath {
    pub src: usize,
    pub dst: usize,
    pub amount: i64,
    pub keep: bool,
}

/// Supplies and demands, each split into a kept bucket and a discarded bucket.
/// Buckets are consumed kept-first; a path is kept iff both of its ends are.
#[derive(Debug, Clone, Default)]
pub struct Terminals {
    pub supply: Vec<i64>,
    pub supply_drop: Vec<i64>,
    pub demand: Vec<i64>,
    pub demand_drop: Vec<i64>,
}

impl Terminals {
    pub fn simple(supply: Vec<i64>, demand: Vec<i64>) -> Self {
        let n = supply.len();
        Terminals {
            supply,
            supply_drop: vec![0; n],
            demand,
            demand_drop: vec![0; n],
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub paths: Vec<FlowPath>,
    pub transcript: Transcript,
    /// Edge ids per path (source to sink), present when requested.
    #[serde(skip)]
    pub explicit: Option<Vec<Vec<usize>>>,
}

impl PathDecomposition {
    /// Per-edge load of the paths selected by `pick`; needs explicit paths.
    pub fn loads(&self, m: usize, pick: impl Fn(&FlowPath) -> bool) -> Option<Vec<i64>> {
        let ex = self.explicit.as_ref()?;
        let mut load = vec![0; m];
        for (p, es) in self.paths.iter().zip(ex) {
            if pick(p) {
                for &e in es {
                    load[e] += p.amount;
                }
            }
        }
        Some(load)
    }
}

pub fn decompose_flow(
    g: &Graph,
    flow: &[i64],
    terms: &Terminals,
    explicit: bool,
) -> Result<PathDecomposition> {
    let mut f = LinkCutForest::new(g.n());
    run(&mut f, g, flow, terms, explicit)
}

/// Same procedure on the naive forest; used as a differential reference.
pub fn decompose_flow_naive(
    g: &Graph,
    flow: &[i64],
    terms: &Terminals,
    explicit: bool,
) -> Result<PathDecomposition> {
    let mut f = NaiveForest::new(g.n());
    run(&mut f, g, flow, terms, explicit)
}

fn run<F: Forest>(
    forest: &mut F,
    g: &Graph,
    flow: &[i64],
    t: &Terminals,
    explicit: bool,
) -> Result<PathDecomposition> {
    let n = g.n();
    if flow.len() != g.m() {
        return Err(Error::Input("flow length differs from edge count".into()));
    }
    let mut net = vec![0i64; n];
    for (e, &x) in g.edges().iter().zip(flow) {
        if x < 0 {
            return Err(Error::Input("negative edge flow".into()));
        }
        net[e.tail] += x;
        net[e.head] -= x;
    }
    for v in 0..n {
        let want = t.supply[v] + t.supply_drop[v] - t.demand[v] - t.demand_drop[v];
        if net[v] != want {
            return Err(Error::Input(format!(
                "flow violates conservation at vertex {v}"
            )));
        }
        if t.supply[v] < 0 || t.supply_drop[v] < 0 || t.demand[v] < 0 || t.demand_drop[v] < 0 {
            return Err(Error::Input(format!(
                "negative terminal amount at vertex {v}"
            )));
        }
    }
    let mut rem: Vec<i64> = flow.to_vec();
    let mut in_tree = vec![false; g.m()];
    let mut cur = vec![0usize; n];
    let mut sup = [t.supply.clone(), t.supply_drop.clone()];
    let mut dem = [t.demand.clone(), t.demand_drop.clone()];
    let mut log = Transcript { n, ops: Vec::new() };
    let mut paths = Vec::new();
    let mut edges_out = Vec::new();

    fn clear_zeros<F: Forest>(forest: &mut F, from: usize, log: &mut Transcript) {
        while let Some((e, w, node)) = forest.find_min(from) {
            if w != 0 {
                break;
            }
            forest.cut(node).expect("zero edge is a tree edge");
            log.ops.push(Op::Cut {
                child: node,
                edge: e,
            });
        }
    }

    for s in 0..n {
        loop {
            let sb = if sup[0][s] > 0 {
                0
            } else if sup[1][s] > 0 {
                1
            } else {
                break;
            };
            let r = forest.find_root(s);
            log.ops.push(Op::FindRoot { u: s, root: r });
            let db = if dem[0][r] > 0 {
                Some(0)
            } else if dem[1][r] > 0 {
                Some(1)
            } else {
                None
            };
            if let Some(db) = db {
                let mut amt = sup[sb][s].min(dem[db][r]);
                let fm = forest.find_min(s);
                log.ops.push(Op::FindMin {
                    u: s,
                    edge: fm.map(|x| x.0),
                });
                if let Some((_, w, _)) = fm {
                    amt = amt.min(w);
                }
                debug_assert!(amt > 0);
                if explicit {
                    edges_out.push(forest.path_edges(s));
                }
                let keep = sb == 0 && db == 0;
                log.ops.push(Op::Emit {
                    src: s,
                    dst: r,
                    amount: amt,
                    keep,
                });
                paths.push(FlowPath {
                    src: s,
                    dst: r,
                    amount: amt,
                    keep,
                });
                sup[sb][s] -= amt;
                dem[db][r] -= amt;
                if s != r {
                    forest.add(s, -amt);
                    log.ops.push(Op::Add { u: s, delta: -amt });
                    clear_zeros(forest, s, &mut log);
                }
                continue;
            }
            // extend the root along its next edge with remaining flow
            let outs = g.out_edges(r);
            while cur[r] < outs.len() && (in_tree[outs[cur[r]]] || rem[outs[cur[r]]] == 0) {
                cur[r] += 1;
            }
            if cur[r] == outs.len() {
                return Err(Error::Input(format!(
                    "flow violates conservation near vertex {r}"
                )));
            }
            let e = outs[cur[r]];
            let w = g.edge(e).head;
            let wr = forest.find_root(w);
            log.ops.push(Op::FindRoot { u: w, root: wr });
            if wr == r {
                // cycle w -> .. -> r -> w: cancel it
                let fm = forest.find_min(w);
                log.ops.push(Op::FindMin {
                    u: w,
                    edge: fm.map(|x| x.0),
                });
                let amt = fm.map_or(rem[e], |x| x.1.min(rem[e]));
                rem[e] -= amt;
                if w != r {
                    forest.add(w, -amt);
                    log.ops.push(Op::Add { u: w, delta: -amt });
                    clear_zeros(forest, w, &mut log);
                }
            } else {
                forest.link(r, w, e, rem[e], 1)?;
                log.ops.push(Op::Link {
                    child: r,
                    parent: w,
                    edge: e,
                    w: rem[e],
                });
                in_tree[e] = true;
                rem[e] = 0;
            }
        }
    }
    Ok(PathDecomposition {
        paths,
        transcript: log,
        explicit: explicit.then_some(edges_out),
    })
}
