//! Link-cut forest with additive edge weights and a secondary 0/1 mark,
//! a naive reference forest, and transcript replay.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const NIL: usize = usize::MAX;
const INF: i64 = i64::MAX;

/// Operations shared by the splay-based forest and the naive reference.
/// Each non-root node carries the weight and mark of the edge to its parent.
pub trait Forest {
    fn len(&self) -> usize;
    fn link(&mut self, u: usize, v: usize, edge: usize, w: i64, mark: u8) -> Result<()>;
    /// Removes the edge from `u` to its parent and returns its edge id.
    fn cut(&mut self, u: usize) -> Result<usize>;
    fn find_root(&mut self, u: usize) -> usize;
    fn add(&mut self, u: usize, delta: i64);
    /// Minimum-weight edge on the root path as (edge, weight, child node); ties toward the root.
    fn find_min(&mut self, u: usize) -> Option<(usize, i64, usize)>;
    fn find_min_secondary(&mut self, u: usize) -> Option<(usize, u8)>;
    fn parent_edge(&mut self, u: usize) -> Option<usize>;
    /// Edge ids from `u` up to the root.
    fn path_edges(&mut self, u: usize) -> Vec<usize>;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct LinkCutForest {
    ch: Vec<[usize; 2]>,
    par: Vec<usize>,
    val: Vec<i64>,
    lazy: Vec<i64>,
    has_edge: Vec<bool>,
    edge: Vec<usize>,
    mark: Vec<u8>,
    agg: Vec<(i64, usize)>,
    agg_mark: Vec<(u8, usize)>,
}

impl LinkCutForest {
    pub fn new(n: usize) -> Self {
        LinkCutForest {
            ch: vec![[NIL, NIL]; n],
            par: vec![NIL; n],
            val: vec![0; n],
            lazy: vec![0; n],
            has_edge: vec![false; n],
            edge: vec![NIL; n],
            mark: vec![1; n],
            agg: vec![(INF, NIL); n],
            agg_mark: vec![(u8::MAX, NIL); n],
        }
    }

    fn is_splay_root(&self, x: usize) -> bool {
        let p = self.par[x];
        p == NIL || (self.ch[p][0] != x && self.ch[p][1] != x)
    }

    fn apply(&mut self, x: usize, d: i64) {
        if x == NIL {
            return;
        }
        if self.has_edge[x] {
            self.val[x] += d;
        }
        if self.agg[x].0 != INF {
            self.agg[x].0 += d;
        }
        self.lazy[x] += d;
    }

    fn push(&mut self, x: usize) {
        let d = self.lazy[x];
        if d != 0 {
            let [l, r] = self.ch[x];
            self.apply(l, d);
            self.apply(r, d);
            self.lazy[x] = 0;
        }
    }

    fn update(&mut self, x: usize) {
        let [l, r] = self.ch[x];
        // in-order: left is closer to the root, so it wins ties
        let mut best = if l != NIL { self.agg[l] } else { (INF, NIL) };
        if self.has_edge[x] && self.val[x] < best.0 {
            best = (self.val[x], x);
        }
        if r != NIL && self.agg[r].0 < best.0 {
            best = self.agg[r];
        }
        self.agg[x] = best;
        let mut bm = if l != NIL {
            self.agg_mark[l]
        } else {
            (u8::MAX, NIL)
        };
        if self.has_edge[x] && self.mark[x] < bm.0 {
            bm = (self.mark[x], x);
        }
        if r != NIL && self.agg_mark[r].0 < bm.0 {
            bm = self.agg_mark[r];
        }
        self.agg_mark[x] = bm;
    }

    fn rotate(&mut self, x: usize) {
        let p = self.par[x];
        let g = self.par[p];
        let dir = usize::from(self.ch[p][1] == x);
        let b = self.ch[x][dir ^ 1];
        if !self.is_splay_root(p) {
            let pd = usize::from(self.ch[g][1] == p);
            self.ch[g][pd] = x;
        }
        self.par[x] = g;
        self.ch[x][dir ^ 1] = p;
        self.par[p] = x;
        self.ch[p][dir] = b;
        if b != NIL {
            self.par[b] = p;
        }
        self.update(p);
        self.update(x);
    }

    fn splay(&mut self, x: usize) {
        let mut stack = vec![x];
        let mut y = x;
        while !self.is_splay_root(y) {
            y = self.par[y];
            stack.push(y);
        }
        while let Some(z) = stack.pop() {
            self.push(z);
        }
        while !self.is_splay_root(x) {
            let p = self.par[x];
            if !self.is_splay_root(p) {
                let g = self.par[p];
                let zigzig = (self.ch[g][0] == p) == (self.ch[p][0] == x);
                if zigzig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x;
        while y != NIL {
            self.splay(y);
            self.ch[y][1] = last;
            self.update(y);
            last = y;
            y = self.par[y];
        }
        self.splay(x);
    }

    fn inorder(&mut self, x: usize, out: &mut Vec<usize>) {
        if x == NIL {
            return;
        }
        self.push(x);
        let [l, r] = self.ch[x];
        self.inorder(l, out);
        out.push(x);
        self.inorder(r, out);
    }
}

impl Forest for LinkCutForest {
    fn len(&self) -> usize {
        self.par.len()
    }

    fn link(&mut self, u: usize, v: usize, edge: usize, w: i64, mark: u8) -> Result<()> {
        if u >= self.len() || v >= self.len() {
            return Err(Error::Contract("link: unknown node".into()));
        }
        self.access(u);
        if self.ch[u][0] != NIL {
            return Err(Error::Contract(format!("link: {u} is not a root")));
        }
        if self.find_root(v) == u {
            return Err(Error::Contract(format!("link: {u} and {v} share a tree")));
        }
        self.access(u);
        self.has_edge[u] = true;
        self.val[u] = w;
        self.mark[u] = mark;
        self.edge[u] = edge;
        self.update(u);
        self.par[u] = v;
        Ok(())
    }

    fn cut(&mut self, u: usize) -> Result<usize> {
        self.access(u);
        let l = self.ch[u][0];
        if l == NIL {
            return Err(Error::Contract(format!("cut: {u} has no parent")));
        }
        self.par[l] = NIL;
        self.ch[u][0] = NIL;
        self.has_edge[u] = false;
        let e = self.edge[u];
        self.edge[u] = NIL;
        self.update(u);
        Ok(e)
    }

    fn find_root(&mut self, u: usize) -> usize {
        self.access(u);
        let mut x = u;
        loop {
            self.push(x);
            let l = self.ch[x][0];
            if l == NIL {
                break;
            }
            x = l;
        }
        self.splay(x);
        x
    }

    fn add(&mut self, u: usize, delta: i64) {
        self.access(u);
        self.apply(u, delta);
    }

    fn find_min(&mut self, u: usize) -> Option<(usize, i64, usize)> {
        self.access(u);
        let (w, x) = self.agg[u];
        if x == NIL {
            None
        } else {
            Some((self.edge[x], w, x))
        }
    }

    fn find_min_secondary(&mut self, u: usize) -> Option<(usize, u8)> {
        self.access(u);
        let (m, x) = self.agg_mark[u];
        if x == NIL {
            None
        } else {
            Some((self.edge[x], m))
        }
    }

    fn parent_edge(&mut self, u: usize) -> Option<usize> {
        if self.has_edge[u] {
            Some(self.edge[u])
        } else {
            None
        }
    }

    fn path_edges(&mut self, u: usize) -> Vec<usize> {
        self.access(u);
        let mut nodes = Vec::new();
        self.inorder(u, &mut nodes);
        nodes
            .iter()
            .rev()
            .filter(|&&x| self.has_edge[x])
            .map(|&x| self.edge[x])
            .collect()
    }
}

/// Explicit parent array; O(depth) per operation.
#[derive(Debug, Clone)]
pub struct NaiveForest {
    parent: Vec<Option<(usize, usize, i64, u8)>>,
}

impl NaiveForest {
    pub fn new(n: usize) -> Self {
        NaiveForest {
            parent: vec![None; n],
        }
    }

    pub fn weight(&self, u: usize) -> Option<i64> {
        self.parent[u].map(|p| p.2)
    }
}

impl Forest for NaiveForest {
    fn len(&self) -> usize {
        self.parent.len()
    }

    fn link(&mut self, u: usize, v: usize, edge: usize, w: i64, mark: u8) -> Result<()> {
        if u >= self.len() || v >= self.len() {
            return Err(Error::Contract("link: unknown node".into()));
        }
        if self.parent[u].is_some() {
            return Err(Error::Contract(format!("link: {u} is not a root")));
        }
        if self.find_root(v) == u {
            return Err(Error::Contract(format!("link: {u} and {v} share a tree")));
        }
        self.parent[u] = Some((v, edge, w, mark));
        Ok(())
    }

    fn cut(&mut self, u: usize) -> Result<usize> {
        match self.parent[u].take() {
            Some((_, e, _, _)) => Ok(e),
            None => Err(Error::Contract(format!("cut: {u} has no parent"))),
        }
    }

    fn find_root(&mut self, mut u: usize) -> usize {
        while let Some((p, ..)) = self.parent[u] {
            u = p;
        }
        u
    }

    fn add(&mut self, mut u: usize, delta: i64) {
        while let Some((p, e, w, m)) = self.parent[u] {
            self.parent[u] = Some((p, e, w + delta, m));
            u = p;
        }
    }

    fn find_min(&mut self, mut u: usize) -> Option<(usize, i64, usize)> {
        let mut best: Option<(usize, i64, usize)> = None;
        while let Some((p, e, w, _)) = self.parent[u] {
            if best.is_none_or(|b| w <= b.1) {
                best = Some((e, w, u));
            }
            u = p;
        }
        best
    }

    fn find_min_secondary(&mut self, mut u: usize) -> Option<(usize, u8)> {
        let mut best: Option<(usize, u8)> = None;
        while let Some((p, e, _, m)) = self.parent[u] {
            if best.is_none_or(|b| m <= b.1) {
                best = Some((e, m));
            }
            u = p;
        }
        best
    }

    fn parent_edge(&mut self, u: usize) -> Option<usize> {
        self.parent[u].map(|p| p.1)
    }

    fn path_edges(&mut self, mut u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some((p, e, _, _)) = self.parent[u] {
            out.push(e);
            u = p;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Link {
        child: usize,
        parent: usize,
        edge: usize,
        w: i64,
    },
    Cut {
        child: usize,
        edge: usize,
    },
    Add {
        u: usize,
        delta: i64,
    },
    FindRoot {
        u: usize,
        root: usize,
    },
    FindMin {
        u: usize,
        edge: Option<usize>,
    },
    /// A path from `src` to the current root `dst`; `keep` is false for
    /// mass the caller discards (unabsorbed excess, negative units).
    Emit {
        src: usize,
        dst: usize,
        amount: i64,
        keep: bool,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub n: usize,
    pub ops: Vec<Op>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayedPath {
    pub src: usize,
    pub dst: usize,
    pub amount: i64,
    pub keep: bool,
    pub crosses: bool,
}

/// Re-executes a transcript with secondary mark 0 on `tagged` edges and reports
/// for each emitted path whether it uses a tagged edge.
pub fn replay_crossings(log: &Transcript, tagged: &[bool]) -> Result<Vec<ReplayedPath>> {
    let mut f = LinkCutForest::new(log.n);
    let mut out = Vec::new();
    let check = |c: bool, what: &str| {
        if c {
            Ok(())
        } else {
            Err(Error::Replay(what.to_string()))
        }
    };
    for op in &log.ops {
        match *op {
            Op::Link {
                child,
                parent,
                edge,
                w,
            } => {
                check(child < log.n && parent < log.n, "link node out of range")?;
                let mark = if tagged.get(edge).copied().unwrap_or(false) {
                    0
                } else {
                    1
                };
                check(edge < tagged.len(), "edge id outside the graph")?;
                f.link(child, parent, edge, w, mark)
                    .map_err(|e| Error::Replay(e.to_string()))?;
            }
            Op::Cut { child, edge } => {
                check(child < log.n, "cut node out of range")?;
                check(
                    f.parent_edge(child) == Some(edge),
                    "cut edge is not the recorded parent edge",
                )?;
                f.cut(child).map_err(|e| Error::Replay(e.to_string()))?;
            }
            Op::Add { u, delta } => {
                check(u < log.n, "add node out of range")?;
                f.add(u, delta);
            }
            Op::FindRoot { u, root } => {
                check(u < log.n, "query node out of range")?;
                check(f.find_root(u) == root, "find_root result differs")?;
            }
            Op::FindMin { u, edge } => {
                check(u < log.n, "query node out of range")?;
                check(
                    f.find_min(u).map(|x| x.0) == edge,
                    "find_min result differs",
                )?;
            }
            Op::Emit {
                src,
                dst,
                amount,
                keep,
            } => {
                check(src < log.n, "emit node out of range")?;
                check(
                    f.find_root(src) == dst,
                    "emitted path does not end at the root",
                )?;
                let crosses = matches!(f.find_min_secondary(src), Some((_, 0)));
                out.push(ReplayedPath {
                    src,
                    dst,
                    amount,
                    keep,
                    crosses,
                });
            }
        }
    }
    Ok(out)
}
