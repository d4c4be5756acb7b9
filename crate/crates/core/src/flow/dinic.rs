//! Blocking-flow max flow with vertex sources and sinks.

use crate::graph::Graph;
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: i64,
    /// Flow per host edge.
    pub flow: Vec<i64>,
    /// Source mass routed out of each vertex.
    pub routed: Vec<i64>,
    /// Sink mass absorbed at each vertex.
    pub absorbed: Vec<i64>,
    /// Vertices reachable from the super source in the residual graph.
    pub source_side: Vec<bool>,
}

struct Net {
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Net {
    fn add(&mut self, a: usize, b: usize, c: i64) -> usize {
        let id = self.to.len();
        self.to.push(b);
        self.cap.push(c);
        self.adj[a].push(id);
        self.to.push(a);
        self.cap.push(0);
        self.adj[b].push(id + 1);
        id
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        level.iter_mut().for_each(|l| *l = -1);
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let v = self.to[a];
                if self.cap[a] > 0 && level[v] < 0 {
                    level[v] = level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64, level: &[i32], it: &mut [usize]) -> i64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let a = self.adj[u][it[u]];
            let v = self.to[a];
            if self.cap[a] > 0 && level[v] == level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[a]), level, it);
                if got > 0 {
                    self.cap[a] -= got;
                    self.cap[a ^ 1] += got;
                    return got;
                }
            }
            it[u] += 1;
        }
        0
    }
}

/// Max flow from sources `delta` to sinks `sink` over `caps` on `g`.
pub fn max_flow(g: &Graph, caps: &[i64], delta: &[i64], sink: &[i64]) -> MaxFlow {
    let n = g.n();
    let (s, t) = (n, n + 1);
    let mut net = Net {
        to: Vec::new(),
        cap: Vec::new(),
        adj: vec![Vec::new(); n + 2],
    };
    let edge_arc: Vec<usize> = g
        .edges()
        .iter()
        .zip(caps)
        .map(|(e, &c)| net.add(e.tail, e.head, c))
        .collect();
    let src_arc: Vec<usize> = (0..n).map(|v| net.add(s, v, delta[v])).collect();
    let snk_arc: Vec<usize> = (0..n).map(|v| net.add(v, t, sink[v])).collect();
    let mut level = vec![-1; n + 2];
    let mut value = 0;
    while net.bfs(s, t, &mut level) {
        let mut it = vec![0; n + 2];
        loop {
            let got = net.dfs(s, t, i64::MAX, &level, &mut it);
            if got == 0 {
                break;
            }
            value += got;
        }
    }
    net.bfs(s, t, &mut level);
    MaxFlow {
        value,
        flow: edge_arc.iter().map(|&a| net.cap[a ^ 1]).collect(),
        routed: src_arc.iter().map(|&a| net.cap[a ^ 1]).collect(),
        absorbed: snk_arc.iter().map(|&a| net.cap[a ^ 1]).collect(),
        source_side: (0..n).map(|v| level[v] >= 0).collect(),
    }
}
