//! Directed capacitated multigraphs, vertex weightings and exact cut arithmetic.

use crate::error::{Error, Result};
use crate::rational::Q;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub cap: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    w: u64,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph; `w` is raised to the largest capacity if needed.
    pub fn new(n: usize, edges: Vec<Edge>, w: u64) -> Result<Graph> {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut wmax = w.max(1);
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::Input(format!(
                    "edge {i} references a vertex outside 0..{n}"
                )));
            }
            if e.tail == e.head {
                return Err(Error::Input(format!("edge {i} is a self-loop")));
            }
            if e.cap == 0 {
                return Err(Error::Input(format!("edge {i} has zero capacity")));
            }
            wmax = wmax.max(e.cap);
            out_adj[e.tail].push(i);
            in_adj[e.head].push(i);
        }
        Ok(Graph {
            n,
            edges,
            w: wmax,
            out_adj,
            in_adj,
        })
    }

    pub fn from_triples(n: usize, triples: &[(usize, usize, u64)]) -> Result<Graph> {
        let edges = triples
            .iter()
            .map(|&(tail, head, cap)| Edge { tail, head, cap })
            .collect();
        Graph::new(n, edges, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.edges.len()
    }
    pub fn w(&self) -> u64 {
        self.w
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// Weighted degree, both directions.
    pub fn degree(&self, v: usize) -> u64 {
        self.out_adj[v]
            .iter()
            .chain(&self.in_adj[v])
            .map(|&e| self.edges[e].cap)
            .sum()
    }

    pub fn degree_checked(&self, v: usize) -> Result<u64> {
        if v >= self.n {
            return Err(Error::Input(format!("unknown vertex {v}")));
        }
        Ok(self.degree(v))
    }

    pub fn unweighted_degree(&self, v: usize) -> u64 {
        (self.out_adj[v].len() + self.in_adj[v].len()) as u64
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn total_capacity(&self) -> u64 {
        self.edges.iter().map(|e| e.cap).sum()
    }

    /// Capacity of edges with tail in `s` and head in `t`.
    pub fn cut_capacity(&self, s: &[usize], t: &[usize]) -> u64 {
        let ms = mask(self.n, s);
        let mt = mask(self.n, t);
        self.cut_capacity_mask(&ms, &mt)
    }

    pub fn cut_capacity_mask(&self, s: &[bool], t: &[bool]) -> u64 {
        self.edges
            .iter()
            .filter(|e| s[e.tail] && t[e.head])
            .map(|e| e.cap)
            .sum()
    }

    /// (out, in) capacity across the boundary of `s` inside `host`.
    pub fn boundary_in_host(&self, s: &[bool], host: &[bool]) -> (u64, u64) {
        let mut out = 0;
        let mut inn = 0;
        for e in &self.edges {
            if !host[e.tail] || !host[e.head] {
                continue;
            }
            match (s[e.tail], s[e.head]) {
                (true, false) => out += e.cap,
                (false, true) => inn += e.cap,
                _ => {}
            }
        }
        (out, inn)
    }

    pub fn conductance(&self, d: &Weighting, s: &[usize]) -> Result<Q> {
        let ms = mask(self.n, s);
        let host = vec![true; self.n];
        conductance_in_host(self, d, &ms, &host)
    }

    pub fn reverse(&self) -> Graph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                tail: e.head,
                head: e.tail,
                cap: e.cap,
            })
            .collect();
        Graph::new(self.n, edges, self.w).expect("reversal keeps validity")
    }

    /// Induced subgraph on `s` (listed order defines the new ids).
    pub fn induced(&self, s: &[usize]) -> Subgraph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in s.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        let mut edge_to_parent = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (local[e.tail], local[e.head]);
            if a != usize::MAX && b != usize::MAX {
                edges.push(Edge {
                    tail: a,
                    head: b,
                    cap: e.cap,
                });
                edge_to_parent.push(i);
            }
        }
        Subgraph {
            graph: Graph::new(s.len(), edges, self.w).expect("induced keeps validity"),
            to_parent: s.to_vec(),
            edge_to_parent,
        }
    }

    /// d(v) = deg(v) + udeg(v) * deg(V) / 2m, carried with denominator 2m.
    pub fn regularized_weighting(&self) -> Result<Weighting> {
        if self.edges.is_empty() {
            return Err(Error::Input(
                "regularized weighting of an edgeless graph".into(),
            ));
        }
        let two_m = 2 * self.edges.len() as u64;
        let vol = 2 * self.total_capacity();
        let num = (0..self.n)
            .map(|v| two_m * self.degree(v) + self.unweighted_degree(v) * vol)
            .collect();
        Ok(Weighting { num, den: two_m })
    }

    pub fn degree_weighting(&self) -> Weighting {
        Weighting {
            num: self.degrees(),
            den: 1,
        }
    }

    /// Strongly connected components in topological order of the condensation.
    pub fn sccs_topological(&self) -> Vec<Vec<usize>> {
        use petgraph::graph::DiGraph;
        let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(self.n, self.edges.len());
        let nodes: Vec<_> = (0..self.n).map(|_| pg.add_node(())).collect();
        for e in &self.edges {
            pg.add_edge(nodes[e.tail], nodes[e.head], ());
        }
        let mut comps: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&pg)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        // tarjan emits reverse topological order
        comps.reverse();
        comps
    }
}

#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub to_parent: Vec<usize>,
    pub edge_to_parent: Vec<usize>,
}

/// Vertex weighting d(v) = num[v] / den.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weighting {
    pub num: Vec<u64>,
    pub den: u64,
}

impl Weighting {
    pub fn value(&self, v: usize) -> Q {
        Q::new(self.num[v] as i128, self.den as i128)
    }
    pub fn sum_mask(&self, s: &[bool]) -> u128 {
        self.num
            .iter()
            .zip(s)
            .filter(|(_, &b)| b)
            .map(|(&x, _)| x as u128)
            .sum()
    }
    pub fn sum(&self, s: &[usize]) -> u128 {
        s.iter().map(|&v| self.num[v] as u128).sum()
    }
    pub fn total(&self) -> u128 {
        self.num.iter().map(|&x| x as u128).sum()
    }
    pub fn support(&self) -> Vec<usize> {
        (0..self.num.len()).filter(|&v| self.num[v] > 0).collect()
    }
    pub fn restrict(&self, vs: &[usize]) -> Weighting {
        Weighting {
            num: vs.iter().map(|&v| self.num[v]).collect(),
            den: self.den,
        }
    }
}

pub fn mask(n: usize, s: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in s {
        m[v] = true;
    }
    m
}

pub fn members(m: &[bool]) -> Vec<usize> {
    (0..m.len()).filter(|&v| m[v]).collect()
}

/// Conductance of `s` inside the subgraph induced by `host`.
pub fn conductance_in_host(g: &Graph, d: &Weighting, s: &[bool], host: &[bool]) -> Result<Q> {
    let inside = (0..g.n()).filter(|&v| host[v] && s[v]).count();
    let outside = (0..g.n()).filter(|&v| host[v] && !s[v]).count();
    if inside == 0 || outside == 0 {
        return Err(Error::DegenerateCut("one side of the cut is empty".into()));
    }
    if (0..g.n()).any(|v| s[v] && !host[v]) {
        return Err(Error::DegenerateCut("cut leaves the host".into()));
    }
    let (out, inn) = g.boundary_in_host(s, host);
    let rest: Vec<bool> = (0..g.n()).map(|v| host[v] && !s[v]).collect();
    let vol = d.sum_mask(s).min(d.sum_mask(&rest));
    if vol == 0 {
        return Err(Error::ZeroWeight("a side has zero weight".into()));
    }
    Ok(Q::new(out.min(inn) as i128 * d.den as i128, vol as i128))
}

/// Cross-multiplied check min(δ) ≤ bound · min(d(S), d(host∖S)); never divides.
pub fn sparsity_at_most(g: &Graph, d: &Weighting, s: &[bool], host: &[bool], bound: Q) -> bool {
    let (out, inn) = g.boundary_in_host(s, host);
    let rest: Vec<bool> = (0..g.n()).map(|v| host[v] && !s[v]).collect();
    let vol = d.sum_mask(s).min(d.sum_mask(&rest)) as i128;
    let lhs = out.min(inn) as i128 * d.den as i128 * *bound.denom();
    lhs <= *bound.numer() * vol
}

/// Parses `tail head cap` lines with an optional `p n m` header and `#` comments.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut triples = Vec::new();
    let mut max_id = None::<usize>;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::InputLine {
            line: line_no,
            msg: msg.to_string(),
        };
        if toks[0] == "p" {
            if header.is_some() || !triples.is_empty() {
                return Err(bad("header must appear once, before edges"));
            }
            if toks.len() != 3 {
                return Err(bad("header must be `p <n> <m>`"));
            }
            let n = toks[1].parse().map_err(|_| bad("bad vertex count"))?;
            let m = toks[2].parse().map_err(|_| bad("bad edge count"))?;
            header = Some((n, m, line_no));
            continue;
        }
        if toks.len() != 3 {
            return Err(bad("expected `tail head capacity`"));
        }
        let tail: usize = toks[0].parse().map_err(|_| bad("bad tail id"))?;
        let head: usize = toks[1].parse().map_err(|_| bad("bad head id"))?;
        let cap: u64 = toks[2].parse().map_err(|_| bad("bad capacity"))?;
        if cap == 0 {
            return Err(bad("capacity must be positive"));
        }
        if tail == head {
            return Err(bad("self-loop"));
        }
        if let Some((n, _, _)) = header {
            if tail >= n || head >= n {
                return Err(bad("vertex id out of range"));
            }
        }
        max_id = Some(max_id.map_or(tail.max(head), |x| x.max(tail).max(head)));
        triples.push((tail, head, cap));
    }
    let n = match header {
        Some((n, m, line)) => {
            if m != triples.len() {
                return Err(Error::InputLine {
                    line,
                    msg: format!("header declares {m} edges, found {}", triples.len()),
                });
            }
            n
        }
        None => max_id.map_or(0, |x| x + 1),
    };
    Graph::from_triples(n, &triples)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("p {} {}\n", g.n(), g.m());
    for e in g.edges() {
        s.push_str(&format!("{} {} {}\n", e.tail, e.head, e.cap));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> Graph {
        Graph::from_triples(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap()
    }

    #[test]
    fn degrees() {
        let g = cycle3();
        assert!((0..3).all(|v| g.degree(v) == 2));
        let g = Graph::from_triples(3, &[(0, 1, 5)]).unwrap();
        assert_eq!(g.degree(0), 5);
        assert_eq!(g.degree(2), 0);
        assert!(g.degree_checked(7).is_err());
    }

    #[test]
    fn cuts_and_conductance() {
        let g = cycle3();
        assert_eq!(g.cut_capacity(&[0], &[1, 2]), 1);
        let dag = Graph::from_triples(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(dag.cut_capacity(&[1], &[0]), 0);
        let d = g.degree_weighting();
        assert_eq!(g.conductance(&d, &[0]).unwrap(), Q::new(1, 2));
        assert_eq!(g.conductance(&d, &[1, 2]).unwrap(), Q::new(1, 2));
        let dd = dag.degree_weighting();
        assert_eq!(dag.conductance(&dd, &[0]).unwrap(), Q::new(0, 1));
        assert!(matches!(
            g.conductance(&d, &[]),
            Err(Error::DegenerateCut(_))
        ));
        let z = Weighting {
            num: vec![0, 0, 1],
            den: 1,
        };
        assert!(matches!(g.conductance(&z, &[0]), Err(Error::ZeroWeight(_))));
    }

    #[test]
    fn regularized() {
        let g = Graph::from_triples(2, &[(0, 1, 5)]).unwrap();
        let d = g.regularized_weighting().unwrap();
        assert_eq!(d.value(0), Q::from_integer(10));
        let g = cycle3();
        let d = g.regularized_weighting().unwrap();
        for v in 0..3 {
            assert_eq!(d.value(v), Q::from_integer(2 * g.degree(v) as i128));
        }
        assert!(Graph::from_triples(2, &[])
            .unwrap()
            .regularized_weighting()
            .is_err());
    }

    #[test]
    fn induced_and_reverse() {
        let g = cycle3();
        let s = g.induced(&[0, 1]);
        assert_eq!(
            s.graph.edges(),
            &[Edge {
                tail: 0,
                head: 1,
                cap: 1
            }]
        );
        assert_eq!(s.edge_to_parent, vec![0]);
        assert_eq!(g.induced(&[]).graph.n(), 0);
        assert_eq!(g.reverse().reverse(), g);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let g = parse_edge_list("# c\np 3 2\n0 1 2\n1 2 3\n").unwrap();
        assert_eq!((g.n(), g.m(), g.w()), (3, 2, 3));
        match parse_edge_list("0 1 1\n1 1 1\n") {
            Err(Error::InputLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_edge_list("0 1 0").is_err());
        assert!(parse_edge_list("p 2 1\n0 5 1").is_err());
    }

    #[test]
    fn sccs_in_topological_order() {
        let g = Graph::from_triples(4, &[(0, 1, 1), (1, 0, 1), (1, 2, 1), (3, 2, 1)]).unwrap();
        let c = g.sccs_topological();
        let pos = |v: usize| c.iter().position(|x| x.contains(&v)).unwrap();
        for e in g.edges() {
            assert!(pos(e.tail) <= pos(e.head));
        }
        assert_eq!(c.len(), 3);
    }
}
