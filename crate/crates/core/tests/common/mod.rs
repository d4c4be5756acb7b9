#![allow(dead_code)]

use exdec_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bidirected_clique(k: usize) -> Graph {
    let mut t = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if a != b {
                t.push((a, b, 1));
            }
        }
    }
    Graph::from_triples(k, &t).unwrap()
}

/// Two bidirected k-cliques on 0..k and k..2k joined by one edge each way.
pub fn two_cliques(k: usize, bridge: bool) -> Graph {
    let mut t = Vec::new();
    for off in [0, k] {
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    t.push((off + a, off + b, 1));
                }
            }
        }
    }
    if bridge {
        t.push((0, k, 1));
        t.push((k + 1, 1, 1));
    }
    Graph::from_triples(2 * k, &t).unwrap()
}

pub fn random_graph(r: &mut ChaCha8Rng, n: usize, m: usize, w: u64) -> Graph {
    let mut t = Vec::new();
    while t.len() < m {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            t.push((a, b, r.random_range(1..=w)));
        }
    }
    Graph::from_triples(n, &t).unwrap()
}

/// Random DAG under a random vertex order.
pub fn random_dag(r: &mut ChaCha8Rng, n: usize, m: usize, w: u64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        order.swap(i, j);
    }
    let mut t = Vec::new();
    while t.len() < m {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a < b {
            t.push((order[a], order[b], r.random_range(1..=w)));
        }
    }
    Graph::from_triples(n, &t).unwrap()
}

/// Random graph with a planted strongly connected backbone (a Hamiltonian cycle).
pub fn random_strong(r: &mut ChaCha8Rng, n: usize, m: usize, w: u64) -> Graph {
    let mut t: Vec<(usize, usize, u64)> = (0..n)
        .map(|i| (i, (i + 1) % n, r.random_range(1..=w)))
        .collect();
    while t.len() < m.max(n) {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            t.push((a, b, r.random_range(1..=w)));
        }
    }
    Graph::from_triples(n, &t).unwrap()
}
