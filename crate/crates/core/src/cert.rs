//! Sparse-cut certificates checked in exact arithmetic.

use crate::graph::{mask, sparsity_at_most, Graph, Weighting};
use crate::rational::{fmt_q, Q};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    /// A strongly connected component split off the rest; one direction is empty.
    Component,
    /// Min cut of a matching flow problem.
    Matching,
    /// Level cut of a bounded-height matching flow problem.
    LevelCut,
    /// Second cut of a round, taken after the first was removed.
    Reconciled,
    /// Min cut of a grafting flow problem.
    Grafting,
    /// Level cut found while trimming.
    Trim,
}

impl CutKind {
    pub fn name(self) -> &'static str {
        match self {
            CutKind::Component => "component",
            CutKind::Matching => "matching",
            CutKind::LevelCut => "level-cut",
            CutKind::Reconciled => "reconciled",
            CutKind::Grafting => "grafting",
            CutKind::Trim => "trim",
        }
    }
    pub fn parse(s: &str) -> Option<CutKind> {
        [
            CutKind::Component,
            CutKind::Matching,
            CutKind::LevelCut,
            CutKind::Reconciled,
            CutKind::Grafting,
            CutKind::Trim,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Claims Φ_{G[host], d}(side) ≤ bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub side: Vec<usize>,
    pub host: Vec<usize>,
    pub bound_num: i128,
    pub bound_den: i128,
    pub kind: CutKind,
}

impl CutCertificate {
    pub fn new(side: Vec<usize>, host: Vec<usize>, bound: Q, kind: CutKind) -> Self {
        CutCertificate {
            side,
            host,
            bound_num: *bound.numer(),
            bound_den: *bound.denom(),
            kind,
        }
    }

    pub fn bound(&self) -> Q {
        Q::new(self.bound_num, self.bound_den)
    }

    pub fn bound_str(&self) -> String {
        fmt_q(&self.bound())
    }

    /// Ids remapped through `map` (local id -> parent id).
    pub fn lift(&self, map: &[usize]) -> Self {
        let f = |s: &[usize]| {
            let mut v: Vec<usize> = s.iter().map(|&x| map[x]).collect();
            v.sort_unstable();
            v
        };
        CutCertificate {
            side: f(&self.side),
            host: f(&self.host),
            ..self.clone()
        }
    }

    /// Side nonempty and strictly inside the host, and the bound holds exactly.
    pub fn verify(&self, g: &Graph, d: &Weighting) -> bool {
        let n = g.n();
        if self.side.iter().chain(&self.host).any(|&v| v >= n) {
            return false;
        }
        let s = mask(n, &self.side);
        let h = mask(n, &self.host);
        if self.side.is_empty()
            || self.side.iter().any(|&v| !h[v])
            || self.side.len() >= self.host.len()
        {
            return false;
        }
        sparsity_at_most(g, d, &s, &h, self.bound())
    }
}
