//! Brute-force ground truth by cut enumeration, in exact arithmetic.

use crate::error::{Error, Result};
use crate::graph::{Graph, Weighting};
use crate::rational::{BigQ, Q};
use num_traits::Zero;

/// Largest enumeration scope accepted.
pub const ENUM_LIMIT: usize = 16;

fn guard(k: usize) -> Result<()> {
    if k > ENUM_LIMIT {
        Err(Error::Contract(format!(
            "cut enumeration over {k} vertices exceeds the limit of {ENUM_LIMIT}"
        )))
    } else {
        Ok(())
    }
}

/// Minimum over nonempty proper S ⊆ `scope` with positive denominator of
/// min(δ(S, B∖S), δ(B∖S, S)) / min(w(S), w(scope∖S)), where B is `within`
/// (or every vertex when `within` is None). Returns (numerator, denominator, S).
fn worst_ratio(
    n: usize,
    edges: &[(usize, usize, i128)],
    wt: &[i128],
    scope: &[usize],
    within: Option<&[bool]>,
) -> Result<Option<(i128, i128, Vec<usize>)>> {
    guard(scope.len())?;
    let k = scope.len();
    if k < 2 {
        return Ok(None);
    }
    let mut bit = vec![usize::MAX; n];
    for (i, &v) in scope.iter().enumerate() {
        bit[v] = i;
    }
    let inb = |v: usize| within.is_none_or(|b| b[v]);
    // edges touching the scope, with their endpoint bits (MAX = outside scope)
    let rel: Vec<(usize, usize, i128)> = edges
        .iter()
        .filter(|&&(a, b, _)| inb(a) && inb(b) && (bit[a] != usize::MAX || bit[b] != usize::MAX))
        .map(|&(a, b, c)| (bit[a], bit[b], c))
        .collect();
    let total: i128 = scope.iter().map(|&v| wt[v]).sum();
    let mut best: Option<(i128, i128, u32)> = None;
    for s in 1u32..(1u32 << k) - 1 {
        let ws: i128 = (0..k)
            .filter(|&i| s >> i & 1 == 1)
            .map(|i| wt[scope[i]])
            .sum();
        let den = ws.min(total - ws);
        if den <= 0 {
            continue;
        }
        let (mut out, mut inn) = (0i128, 0i128);
        for &(a, b, c) in &rel {
            let ia = a != usize::MAX && s >> a & 1 == 1;
            let ib = b != usize::MAX && s >> b & 1 == 1;
            if ia && !ib {
                out += c;
            } else if ib && !ia {
                inn += c;
            }
        }
        let num = out.min(inn);
        if best.is_none_or(|(bn, bd, _)| num * bd < bn * den) {
            best = Some((num, den, s));
        }
    }
    Ok(best.map(|(a, b, s)| {
        (
            a,
            b,
            (0..k)
                .filter(|&i| s >> i & 1 == 1)
                .map(|i| scope[i])
                .collect(),
        )
    }))
}

fn graph_edges(g: &Graph) -> Vec<(usize, usize, i128)> {
    g.edges()
        .iter()
        .map(|e| (e.tail, e.head, e.cap as i128))
        .collect()
}

fn weights(d: &Weighting) -> Vec<i128> {
    d.num.iter().map(|&x| x as i128).collect()
}

/// Exact min over all proper cuts of Φ_{G,d}; None when no cut has positive weight on both sides.
pub fn min_conductance(g: &Graph, d: &Weighting) -> Result<Option<(Q, Vec<usize>)>> {
    let all: Vec<usize> = (0..g.n()).collect();
    min_conductance_in_host(g, d, &all)
}

/// Φ_{G[host], d} minimized over cuts of the host.
pub fn min_conductance_in_host(
    g: &Graph,
    d: &Weighting,
    host: &[usize],
) -> Result<Option<(Q, Vec<usize>)>> {
    let hm = crate::graph::mask(g.n(), host);
    let r = worst_ratio(g.n(), &graph_edges(g), &weights(d), host, Some(&hm))?;
    Ok(r.map(|(a, b, s)| (Q::new(a * d.den as i128, b), s)))
}

/// Worst near-expansion ratio of A in an edge-list graph with integer weights.
pub fn worst_near_expansion(
    n: usize,
    edges: &[(usize, usize, i128)],
    wt: &[i128],
    a: &[usize],
) -> Result<Option<(Q, Vec<usize>)>> {
    Ok(worst_ratio(n, edges, wt, a, None)?.map(|(x, y, s)| (Q::new(x, y), s)))
}

/// Every S ⊆ A satisfies min(δ(S, V∖S), δ(V∖S, S)) ≥ φ·min(d(S), d(A∖S)).
pub fn verify_near_expander(g: &Graph, a: &[usize], phi: Q, d: &Weighting) -> Result<bool> {
    let r = worst_ratio(g.n(), &graph_edges(g), &weights(d), a, None)?;
    Ok(r.is_none_or(|(x, y, _)| Q::new(x * d.den as i128, y) >= phi))
}

/// Necessary condition for mixing with congestion κ: no cut sparser than 1/κ.
pub fn verify_no_sparse_cut(g: &Graph, d: &Weighting, kappa: Q) -> Result<bool> {
    Ok(min_conductance(g, d)?.is_none_or(|(q, _)| q * kappa >= Q::from_integer(1)))
}

/// Exhaustive check that G[host] is a (φ, d)-expander.
pub fn verify_expander(
    g: &Graph,
    host: &[usize],
    phi: Q,
    d: &Weighting,
) -> Result<Option<(Q, Vec<usize>)>> {
    Ok(min_conductance_in_host(g, d, host)?.filter(|(q, _)| *q < phi))
}

/// Searches both sides of the bisection of `xs` at `eta` for a subset S with
/// (s-η)² ≥ (s-μ)²/9 on S and Σ_S (s-μ)² ≥ Σ_X (x-μ)²/16, μ the mean of X.
/// `left[i]` tells which side element i is on. Returns (S on the left, S).
pub fn bisection_witness(
    xs: &[BigQ],
    left: &[bool],
    eta: &BigQ,
) -> Result<Option<(bool, Vec<usize>)>> {
    let sides: [Vec<usize>; 2] = [
        (0..xs.len()).filter(|&i| left[i]).collect(),
        (0..xs.len()).filter(|&i| !left[i]).collect(),
    ];
    for s in &sides {
        guard(s.len())?;
    }
    let k = BigQ::from_integer((xs.len() as i64).into());
    let mu = xs.iter().fold(BigQ::zero(), |a, x| a + x) / k;
    let sq = |x: &BigQ| x * x;
    let spread = xs.iter().fold(BigQ::zero(), |a, x| a + sq(&(x - &mu)));
    let nine = BigQ::from_integer(9.into());
    let sixteen = BigQ::from_integer(16.into());
    for (si, side) in sides.iter().enumerate() {
        for bits in 1u32..(1u32 << side.len()) {
            let mem: Vec<usize> = (0..side.len())
                .filter(|&j| bits >> j & 1 == 1)
                .map(|j| side[j])
                .collect();
            let near = mem
                .iter()
                .all(|&i| sq(&(&xs[i] - eta)) * &nine >= sq(&(&xs[i] - &mu)));
            if !near {
                continue;
            }
            let mass = mem
                .iter()
                .fold(BigQ::zero(), |a, &i| a + sq(&(&xs[i] - &mu)));
            if mass * &sixteen >= spread {
                return Ok(Some((si == 0, mem)));
            }
        }
    }
    // all-equal multisets have zero spread; the empty set is not searched
    if spread.is_zero() {
        return Ok(Some((true, Vec::new())));
    }
    Ok(None)
}

/// Per-check outcome of `validate_decomposition`; failures carry the offending cut or cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Vertex ids missing from or repeated across components.
    pub missing: Vec<usize>,
    pub repeated: Vec<usize>,
    /// E_D entries that are not edge ids.
    pub unknown_edges: Vec<usize>,
    /// Edge ids of a cycle in (V, E_D).
    pub cycle: Option<Vec<usize>>,
    /// Indices of cut certificates that do not replay.
    pub cert_failures: Vec<usize>,
    pub inter_capacity: u64,
    pub inter_limit: Option<u64>,
    /// Components verified by enumeration, and those too large to enumerate.
    pub expanders_checked: usize,
    pub expanders_skipped: usize,
    /// (component index, its conductance, the worst cut) below the recorded φ'.
    pub expander_failures: Vec<(usize, Q, Vec<usize>)>,
    /// Components whose certificate does not fit the mode or their size.
    pub cert_mismatch: Vec<usize>,
}

impl ValidationReport {
    pub fn partition_ok(&self) -> bool {
        self.missing.is_empty() && self.repeated.is_empty()
    }
    pub fn inter_ok(&self) -> bool {
        self.inter_limit.is_none_or(|l| self.inter_capacity <= l)
    }
    pub fn passed(&self) -> bool {
        self.partition_ok()
            && self.unknown_edges.is_empty()
            && self.cycle.is_none()
            && self.cert_failures.is_empty()
            && self.inter_ok()
            && self.expander_failures.is_empty()
            && self.cert_mismatch.is_empty()
    }

    pub fn render(&self) -> String {
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        let list = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        s.push_str(&format!("partition {}", flag(self.partition_ok())));
        if !self.partition_ok() {
            s.push_str(&format!(
                " missing [{}] repeated [{}]",
                list(&self.missing),
                list(&self.repeated)
            ));
        }
        s.push('\n');
        s.push_str(&format!(
            "excluded-edges {}",
            flag(self.unknown_edges.is_empty())
        ));
        if !self.unknown_edges.is_empty() {
            s.push_str(&format!(" unknown [{}]", list(&self.unknown_edges)));
        }
        s.push('\n');
        match &self.cycle {
            None => s.push_str("acyclic pass\n"),
            Some(c) => s.push_str(&format!("acyclic FAIL cycle [{}]\n", list(c))),
        }
        s.push_str(&format!(
            "certificates {}",
            flag(self.cert_failures.is_empty())
        ));
        if !self.cert_failures.is_empty() {
            s.push_str(&format!(" failing [{}]", list(&self.cert_failures)));
        }
        s.push('\n');
        match self.inter_limit {
            Some(l) => s.push_str(&format!(
                "inter-capacity {} {} <= {}\n",
                flag(self.inter_ok()),
                self.inter_capacity,
                l
            )),
            None => s.push_str(&format!("inter-capacity pass {}\n", self.inter_capacity)),
        }
        s.push_str(&format!(
            "expanders {} checked {} skipped {}",
            flag(self.expander_failures.is_empty()),
            self.expanders_checked,
            self.expanders_skipped
        ));
        for (i, q, cut) in &self.expander_failures {
            s.push_str(&format!(
                " [component {i} conductance {} cut {}]",
                crate::rational::fmt_q(q),
                list(cut)
            ));
        }
        s.push('\n');
        s.push_str(&format!(
            "component-certificates {}",
            flag(self.cert_mismatch.is_empty())
        ));
        if !self.cert_mismatch.is_empty() {
            s.push_str(&format!(" mismatched [{}]", list(&self.cert_mismatch)));
        }
        s.push('\n');
        s.push_str(&format!("overall {}\n", flag(self.passed())));
        s
    }
}

/// Largest component verified by enumeration.
pub const COMPONENT_LIMIT: usize = 14;

/// Checks partition, acyclicity of E_D, every cut certificate, the
/// inter-component capacity against `inter_limit`, and (strong mode) that
/// each component of at most 14 vertices is an expander at its recorded φ'.
pub fn validate_decomposition(
    g: &Graph,
    r: &crate::decomp::DecompositionResult,
    inter_limit: Option<u64>,
) -> ValidationReport {
    use crate::decomp::{
        acyclicity_check, find_cycle, inter_component_capacity, ComponentCert, Mode,
    };
    let n = g.n();
    let mut count = vec![0usize; n];
    let mut outside = Vec::new();
    for c in &r.components {
        for &v in &c.vertices {
            if v < n {
                count[v] += 1;
            } else {
                outside.push(v);
            }
        }
    }
    let mut repeated: Vec<usize> = (0..n).filter(|&v| count[v] > 1).collect();
    repeated.extend(outside);
    let missing: Vec<usize> = (0..n).filter(|&v| count[v] == 0).collect();
    let unknown_edges: Vec<usize> = r.excluded.iter().copied().filter(|&e| e >= g.m()).collect();
    let known: Vec<usize> = r.excluded.iter().copied().filter(|&e| e < g.m()).collect();
    let cycle = if acyclicity_check(g, &known) {
        None
    } else {
        find_cycle(g, &known)
    };
    let mut cert_failures = Vec::new();
    for (i, c) in r.cuts.iter().enumerate() {
        let ok = c
            .weighting
            .weighting(g)
            .map(|d| c.cert.verify(g, &d))
            .unwrap_or(false);
        if !ok {
            cert_failures.push(i);
        }
    }
    let in_range = r
        .components
        .iter()
        .all(|c| c.vertices.iter().all(|&v| v < n));
    let inter_capacity = if in_range {
        inter_component_capacity(g, &r.components, &known)
    } else {
        0
    };
    let mut rep = ValidationReport {
        missing,
        repeated,
        unknown_edges,
        cycle,
        cert_failures,
        inter_capacity,
        inter_limit,
        expanders_checked: 0,
        expanders_skipped: 0,
        expander_failures: Vec::new(),
        cert_mismatch: Vec::new(),
    };
    for (i, c) in r.components.iter().enumerate() {
        let fits = match (&c.cert, r.mode) {
            (ComponentCert::Singleton, _) => c.vertices.len() == 1,
            (ComponentCert::NearExpander { .. }, Mode::Weak) => true,
            (ComponentCert::Certified { .. }, Mode::Strong) => true,
            _ => false,
        };
        if !fits {
            rep.cert_mismatch.push(i);
            continue;
        }
        let ComponentCert::Certified {
            phi_num,
            phi_den,
            weighting,
        } = &c.cert
        else {
            continue;
        };
        if !in_range || c.vertices.len() > COMPONENT_LIMIT {
            rep.expanders_skipped += 1;
            continue;
        }
        let Ok(d) = weighting.weighting(g) else {
            rep.cert_mismatch.push(i);
            continue;
        };
        rep.expanders_checked += 1;
        let phi = Q::new(*phi_num, *phi_den);
        match verify_expander(g, &c.vertices, phi, &d) {
            Ok(None) => {}
            Ok(Some((q, cut))) => rep.expander_failures.push((i, q, cut)),
            Err(_) => rep
                .expander_failures
                .push((i, Q::from_integer(0), Vec::new())),
        }
    }
    rep
}
