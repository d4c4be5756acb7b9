//! Weak and strong expander decomposition drivers, the excluded edge set and
//! result serialization.

use crate::cert::{CutCertificate, CutKind};
use crate::cutmatch::{run_cut_matching, CutMatchConfig, Termination};
use crate::error::{Error, Result};
use crate::graph::{mask, Graph, Weighting};
use crate::rational::{fmt_q, parse_q, Q};
use crate::trim::{trim, TrimConfig, TrimTag};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Weak,
    Strong,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        }
    }
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "weak" => Some(Mode::Weak),
            "strong" => Some(Mode::Strong),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompConfig {
    pub mode: Mode,
    pub phi: Q,
    pub tau: Q,
    pub c_t: f64,
    pub c0: f64,
    pub seed: u64,
}

impl DecompConfig {
    pub fn new(mode: Mode, phi: Q, seed: u64) -> Self {
        DecompConfig {
            mode,
            phi,
            tau: Q::from_integer(10_000),
            c_t: 10.0,
            c0: 4096.0,
            seed,
        }
    }
}

/// Weighting a certificate is stated against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRef {
    /// Degrees in the input graph.
    Degree,
    /// Regularized weighting of the subgraph induced by `scope`.
    Regularized { scope: Vec<usize> },
}

impl WeightRef {
    /// The weighting over all vertices of `g` (zero outside the scope).
    pub fn weighting(&self, g: &Graph) -> Result<Weighting> {
        match self {
            WeightRef::Degree => Ok(g.degree_weighting()),
            WeightRef::Regularized { scope } => {
                if scope.iter().any(|&v| v >= g.n()) {
                    return Err(Error::Validation(
                        "weighting scope outside the graph".into(),
                    ));
                }
                let local = g.induced(scope).graph.regularized_weighting()?;
                let mut num = vec![0; g.n()];
                for (i, &v) in scope.iter().enumerate() {
                    num[v] = local.num[i];
                }
                Ok(Weighting {
                    num,
                    den: local.den,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedCut {
    pub cert: CutCertificate,
    pub weighting: WeightRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentCert {
    Singleton,
    /// Weak mode: the set survived cut-matching as a near-expander at φ.
    NearExpander {
        phi_num: i128,
        phi_den: i128,
    },
    /// Strong mode: trimming certified G[V_i] as a (φ', d)-expander.
    Certified {
        phi_num: i128,
        phi_den: i128,
        weighting: WeightRef,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub cert: ComponentCert,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimRecord {
    pub scope_size: usize,
    pub certified: bool,
    pub k: i64,
    pub batches: usize,
    pub added_source: Vec<i128>,
    /// d(A') ≥ d(A)/2 when certified.
    pub half_ok: bool,
    pub batch_limit_hit: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompStats {
    pub depth: usize,
    pub cut_matching_runs: usize,
    pub cut_matching_rounds: usize,
    pub trim_runs: usize,
    pub trim_batches_max: usize,
    pub level_fallbacks: u64,
    pub matching_fallbacks: u64,
    /// Certified sets that were not strongly connected and were recursed into.
    pub disconnected_certified: usize,
    /// Most times any vertex sat on the lighter side of an emitted cut.
    pub max_smaller_side: u32,
    /// Capacity of G∖D edges between different components.
    pub inter_capacity: u64,
    /// Flip-count histogram over trimming runs: (flips, vertices).
    pub flip_histogram: Vec<(u32, u64)>,
    pub trims: Vec<TrimRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub mode: Mode,
    pub n: usize,
    pub phi_num: i128,
    pub phi_den: i128,
    pub tau_num: i128,
    pub tau_den: i128,
    pub c_t: f64,
    pub c0: f64,
    pub seed: u64,
    /// Sorted by smallest vertex.
    pub components: Vec<Component>,
    /// Edge ids of E_D, sorted.
    pub excluded: Vec<usize>,
    /// In emission order.
    pub cuts: Vec<RecordedCut>,
    pub stats: DecompStats,
}

impl DecompositionResult {
    pub fn phi(&self) -> Q {
        Q::new(self.phi_num, self.phi_den)
    }
}

/// Output of one recursive call, in root ids.
#[derive(Default)]
struct Piece {
    components: Vec<Component>,
    excluded: Vec<usize>,
    cuts: Vec<RecordedCut>,
    stats: DecompStats,
    flips: BTreeMap<u32, u64>,
    smaller: BTreeMap<usize, u32>,
}

impl Piece {
    fn absorb(&mut self, o: Piece) {
        self.components.extend(o.components);
        self.excluded.extend(o.excluded);
        self.cuts.extend(o.cuts);
        let s = &mut self.stats;
        s.depth = s.depth.max(o.stats.depth);
        s.cut_matching_runs += o.stats.cut_matching_runs;
        s.cut_matching_rounds += o.stats.cut_matching_rounds;
        s.trim_runs += o.stats.trim_runs;
        s.trim_batches_max = s.trim_batches_max.max(o.stats.trim_batches_max);
        s.level_fallbacks += o.stats.level_fallbacks;
        s.matching_fallbacks += o.stats.matching_fallbacks;
        s.disconnected_certified += o.stats.disconnected_certified;
        s.trims.extend(o.stats.trims);
        for (k, v) in o.flips {
            *self.flips.entry(k).or_insert(0) += v;
        }
        for (k, v) in o.smaller {
            *self.smaller.entry(k).or_insert(0) += v;
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the i-th child of a call seeded with `seed`.
pub fn child_seed(seed: u64, i: usize) -> u64 {
    splitmix(seed ^ splitmix(i as u64 + 1))
}

struct Driver<'a> {
    g: &'a Graph,
    cfg: &'a DecompConfig,
}

impl<'a> Driver<'a> {
    /// Records `cert` (root ids) and moves its heavier boundary direction into E_D.
    fn emit_cut(&self, p: &mut Piece, cert: CutCertificate, weighting: WeightRef, d: &Weighting) {
        let n = self.g.n();
        let s = mask(n, &cert.side);
        let h = mask(n, &cert.host);
        let (out, inn) = self.g.boundary_in_host(&s, &h);
        let outward = out >= inn;
        for (i, e) in self.g.edges().iter().enumerate() {
            if h[e.tail] && h[e.head] && s[e.tail] != s[e.head] && s[e.tail] == outward {
                p.excluded.push(i);
            }
        }
        if cert.kind != CutKind::Component {
            let ws = d.sum(&cert.side);
            let rest: Vec<usize> = cert.host.iter().copied().filter(|&v| !s[v]).collect();
            let lighter = if ws <= d.sum(&rest) {
                &cert.side
            } else {
                &rest
            };
            for &v in lighter {
                *p.smaller.entry(v).or_insert(0) += 1;
            }
        }
        p.cuts.push(RecordedCut { cert, weighting });
    }

    fn children(&self, parts: Vec<Vec<usize>>, seed: u64, depth: usize) -> Result<Vec<Piece>> {
        parts
            .into_par_iter()
            .enumerate()
            .map(|(i, part)| self.solve(part, child_seed(seed, i), depth + 1))
            .collect()
    }

    fn solve(&self, scope: Vec<usize>, seed: u64, depth: usize) -> Result<Piece> {
        let mut p = Piece::default();
        p.stats.depth = depth;
        if scope.len() <= 1 {
            p.components.push(Component {
                vertices: scope,
                cert: ComponentCert::Singleton,
            });
            return Ok(p);
        }
        let sub = self.g.induced(&scope);
        let lift = |vs: &[usize]| -> Vec<usize> {
            let mut v: Vec<usize> = vs.iter().map(|&x| sub.to_parent[x]).collect();
            v.sort_unstable();
            v
        };
        let sccs = sub.graph.sccs_topological();
        if sccs.len() > 1 {
            let deg = self.g.degree_weighting();
            let mut host: Vec<usize> = scope.clone();
            host.sort_unstable();
            for c in &sccs[..sccs.len() - 1] {
                let side = lift(c);
                let cert = CutCertificate::new(
                    side.clone(),
                    host.clone(),
                    Q::from_integer(0),
                    CutKind::Component,
                );
                self.emit_cut(&mut p, cert, WeightRef::Degree, &deg);
                let sm = mask(self.g.n(), &side);
                host.retain(|&v| !sm[v]);
            }
            let parts: Vec<Vec<usize>> = sccs.iter().map(|c| lift(c)).collect();
            for c in self.children(parts, seed, depth)? {
                p.absorb(c);
            }
            return Ok(p);
        }
        let mut sorted_scope = scope.clone();
        sorted_scope.sort_unstable();
        let (d_local, wref, d_root) = match self.cfg.mode {
            Mode::Weak => {
                let deg = self.g.degree_weighting();
                (deg.restrict(&scope), WeightRef::Degree, deg)
            }
            Mode::Strong => {
                let wr = WeightRef::Regularized {
                    scope: sorted_scope.clone(),
                };
                let dr = wr.weighting(self.g)?;
                (sub.graph.regularized_weighting()?, wr, dr)
            }
        };
        let tau = match self.cfg.mode {
            Mode::Weak => self.cfg.tau,
            Mode::Strong => {
                let n = sub.graph.n() as f64;
                let lg = self.cfg.c0 * n.log2() * (n * sub.graph.w() as f64).log2();
                self.cfg.tau.max(Q::from_integer(lg.ceil() as i128))
            }
        };
        let cm_cfg = CutMatchConfig {
            tau,
            c_t: self.cfg.c_t,
            ..CutMatchConfig::new(self.cfg.phi, seed)
        };
        let cm = run_cut_matching(&sub.graph, &d_local, &cm_cfg)?;
        p.stats.cut_matching_runs += 1;
        p.stats.cut_matching_rounds += cm.rounds.len();
        p.stats.matching_fallbacks += cm.fallbacks as u64;
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for c in &cm.cuts {
            let cert = c.lift(&sub.to_parent);
            parts.push(cert.side.clone());
            self.emit_cut(&mut p, cert, wref.clone(), &d_root);
        }
        let survivors = cm.survivors.clone();
        match (cm.tag, self.cfg.mode) {
            (Termination::EarlyTermination, _) => parts.push(lift(&survivors)),
            (Termination::NearExpander, Mode::Weak) => {
                let vs = lift(&survivors);
                if vs.len() <= 1 {
                    parts.push(vs);
                } else {
                    let cert = ComponentCert::NearExpander {
                        phi_num: *self.cfg.phi.numer(),
                        phi_den: *self.cfg.phi.denom(),
                    };
                    p.components.push(Component { vertices: vs, cert });
                }
            }
            (Termination::NearExpander, Mode::Strong) => {
                let tcfg = TrimConfig {
                    c0: self.cfg.c0,
                    ..TrimConfig::new(self.cfg.phi)
                };
                let tr = trim(&sub.graph, &d_local, &survivors, &cm.witness, &tcfg)?;
                p.stats.trim_runs += 1;
                p.stats.trim_batches_max = p.stats.trim_batches_max.max(tr.batches.len());
                p.stats.level_fallbacks += tr.level_fallbacks as u64;
                for &f in &tr.flips {
                    *p.flips.entry(f).or_insert(0) += 1;
                }
                for c in &tr.cuts {
                    let cert = c.lift(&sub.to_parent);
                    parts.push(cert.side.clone());
                    self.emit_cut(&mut p, cert, wref.clone(), &d_root);
                }
                let certified = tr.tag == TrimTag::CertifiedExpander;
                p.stats.trims.push(TrimRecord {
                    scope_size: survivors.len(),
                    certified,
                    k: tr.k,
                    batches: tr.batches.len(),
                    added_source: tr.batches.iter().map(|b| b.added_source).collect(),
                    half_ok: !certified
                        || 2 * d_local.sum(&tr.remaining) >= d_local.sum(&survivors),
                    batch_limit_hit: tr.batch_limit_hit,
                });
                let rest = lift(&tr.remaining);
                let connected =
                    rest.len() <= 1 || self.g.induced(&rest).graph.sccs_topological().len() == 1;
                match (certified, tr.phi_cert) {
                    (true, Some(q)) if connected && rest.len() > 1 => {
                        let cert = ComponentCert::Certified {
                            phi_num: *q.numer(),
                            phi_den: *q.denom(),
                            weighting: wref,
                        };
                        p.components.push(Component {
                            vertices: rest,
                            cert,
                        });
                    }
                    _ => {
                        if certified && !connected {
                            p.stats.disconnected_certified += 1;
                        }
                        parts.push(rest);
                    }
                }
            }
        }
        parts.retain(|x| !x.is_empty());
        if parts.iter().any(|x| x.len() == scope.len()) {
            return Err(Error::Contract("recursion made no progress".into()));
        }
        for c in self.children(parts, seed, depth)? {
            p.absorb(c);
        }
        Ok(p)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var("EXDEC_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    {
        b = b.num_threads(k.max(1));
    }
    b.build()
        .map_err(|e| Error::Contract(format!("thread pool: {e}")))
}

/// Capacity of edges outside E_D whose endpoints lie in different components.
pub fn inter_component_capacity(g: &Graph, components: &[Component], excluded: &[usize]) -> u64 {
    let mut comp = vec![usize::MAX; g.n()];
    for (i, c) in components.iter().enumerate() {
        for &v in &c.vertices {
            comp[v] = i;
        }
    }
    let ex = mask(g.m(), excluded);
    g.edges()
        .iter()
        .enumerate()
        .filter(|(i, e)| !ex[*i] && comp[e.tail] != comp[e.head])
        .map(|(_, e)| e.cap)
        .sum()
}

pub fn decompose(g: &Graph, cfg: &DecompConfig) -> Result<DecompositionResult> {
    let zero = Q::from_integer(0);
    if cfg.phi <= zero || cfg.phi >= Q::from_integer(1) {
        return Err(Error::Contract("phi must lie in (0, 1)".into()));
    }
    if cfg.tau < Q::from_integer(10_000) {
        return Err(Error::Contract("tau must be at least 1e4".into()));
    }
    let drv = Driver { g, cfg };
    let all: Vec<usize> = (0..g.n()).collect();
    let mut p = thread_pool()?.install(|| drv.solve(all, cfg.seed, 0))?;
    p.components
        .iter_mut()
        .for_each(|c| c.vertices.sort_unstable());
    p.components.sort_by_key(|c| c.vertices.first().copied());
    p.excluded.sort_unstable();
    p.excluded.dedup();
    let mut stats = p.stats;
    stats.inter_capacity = inter_component_capacity(g, &p.components, &p.excluded);
    stats.max_smaller_side = p.smaller.values().copied().max().unwrap_or(0);
    stats.flip_histogram = p.flips.into_iter().collect();
    Ok(DecompositionResult {
        mode: cfg.mode,
        n: g.n(),
        phi_num: *cfg.phi.numer(),
        phi_den: *cfg.phi.denom(),
        tau_num: *cfg.tau.numer(),
        tau_den: *cfg.tau.denom(),
        c_t: cfg.c_t,
        c0: cfg.c0,
        seed: cfg.seed,
        components: p.components,
        excluded: p.excluded,
        cuts: p.cuts,
        stats,
    })
}

pub fn weak_decomposition(g: &Graph, phi: Q, seed: u64) -> Result<DecompositionResult> {
    decompose(g, &DecompConfig::new(Mode::Weak, phi, seed))
}

pub fn strong_decomposition(g: &Graph, phi: Q, seed: u64) -> Result<DecompositionResult> {
    decompose(g, &DecompConfig::new(Mode::Strong, phi, seed))
}

/// A directed cycle among the E_D edges, as edge ids, if any.
pub fn find_cycle(g: &Graph, excluded: &[usize]) -> Option<Vec<usize>> {
    let n = g.n();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &e in excluded {
        if e < g.m() {
            out[g.edge(e).tail].push(e);
        }
    }
    // 0 unseen, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    let mut via: Vec<Option<usize>> = vec![None; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        state[s] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < out[v].len() {
                let e = out[v][*i];
                *i += 1;
                let w = g.edge(e).head;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        via[w] = Some(e);
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cyc = vec![e];
                        let mut x = v;
                        while x != w {
                            let pe = via[x].expect("stack vertex has an entry edge");
                            cyc.push(pe);
                            x = g.edge(pe).tail;
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// True iff (V, E_D) admits a topological order.
pub fn acyclicity_check(g: &Graph, excluded: &[usize]) -> bool {
    find_cycle(g, excluded).is_none()
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn weight_str(w: &WeightRef) -> String {
    match w {
        WeightRef::Degree => "degree".into(),
        WeightRef::Regularized { scope } => format!("regularized {}", join(scope)),
    }
}

/// Stable line-oriented text form.
pub fn to_text(r: &DecompositionResult, g: &Graph) -> String {
    let mut s = String::new();
    let mut line = |x: String| {
        s.push_str(&x);
        s.push('\n');
    };
    line("exdec-decomposition 1".into());
    line(format!("mode {}", r.mode.name()));
    line(format!("n {}", r.n));
    line(format!("phi {}", fmt_q(&Q::new(r.phi_num, r.phi_den))));
    line(format!("tau {}", fmt_q(&Q::new(r.tau_num, r.tau_den))));
    line(format!("c_t {}", r.c_t));
    line(format!("c_0 {}", r.c0));
    line(format!("seed {}", r.seed));
    line(format!("components {}", r.components.len()));
    for c in &r.components {
        let cert = match &c.cert {
            ComponentCert::Singleton => "singleton".to_string(),
            ComponentCert::NearExpander { phi_num, phi_den } => {
                format!("near-expander {}", fmt_q(&Q::new(*phi_num, *phi_den)))
            }
            ComponentCert::Certified {
                phi_num,
                phi_den,
                weighting,
            } => {
                format!(
                    "certified {} {}",
                    fmt_q(&Q::new(*phi_num, *phi_den)),
                    weight_str(weighting)
                )
            }
        };
        line(format!("C {} | {}", join(&c.vertices), cert));
    }
    line(format!("excluded {}", r.excluded.len()));
    for &e in &r.excluded {
        let ed = g.edge(e);
        line(format!("E {} {} {} {}", e, ed.tail, ed.head, ed.cap));
    }
    line(format!("cuts {}", r.cuts.len()));
    for c in &r.cuts {
        line(format!(
            "S {} {} | {} | {} | {}",
            c.cert.kind.name(),
            c.cert.bound_str(),
            join(&c.cert.side),
            join(&c.cert.host),
            weight_str(&c.weighting)
        ));
    }
    let st = &r.stats;
    line("stats".into());
    line(format!("stat depth {}", st.depth));
    line(format!("stat cut-matching-runs {}", st.cut_matching_runs));
    line(format!(
        "stat cut-matching-rounds {}",
        st.cut_matching_rounds
    ));
    line(format!("stat trim-runs {}", st.trim_runs));
    line(format!("stat trim-batches-max {}", st.trim_batches_max));
    line(format!("stat level-fallbacks {}", st.level_fallbacks));
    line(format!("stat matching-fallbacks {}", st.matching_fallbacks));
    line(format!(
        "stat disconnected-certified {}",
        st.disconnected_certified
    ));
    line(format!("stat max-smaller-side {}", st.max_smaller_side));
    line(format!("stat inter-capacity {}", st.inter_capacity));
    let hist: Vec<String> = st
        .flip_histogram
        .iter()
        .map(|(f, c)| format!("{f}:{c}"))
        .collect();
    line(format!("stat flip-histogram {}", hist.join(" ")));
    for t in &st.trims {
        let src: Vec<String> = t.added_source.iter().map(|x| x.to_string()).collect();
        line(format!(
            "trim {} {} {} {} {} {} | {}",
            t.scope_size,
            t.certified,
            t.k,
            t.batches,
            t.half_ok,
            t.batch_limit_hit,
            src.join(" ")
        ));
    }
    s
}

fn bad(line: usize, msg: &str) -> Error {
    Error::InputLine {
        line,
        msg: msg.to_string(),
    }
}

fn nums(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| bad(line, "expected a vertex id"))
        })
        .collect()
}

fn parse_weight(s: &str, line: usize) -> Result<WeightRef> {
    let mut it = s.split_whitespace();
    match it.next() {
        Some("degree") => Ok(WeightRef::Degree),
        Some("regularized") => {
            let rest: Vec<&str> = it.collect();
            Ok(WeightRef::Regularized {
                scope: nums(&rest.join(" "), line)?,
            })
        }
        _ => Err(bad(line, "unknown weighting")),
    }
}

fn parse_stat<T: std::str::FromStr>(v: &str, line: usize) -> Result<T> {
    v.trim()
        .parse::<T>()
        .map_err(|_| bad(line, "malformed stat value"))
}

/// Parses `to_text` output (line numbers are 1-based).
pub fn from_text(text: &str) -> Result<DecompositionResult> {
    let mut r = DecompositionResult {
        mode: Mode::Weak,
        n: 0,
        phi_num: 0,
        phi_den: 1,
        tau_num: 10_000,
        tau_den: 1,
        c_t: 10.0,
        c0: 4096.0,
        seed: 0,
        components: Vec::new(),
        excluded: Vec::new(),
        cuts: Vec::new(),
        stats: DecompStats::default(),
    };
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (key, rest) = l.split_once(' ').unwrap_or((l, ""));
        match key {
            "exdec-decomposition" => seen_header = true,
            "mode" => r.mode = Mode::parse(rest.trim()).ok_or_else(|| bad(ln, "unknown mode"))?,
            "n" => r.n = parse_stat(rest, ln)?,
            "phi" => {
                let q = parse_q(rest.trim()).map_err(|_| bad(ln, "malformed phi"))?;
                (r.phi_num, r.phi_den) = (*q.numer(), *q.denom());
            }
            "tau" => {
                let q = parse_q(rest.trim()).map_err(|_| bad(ln, "malformed tau"))?;
                (r.tau_num, r.tau_den) = (*q.numer(), *q.denom());
            }
            "c_t" => r.c_t = parse_stat(rest, ln)?,
            "c_0" => r.c0 = parse_stat(rest, ln)?,
            "seed" => r.seed = parse_stat(rest, ln)?,
            "components" | "excluded" | "cuts" | "stats" => {}
            "C" => {
                let (vs, cert) = rest
                    .split_once('|')
                    .ok_or_else(|| bad(ln, "component line needs '|'"))?;
                let vertices = nums(vs, ln)?;
                let mut it = cert.split_whitespace();
                let cert = match it.next() {
                    Some("singleton") => ComponentCert::Singleton,
                    Some("near-expander") => {
                        let q = parse_q(it.next().unwrap_or(""))
                            .map_err(|_| bad(ln, "malformed phi"))?;
                        ComponentCert::NearExpander {
                            phi_num: *q.numer(),
                            phi_den: *q.denom(),
                        }
                    }
                    Some("certified") => {
                        let q = parse_q(it.next().unwrap_or(""))
                            .map_err(|_| bad(ln, "malformed phi"))?;
                        let rest: Vec<&str> = it.collect();
                        let weighting = parse_weight(&rest.join(" "), ln)?;
                        ComponentCert::Certified {
                            phi_num: *q.numer(),
                            phi_den: *q.denom(),
                            weighting,
                        }
                    }
                    _ => return Err(bad(ln, "unknown component certificate")),
                };
                r.components.push(Component { vertices, cert });
            }
            "E" => {
                let f = nums(rest, ln)?;
                r.excluded
                    .push(*f.first().ok_or_else(|| bad(ln, "missing edge id"))?);
            }
            "S" => {
                let parts: Vec<&str> = rest.split('|').collect();
                if parts.len() != 4 {
                    return Err(bad(ln, "cut line needs four '|'-separated fields"));
                }
                let mut head = parts[0].split_whitespace();
                let kind = CutKind::parse(head.next().unwrap_or(""))
                    .ok_or_else(|| bad(ln, "unknown cut kind"))?;
                let bound =
                    parse_q(head.next().unwrap_or("")).map_err(|_| bad(ln, "malformed bound"))?;
                let cert =
                    CutCertificate::new(nums(parts[1], ln)?, nums(parts[2], ln)?, bound, kind);
                r.cuts.push(RecordedCut {
                    cert,
                    weighting: parse_weight(parts[3], ln)?,
                });
            }
            "stat" => {
                let (name, v) = rest.split_once(' ').unwrap_or((rest, ""));
                let st = &mut r.stats;
                match name {
                    "depth" => st.depth = parse_stat(v, ln)?,
                    "cut-matching-runs" => st.cut_matching_runs = parse_stat(v, ln)?,
                    "cut-matching-rounds" => st.cut_matching_rounds = parse_stat(v, ln)?,
                    "trim-runs" => st.trim_runs = parse_stat(v, ln)?,
                    "trim-batches-max" => st.trim_batches_max = parse_stat(v, ln)?,
                    "level-fallbacks" => st.level_fallbacks = parse_stat(v, ln)?,
                    "matching-fallbacks" => st.matching_fallbacks = parse_stat(v, ln)?,
                    "disconnected-certified" => st.disconnected_certified = parse_stat(v, ln)?,
                    "max-smaller-side" => st.max_smaller_side = parse_stat(v, ln)?,
                    "inter-capacity" => st.inter_capacity = parse_stat(v, ln)?,
                    "flip-histogram" => {
                        for tok in v.split_whitespace() {
                            let (a, b) = tok
                                .split_once(':')
                                .ok_or_else(|| bad(ln, "histogram entry needs ':'"))?;
                            st.flip_histogram
                                .push((parse_stat(a, ln)?, parse_stat(b, ln)?));
                        }
                    }
                    _ => return Err(bad(ln, "unknown stat")),
                }
            }
            "trim" => {
                let (head, src) = rest
                    .split_once('|')
                    .ok_or_else(|| bad(ln, "trim line needs '|'"))?;
                let f: Vec<&str> = head.split_whitespace().collect();
                if f.len() != 6 {
                    return Err(bad(ln, "trim line needs six fields"));
                }
                r.stats.trims.push(TrimRecord {
                    scope_size: parse_stat(f[0], ln)?,
                    certified: parse_stat(f[1], ln)?,
                    k: parse_stat(f[2], ln)?,
                    batches: parse_stat(f[3], ln)?,
                    half_ok: parse_stat(f[4], ln)?,
                    batch_limit_hit: parse_stat(f[5], ln)?,
                    added_source: src
                        .split_whitespace()
                        .map(|x| parse_stat(x, ln))
                        .collect::<Result<_>>()?,
                });
            }
            _ => return Err(bad(ln, "unknown record")),
        }
    }
    if !seen_header {
        return Err(bad(1, "missing exdec-decomposition header"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_detection() {
        let g = Graph::from_triples(3, &[(0, 1, 1), (1, 0, 1), (1, 2, 1)]).unwrap();
        assert!(acyclicity_check(&g, &[]));
        assert!(acyclicity_check(&g, &[0, 2]));
        let c = find_cycle(&g, &[0, 1, 2]).unwrap();
        let mut s = c.clone();
        s.sort_unstable();
        assert_eq!(s, vec![0, 1]);
    }

    #[test]
    fn seeds_differ_per_child() {
        assert_ne!(child_seed(7, 0), child_seed(7, 1));
        assert_eq!(child_seed(7, 3), child_seed(7, 3));
    }

    #[test]
    fn single_vertex_is_one_component() {
        let g = Graph::new(1, vec![], 1).unwrap();
        let r = strong_decomposition(&g, Q::new(1, 100), 0).unwrap();
        assert_eq!(r.components.len(), 1);
        assert!(r.excluded.is_empty());
    }

    #[test]
    fn text_round_trip() {
        let g = Graph::from_triples(3, &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let r = weak_decomposition(&g, Q::new(1, 20), 5).unwrap();
        let t = to_text(&r, &g);
        let back = from_text(&t).unwrap();
        assert_eq!(to_text(&back, &g), t);
        assert_eq!(back.components, r.components);
        assert_eq!(back.cuts, r.cuts);
    }
}
