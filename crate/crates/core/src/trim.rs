//! Trimming a near-expander into a certified expander with two dynamic flow
//! instances (forward and reversed), batched crossing sources and rising sinks.

use crate::cert::{CutCertificate, CutKind};
use crate::error::{Error, Result};
use crate::flow::{extract_upper_level_cut, FlowInstance};
use crate::graph::{conductance_in_host, mask, members, Graph, Subgraph, Weighting};
use crate::oracle;
use crate::ppr::ValidState;
use crate::rational::Q;
use crate::witness::Witness;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub struct TrimConfig {
    pub phi: Q,
    /// Early-termination divisor constant.
    pub c0: f64,
    pub max_batches: usize,
    pub gap: bool,
}

impl TrimConfig {
    pub fn new(phi: Q) -> Self {
        TrimConfig {
            phi,
            c0: 4096.0,
            max_batches: 64,
            gap: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrimTag {
    EarlyTermination,
    CertifiedExpander,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchLog {
    pub round: usize,
    /// Source added at the start of the batch (all of it unabsorbed then).
    pub added_source: i128,
    pub cuts: usize,
}

#[derive(Debug, Clone)]
pub struct TrimOutcome {
    pub tag: TrimTag,
    /// S_0, S_1, ... in scope ids; each host is A minus the earlier cuts.
    pub cuts: Vec<CutCertificate>,
    /// A' = A minus all cuts.
    pub remaining: Vec<usize>,
    /// Certified expansion of G[A'] on CertifiedExpander.
    pub phi_cert: Option<Q>,
    /// Witness degree constant: deg_W(v) ≤ k · d(v) in flow units.
    pub k: i64,
    pub h: u64,
    pub batches: Vec<BatchLog>,
    /// Level cuts taken by the fallback rule.
    pub level_fallbacks: u32,
    /// Flip counts of both states over A.
    pub flips: Vec<u32>,
    /// True when the batch limit stopped the run.
    pub batch_limit_hit: bool,
}

impl TrimOutcome {
    /// Ratios added_source[r+1] / added_source[r] between consecutive batches.
    pub fn source_ratios(&self) -> Vec<f64> {
        self.batches
            .windows(2)
            .filter(|w| w[0].added_source > 0)
            .map(|w| w[1].added_source as f64 / w[0].added_source as f64)
            .collect()
    }
}

/// The two certification instances on G[A]: same sources, sinks and
/// capacities; the second runs on the reversed graph.
#[derive(Debug, Clone)]
pub struct TrimInstances {
    pub sub: Subgraph,
    pub reversed: Graph,
    pub cap_scale: i64,
    /// Local ids.
    pub source: Vec<i64>,
    pub sink: Vec<i64>,
    pub h: u64,
    pub k: i64,
    /// Vertex weights in flow units, scope ids.
    pub w0: Vec<i64>,
}

impl TrimInstances {
    pub fn forward(&self) -> FlowInstance<'_> {
        FlowInstance::new(
            &self.sub.graph,
            self.cap_scale,
            self.source.clone(),
            self.sink.clone(),
            self.h,
        )
    }
    pub fn reverse(&self) -> FlowInstance<'_> {
        FlowInstance::new(
            &self.reversed,
            self.cap_scale,
            self.source.clone(),
            self.sink.clone(),
            self.h,
        )
    }
}

fn log2_nw(g: &Graph) -> f64 {
    ((g.n().max(2) as f64) * g.w().max(1) as f64).log2()
}

/// ⌈40000 · log₂(nW) / φ⌉.
pub fn trim_height(g: &Graph, phi: Q) -> u64 {
    let (a, b) = (*phi.numer() as f64, *phi.denom() as f64);
    (40000.0 * log2_nw(g) * b / a).ceil() as u64
}

/// Boundary of `a` in `g`: edges with exactly one endpoint inside.
fn boundary(g: &Graph, a: &[bool]) -> Vec<bool> {
    g.edges().iter().map(|e| a[e.tail] != a[e.head]).collect()
}

fn to_i64(x: i128, what: &str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Contract(format!("{what} overflows")))
}

/// Crossing sources from the witness over the boundary of A, sinks
/// 10K·d(v) and edge capacities 200K·c(e)/φ, all in the witness's flow units.
pub fn build_instances(
    g: &Graph,
    d: &Weighting,
    a: &[usize],
    w: &Witness,
    cfg: &TrimConfig,
) -> Result<TrimInstances> {
    if w.n != g.n() || w.m != g.m() || d.num.len() != g.n() {
        return Err(Error::Contract(
            "witness or weighting does not match the graph".into(),
        ));
    }
    if w.vertex_unit % d.den as i128 != 0 {
        return Err(Error::Contract(
            "vertex unit is not a multiple of the weighting denominator".into(),
        ));
    }
    let scale = w.vertex_unit / d.den as i128;
    let w0: Vec<i64> = d
        .num
        .iter()
        .map(|&x| to_i64(scale * x as i128, "vertex weight"))
        .collect::<Result<_>>()?;
    let am = mask(g.n(), a);
    let (dout, din) = w.degrees();
    let mut k = 1i64;
    for &v in a {
        if w0[v] > 0 {
            k = k.max((dout[v] + din[v] + w0[v] - 1) / w0[v]);
        }
    }
    let src = w.crossing_sources(&boundary(g, &am), &am)?;
    let sub = g.induced(a);
    let reversed = sub.graph.reverse();
    let cap_scale = to_i64(200 * k as i128 * w.edge_unit, "capacity scale")?;
    to_i64(
        cap_scale as i128 * g.w() as i128 * g.m().max(1) as i128,
        "total capacity",
    )?;
    let source: Vec<i64> = a.iter().map(|&v| src[v]).collect();
    let sink: Vec<i64> = a
        .iter()
        .map(|&v| to_i64(10 * k as i128 * w0[v] as i128, "sink"))
        .collect::<Result<_>>()?;
    Ok(TrimInstances {
        sub,
        reversed,
        cap_scale,
        source,
        sink,
        h: trim_height(g, cfg.phi),
        k,
        w0,
    })
}

/// Measured Φ of `side` in G[host]; zero when both directions are empty.
fn measured_bound(g: &Graph, d: &Weighting, side: &[bool], host: &[bool]) -> Result<Q> {
    match conductance_in_host(g, d, side, host) {
        Ok(q) => Ok(q),
        Err(Error::ZeroWeight(_)) => {
            let (o, i) = g.boundary_in_host(side, host);
            if o.min(i) == 0 {
                Ok(Q::from_integer(0))
            } else {
                Err(Error::ZeroWeight("trim cut side has zero weight".into()))
            }
        }
        Err(e) => Err(e),
    }
}

/// Trims A (a near-expander of the scope graph `g` with witness `w`).
pub fn trim(
    g: &Graph,
    d: &Weighting,
    a: &[usize],
    w: &Witness,
    cfg: &TrimConfig,
) -> Result<TrimOutcome> {
    let inst = build_instances(g, d, a, w, cfg)?;
    let n = g.n();
    let k = inst.k;
    let na = a.len();
    let mut out = TrimOutcome {
        tag: TrimTag::CertifiedExpander,
        cuts: Vec::new(),
        remaining: a.to_vec(),
        phi_cert: None,
        k,
        h: inst.h,
        batches: Vec::new(),
        level_fallbacks: 0,
        flips: vec![0; na],
        batch_limit_hit: false,
    };
    let phi_for = |r: usize| cfg.phi / Q::from_integer(100_000_000 * k as i128 * (r as i128 + 1));
    if na <= 1 {
        out.phi_cert = Some(phi_for(0));
        return Ok(out);
    }
    let total_d = d.total() as f64;
    let lg_n = (n.max(2) as f64).log2();
    let threshold = total_d / (cfg.c0 * lg_n * log2_nw(g));
    let mut fwd = ValidState::init(
        &inst.sub.graph,
        inst.cap_scale,
        inst.source.clone(),
        inst.sink.clone(),
        inst.h,
        cfg.gap,
    )?;
    let mut rev = ValidState::init(
        &inst.reversed,
        inst.cap_scale,
        inst.source.clone(),
        inst.sink.clone(),
        inst.h,
        cfg.gap,
    )?;
    let mut applied = vec![0i64; n];
    for (i, &v) in a.iter().enumerate() {
        applied[v] = inst.source[i];
    }
    out.batches.push(BatchLog {
        round: 0,
        added_source: inst.source.iter().map(|&x| x as i128).sum(),
        cuts: 0,
    });
    let mut alive = mask(n, a);
    let mut cut_w: u128 = 0;
    let mut r = 0usize;
    let finish_flips = |out: &mut TrimOutcome, fwd: &ValidState, rev: &ValidState| {
        let (f1, f2) = (fwd.stats().flips, rev.stats().flips);
        out.flips = f1.iter().zip(&f2).map(|(x, y)| x + y).collect();
    };
    loop {
        // push-pull-relabel until both instances are feasible
        loop {
            let st = if fwd.is_stuck() {
                fwd.state()
            } else if rev.is_stuck() {
                rev.state()
            } else {
                break;
            };
            let Some((lc, fell_back)) = extract_upper_level_cut(st, st.sink())? else {
                // no proper level cut and nothing undrainable
                out.tag = TrimTag::EarlyTermination;
                out.remaining = members(&alive);
                finish_flips(&mut out, &fwd, &rev);
                return Ok(out);
            };
            out.level_fallbacks += fell_back as u32;
            let local: Vec<usize> = members(&lc.side);
            let side_scope: Vec<usize> = local.iter().map(|&i| inst.sub.to_parent[i]).collect();
            let sm = mask(n, &side_scope);
            let bound = measured_bound(g, d, &sm, &alive)?;
            out.cuts.push(CutCertificate::new(
                side_scope.clone(),
                members(&alive),
                bound,
                CutKind::Trim,
            ));
            if let Some(b) = out.batches.last_mut() {
                b.cuts += 1;
            }
            fwd.remove_vertices(&local)?;
            rev.remove_vertices(&local)?;
            for &v in &side_scope {
                alive[v] = false;
            }
            cut_w += d.sum(&side_scope);
            if cut_w as f64 >= threshold {
                out.tag = TrimTag::EarlyTermination;
                out.remaining = members(&alive);
                finish_flips(&mut out, &fwd, &rev);
                return Ok(out);
            }
        }
        // batch: bring sources up to the crossing sources of the current boundary
        let need = w.crossing_sources(&boundary(g, &alive), &alive)?;
        let mut inc = vec![0i64; na];
        let mut added: i128 = 0;
        for (i, &v) in a.iter().enumerate() {
            if alive[v] && need[v] > applied[v] {
                inc[i] = need[v] - applied[v];
                applied[v] = need[v];
                added += inc[i] as i128;
            }
        }
        if added == 0 {
            out.remaining = members(&alive);
            out.phi_cert = Some(phi_for(r));
            finish_flips(&mut out, &fwd, &rev);
            return Ok(out);
        }
        r += 1;
        if r > cfg.max_batches {
            out.tag = TrimTag::EarlyTermination;
            out.batch_limit_hit = true;
            out.remaining = members(&alive);
            finish_flips(&mut out, &fwd, &rev);
            return Ok(out);
        }
        out.batches.push(BatchLog {
            round: r,
            added_source: added,
            cuts: 0,
        });
        let extra: Vec<i64> = a.iter().map(|&v| 10 * k * inst.w0[v]).collect();
        for s in [&mut fwd, &mut rev] {
            s.reset_and_raise_sinks(&extra);
            s.increase_sources(&inc)?;
            s.revalidate();
        }
    }
}

/// Exhaustive check that G[A'] is a (φ', d)-expander; singletons pass.
pub fn verify_certified_expander(g: &Graph, a: &[usize], phi: Q, d: &Weighting) -> Result<bool> {
    if a.len() <= 1 {
        return Ok(true);
    }
    Ok(oracle::verify_expander(g, a, phi, d)?.is_none())
}
