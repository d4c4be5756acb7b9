mod common;

use exdec_core::cutmatch::{run_cut_matching, CutMatchConfig, Termination};
use exdec_core::graph::{mask, Graph};
use exdec_core::trim::*;
use exdec_core::Q;
use rand::Rng;

/// Bidirected K8 plus vertex 8 hanging off vertex 0 through vertex 9.
fn k8_with_tail() -> Graph {
    let mut t = Vec::new();
    for a in 0..8 {
        for b in 0..8 {
            if a != b {
                t.push((a, b, 1));
            }
        }
    }
    t.extend([(8, 9, 1), (9, 8, 1), (9, 0, 1), (0, 9, 1)]);
    Graph::from_triples(10, &t).unwrap()
}

#[test]
fn whole_vertex_set_has_no_sources() {
    let g = common::bidirected_clique(6);
    let d = g.regularized_weighting().unwrap();
    let out = run_cut_matching(&g, &d, &CutMatchConfig::new(Q::new(1, 50), 2)).unwrap();
    let all: Vec<usize> = (0..6).collect();
    let cfg = TrimConfig::new(Q::new(1, 50));
    let inst = build_instances(&g, &d, &all, &out.witness, &cfg).unwrap();
    assert!(inst.source.iter().all(|&s| s == 0));
    let (f, r) = (inst.forward(), inst.reverse());
    assert_eq!(f.source, r.source);
    assert_eq!(f.sink, r.sink);
    assert_eq!(f.caps, r.caps);
    for (a, b) in inst.sub.graph.edges().iter().zip(inst.reversed.edges()) {
        assert_eq!((a.tail, a.head), (b.head, b.tail));
    }
    let t = trim(&g, &d, &all, &out.witness, &cfg).unwrap();
    assert_eq!(t.tag, TrimTag::CertifiedExpander);
    assert_eq!(t.remaining, all);
}

#[test]
fn detached_vertex_is_trimmed_away() {
    let g = k8_with_tail();
    let d = g.regularized_weighting().unwrap();
    let phi = Q::new(1, 1000);
    for seed in 0..4 {
        let out = run_cut_matching(&g, &d, &CutMatchConfig::new(phi, seed)).unwrap();
        assert_eq!(out.tag, Termination::NearExpander);
        // drop vertex 9: vertex 8 keeps no edge inside A
        let a: Vec<usize> = (0..9).collect();
        let mut cfg = TrimConfig::new(phi);
        cfg.c0 = 1e-3;
        let t = trim(&g, &d, &a, &out.witness, &cfg).unwrap();
        assert_eq!(t.tag, TrimTag::CertifiedExpander);
        assert_eq!(t.remaining, (0..8).collect::<Vec<_>>());
        assert_eq!(t.cuts.len(), 1);
        assert_eq!(t.cuts[0].side, vec![8]);
        assert!(t.cuts[0].verify(&g, &d));
        assert!(2 * d.sum(&t.remaining) >= d.sum(&a));
        assert!(verify_certified_expander(&g, &t.remaining, t.phi_cert.unwrap(), &d).unwrap());
        // the default divisor stops at once: the cut is heavy next to d(V)
        let early = trim(&g, &d, &a, &out.witness, &TrimConfig::new(phi)).unwrap();
        assert_eq!(early.tag, TrimTag::EarlyTermination);
    }
}

#[test]
fn certified_expander_examples() {
    let g = common::bidirected_clique(6);
    let d = g.degree_weighting();
    let all: Vec<usize> = (0..6).collect();
    // K6 with unit caps: a 3/3 split gives 9 / 30
    assert!(verify_certified_expander(&g, &all, Q::new(3, 10), &d).unwrap());
    assert!(!verify_certified_expander(&g, &all, Q::new(31, 100), &d).unwrap());
    assert!(verify_certified_expander(&g, &[3], Q::new(99, 100), &d).unwrap());
}

#[test]
fn trims_on_random_near_expanders() {
    let mut r = common::rng(900);
    let mut certified = 0;
    for i in 0..25 {
        let n = r.random_range(3..=14);
        let m = r.random_range(n..4 * n);
        let g = common::random_strong(&mut r, n, m, 4);
        let d = g.regularized_weighting().unwrap();
        let phi = Q::new(1, 100);
        let out = run_cut_matching(&g, &d, &CutMatchConfig::new(phi, i)).unwrap();
        if out.tag != Termination::NearExpander {
            continue;
        }
        let a = out.survivors.clone();
        let mut cfg = TrimConfig::new(phi);
        cfg.c0 = 1.0;
        let t = trim(&g, &d, &a, &out.witness, &cfg).unwrap();
        assert!(t.batches.len() <= 65);
        assert!(t.source_ratios().iter().all(|&x| x <= 0.5));
        let mut host = mask(g.n(), &a);
        for c in &t.cuts {
            assert_eq!(c.host, (0..g.n()).filter(|&v| host[v]).collect::<Vec<_>>());
            for &v in &c.side {
                host[v] = false;
            }
        }
        if t.tag == TrimTag::CertifiedExpander {
            certified += 1;
            assert!(2 * d.sum(&t.remaining) >= d.sum(&a));
            assert!(verify_certified_expander(&g, &t.remaining, t.phi_cert.unwrap(), &d).unwrap());
        }
    }
    assert!(certified > 0);
}
