mod common;

use exdec_core::flow::*;
use exdec_core::graph::Graph;
use rand::Rng;

/// min over S of Δ(V∖S) + ∇(S) + scale·c(S, V∖S), S ranging over all subsets.
fn min_cut_by_enumeration(g: &Graph, scale: i64, src: &[i64], snk: &[i64]) -> i64 {
    let n = g.n();
    let mut best = i64::MAX;
    for bits in 0u32..(1 << n) {
        let inside = |v: usize| bits >> v & 1 == 1;
        let mut c = 0;
        for v in 0..n {
            c += if inside(v) { snk[v] } else { src[v] };
        }
        for e in g.edges() {
            if inside(e.tail) && !inside(e.head) {
                c += scale * e.cap as i64;
            }
        }
        best = best.min(c);
    }
    best
}

#[test]
fn exact_max_flow_equals_enumerated_min_cut() {
    let mut r = common::rng(66);
    for _ in 0..100 {
        let n = r.random_range(2..=8);
        let m = r.random_range(0..20);
        let g = common::random_graph(&mut r, n, m, 5);
        let src: Vec<i64> = (0..n).map(|_| r.random_range(0..8)).collect();
        let snk: Vec<i64> = (0..n).map(|_| r.random_range(0..8)).collect();
        let inst = FlowInstance::new(&g, 2, src.clone(), snk.clone(), 4);
        let mf = exact_max_flow(&inst);
        assert_eq!(mf.value, min_cut_by_enumeration(&g, 2, &src, &snk));
    }
}

#[test]
fn stuck_states_yield_sparse_balanced_level_cuts() {
    let mut r = common::rng(67);
    let mut checked = 0;
    for _ in 0..300 {
        let n = r.random_range(3..=10);
        let m = r.random_range(n..4 * n);
        let g = common::random_graph(&mut r, n, m, 3);
        // b ≥ deg, sources and sinks bounded by b, Δ(V) ≤ ∇(V)
        let b: Vec<i64> = (0..n)
            .map(|v| g.degree(v) as i64 + r.random_range(1..4))
            .collect();
        let src: Vec<i64> = b
            .iter()
            .map(|&x| if r.random_bool(0.3) { x } else { 0 })
            .collect();
        let snk: Vec<i64> = b
            .iter()
            .map(|&x| if r.random_bool(0.5) { x } else { 0 })
            .collect();
        if src.iter().sum::<i64>() > snk.iter().sum::<i64>() {
            continue;
        }
        let h = default_height(n, g.w(), 1, 0.5);
        let res = push_relabel_bounded(&FlowInstance::new(&g, 1, src, snk, h), true);
        let FlowResult::Stuck(st) = res else { continue };
        st.scan(true).unwrap();
        let cut = extract_sparse_level_cut(&st, &b).unwrap();
        let (o, i) = scaled_boundary(&st, &cut.side);
        let bs: i64 = (0..n).filter(|&v| cut.side[v]).map(|v| b[v]).sum();
        let bt: i64 = b.iter().sum();
        assert!(bs > 0 && 3 * bs <= 2 * bt);
        // conductance ≤ 1.1 · 0.5 against b
        assert!(o.min(i) as f64 <= 0.55 * bs.min(bt - bs) as f64);
        checked += 1;
    }
    assert!(checked > 20, "only {checked} stuck instances");
}

#[test]
fn push_relabel_is_deterministic() {
    let mut r = common::rng(68);
    let g = common::random_graph(&mut r, 9, 30, 4);
    let src: Vec<i64> = (0..9).map(|_| r.random_range(0..6)).collect();
    let snk: Vec<i64> = (0..9).map(|_| r.random_range(0..3)).collect();
    let inst = FlowInstance::new(&g, 1, src, snk, 40);
    let a = push_relabel_bounded(&inst, true);
    let b = push_relabel_bounded(&inst, true);
    assert_eq!(a.state().flow(), b.state().flow());
    assert_eq!(a.state().levels(), b.state().levels());
}

#[test]
fn naive_and_link_cut_decompositions_agree() {
    let mut r = common::rng(69);
    for _ in 0..40 {
        let n = r.random_range(2..12);
        let m = r.random_range(1..40);
        let g = common::random_graph(&mut r, n, m, 6);
        let src: Vec<i64> = (0..n).map(|_| r.random_range(0..9)).collect();
        let snk: Vec<i64> = (0..n).map(|_| r.random_range(0..9)).collect();
        let caps: Vec<i64> = g.edges().iter().map(|e| e.cap as i64).collect();
        let mf = max_flow(&g, &caps, &src, &snk);
        let t = Terminals::simple(mf.routed.clone(), mf.absorbed.clone());
        let a = decompose_flow(&g, &mf.flow, &t, true).unwrap();
        let b = decompose_flow_naive(&g, &mf.flow, &t, true).unwrap();
        assert_eq!(a.paths, b.paths);
        assert!(a.paths.len() <= g.m() + n);
    }
}
