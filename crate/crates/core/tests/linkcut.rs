mod common;

use exdec_core::flow::{decompose_flow, max_flow, Terminals};
use exdec_core::linkcut::{replay_crossings, Forest, LinkCutForest, NaiveForest};
use rand::Rng;

#[test]
fn link_cut_examples() {
    for f in [
        &mut LinkCutForest::new(3) as &mut dyn Forest,
        &mut NaiveForest::new(3),
    ] {
        // chain 0 -> 1 -> 2 with weights 2, 5
        f.link(1, 2, 11, 5, 1).unwrap();
        f.link(0, 1, 10, 2, 1).unwrap();
        assert!(f.link(2, 0, 12, 1, 1).is_err());
        assert_eq!(f.find_root(0), 2);
        assert_eq!(f.find_min(0).map(|x| (x.0, x.1)), Some((10, 2)));
        f.add(0, -2);
        assert_eq!(f.find_min(0).map(|x| (x.0, x.1)), Some((10, 0)));
        assert_eq!(f.find_min_secondary(0).map(|x| x.1), Some(1));
        assert_eq!(f.find_min_secondary(2), None);
        assert_eq!(f.cut(1).unwrap(), 11);
        assert_eq!(f.find_root(0), 1);
    }
}

#[test]
fn ties_go_toward_the_root() {
    let mut f = LinkCutForest::new(3);
    f.link(1, 2, 7, 3, 1).unwrap();
    f.link(0, 1, 6, 3, 1).unwrap();
    assert_eq!(f.find_min(0).map(|x| x.0), Some(7));
}

#[test]
fn secondary_mark_zero_is_found() {
    let mut f = LinkCutForest::new(4);
    f.link(2, 3, 2, 9, 1).unwrap();
    f.link(1, 2, 1, 9, 0).unwrap();
    f.link(0, 1, 0, 9, 1).unwrap();
    assert_eq!(f.find_min_secondary(0), Some((1, 0)));
    assert_eq!(f.find_min_secondary(2), Some((2, 1)));
}

/// Unit-capacity max flows decompose into edge-disjoint paths; replayed
/// crossing flags must agree with the stored paths for any tag set.
#[test]
fn replay_matches_explicit_paths_on_unit_graphs() {
    let mut r = common::rng(404);
    for _ in 0..25 {
        let n = r.random_range(3..14);
        let m = r.random_range(n..4 * n);
        let g = common::random_graph(&mut r, n, m, 1);
        let src: Vec<i64> = (0..n).map(|_| r.random_range(0..3)).collect();
        let snk: Vec<i64> = (0..n).map(|_| r.random_range(0..3)).collect();
        let caps = vec![1i64; g.m()];
        let mf = max_flow(&g, &caps, &src, &snk);
        let t = Terminals::simple(mf.routed.clone(), mf.absorbed.clone());
        let dec = decompose_flow(&g, &mf.flow, &t, true).unwrap();
        let ex = dec.explicit.as_ref().unwrap();
        let mut used = vec![0; g.m()];
        for es in ex {
            for &e in es {
                used[e] += 1;
            }
        }
        assert!(used.iter().all(|&u| u <= 1));
        for _ in 0..4 {
            let tagged: Vec<bool> = (0..g.m()).map(|_| r.random_bool(0.3)).collect();
            let rep = replay_crossings(&dec.transcript, &tagged).unwrap();
            assert_eq!(rep.len(), dec.paths.len());
            for ((p, es), q) in dec.paths.iter().zip(ex).zip(&rep) {
                assert_eq!((p.src, p.dst, p.amount), (q.src, q.dst, q.amount));
                assert_eq!(q.crosses, es.iter().any(|&e| tagged[e]));
            }
        }
        let all = replay_crossings(&dec.transcript, &vec![true; g.m()]).unwrap();
        for (q, es) in all.iter().zip(ex) {
            assert_eq!(q.crosses, !es.is_empty());
        }
    }
}
