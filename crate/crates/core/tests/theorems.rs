use pencil_core::fiber::HomologyClass;
use pencil_core::genericity::{PencilSpec, Precision, Verdict};
use pencil_core::lattice::{rank_q, IntMatrix};
use pencil_core::numsolve::TrackerConfig;
use pencil_core::pipeline::{analyze, Analysis};
use pencil_core::rng;
use pencil_core::theorems::{
    intersection_graph_connected, replay, vanishing_cycles, verify, verify_21agu, verify_generation, verify_khaste,
    verify_orbit_single, verify_transitivity, Budget, CheckKind,
};

fn run(seed: u64, p: u32, q: u32, d: u32) -> Analysis {
    let spec = PencilSpec::random(&mut rng::stream(seed, "spec"), p, q, d).unwrap();
    analyze(&spec, seed, Precision::Double, &TrackerConfig::default()).unwrap()
}

#[test]
fn cubic_pencil_full_suite() {
    let a = run(1, 1, 1, 3);
    let report = verify(&a.rep, &a.model, 1, 1, &CheckKind::ALL, Budget::default()).unwrap();
    for c in &report.checks {
        assert_eq!(c.verdict, Verdict::Pass, "{:?}: {}", c.check, c.note);
        assert!(!c.inputs.is_empty());
    }
    let generation = report.get(CheckKind::Generation).unwrap();
    assert_eq!((generation.rank_found, generation.rank_expected), (Some(10), Some(10)));

    let orbit = report.get(CheckKind::OrbitSingle).unwrap();
    assert!(orbit.rank_trace.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(*orbit.rank_trace.last().unwrap(), 10);

    let deltas = vanishing_cycles(&a.rep).unwrap();
    let witnesses = &report.get(CheckKind::Transitivity).unwrap().witnesses;
    assert_eq!(witnesses.len(), 12);
    for w in witnesses {
        let image = replay(&a.rep, &w.word, &deltas[0].0).unwrap();
        let expected: Vec<i64> = deltas[w.target].0.iter().map(|v| v * w.sign).collect();
        assert_eq!(image, expected);
    }
}

#[test]
fn single_vanishing_cycle_has_rank_one() {
    let a = run(1, 1, 1, 3);
    for d in vanishing_cycles(&a.rep).unwrap() {
        assert_eq!(rank_q(&[d.0]), 1);
    }
}

#[test]
fn harness_rejects_degenerate_inputs() {
    let a = run(1, 1, 1, 3);
    let n = a.model.rank();

    let mut stripped = a.rep.clone();
    stripped.vanishing.iter_mut().for_each(|d| *d = d.as_ref().map(|_| HomologyClass(vec![0; n])));
    let g = verify_generation(&stripped, &a.model, 1, 1).unwrap();
    assert_eq!((g.verdict, g.rank_found), (Verdict::Fail, Some(0)));

    let zero = HomologyClass(vec![0; n]);
    let o = verify_orbit_single(&a.rep, &zero, &a.model, Budget::default()).unwrap();
    assert_eq!((o.verdict, o.rank_found), (Verdict::Fail, Some(0)));

    let mut frozen = a.rep.clone();
    frozen.matrices.iter_mut().for_each(|m| *m = IntMatrix::identity(n));
    let deltas = vanishing_cycles(&a.rep).unwrap();
    let t = verify_transitivity(&frozen, &deltas, Budget::default()).unwrap();
    assert_ne!(t.verdict, Verdict::Pass);
    assert_eq!(t.witnesses.len(), 1);
}

#[test]
fn trivial_cases() {
    let single = [HomologyClass(vec![1, 0])];
    let j = IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap();
    assert_eq!(intersection_graph_connected(&single, &j).unwrap().verdict, Verdict::Pass);
    assert_eq!(verify_khaste(None, 1).unwrap().verdict, Verdict::Pass);
}

#[test]
fn orthogonal_blocks_disconnect_the_intersection_graph() {
    let j = IntMatrix::from_rows(vec![
        vec![0, 1, 0, 0],
        vec![-1, 0, 0, 0],
        vec![0, 0, 0, 1],
        vec![0, 0, -1, 0],
    ])
    .unwrap();
    let deltas = [
        HomologyClass(vec![1, 0, 0, 0]),
        HomologyClass(vec![0, 1, 0, 0]),
        HomologyClass(vec![0, 0, 1, 0]),
        HomologyClass(vec![0, 0, 0, 1]),
    ];
    assert_eq!(intersection_graph_connected(&deltas, &j).unwrap().verdict, Verdict::Fail);
    assert_eq!(intersection_graph_connected(&deltas[..2], &j).unwrap().verdict, Verdict::Pass);
}

#[test]
fn unipotent_matrix_is_not_torsion() {
    let m = IntMatrix::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap();
    assert_eq!(verify_khaste(Some(&m), 2).unwrap().verdict, Verdict::Fail);
    let s = IntMatrix::from_rows(vec![vec![0, -1], vec![1, 0]]).unwrap();
    assert_eq!(verify_khaste(Some(&s), 4).unwrap().verdict, Verdict::Pass);
}

#[test]
fn conic_suite() {
    let a = run(3, 2, 1, 1);
    let report = verify(&a.rep, &a.model, 2, 1, &CheckKind::ALL, Budget::default()).unwrap();
    let closure = report.get(CheckKind::Closure).unwrap();
    assert_eq!((closure.verdict, closure.rank_found, closure.rank_expected), (Verdict::Pass, Some(1), Some(1)));
    assert_eq!(report.get(CheckKind::Khaste).unwrap().verdict, Verdict::Pass);
    assert_eq!(report.get(CheckKind::Generation).unwrap().verdict, Verdict::Pass);

    // with the identity in place of M_0 the span cannot grow past that of the cycles
    let mut frozen = a.rep.clone();
    let k = frozen.path_of(pencil_core::monodromy::Target::Zero).unwrap();
    frozen.matrices[k] = IntMatrix::identity(a.model.rank());
    let deltas: Vec<Vec<i64>> = vanishing_cycles(&a.rep).unwrap().into_iter().map(|d| d.0).collect();
    let frozen_closure = verify_21agu(&frozen, &a.model, 2).unwrap();
    assert!(frozen_closure.rank_found.unwrap() <= rank_q(&deltas));
}

#[test]
fn closure_with_p_one_is_generation() {
    let a = run(1, 1, 1, 3);
    let c = verify_21agu(&a.rep, &a.model, 1).unwrap();
    let g = verify_generation(&a.rep, &a.model, 1, 1).unwrap();
    assert_eq!((c.verdict, c.rank_found), (g.verdict, g.rank_found));
}

mod basis_change {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn cubic() -> &'static Analysis {
        static CELL: OnceLock<Analysis> = OnceLock::new();
        CELL.get_or_init(|| run(1, 1, 1, 3))
    }

    fn elementary(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
        let mut u = IntMatrix::identity(n);
        for &(i, j, c) in ops {
            if i % n != j % n {
                let mut e = IntMatrix::identity(n);
                e.set(i % n, j % n, c);
                u = e.mul(&u).unwrap();
            }
        }
        u
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn verdicts_survive_unimodular_change(ops in prop::collection::vec((0usize..10, 0usize..10, -2i64..=2), 1..6)) {
            let a = cubic();
            let n = a.model.rank();
            let u = elementary(n, &ops);
            let ui = u.inverse_unimodular().unwrap();
            let mut rep = a.rep.clone();
            rep.matrices = rep.matrices.iter().map(|m| u.mul(m).unwrap().mul(&ui).unwrap()).collect();
            rep.vanishing = rep
                .vanishing
                .iter()
                .map(|d| d.as_ref().map(|d| HomologyClass(u.mul_vec(&d.0).unwrap())))
                .collect();
            rep.intersection = ui.transpose().mul(&rep.intersection).unwrap().mul(&ui).unwrap();
            let before = verify(&a.rep, &a.model, 1, 1, &CheckKind::ALL, Budget::default()).unwrap();
            let after = verify(&rep, &a.model, 1, 1, &CheckKind::ALL, Budget::default()).unwrap();
            for (x, y) in before.checks.iter().zip(&after.checks) {
                prop_assert_eq!(x.verdict, y.verdict);
                prop_assert_eq!(x.rank_found, y.rank_found);
            }
        }
    }
}
