use num_complex::Complex64;
use pencil_core::fiber::{build_fiber, FiberModel};
use pencil_core::genericity::{critical_points, PencilSpec, Precision};
use pencil_core::fiber::PointKind;
use pencil_core::lattice::{rank_q, skew_normal_form};
use pencil_core::linalg::projective_distance;
use pencil_core::numsolve::TrackerConfig;
use pencil_core::pipeline::base_value;
use pencil_core::rng;

fn cubic() -> (PencilSpec, FiberModel) {
    cubic_with_chart(7)
}

fn cubic_with_chart(seed: u64) -> (PencilSpec, FiberModel) {
    let spec = PencilSpec::random(&mut rng::stream(1, "spec"), 1, 1, 3).unwrap();
    let data = critical_points(&spec, 1, Precision::Double).unwrap();
    let b = data.values.iter().sum::<Complex64>() / data.r() as f64 + Complex64::new(0.0, 0.37);
    let model = build_fiber(&spec, b, &data.base_points, seed, &TrackerConfig::default()).unwrap();
    (spec, model)
}

fn conic() -> FiberModel {
    let spec = PencilSpec::random(&mut rng::stream(3, "spec"), 2, 1, 1).unwrap();
    let data = critical_points(&spec, 3, Precision::Double).unwrap();
    let b = base_value(&spec, &data, 3);
    build_fiber(&spec, b, &data.base_points, 3, &TrackerConfig::default()).unwrap()
}

#[test]
fn cubic_fiber_is_a_nine_times_punctured_torus() {
    let (_, model) = cubic();
    assert_eq!(model.genus, 1);
    assert_eq!(model.branch_positions().len(), 6);
    assert_eq!(model.rank(), 10);
    let j = model.intersection_matrix();
    assert!(j.is_antisymmetric());
    assert_eq!(rank_q(&j.to_rows()), 2);
    assert_eq!(j.get(0, 1), 1);
}

#[test]
fn puncture_loops_span_the_radical_and_sum_to_zero() {
    let (_, model) = cubic();
    let j = model.intersection_matrix();
    let mut total = vec![0i64; model.rank()];
    for r in 0..9 {
        let c = model.puncture_class(r).unwrap();
        assert!(j.mul_vec(&c.0).unwrap().iter().all(|v| *v == 0));
        total.iter_mut().zip(&c.0).for_each(|(t, v)| *t += v);
    }
    assert!(total.iter().all(|v| *v == 0));
    for r in 0..8 {
        let mut e = vec![0i64; 10];
        e[2 + r] = 1;
        assert_eq!(model.puncture_class(r).unwrap().0, e);
    }
}

#[test]
fn basis_paths_reproduce_the_basis() {
    let (_, model) = cubic();
    let paths = model.basis_paths();
    for (t, p) in paths.iter().enumerate() {
        let mut e = vec![0i64; model.rank()];
        e[t] = 1;
        assert_eq!(model.express(p).unwrap().0, e);
        let neg: Vec<i64> = e.iter().map(|v| -v).collect();
        assert_eq!(model.express(&p.reversed()).unwrap().0, neg);
    }
    for a in 0..paths.len() {
        for b in 0..paths.len() {
            assert_eq!(model.intersect_paths(&paths[a], &paths[b]).unwrap(), model.intersection_matrix().get(a, b));
        }
    }
}


#[test]
fn conic_fiber_is_a_twice_punctured_sphere() {
    let model = conic();
    assert_eq!(model.genus, 0);
    assert_eq!(model.rank(), 1);
    assert_eq!(model.intersection_matrix().to_rows(), vec![vec![0]]);
    let a = model.puncture_class(0).unwrap().0;
    let b = model.puncture_class(1).unwrap().0;
    assert!(a == vec![1] || a == vec![-1]);
    assert_eq!(b, vec![-a[0]]);
}

#[test]
fn concatenated_cycles_add() {
    let (_, model) = cubic();
    let paths = model.basis_paths();
    let mut e = vec![0i64; model.rank()];
    e[0] = 1;
    e[1] = 1;
    assert_eq!(model.express(&paths[0].concat(&paths[1])).unwrap().0, e);
}

#[test]
fn intersection_form_does_not_depend_on_the_chart() {
    let forms: Vec<Vec<i64>> = [7, 8, 9]
        .iter()
        .map(|&seed| {
            let (_, model) = cubic_with_chart(seed);
            assert_eq!(model.genus, (model.degree - 1) * (model.degree - 2) / 2);
            skew_normal_form(model.intersection_matrix()).unwrap().1
        })
        .collect();
    assert_eq!(forms[0], vec![1]);
    assert!(forms.iter().all(|f| *f == forms[0]));
}

#[test]
fn punctures_sit_over_the_base_points() {
    let spec = PencilSpec::random(&mut rng::stream(1, "spec"), 1, 1, 3).unwrap();
    let data = critical_points(&spec, 1, Precision::Double).unwrap();
    let (_, model) = cubic();
    let mut found = 0;
    for p in &model.points {
        if let PointKind::Puncture { index, y, .. } = p.kind {
            let pt = model.chart.to_projective(p.x, y);
            assert!(projective_distance(pt, data.base_points[index]) < 1e-8);
            found += 1;
        }
    }
    assert_eq!(found, data.base_points.len());
}
