use num_complex::Complex64;
use pencil_core::genericity::{certify, check_smooth, check_transversal, critical_points, PencilSpec, Precision};
use pencil_core::linalg::{mat3_mul_vec, projective_distance, Mat3};
use pencil_core::poly::{ExactPoly, MultiPoly, TermRecord};
use pencil_core::rng;

fn cubic(seed: u64) -> PencilSpec {
    PencilSpec::random(&mut rng::stream(seed, "spec"), 1, 1, 3).unwrap()
}

/// Exact text of a dyadic float.
fn dyadic(v: f64) -> String {
    let mut den: u64 = 1;
    let mut num = v;
    while num.fract() != 0.0 {
        num *= 2.0;
        den *= 2;
    }
    format!("{}/{}", num as i64, den)
}

fn to_exact(p: &MultiPoly) -> ExactPoly {
    let records: Vec<TermRecord> = p
        .terms()
        .map(|(e, c)| TermRecord { exps: *e, re: dyadic(c.re), im: dyadic(c.im) })
        .collect();
    ExactPoly::from_records(&records).unwrap()
}

#[test]
fn seeded_cubics_are_smooth_and_transversal() {
    let spec = cubic(1);
    assert!(check_smooth(spec.f()).passed());
    assert!(check_smooth(spec.g()).passed());
    let (verdict, points) = check_transversal(spec.f(), spec.g()).unwrap();
    assert!(verdict.passed());
    assert_eq!(points.len(), 9);
}

#[test]
fn twelve_critical_points_across_seeds() {
    for seed in 1..=5 {
        let data = critical_points(&cubic(seed), seed, Precision::Double).unwrap();
        assert_eq!(data.r(), 12, "seed {seed}");
        assert_eq!(data.base_points.len(), 9);
        assert!(data.min_value_separation() > 1e-6);
    }
}

#[test]
fn conic_critical_points_avoid_the_base_curves() {
    let spec = PencilSpec::random(&mut rng::stream(3, "spec"), 2, 1, 1).unwrap();
    let data = critical_points(&spec, 3, Precision::Double).unwrap();
    assert!(data.r() > 0);
    for pt in &data.points {
        let scale = pt.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(spec.f().evaluate(*pt).norm() > 1e-8 * scale);
        assert!(spec.g().evaluate(*pt).norm() > 1e-8 * scale.powi(2));
    }
    assert!(data.min_value_separation() > 1e-6);
}

#[test]
fn doubled_precision_reproduces_the_critical_data() {
    let spec = cubic(2);
    let (r1, d1) = certify(&spec, 2, Precision::Double).unwrap();
    let (r2, d2) = certify(&spec, 2, Precision::DoubleDouble).unwrap();
    let (d1, d2) = (d1.unwrap(), d2.unwrap());
    assert_eq!(d1.r(), d2.r());
    assert_eq!(r1.nondegenerate.verdict, r2.nondegenerate.verdict);
    for v in &d1.values {
        let best = d2.values.iter().map(|w| (v - w).norm()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-9 * v.norm().max(1.0));
    }
}

#[test]
fn critical_data_is_invariant_under_a_change_of_coordinates() {
    let spec = cubic(4);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let m: Mat3 = [[one, one, zero], [zero, one, zero], [zero, -one, one]];
    let moved = PencilSpec::new(
        to_exact(&spec.f().substitute_linear(&m)),
        to_exact(&spec.g().substitute_linear(&m)),
        1,
        1,
        3,
    )
    .unwrap();
    let before = critical_points(&spec, 4, Precision::Double).unwrap();
    let after = critical_points(&moved, 4, Precision::Double).unwrap();
    assert_eq!(before.r(), after.r());
    for (pt, v) in after.points.iter().zip(&after.values) {
        let image = mat3_mul_vec(&m, *pt);
        let k = before
            .points
            .iter()
            .position(|q| projective_distance(*q, image) < 1e-6)
            .expect("critical point has a preimage");
        assert!((before.values[k] - v).norm() < 1e-6 * v.norm().max(1.0));
    }
}
