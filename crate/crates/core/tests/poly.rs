use num_complex::Complex64;
use pencil_core::genericity::PencilSpec;
use pencil_core::numsolve::uni_roots;
use pencil_core::poly::{
    discriminant_y, fiber_polynomial, resultant_y, sylvester_det, BiPoly, ChartMap, ExactPoly, MultiPoly, TermRecord, UniPoly,
};
use pencil_core::{rng, Error};
use proptest::prelude::*;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn monomials(degree: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for i in 0..=degree {
        for j in 0..=degree - i {
            out.push([i, j, degree - i - j]);
        }
    }
    out
}

fn form(degree: u32, coeffs: &[(f64, f64)]) -> MultiPoly {
    MultiPoly::new(degree, monomials(degree).into_iter().zip(coeffs).map(|(e, (re, im))| (e, c(*re, *im)))).unwrap()
}

fn exact(records: &[([u32; 3], &str)]) -> ExactPoly {
    let records: Vec<TermRecord> = records
        .iter()
        .map(|(e, re)| TermRecord { exps: *e, re: re.to_string(), im: "0".into() })
        .collect();
    ExactPoly::from_records(&records).unwrap()
}

fn random_bipoly<R: Rng>(rng: &mut R, x_degree: usize, y_degree: usize) -> BiPoly {
    BiPoly::new(
        (0..=y_degree)
            .map(|j| {
                let k = if j == y_degree { 0 } else { x_degree };
                UniPoly::new((0..=k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            })
            .collect(),
    )
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| c(re, im))
}

fn coefficients() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 21)
}

proptest! {
    #[test]
    fn evaluation_is_homogeneous(degree in 1u32..6, coeffs in coefficients(), pt in prop::array::uniform3(complex()), lambda in complex()) {
        let p = form(degree, &coeffs);
        let scaled = pt.map(|z| z * lambda);
        let lhs = p.evaluate(scaled);
        let rhs = lambda.powu(degree) * p.evaluate(pt);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn euler_relation(degree in 1u32..6, coeffs in coefficients(), pt in prop::array::uniform3(complex())) {
        let p = form(degree, &coeffs);
        let grad = p.gradient();
        let lhs: Complex64 = (0..3).map(|i| pt[i] * grad[i].evaluate(pt)).sum();
        let rhs = p.evaluate(pt) * degree as f64;
        let scale: f64 = p.terms().map(|(_, v)| v.norm()).sum::<f64>() * pt.iter().map(|z| z.norm()).fold(1.0, f64::max).powi(degree as i32);
        prop_assert!((lhs - rhs).norm() < 1e-10 * scale * degree as f64);
    }

    #[test]
    fn resultant_is_antisymmetric_up_to_sign(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut rng = rng::stream(seed, "resultant");
        let a = random_bipoly(&mut rng, 2, m);
        let b = random_bipoly(&mut rng, 2, n);
        let ab = resultant_y(&a, &b);
        let ba = resultant_y(&b, &a);
        let sign = if (m * n) % 2 == 0 { 1.0 } else { -1.0 };
        let scale = ab.norm_inf().max(1.0);
        for i in 0..=ab.degree().max(ba.degree()) {
            prop_assert!((ab.coeff(i) - ba.coeff(i) * sign).norm() < 1e-9 * scale);
        }
    }
}

#[test]
fn resultant_matches_root_products() {
    let mut rng = rng::stream(11, "resultant");
    let a = random_bipoly(&mut rng, 2, 3);
    let b = random_bipoly(&mut rng, 2, 2);
    let res = resultant_y(&a, &b);
    for _ in 0..5 {
        let x = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (ax, bx) = (a.at_x(x), b.at_x(x));
        // Res(A, B) = lc(A)^deg B * prod B(alpha) over the roots of A
        let roots = uni_roots(&ax).unwrap().expanded();
        let oracle = roots.iter().fold(ax.leading().powu(bx.degree() as u32), |acc, r| acc * bx.eval(*r));
        let got = res.eval(x);
        assert!((got - oracle).norm() < 1e-10 * oracle.norm().max(1.0), "{got} vs {oracle}");
    }
}

/// Newton on the pointwise Sylvester determinant of `P` and `P_y`.
fn polish(p: &BiPoly, mut x: Complex64) -> Complex64 {
    let py = p.deriv_y();
    let m = p.y_degree();
    let d = |x: Complex64| sylvester_det(&p.at_x_formal(x, m + 1), &py.at_x_formal(x, m));
    for _ in 0..4 {
        let h = 1e-7 * (1.0 + x.norm());
        let slope = (d(x + h) - d(x - h)) / (2.0 * h);
        x -= d(x) / slope;
    }
    x
}

#[test]
fn discriminant_vanishes_exactly_at_double_roots() {
    for seed in 0..10 {
        let mut rng = rng::stream(seed, "disc");
        let p = random_bipoly(&mut rng, 2, 2);
        let disc = discriminant_y(&p);
        let roots = uni_roots(&disc).unwrap();
        assert!(!roots.roots.is_empty());
        for x0 in &roots.roots {
            let x0 = polish(&p, *x0);
            let fiber = uni_roots(&p.at_x(x0)).unwrap();
            assert!(fiber.multiplicities.iter().any(|m| *m >= 2), "seed {seed}: no double root over {x0}");
        }
        let generic = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if roots.roots.iter().all(|r| (r - generic).norm() > 1e-3) {
            assert!(uni_roots(&p.at_x(generic)).unwrap().is_simple());
        }
    }
}

#[test]
fn conic_fiber_polynomial() {
    let f = exact(&[([1, 0, 0], "1"), ([0, 0, 1], "1")]);
    let g = exact(&[([2, 0, 0], "1"), ([0, 2, 0], "1"), ([0, 0, 2], "1")]);
    let spec = PencilSpec::new(f, g, 2, 1, 1).unwrap();
    let p = fiber_polynomial(&spec, c(1.0, 0.0), &ChartMap::identity()).unwrap();
    // (x + 1)^2 - (x^2 + y^2 + 1) = 2x - y^2
    let expected = BiPoly::from_terms([(1, 0, c(2.0, 0.0)), (0, 2, c(-1.0, 0.0))]);
    assert_eq!(p.total_degree(), 2);
    assert!(p.sub(&expected).norm_inf() < 1e-14);
}

#[test]
fn cubic_fiber_polynomial_is_the_dehomogenized_difference() {
    let f = exact(&[([3, 0, 0], "1"), ([0, 3, 0], "1"), ([0, 0, 3], "1")]);
    let mut rng = rng::stream(4, "spec");
    let g = PencilSpec::random(&mut rng, 1, 1, 3).unwrap().g_exact().clone();
    let spec = PencilSpec::new(f, g, 1, 1, 3).unwrap();
    let b = c(2.0, 0.0);
    let p = fiber_polynomial(&spec, b, &ChartMap::identity()).unwrap();
    assert_eq!(p.total_degree(), 3);
    for _ in 0..5 {
        let (x, y) = (c(rng.gen_range(-1.0..1.0), 0.3), c(0.1, rng.gen_range(-1.0..1.0)));
        let pt = [x, y, c(1.0, 0.0)];
        let direct = spec.f().evaluate(pt) - b * spec.g().evaluate(pt);
        assert!((p.eval(x, y) - direct).norm() < 1e-12);
    }
}

#[test]
fn random_chart_restores_the_y_degree() {
    // no y^3 term in either form
    let f = exact(&[([3, 0, 0], "1"), ([0, 0, 3], "1"), ([1, 1, 1], "1")]);
    let g = exact(&[([3, 0, 0], "1/2"), ([0, 2, 1], "1"), ([0, 0, 3], "-1")]);
    let spec = PencilSpec::new(f, g, 1, 1, 3).unwrap();
    let b = c(0.5, 0.25);
    assert!(matches!(fiber_polynomial(&spec, b, &ChartMap::identity()), Err(Error::InadmissibleChart(_))));
    let chart = ChartMap::random(&mut rng::stream(1, "chart"));
    let p = fiber_polynomial(&spec, b, &chart).unwrap();
    assert_eq!(p.y_degree(), 3);
}

#[test]
fn cubic_fiber_has_six_simple_branch_points() {
    let spec = PencilSpec::random(&mut rng::stream(1, "spec"), 1, 1, 3).unwrap();
    let chart = ChartMap::random(&mut rng::stream(1, "chart"));
    let p = fiber_polynomial(&spec, c(0.3, -0.7), &chart).unwrap();
    let disc = uni_roots(&discriminant_y(&p)).unwrap();
    assert_eq!(disc.roots.len(), 6);
    assert!(disc.is_simple());
}
