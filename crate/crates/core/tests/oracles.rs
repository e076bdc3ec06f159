//! Values derived by hand or by an independent computation path.

use jetvariant::corpus::case;
use jetvariant::expr::{parse, RatFun, Rational};
use jetvariant::invariants::{commutator, decompose_commutator, Decomposition, Derivation};
use jetvariant::jet::{total_derivative, JetContext};
use jetvariant::orbitdim::{generic_orbit_dimension, hilbert_function, poincare_fit, FitStatus, HilbertProfile, Sampling};
use jetvariant::prolong::prolong_field;

#[test]
fn rotation_prolongation_matches_closed_form() {
    let sc = case("euclidean-curves").unwrap().load().unwrap();
    let ctx = &sc.ctx;
    let rotation = sc.algebra.fields.iter().find(|f| f.name == "rotation").unwrap();
    let p = prolong_field(rotation, 4, ctx);
    for (v, want) in [
        ("y1", "1 + y1^2"),
        ("y2", "3*y1*y2"),
        ("y3", "4*y1*y3 + 3*y2^2"),
        ("y4", "5*y1*y4 + 10*y2*y3"),
    ] {
        let got = &p.coeffs[&ctx.resolve(v).unwrap()];
        assert!(got.equals(&parse(want, ctx).unwrap()), "{v}");
    }
}

#[test]
fn arclength_derivatives_of_curvature_follow_recursion() {
    // With g = 1 + y1^2, K^(k) = P_k g^(-(3k+3)/2) and d/ds = g^(-1/2) D_x give
    // P_(k+1) = g D_x(P_k) - (3k+3) y1 y2 P_k, P_0 = y2.
    let sc = case("quadrics-monge").unwrap().load().unwrap();
    let ctx = &sc.ctx;
    let g = parse("1 + y1^2", ctx).unwrap();
    let y1y2 = parse("y1*y2", ctx).unwrap();
    let mut p = parse("y2", ctx).unwrap();
    for k in 0..3i64 {
        let next = g
            .mul(&total_derivative(&p, 0, ctx))
            .sub(&y1y2.scale(&Rational::from_integer((3 * k + 3).into())).mul(&p));
        let name = format!("P{}", k + 1);
        assert!(next.equals(&sc.expressions[&name]), "{name}");
        p = next;
    }
}

#[test]
fn monge_syzygy_vanishes_only_on_the_equation() {
    let sc = case("quadrics-monge").unwrap().load().unwrap();
    let eq = sc.equation.as_ref().unwrap();
    let s = &sc.expressions["syzygy"];
    assert!(!s.is_zero());
    assert!(eq.reduce(s).unwrap().is_zero());
}

#[test]
fn gas_dynamics_second_order_table() {
    // D_x(w w_y) = w_x w_y + w w_xy with w_xy = w_y^2 + w w_yy.
    let sc = case("flux-sl3").unwrap().load().unwrap();
    let eq = sc.equation.as_ref().unwrap();
    let ctx = &sc.ctx;
    let table = eq.table(2).unwrap();
    let w_xy = table.get(ctx.resolve("w_11").unwrap()).unwrap();
    let w_xx = table.get(ctx.resolve("w_20").unwrap()).unwrap();
    assert!(w_xy.equals(&parse("w_1^2 + w*w_2", ctx).unwrap()));
    assert!(w_xx.equals(&parse("2*w*w_1^2 + w^2*w_2", ctx).unwrap()));
}

#[test]
fn euclidean_hilbert_function_from_orbit_counting() {
    // Orbits of a 3-dimensional group acting freely from order 1 on: orbit
    // dimension min(k + 2, 3) in J^k of dimension k + 2.
    let sc = case("euclidean-curves").unwrap().load().unwrap();
    let p = hilbert_function(&sc.algebra, &sc.ctx, None, 6, 4, &Sampling::default()).unwrap();
    let ambient: Vec<usize> = (0..=6).map(|k| k + 2).collect();
    let orbit: Vec<usize> = (0..=6).map(|k| (k + 2).min(3)).collect();
    let expect = HilbertProfile::from_dimensions(orbit, ambient);
    assert_eq!(p.d, expect.d);
}

#[test]
fn translations_have_orbit_dimension_n_plus_m() {
    let ctx = JetContext::new(&["x", "y", "z"], &["u"]).unwrap();
    let fields = (0..4)
        .map(|i| {
            let c = |j: usize| if i == j { RatFun::one() } else { RatFun::zero() };
            jetvariant::prolong::PointVectorField::new(format!("t{i}"), vec![c(0), c(1), c(2)], vec![c(3)], &ctx).unwrap()
        })
        .collect();
    let g = jetvariant::invariants::LieAlgebraSpec::from_fields(fields);
    for k in 0..3 {
        assert_eq!(generic_orbit_dimension(&g, k, &ctx, None, 3, &Sampling::default()).unwrap(), 4);
    }
}

#[test]
fn poincare_fits_polynomial_growth() {
    // d_k = k + 1 has generating function 1/(1-z)^2.
    let p = HilbertProfile::from_counts((0..8).map(|k| k + 1).collect());
    let f = poincare_fit(&p);
    assert_eq!(f.status, FitStatus::Fits);
    assert_eq!(f.d, Some(1));
    assert_eq!(f.r, vec![1]);
    // d_k = binomial(k + 2, 2) has generating function 1/(1-z)^3.
    let p = HilbertProfile::from_counts((0..8).map(|k| (k + 1) * (k + 2) / 2).collect());
    assert_eq!(poincare_fit(&p).d, Some(2));
}

#[test]
fn commutator_of_scaled_total_derivative() {
    // [a D_x, D_y] = -D_y(a) D_x.
    let ctx = JetContext::new(&["x", "y"], &["u"]).unwrap();
    let a = parse("u_10*u + x^2", &ctx).unwrap();
    let d = Derivation::new(vec![a.clone(), RatFun::zero()]);
    let c = commutator(&d, &Derivation::total(1, 2), &ctx, None).unwrap();
    assert!(c.coefficients[0].equals(&total_derivative(&a, 1, &ctx).neg()));
    assert!(c.coefficients[1].is_zero());
    match decompose_commutator(&c, &[d], &ctx, None).unwrap() {
        Decomposition::Coefficients(r) => {
            let want = total_derivative(&a, 1, &ctx).neg().div(&a).unwrap();
            assert!(r[0].equals(&want));
        }
        Decomposition::NotInSpan => panic!("a D_x spans the commutator"),
    }
}
