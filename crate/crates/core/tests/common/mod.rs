//! Strategies and randomized law checks shared by the property tests and
//! the acceptance runner.

#![allow(dead_code)]

use jetvariant::equation::{Rule, SolvedEquation};
use jetvariant::expr::{parse, print, Monomial, Poly, RatFun, Rational, VarId};
use jetvariant::invariants::{apply_derivation, commutator, tresse_derivatives, Derivation};
use jetvariant::jet::{total_derivative, JetContext};
use jetvariant::prolong::{prolong_field, prolong_field_characteristic, PointVectorField};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

pub const CASES: u32 = 100;

pub fn plane() -> JetContext {
    JetContext::new(&["x", "y"], &["u"]).unwrap()
}

/// Coordinates of J^2 for one function of two variables.
pub fn jet_vars(ctx: &JetContext, max_order: u32) -> Vec<VarId> {
    ctx.coordinates(max_order)
}

fn poly_from(terms: Vec<(i64, Vec<u32>)>, vars: &[VarId]) -> Poly {
    Poly::from_terms(terms.into_iter().map(|(c, exps)| {
        let m = Monomial::from_pairs(vars.iter().cloned().zip(exps).filter(|(_, e)| *e > 0));
        (m, Rational::from_integer(c.into()))
    }))
}

/// A polynomial with up to `len` terms of degree at most 2 per variable.
pub fn poly_in(vars: Vec<VarId>, len: usize) -> impl Strategy<Value = Poly> {
    let n = vars.len();
    prop::collection::vec((-4i64..=4, prop::collection::vec(0u32..=2, n)), 1..=len)
        .prop_map(move |terms| poly_from(terms, &vars))
}

/// A sparse polynomial in at most 3 of the given variables.
pub fn sparse_poly(vars: Vec<VarId>, len: usize) -> impl Strategy<Value = Poly> {
    let pick = prop::sample::subsequence(vars, 1..=3);
    (pick, Just(len)).prop_flat_map(|(vs, len)| poly_in(vs, len))
}

pub fn ratfun(vars: Vec<VarId>) -> impl Strategy<Value = RatFun> {
    (sparse_poly(vars.clone(), 3), sparse_poly(vars, 2), 1i64..=3).prop_map(|(p, q, c)| {
        let q = q.add(&Poly::from_int(c));
        if q.is_zero() {
            RatFun::from_poly(p)
        } else {
            RatFun::new(p, q).unwrap()
        }
    })
}

pub fn point_field(ctx: &JetContext) -> impl Strategy<Value = PointVectorField> {
    let base: Vec<VarId> = ctx.coordinates(0);
    let c = ctx.clone();
    prop::collection::vec(sparse_poly(base, 2), 3).prop_map(move |ps| {
        let rf: Vec<RatFun> = ps.into_iter().map(RatFun::from_poly).collect();
        PointVectorField::new("X", rf[..2].to_vec(), rf[2..].to_vec(), &c).unwrap()
    })
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn finish<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub fn ring_laws() -> Result<(), String> {
    let ctx = plane();
    let vars = jet_vars(&ctx, 1);
    let s = (ratfun(vars.clone()), ratfun(vars.clone()), ratfun(vars));
    finish(runner().run(&s, |(a, b, c)| {
        check(a.add(&b).equals(&b.add(&a)), "a+b = b+a")?;
        check(a.mul(&b).equals(&b.mul(&a)), "ab = ba")?;
        check(a.add(&b).add(&c).equals(&a.add(&b.add(&c))), "associative +")?;
        check(a.mul(&b).mul(&c).equals(&a.mul(&b.mul(&c))), "associative *")?;
        check(a.mul(&b.add(&c)).equals(&a.mul(&b).add(&a.mul(&c))), "distributive")?;
        check(a.sub(&a).is_zero(), "a-a = 0")?;
        check(a.mul(&RatFun::one()).equals(&a), "a*1 = a")?;
        if !b.is_zero() {
            check(a.div(&b).unwrap().mul(&b).equals(&a), "(a/b)*b = a")?;
        }
        Ok(())
    }))
}

pub fn leibniz() -> Result<(), String> {
    let ctx = plane();
    let vars = jet_vars(&ctx, 2);
    let s = (ratfun(vars.clone()), ratfun(vars.clone()), 0usize..2, prop::sample::select(vars));
    finish(runner().run(&s, |(f, g, i, v)| {
        let lhs = total_derivative(&f.mul(&g), i, &ctx);
        let rhs = total_derivative(&f, i, &ctx).mul(&g).add(&f.mul(&total_derivative(&g, i, &ctx)));
        check(lhs.equals(&rhs), "D_i(fg) = D_i(f) g + f D_i(g)")?;
        let lhs = f.mul(&g).partial(v);
        let rhs = f.partial(v).mul(&g).add(&f.mul(&g.partial(v)));
        check(lhs.equals(&rhs), "partial Leibniz")
    }))
}

pub fn total_derivatives_commute() -> Result<(), String> {
    let ctx = plane();
    let vars = jet_vars(&ctx, 2);
    finish(runner().run(&ratfun(vars), |f| {
        let xy = total_derivative(&total_derivative(&f, 0, &ctx), 1, &ctx);
        let yx = total_derivative(&total_derivative(&f, 1, &ctx), 0, &ctx);
        check(xy.equals(&yx), "[D_x, D_y] f = 0")
    }))
}

pub fn prolongation() -> Result<(), String> {
    let ctx = plane();
    finish(runner().run(&(point_field(&ctx), 1u32..=3), |(x, k)| {
        let p = prolong_field(&x, k, &ctx);
        let q = prolong_field(&x, k + 1, &ctx);
        let c = prolong_field_characteristic(&x, k, &ctx);
        for (v, a) in &p.coeffs {
            check(q.coeff(*v).is_some_and(|b| a.equals(b)), "order-k part is stable")?;
            check(c.coeff(*v).map_or(a.is_zero(), |b| a.equals(b)), "two formulas agree")?;
            let ord = if v.is_jet() { v.order() } else { 0 };
            check(a.max_order() <= ord.max(1), "coefficient order is local")?;
        }
        for (v, b) in &c.coeffs {
            check(p.coeff(*v).is_some() || b.is_zero(), "no extra coordinates")?;
        }
        Ok(())
    }))
}

pub fn gas_dynamics(ctx: &JetContext) -> SolvedEquation {
    let lead = ctx.resolve("u_10").unwrap();
    SolvedEquation::new(ctx, vec![Rule { lead, rhs: parse("u*u_01", ctx).unwrap() }]).unwrap()
}

pub fn reduction() -> Result<(), String> {
    let ctx = plane();
    let eq = gas_dynamics(&ctx);
    let vars = jet_vars(&ctx, 2);
    finish(runner().run(&(ratfun(vars.clone()), ratfun(vars)), |(f, g)| {
        let rf = eq.reduce(&f).unwrap();
        let rg = eq.reduce(&g).unwrap();
        check(eq.reduce(&rf).unwrap().equals(&rf), "idempotent")?;
        check(eq.reduce(&f.add(&g)).unwrap().equals(&rf.add(&rg)), "additive")?;
        check(eq.reduce(&f.mul(&g)).unwrap().equals(&rf.mul(&rg)), "multiplicative")?;
        for v in rf.vars() {
            check(!eq.is_constrained(v), "normal form is parametric")?;
        }
        Ok(())
    }))
}

fn order_one_pair(ctx: &JetContext) -> impl Strategy<Value = (RatFun, RatFun)> {
    let vars = jet_vars(ctx, 1);
    (sparse_poly(vars.clone(), 1), sparse_poly(vars, 1)).prop_map(|(a, b)| {
        (
            RatFun::from_poly(a.add(&Poly::var(VarId::independent(0)))),
            RatFun::from_poly(b.add(&Poly::var(VarId::independent(1)))),
        )
    })
}

pub fn tresse() -> Result<(), String> {
    let ctx = plane();
    let s = (order_one_pair(&ctx), sparse_poly(jet_vars(&ctx, 1), 2).prop_map(RatFun::from_poly));
    finish(runner().run(&s, |((f1, f2), g)| {
        let Ok(ds) = tresse_derivatives(&[f1.clone(), f2.clone()], &ctx, None) else {
            return Ok(());
        };
        for (i, d) in ds.iter().enumerate() {
            for (j, f) in [&f1, &f2].into_iter().enumerate() {
                let v = apply_derivation(d, f, &ctx, None).unwrap();
                let want = if i == j { RatFun::one() } else { RatFun::zero() };
                check(v.equals(&want), "duality")?;
            }
        }
        let c = commutator(&ds[0], &ds[1], &ctx, None).unwrap();
        check(c.is_zero(), "Tresse derivatives commute")?;
        let a = apply_derivation(&ds[0], &apply_derivation(&ds[1], &g, &ctx, None).unwrap(), &ctx, None).unwrap();
        let b = apply_derivation(&ds[1], &apply_derivation(&ds[0], &g, &ctx, None).unwrap(), &ctx, None).unwrap();
        check(a.equals(&b), "commute on a test function")
    }))
}

fn derivation(ctx: &JetContext) -> impl Strategy<Value = Derivation> {
    prop::collection::vec(sparse_poly(jet_vars(ctx, 1), 2), 2)
        .prop_map(|ps| Derivation::new(ps.into_iter().map(RatFun::from_poly).collect()))
}

fn add(a: &Derivation, b: &Derivation) -> Derivation {
    Derivation::new(a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x.add(y)).collect())
}

pub fn commutators() -> Result<(), String> {
    let ctx = plane();
    let s = (derivation(&ctx), derivation(&ctx), derivation(&ctx));
    finish(runner().run(&s, |(a, b, c)| {
        let ab = commutator(&a, &b, &ctx, None).unwrap();
        let ba = commutator(&b, &a, &ctx, None).unwrap();
        let neg = Derivation::new(ba.coefficients.iter().map(|x| x.neg()).collect());
        check(ab.equals(&neg), "antisymmetric")?;
        let lhs = commutator(&a, &add(&b, &c), &ctx, None).unwrap();
        let rhs = add(&ab, &commutator(&a, &c, &ctx, None).unwrap());
        check(lhs.equals(&rhs), "bilinear")
    }))
}

pub fn derivation_leibniz() -> Result<(), String> {
    let ctx = plane();
    let vars = jet_vars(&ctx, 1);
    let s = (derivation(&ctx), ratfun(vars.clone()), ratfun(vars));
    finish(runner().run(&s, |(d, f, g)| {
        let lhs = apply_derivation(&d, &f.mul(&g), &ctx, None).unwrap();
        let rhs = apply_derivation(&d, &f, &ctx, None)
            .unwrap()
            .mul(&g)
            .add(&f.mul(&apply_derivation(&d, &g, &ctx, None).unwrap()));
        check(lhs.equals(&rhs), "derivation Leibniz")
    }))
}

pub fn print_round_trip() -> Result<(), String> {
    let ctx = plane()
        .with_alias_named("u_x", "u_10")
        .unwrap()
        .with_alias_named("u_y", "u_01")
        .unwrap();
    let vars = jet_vars(&ctx, 2);
    finish(runner().run(&ratfun(vars), |f| {
        let text = print(&f, &ctx);
        let back = parse(&text, &ctx).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        check(back.equals(&f), "print then parse is the identity")?;
        let json = serde_json::to_string(&serde_json::json!({ "value": text })).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let again = parse(v["value"].as_str().unwrap(), &ctx).unwrap();
        check(again.equals(&f), "JSON round trip")
    }))
}

/// Every suite, in reporting order.
pub type Suite = fn() -> Result<(), String>;

pub const SUITES: &[(&str, Suite)] = &[
    ("ring laws", ring_laws),
    ("Leibniz rule", leibniz),
    ("total derivatives commute", total_derivatives_commute),
    ("prolongation locality and agreement", prolongation),
    ("reduction idempotent and homomorphic", reduction),
    ("Tresse duality and commutativity", tresse),
    ("commutator bilinear and antisymmetric", commutators),
    ("derivation Leibniz rule", derivation_leibniz),
    ("print/parse round trip", print_round_trip),
];
