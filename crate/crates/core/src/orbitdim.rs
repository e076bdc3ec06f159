//! Orbit dimensions at sampled jets, Hilbert functions, Poincaré fits.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::equation::SolvedEquation;
use crate::expr::{RatFun, Rational, VarId};
use crate::invariants::{check_symmetries, prolong_for, InvariantsError, LieAlgebraSpec};
use crate::jet::JetContext;
use crate::linalg::rank;
use crate::prolong::ProlongedVectorField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Invariants(#[from] InvariantsError),
    #[error("no admissible point after {0} retries")]
    ExhaustedRetries(u32),
    #[error("a generator coefficient is singular at the point")]
    SingularPoint,
    #[error("point has order {point}, need {needed}")]
    PointOrder { point: u32, needed: u32 },
    #[error("trials must be at least 1")]
    NoTrials,
}

impl From<crate::equation::EquationError> for OrbitError {
    fn from(e: crate::equation::EquationError) -> Self {
        OrbitError::Invariants(e.into())
    }
}

type Result<T> = std::result::Result<T, OrbitError>;

/// Where and how points are drawn.
#[derive(Debug, Clone)]
pub struct Sampling {
    pub seed: u64,
    /// Inclusive integer range.
    pub range: (i64, i64),
    /// Expressions that must be finite and nonzero at every sample of
    /// at least their order.
    pub exclude: Vec<RatFun>,
    pub retries: u32,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            seed: 1,
            range: (-10, 10),
            exclude: Vec::new(),
            retries: 100,
        }
    }
}

/// Exact values of the coordinates of `J^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub order: u32,
    pub values: BTreeMap<VarId, Rational>,
}

impl JetPoint {
    pub fn get(&self, v: VarId) -> Option<Rational> {
        self.values.get(&v).cloned()
    }

    pub fn eval(&self, f: &RatFun) -> Option<Rational> {
        f.evaluate(|v| self.get(v)).ok()
    }
}

fn draw(ctx: &JetContext, k: u32, eq: Option<&SolvedEquation>, s: &Sampling, rng: &mut ChaCha8Rng) -> Result<Option<JetPoint>> {
    let mut values = BTreeMap::new();
    let coords = ctx.coordinates(k);
    for &v in &coords {
        if eq.is_none_or(|e| !e.is_constrained(v)) {
            let x: i64 = rng.gen_range(s.range.0..=s.range.1);
            values.insert(v, Rational::from_integer(x.into()));
        }
    }
    if let Some(eq) = eq {
        if !eq.rules().is_empty() {
            let table = eq.table(k)?;
            for &v in &coords {
                if let Some(rhs) = table.get(v) {
                    match rhs.evaluate(|w| values.get(&w).cloned()) {
                        Ok(val) => {
                            values.insert(v, val);
                        }
                        Err(_) => return Ok(None),
                    }
                }
            }
        }
    }
    let p = JetPoint { order: k, values };
    for f in s.exclude.iter().filter(|f| f.max_order() <= k) {
        match p.eval(f) {
            Some(val) if !val.is_zero() => {}
            _ => return Ok(None),
        }
    }
    Ok(Some(p))
}

/// Deterministic sample for `(seed, trial)`; constrained coordinates are
/// filled from the reduction table.
pub fn sample_point(
    ctx: &JetContext,
    k: u32,
    eq: Option<&SolvedEquation>,
    s: &Sampling,
    trial: u64,
) -> Result<JetPoint> {
    sample_point_where(ctx, k, eq, s, trial, |_| true)
}

/// As [`sample_point`], additionally rejecting points failing `accept`.
pub fn sample_point_where(
    ctx: &JetContext,
    k: u32,
    eq: Option<&SolvedEquation>,
    s: &Sampling,
    trial: u64,
    accept: impl Fn(&JetPoint) -> bool,
) -> Result<JetPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(trial);
    for _ in 0..=s.retries {
        if let Some(p) = draw(ctx, k, eq, s, &mut rng)? {
            if accept(&p) {
                return Ok(p);
            }
        }
    }
    Err(OrbitError::ExhaustedRetries(s.retries))
}

/// Generator coefficient vectors evaluated at a point.
#[derive(Debug, Clone)]
pub struct OrbitTangentSample {
    pub columns: Vec<VarId>,
    pub rows: Vec<Vec<Rational>>,
    pub rank: usize,
}

fn columns_for(ctx: &JetContext, k: u32, eq: Option<&SolvedEquation>) -> Vec<VarId> {
    match eq {
        Some(eq) => eq.parametric_coordinates(k),
        None => ctx.coordinates(k),
    }
}

fn prolonged_generators(
    g: &LieAlgebraSpec,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<Vec<ProlongedVectorField>> {
    let gens = g.generators(k, ctx);
    check_symmetries(&gens, eq)?;
    let out: std::result::Result<Vec<_>, InvariantsError> =
        gens.par_iter().map(|x| prolong_for(x, k, ctx, eq)).collect();
    Ok(out?)
}

fn evaluate_rows(
    gens: &[ProlongedVectorField],
    columns: &[VarId],
    p: &JetPoint,
) -> Option<Vec<Vec<Rational>>> {
    gens.iter()
        .map(|x| {
            columns
                .iter()
                .map(|v| match x.coeffs.get(v) {
                    None => Some(Rational::zero()),
                    Some(c) => p.eval(c),
                })
                .collect()
        })
        .collect()
}

/// Tangent space of the orbit through `p` in `J^k`.
pub fn orbit_tangent_at(
    g: &LieAlgebraSpec,
    p: &JetPoint,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<OrbitTangentSample> {
    if p.order < k {
        return Err(OrbitError::PointOrder {
            point: p.order,
            needed: k,
        });
    }
    let gens = prolonged_generators(g, k, ctx, eq)?;
    let columns = columns_for(ctx, k, eq);
    let rows = evaluate_rows(&gens, &columns, p).ok_or(OrbitError::SingularPoint)?;
    let r = rank(&rows);
    Ok(OrbitTangentSample {
        columns,
        rows,
        rank: r,
    })
}

/// Exact dimension of the orbit through `p` in `J^k` (on the equation when
/// one is given).
pub fn orbit_dimension_at(
    g: &LieAlgebraSpec,
    p: &JetPoint,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<usize> {
    Ok(orbit_tangent_at(g, p, k, ctx, eq)?.rank)
}

/// Orbit ranks at orders `0..=k` for each trial, from one order-`k` sample.
fn ranks_by_order(
    g: &LieAlgebraSpec,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
    trials: u32,
    s: &Sampling,
) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    if trials == 0 {
        return Err(OrbitError::NoTrials);
    }
    let gens = prolonged_generators(g, k, ctx, eq)?;
    let columns = columns_for(ctx, k, eq);
    let ambient: Vec<usize> = (0..=k)
        .map(|r| columns.iter().filter(|v| v.order() <= r).count())
        .collect();
    let per_trial: Vec<Result<Vec<usize>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let p = sample_point_where(ctx, k, eq, s, t, |p| {
                evaluate_rows(&gens, &columns, p).is_some()
            })?;
            let rows = evaluate_rows(&gens, &columns, &p).expect("accepted point");
            Ok((0..=k)
                .map(|r| {
                    let cut = ambient[r as usize];
                    let sub: Vec<Vec<Rational>> = rows.iter().map(|row| row[..cut].to_vec()).collect();
                    rank(&sub)
                })
                .collect())
        })
        .collect();
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((ambient, per_trial))
}

/// Maximal orbit dimension over `trials` seeded samples.
pub fn generic_orbit_dimension(
    g: &LieAlgebraSpec,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
    trials: u32,
    s: &Sampling,
) -> Result<usize> {
    let (_, per_trial) = ranks_by_order(g, k, ctx, eq, trials, s)?;
    Ok(per_trial.iter().map(|r| r[k as usize]).max().unwrap_or(0))
}

/// `d_k`, generic orbit dimensions and ambient dimensions for `k = 0..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertProfile {
    pub d: Vec<i64>,
    pub orbit: Vec<usize>,
    pub ambient: Vec<usize>,
}

impl HilbertProfile {
    pub fn from_dimensions(orbit: Vec<usize>, ambient: Vec<usize>) -> Self {
        let codim: Vec<i64> = orbit
            .iter()
            .zip(&ambient)
            .map(|(&o, &a)| a as i64 - o as i64)
            .collect();
        let d = (0..codim.len())
            .map(|k| if k == 0 { codim[0] } else { codim[k] - codim[k - 1] })
            .collect();
        HilbertProfile { d, orbit, ambient }
    }

    pub fn from_counts(d: Vec<i64>) -> Self {
        HilbertProfile {
            d,
            orbit: Vec::new(),
            ambient: Vec::new(),
        }
    }
}

pub fn hilbert_function(
    g: &LieAlgebraSpec,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
    max_order: u32,
    trials: u32,
    s: &Sampling,
) -> Result<HilbertProfile> {
    let (ambient, per_trial) = ranks_by_order(g, max_order, ctx, eq, trials, s)?;
    let orbit = (0..=max_order as usize)
        .map(|k| per_trial.iter().map(|r| r[k]).max().unwrap_or(0))
        .collect();
    Ok(HilbertProfile::from_dimensions(orbit, ambient))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStatus {
    Fits,
    Unstable,
}

/// `Σ d_k z^k = R(z) / (1 − z)^{d+1}` inside the window `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoincareFit {
    pub status: FitStatus,
    pub d: Option<usize>,
    pub r: Vec<i64>,
    pub window: (usize, usize),
}

/// Smallest `d` for which `(1 − z)^{d+1} Σ d_k z^k` ends in at least two
/// zero coefficients inside the window.
pub fn poincare_fit(profile: &HilbertProfile) -> PoincareFit {
    let seq = &profile.d;
    let len = seq.len();
    let window = (0, len.saturating_sub(1));
    let mut cur: Vec<i64> = seq.clone();
    if len >= 4 {
        for d in 0..len - 2 {
            // multiply by (1 - z)
            cur = (0..len)
                .map(|i| cur[i] - if i > 0 { cur[i - 1] } else { 0 })
                .collect();
            if cur[len - 1] == 0 && cur[len - 2] == 0 {
                let last = cur.iter().rposition(|&c| c != 0);
                let r = match last {
                    Some(i) => cur[..=i].to_vec(),
                    None => Vec::new(),
                };
                return PoincareFit {
                    status: FitStatus::Fits,
                    d: Some(d),
                    r,
                    window,
                };
            }
        }
    }
    PoincareFit {
        status: FitStatus::Unstable,
        d: None,
        r: Vec::new(),
        window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::Rule;
    use crate::expr::parse;
    use crate::prolong::PointVectorField;

    fn field(ctx: &JetContext, alpha: &[&str], beta: &[&str]) -> PointVectorField {
        let p = |s: &&str| parse(s, ctx).unwrap();
        PointVectorField::new("X", alpha.iter().map(p).collect(), beta.iter().map(p).collect(), ctx).unwrap()
    }

    fn se2(ctx: &JetContext) -> LieAlgebraSpec {
        LieAlgebraSpec::from_fields(vec![
            field(ctx, &["1"], &["0"]),
            field(ctx, &["0"], &["1"]),
            field(ctx, &["-y"], &["x"]),
        ])
    }

    #[test]
    fn sampling_is_deterministic() {
        let ctx = JetContext::curves();
        let s = Sampling::default();
        let a = sample_point(&ctx, 2, None, &s, 0).unwrap();
        let b = sample_point(&ctx, 2, None, &s, 0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_point(&ctx, 2, None, &s, 1).unwrap());
        assert_eq!(a.values.len(), 4);
        for v in a.values.values() {
            assert!(v.is_integer() && v.numer().magnitude() <= &10u32.into());
        }
    }

    #[test]
    fn exclusions_are_respected() {
        let ctx = JetContext::curves();
        let s = Sampling {
            range: (0, 1),
            exclude: vec![parse("y2", &ctx).unwrap()],
            ..Sampling::default()
        };
        for t in 0..10 {
            let p = sample_point(&ctx, 2, None, &s, t).unwrap();
            assert_eq!(p.get(ctx.u(0, &[2])).unwrap(), Rational::from_integer(1.into()));
        }
        let never = Sampling {
            range: (0, 0),
            exclude: vec![parse("y2", &ctx).unwrap()],
            retries: 5,
            ..Sampling::default()
        };
        assert_eq!(sample_point(&ctx, 2, None, &never, 0), Err(OrbitError::ExhaustedRetries(5)));
    }

    #[test]
    fn constrained_coordinates_follow_the_table() {
        let ctx = JetContext::new(&["x", "y"], &["w"]).unwrap();
        let e = |s: &str| parse(s, &ctx).unwrap();
        let eq = SolvedEquation::new(
            &ctx,
            vec![Rule {
                lead: ctx.resolve("w_10").unwrap(),
                rhs: e("w*w_01"),
            }],
        )
        .unwrap();
        let p = sample_point(&ctx, 2, Some(&eq), &Sampling::default(), 3).unwrap();
        let w = p.get(ctx.resolve("w").unwrap()).unwrap();
        let wy = p.get(ctx.resolve("w_01").unwrap()).unwrap();
        assert_eq!(p.get(ctx.resolve("w_10").unwrap()).unwrap(), w * wy);
        assert_eq!(p.eval(&e("w_20 - 2*w*w_01^2 - w^2*w_02")), Some(Rational::zero()));
    }

    #[test]
    fn orbit_dimensions() {
        let plane = JetContext::new(&["x", "y"], &["u"]).unwrap();
        let tr = LieAlgebraSpec::from_fields(vec![
            field(&plane, &["1", "0"], &["0"]),
            field(&plane, &["0", "1"], &["0"]),
            field(&plane, &["0", "0"], &["1"]),
        ]);
        let p = sample_point(&plane, 1, None, &Sampling::default(), 0).unwrap();
        assert_eq!(orbit_dimension_at(&tr, &p, 1, &plane, None).unwrap(), 3);

        let ctx = JetContext::curves();
        let g = se2(&ctx);
        let s = Sampling::default();
        assert_eq!(generic_orbit_dimension(&g, 2, &ctx, None, 8, &s).unwrap(), 3);
        assert_eq!(generic_orbit_dimension(&g, 3, &ctx, None, 8, &s).unwrap(), 3);
        let mut line = sample_point(&ctx, 2, None, &s, 0).unwrap();
        line.values.insert(ctx.u(0, &[1]), Rational::zero());
        line.values.insert(ctx.u(0, &[2]), Rational::zero());
        assert_eq!(orbit_dimension_at(&g, &line, 2, &ctx, None).unwrap(), 3);
        let t = orbit_tangent_at(&g, &line, 2, &ctx, None).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.columns.len(), 4);
        assert!(matches!(
            orbit_dimension_at(&g, &line, 3, &ctx, None),
            Err(OrbitError::PointOrder { .. })
        ));
        assert_eq!(generic_orbit_dimension(&g, 0, &ctx, None, 2, &s).unwrap(), 2);
    }

    #[test]
    fn curves_profile_and_fit() {
        let ctx = JetContext::curves();
        let prof = hilbert_function(&se2(&ctx), &ctx, None, 5, 8, &Sampling::default()).unwrap();
        assert_eq!(prof.d, vec![0, 0, 1, 1, 1, 1]);
        assert_eq!(prof.ambient, vec![2, 3, 4, 5, 6, 7]);
        let fit = poincare_fit(&prof);
        assert_eq!(fit.status, FitStatus::Fits);
        assert_eq!(fit.d, Some(0));
        assert_eq!(fit.r, vec![0, 0, 1]);
    }

    #[test]
    fn fits() {
        let ones = poincare_fit(&HilbertProfile::from_counts(vec![1; 6]));
        assert_eq!((ones.status, ones.d, ones.r.clone()), (FitStatus::Fits, Some(0), vec![1]));
        let lin = poincare_fit(&HilbertProfile::from_counts(vec![1, 2, 3, 4, 5, 6]));
        assert_eq!((lin.d, lin.r), (Some(1), vec![1]));
        let even = poincare_fit(&HilbertProfile::from_counts(vec![0, 0, 1, 0, 1, 0, 1]));
        assert_eq!(even.status, FitStatus::Unstable);
        assert_eq!(poincare_fit(&HilbertProfile::from_counts(vec![1, 1])).status, FitStatus::Unstable);
    }
}
