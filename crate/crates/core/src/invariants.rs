//! Invariance checks, linear-ansatz invariant search, Tresse derivatives,
//! invariant derivations and their commutators, first integrals.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::binomial;
use rayon::prelude::*;
use thiserror::Error;

use crate::equation::{is_symmetry, prolong_on_equation, EquationError, EquationKind, SolvedEquation};
use crate::expr::{Monomial, MultiIndex, Poly, RatFun, Rational, VarId};
use crate::jet::{total_derivative, total_derivative_multi, JetContext};
use crate::linalg::{kernel, rf_inverse, rf_solve, RfSolution};
use crate::prolong::{
    apply_vector_field, prolong_field, PointVectorField, ProlongError, ProlongedVectorField,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantsError {
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error("total Jacobian of the chosen invariants is identically degenerate")]
    DegenerateJacobian,
    #[error("generator `{0}` is not a symmetry of the equation")]
    NotASymmetry(String),
    #[error("probe #{probe} is not invariant under `{generator}`")]
    ProbeNotInvariant { probe: usize, generator: String },
    #[error("bad family pattern `{0}`")]
    BadFamily(String),
    #[error("derivation has {got} coefficients, expected {expected}")]
    Arity { expected: usize, got: usize },
}

type Result<T> = std::result::Result<T, InvariantsError>;

/// Infinite family of generators with one free function, truncated to
/// finitely many monomial instances.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyPattern {
    /// `f(args) ∂_direction`.
    Scalar { direction: VarId, args: Vec<VarId> },
    /// Hamiltonian fields `X_F = Σ (F_p ∂_q − F_q ∂_p)` over canonical pairs
    /// `(q, p)` of independent variables.
    Hamiltonian { pairs: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub pattern: FamilyPattern,
    /// Lowest degree of the free function (2 for "vanishing to second
    /// order").
    pub min_degree: u32,
    pub label: String,
}

impl FamilySpec {
    /// Parses `f(x,y)*d_x` or `hamiltonian(x1,x2)`.
    pub fn parse(src: &str, min_degree: u32, ctx: &JetContext) -> Result<Self> {
        let bad = || InvariantsError::BadFamily(src.to_string());
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let args_of = |inner: &str| -> Result<Vec<VarId>> {
            if inner.is_empty() {
                return Ok(Vec::new());
            }
            inner
                .split(',')
                .map(|a| ctx.resolve(a).filter(|v| v.order() == 0).ok_or_else(bad))
                .collect()
        };
        if let Some(rest) = s.strip_prefix("hamiltonian(") {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let vars = args_of(inner)?;
            if vars.is_empty() || vars.len() % 2 != 0 || vars.iter().any(|v| v.is_jet()) {
                return Err(bad());
            }
            let idx = |v: VarId| match v.kind(ctx.n()) {
                crate::expr::VarKind::Independent(i) => i,
                _ => unreachable!(),
            };
            let pairs = vars.chunks(2).map(|c| (idx(c[0]), idx(c[1]))).collect();
            return Ok(FamilySpec {
                pattern: FamilyPattern::Hamiltonian { pairs },
                min_degree,
                label: src.to_string(),
            });
        }
        let rest = s.strip_prefix("f(").ok_or_else(bad)?;
        let (inner, tail) = rest.split_once(')').ok_or_else(bad)?;
        let dir = tail.strip_prefix("*d_").ok_or_else(bad)?;
        let direction = ctx.resolve(dir).filter(|v| v.order() == 0).ok_or_else(bad)?;
        Ok(FamilySpec {
            pattern: FamilyPattern::Scalar {
                direction,
                args: args_of(inner)?,
            },
            min_degree,
            label: src.to_string(),
        })
    }

    fn arg_vars(&self) -> Vec<VarId> {
        match &self.pattern {
            FamilyPattern::Scalar { args, .. } => args.clone(),
            FamilyPattern::Hamiltonian { pairs } => pairs
                .iter()
                .flat_map(|&(q, p)| [VarId::independent(q), VarId::independent(p)])
                .collect(),
        }
    }

    /// Instances whose free function is a monomial of degree
    /// `min_degree ..= k + 1`.
    pub fn instantiate(&self, k: u32, ctx: &JetContext) -> Vec<PointVectorField> {
        let vars = self.arg_vars();
        let mut out = Vec::new();
        for d in self.min_degree..=k + 1 {
            for mono in monomials_of_degree(&vars, d) {
                let f = RatFun::from_poly(Poly::term(mono.clone(), Rational::from_integer(1.into())));
                let fname = crate::expr::print(&f, ctx);
                let mut alpha = vec![RatFun::zero(); ctx.n()];
                let mut beta = vec![RatFun::zero(); ctx.m()];
                let name = match &self.pattern {
                    FamilyPattern::Scalar { direction, .. } => {
                        match direction.kind(ctx.n()) {
                            crate::expr::VarKind::Independent(i) => alpha[i] = f.clone(),
                            crate::expr::VarKind::Jet { dependent, .. } => beta[dependent] = f.clone(),
                        }
                        format!("{fname}*d_{}", ctx.name_of(*direction))
                    }
                    FamilyPattern::Hamiltonian { pairs } => {
                        for &(q, p) in pairs {
                            alpha[q] = alpha[q].add(&f.partial(VarId::independent(p)));
                            alpha[p] = alpha[p].sub(&f.partial(VarId::independent(q)));
                        }
                        format!("X[{fname}]")
                    }
                };
                out.push(PointVectorField {
                    name,
                    alpha,
                    beta,
                });
            }
        }
        out
    }
}

/// Monomials of exact degree `d` in `vars`, leading-first.
pub fn monomials_of_degree(vars: &[VarId], d: u32) -> Vec<Monomial> {
    fn rec(vars: &[VarId], d: u32, acc: &mut Vec<(VarId, u32)>, out: &mut Vec<Monomial>) {
        if vars.is_empty() {
            if d == 0 {
                out.push(Monomial::from_pairs(acc.iter().cloned()));
            }
            return;
        }
        for e in (0..=d).rev() {
            acc.push((vars[0], e));
            rec(&vars[1..], d - e, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, d, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

/// Monomials of degree `≤ d`, in increasing term order (constant first).
pub fn monomials_up_to(vars: &[VarId], d: u32) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = (0..=d).flat_map(|k| monomials_of_degree(vars, k)).collect();
    out.sort();
    out
}

/// A Lie algebra of point fields plus pseudogroup families.
#[derive(Debug, Clone, Default)]
pub struct LieAlgebraSpec {
    pub fields: Vec<PointVectorField>,
    pub families: Vec<FamilySpec>,
}

impl LieAlgebraSpec {
    pub fn from_fields(fields: Vec<PointVectorField>) -> Self {
        LieAlgebraSpec {
            fields,
            families: Vec::new(),
        }
    }

    /// Declared fields followed by family instances truncated for order `k`.
    pub fn generators(&self, k: u32, ctx: &JetContext) -> Vec<PointVectorField> {
        let mut out = self.fields.clone();
        for fam in &self.families {
            out.extend(fam.instantiate(k, ctx));
        }
        out
    }
}

/// Prolongation to order `k`, restricted to the equation when one is given.
pub(crate) fn prolong_for(
    x: &PointVectorField,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<ProlongedVectorField> {
    Ok(match eq {
        None => prolong_field(x, k, ctx),
        Some(eq) => prolong_on_equation(x, k, eq)?,
    })
}

fn reduce_opt(f: &RatFun, eq: Option<&SolvedEquation>) -> Result<RatFun> {
    Ok(match eq {
        None => f.clone(),
        Some(eq) => eq.reduce(f)?,
    })
}

/// `L_X f` on the equation (or on the whole jet space).
pub fn lie_derivative_on(
    x: &PointVectorField,
    f: &RatFun,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<RatFun> {
    let ord = f.max_order();
    if ord > k {
        return Err(ProlongError::OrderMismatch {
            function: ord,
            field: k,
        }
        .into());
    }
    match eq {
        Some(e) if e.kind() == EquationKind::Pointwise => {
            let full = prolong_field(x, k, ctx);
            Ok(e.reduce(&apply_vector_field(&full.coeffs, f))?)
        }
        _ => {
            let f = reduce_opt(f, eq)?;
            let xk = prolong_for(x, k, ctx, eq)?;
            Ok(apply_vector_field(&xk.coeffs, &f))
        }
    }
}

/// Result of an invariance check; `witness` names the first failing
/// generator (in declaration order) and its nonzero residue.
#[derive(Debug, Clone)]
pub struct InvarianceVerdict {
    pub invariant: bool,
    pub generators_checked: usize,
    pub witness: Option<(String, RatFun)>,
}

pub(crate) fn check_symmetries(gens: &[PointVectorField], eq: Option<&SolvedEquation>) -> Result<()> {
    if let Some(eq) = eq {
        let results: Vec<Result<bool>> = gens
            .par_iter()
            .map(|x| Ok(is_symmetry(x, eq)?))
            .collect();
        for (x, r) in gens.iter().zip(results) {
            if !r? {
                return Err(InvariantsError::NotASymmetry(x.name.clone()));
            }
        }
    }
    Ok(())
}

/// `f` is invariant iff `L_{X^{(k)}} f` reduces to zero for every generator.
pub fn is_invariant(
    g: &LieAlgebraSpec,
    f: &RatFun,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
    k: u32,
) -> Result<InvarianceVerdict> {
    let gens = g.generators(k, ctx);
    check_symmetries(&gens, eq)?;
    let residues: Vec<Result<RatFun>> = gens
        .par_iter()
        .map(|x| lie_derivative_on(x, f, k, ctx, eq))
        .collect();
    for (x, r) in gens.iter().zip(residues) {
        let r = r?;
        if !r.is_zero() {
            return Ok(InvarianceVerdict {
                invariant: false,
                generators_checked: gens.len(),
                witness: Some((x.name.clone(), r)),
            });
        }
    }
    Ok(InvarianceVerdict {
        invariant: true,
        generators_checked: gens.len(),
        witness: None,
    })
}

/// Candidates `c + P / q` with `P` of degree `≤ degree` in the coordinates of
/// order `≤ order` (parametric ones on an equation), or in `variables` when
/// given.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub order: u32,
    pub degree: u32,
    pub denominator: RatFun,
    pub variables: Option<Vec<VarId>>,
}

impl Ansatz {
    pub fn basis(&self, ctx: &JetContext, eq: Option<&SolvedEquation>) -> Vec<Monomial> {
        let vars = match &self.variables {
            Some(v) => v.clone(),
            None => match eq {
                Some(eq) => eq.parametric_coordinates(self.order),
                None => ctx.coordinates(self.order),
            },
        };
        monomials_up_to(&vars, self.degree)
    }
}

/// Exact basis of the invariants of the ansatz shape: the kernel of the
/// linear conditions `L_X(P/q) = 0` on the coefficients of `P`.
pub fn find_invariants_linear(
    g: &LieAlgebraSpec,
    ansatz: &Ansatz,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<Vec<RatFun>> {
    let q = reduce_opt(&ansatz.denominator, eq)?;
    let k = ansatz.order.max(q.max_order());
    let basis = ansatz.basis(ctx, eq);
    let gens = g.generators(k, ctx);
    check_symmetries(&gens, eq)?;
    let blocks: Vec<Result<Vec<Vec<Rational>>>> = gens
        .par_iter()
        .map(|x| conditions_for(x, &basis, &q, k, ctx, eq))
        .collect();
    let mut rows = Vec::new();
    for b in blocks {
        rows.extend(b?);
    }
    let ker = kernel(&rows, basis.len());
    let mut out = Vec::with_capacity(ker.len() + 1);
    let q_in_span = q.is_polynomial()
        && q.numer().terms().iter().all(|(m, _)| basis.contains(m));
    if !q_in_span {
        out.push(RatFun::one());
    }
    out.extend(ker.into_iter().map(|v| {
        let p = Poly::from_terms(basis.iter().cloned().zip(v));
        RatFun::from_poly(p).div(&q).expect("nonzero denominator")
    }));
    Ok(out)
}

/// Linear conditions contributed by one generator: one row per monomial of
/// the cleared numerator of `Σ c_m (L(m) q − m L(q))`.
fn conditions_for(
    x: &PointVectorField,
    basis: &[Monomial],
    q: &RatFun,
    k: u32,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<Vec<Vec<Rational>>> {
    let lq = lie_derivative_on(x, q, k, ctx, eq)?;
    let mut images = Vec::with_capacity(basis.len());
    for m in basis {
        let mf = RatFun::from_poly(Poly::term(m.clone(), Rational::from_integer(1.into())));
        let lm = lie_derivative_on(x, &mf, k, ctx, eq)?;
        images.push(lm.mul(q).sub(&mf.mul(&lq)));
    }
    // common denominator
    let mut den = Poly::one();
    for r in &images {
        if r.is_zero() || r.denom().is_one() {
            continue;
        }
        if den.div_exact(r.denom()).is_none() {
            den = den.mul(r.denom());
        }
    }
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Rational)>> = Vec::with_capacity(basis.len());
    for r in &images {
        let mut col = Vec::new();
        if !r.is_zero() {
            let scale = den.div_exact(r.denom()).expect("common denominator");
            let p = r.numer().mul(&scale);
            for (mono, c) in p.terms() {
                let next = index.len();
                let row = *index.entry(mono.clone()).or_insert(next);
                col.push((row, c.clone()));
            }
        }
        columns.push(col);
    }
    let mut rows = vec![vec![Rational::from_integer(0.into()); basis.len()]; index.len()];
    for (j, col) in columns.into_iter().enumerate() {
        for (i, c) in col {
            rows[i][j] = c;
        }
    }
    Ok(rows)
}

/// `∇ = Σ c_i D_i`, optionally understood modulo some other derivations.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub coefficients: Vec<RatFun>,
    pub modulo: Option<String>,
}

impl Derivation {
    pub fn new(coefficients: Vec<RatFun>) -> Self {
        Derivation {
            coefficients,
            modulo: None,
        }
    }

    pub fn total(i: usize, n: usize) -> Self {
        Derivation::new(
            (0..n)
                .map(|k| if k == i { RatFun::one() } else { RatFun::zero() })
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    pub fn equals(&self, other: &Derivation) -> bool {
        self.coefficients.len() == other.coefficients.len()
            && self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .all(|(a, b)| a.equals(b))
    }
}

fn total_derivative_on(f: &RatFun, i: usize, ctx: &JetContext, eq: Option<&SolvedEquation>) -> Result<RatFun> {
    Ok(match eq {
        None => total_derivative(f, i, ctx),
        Some(eq) => eq.total_derivative(f, i)?,
    })
}

/// `∇ f = Σ c_i D_i f`, reduced on the equation.
pub fn apply_derivation(
    d: &Derivation,
    f: &RatFun,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<RatFun> {
    if d.coefficients.len() != ctx.n() {
        return Err(InvariantsError::Arity {
            expected: ctx.n(),
            got: d.coefficients.len(),
        });
    }
    let mut acc = RatFun::zero();
    for (i, c) in d.coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&c.mul(&total_derivative_on(f, i, ctx, eq)?));
    }
    reduce_opt(&acc, eq)
}

/// Tresse derivatives `∂̂_i = Σ_j (DF^{-1})_{ij} D_j` dual to `d̂f_1, …, d̂f_n`.
pub fn tresse_derivatives(
    fs: &[RatFun],
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<Vec<Derivation>> {
    let n = ctx.n();
    if fs.len() != n {
        return Err(InvariantsError::Arity {
            expected: n,
            got: fs.len(),
        });
    }
    // a[j][k] = D_j(f_k)
    let mut a = vec![Vec::with_capacity(n); n];
    for (j, row) in a.iter_mut().enumerate() {
        for f in fs {
            row.push(total_derivative_on(f, j, ctx, eq)?);
        }
    }
    let inv = rf_inverse(&a).ok_or(InvariantsError::DegenerateJacobian)?;
    Ok(inv.into_iter().map(Derivation::new).collect())
}

/// `[∇a, ∇b] = Σ_i (∇a(b_i) − ∇b(a_i)) D_i`.
pub fn commutator(
    a: &Derivation,
    b: &Derivation,
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<Derivation> {
    let mut coeffs = Vec::with_capacity(ctx.n());
    for i in 0..ctx.n() {
        let x = apply_derivation(a, &b.coefficients[i], ctx, eq)?;
        let y = apply_derivation(b, &a.coefficients[i], ctx, eq)?;
        coeffs.push(x.sub(&y));
    }
    Ok(Derivation::new(coeffs))
}

#[derive(Debug, Clone)]
pub enum Decomposition {
    Coefficients(Vec<RatFun>),
    NotInSpan,
}

/// Solves `c = Σ_k ρ_k ∇_k` over the field of rational functions.
pub fn decompose_commutator(
    c: &Derivation,
    basis: &[Derivation],
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
) -> Result<Decomposition> {
    let n = ctx.n();
    let mut a = vec![Vec::with_capacity(basis.len()); n];
    for (i, row) in a.iter_mut().enumerate() {
        for b in basis {
            row.push(reduce_opt(&b.coefficients[i], eq)?);
        }
    }
    let rhs: Vec<RatFun> = c
        .coefficients
        .iter()
        .map(|x| reduce_opt(x, eq))
        .collect::<Result<_>>()?;
    if basis.is_empty() {
        return Ok(if rhs.iter().all(|x| x.is_zero()) {
            Decomposition::Coefficients(Vec::new())
        } else {
            Decomposition::NotInSpan
        });
    }
    Ok(match rf_solve(&a, &rhs) {
        RfSolution::Solved(x) => Decomposition::Coefficients(x),
        RfSolution::Inconsistent => Decomposition::NotInSpan,
    })
}

/// Outcome of [`verify_invariant_derivation`].
#[derive(Debug, Clone)]
pub struct DerivationVerdict {
    pub invariant: bool,
    /// `(probe index, generator, residue)` of the first failure.
    pub witness: Option<(usize, String, RatFun)>,
}

/// Checks that `∇` maps each invariant probe to an invariant of order
/// `k + 1`.
pub fn verify_invariant_derivation(
    d: &Derivation,
    g: &LieAlgebraSpec,
    probes: &[RatFun],
    ctx: &JetContext,
    eq: Option<&SolvedEquation>,
    k: u32,
) -> Result<DerivationVerdict> {
    for (idx, p) in probes.iter().enumerate() {
        let pre = is_invariant(g, p, ctx, eq, k)?;
        if let Some((generator, _)) = pre.witness {
            return Err(InvariantsError::ProbeNotInvariant {
                probe: idx,
                generator,
            });
        }
    }
    for (idx, p) in probes.iter().enumerate() {
        let image = apply_derivation(d, p, ctx, eq)?;
        let v = is_invariant(g, &image, ctx, eq, k + 1)?;
        if let Some((generator, residue)) = v.witness {
            return Ok(DerivationVerdict {
                invariant: false,
                witness: Some((idx, generator, residue)),
            });
        }
    }
    Ok(DerivationVerdict {
        invariant: true,
        witness: None,
    })
}

/// `f` is a first integral iff every `D_i f` reduces to zero.
pub fn check_first_integral(f: &RatFun, eq: &SolvedEquation) -> Result<bool> {
    for i in 0..eq.ctx().n() {
        if !eq.total_derivative(f, i)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A linear differential operator `Σ_τ c_τ D_τ` in total derivatives.
#[derive(Debug, Clone, Default)]
pub struct TotalDiffOperator {
    pub terms: BTreeMap<MultiIndex, RatFun>,
}

impl TotalDiffOperator {
    pub fn add_term(&mut self, tau: MultiIndex, c: RatFun) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(tau.clone()).or_insert_with(RatFun::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&tau);
        }
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|t| t.order()).max().unwrap_or(0)
    }

    /// Applies the operator; on an equation each `D_τ f` is computed in the
    /// jet space and then reduced.
    pub fn apply(&self, f: &RatFun, ctx: &JetContext, eq: Option<&SolvedEquation>) -> Result<RatFun> {
        let mut acc = RatFun::zero();
        for (tau, c) in &self.terms {
            acc = acc.add(&c.mul(&total_derivative_multi(f, tau, ctx)));
        }
        reduce_opt(&acc, eq)
    }

    /// `[Δ, X̂]` for the prolongation `X̂` of a point field:
    /// `Σ_τ c_τ [D_τ, Σ α^i D_i] − Σ_τ X̂(c_τ) D_τ`.
    pub fn commutator_with_field(&self, x: &PointVectorField, ctx: &JetContext) -> TotalDiffOperator {
        let n = ctx.n();
        let k = self.terms.values().map(|c| c.max_order()).max().unwrap_or(0);
        let xk = prolong_field(x, k, ctx);
        let mut out = TotalDiffOperator::default();
        for (tau, c) in &self.terms {
            for rho in tau.sub_indices() {
                if rho.order() == 0 {
                    continue;
                }
                let rest = rho.complement_in(tau).unwrap();
                let mult = (0..n)
                    .map(|i| binomial(tau.get(i), rho.get(i)))
                    .product::<u32>();
                let mult = Rational::from_integer((mult as i64).into());
                for (i, a) in x.alpha.iter().enumerate() {
                    let da = total_derivative_multi(a, &rho, ctx);
                    if da.is_zero() {
                        continue;
                    }
                    out.add_term(rest.incremented(i), c.mul(&da).scale(&mult));
                }
            }
            let xc = apply_vector_field(&xk.coeffs, c);
            out.add_term(tau.clone(), xc.neg());
        }
        out
    }

    /// Coefficients reduced on the equation; zero terms dropped.
    pub fn restrict(&self, eq: &SolvedEquation) -> Result<TotalDiffOperator> {
        let mut out = TotalDiffOperator::default();
        for (tau, c) in &self.terms {
            out.add_term(tau.clone(), eq.reduce(c)?);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }
}

/// Variables that occur in any of the expressions.
pub fn variables_of<'a>(fs: impl IntoIterator<Item = &'a RatFun>) -> BTreeSet<VarId> {
    fs.into_iter().flat_map(|f| f.vars()).collect()
}

/// Groups a list by generator name for reporting.
pub fn residues_by_generator(v: &InvarianceVerdict) -> HashMap<String, RatFun> {
    v.witness.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::Rule;
    use crate::expr::parse;

    fn field(ctx: &JetContext, name: &str, alpha: &[&str], beta: &[&str]) -> PointVectorField {
        let p = |s: &&str| parse(s, ctx).unwrap();
        PointVectorField::new(name, alpha.iter().map(p).collect(), beta.iter().map(p).collect(), ctx)
            .unwrap()
    }

    fn se2(ctx: &JetContext) -> LieAlgebraSpec {
        LieAlgebraSpec::from_fields(vec![
            field(ctx, "dx", &["1"], &["0"]),
            field(ctx, "dy", &["0"], &["1"]),
            field(ctx, "rot", &["-y"], &["x"]),
        ])
    }

    fn plane() -> JetContext {
        let mut ctx = JetContext::new(&["x", "y"], &["u"]).unwrap();
        for (a, t) in [("u_x", "u_10"), ("u_y", "u_01"), ("u_xy", "u_11"), ("u_yy", "u_02")] {
            ctx = ctx.with_alias_named(a, t).unwrap();
        }
        ctx
    }

    fn ux0(ctx: &JetContext) -> (LieAlgebraSpec, SolvedEquation) {
        let g = LieAlgebraSpec {
            fields: vec![field(ctx, "dy", &["0", "1"], &["0"]), field(ctx, "du", &["0", "0"], &["1"])],
            families: vec![FamilySpec::parse("f(x)*d_x", 0, ctx).unwrap()],
        };
        let eq = SolvedEquation::new(
            ctx,
            vec![Rule {
                lead: ctx.resolve("u_10").unwrap(),
                rhs: RatFun::zero(),
            }],
        )
        .unwrap();
        (g, eq)
    }

    #[test]
    fn scalar_family_instances() {
        let ctx = JetContext::curves();
        let fam = FamilySpec::parse("f(x)*d_x", 0, &ctx).unwrap();
        let inst = fam.instantiate(2, &ctx);
        let names: Vec<_> = inst.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["1*d_x", "x*d_x", "x^2*d_x", "x^3*d_x"]);
        assert!(inst[2].alpha[0].equals(&parse("x^2", &ctx).unwrap()));
        assert!(FamilySpec::parse("g(x)*d_x", 0, &ctx).is_err());
    }

    #[test]
    fn hamiltonian_family_instances() {
        let ctx = JetContext::new(&["x1", "x2"], &["H"]).unwrap();
        let fam = FamilySpec::parse("hamiltonian(x1,x2)", 2, &ctx).unwrap();
        let inst = fam.instantiate(2, &ctx);
        assert_eq!(inst.len(), 7);
        // F = x1^2 gives X_F = -2 x1 d_x2
        let e = |s: &str| parse(s, &ctx).unwrap();
        let xf = inst.iter().find(|f| f.name == "X[x1^2]").unwrap();
        assert!(xf.alpha[0].is_zero());
        assert!(xf.alpha[1].equals(&e("-2*x1")));
        let xf = inst.iter().find(|f| f.name == "X[x1*x2^2]").unwrap();
        assert!(xf.alpha[0].equals(&e("2*x1*x2")));
        assert!(xf.alpha[1].equals(&e("-x2^2")));
    }

    #[test]
    fn curvature_square_is_invariant() {
        let ctx = JetContext::curves();
        let k2 = parse("y2^2/(1+y1^2)^3", &ctx).unwrap();
        let v = is_invariant(&se2(&ctx), &k2, &ctx, None, 2).unwrap();
        assert!(v.invariant && v.witness.is_none());
        assert_eq!(v.generators_checked, 3);
        let y2 = parse("y2", &ctx).unwrap();
        let v = is_invariant(&se2(&ctx), &y2, &ctx, None, 2).unwrap();
        let (name, residue) = v.witness.unwrap();
        assert_eq!(name, "rot");
        assert!(residue.equals(&parse("3*y1*y2", &ctx).unwrap()));
        assert!(is_invariant(&se2(&ctx), &y2, &ctx, None, 1).is_err());
    }

    #[test]
    fn linear_search_curves() {
        let ctx = JetContext::curves();
        let ansatz = Ansatz {
            order: 2,
            degree: 2,
            denominator: parse("(1+y1^2)^3", &ctx).unwrap(),
            variables: None,
        };
        let basis = find_invariants_linear(&se2(&ctx), &ansatz, &ctx, None).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis[0].equals(&RatFun::one()));
        assert!(basis[1].equals(&parse("y2^2/(1+y1^2)^3", &ctx).unwrap()));
    }

    #[test]
    fn linear_search_translations() {
        let ctx = plane();
        let g = LieAlgebraSpec::from_fields(vec![
            field(&ctx, "dx", &["1", "0"], &["0"]),
            field(&ctx, "dy", &["0", "1"], &["0"]),
            field(&ctx, "du", &["0", "0"], &["1"]),
        ]);
        let ansatz = Ansatz {
            order: 1,
            degree: 1,
            denominator: RatFun::one(),
            variables: None,
        };
        let basis = find_invariants_linear(&g, &ansatz, &ctx, None).unwrap();
        let expected = ["1", "u_y", "u_x"].map(|s| parse(s, &ctx).unwrap());
        assert_eq!(basis.len(), 3);
        for (b, e) in basis.iter().zip(&expected) {
            assert!(b.equals(e), "{b:?}");
        }
        // empty algebra constrains nothing
        let all = find_invariants_linear(&LieAlgebraSpec::default(), &ansatz, &ctx, None).unwrap();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn pseudogroup_on_ux0() {
        let ctx = plane();
        let (g, eq) = ux0(&ctx);
        let ansatz = Ansatz {
            order: 1,
            degree: 1,
            denominator: RatFun::one(),
            variables: None,
        };
        let basis = find_invariants_linear(&g, &ansatz, &ctx, Some(&eq)).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis[0].equals(&RatFun::one()));
        assert!(basis[1].equals(&parse("u_y", &ctx).unwrap()));
        for b in &basis {
            assert!(is_invariant(&g, b, &ctx, Some(&eq), 1).unwrap().invariant);
        }
        let probes = ["u_y", "u_yy"].map(|s| parse(s, &ctx).unwrap());
        let dy = Derivation::total(1, 2);
        let v = verify_invariant_derivation(&dy, &g, &probes, &ctx, Some(&eq), 2).unwrap();
        assert!(v.invariant);
        let u3 = parse("u_03", &ctx).unwrap();
        assert!(is_invariant(&g, &u3, &ctx, Some(&eq), 3).unwrap().invariant);
    }

    #[test]
    fn derivation_checks_on_curves() {
        let ctx = JetContext::curves();
        let k2 = parse("y2^2/(1+y1^2)^3", &ctx).unwrap();
        let v = verify_invariant_derivation(&Derivation::total(0, 1), &se2(&ctx), std::slice::from_ref(&k2), &ctx, None, 2)
            .unwrap();
        assert!(!v.invariant);
        assert_eq!(v.witness.unwrap().1, "rot");
        let zero = Derivation::new(vec![RatFun::zero()]);
        assert!(verify_invariant_derivation(&zero, &se2(&ctx), &[k2], &ctx, None, 2).unwrap().invariant);
        let y2 = parse("y2", &ctx).unwrap();
        assert!(matches!(
            verify_invariant_derivation(&zero, &se2(&ctx), &[y2], &ctx, None, 2),
            Err(InvariantsError::ProbeNotInvariant { probe: 0, .. })
        ));
    }

    #[test]
    fn tresse_and_commutators() {
        let ctx = plane();
        let e = |s: &str| parse(s, &ctx).unwrap();
        let xy = tresse_derivatives(&[e("x"), e("y")], &ctx, None).unwrap();
        assert!(xy[0].equals(&Derivation::total(0, 2)));
        assert!(xy[1].equals(&Derivation::total(1, 2)));

        let line = JetContext::new(&["x"], &["u"]).unwrap().with_alias_named("u_x", "u_1").unwrap();
        let t = tresse_derivatives(&[parse("u", &line).unwrap()], &line, None).unwrap();
        assert!(t[0].coefficients[0].equals(&parse("1/u_x", &line).unwrap()));
        assert!(matches!(
            tresse_derivatives(&[parse("u_x - u_x", &line).unwrap()], &line, None),
            Err(InvariantsError::DegenerateJacobian)
        ));

        let a = Derivation::new(vec![e("1/u_x"), RatFun::zero()]);
        let b = Derivation::total(1, 2);
        assert!(apply_derivation(&a, &e("u"), &ctx, None).unwrap().equals(&RatFun::one()));
        assert!(apply_derivation(&a, &e("u_y"), &ctx, None).unwrap().equals(&e("u_xy/u_x")));
        let c = commutator(&a, &b, &ctx, None).unwrap();
        assert!(c.coefficients[0].equals(&e("u_xy/u_x^2")));
        assert!(c.coefficients[1].is_zero());
        match decompose_commutator(&c, &[a.clone(), b.clone()], &ctx, None).unwrap() {
            Decomposition::Coefficients(r) => {
                assert!(r[0].equals(&e("u_xy/u_x")));
                assert!(r[1].is_zero());
            }
            Decomposition::NotInSpan => panic!(),
        }
        assert!(commutator(&Derivation::total(0, 2), &b, &ctx, None).unwrap().is_zero());
        assert!(matches!(
            decompose_commutator(&Derivation::total(0, 2), std::slice::from_ref(&b), &ctx, None).unwrap(),
            Decomposition::NotInSpan
        ));
        match decompose_commutator(&Derivation::new(vec![RatFun::zero(); 2]), &[a, b], &ctx, None).unwrap() {
            Decomposition::Coefficients(r) => assert!(r.iter().all(|x| x.is_zero())),
            Decomposition::NotInSpan => panic!(),
        }
    }

    fn monge() -> SolvedEquation {
        let ctx = JetContext::curves();
        SolvedEquation::new(
            &ctx,
            vec![Rule {
                lead: ctx.resolve("y5").unwrap(),
                rhs: parse("5*y3*y4/y2 - 40/9*y3^3/y2^2", &ctx).unwrap(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn monge_first_integrals() {
        let eq = monge();
        let ctx = eq.ctx().clone();
        let j1 = parse("(3*y2*y4 - 5*y3^2)^3/y2^8", &ctx).unwrap();
        assert!(check_first_integral(&j1, &eq).unwrap());
        assert!(!check_first_integral(&parse("y2", &ctx).unwrap(), &eq).unwrap());
        assert!(check_first_integral(&RatFun::from_int(7), &eq).unwrap());
    }

    #[test]
    fn operator_commutator_matches_direct() {
        let ctx = JetContext::curves();
        let e = |s: &str| parse(s, &ctx).unwrap();
        let mut op = TotalDiffOperator::default();
        op.add_term(MultiIndex::from_slice(&[2]), e("y1"));
        op.add_term(MultiIndex::from_slice(&[1]), e("x"));
        let rot = field(&ctx, "rot", &["-y"], &["x"]);
        let scale = field(&ctx, "sc", &["x^2"], &["x*y"]);
        for x in [rot, scale] {
            let c = op.commutator_with_field(&x, &ctx);
            for f in ["y2", "y1^2", "x*y"] {
                let f = e(f);
                let xk = prolong_field(&x, 5, &ctx);
                let lhs = op
                    .apply(&apply_vector_field(&xk.coeffs, &f), &ctx, None)
                    .unwrap()
                    .sub(&apply_vector_field(&xk.coeffs, &op.apply(&f, &ctx, None).unwrap()));
                assert!(c.apply(&f, &ctx, None).unwrap().equals(&lhs));
            }
        }
    }
}
