//! Lifting point vector fields and point transformations to jet spaces.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::expr::{MultiIndex, RatFun, Rational, VarId, VarKind};
use crate::jet::{total_derivative, total_derivative_multi, JetContext};
use crate::linalg::rf_inverse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProlongError {
    #[error("field `{0}` has coefficients depending on derivatives")]
    NotAPointField(String),
    #[error("field `{name}` needs {expected} coefficients, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("function of order {function} exceeds prolongation order {field}")]
    OrderMismatch { function: u32, field: u32 },
    #[error("total Jacobian of the point map is identically singular")]
    SingularJacobian,
}

/// `X = Σ α^i ∂_{x^i} + Σ β^j ∂_{u^j}` with coefficients in `(x, u)`.
#[derive(Debug, Clone)]
pub struct PointVectorField {
    pub name: String,
    pub alpha: Vec<RatFun>,
    pub beta: Vec<RatFun>,
}

impl PointVectorField {
    pub fn new(
        name: impl Into<String>,
        alpha: Vec<RatFun>,
        beta: Vec<RatFun>,
        ctx: &JetContext,
    ) -> Result<Self, ProlongError> {
        let name = name.into();
        if alpha.len() != ctx.n() {
            return Err(ProlongError::Arity {
                name,
                expected: ctx.n(),
                got: alpha.len(),
            });
        }
        if beta.len() != ctx.m() {
            return Err(ProlongError::Arity {
                name,
                expected: ctx.m(),
                got: beta.len(),
            });
        }
        if alpha.iter().chain(beta.iter()).any(|c| c.max_order() > 0) {
            return Err(ProlongError::NotAPointField(name));
        }
        Ok(PointVectorField { name, alpha, beta })
    }

    /// `a X + b Y`.
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Self {
        let mix = |p: &[RatFun], q: &[RatFun]| -> Vec<RatFun> {
            p.iter().zip(q).map(|(x, y)| x.scale(a).add(&y.scale(b))).collect()
        };
        PointVectorField {
            name: format!("({a})*{} + ({b})*{}", self.name, other.name),
            alpha: mix(&self.alpha, &other.alpha),
            beta: mix(&self.beta, &other.beta),
        }
    }
}

/// Characteristic `φ^j = β^j − Σ_i u^j_{1_i} α^i`.
#[derive(Debug, Clone)]
pub struct GeneratingSection {
    pub phi: Vec<RatFun>,
}

pub fn generating_function(x: &PointVectorField, ctx: &JetContext) -> GeneratingSection {
    let n = ctx.n();
    let phi = (0..ctx.m())
        .map(|j| {
            let mut acc = x.beta[j].clone();
            for (i, a) in x.alpha.iter().enumerate() {
                let p = RatFun::var(VarId::jet(j, &MultiIndex::unit(n, i)));
                acc = acc.sub(&p.mul(a));
            }
            acc
        })
        .collect();
    GeneratingSection { phi }
}

/// A vector field on `J^k`: coefficient for every coordinate up to order
/// `k` (zero coefficients are stored too).
#[derive(Debug, Clone)]
pub struct ProlongedVectorField {
    pub name: String,
    pub order: u32,
    pub coeffs: BTreeMap<VarId, RatFun>,
}

impl ProlongedVectorField {
    pub fn coeff(&self, v: VarId) -> Option<&RatFun> {
        self.coeffs.get(&v)
    }
}

/// Prolongation by the recursion
/// `η_{σ+1_i} = D_i(η_σ) − Σ_s u_{σ+1_s} D_i(α^s)`, seeded with `η_0 = β`.
pub fn prolong_field(x: &PointVectorField, k: u32, ctx: &JetContext) -> ProlongedVectorField {
    let n = ctx.n();
    let mut coeffs = BTreeMap::new();
    for i in 0..n {
        coeffs.insert(VarId::independent(i), x.alpha[i].clone());
    }
    // D_i(α^s), shared by every step in direction i
    let d_alpha: Vec<Vec<RatFun>> = (0..n)
        .map(|i| x.alpha.iter().map(|a| total_derivative(a, i, ctx)).collect())
        .collect();
    for j in 0..ctx.m() {
        let mut prev: HashMap<MultiIndex, RatFun> = HashMap::new();
        let zero = MultiIndex::zero(n);
        prev.insert(zero.clone(), x.beta[j].clone());
        coeffs.insert(VarId::jet(j, &zero), x.beta[j].clone());
        for r in 1..=k {
            let mut cur = HashMap::new();
            for sigma in MultiIndex::of_order(n, r) {
                let i = (0..n).find(|&i| sigma.get(i) > 0).expect("nonzero index");
                let base = sigma.decremented(i).unwrap();
                let mut eta = total_derivative(&prev[&base], i, ctx);
                for (s, da) in d_alpha[i].iter().enumerate() {
                    if da.is_zero() {
                        continue;
                    }
                    let u = RatFun::var(VarId::jet(j, &base.incremented(s)));
                    eta = eta.sub(&u.mul(da));
                }
                coeffs.insert(VarId::jet(j, &sigma), eta.clone());
                cur.insert(sigma, eta);
            }
            prev = cur;
        }
    }
    ProlongedVectorField {
        name: x.name.clone(),
        order: k,
        coeffs,
    }
}

/// Prolongation by the characteristic form
/// `η_σ = D_σ(φ) + Σ_i α^i u_{σ+1_i}`; agrees with [`prolong_field`].
pub fn prolong_field_characteristic(
    x: &PointVectorField,
    k: u32,
    ctx: &JetContext,
) -> ProlongedVectorField {
    let n = ctx.n();
    let phi = generating_function(x, ctx).phi;
    let mut coeffs = BTreeMap::new();
    for i in 0..n {
        coeffs.insert(VarId::independent(i), x.alpha[i].clone());
    }
    for (j, phi_j) in phi.iter().enumerate() {
        for r in 0..=k {
            for sigma in MultiIndex::of_order(n, r) {
                let mut eta = total_derivative_multi(phi_j, &sigma, ctx);
                for (i, a) in x.alpha.iter().enumerate() {
                    let u = RatFun::var(VarId::jet(j, &sigma.incremented(i)));
                    eta = eta.add(&a.mul(&u));
                }
                coeffs.insert(VarId::jet(j, &sigma), eta);
            }
        }
    }
    ProlongedVectorField {
        name: x.name.clone(),
        order: k,
        coeffs,
    }
}

/// `L_X f = Σ_c X^c ∂f/∂c`.
pub fn lie_derivative(xk: &ProlongedVectorField, f: &RatFun) -> Result<RatFun, ProlongError> {
    let ord = f.max_order();
    if ord > xk.order {
        return Err(ProlongError::OrderMismatch {
            function: ord,
            field: xk.order,
        });
    }
    Ok(apply_vector_field(&xk.coeffs, f))
}

/// Applies `Σ_c coeffs[c] ∂_c` to `f`; variables without a coefficient are
/// treated as constants.
pub fn apply_vector_field(coeffs: &BTreeMap<VarId, RatFun>, f: &RatFun) -> RatFun {
    let vars = f.vars();
    let polynomial = vars
        .iter()
        .all(|v| coeffs.get(v).map(|c| c.is_polynomial()).unwrap_or(true));
    if polynomial {
        f.derive_with(|v| coeffs.get(&v).map(|c| c.numer().clone()))
    } else {
        f.derive_rational(|v| coeffs.get(&v).cloned())
    }
}

/// A point transformation `(x, u) ↦ (X(x,u), U(x,u))` together with the
/// images of jet coordinates up to `order`.
#[derive(Debug, Clone)]
pub struct PointMap {
    pub name: String,
    pub x_new: Vec<RatFun>,
    pub u_new: Vec<RatFun>,
    pub order: u32,
    pub images: BTreeMap<VarId, RatFun>,
}

impl PointMap {
    pub fn new(
        name: impl Into<String>,
        x_new: Vec<RatFun>,
        u_new: Vec<RatFun>,
        ctx: &JetContext,
    ) -> Result<Self, ProlongError> {
        let name = name.into();
        if x_new.len() != ctx.n() || u_new.len() != ctx.m() {
            return Err(ProlongError::Arity {
                name,
                expected: ctx.n() + ctx.m(),
                got: x_new.len() + u_new.len(),
            });
        }
        if x_new.iter().chain(u_new.iter()).any(|c| c.max_order() > 0) {
            return Err(ProlongError::NotAPointField(name));
        }
        let mut images = BTreeMap::new();
        for (i, x) in x_new.iter().enumerate() {
            images.insert(VarId::independent(i), x.clone());
        }
        for (j, u) in u_new.iter().enumerate() {
            images.insert(VarId::dependent(j, ctx.n()), u.clone());
        }
        Ok(PointMap {
            name,
            x_new,
            u_new,
            order: 0,
            images,
        })
    }

    /// `f ∘ Φ^{(k)}`; `f` must have order at most the map's order.
    pub fn pull_back(&self, f: &RatFun) -> Result<RatFun, ProlongError> {
        let ord = f.max_order();
        if ord > self.order {
            return Err(ProlongError::OrderMismatch {
                function: ord,
                field: self.order,
            });
        }
        let map: HashMap<VarId, RatFun> =
            self.images.iter().map(|(k, v)| (*k, v.clone())).collect();
        f.substitute(&map).map_err(|_| ProlongError::SingularJacobian)
    }
}

/// Prolongs a point map: the images of `u^j_{σ+1_i}` solve
/// `Σ_i img(u^j_{σ+1_i}) D_s(X^i) = D_s(img(u^j_σ))` for `s = 1..n`.
pub fn prolong_point_map(map: &PointMap, k: u32, ctx: &JetContext) -> Result<PointMap, ProlongError> {
    let n = ctx.n();
    // jac[s][i] = D_s(X^i)
    let jac: Vec<Vec<RatFun>> = (0..n)
        .map(|s| map.x_new.iter().map(|x| total_derivative(x, s, ctx)).collect())
        .collect();
    let inv = rf_inverse(&jac).ok_or(ProlongError::SingularJacobian)?;
    let mut out = PointMap::new(map.name.clone(), map.x_new.clone(), map.u_new.clone(), ctx)?;
    for j in 0..ctx.m() {
        for r in 0..k {
            for sigma in MultiIndex::of_order(n, r) {
                let img = out.images[&VarId::jet(j, &sigma)].clone();
                let rhs: Vec<RatFun> = (0..n).map(|s| total_derivative(&img, s, ctx)).collect();
                // v = jac^{-1} rhs, with jac indexed [s][i] acting on v_i
                for i in 0..n {
                    let target = VarId::jet(j, &sigma.incremented(i));
                    if out.images.contains_key(&target) {
                        continue;
                    }
                    let mut v = RatFun::zero();
                    for (s, w) in rhs.iter().enumerate() {
                        v = v.add(&inv[i][s].mul(w));
                    }
                    out.images.insert(target, v);
                }
            }
        }
    }
    out.order = k;
    Ok(out)
}

/// Decodes a coordinate into `(dependent, σ)` if it is a jet.
pub(crate) fn jet_parts(v: VarId, n: usize) -> Option<(usize, MultiIndex)> {
    match v.kind(n) {
        VarKind::Jet { dependent, sigma } => Some((dependent, sigma)),
        VarKind::Independent(_) => None,
    }
}
