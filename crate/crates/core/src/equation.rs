//! Differential equations in solved (orthonomic) form: prolongation into a
//! substitution table, reduction to normal form, symmetry tests.
//!
//! Two kinds of systems are supported. A *differential* system is a list of
//! rules `u^j_σ = rhs`; its prolongation adds every differentiated rule
//! `u^j_{σ+τ} = D_τ(rhs)`, reduced. A *pointwise* system fixes finitely many
//! coordinates (independents included) to values and is never
//! differentiated; it models jets taken at a single base point.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::expr::{print, MultiIndex, RatFun, VarId};
use crate::jet::{total_derivative, JetContext};
use crate::prolong::{jet_parts, lie_derivative, prolong_field, PointVectorField, ProlongedVectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("system is not orthonomic: {0}")]
    NotOrthonomic(String),
    #[error("inconsistent system: two rules give different normal forms for `{0}`")]
    InconsistentSystem(String),
    #[error("expression of order {expr} exceeds table order {table}")]
    OrderMismatch { expr: u32, table: u32 },
    #[error("denominator reduces to zero on the equation")]
    DenominatorCollapse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    Differential,
    Pointwise,
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub lead: VarId,
    pub rhs: RatFun,
}

#[derive(Debug)]
pub struct SolvedEquation {
    ctx: JetContext,
    rules: Vec<Rule>,
    kind: EquationKind,
    cache: Mutex<Option<Arc<ReductionTable>>>,
}

impl Clone for SolvedEquation {
    fn clone(&self) -> Self {
        SolvedEquation {
            ctx: self.ctx.clone(),
            rules: self.rules.clone(),
            kind: self.kind,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl SolvedEquation {
    /// A differential system; validates orthonomicity.
    pub fn new(ctx: &JetContext, rules: Vec<Rule>) -> Result<Self, EquationError> {
        let eq = SolvedEquation {
            ctx: ctx.clone(),
            rules,
            kind: EquationKind::Differential,
            cache: Mutex::new(None),
        };
        eq.validate()?;
        Ok(eq)
    }

    /// Pointwise constraints `lead = rhs` (leads may be independents).
    pub fn pointwise(ctx: &JetContext, rules: Vec<Rule>) -> Result<Self, EquationError> {
        let leads: HashSet<VarId> = rules.iter().map(|r| r.lead).collect();
        if leads.len() != rules.len() {
            return Err(EquationError::NotOrthonomic("repeated lead".into()));
        }
        for r in &rules {
            if r.rhs.vars().iter().any(|v| leads.contains(v)) {
                return Err(EquationError::NotOrthonomic(format!(
                    "right-hand side of `{}` mentions a constrained coordinate",
                    ctx.name_of(r.lead)
                )));
            }
        }
        Ok(SolvedEquation {
            ctx: ctx.clone(),
            rules,
            kind: EquationKind::Pointwise,
            cache: Mutex::new(None),
        })
    }

    pub fn empty(ctx: &JetContext) -> Self {
        SolvedEquation::new(ctx, Vec::new()).expect("empty system is orthonomic")
    }

    pub fn ctx(&self) -> &JetContext {
        &self.ctx
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    /// Maximal order of the leads.
    pub fn order(&self) -> u32 {
        self.rules.iter().map(|r| r.lead.order()).max().unwrap_or(0)
    }

    fn validate(&self) -> Result<(), EquationError> {
        let n = self.ctx.n();
        let name = |v: VarId| self.ctx.name_of(v);
        let mut leads: Vec<(usize, MultiIndex, VarId)> = Vec::new();
        for r in &self.rules {
            let (j, sigma) = jet_parts(r.lead, n).ok_or_else(|| {
                EquationError::NotOrthonomic(format!("lead `{}` is not a jet coordinate", name(r.lead)))
            })?;
            for (j2, s2, v2) in &leads {
                if *j2 == j && (s2.divides(&sigma) || sigma.divides(s2)) {
                    return Err(EquationError::NotOrthonomic(format!(
                        "lead `{}` is a derivative of lead `{}` (or equal)",
                        name(r.lead),
                        name(*v2)
                    )));
                }
            }
            leads.push((j, sigma, r.lead));
        }
        for r in &self.rules {
            if r.rhs.max_order() > r.lead.order() {
                return Err(EquationError::NotOrthonomic(format!(
                    "right-hand side of `{}` has higher order than its lead",
                    name(r.lead)
                )));
            }
            if let Some(v) = r.rhs.vars().into_iter().find(|&v| self.is_constrained(v)) {
                return Err(EquationError::NotOrthonomic(format!(
                    "right-hand side of `{}` contains constrained coordinate `{}`",
                    name(r.lead),
                    name(v)
                )));
            }
        }
        Ok(())
    }

    /// Whether `v` is a lead or (for differential systems) a derivative of
    /// a lead.
    pub fn is_constrained(&self, v: VarId) -> bool {
        match self.kind {
            EquationKind::Pointwise => self.rules.iter().any(|r| r.lead == v),
            EquationKind::Differential => {
                let Some((j, rho)) = jet_parts(v, self.ctx.n()) else {
                    return false;
                };
                self.rules.iter().any(|r| {
                    let (j2, s2) = jet_parts(r.lead, self.ctx.n()).unwrap();
                    j2 == j && s2.divides(&rho)
                })
            }
        }
    }

    /// Unconstrained coordinates of `J^k`, in canonical order.
    pub fn parametric_coordinates(&self, k: u32) -> Vec<VarId> {
        self.ctx
            .coordinates(k)
            .into_iter()
            .filter(|&v| !self.is_constrained(v))
            .collect()
    }

    /// The reduction table of order at least `k` (cached).
    pub fn table(&self, k: u32) -> Result<Arc<ReductionTable>, EquationError> {
        let mut cache = self.cache.lock().unwrap();
        if let Some(t) = cache.as_ref() {
            if t.order >= k {
                return Ok(t.clone());
            }
        }
        let t = Arc::new(prolong_equation(self, k)?);
        *cache = Some(t.clone());
        Ok(t)
    }

    /// `reduce(f)` on a table of sufficient order.
    pub fn reduce(&self, f: &RatFun) -> Result<RatFun, EquationError> {
        let k = f.max_order();
        reduce(f, &*self.table(k)?)
    }

    /// Total derivative on the equation: `reduce(D_i f)`.
    pub fn total_derivative(&self, f: &RatFun, i: usize) -> Result<RatFun, EquationError> {
        let d = total_derivative(f, i, &self.ctx);
        self.reduce(&d)
    }
}

/// Normal forms of every constrained coordinate up to `order`.
#[derive(Debug, Clone)]
pub struct ReductionTable {
    pub order: u32,
    pub kind: EquationKind,
    pub entries: BTreeMap<VarId, RatFun>,
}

impl ReductionTable {
    pub fn get(&self, v: VarId) -> Option<&RatFun> {
        self.entries.get(&v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct Builder<'a> {
    eq: &'a SolvedEquation,
    memo: HashMap<VarId, RatFun>,
    active: HashSet<VarId>,
}

impl Builder<'_> {
    fn entry(&mut self, c: VarId) -> Result<RatFun, EquationError> {
        if let Some(v) = self.memo.get(&c) {
            return Ok(v.clone());
        }
        let ctx = &self.eq.ctx;
        let n = ctx.n();
        if !self.active.insert(c) {
            return Err(EquationError::InconsistentSystem(ctx.name_of(c)));
        }
        let (j, rho) = jet_parts(c, n).expect("constrained coordinates are jets");
        let mut value: Option<RatFun> = None;
        for r in &self.eq.rules {
            let (j2, sigma) = jet_parts(r.lead, n).unwrap();
            if j2 != j || !sigma.divides(&rho) {
                continue;
            }
            let candidate = if sigma == rho {
                r.rhs.clone()
            } else {
                let i = (0..n).find(|&i| rho.get(i) > sigma.get(i)).unwrap();
                let parent = VarId::jet(j, &rho.decremented(i).unwrap());
                let base = self.entry(parent)?;
                let d = total_derivative(&base, i, ctx);
                self.normalize(&d)?
            };
            match &value {
                None => value = Some(candidate),
                Some(v) if v.equals(&candidate) => {}
                Some(_) => return Err(EquationError::InconsistentSystem(ctx.name_of(c))),
            }
        }
        let value = value.expect("coordinate is constrained");
        self.active.remove(&c);
        self.memo.insert(c, value.clone());
        Ok(value)
    }

    fn normalize(&mut self, f: &RatFun) -> Result<RatFun, EquationError> {
        let mut map = HashMap::new();
        for v in f.vars() {
            if self.eq.is_constrained(v) {
                map.insert(v, self.entry(v)?);
            }
        }
        if map.is_empty() {
            return Ok(f.clone());
        }
        f.substitute(&map).map_err(|_| EquationError::DenominatorCollapse)
    }
}

/// Builds the reduction table of order `k`.
pub fn prolong_equation(eq: &SolvedEquation, k: u32) -> Result<ReductionTable, EquationError> {
    if eq.kind == EquationKind::Pointwise {
        return Ok(ReductionTable {
            order: u32::MAX,
            kind: EquationKind::Pointwise,
            entries: eq.rules.iter().map(|r| (r.lead, r.rhs.clone())).collect(),
        });
    }
    let mut b = Builder {
        eq,
        memo: HashMap::new(),
        active: HashSet::new(),
    };
    let mut entries = BTreeMap::new();
    for r in 0..=k {
        for c in eq.ctx.jets_of_order(r) {
            if eq.is_constrained(c) {
                entries.insert(c, b.entry(c)?);
            }
        }
    }
    Ok(ReductionTable {
        order: k,
        kind: EquationKind::Differential,
        entries,
    })
}

/// Replaces every constrained coordinate by its normal form.
pub fn reduce(f: &RatFun, table: &ReductionTable) -> Result<RatFun, EquationError> {
    let ord = f.max_order();
    if table.kind == EquationKind::Differential && ord > table.order {
        return Err(EquationError::OrderMismatch {
            expr: ord,
            table: table.order,
        });
    }
    let map: HashMap<VarId, RatFun> = f
        .vars()
        .into_iter()
        .filter_map(|v| table.entries.get(&v).map(|e| (v, e.clone())))
        .collect();
    if map.is_empty() {
        return Ok(f.clone());
    }
    f.substitute(&map).map_err(|_| EquationError::DenominatorCollapse)
}

/// Whether `X` is an infinitesimal symmetry: every `L_{X^{(l)}}(lead − rhs)`
/// reduces to zero.
pub fn is_symmetry(x: &PointVectorField, eq: &SolvedEquation) -> Result<bool, EquationError> {
    let l = eq.order();
    let xl = prolong_field(x, l, &eq.ctx);
    let table = eq.table(l)?;
    for r in &eq.rules {
        let g = RatFun::var(r.lead).sub(&r.rhs);
        let lg = lie_derivative(&xl, &g).expect("order within prolongation");
        if !reduce(&lg, &table)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The prolongation of `X` restricted to the equation: coefficients on the
/// parametric coordinates of order `≤ k`, in normal form.
///
/// Differential systems use the reduced recursion (reduction commutes with
/// total derivatives there); pointwise systems prolong in full and reduce.
pub fn prolong_on_equation(
    x: &PointVectorField,
    k: u32,
    eq: &SolvedEquation,
) -> Result<ProlongedVectorField, EquationError> {
    let ctx = &eq.ctx;
    let n = ctx.n();
    let params = eq.parametric_coordinates(k);
    if eq.kind == EquationKind::Pointwise || eq.rules.is_empty() {
        let full = prolong_field(x, k, ctx);
        let table = eq.table(k)?;
        let mut coeffs = BTreeMap::new();
        for v in params {
            coeffs.insert(v, reduce(&full.coeffs[&v], &table)?);
        }
        return Ok(ProlongedVectorField {
            name: x.name.clone(),
            order: k,
            coeffs,
        });
    }
    let table = eq.table(k)?;
    let alpha: Vec<RatFun> = x
        .alpha
        .iter()
        .map(|a| reduce(a, &table))
        .collect::<Result<_, _>>()?;
    // D_i(α^s) on the equation
    let d_alpha: Vec<Vec<RatFun>> = (0..n)
        .map(|i| {
            x.alpha
                .iter()
                .map(|a| reduce(&total_derivative(a, i, ctx), &table))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut coeffs: BTreeMap<VarId, RatFun> = BTreeMap::new();
    for v in params {
        let value = match jet_parts(v, n) {
            None => {
                let i = match v.kind(n) {
                    crate::expr::VarKind::Independent(i) => i,
                    _ => unreachable!(),
                };
                alpha[i].clone()
            }
            Some((j, sigma)) if sigma.order() == 0 => reduce(&x.beta[j], &table)?,
            Some((j, sigma)) => {
                let i = (0..n)
                    .find(|&i| {
                        sigma
                            .decremented(i)
                            .map(|p| !eq.is_constrained(VarId::jet(j, &p)))
                            .unwrap_or(false)
                    })
                    .expect("parametric coordinates have a parametric parent");
                let parent = sigma.decremented(i).unwrap();
                let base = &coeffs[&VarId::jet(j, &parent)];
                let mut eta = total_derivative(base, i, ctx);
                for (s, da) in d_alpha[i].iter().enumerate() {
                    if da.is_zero() {
                        continue;
                    }
                    let u = RatFun::var(VarId::jet(j, &parent.incremented(s)));
                    eta = eta.sub(&u.mul(da));
                }
                reduce(&eta, &table)?
            }
        };
        coeffs.insert(v, value);
    }
    Ok(ProlongedVectorField {
        name: x.name.clone(),
        order: k,
        coeffs,
    })
}

/// Pretty table listing, one `lead -> normal form` per line.
pub fn format_table(table: &ReductionTable, ctx: &JetContext) -> String {
    table
        .entries
        .iter()
        .map(|(v, e)| format!("{} -> {}", ctx.name_of(*v), print(e, ctx)))
        .collect::<Vec<_>>()
        .join("\n")
}
