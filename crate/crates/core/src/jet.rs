//! Jet-space bookkeeping: contexts, coordinates, total derivatives.

use std::collections::HashMap;

use num_integer::binomial;
use thiserror::Error;

use crate::expr::{MultiIndex, Poly, RatFun, VarId, VarKind, MAX_INDEPENDENTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("at most {MAX_INDEPENDENTS} independent variables are supported")]
    TooManyIndependents,
    #[error("alias target `{0}` is not a coordinate")]
    BadAliasTarget(String),
}

/// Independent and dependent variable names plus optional shorthand
/// aliases for jet coordinates.
///
/// Canonical jet names are `{dep}` for order zero and `{dep}_{σ}` otherwise,
/// where `σ` is written as `n` digits (`u_21` is `∂²_x ∂_y u` when `n = 2`);
/// for `n = 1` the suffix is the derivative count in decimal (`y_12`).
#[derive(Debug, Clone)]
pub struct JetContext {
    independents: Vec<String>,
    dependents: Vec<String>,
    aliases: Vec<(String, VarId)>,
    lookup: HashMap<String, VarId>,
    display: HashMap<VarId, String>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl JetContext {
    pub fn new<S: AsRef<str>>(independents: &[S], dependents: &[S]) -> Result<Self, JetError> {
        if independents.len() > MAX_INDEPENDENTS {
            return Err(JetError::TooManyIndependents);
        }
        let mut ctx = JetContext {
            independents: independents.iter().map(|s| s.as_ref().to_string()).collect(),
            dependents: dependents.iter().map(|s| s.as_ref().to_string()).collect(),
            aliases: Vec::new(),
            lookup: HashMap::new(),
            display: HashMap::new(),
        };
        let n = ctx.n();
        let names: Vec<(String, VarId)> = ctx
            .independents
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), VarId::independent(i)))
            .chain(
                ctx.dependents
                    .iter()
                    .enumerate()
                    .map(|(j, s)| (s.clone(), VarId::dependent(j, n))),
            )
            .collect();
        for (name, v) in names {
            if !valid_ident(&name) || name.contains('_') {
                return Err(JetError::InvalidName(name));
            }
            if ctx.lookup.insert(name.clone(), v).is_some() {
                return Err(JetError::DuplicateName(name));
            }
        }
        Ok(ctx)
    }

    /// Curves `y = y(x)` in the plane, with the shorthand `y1, y2, …` for
    /// derivatives up to order 12.
    pub fn curves() -> Self {
        let mut ctx = Self::new(&["x"], &["y"]).expect("valid");
        for k in 1..=12 {
            ctx = ctx
                .with_alias(&format!("y{k}"), VarId::jet(0, &MultiIndex::from_slice(&[k])))
                .expect("valid alias");
        }
        ctx
    }

    /// Registers `alias` as an input and display name for `target`.
    pub fn with_alias(mut self, alias: &str, target: VarId) -> Result<Self, JetError> {
        if !valid_ident(alias) {
            return Err(JetError::InvalidName(alias.to_string()));
        }
        if self.resolve(alias).is_some() {
            return Err(JetError::DuplicateName(alias.to_string()));
        }
        self.lookup.insert(alias.to_string(), target);
        self.display.entry(target).or_insert_with(|| alias.to_string());
        self.aliases.push((alias.to_string(), target));
        Ok(self)
    }

    /// Registers an alias given the canonical name of its target.
    pub fn with_alias_named(self, alias: &str, target: &str) -> Result<Self, JetError> {
        let v = self
            .resolve(target)
            .ok_or_else(|| JetError::BadAliasTarget(target.to_string()))?;
        self.with_alias(alias, v)
    }

    pub fn n(&self) -> usize {
        self.independents.len()
    }

    pub fn m(&self) -> usize {
        self.dependents.len()
    }

    pub fn independents(&self) -> &[String] {
        &self.independents
    }

    pub fn dependents(&self) -> &[String] {
        &self.dependents
    }

    pub fn aliases(&self) -> &[(String, VarId)] {
        &self.aliases
    }

    pub fn x(&self, i: usize) -> VarId {
        VarId::independent(i)
    }

    pub fn u(&self, j: usize, sigma: &[u32]) -> VarId {
        VarId::jet(j, &MultiIndex::from_slice(sigma))
    }

    /// Looks up an identifier: declared names, aliases, then canonical jet
    /// names.
    pub fn resolve(&self, name: &str) -> Option<VarId> {
        if let Some(v) = self.lookup.get(name) {
            return Some(*v);
        }
        let (dep, suffix) = name.split_once('_')?;
        let j = self.dependents.iter().position(|d| d == dep)?;
        if suffix.is_empty() || !suffix.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let n = self.n();
        let entries: Vec<u32> = if n == 1 {
            vec![suffix.parse().ok()?]
        } else {
            if suffix.len() != n {
                return None;
            }
            suffix.chars().map(|c| c.to_digit(10).unwrap()).collect()
        };
        if entries.iter().sum::<u32>() == 0 || entries.iter().sum::<u32>() > 255 {
            return None;
        }
        Some(VarId::jet(j, &MultiIndex::from_slice(&entries)))
    }

    pub fn canonical_name(&self, v: VarId) -> String {
        match v.kind(self.n()) {
            VarKind::Independent(i) => self
                .independents
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{i}")),
            VarKind::Jet { dependent, sigma } => {
                let dep = self
                    .dependents
                    .get(dependent)
                    .cloned()
                    .unwrap_or_else(|| format!("u{dependent}"));
                if sigma.order() == 0 {
                    dep
                } else if self.n() == 1 {
                    format!("{dep}_{}", sigma.get(0))
                } else {
                    let digits: String = sigma.entries().map(|e| e.to_string()).collect();
                    format!("{dep}_{digits}")
                }
            }
        }
    }

    /// Display name: the first alias registered for `v`, else canonical.
    pub fn name_of(&self, v: VarId) -> String {
        self.display
            .get(&v)
            .cloned()
            .unwrap_or_else(|| self.canonical_name(v))
    }

    /// All jet coordinates `u^j_σ` with `|σ| = k`, in canonical order.
    pub fn jets_of_order(&self, k: u32) -> Vec<VarId> {
        let sigmas = MultiIndex::of_order(self.n(), k);
        let mut out = Vec::with_capacity(sigmas.len() * self.m());
        for j in 0..self.m() {
            for s in &sigmas {
                out.push(VarId::jet(j, s));
            }
        }
        out.sort();
        out
    }

    /// All coordinates of `J^k`: independents, then jets up to order `k`.
    pub fn coordinates(&self, k: u32) -> Vec<VarId> {
        let mut out: Vec<VarId> = (0..self.n()).map(VarId::independent).collect();
        for r in 0..=k {
            out.extend(self.jets_of_order(r));
        }
        out
    }

    /// `dim J^k`.
    pub fn dimension(&self, k: u32) -> usize {
        self.n() + self.m() * binomial(self.n() + k as usize, k as usize)
    }

    /// The jet coordinate `u^j_{σ+1_i}` obtained by differentiating `v` in
    /// direction `i`; `None` for independents.
    pub fn raise(&self, v: VarId, i: usize) -> Option<VarId> {
        match v.kind(self.n()) {
            VarKind::Independent(_) => None,
            VarKind::Jet { dependent, sigma } => Some(VarId::jet(dependent, &sigma.incremented(i))),
        }
    }
}

/// Dimension of the fiber of `J^k → J^{k-1}`: `m · C(n+k-1, k)`.
pub fn fiber_dimension(ctx: &JetContext, k: u32) -> usize {
    let n = ctx.n();
    if n == 0 {
        return if k == 0 { ctx.m() } else { 0 };
    }
    ctx.m() * binomial(n + k as usize - 1, k as usize)
}

/// Total derivative `D_i = ∂_{x^i} + Σ u^j_{σ+1_i} ∂_{u^j_σ}`.
pub fn total_derivative(f: &RatFun, i: usize, ctx: &JetContext) -> RatFun {
    let xi = VarId::independent(i);
    f.derive_with(|v| {
        if v == xi {
            Some(Poly::one())
        } else if v.is_jet() {
            ctx.raise(v, i).map(Poly::var)
        } else {
            None
        }
    })
}

/// Iterated total derivative `D_σ f`.
pub fn total_derivative_multi(f: &RatFun, sigma: &MultiIndex, ctx: &JetContext) -> RatFun {
    let mut out = f.clone();
    for i in 0..sigma.len() {
        for _ in 0..sigma.get(i) {
            out = total_derivative(&out, i, ctx);
        }
    }
    out
}

/// Horizontal differential `d̂f = Σ D_i(f) dx^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalCovector {
    pub components: Vec<RatFun>,
}

pub fn horizontal_differential(f: &RatFun, ctx: &JetContext) -> HorizontalCovector {
    HorizontalCovector {
        components: (0..ctx.n()).map(|i| total_derivative(f, i, ctx)).collect(),
    }
}
