//! Rational functions `num / den` over the jet coordinates.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use super::var::VarId;
use super::{ExprError, Rational};

/// Polynomials up to this many terms are tried for exact cancellation after
/// each operation.
const CANCEL_TRIAL_LIMIT: usize = 4000;

/// An exact rational function.
///
/// Representation invariants: `den` is nonzero, primitive over the integers
/// with a positive leading coefficient; `num` and `den` share no monomial
/// factor. The representation is not unique (no polynomial GCD is taken),
/// so equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn zero() -> Self {
        RatFun {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFun::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::from_int(c))
    }

    pub fn var(v: VarId) -> Self {
        Self::from_poly(Poly::var(v))
    }

    /// `num / den`, normalized. Fails if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.as_constant() {
            return Self::from_poly(num.scale(&(Rational::one() / c)));
        }
        let mut num = num;
        let mut den = den;
        let g = num.monomial_content().gcd(&den.monomial_content());
        if !g.is_one() {
            num = num.div_monomial(&g);
            den = den.div_monomial(&g);
        }
        if den.len() <= num.len() && num.len() <= CANCEL_TRIAL_LIMIT {
            if let Some(q) = num.div_exact(&den) {
                return Self::from_poly(q);
            }
        }
        if num.len() < den.len() && den.len() <= CANCEL_TRIAL_LIMIT {
            if let Some(q) = den.div_exact(&num) {
                if let Some(c) = q.as_constant() {
                    return Self::constant(Rational::one() / c);
                }
                num = Poly::one();
                den = q;
            }
        }
        if let Some(c) = den.as_constant() {
            return Self::from_poly(num.scale(&(Rational::one() / c)));
        }
        let mut c = den.content();
        if den.leading_is_negative() {
            c = -c;
        }
        if !c.is_one() {
            let inv = Rational::one() / &c;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFun { num, den }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    /// Highest jet order among the variables present (0 if none).
    pub fn max_order(&self) -> u32 {
        self.vars().into_iter().map(|v| v.order()).max().unwrap_or(0)
    }

    /// Number of stored terms in numerator and denominator.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: &Rational) -> RatFun {
        if k.is_zero() {
            return Self::zero();
        }
        RatFun {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.combine(other, true)
    }

    fn combine(&self, other: &RatFun, negate: bool) -> RatFun {
        let op = |a: &Poly, b: &Poly| if negate { a.sub(b) } else { a.add(b) };
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        if self.den == other.den {
            return Self::normalized(op(&self.num, &other.num), self.den.clone());
        }
        if self.den.is_one() {
            return Self::normalized(op(&self.num.mul(&other.den), &other.num), other.den.clone());
        }
        if other.den.is_one() {
            return Self::normalized(op(&self.num, &other.num.mul(&self.den)), self.den.clone());
        }
        if self.den.len() <= other.den.len() {
            if let Some(q) = other.den.div_exact(&self.den) {
                return Self::normalized(op(&self.num.mul(&q), &other.num), other.den.clone());
            }
        } else if let Some(q) = self.den.div_exact(&other.den) {
            return Self::normalized(op(&self.num, &other.num.mul(&q)), self.den.clone());
        }
        Self::normalized(
            op(&self.num.mul(&other.den), &other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // cross-cancel before multiplying out
        let (mut a_num, mut b_den) = (self.num.clone(), other.den.clone());
        let (mut b_num, mut a_den) = (other.num.clone(), self.den.clone());
        if !b_den.is_one() {
            if let Some(q) = a_num.div_exact(&b_den) {
                a_num = q;
                b_den = Poly::one();
            }
        }
        if !a_den.is_one() {
            if let Some(q) = b_num.div_exact(&a_den) {
                b_num = q;
                a_den = Poly::one();
            }
        }
        Self::normalized(a_num.mul(&b_num), a_den.mul(&b_den))
    }

    pub fn recip(&self) -> Result<RatFun, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFun) -> Result<RatFun, ExprError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, e: i64) -> Result<RatFun, ExprError> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let e = u32::try_from(e).map_err(|_| ExprError::ExponentTooLarge)?;
        Ok(RatFun {
            num: self.num.pow(e),
            den: self.den.pow(e),
        })
    }

    /// Mathematical equality by cross-multiplication.
    pub fn equals(&self, other: &RatFun) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Exact partial derivative by the quotient rule.
    pub fn partial(&self, v: VarId) -> RatFun {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return Self::from_poly(dn);
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        Self::normalized(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// Applies a derivation of the polynomial ring, given by the images of
    /// variables as polynomials, extended by the quotient rule.
    pub fn derive_with(&self, images: impl Fn(VarId) -> Option<Poly>) -> RatFun {
        let dn = self.num.derive_with(&images);
        if self.den.is_one() {
            return Self::from_poly(dn);
        }
        let dd = self.den.derive_with(&images);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        Self::normalized(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// Applies the derivation `Σ_v coeff(v) ∂_v` with rational-function
    /// coefficients.
    pub fn derive_rational(&self, coeff: impl Fn(VarId) -> Option<RatFun>) -> RatFun {
        let apply = |p: &Poly| -> RatFun {
            let mut acc = RatFun::zero();
            for v in p.vars() {
                if let Some(c) = coeff(v) {
                    if c.is_zero() {
                        continue;
                    }
                    acc = acc.add(&c.mul(&RatFun::from_poly(p.partial(v))));
                }
            }
            acc
        };
        let dn = apply(&self.num);
        if self.den.is_one() {
            return dn;
        }
        let dd = apply(&self.den);
        let den = RatFun::from_poly(self.den.clone());
        let numer = dn.mul(&den).sub(&dd.mul(&RatFun::from_poly(self.num.clone())));
        let den_sq = RatFun::from_poly(self.den.mul(&self.den));
        numer.div(&den_sq).expect("nonzero denominator")
    }

    /// Exact value at a point.
    pub fn evaluate<F>(&self, mut lookup: F) -> Result<Rational, ExprError>
    where
        F: FnMut(VarId) -> Option<Rational>,
    {
        let d = self
            .den
            .evaluate(&mut lookup)
            .map_err(ExprError::UnboundVariable)?;
        if d.is_zero() {
            return Err(ExprError::DenominatorVanishes);
        }
        let n = self
            .num
            .evaluate(&mut lookup)
            .map_err(ExprError::UnboundVariable)?;
        Ok(n / d)
    }

    /// Substitutes rational functions for variables. Fails only if the new
    /// denominator collapses to zero.
    pub fn substitute(&self, map: &HashMap<VarId, RatFun>) -> Result<RatFun, ExprError> {
        let touched = self.vars().into_iter().any(|v| map.contains_key(&v));
        if !touched {
            return Ok(self.clone());
        }
        let n = substitute_poly(&self.num, map);
        let d = substitute_poly(&self.den, map);
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        n.div(&d)
    }
}

/// Substitutes into a polynomial, bringing all terms over the common
/// denominator `Π den_v^{E_v}` where `E_v` is the top exponent of `v`.
fn substitute_poly(p: &Poly, map: &HashMap<VarId, RatFun>) -> RatFun {
    let vars: Vec<VarId> = p.vars().into_iter().filter(|v| map.contains_key(v)).collect();
    if vars.is_empty() {
        return RatFun::from_poly(p.clone());
    }
    let max_e: HashMap<VarId, u32> = vars.iter().map(|&v| (v, p.max_exponent(v))).collect();
    let mut num_pows: HashMap<(VarId, u32), Poly> = HashMap::new();
    let mut den_pows: HashMap<(VarId, u32), Poly> = HashMap::new();
    let pow_of = |cache: &mut HashMap<(VarId, u32), Poly>, v: VarId, e: u32, base: &Poly| {
        cache.entry((v, e)).or_insert_with(|| base.pow(e)).clone()
    };
    let mut total = Poly::zero();
    let mut grouped: HashMap<Vec<(VarId, u32)>, Vec<(Monomial, Rational)>> = HashMap::new();
    for (m, c) in p.terms() {
        let mut key = Vec::new();
        let mut kept = Vec::new();
        for &(v, e) in m.factors() {
            if map.contains_key(&v) {
                key.push((v, e));
            } else {
                kept.push((v, e));
            }
        }
        grouped
            .entry(key)
            .or_default()
            .push((Monomial::from_pairs(kept), c.clone()));
    }
    let mut keys: Vec<_> = grouped.keys().cloned().collect();
    keys.sort();
    for key in keys {
        let rest = Poly::from_terms(grouped.remove(&key).unwrap());
        let mut factor = Poly::one();
        for &v in &vars {
            let e = key.iter().find(|(w, _)| *w == v).map(|(_, e)| *e).unwrap_or(0);
            let val = &map[&v];
            if e > 0 {
                factor = factor.mul(&pow_of(&mut num_pows, v, e, val.numer()));
            }
            let de = max_e[&v] - e;
            if de > 0 && !val.denom().is_one() {
                factor = factor.mul(&pow_of(&mut den_pows, v, de, val.denom()));
            }
        }
        total = total.add(&rest.mul(&factor));
    }
    let mut den = Poly::one();
    for &v in &vars {
        let val = &map[&v];
        if !val.denom().is_one() {
            den = den.mul(&val.denom().pow(max_e[&v]));
        }
    }
    RatFun::normalized(total, den)
}

impl PartialEq for RatFun {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl From<Poly> for RatFun {
    fn from(p: Poly) -> Self {
        RatFun::from_poly(p)
    }
}

impl std::ops::Add for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        RatFun::add(self, rhs)
    }
}

impl std::ops::Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        RatFun::sub(self, rhs)
    }
}

impl std::ops::Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        RatFun::mul(self, rhs)
    }
}

impl std::ops::Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun::neg(self)
    }
}
