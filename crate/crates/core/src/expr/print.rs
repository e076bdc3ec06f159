//! Canonical text form. Terms are emitted leading-first in the graded
//! lexicographic order; the output reparses to an equal value.

use num_traits::{One, Signed};

use super::{Monomial, Poly, RatFun, Rational};
use crate::jet::JetContext;

fn monomial(m: &Monomial, ctx: &JetContext) -> String {
    m.factors()
        .iter()
        .map(|&(v, e)| {
            let name = ctx.name_of(v);
            if e == 1 {
                name
            } else {
                format!("{name}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn term(m: &Monomial, c: &Rational, ctx: &JetContext) -> String {
    let c = c.abs();
    if m.is_one() {
        return c.to_string();
    }
    if c.is_one() {
        monomial(m, ctx)
    } else {
        format!("{c}*{}", monomial(m, ctx))
    }
}

pub(crate) fn print_poly(p: &Poly, ctx: &JetContext) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&term(m, c, ctx));
    }
    out
}

/// Canonical, reparseable text of `f`.
pub fn print(f: &RatFun, ctx: &JetContext) -> String {
    let num = print_poly(f.numer(), ctx);
    if f.denom().is_one() {
        return num;
    }
    let num = if f.numer().len() == 1 {
        num
    } else {
        format!("({num})")
    };
    let den = f.denom();
    let simple_den = den.len() == 1 && {
        let (m, c) = &den.terms()[0];
        c.is_one() && m.factors().len() == 1
    };
    if simple_den {
        format!("{num}/{}", print_poly(den, ctx))
    } else {
        format!("{num}/({})", print_poly(den, ctx))
    }
}
