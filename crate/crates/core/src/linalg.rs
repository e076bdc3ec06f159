//! Exact linear algebra over the rationals and over the field of rational
//! functions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::expr::{RatFun, Rational};

/// Exact rank by fraction-free (Bareiss) elimination.
///
/// Rows are first scaled to integer vectors; every intermediate entry is a
/// minor of the input, so divisions are exact.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let n_rows = m.len();
    let n_cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in (c + 1)..n_cols {
                let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Reduced row echelon form over the rationals. Returns the matrix and the
/// pivot column of each nonzero row.
pub fn rref(rows: &[Vec<Rational>], n_cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Basis of `{v : M v = 0}`, one vector per free column in increasing
/// column order, each with a 1 in its free column.
pub fn kernel(rows: &[Vec<Rational>], n_cols: usize) -> Vec<Vec<Rational>> {
    let (m, pivots) = rref(rows, n_cols);
    let mut out = Vec::new();
    for free in 0..n_cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); n_cols];
        v[free] = Rational::one();
        for (row, &pc) in m.iter().zip(pivots.iter()) {
            v[pc] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Outcome of solving `A x = b` over the rational-function field.
#[derive(Debug, Clone)]
pub enum RfSolution {
    /// A particular solution (free unknowns set to zero).
    Solved(Vec<RatFun>),
    Inconsistent,
}

/// Solves `A x = b` where `a` has one row per equation. Pivots are the
/// first nonzero entry in each column, so the result is deterministic.
pub fn rf_solve(a: &[Vec<RatFun>], b: &[RatFun]) -> RfSolution {
    let n_unknowns = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<RatFun>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_unknowns {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().expect("nonzero pivot");
        let pivot_row: Vec<RatFun> = m[r].iter().map(|x| x.mul(&inv)).collect();
        m[r] = pivot_row.clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n_unknowns].is_zero()) {
        return RfSolution::Inconsistent;
    }
    let mut x = vec![RatFun::zero(); n_unknowns];
    for (row, &pc) in m.iter().zip(pivots.iter()) {
        x[pc] = row[n_unknowns].clone();
    }
    RfSolution::Solved(x)
}

/// Inverse of a square matrix over the rational-function field, or `None`
/// when it is singular.
pub fn rf_inverse(a: &[Vec<RatFun>]) -> Option<Vec<Vec<RatFun>>> {
    let n = a.len();
    if rf_rank(a) < n {
        return None;
    }
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let e: Vec<RatFun> = (0..n)
            .map(|i| if i == k { RatFun::one() } else { RatFun::zero() })
            .collect();
        match rf_solve(a, &e) {
            RfSolution::Solved(x) => cols.push(x),
            RfSolution::Inconsistent => return None,
        }
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Rank over the rational-function field.
pub fn rf_rank(a: &[Vec<RatFun>]) -> usize {
    let mut m = a.to_vec();
    let n_cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..n_cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip().expect("nonzero pivot");
        let pivot_row: Vec<RatFun> = m[r].iter().map(|x| x.mul(&inv)).collect();
        for row in m.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                *x = x.sub(&f.mul(p));
            }
        }
        r += 1;
    }
    r
}
