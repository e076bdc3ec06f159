//! Variable identifiers for jet coordinates.
//!
//! A [`VarId`] packs its kind and indices into a single `u64` whose natural
//! ordering is the canonical variable order used everywhere else:
//!
//! 1. independents `x^i`, by index;
//! 2. jet coordinates `u^j_σ`, by total order `|σ|`, then dependent index
//!    `j`, then `σ` with larger leading entries first (so `u_x` precedes
//!    `u_y`, and `u_xx` precedes `u_xy`).
//!
//! Smaller keys are "earlier" variables and dominate in lexicographic
//! comparisons of monomials.

use std::fmt;

use smallvec::SmallVec;

/// Maximum number of independent variables a context may declare.
pub const MAX_INDEPENDENTS: usize = 4;

/// Maximum value of a single multi-index entry (and of the total order).
pub const MAX_ENTRY: u32 = 255;

/// A multi-index `σ = (σ_1, …, σ_n)` of non-negative derivative counts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(SmallVec<[u8; MAX_INDEPENDENTS]>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(entries: &[u32]) -> Self {
        MultiIndex(entries.iter().map(|&e| e as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i] as u32
    }

    pub fn entries(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|&e| e as u32)
    }

    /// `|σ|`.
    pub fn order(&self) -> u32 {
        self.entries().sum()
    }

    /// `σ + 1_i`.
    pub fn incremented(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// `σ - 1_i`, or `None` when `σ_i = 0`.
    pub fn decremented(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[i] -= 1;
        Some(m)
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `other - self` when `self ≤ other` componentwise.
    pub fn complement_in(&self, other: &Self) -> Option<Self> {
        if self.divides(other) {
            Some(MultiIndex(
                other.0.iter().zip(self.0.iter()).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// Componentwise `self ≤ other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// All multi-indices of length `n` with total order exactly `k`, in the
    /// canonical coordinate order (larger leading entries first).
    pub fn of_order(n: usize, k: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if pos + 1 == n {
                cur[pos] = left;
                out.push(MultiIndex::from_slice(cur));
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
        }
        if n == 0 {
            if k == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        rec(0, k, &mut cur, &mut out);
        out
    }

    /// Every `ρ ≤ σ` componentwise, including `0` and `σ` itself.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.len())];
        for i in 0..self.len() {
            let mut next = Vec::new();
            for base in &out {
                for e in 0..=self.0[i] {
                    let mut m = base.clone();
                    m.0[i] = e;
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A coordinate on a jet space: an independent variable or a jet `u^j_σ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u64);

const JET_FLAG: u64 = 1 << 56;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    Independent(usize),
    Jet { dependent: usize, sigma: MultiIndex },
}

impl VarId {
    pub fn independent(i: usize) -> Self {
        VarId(i as u64)
    }

    /// Jet coordinate `u^j_σ`. Panics if `σ` is longer than
    /// [`MAX_INDEPENDENTS`] or its order exceeds [`MAX_ENTRY`].
    pub fn jet(dependent: usize, sigma: &MultiIndex) -> Self {
        assert!(sigma.len() <= MAX_INDEPENDENTS, "too many independents");
        let order = sigma.order();
        assert!(order <= MAX_ENTRY, "jet order too large");
        let mut key = JET_FLAG | ((order as u64) << 48) | ((dependent as u64 & 0xff) << 40);
        for i in 0..MAX_INDEPENDENTS {
            let e = if i < sigma.len() { sigma.get(i) } else { 0 };
            key |= (255 - e as u64) << (32 - 8 * i);
        }
        VarId(key)
    }

    /// Dependent variable `u^j` itself (order zero).
    pub fn dependent(j: usize, n: usize) -> Self {
        Self::jet(j, &MultiIndex::zero(n))
    }

    pub fn is_jet(self) -> bool {
        self.0 & JET_FLAG != 0
    }

    /// Decodes the variable, trimming the multi-index to `n` entries.
    pub fn kind(self, n: usize) -> VarKind {
        if !self.is_jet() {
            return VarKind::Independent(self.0 as usize);
        }
        let dependent = ((self.0 >> 40) & 0xff) as usize;
        let entries: Vec<u32> = (0..n)
            .map(|i| 255 - ((self.0 >> (32 - 8 * i)) & 0xff) as u32)
            .collect();
        VarKind::Jet {
            dependent,
            sigma: MultiIndex::from_slice(&entries),
        }
    }

    /// Jet order `|σ|`; independents have order 0.
    pub fn order(self) -> u32 {
        if self.is_jet() {
            ((self.0 >> 48) & 0xff) as u32
        } else {
            0
        }
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind(MAX_INDEPENDENTS) {
            VarKind::Independent(i) => write!(f, "x{i}"),
            VarKind::Jet { dependent, sigma } => write!(f, "u{dependent}{sigma:?}"),
        }
    }
}
