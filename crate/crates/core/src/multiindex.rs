//! Multi-indices in graded lexicographic order.
//!
//! Order: total degree first, then lexicographic with the first coordinate
//! most significant, so in two variables the sequence is
//! `(0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ...`. This order is part of the
//! serialization contract for jets.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index `e_i` in `n` variables.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut v = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            v.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(v))
    }

    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `x^alpha`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product()
    }

    /// Parses `"(a1,...,an)"`; whitespace is ignored.
    pub fn parse(s: &str) -> Result<MultiIndex> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Schema(format!("multi-index key {s:?} must look like (a1,...,an)")))?;
        if inner.is_empty() {
            return Err(Error::Schema(format!("empty multi-index key {s:?}")));
        }
        inner
            .split(',')
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::Schema(format!("bad multi-index entry {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        MultiIndex::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// All multi-indices in `n` variables with `|alpha| <= m`, graded-lex sorted.
pub fn indices_up_to(n: usize, m: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=m {
        out.extend(indices_of_order(n, d));
    }
    out
}

/// All multi-indices in `n` variables with `|alpha| = d`, graded-lex sorted.
pub fn indices_of_order(n: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fill(&mut cur, 0, d, &mut out);
    out
}

// Emits in descending lexicographic order, which is ascending in our order.
fn fill(cur: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        fill(cur, pos + 1, left - a, out);
    }
    cur[pos] = 0;
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

/// `prod_i binom(alpha_i, beta_i)`.
pub fn multi_binomial(alpha: &MultiIndex, beta: &MultiIndex) -> f64 {
    alpha.0.iter().zip(&beta.0).map(|(&a, &b)| binomial(a, b)).product()
}
