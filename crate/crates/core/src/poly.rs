//! Sparse multivariate polynomials with exact derivatives.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Error, Result};
use crate::multiindex::{binomial, MultiIndex};

/// A polynomial in `n` variables, stored as monomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Poly::zero(n);
        p.add_term(MultiIndex::zero(n), c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn coord(n: usize, i: usize) -> Self {
        let mut p = Poly::zero(n);
        p.add_term(MultiIndex::unit(n, i), 1.0);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut p = Poly::zero(n);
        for (a, c) in terms {
            if a.dim() != n {
                return input(format!("monomial {a} has {} variables, expected {n}", a.dim()));
            }
            p.add_term(a, c);
        }
        Ok(p)
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = Poly::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex(vec![k]), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn coeff(&self, a: &MultiIndex) -> f64 {
        self.terms.get(a).copied().unwrap_or(0.0)
    }

    pub fn add_term(&mut self, a: MultiIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.get(&a).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|a| a.order()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(a, c)| c * a.monomial(x)).sum()
    }

    /// `d^alpha p` as a polynomial.
    pub fn deriv(&self, alpha: &MultiIndex) -> Poly {
        let mut out = Poly::zero(self.n);
        for (a, &c) in &self.terms {
            if let Some(rest) = a.checked_sub(alpha) {
                let mut f = 1.0;
                for (&ai, &di) in a.0.iter().zip(&alpha.0) {
                    for j in 0..di {
                        f *= (ai - j) as f64;
                    }
                }
                out.add_term(rest, c * f);
            }
        }
        out
    }

    pub fn eval_deriv(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        self.deriv(alpha).eval(x)
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::zero(self.n);
        for (a, &c) in &self.terms {
            out.add_term(a.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.n, other.n, "polynomial arity mismatch");
        let mut out = self.clone();
        for (a, &c) in &other.terms {
            out.add_term(a.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.n, other.n, "polynomial arity mismatch");
        let mut out = Poly::zero(self.n);
        for (a, &c) in &self.terms {
            for (b, &d) in &other.terms {
                out.add_term(a.add(b), c * d);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::constant(self.n, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Drops all monomials of degree above `m`.
    pub fn truncate(&self, m: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (a, &c) in &self.terms {
            if a.order() <= m {
                out.add_term(a.clone(), c);
            }
        }
        out
    }

    /// Substitutes `x_i := subs[i]`; the result lives in the variables of `subs`.
    pub fn compose(&self, subs: &[Poly]) -> Result<Poly> {
        if subs.len() != self.n {
            return input(format!("composition needs {} inner polynomials, got {}", self.n, subs.len()));
        }
        let k = subs.first().map(|p| p.n).unwrap_or(0);
        if subs.iter().any(|p| p.n != k) {
            return input("inner polynomials of a composition disagree on arity");
        }
        let maxdeg: Vec<usize> = (0..self.n)
            .map(|i| self.terms.keys().map(|a| a.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Poly>> = subs
            .iter()
            .zip(&maxdeg)
            .map(|(s, &d)| {
                let mut v = vec![Poly::constant(k, 1.0)];
                for j in 1..=d {
                    let next = v[j - 1].mul(s);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero(k);
        for (a, &c) in &self.terms {
            let mut t = Poly::constant(k, c);
            for (i, &ai) in a.0.iter().enumerate() {
                if ai > 0 {
                    t = t.mul(&powers[i][ai]);
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Rewrites `p(x)` as a polynomial in `y = x - center`.
    pub fn recenter(&self, center: &[f64]) -> Poly {
        let subs: Vec<Poly> = (0..self.n)
            .map(|i| Poly::coord(self.n, i).add(&Poly::constant(self.n, center[i])))
            .collect();
        self.compose(&subs).expect("arity checked")
    }

    /// Embeds into `total` variables, placing variable `i` at position `offset + i`.
    pub fn embed(&self, total: usize, offset: usize) -> Poly {
        let mut out = Poly::zero(total);
        for (a, &c) in &self.terms {
            let mut v = vec![0; total];
            v[offset..offset + self.n].copy_from_slice(&a.0);
            out.add_term(MultiIndex(v), c);
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// `(x - c)^k` expanded, univariate helper for tests and oracles.
pub fn shifted_power(c: f64, k: usize) -> Poly {
    let coeffs: Vec<f64> = (0..=k)
        .map(|j| binomial(k, j) * (-c).powi((k - j) as i32))
        .collect();
    Poly::univariate(&coeffs)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    coeffs: BTreeMap<MultiIndex, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = if self.terms.is_empty() { Some(self.n) } else { None };
        PolyRepr { coeffs: self.terms.clone(), n }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        poly_from_repr(r).map_err(serde::de::Error::custom)
    }
}

fn poly_from_repr(r: PolyRepr) -> Result<Poly> {
    let parsed: Vec<(MultiIndex, f64)> = r.coeffs.into_iter().collect();
    let n = match (parsed.first(), r.n) {
        (Some((a, _)), _) => a.dim(),
        (None, Some(n)) => n,
        (None, None) => return Err(Error::Schema("empty polynomial needs an explicit \"n\"".into())),
    };
    Poly::from_terms(n, parsed).map_err(|e| Error::Schema(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn product_and_derivative() {
        let a = Poly::univariate(&[1.0, 2.0]);
        let b = Poly::univariate(&[3.0, 4.0]);
        let p = a.mul(&b);
        assert_eq!(p, Poly::univariate(&[3.0, 10.0, 8.0]));
        assert_eq!(p.eval_deriv(&mi(&[1]), &[0.0]), 10.0);
        assert_eq!(p.eval_deriv(&mi(&[2]), &[5.0]), 16.0);
    }

    #[test]
    fn compose_and_recenter() {
        // p(x) = x^2, substitute x = 2y + 1
        let p = Poly::univariate(&[0.0, 0.0, 1.0]);
        let q = p.compose(&[Poly::univariate(&[1.0, 2.0])]).unwrap();
        assert_eq!(q, Poly::univariate(&[1.0, 4.0, 4.0]));
        let r = p.recenter(&[3.0]);
        assert_eq!(r.eval(&[1.0]), 16.0);
        assert_eq!(shifted_power(2.0, 2), Poly::univariate(&[4.0, -4.0, 1.0]));
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = Poly::coord(2, 0);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn serde_round_trip() {
        let p = Poly::from_terms(2, [(mi(&[1, 0]), 2.0), (mi(&[0, 2]), -1.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"coeffs":{"(1,0)":2.0,"(0,2)":-1.0}}"#);
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let z: Poly = serde_json::from_str(r#"{"coeffs":{},"n":3}"#).unwrap();
        assert_eq!(z.nvars(), 3);
    }
}
