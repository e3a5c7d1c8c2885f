//! Truncated multivariate Taylor series at a point.
//!
//! A [`Series`] of order `q` in `n` variables stores the coefficients of
//! `sum_{|a| <= q} c_a h^a` where `h` is the displacement from the expansion
//! point. Arithmetic is truncated at order `q`, which makes it an exact engine
//! for partial derivatives up to order `q`: `d^a f(x) = a! c_a`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::multiindex::{factorial, indices_up_to, MultiIndex};

/// Index tables shared by all series with the same `(n, q)`.
#[derive(Debug)]
pub struct Space {
    pub n: usize,
    pub q: usize,
    pub idx: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, usize>,
    mul: Vec<(u32, u32, u32)>,
}

impl Space {
    fn build(n: usize, q: usize) -> Space {
        let idx = indices_up_to(n, q);
        let pos: HashMap<_, _> = idx.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let deg: Vec<usize> = idx.iter().map(|a| a.order()).collect();
        let mut mul = Vec::new();
        for (i, a) in idx.iter().enumerate() {
            for (j, b) in idx.iter().enumerate() {
                if deg[i] + deg[j] <= q {
                    let k = pos[&a.add(b)];
                    mul.push((i as u32, j as u32, k as u32));
                }
            }
        }
        Space { n, q, idx, pos, mul }
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn position(&self, a: &MultiIndex) -> Option<usize> {
        self.pos.get(a).copied()
    }
}

/// Shared index tables for `(n, q)`.
pub fn space(n: usize, q: usize) -> Arc<Space> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Space>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((n, q))
        .or_insert_with(|| Arc::new(Space::build(n, q)))
        .clone()
}

#[derive(Clone, Debug)]
pub struct Series {
    sp: Arc<Space>,
    c: Vec<f64>,
}

impl Series {
    pub fn zero(sp: &Arc<Space>) -> Series {
        Series { sp: sp.clone(), c: vec![0.0; sp.len()] }
    }

    pub fn constant(sp: &Arc<Space>, v: f64) -> Series {
        let mut s = Series::zero(sp);
        s.c[0] = v;
        s
    }

    /// The coordinate `x_i` expanded at a point whose `i`-th entry is `v`.
    pub fn variable(sp: &Arc<Space>, i: usize, v: f64) -> Series {
        let mut s = Series::constant(sp, v);
        if sp.q >= 1 {
            let k = sp.position(&MultiIndex::unit(sp.n, i)).expect("unit index");
            s.c[k] = 1.0;
        }
        s
    }

    /// Coordinates expanded at `x`.
    pub fn variables(sp: &Arc<Space>, x: &[f64]) -> Vec<Series> {
        x.iter().enumerate().map(|(i, &v)| Series::variable(sp, i, v)).collect()
    }

    /// Builds a series from derivative values `d^a f(x)` listed in the space order.
    pub fn from_derivatives(sp: &Arc<Space>, d: &[f64]) -> Series {
        let c = sp.idx.iter().zip(d).map(|(a, v)| v / a.factorial()).collect();
        Series { sp: sp.clone(), c }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.sp
    }

    pub fn order(&self) -> usize {
        self.sp.q
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, a: &MultiIndex) -> f64 {
        self.sp.position(a).map(|k| self.c[k]).unwrap_or(0.0)
    }

    /// `d^a f` at the expansion point; 0 beyond the truncation order.
    pub fn deriv(&self, a: &MultiIndex) -> f64 {
        self.coeff(a) * a.factorial()
    }

    /// All derivatives in space order.
    pub fn derivatives(&self) -> Vec<f64> {
        self.sp.idx.iter().zip(&self.c).map(|(a, c)| c * a.factorial()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    pub fn add(&self, o: &Series) -> Series {
        debug_assert!(Arc::ptr_eq(&self.sp, &o.sp));
        Series { sp: self.sp.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Series) -> Series {
        Series { sp: self.sp.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> Series {
        Series { sp: self.sp.clone(), c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn add_const(&self, v: f64) -> Series {
        let mut out = self.clone();
        out.c[0] += v;
        out
    }

    pub fn mul(&self, o: &Series) -> Series {
        let mut c = vec![0.0; self.sp.len()];
        for &(i, j, k) in &self.sp.mul {
            let a = self.c[i as usize];
            if a != 0.0 {
                c[k as usize] += a * o.c[j as usize];
            }
        }
        Series { sp: self.sp.clone(), c }
    }

    /// `g(self)` where `d[k] = g^(k)(self.value())` for `k = 0..=q`.
    pub fn compose_univariate(&self, d: &[f64]) -> Series {
        let q = self.sp.q;
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut out = Series::constant(&self.sp, d[0]);
        let mut pw = Series::constant(&self.sp, 1.0);
        for (k, dk) in d.iter().enumerate().take(q + 1).skip(1) {
            pw = pw.mul(&h);
            if *dk != 0.0 {
                out = out.add(&pw.scale(dk / factorial(k)));
            }
        }
        out
    }

    /// `1/self`; the caller guarantees a nonzero value.
    pub fn recip(&self) -> Series {
        let v = self.value();
        let q = self.sp.q;
        let d: Vec<f64> = (0..=q)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(k) / v.powi(k as i32 + 1)
            })
            .collect();
        self.compose_univariate(&d)
    }

    /// `self^e` for a positive value (any real exponent).
    pub fn powf(&self, e: f64) -> Series {
        let v = self.value();
        let q = self.sp.q;
        let mut d = Vec::with_capacity(q + 1);
        let mut coef = 1.0;
        for k in 0..=q {
            d.push(coef * v.powf(e - k as f64));
            coef *= e - k as f64;
        }
        self.compose_univariate(&d)
    }

    /// Treats `self` (in `k` variables) as a polynomial in the displacement and
    /// substitutes `h_i := inner[i] - inner[i].value()`. The result lives in
    /// the space of `inner`.
    pub fn compose(&self, inner: &[Series]) -> Series {
        assert_eq!(inner.len(), self.sp.n, "composition arity mismatch");
        let target = inner
            .first()
            .map(|s| s.sp.clone())
            .expect("composition needs at least one inner series");
        let q = target.q;
        let powers: Vec<Vec<Series>> = inner
            .iter()
            .map(|s| {
                let mut h = s.clone();
                h.c[0] = 0.0;
                let mut v = vec![Series::constant(&target, 1.0)];
                for j in 1..=q.min(self.sp.q) {
                    let next = v[j - 1].mul(&h);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Series::zero(&target);
        for (a, &c) in self.sp.idx.iter().zip(&self.c) {
            if c == 0.0 || a.order() > q {
                continue;
            }
            let mut t = Series::constant(&target, c);
            for (i, &ai) in a.0.iter().enumerate() {
                if ai > 0 {
                    t = t.mul(&powers[i][ai]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// The series of `d^a f`, truncated to the order of `target`
    /// (`target.q + |a| <= self.order()` for exactness).
    pub fn differentiate(&self, a: &MultiIndex, target: &Arc<Space>) -> Series {
        let mut out = Series::zero(target);
        for (k, g) in target.idx.iter().enumerate() {
            let ga = g.add(a);
            if let Some(p) = self.sp.position(&ga) {
                out.c[k] = self.c[p] * ga.factorial() / g.factorial();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn product_rule() {
        let sp = space(1, 3);
        let x = Series::variable(&sp, 0, 0.0);
        let f = x.scale(2.0).add_const(1.0).mul(&x.scale(4.0).add_const(3.0));
        assert_eq!(f.deriv(&mi(&[1])), 10.0);
        assert_eq!(f.deriv(&mi(&[2])), 16.0);
    }

    #[test]
    fn reciprocal_derivatives() {
        let sp = space(1, 2);
        let x = Series::variable(&sp, 0, 2.0);
        let r = x.recip();
        assert!((r.deriv(&mi(&[1])) + 0.25).abs() < 1e-15);
        let x1 = Series::variable(&sp, 0, 1.0);
        assert!((x1.recip().deriv(&mi(&[2])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn composition_chain_rule() {
        // F(y) = 5 + 3 (y - 2) at y = 2, G(x) = 2 + 4x at 0: (F o G)' = 12
        let sp1 = space(1, 1);
        let f = Series::from_derivatives(&sp1, &[5.0, 3.0]);
        let g = Series::from_derivatives(&sp1, &[2.0, 4.0]);
        let fg = f.compose(&[g]);
        assert_eq!(fg.derivatives(), vec![5.0, 12.0]);
    }

    #[test]
    fn mixed_partials() {
        let sp = space(2, 3);
        let v = Series::variables(&sp, &[1.0, 2.0]);
        // x^2 y
        let f = v[0].mul(&v[0]).mul(&v[1]);
        assert_eq!(f.deriv(&mi(&[2, 1])), 2.0);
        assert_eq!(f.deriv(&mi(&[1, 1])), 2.0);
        assert_eq!(f.deriv(&mi(&[1, 0])), 4.0);
        let d = f.differentiate(&mi(&[1, 0]), &space(2, 2));
        assert_eq!(d.value(), 4.0);
        assert_eq!(d.deriv(&mi(&[1, 1])), 2.0);
    }

    #[test]
    fn powf_matches_sqrt() {
        let sp = space(1, 2);
        let x = Series::variable(&sp, 0, 4.0);
        let s = x.powf(0.5);
        assert!((s.value() - 2.0).abs() < 1e-15);
        assert!((s.deriv(&mi(&[1])) - 0.25).abs() < 1e-15);
        assert!((s.deriv(&mi(&[2])) + 1.0 / 32.0).abs() < 1e-15);
    }
}
