//! Polynomial-point metric, its chain relaxation, and the Lipschitz norm of
//! polynomial fields over a finite set.
//!
//! Chain distances only route through a finite candidate set, so every
//! `d_omega` value and every Lipschitz norm computed here is an upper bound
//! on the true quantity.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::jet::{dist, taylor_at, whitney_constant, Jet};
use crate::modulus::Modulus;
use crate::multiindex::{indices_up_to, MultiIndex};
use crate::poly::Poly;

/// Relative tolerance of the inversion in [`psi_alpha`].
pub const PSI_TOL: f64 = 1e-10;
/// Slack factor on `omega(|x-y|)` in the Lipschitz feasibility test.
pub const LIP_SLACK: f64 = 1.0 + 1e-12;
/// Relative width at which the bisection on `lambda` stops.
pub const LAMBDA_TOL: f64 = 1e-10;

const MAX_DOUBLINGS: usize = 2000;

/// A polynomial in absolute coordinates paired with a base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyPoint {
    pub p: Poly,
    pub x: Vec<f64>,
}

impl PolyPoint {
    pub fn new(p: Poly, x: Vec<f64>) -> Result<PolyPoint> {
        if p.nvars() != x.len() {
            return input(format!("polynomial has {} variables but the point has {}", p.nvars(), x.len()));
        }
        Ok(PolyPoint { p, x })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// The field `x -> (T^m_x F, x)` of a jet.
pub fn field_from_jet(f: &Jet) -> Vec<PolyPoint> {
    (0..f.len())
        .map(|i| PolyPoint { p: taylor_at(f, i).to_poly(), x: f.points()[i].clone() })
        .collect()
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return input(format!("rescaling argument must be nonnegative, got {t}"));
    }
    Ok(())
}

/// Inverse of `s -> s^{m-order} omega(s)`; `inf` when `t` lies above its range.
pub fn psi_alpha(m: usize, order: usize, omega: &Modulus, t: f64) -> Result<f64> {
    if order > m {
        return input(format!("derivative order {order} exceeds m = {m}"));
    }
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let k = (m - order) as i32;
    let g = |s: f64| s.powi(k) * omega.eval(s);
    let mut hi = 1.0f64;
    let mut steps = 0;
    while g(hi) < t {
        hi *= 2.0;
        steps += 1;
        if steps > MAX_DOUBLINGS || !hi.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0f64;
    while hi - lo > PSI_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `omega(psi_alpha(t))` below the top order, the identity at `|alpha| = m`.
pub fn phi_alpha(m: usize, order: usize, omega: &Modulus, t: f64) -> Result<f64> {
    if order > m {
        return input(format!("derivative order {order} exceeds m = {m}"));
    }
    check_t(t)?;
    if order == m {
        return Ok(t);
    }
    let s = psi_alpha(m, order, omega, t)?;
    Ok(if s.is_finite() { omega.eval(s) } else { f64::INFINITY })
}

fn check_pair(a: &PolyPoint, b: &PolyPoint, m: usize) -> Result<()> {
    if a.dim() != b.dim() {
        return input(format!("points live in R^{} and R^{}", a.dim(), b.dim()));
    }
    for t in [a, b] {
        if t.p.nvars() != t.dim() {
            return input("polynomial arity does not match its point");
        }
        if t.p.degree() > m {
            return input(format!("polynomial of degree {} exceeds m = {m}", t.p.degree()));
        }
    }
    Ok(())
}

/// `|d^alpha (P1 - P2)(x_i)|` maximized over the two base points, per order.
fn diff_magnitudes(a: &PolyPoint, b: &PolyPoint, idx: &[MultiIndex], m: usize) -> Vec<f64> {
    let d = a.p.sub(&b.p);
    let mut out = vec![0.0f64; m + 1];
    for alpha in idx {
        let da = d.deriv(alpha);
        let v = da.eval(&a.x).abs().max(da.eval(&b.x).abs());
        let o = alpha.order();
        out[o] = out[o].max(v);
    }
    out
}

fn delta_from(mags: &[f64], base: f64, scale: f64, omega: &Modulus, m: usize) -> Result<f64> {
    let mut best = base;
    for (o, &v) in mags.iter().enumerate() {
        best = best.max(phi_alpha(m, o, omega, v * scale)?);
    }
    Ok(best)
}

/// `max { omega(|x1-x2|), max_{alpha, i} phi_alpha(|d^alpha (P1-P2)(x_i)|) }`.
pub fn delta_omega(a: &PolyPoint, b: &PolyPoint, omega: &Modulus, m: usize) -> Result<f64> {
    check_pair(a, b, m)?;
    let idx = indices_up_to(a.dim(), m);
    let mags = diff_magnitudes(a, b, &idx, m);
    delta_from(&mags, omega.eval(dist(&a.x, &b.x)), 1.0, omega, m)
}

/// Pairwise data reused across rescalings of the same candidate set.
struct EdgeTable {
    size: usize,
    base: Vec<f64>,
    mags: Vec<Vec<f64>>,
}

impl EdgeTable {
    fn new(c: &[PolyPoint], omega: &Modulus, m: usize) -> Result<EdgeTable> {
        let size = c.len();
        let n = c.first().map(|t| t.dim()).unwrap_or(0);
        let idx = indices_up_to(n, m);
        let mut base = vec![0.0; size * size];
        let mut mags = vec![Vec::new(); size * size];
        for i in 0..size {
            for j in i + 1..size {
                check_pair(&c[i], &c[j], m)?;
                let w = omega.eval(dist(&c[i].x, &c[j].x));
                let g = diff_magnitudes(&c[i], &c[j], &idx, m);
                base[i * size + j] = w;
                base[j * size + i] = w;
                mags[i * size + j] = g.clone();
                mags[j * size + i] = g;
            }
        }
        Ok(EdgeTable { size, base, mags })
    }

    /// Chain distances with every polynomial multiplied by `scale`.
    fn chain(&self, scale: f64, omega: &Modulus, m: usize) -> Result<Vec<Vec<f64>>> {
        let k = self.size;
        let mut d = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let v = delta_from(&self.mags[i * k + j], self.base[i * k + j], scale, omega, m)?;
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        relax(&mut d);
        Ok(d)
    }
}

// Floyd-Warshall, then extra sweeps until the matrix is a fixpoint so the
// triangle inequality holds in floating point, not just up to rounding.
fn relax(d: &mut [Vec<f64>]) {
    let k = d.len();
    loop {
        let mut changed = false;
        for via in 0..k {
            for i in 0..k {
                let a = d[i][via];
                if !a.is_finite() {
                    continue;
                }
                for j in 0..k {
                    let s = a + d[via][j];
                    if s < d[i][j] {
                        d[i][j] = s;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// All-pairs chain distances on `candidates`, an upper bound on `d_omega`.
pub fn chain_distances(candidates: &[PolyPoint], omega: &Modulus, m: usize) -> Result<Vec<Vec<f64>>> {
    EdgeTable::new(candidates, omega, m)?.chain(1.0, omega, m)
}

/// Chain distance from `candidates[from]` to `candidates[to]`.
pub fn d_omega_chain(from: usize, to: usize, candidates: &[PolyPoint], omega: &Modulus, m: usize) -> Result<f64> {
    if from >= candidates.len() || to >= candidates.len() {
        return input(format!("candidate index out of range for {} candidates", candidates.len()));
    }
    Ok(chain_distances(candidates, omega, m)?[from][to])
}

/// Adds `((P+Q)/2, (x+y)/2)` for every pair of the field.
pub fn with_midpoints(field: &[PolyPoint]) -> Vec<PolyPoint> {
    let mut out = field.to_vec();
    for i in 0..field.len() {
        for j in i + 1..field.len() {
            let p = field[i].p.add(&field[j].p).scale(0.5);
            let x = field[i].x.iter().zip(&field[j].x).map(|(a, b)| 0.5 * (a + b)).collect();
            out.push(PolyPoint { p, x });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipNormReport {
    /// `max_alpha sup_x |d^alpha P_x(x)|`.
    pub sup_term: f64,
    /// Smallest feasible `lambda` found, an upper estimate.
    pub lambda: f64,
    pub norm: f64,
    pub points: usize,
    pub candidates: usize,
    pub bisection_steps: usize,
}

/// `sup_term + inf { lambda : d(T(x)/lambda, T(y)/lambda) <= omega(|x-y|) }`,
/// with `d` the chain distance over the field (plus midpoints if asked).
pub fn lip_norm(field: &[PolyPoint], omega: &Modulus, m: usize, midpoints: bool) -> Result<LipNormReport> {
    if field.is_empty() {
        return input("a field needs at least one point");
    }
    let n = field[0].dim();
    let idx = indices_up_to(n, m);
    let mut sup_term = 0.0f64;
    for t in field {
        if t.dim() != n || t.p.nvars() != n {
            return input("field points and polynomials must share one dimension");
        }
        if t.p.degree() > m {
            return input(format!("polynomial of degree {} exceeds m = {m}", t.p.degree()));
        }
        for a in &idx {
            sup_term = sup_term.max(t.p.eval_deriv(a, &t.x).abs());
        }
    }
    let cands = if midpoints { with_midpoints(field) } else { field.to_vec() };
    let table = EdgeTable::new(&cands, omega, m)?;
    let k = field.len();
    let mut targets = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            targets.push((i, j, omega.eval(dist(&field[i].x, &field[j].x)) * LIP_SLACK));
        }
    }
    let feasible = |lambda: f64| -> Result<bool> {
        let d = table.chain(1.0 / lambda, omega, m)?;
        Ok(targets.iter().all(|&(i, j, w)| d[i][j] <= w))
    };
    let report = |lambda: f64, steps: usize| LipNormReport {
        sup_term,
        lambda,
        norm: sup_term + lambda,
        points: k,
        candidates: cands.len(),
        bisection_steps: steps,
    };
    if targets.is_empty() {
        return Ok(report(0.0, 0));
    }
    let mut steps = 0;
    let mut hi = 1.0f64;
    while !feasible(hi)? {
        hi *= 2.0;
        steps += 1;
        if steps > MAX_DOUBLINGS || !hi.is_finite() {
            return Ok(report(f64::INFINITY, steps));
        }
    }
    let mut lo = hi / 2.0;
    while feasible(lo)? {
        hi = lo;
        lo /= 2.0;
        steps += 1;
        if lo < f64::MIN_POSITIVE * 1e10 {
            return Ok(report(0.0, steps));
        }
    }
    while hi - lo > LAMBDA_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(report(hi, steps))
}

/// Both directions of the comparison between the Lipschitz norm of the
/// Taylor field and the Whitney norm of the jet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormComparison {
    pub lip: LipNormReport,
    /// `sup |F^alpha| + holder_constant`.
    pub whitney_norm: f64,
    /// `lip.norm / whitney_norm`.
    pub lip_over_whitney: f64,
    /// `whitney_norm / lip.norm`.
    pub whitney_over_lip: f64,
}

pub fn compare_norms(f: &Jet, omega: &Modulus, midpoints: bool) -> Result<NormComparison> {
    let lip = lip_norm(&field_from_jet(f), omega, f.order(), midpoints)?;
    let whitney_norm = whitney_constant(f, omega).total();
    Ok(NormComparison {
        lip_over_whitney: lip.norm / whitney_norm,
        whitney_over_lip: whitney_norm / lip.norm,
        whitney_norm,
        lip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(coeffs: &[f64], x: f64) -> PolyPoint {
        PolyPoint::new(Poly::univariate(coeffs), vec![x]).unwrap()
    }

    #[test]
    fn psi_inverts_square() {
        let w = Modulus::Linear;
        assert!((psi_alpha(1, 0, &w, 4.0).unwrap() - 2.0).abs() < 1e-9);
        assert!((phi_alpha(1, 0, &w, 4.0).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(phi_alpha(2, 2, &w, 7.0).unwrap(), 7.0);
        assert_eq!(psi_alpha(2, 1, &w, 0.0).unwrap(), 0.0);
        assert!(psi_alpha(1, 0, &w, -1.0).is_err());
        assert!(phi_alpha(1, 2, &w, 1.0).is_err());
    }

    #[test]
    fn flat_tail_range_is_bounded_at_top_order() {
        let w = Modulus::pl(vec![[1.0, 1.0]], true).unwrap();
        assert_eq!(psi_alpha(1, 1, &w, 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn delta_examples() {
        let w = Modulus::Linear;
        assert_eq!(delta_omega(&pp(&[0.0], 0.0), &pp(&[1.0], 1.0), &w, 0).unwrap(), 1.0);
        let d = delta_omega(&pp(&[0.0], 0.0), &pp(&[0.0, 1.0], 0.0), &w, 1).unwrap();
        assert_eq!(d, 1.0);
        let t = pp(&[1.0, 2.0], 0.3);
        assert_eq!(delta_omega(&t, &t, &w, 1).unwrap(), 0.0);
        assert!(delta_omega(&pp(&[0.0, 0.0, 1.0], 0.0), &t, &w, 1).is_err());
    }

    #[test]
    fn chain_on_collinear_constants() {
        // m = 0: delta((c,x),(c',y)) = max(|x-y|^0.5, |c-c'|), both parts
        // subadditive, so a middle stop never shortens the path
        let w = Modulus::holder(0.5).unwrap();
        let c = vec![pp(&[0.0], 0.0), pp(&[0.5], 0.25), pp(&[1.0], 1.0)];
        let d = chain_distances(&c, &w, 0).unwrap();
        let via = 0.5 + 0.75f64.sqrt();
        assert_eq!(d[0][2], 1.0f64.min(via));
        assert_eq!(d[0][2], delta_omega(&c[0], &c[2], &w, 0).unwrap());
        let c = vec![pp(&[0.0], 0.0), pp(&[0.2], 0.5), pp(&[0.4], 1.0)];
        let d = chain_distances(&c, &w, 0).unwrap();
        assert_eq!(d[0][2], 1.0f64.min(2.0 * 0.5f64.sqrt()));
        assert_eq!(d_omega_chain(1, 1, &c, &w, 0).unwrap(), 0.0);
    }

    #[test]
    fn chain_shortens_an_inflated_edge() {
        // relaxation oracle on a hand-built matrix
        let mut d = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        relax(&mut d);
        assert_eq!(d[0][2], 2.0);
        assert_eq!(d[2][0], 2.0);
    }

    #[test]
    fn lip_norm_examples() {
        let w = Modulus::Linear;
        let zero = vec![pp(&[0.0], 0.0), pp(&[0.0], 1.0)];
        assert_eq!(lip_norm(&zero, &w, 1, false).unwrap().norm, 0.0);
        let single = vec![pp(&[3.0, 1.0], 0.0)];
        let r = lip_norm(&single, &w, 1, false).unwrap();
        assert_eq!((r.sup_term, r.lambda, r.norm), (3.0, 0.0, 3.0));
    }

    #[test]
    fn lip_norm_of_linear_field() {
        // m = 0, omega linear: P_x = x, so the best lambda is 1
        let w = Modulus::Linear;
        let f = vec![pp(&[0.0], 0.0), pp(&[1.0], 1.0), pp(&[2.0], 2.0)];
        let r = lip_norm(&f, &w, 0, false).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-8, "{r:?}");
        assert_eq!(r.sup_term, 2.0);
    }
}
