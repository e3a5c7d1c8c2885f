//! Exactly differentiable expression trees, bump functions, and the Gromov
//! derivative bounds.
//!
//! Derivatives are computed by evaluating the tree on truncated Taylor
//! series ([`Series`]), so every partial derivative up to the requested order
//! is exact up to rounding. Quotients go through the Taylor expansion of
//! `1/t`, which is the closed-form expansion of `d^g(1/r)` as a sum of
//! products of derivatives of `r`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cells::Cell;
use crate::error::{domain, input, Error, Result};
use crate::jet::{dist, poly_series};
use crate::modulus::Modulus;
use crate::multiindex::{binomial, indices_up_to, MultiIndex};
use crate::poly::Poly;
use crate::series::{space, Series};

/// A `C^p` bump `xi`: even, 1 on `[-plateau, plateau]`, 0 outside `(-1, 1)`,
/// joined by the degree `2p+1` Hermite smoothstep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub p: usize,
    #[serde(default = "default_plateau")]
    pub plateau: f64,
}

fn default_plateau() -> f64 {
    0.5
}

/// Plateau half-width used unless a construction overrides it.
pub const DEFAULT_PLATEAU: f64 = 0.5;

impl BumpSpec {
    pub fn new(p: usize) -> BumpSpec {
        BumpSpec { p, plateau: DEFAULT_PLATEAU }
    }

    pub fn with_plateau(p: usize, plateau: f64) -> Result<BumpSpec> {
        if !(plateau > 0.0 && plateau < 1.0) {
            return input(format!("bump plateau half-width must lie in (0,1), got {plateau}"));
        }
        Ok(BumpSpec { p, plateau })
    }

    /// `xi^(k)(t)` for `k = 0..=q`.
    pub fn derivatives(&self, t: f64, q: usize) -> Vec<f64> {
        let mut out = vec![0.0; q + 1];
        let a = t.abs();
        if a <= self.plateau {
            out[0] = 1.0;
            return out;
        }
        if a >= 1.0 {
            return out;
        }
        let w = 1.0 - self.plateau;
        let s = (a - self.plateau) / w;
        let table = smoothstep_table(self.p);
        let dir = t.signum() / w;
        // S(1-s) = 1 - S(s); evaluating near the nearer end keeps the
        // vanishing derivatives accurate at both joins.
        let (s_eval, flip) = if s > 0.5 { (1.0 - s, true) } else { (s, false) };
        for (k, o) in out.iter_mut().enumerate() {
            let raw = table.get(k).map(|c| horner(c, s_eval)).unwrap_or(0.0);
            let sk = match (flip, k) {
                (false, _) => raw,
                (true, 0) => 1.0 - raw,
                (true, _) => if k % 2 == 0 { -raw } else { raw },
            };
            *o = if k == 0 { 1.0 - sk } else { -sk * dir.powi(k as i32) };
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivatives(t, 0)[0]
    }
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * s + v)
}

/// Coefficients of `S^(k)` for the smoothstep `S(s) = s^{p+1} sum_k C(p+k,k) (1-s)^k`,
/// which has `S(0)=0`, `S(1)=1` and vanishing derivatives of orders `1..=p` at both ends.
fn smoothstep_table(p: usize) -> Arc<Vec<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Vec<f64>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(p)
        .or_insert_with(|| {
            let one_minus = Poly::univariate(&[1.0, -1.0]);
            let mut sum = Poly::zero(1);
            for k in 0..=p {
                sum = sum.add(&one_minus.pow(k).scale(binomial(p + k, k)));
            }
            let s = Poly::univariate(&[0.0, 1.0]).pow(p + 1).mul(&sum);
            let deg = 2 * p + 1;
            let mut table = Vec::with_capacity(deg + 1);
            for k in 0..=deg {
                let d = s.deriv(&MultiIndex(vec![k]));
                table.push((0..=deg - k).map(|j| d.coeff(&MultiIndex(vec![j]))).collect());
            }
            Arc::new(table)
        })
        .clone()
}

/// Where a gated expression is active.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// An open cell constraining the leading coordinates.
    Cell(Cell),
    /// `inner < |x - center| < outer`.
    Shell { center: Vec<f64>, inner: f64, outer: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Inside,
    Seam,
    Outside,
}

impl Region {
    pub fn classify(&self, x: &[f64]) -> Side {
        let m = match self {
            Region::Cell(c) => c.margin(&x[..c.ambient_dim()]),
            Region::Shell { center, inner, outer } => {
                let r = dist(&x[..center.len()], center);
                (r - inner).min(outer - r)
            }
        };
        if m > 0.0 {
            Side::Inside
        } else if m < 0.0 {
            Side::Outside
        } else {
            Side::Seam
        }
    }
}

/// An expression tree in the variables `x_0, x_1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FuncExpr {
    Constant(f64),
    Coordinate(usize),
    Polynomial(Poly),
    Sum(Vec<Arc<FuncExpr>>),
    Product(Vec<Arc<FuncExpr>>),
    /// `num / den`, defined where `den > 0`.
    Quotient { num: Arc<FuncExpr>, den: Arc<FuncExpr> },
    /// `base^exponent`, defined where `base > 0`.
    Power { base: Arc<FuncExpr>, exponent: f64 },
    /// `xi(arg)`.
    Bump { spec: BumpSpec, arg: Arc<FuncExpr> },
    /// `outer(inner_0(x), inner_1(x), ...)`.
    Compose { outer: Arc<FuncExpr>, inner: Vec<Arc<FuncExpr>> },
    /// `d^alpha inner`.
    Derivative { alpha: MultiIndex, inner: Arc<FuncExpr> },
    /// `inner` on the region, 0 outside. With `flat_seam` the construction
    /// guarantees that the expression is flat on the region boundary, so the
    /// boundary evaluates to the zero jet; otherwise derivatives there are an error.
    Gate { region: Region, inner: Arc<FuncExpr>, flat_seam: bool },
}

/// Smoothness of polynomial-only trees.
pub const SMOOTH: usize = usize::MAX;

impl FuncExpr {
    pub fn constant(c: f64) -> FuncExpr {
        FuncExpr::Constant(c)
    }

    pub fn zero() -> FuncExpr {
        FuncExpr::Constant(0.0)
    }

    pub fn coord(i: usize) -> FuncExpr {
        FuncExpr::Coordinate(i)
    }

    pub fn poly(p: Poly) -> FuncExpr {
        FuncExpr::Polynomial(p)
    }

    pub fn sum(terms: Vec<FuncExpr>) -> FuncExpr {
        let terms: Vec<Arc<FuncExpr>> = terms.into_iter().filter(|t| !t.is_zero()).map(Arc::new).collect();
        match terms.len() {
            0 => FuncExpr::zero(),
            1 => Arc::try_unwrap(terms.into_iter().next().unwrap()).unwrap_or_else(|a| (*a).clone()),
            _ => FuncExpr::Sum(terms),
        }
    }

    pub fn product(factors: Vec<FuncExpr>) -> FuncExpr {
        if factors.iter().any(|f| f.is_zero()) {
            return FuncExpr::zero();
        }
        let factors: Vec<Arc<FuncExpr>> = factors
            .into_iter()
            .filter(|f| !matches!(f, FuncExpr::Constant(c) if *c == 1.0))
            .map(Arc::new)
            .collect();
        match factors.len() {
            0 => FuncExpr::constant(1.0),
            1 => Arc::try_unwrap(factors.into_iter().next().unwrap()).unwrap_or_else(|a| (*a).clone()),
            _ => FuncExpr::Product(factors),
        }
    }

    pub fn sub(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::sum(vec![a, b.scale(-1.0)])
    }

    pub fn scale(self, c: f64) -> FuncExpr {
        if c == 1.0 {
            return self;
        }
        FuncExpr::product(vec![FuncExpr::constant(c), self])
    }

    pub fn quotient(num: FuncExpr, den: FuncExpr) -> FuncExpr {
        FuncExpr::Quotient { num: Arc::new(num), den: Arc::new(den) }
    }

    pub fn power(base: FuncExpr, exponent: f64) -> FuncExpr {
        FuncExpr::Power { base: Arc::new(base), exponent }
    }

    pub fn bump(spec: BumpSpec, arg: FuncExpr) -> FuncExpr {
        FuncExpr::Bump { spec, arg: Arc::new(arg) }
    }

    pub fn compose(outer: FuncExpr, inner: Vec<FuncExpr>) -> FuncExpr {
        if outer.is_zero() {
            return FuncExpr::zero();
        }
        FuncExpr::Compose { outer: Arc::new(outer), inner: inner.into_iter().map(Arc::new).collect() }
    }

    pub fn derivative(alpha: MultiIndex, inner: FuncExpr) -> FuncExpr {
        if alpha.order() == 0 || inner.is_zero() {
            return inner;
        }
        FuncExpr::Derivative { alpha, inner: Arc::new(inner) }
    }

    pub fn gate(region: Region, inner: FuncExpr, flat_seam: bool) -> FuncExpr {
        if inner.is_zero() {
            return inner;
        }
        FuncExpr::Gate { region, inner: Arc::new(inner), flat_seam }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FuncExpr::Constant(c) => *c == 0.0,
            FuncExpr::Polynomial(p) => p.is_zero(),
            _ => false,
        }
    }

    /// Highest derivative order available everywhere off region seams.
    pub fn smoothness(&self) -> usize {
        match self {
            FuncExpr::Constant(_) | FuncExpr::Coordinate(_) | FuncExpr::Polynomial(_) => SMOOTH,
            FuncExpr::Sum(v) | FuncExpr::Product(v) => v.iter().map(|e| e.smoothness()).min().unwrap_or(SMOOTH),
            FuncExpr::Quotient { num, den } => num.smoothness().min(den.smoothness()),
            FuncExpr::Power { base, .. } => base.smoothness(),
            FuncExpr::Bump { spec, arg } => spec.p.min(arg.smoothness()),
            FuncExpr::Compose { outer, inner } => {
                inner.iter().map(|e| e.smoothness()).fold(outer.smoothness(), usize::min)
            }
            FuncExpr::Derivative { alpha, inner } => {
                let s = inner.smoothness();
                if s == SMOOTH { SMOOTH } else { s.saturating_sub(alpha.order()) }
            }
            FuncExpr::Gate { inner, .. } => inner.smoothness(),
        }
    }

    /// Number of nodes, counting shared subtrees once per reference.
    pub fn size(&self) -> usize {
        1 + match self {
            FuncExpr::Sum(v) | FuncExpr::Product(v) => v.iter().map(|e| e.size()).sum(),
            FuncExpr::Quotient { num, den } => num.size() + den.size(),
            FuncExpr::Power { base, .. } => base.size(),
            FuncExpr::Bump { arg, .. } => arg.size(),
            FuncExpr::Compose { outer, inner } => outer.size() + inner.iter().map(|e| e.size()).sum::<usize>(),
            FuncExpr::Derivative { inner, .. } | FuncExpr::Gate { inner, .. } => inner.size(),
            _ => 0,
        }
    }

    /// Evaluates on series inputs (one per variable).
    pub fn series(&self, inputs: &[Series]) -> Result<Series> {
        let sp = inputs
            .first()
            .map(|s| s.space().clone())
            .ok_or_else(|| Error::Input("expression evaluated without inputs".into()))?;
        match self {
            FuncExpr::Constant(c) => Ok(Series::constant(&sp, *c)),
            FuncExpr::Coordinate(i) => inputs
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Input(format!("coordinate x_{i} out of range for {} inputs", inputs.len()))),
            FuncExpr::Polynomial(p) => {
                if p.nvars() > inputs.len() {
                    return input(format!("polynomial in {} variables given {} inputs", p.nvars(), inputs.len()));
                }
                if p.is_zero() {
                    return Ok(Series::zero(&sp));
                }
                Ok(poly_series(p, &inputs[..p.nvars()]))
            }
            FuncExpr::Sum(v) => {
                let mut acc = Series::zero(&sp);
                for e in v {
                    acc = acc.add(&e.series(inputs)?);
                }
                Ok(acc)
            }
            FuncExpr::Product(v) => {
                let mut acc = Series::constant(&sp, 1.0);
                for e in v {
                    let s = e.series(inputs)?;
                    if s.is_zero() {
                        return Ok(Series::zero(&sp));
                    }
                    acc = acc.mul(&s);
                }
                Ok(acc)
            }
            FuncExpr::Quotient { num, den } => {
                let d = den.series(inputs)?;
                if !(d.value() > 0.0) {
                    return domain(format!("denominator {} is not positive", d.value()));
                }
                Ok(num.series(inputs)?.mul(&d.recip()))
            }
            FuncExpr::Power { base, exponent } => {
                let b = base.series(inputs)?;
                if !(b.value() > 0.0) {
                    return domain(format!("power base {} is not positive", b.value()));
                }
                Ok(b.powf(*exponent))
            }
            FuncExpr::Bump { spec, arg } => {
                let a = arg.series(inputs)?;
                let d = spec.derivatives(a.value(), sp.q);
                if d.iter().all(|v| *v == 0.0) {
                    return Ok(Series::zero(&sp));
                }
                Ok(a.compose_univariate(&d))
            }
            FuncExpr::Compose { outer, inner } => {
                let vals = inner.iter().map(|e| e.series(inputs)).collect::<Result<Vec<_>>>()?;
                outer.series(&vals)
            }
            FuncExpr::Derivative { alpha, inner } => {
                if alpha.dim() != inputs.len() {
                    return input(format!("derivative {alpha} applied to {} inputs", inputs.len()));
                }
                let x: Vec<f64> = inputs.iter().map(|s| s.value()).collect();
                let local = space(x.len(), sp.q + alpha.order());
                let loc = inner.series(&Series::variables(&local, &x))?;
                let d = loc.differentiate(alpha, &space(x.len(), sp.q));
                Ok(d.compose(inputs))
            }
            FuncExpr::Gate { region, inner, flat_seam } => {
                let x: Vec<f64> = inputs.iter().map(|s| s.value()).collect();
                match region.classify(&x) {
                    Side::Inside => inner.series(inputs),
                    Side::Outside => Ok(Series::zero(&sp)),
                    Side::Seam if *flat_seam => Ok(Series::zero(&sp)),
                    Side::Seam if sp.q == 0 => Ok(inner.series(inputs).unwrap_or_else(|_| Series::zero(&sp))),
                    Side::Seam => domain(format!("derivatives requested on a region seam at {x:?}")),
                }
            }
        }
    }

    /// All derivatives of order `<= m` at `x`, graded-lex order.
    pub fn jet_at(&self, x: &[f64], m: usize) -> Result<Vec<f64>> {
        let s = self.smoothness();
        if m > s {
            return input(format!("derivative order {m} exceeds the expression smoothness {s}"));
        }
        let sp = space(x.len(), m);
        Ok(self.series(&Series::variables(&sp, x))?.derivatives())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.series(&Series::variables(&space(x.len(), 0), x))?.value())
    }

    pub fn deriv(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        if alpha.dim() != x.len() {
            return input(format!("multi-index {alpha} does not match point dimension {}", x.len()));
        }
        let s = self.smoothness();
        if alpha.order() > s {
            return input(format!("derivative order {} exceeds the expression smoothness {s}", alpha.order()));
        }
        let sp = space(x.len(), alpha.order());
        Ok(self.series(&Series::variables(&sp, x))?.deriv(alpha))
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::Constant(c) => write!(f, "{c}"),
            FuncExpr::Coordinate(i) => write!(f, "x{i}"),
            FuncExpr::Polynomial(p) => {
                let terms: Vec<String> = p.terms().map(|(a, c)| format!("{c}*x^{a}")).collect();
                if terms.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "poly[{}]", terms.join(" + "))
                }
            }
            FuncExpr::Sum(v) => write_list(f, "sum", v),
            FuncExpr::Product(v) => write_list(f, "prod", v),
            FuncExpr::Quotient { num, den } => write!(f, "({num})/({den})"),
            FuncExpr::Power { base, exponent } => write!(f, "({base})^{exponent}"),
            FuncExpr::Bump { spec, arg } => write!(f, "xi[p={},w={}]({arg})", spec.p, spec.plateau),
            FuncExpr::Compose { outer, inner } => {
                write!(f, "({outer})o")?;
                write_list(f, "", inner)
            }
            FuncExpr::Derivative { alpha, inner } => write!(f, "d^{alpha}({inner})"),
            FuncExpr::Gate { inner, flat_seam, .. } => {
                write!(f, "gate{}({inner})", if *flat_seam { "[flat]" } else { "" })
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, v: &[Arc<FuncExpr>]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, e) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{e}")?;
    }
    write!(f, ")")
}

/// `xi` as a univariate expression.
pub fn bump_xi(p: usize) -> FuncExpr {
    FuncExpr::bump(BumpSpec::new(p), FuncExpr::coord(0))
}

/// `chi(x) = xi(|x|^2)` on `R^n`: 1 for `|x| <= sqrt(plateau)`, 0 for `|x| >= 1`.
pub fn bump_chi(n: usize, p: usize) -> FuncExpr {
    bump_chi_with(n, BumpSpec::new(p))
}

pub fn bump_chi_with(n: usize, spec: BumpSpec) -> FuncExpr {
    let mut sq = Poly::zero(n);
    for i in 0..n {
        sq.add_term(MultiIndex(vec![0; n]).add(&MultiIndex::unit(n, i)).add(&MultiIndex::unit(n, i)), 1.0);
    }
    FuncExpr::bump(spec, FuncExpr::poly(sq))
}

// ---- Gromov-type bounds ----------------------------------------------------

/// `2^{C(m+2,2)-2} sup|f| / r^m`.
pub fn gromov_bound(m: usize, r: f64, sup_f: f64) -> Result<f64> {
    check_gromov_args(m, r)?;
    let e = binomial(m + 2, 2) as i32 - 2;
    Ok(2f64.powi(e) * sup_f / r.powi(m as i32))
}

/// `2^{C(m+1,2)+m-2} omega(r) / r^m`; for `m = 1` this is `omega(r)/r`.
pub fn gromov_bound_omega(m: usize, r: f64, omega: &Modulus) -> Result<f64> {
    check_gromov_args(m, r)?;
    let e = binomial(m + 1, 2) as i32 + m as i32 - 2;
    Ok(2f64.powi(e) * omega.eval(r) / r.powi(m as i32))
}

fn check_gromov_args(m: usize, r: f64) -> Result<()> {
    if m == 0 {
        return input("the derivative bounds need m >= 1");
    }
    if !(r > 0.0) {
        return input(format!("radius must be positive, got {r}"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GromovCertificate {
    pub m: usize,
    pub t0: f64,
    pub r: f64,
    pub grid: usize,
    /// Whether every `f^(j)`, `j = 2..=m+1`, keeps one sign on the grid.
    pub hypothesis_holds: bool,
    pub failing_order: Option<usize>,
    /// `|f^(m)(t0)|`.
    pub observed: f64,
    pub sup_f: f64,
    pub bound: f64,
    /// Grid Hoelder constant of `f` for the modulus, when one is given.
    pub holder_constant: Option<f64>,
    pub bound_omega: Option<f64>,
    /// Smallest of `bound - observed` over the asserted inequalities.
    pub margin: f64,
    pub pass: bool,
    pub message: String,
}

/// Default grid size for sign and sup checks.
pub const GROMOV_GRID: usize = 512;

/// Checks the sign hypothesis and, when it holds, the derivative bounds on
/// `[t0 - r, t0 + r]` using a uniform grid.
pub fn verify_gromov(
    f: &FuncExpr,
    t0: f64,
    r: f64,
    m: usize,
    omega: Option<&Modulus>,
    grid: usize,
) -> Result<GromovCertificate> {
    check_gromov_args(m, r)?;
    if grid < 2 {
        return input("grid needs at least two points");
    }
    let ts: Vec<f64> = (0..grid).map(|i| t0 - r + 2.0 * r * i as f64 / (grid - 1) as f64).collect();
    let jets = ts.iter().map(|&t| f.jet_at(&[t], m + 1)).collect::<Result<Vec<_>>>()?;
    let mut failing = None;
    for j in 2..=m + 1 {
        let vals: Vec<f64> = jets.iter().map(|d| d[j]).collect();
        let scale = vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let tol = 1e-9 * scale;
        let nonneg = vals.iter().all(|v| *v >= -tol);
        let nonpos = vals.iter().all(|v| *v <= tol);
        if !(nonneg || nonpos) {
            failing = Some(j);
            break;
        }
    }
    let observed = f.jet_at(&[t0], m)?[m].abs();
    let sup_f = jets.iter().fold(0.0f64, |s, d| s.max(d[0].abs()));
    let bound = gromov_bound(m, r, sup_f)?;
    let (holder_constant, bound_omega) = match omega {
        None => (None, None),
        Some(w) => {
            let mut h = 0.0f64;
            for i in 0..grid {
                for k in i + 1..grid {
                    h = h.max((jets[i][0] - jets[k][0]).abs() / w.eval(ts[k] - ts[i]));
                }
            }
            (Some(h), Some(gromov_bound_omega(m, r, w)? * h))
        }
    };
    let hypothesis_holds = failing.is_none();
    let slack = |b: f64| b * (1.0 + 1e-12) + 1e-300;
    let mut margin = bound - observed;
    let mut pass = observed <= slack(bound);
    if let Some(bw) = bound_omega {
        margin = margin.min(bw - observed);
        pass &= observed <= slack(bw);
    }
    let message = if !hypothesis_holds {
        format!("hypothesis fails: derivative of order {} changes sign", failing.unwrap())
    } else if pass {
        "inequality holds".to_string()
    } else {
        "inequality violated".to_string()
    };
    Ok(GromovCertificate {
        m,
        t0,
        r,
        grid,
        hypothesis_holds,
        failing_order: failing,
        observed,
        sup_f,
        bound,
        holder_constant,
        bound_omega,
        margin,
        pass: hypothesis_holds && pass,
        message,
    })
}

/// All derivatives up to order `m` at every point, for tables and checks.
pub fn derivative_table(f: &FuncExpr, points: &[Vec<f64>], m: usize) -> Result<Vec<Vec<f64>>> {
    points.iter().map(|x| f.jet_at(x, m)).collect()
}

/// Multi-indices matching [`FuncExpr::jet_at`] output.
pub fn jet_indices(n: usize, m: usize) -> Vec<MultiIndex> {
    indices_up_to(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn derivative_examples() {
        let sq = FuncExpr::poly(Poly::univariate(&[0.0, 0.0, 1.0]));
        assert_eq!(sq.deriv(&mi(&[2]), &[3.7]).unwrap(), 2.0);
        let xi = bump_xi(3);
        assert_eq!(xi.eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(xi.eval(&[1.0]).unwrap(), 0.0);
        let prod = FuncExpr::product(vec![
            FuncExpr::poly(Poly::univariate(&[1.0, 2.0])),
            FuncExpr::poly(Poly::univariate(&[3.0, 4.0])),
        ]);
        assert_eq!(prod.deriv(&mi(&[1]), &[0.0]).unwrap(), 10.0);
    }

    #[test]
    fn derivative_errors() {
        let q = FuncExpr::quotient(FuncExpr::constant(1.0), FuncExpr::coord(0));
        assert!(matches!(q.eval(&[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(bump_xi(2).deriv(&mi(&[3]), &[0.7]), Err(Error::Input(_))));
        let g = FuncExpr::gate(Region::Cell(Cell::interval(0.0, 1.0)), FuncExpr::coord(0), false);
        assert!(matches!(g.deriv(&mi(&[1]), &[1.0]), Err(Error::Domain(_))));
        assert_eq!(g.eval(&[0.5]).unwrap(), 0.5);
        assert_eq!(g.eval(&[2.0]).unwrap(), 0.0);
        let flat = FuncExpr::gate(Region::Cell(Cell::interval(0.0, 1.0)), FuncExpr::coord(0), true);
        assert_eq!(flat.deriv(&mi(&[1]), &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn bump_properties() {
        let spec = BumpSpec::new(3);
        assert_eq!(spec.eval(0.25), 1.0);
        for t in [-1.0, 1.0] {
            let inner = BumpSpec::new(3).derivatives(t * (1.0 - 1e-14), 3);
            assert!(inner.iter().all(|v| v.abs() < 1e-9), "{inner:?}");
        }
        let chi = bump_chi(2, 3);
        assert_eq!(chi.eval(&[0.5, 0.0]).unwrap(), 1.0);
        assert_eq!(chi.eval(&[0.8, 0.7]).unwrap(), 0.0);
        assert!(BumpSpec::with_plateau(2, 1.5).is_err());
    }

    #[test]
    fn derivative_node_and_composition() {
        // d/dy of x^2 y^3, then restricted to y = 1 via composition: 3 x^2
        let p = Poly::from_terms(2, [(mi(&[2, 3]), 1.0)]).unwrap();
        let d = FuncExpr::derivative(mi(&[0, 1]), FuncExpr::poly(p));
        let r = FuncExpr::compose(d, vec![FuncExpr::coord(0), FuncExpr::constant(1.0)]);
        let j = r.jet_at(&[2.0], 2).unwrap();
        assert_eq!(j, vec![12.0, 12.0, 6.0]);
    }

    #[test]
    fn gromov_constants() {
        assert_eq!(gromov_bound(1, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(gromov_bound(2, 1.0, 1.0).unwrap(), 16.0);
        assert_eq!(gromov_bound_omega(1, 1.0, &Modulus::Linear).unwrap(), 1.0);
        assert!(gromov_bound(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gromov_certificates() {
        let t = FuncExpr::coord(0);
        let c = verify_gromov(&t, 0.0, 1.0, 1, None, GROMOV_GRID).unwrap();
        assert!(c.pass && c.hypothesis_holds);
        assert_eq!((c.bound, c.observed), (2.0, 1.0));
        let cube = FuncExpr::poly(Poly::univariate(&[0.0, 0.0, 0.0, 1.0]));
        let c = verify_gromov(&cube, 1.5, 0.5, 2, Some(&Modulus::Linear), GROMOV_GRID).unwrap();
        assert!(c.pass, "{c:?}");
        // t^3 - t has a sign-changing second derivative on [-1, 1].
        let wiggle = FuncExpr::poly(Poly::univariate(&[0.0, -1.0, 0.0, 1.0]));
        let c = verify_gromov(&wiggle, 0.0, 1.0, 1, None, GROMOV_GRID).unwrap();
        assert!(!c.hypothesis_holds && !c.pass);
        assert!(c.message.starts_with("hypothesis fails"));
    }
}
