//! Lambda-cells (intervals, bands between polynomial boundaries, graphs of
//! polynomial maps), their associated boundary-distance functions, and the
//! sampled certificates built on them.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::calculus::FuncExpr;
use crate::error::{domain, input, Error, Result};
use crate::jet::dist;
use crate::multiindex::{indices_up_to, MultiIndex};
use crate::poly::Poly;

/// One boundary of a band: a polynomial in the base variables or an infinite end.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    NegInf,
    PosInf,
    Fn(Poly),
}

impl Bound {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Bound::NegInf => f64::NEG_INFINITY,
            Bound::PosInf => f64::INFINITY,
            Bound::Fn(p) => p.eval(x),
        }
    }

    fn constant(&self) -> Option<f64> {
        match self {
            Bound::NegInf => Some(f64::NEG_INFINITY),
            Bound::PosInf => Some(f64::INFINITY),
            Bound::Fn(p) if p.degree() == 0 => Some(p.coeff(&MultiIndex::zero(p.nvars()))),
            Bound::Fn(_) => None,
        }
    }
}

/// A Lambda-cell in adapted coordinates. The base of a band or graph always
/// occupies the leading coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// `(lo, hi)`; either end may be infinite.
    Interval { lo: f64, hi: f64 },
    /// `{(x', t) : x' in base, lo(x') < t < hi(x')}`.
    Band { lo: Bound, hi: Bound, base: Box<Cell> },
    /// `{(u, map(u)) : u in base}`.
    Graph { map: Vec<Poly>, base: Box<Cell> },
}

/// `rho_0 .. rho_{2n}`; `None` marks an infinite function.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatedFamily {
    pub rho: Vec<Option<Poly>>,
}

impl AssociatedFamily {
    /// `min_{j >= 1} rho_j(x)`, the boundary-distance surrogate (infinite if no finite `rho`).
    pub fn min_rho(&self, x: &[f64]) -> f64 {
        self.rho[1..]
            .iter()
            .flatten()
            .map(|p| p.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `min_{j >= 0} rho_j(x)`, i.e. the surrogate capped at 1.
    pub fn min_rho0(&self, x: &[f64]) -> f64 {
        self.min_rho(x).min(1.0)
    }

    pub fn eval(&self, j: usize, x: &[f64]) -> f64 {
        match &self.rho[j] {
            Some(p) => p.eval(x),
            None => f64::INFINITY,
        }
    }
}

impl Cell {
    pub fn interval(lo: f64, hi: f64) -> Cell {
        Cell::Interval { lo, hi }
    }

    pub fn band(lo: Bound, hi: Bound, base: Cell) -> Cell {
        Cell::Band { lo, hi, base: Box::new(base) }
    }

    pub fn graph(map: Vec<Poly>, base: Cell) -> Cell {
        Cell::Graph { map, base: Box::new(base) }
    }

    /// Axis-parallel open box.
    pub fn open_box(sides: &[(f64, f64)]) -> Cell {
        let mut c = Cell::interval(sides[0].0, sides[0].1);
        for (i, &(a, b)) in sides.iter().enumerate().skip(1) {
            c = Cell::band(Bound::Fn(Poly::constant(i, a)), Bound::Fn(Poly::constant(i, b)), c);
        }
        c
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Cell::Interval { .. } => 1,
            Cell::Band { base, .. } => base.ambient_dim() + 1,
            Cell::Graph { map, base } => base.ambient_dim() + map.len(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cell::Interval { .. } => 1,
            Cell::Band { base, .. } => base.dim() + 1,
            Cell::Graph { base, .. } => base.dim(),
        }
    }

    pub fn is_open(&self) -> bool {
        !matches!(self, Cell::Graph { .. })
    }

    /// The open cell over which a graph sits (itself for open cells).
    pub fn domain(&self) -> &Cell {
        match self {
            Cell::Graph { base, .. } => base,
            c => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Cell::Interval { lo, hi } => {
                if lo.is_nan() || hi.is_nan() || lo >= hi || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY {
                    return input(format!("interval ({lo}, {hi}) is empty"));
                }
                Ok(())
            }
            Cell::Band { lo, hi, base } => {
                if !base.is_open() {
                    return input("the base of a band must be an open cell");
                }
                base.validate()?;
                let k = base.ambient_dim();
                for b in [lo, hi] {
                    if let Bound::Fn(p) = b {
                        if p.nvars() != k {
                            return input(format!("band boundary has {} variables, base has {k}", p.nvars()));
                        }
                    }
                }
                if matches!(lo, Bound::PosInf) || matches!(hi, Bound::NegInf) {
                    return input("band bounds are reversed");
                }
                Ok(())
            }
            Cell::Graph { map, base } => {
                if !base.is_open() {
                    return input("the base of a graph must be an open cell");
                }
                base.validate()?;
                if map.is_empty() {
                    return input("graph map needs at least one component");
                }
                let k = base.ambient_dim();
                if map.iter().any(|p| p.nvars() != k) {
                    return input(format!("graph map components must be polynomials in {k} variables"));
                }
                Ok(())
            }
        }
    }

    /// Associated functions `rho_0 .. rho_{2n}` of an open cell.
    pub fn associated_functions(&self) -> Result<AssociatedFamily> {
        match self {
            Cell::Graph { .. } => input("associated functions are defined for open cells only"),
            Cell::Interval { lo, hi } => {
                let x = Poly::coord(1, 0);
                let r1 = lo.is_finite().then(|| x.sub(&Poly::constant(1, *lo)));
                let r2 = hi.is_finite().then(|| Poly::constant(1, *hi).sub(&x));
                Ok(AssociatedFamily { rho: vec![Some(Poly::constant(1, 1.0)), r1, r2] })
            }
            Cell::Band { lo, hi, base } => {
                let n = self.ambient_dim();
                let k = n - 1;
                let inner = base.associated_functions()?;
                let mut rho: Vec<Option<Poly>> = vec![Some(Poly::constant(n, 1.0))];
                rho.extend(inner.rho[1..].iter().map(|r| r.as_ref().map(|p| p.embed(n, 0))));
                let t = Poly::coord(n, k);
                rho.push(match lo {
                    Bound::Fn(p) => Some(t.sub(&p.embed(n, 0))),
                    _ => None,
                });
                rho.push(match hi {
                    Bound::Fn(p) => Some(p.embed(n, 0).sub(&t)),
                    _ => None,
                });
                Ok(AssociatedFamily { rho })
            }
        }
    }

    /// Signed containment margin of an open cell: `min_j rho_j(x)` over the
    /// finite associated functions of every level (positive inside).
    pub fn margin(&self, x: &[f64]) -> f64 {
        match self {
            Cell::Interval { lo, hi } => (x[0] - lo).min(hi - x[0]),
            Cell::Band { lo, hi, base } => {
                let k = base.ambient_dim();
                let m = base.margin(&x[..k]);
                m.min(x[k] - lo.eval(&x[..k])).min(hi.eval(&x[..k]) - x[k])
            }
            Cell::Graph { base, .. } => base.margin(x),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Cell::Graph { map, base } => {
                let k = base.ambient_dim();
                base.contains(&x[..k])
                    && map
                        .iter()
                        .zip(&x[k..])
                        .all(|(p, w)| (p.eval(&x[..k]) - w).abs() <= 1e-12 * (1.0 + w.abs()))
            }
            c => c.margin(x) > 0.0,
        }
    }

    /// The graph map evaluated at `u` (graphs only).
    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Cell::Graph { map, .. } => {
                let mut x = u.to_vec();
                x.extend(map.iter().map(|p| p.eval(u)));
                x
            }
            _ => u.to_vec(),
        }
    }

    /// `Some(sides)` when the open cell is an axis-parallel box.
    pub fn as_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Cell::Interval { lo, hi } => Some(vec![(*lo, *hi)]),
            Cell::Band { lo, hi, base } => {
                let mut sides = base.as_box()?;
                sides.push((lo.constant()?, hi.constant()?));
                Some(sides)
            }
            Cell::Graph { .. } => None,
        }
    }

    /// Interior grid with `per_dim` points per direction (cell-centered).
    /// Infinite ends are clipped to a window of width `WINDOW`.
    pub fn sample_interior(&self, per_dim: usize) -> Vec<Vec<f64>> {
        self.sample(per_dim, false)
    }

    /// Grid including boundary points (for closures).
    pub fn sample_closure(&self, per_dim: usize) -> Vec<Vec<f64>> {
        self.sample(per_dim, true)
    }

    fn sample(&self, per_dim: usize, closed: bool) -> Vec<Vec<f64>> {
        let ts = unit_grid(per_dim, closed);
        match self {
            Cell::Interval { lo, hi } => {
                let (a, b) = clip(*lo, *hi);
                ts.iter().map(|t| vec![a + (b - a) * t]).collect()
            }
            Cell::Band { lo, hi, base } => {
                let mut out = Vec::new();
                for xb in base.sample(per_dim, closed) {
                    let (a, b) = clip(lo.eval(&xb), hi.eval(&xb));
                    if !(a < b) && !(closed && a == b) {
                        continue;
                    }
                    for t in &ts {
                        let mut x = xb.clone();
                        x.push(a + (b - a) * t);
                        out.push(x);
                    }
                }
                out
            }
            Cell::Graph { base, .. } => base.sample(per_dim, closed).iter().map(|u| self.lift(u)).collect(),
        }
    }

    /// Sampled boundary of an open cell with `per_dim` points per direction.
    pub fn sample_boundary(&self, per_dim: usize) -> Vec<Vec<f64>> {
        match self {
            Cell::Interval { lo, hi } => [*lo, *hi].iter().filter(|v| v.is_finite()).map(|&v| vec![v]).collect(),
            Cell::Band { lo, hi, base } => {
                let mut out = Vec::new();
                for xb in base.sample(per_dim, true) {
                    for b in [lo, hi] {
                        let v = b.eval(&xb);
                        if v.is_finite() {
                            let mut x = xb.clone();
                            x.push(v);
                            out.push(x);
                        }
                    }
                }
                let ts = unit_grid(per_dim, true);
                for xb in base.sample_boundary(per_dim) {
                    let (a, b) = clip(lo.eval(&xb), hi.eval(&xb));
                    for t in &ts {
                        let mut x = xb.clone();
                        x.push(a + (b - a) * t);
                        out.push(x);
                    }
                }
                out
            }
            Cell::Graph { .. } => Vec::new(),
        }
    }

    /// `d(x, boundary)`: exact for intervals and axis-parallel boxes, else the
    /// distance to the sampled boundary at the given resolution.
    pub fn boundary_distance(&self, x: &[f64], per_dim: usize) -> f64 {
        if let Some(sides) = self.as_box() {
            return box_distance(&sides, x);
        }
        self.sample_boundary(per_dim)
            .iter()
            .map(|b| dist(b, x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Clipping window for infinite cell ends in sampling.
pub const WINDOW: f64 = 10.0;

fn clip(a: f64, b: f64) -> (f64, f64) {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => (a, b),
        (true, false) => (a, a + WINDOW),
        (false, true) => (b - WINDOW, b),
        (false, false) => (-WINDOW / 2.0, WINDOW / 2.0),
    }
}

fn unit_grid(per_dim: usize, closed: bool) -> Vec<f64> {
    let n = per_dim.max(1);
    if closed {
        if n == 1 {
            return vec![0.5];
        }
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    } else {
        (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
    }
}

fn box_distance(sides: &[(f64, f64)], x: &[f64]) -> f64 {
    let inside = sides.iter().zip(x).all(|(&(a, b), &v)| a < v && v < b);
    if inside {
        return sides
            .iter()
            .zip(x)
            .map(|(&(a, b), &v)| (v - a).min(b - v))
            .fold(f64::INFINITY, f64::min);
    }
    // Outside or on the boundary: Euclidean distance to the closed box,
    // or 0 when on the boundary.
    sides
        .iter()
        .zip(x)
        .map(|(&(a, b), &v)| {
            let d = if v < a { a - v } else if v > b { v - b } else { 0.0 };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityCertificate {
    pub pass: bool,
    /// `max |d^g f(u)| / (C dist(u)^{1-|g|})`; pass iff `<= 1`.
    pub worst_margin: f64,
    pub worst_sample: Option<usize>,
    pub worst_gamma: Option<MultiIndex>,
    pub samples: usize,
}

/// Certifies `|d^g f(u)| <= C dist(u)^{1-|g|}` for `1 <= |g| <= p` at the
/// samples, with `dist` the surrogate `min_j rho_j` of the domain cell.
pub fn check_lambda_regular(
    f: &[Poly],
    cell: &Cell,
    c: f64,
    p: usize,
    samples: &[Vec<f64>],
) -> Result<RegularityCertificate> {
    let dom = cell.domain();
    let fam = dom.associated_functions()?;
    let k = dom.ambient_dim();
    let gammas: Vec<MultiIndex> = indices_up_to(k, p).into_iter().filter(|g| g.order() >= 1).collect();
    let mut worst = 0.0f64;
    let mut ws = None;
    let mut wg = None;
    for (si, u) in samples.iter().enumerate() {
        if u.len() != k || !dom.contains(u) {
            return input(format!("sample {u:?} is not in the open cell"));
        }
        let d = fam.min_rho(u);
        for comp in f {
            for g in &gammas {
                let v = comp.eval_deriv(g, u).abs();
                let allowed = c * d.powi(1 - g.order() as i32);
                let ratio = v / allowed;
                if ratio > worst {
                    worst = ratio;
                    ws = Some(si);
                    wg = Some(g.clone());
                }
            }
        }
    }
    Ok(RegularityCertificate {
        pass: worst <= 1.0 + 1e-12,
        worst_margin: worst,
        worst_sample: ws,
        worst_gamma: wg,
        samples: samples.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoDistanceCertificate {
    /// Smallest `C` with `(1/C) min_{j>=1} rho_j <= d` at all samples.
    pub empirical_c: f64,
    /// Same for the capped version `min{1,d}` against `min_{j>=0} rho_j`.
    pub empirical_c0: f64,
    /// Largest `d - min rho` seen; the upper inequality needs this `<= tolerance`.
    pub max_upper_excess: f64,
    pub tolerance: f64,
    pub upper_ok: bool,
    /// `None` when distances are exact.
    pub resolution: Option<usize>,
}

/// Compares `min_j rho_j` with the distance to the boundary at the samples.
pub fn check_rho_distance(cell: &Cell, samples: &[Vec<f64>], per_dim: usize) -> Result<RhoDistanceCertificate> {
    if samples.is_empty() {
        return input("no interior samples given");
    }
    let fam = cell.associated_functions()?;
    let exact = cell.as_box().is_some();
    let tolerance = if exact {
        1e-12
    } else {
        let span = cell
            .sample_closure(2)
            .iter()
            .flat_map(|a| cell.sample_closure(2).into_iter().map(move |b| dist(a, &b)))
            .fold(0.0, f64::max);
        span / per_dim.max(1) as f64
    };
    let boundary = if exact { Vec::new() } else { cell.sample_boundary(per_dim) };
    let mut c = 1.0f64;
    let mut c0 = 1.0f64;
    let mut excess = f64::NEG_INFINITY;
    for x in samples {
        if !cell.contains(x) {
            return input(format!("sample {x:?} is not in the open cell"));
        }
        let d = if exact {
            cell.boundary_distance(x, per_dim)
        } else {
            boundary.iter().map(|b| dist(b, x)).fold(f64::INFINITY, f64::min)
        };
        let r = fam.min_rho(x);
        if d > 0.0 && r.is_finite() {
            c = c.max(r / d);
        }
        let r0 = fam.min_rho0(x);
        c0 = c0.max(r0 / d.min(1.0));
        if d.is_finite() {
            excess = excess.max(d - r);
        }
    }
    Ok(RhoDistanceCertificate {
        empirical_c: c,
        empirical_c0: c0,
        max_upper_excess: excess,
        tolerance,
        upper_ok: excess <= tolerance,
        resolution: (!exact).then_some(per_dim),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvRhoCertificate {
    /// `(sample, gamma, d^gamma (1/rho_j))`.
    pub values: Vec<(usize, MultiIndex, f64)>,
    /// `max |d^g(1/rho_j)| min{1,d}^{|g|+1}` with `d = min_{i>=1} rho_i`.
    pub empirical_c: f64,
}

/// The expression `1/rho_j` of an open cell.
pub fn inv_rho_expr(cell: &Cell, j: usize) -> Result<FuncExpr> {
    let fam = cell.associated_functions()?;
    match fam.rho.get(j) {
        None => input(format!("cell has no associated function with index {j}")),
        Some(None) => input(format!("rho_{j} is infinite")),
        Some(Some(p)) => Ok(FuncExpr::quotient(FuncExpr::constant(1.0), FuncExpr::poly(p.clone()))),
    }
}

/// Derivatives of `1/rho_j` up to order `p` and the empirical constant of the
/// bound `|d^g(1/rho_j)| <= C min{1,d}^{-|g|-1}`.
pub fn inv_rho_bounds(cell: &Cell, j: usize, samples: &[Vec<f64>], p: usize) -> Result<InvRhoCertificate> {
    let e = inv_rho_expr(cell, j)?;
    let fam = cell.associated_functions()?;
    let n = cell.ambient_dim();
    let idx = indices_up_to(n, p);
    let mut values = Vec::new();
    let mut c = 0.0f64;
    for (si, x) in samples.iter().enumerate() {
        if fam.eval(j, x) <= 0.0 {
            return domain(format!("rho_{j} is not positive at {x:?}"));
        }
        let d = fam.min_rho0(x);
        let jet = e.jet_at(x, p)?;
        for (g, v) in idx.iter().zip(jet) {
            c = c.max(v.abs() * d.powi(g.order() as i32 + 1));
            values.push((si, g.clone(), v));
        }
    }
    Ok(InvRhoCertificate { values, empirical_c: c })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiconvexityEstimate {
    /// `max (path length) / |x - y|` over sampled pairs.
    pub constant: f64,
    pub worst_pair: (usize, usize),
    pub radius: f64,
}

/// Estimates the quasiconvexity constant on a proximity graph joining samples
/// at distance `<= radius`.
pub fn quasiconvexity_constant(samples: &[Vec<f64>], radius: f64) -> Result<QuasiconvexityEstimate> {
    let n = samples.len();
    if n < 2 {
        return input("quasiconvexity needs at least two samples");
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..i {
            let d = dist(&samples[i], &samples[j]);
            if d <= radius {
                adj[i].push((j, d));
                adj[j].push((i, d));
            }
        }
    }
    let comps = components(&adj);
    if comps.len() > 1 {
        let desc: Vec<String> = comps
            .iter()
            .map(|c| format!("{{{} samples, first #{}}}", c.len(), c[0]))
            .collect();
        return Err(Error::Precondition(format!(
            "proximity graph at radius {radius} is disconnected: {} components {}",
            comps.len(),
            desc.join(" ")
        )));
    }
    let mut best = 0.0f64;
    let mut worst = (0, 1);
    for s in 0..n {
        let d = dijkstra(&adj, s);
        for t in 0..n {
            if t == s {
                continue;
            }
            let e = dist(&samples[s], &samples[t]);
            if e > 0.0 {
                let r = d[t] / e;
                if r > best {
                    best = r;
                    worst = (s, t);
                }
            }
        }
    }
    Ok(QuasiconvexityEstimate { constant: best, worst_pair: worst, radius })
}

fn components(adj: &[Vec<(usize, f64)>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            for &(t, _) in &adj[comp[k]] {
                if !seen[t] {
                    seen[t] = true;
                    comp.push(t);
                }
            }
            k += 1;
        }
        out.push(comp);
    }
    out
}

// Nonnegative f64 bit patterns order like the values themselves.
fn dijkstra(adj: &[Vec<(usize, f64)>], s: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; adj.len()];
    d[s] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0f64.to_bits(), s)));
    while let Some(Reverse((bits, v))) = heap.pop() {
        let dv = f64::from_bits(bits);
        if dv > d[v] {
            continue;
        }
        for &(t, w) in &adj[v] {
            let nd = dv + w;
            if nd < d[t] {
                d[t] = nd;
                heap.push(Reverse((nd.to_bits(), t)));
            }
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationCertificate {
    /// `min_x d(x,Y) / d(x,Z)`; infinite when `Z` is empty.
    pub c: f64,
    pub worst: Option<usize>,
    pub pass: bool,
}

fn set_distance(x: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min)
}

/// Empirical constant of `d(x,Y) >= C d(x,Z)` over `x` in `X`.
pub fn check_separation(x: &[Vec<f64>], y: &[Vec<f64>], z: &[Vec<f64>]) -> SeparationCertificate {
    let mut c = f64::INFINITY;
    let mut worst = None;
    for (i, p) in x.iter().enumerate() {
        let dy = set_distance(p, y);
        let dz = set_distance(p, z);
        let r = if dz == f64::INFINITY {
            f64::INFINITY
        } else if dz == 0.0 {
            if dy == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            dy / dz
        };
        if r < c {
            c = r;
            worst = Some(i);
        }
    }
    SeparationCertificate { c, worst, pass: c > 0.0 }
}

// ---- serialization -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EndRepr {
    Num(f64),
    Word(String),
}

fn end_from(e: EndRepr) -> Result<f64> {
    match e {
        EndRepr::Num(v) => Ok(v),
        EndRepr::Word(w) => match w.as_str() {
            "-inf" => Ok(f64::NEG_INFINITY),
            "+inf" | "inf" => Ok(f64::INFINITY),
            _ => Err(Error::Schema(format!("interval end {w:?} is neither a number nor \"-inf\"/\"+inf\""))),
        },
    }
}

fn end_to(v: f64) -> EndRepr {
    if v == f64::INFINITY {
        EndRepr::Word("+inf".into())
    } else if v == f64::NEG_INFINITY {
        EndRepr::Word("-inf".into())
    } else {
        EndRepr::Num(v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundRepr {
    Word(String),
    Fn(Poly),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandRepr {
    lo: BoundRepr,
    hi: BoundRepr,
    base: Box<CellRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRepr {
    map: Vec<Poly>,
    base: Box<CellRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum CellRepr {
    Interval([EndRepr; 2]),
    Band(BandRepr),
    Graph(GraphRepr),
}

fn bound_from(b: BoundRepr) -> Result<Bound> {
    match b {
        BoundRepr::Fn(p) => Ok(Bound::Fn(p)),
        BoundRepr::Word(w) => match w.as_str() {
            "-inf" => Ok(Bound::NegInf),
            "+inf" | "inf" => Ok(Bound::PosInf),
            _ => Err(Error::Schema(format!("band bound {w:?} is neither a polynomial nor \"-inf\"/\"+inf\""))),
        },
    }
}

fn bound_to(b: &Bound) -> BoundRepr {
    match b {
        Bound::NegInf => BoundRepr::Word("-inf".into()),
        Bound::PosInf => BoundRepr::Word("+inf".into()),
        Bound::Fn(p) => BoundRepr::Fn(p.clone()),
    }
}

fn cell_from(r: CellRepr) -> Result<Cell> {
    Ok(match r {
        CellRepr::Interval([a, b]) => Cell::interval(end_from(a)?, end_from(b)?),
        CellRepr::Band(b) => Cell::band(bound_from(b.lo)?, bound_from(b.hi)?, cell_from(*b.base)?),
        CellRepr::Graph(g) => Cell::graph(g.map, cell_from(*g.base)?),
    })
}

fn cell_to(c: &Cell) -> CellRepr {
    match c {
        Cell::Interval { lo, hi } => CellRepr::Interval([end_to(*lo), end_to(*hi)]),
        Cell::Band { lo, hi, base } => CellRepr::Band(BandRepr {
            lo: bound_to(lo),
            hi: bound_to(hi),
            base: Box::new(cell_to(base)),
        }),
        Cell::Graph { map, base } => CellRepr::Graph(GraphRepr { map: map.clone(), base: Box::new(cell_to(base)) }),
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        cell_to(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = cell_from(CellRepr::deserialize(d)?).map_err(serde::de::Error::custom)?;
        c.validate().map_err(serde::de::Error::custom)?;
        Ok(c)
    }
}
