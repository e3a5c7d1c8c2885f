//! Single construction steps: point bumps, cutoffs over flat cells, the
//! obstacle cutoff, transport along graph maps, and zero extension of
//! full-dimensional cells.

use crate::calculus::{FuncExpr, Region};
use crate::cells::Cell;
use crate::error::{input, precondition, Error, Result};
use crate::jet::{dist, jet_from_function, taylor_at, Jet, POINT_TOL};
use crate::multiindex::{indices_up_to, MultiIndex};
use crate::poly::Poly;

use super::verify::FlatZone;
use super::{ExtensionResult, ObstacleCase, PieceLog, Settings, StepKind, StepLog};

/// Finite-difference step for the gradient of `r` when labelling pieces.
pub const GRAD_STEP: f64 = 1e-5;
/// Margin below which an obstacle point counts as lying on a piece boundary.
const SPLIT_TOL: f64 = 1e-12;

/// Default samples per direction for a stratum of dimension `k`.
pub fn default_samples(k: usize) -> usize {
    match k {
        0 | 1 => 17,
        2 => 7,
        _ => 5,
    }
}

/// `{(u, phi(u)) : u in base}` with `base` open in the leading `k`
/// coordinates of `R^n`. Flat cells have `phi = 0`; full-dimensional cells
/// have no `phi` at all.
#[derive(Clone, Debug, PartialEq)]
pub struct Sheet {
    pub base: Cell,
    pub phi: Vec<Poly>,
    pub n: usize,
    pub per_dim: usize,
}

impl Sheet {
    pub fn from_cell(cell: &Cell, n: usize) -> Result<Sheet> {
        cell.validate()?;
        let (base, phi) = match cell {
            Cell::Graph { map, base } => ((**base).clone(), map.clone()),
            c => {
                let k = c.ambient_dim();
                if k > n {
                    return input(format!("cell of ambient dimension {k} does not fit in R^{n}"));
                }
                (c.clone(), (0..n - k).map(|_| Poly::zero(k)).collect())
            }
        };
        let k = base.ambient_dim();
        if k + phi.len() != n {
            return input(format!("graph over R^{k} with {} components does not live in R^{n}", phi.len()));
        }
        if phi.iter().any(|p| p.nvars() != k) {
            return input(format!("graph components must be polynomials in {k} variables"));
        }
        Ok(Sheet { base, phi, n, per_dim: default_samples(k) })
    }

    pub fn with_samples(mut self, per_dim: usize) -> Sheet {
        self.per_dim = per_dim.max(2);
        self
    }

    pub fn k(&self) -> usize {
        self.base.ambient_dim()
    }

    pub fn ell(&self) -> usize {
        self.phi.len()
    }

    pub fn is_flat(&self) -> bool {
        self.phi.iter().all(|p| p.is_zero())
    }

    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        let mut x = u.to_vec();
        x.extend(self.phi.iter().map(|p| p.eval(u)));
        x
    }

    /// `w - phi(u)` for `x = (u, w)`.
    pub fn offset(&self, x: &[f64]) -> Vec<f64> {
        let k = self.k();
        let u = &x[..k];
        x[k..].iter().zip(&self.phi).map(|(w, p)| w - p.eval(u)).collect()
    }

    pub fn samples_closure(&self) -> Vec<Vec<f64>> {
        self.base.sample_closure(self.per_dim).iter().map(|u| self.lift(u)).collect()
    }

    pub fn samples_interior(&self) -> Vec<Vec<f64>> {
        self.base.sample_interior(self.per_dim).iter().map(|u| self.lift(u)).collect()
    }

    pub fn samples_boundary(&self) -> Vec<Vec<f64>> {
        self.base.sample_boundary(self.per_dim).iter().map(|u| self.lift(u)).collect()
    }

    /// Distance from `x` to the closure, by dense sampling refined around the
    /// nearest sample for one-dimensional bases.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let dense = Sheet { per_dim: 4 * self.per_dim.max(16), ..self.clone() };
        let pts = dense.base.sample_closure(dense.per_dim);
        let mut best = (f64::INFINITY, 0usize);
        for (i, u) in pts.iter().enumerate() {
            let d = dist(&self.lift(u), x);
            if d < best.0 {
                best = (d, i);
            }
        }
        if self.k() != 1 || pts.len() < 2 {
            return best.0;
        }
        // Golden-section refinement between the neighbours of the best sample.
        let i = best.1;
        let mut a = pts[i.saturating_sub(1)][0];
        let mut b = pts[(i + 1).min(pts.len() - 1)][0];
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let d = |t: f64| dist(&self.lift(&[t]), x);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let e = a + g * (b - a);
            if d(c) < d(e) {
                b = e;
            } else {
                a = c;
            }
        }
        best.0.min(d(0.5 * (a + b)))
    }

    /// `phi_+ (u, w) = (u, w + phi(u))` as expressions.
    fn plus_map(&self) -> Vec<FuncExpr> {
        self.shift_map(1.0)
    }

    /// `phi_- (u, w) = (u, w - phi(u))` as expressions.
    fn minus_map(&self) -> Vec<FuncExpr> {
        self.shift_map(-1.0)
    }

    fn shift_map(&self, sign: f64) -> Vec<FuncExpr> {
        let (n, k) = (self.n, self.k());
        (0..n)
            .map(|j| {
                if j < k {
                    FuncExpr::coord(j)
                } else {
                    FuncExpr::poly(Poly::coord(n, j).add(&self.phi[j - k].embed(n, 0).scale(sign)))
                }
            })
            .collect()
    }
}

/// What a construction step must stay flat on.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Obstacles {
    pub points: Vec<Vec<f64>>,
    pub sheets: Vec<Sheet>,
}

impl Obstacles {
    pub fn samples(&self) -> Vec<Vec<f64>> {
        let mut out = self.points.clone();
        for s in &self.sheets {
            out.extend(s.samples_closure());
        }
        out
    }
}

/// `chi(|x - x0| / d) T(x)` with `T` the Taylor polynomial of `values` at `x0`.
pub(crate) fn point_piece(x0: &[f64], values: &[f64], d: f64, settings: &Settings) -> Result<FuncExpr> {
    if values.iter().all(|v| *v == 0.0) {
        return Ok(FuncExpr::zero());
    }
    let n = x0.len();
    let jet = Jet::from_values(n, settings.m, vec![x0.to_vec()], vec![values.to_vec()])?;
    let t = taylor_at(&jet, 0).to_poly();
    let mut sq = Poly::zero(n);
    for (i, c) in x0.iter().enumerate() {
        let shifted = Poly::coord(n, i).add(&Poly::constant(n, -c));
        sq = sq.add(&shifted.mul(&shifted).scale(1.0 / (d * d)));
    }
    Ok(FuncExpr::product(vec![FuncExpr::bump(settings.bump(), FuncExpr::poly(sq)), FuncExpr::poly(t)]))
}

/// Support radius `min{1, d(x0, others)}`.
pub(crate) fn support_radius(x0: &[f64], others: &[Vec<f64>]) -> Result<f64> {
    let mut d = 1.0f64;
    for y in others {
        d = d.min(dist(x0, y));
    }
    if d <= POINT_TOL {
        return precondition(format!("point {x0:?} is not isolated in the sampled set"));
    }
    Ok(d)
}

/// Extension of a one-point jet, vanishing near every other point of `others`.
pub fn extend_point(f: &Jet, others: &[Vec<f64>], settings: &Settings) -> Result<ExtensionResult> {
    settings.validate()?;
    if f.len() != 1 {
        return input(format!("a point extension needs a one-point jet, got {} points", f.len()));
    }
    if f.order() != settings.m {
        return input(format!("jet order {} differs from m = {}", f.order(), settings.m));
    }
    let x0 = f.points()[0].clone();
    let rest: Vec<Vec<f64>> = others.iter().filter(|y| !crate::jet::same_point(y, &x0)).cloned().collect();
    let d = support_radius(&x0, &rest)?;
    let expr = point_piece(&x0, f.values(0), d, settings)?;
    let mut log = StepLog::new(format!("point {x0:?}"), StepKind::Point, 0);
    log.support_radius = Some(d);
    let mut pts = vec![x0.clone()];
    let mut vals = vec![f.values(0).to_vec()];
    let width = vals[0].len();
    for y in rest {
        pts.push(y);
        vals.push(vec![0.0; width]);
    }
    Ok(ExtensionResult {
        f: expr,
        target: Jet::from_values(f.dim(), f.order(), pts, vals)?,
        log: vec![log],
        zones: vec![FlatZone::Ball { center: x0, radius: d }],
        seams: Vec::new(),
        settings: *settings,
        report: None,
    })
}

fn check_source(source: &FuncExpr, sheet: &Sheet, settings: &Settings) -> Result<()> {
    settings.validate()?;
    let s = source.smoothness();
    if s < settings.m {
        return input(format!("source expression is only C^{s}, need C^{}", settings.m));
    }
    if sheet.ell() > 0 && sheet.k() == 0 {
        return input("zero-dimensional sheets are handled as points");
    }
    Ok(())
}

/// Flat-cell piece over `piece` in flattened coordinates:
/// `gate_piece( prod xi(c sqrt(l) w_i / rho_j(u)) * (sum_beta d^(0,beta)G(u,0) w^beta / beta! - g) )`.
fn cell_piece(
    n: usize,
    k: usize,
    piece: &Cell,
    g_src: &FuncExpr,
    g_prev: &FuncExpr,
    extra: Option<FuncExpr>,
    settings: &Settings,
) -> Result<FuncExpr> {
    let l = n - k;
    let fam = piece.associated_functions()?;
    let scale = settings.cutoff * (l as f64).sqrt();
    let mut factors = Vec::new();
    for i in 0..l {
        let w = Poly::coord(n, k + i).scale(scale);
        for rho in fam.rho.iter().flatten() {
            let arg = if rho.degree() == 0 {
                FuncExpr::poly(w.scale(1.0 / rho.coeff(&MultiIndex::zero(k))))
            } else {
                FuncExpr::quotient(FuncExpr::poly(w.clone()), FuncExpr::poly(rho.embed(n, 0)))
            };
            factors.push(FuncExpr::bump(settings.bump(), arg));
        }
    }
    if let Some(e) = extra {
        factors.push(e);
    }
    let restrict: Vec<FuncExpr> = (0..n)
        .map(|j| if j < k { FuncExpr::coord(j) } else { FuncExpr::constant(0.0) })
        .collect();
    let mut terms = Vec::new();
    for beta in indices_up_to(l, settings.m) {
        let mut full = vec![0; k];
        full.extend_from_slice(&beta.0);
        let alpha = MultiIndex(full.clone());
        let coeff = FuncExpr::compose(FuncExpr::derivative(alpha.clone(), g_src.clone()), restrict.clone());
        let mono = Poly::from_terms(n, [(MultiIndex(full), 1.0 / beta.factorial())])?;
        terms.push(FuncExpr::product(vec![coeff, FuncExpr::poly(mono)]));
    }
    terms.push(g_prev.clone().scale(-1.0));
    factors.push(FuncExpr::sum(terms));
    Ok(FuncExpr::gate(Region::Cell(piece.clone()), FuncExpr::product(factors), true))
}

/// Pieces of the base of a one-dimensional sheet, split at the projections
/// of obstacle points.
fn split_base(sheet: &Sheet, obstacles: &Obstacles) -> Result<(Vec<Cell>, Vec<f64>)> {
    let (lo, hi) = match sheet.base {
        Cell::Interval { lo, hi } => (lo, hi),
        _ => return input("split_base expects an interval base"),
    };
    let mut cuts: Vec<f64> = obstacles
        .points
        .iter()
        .map(|p| p[0])
        .filter(|&u| u - lo > SPLIT_TOL && hi - u > SPLIT_TOL)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= SPLIT_TOL * (1.0 + a.abs()));
    let mut ends = vec![lo];
    ends.extend(&cuts);
    ends.push(hi);
    Ok((ends.windows(2).map(|w| Cell::interval(w[0], w[1])).collect(), cuts))
}

/// `r(u)` on a piece as an expression in `n` variables, or `None` when no
/// obstacle lies over the piece (`r = 1`).
fn obstacle_distance(sheet: &Sheet, piece: &Cell, obstacles: &Obstacles) -> Result<Option<(FuncExpr, usize)>> {
    let k = sheet.k();
    let n = sheet.n;
    let samples = piece.sample_interior(sheet.per_dim.max(9));
    for p in &obstacles.points {
        if piece.margin(&p[..k]) > SPLIT_TOL {
            return precondition(format!(
                "obstacle point {p:?} lies over the interior of a {k}-dimensional piece; only one-dimensional bases are split automatically"
            ));
        }
    }
    let mut covering: Vec<(usize, Vec<Poly>)> = Vec::new();
    for (oi, o) in obstacles.sheets.iter().enumerate() {
        if o.k() == k {
            let inside = samples.iter().filter(|u| o.base.margin(u) > 0.0).count();
            if inside == samples.len() {
                covering.push((oi, o.phi.iter().zip(&sheet.phi).map(|(a, b)| a.sub(b)).collect()));
            } else if inside > 0 {
                return precondition(format!("obstacle sheet {oi} covers only part of a piece"));
            }
        } else {
            for x in o.samples_closure() {
                if piece.margin(&x[..k]) > 1e-9 {
                    return precondition(format!(
                        "obstacle of dimension {} meets the fibres over a {k}-dimensional piece; only points and graphs over the same base are supported",
                        o.k()
                    ));
                }
            }
        }
    }
    if covering.is_empty() {
        return Ok(None);
    }
    let norm = |q: &[Poly], u: &[f64]| q.iter().map(|p| p.eval(u).powi(2)).sum::<f64>().sqrt();
    let mut chosen = None;
    for (ci, (_, q)) in covering.iter().enumerate() {
        let nearest_everywhere = samples.iter().all(|u| {
            covering.iter().all(|(_, other)| norm(q, u) <= norm(other, u) * (1.0 + 1e-12))
        });
        if nearest_everywhere {
            chosen = Some(ci);
            break;
        }
    }
    let ci = chosen.ok_or_else(|| Error::Precondition("the nearest obstacle sheet changes within a piece".into()))?;
    let (oi, q) = &covering[ci];
    for u in &samples {
        if norm(q, u) <= POINT_TOL {
            return Err(Error::Domain(format!("obstacle sheet {oi} touches the stratum at {u:?}")));
        }
    }
    let expr = if q.len() == 1 {
        let sign = q[0].eval(&samples[0]).signum();
        FuncExpr::poly(q[0].embed(n, 0).scale(sign))
    } else {
        let mut sq = Poly::zero(n);
        for p in q {
            let e = p.embed(n, 0);
            sq = sq.add(&e.mul(&e));
        }
        FuncExpr::power(FuncExpr::poly(sq), 0.5)
    };
    Ok(Some((expr, *oi)))
}

fn grad_inf(r: &FuncExpr, u: &[f64], n: usize) -> Result<f64> {
    let k = u.len();
    let mut best = 0.0f64;
    for j in 0..k {
        let mut a = u.to_vec();
        a.resize(n, 0.0);
        let mut b = a.clone();
        a[j] -= GRAD_STEP;
        b[j] += GRAD_STEP;
        best = best.max(((r.eval(&b)? - r.eval(&a)?) / (2.0 * GRAD_STEP)).abs());
    }
    Ok(best)
}

/// Steps 1 and 2 in flattened coordinates. `g_src` and `g_prev` are already
/// pulled back along `phi_+`.
fn flattened(
    sheet: &Sheet,
    g_src: &FuncExpr,
    g_prev: &FuncExpr,
    pieces: &[Cell],
    obstacles: Option<&Obstacles>,
    settings: &Settings,
    log: &mut StepLog,
) -> Result<FuncExpr> {
    let (n, k) = (sheet.n, sheet.k());
    let l = n - k;
    let mut out = Vec::new();
    for piece in pieces {
        if piece.ambient_dim() != k || !piece.is_open() {
            return input("decomposition pieces must be open cells over the stratum base");
        }
        let extra = match obstacles {
            None => None,
            Some(obs) => {
                let found = obstacle_distance(sheet, piece, obs)?;
                let r = found.as_ref().map(|(e, _)| e.clone()).unwrap_or_else(|| FuncExpr::constant(1.0));
                let samples = piece.sample_interior(sheet.per_dim.max(9));
                let fam = piece.associated_functions()?;
                let mut max_grad = 0.0f64;
                let mut min_r = f64::INFINITY;
                for u in &samples {
                    let mut x = u.clone();
                    x.resize(n, 0.0);
                    min_r = min_r.min(r.eval(&x)?);
                    if found.is_some() {
                        max_grad = max_grad.max(grad_inf(&r, u, n)?);
                    }
                }
                if !(min_r > 0.0) {
                    return Err(Error::Domain(format!("obstacle distance vanishes on piece {piece:?}")));
                }
                let case = if max_grad <= 1.0 { ObstacleCase::Gentle } else { ObstacleCase::Steep };
                let mut steep_violations = 0;
                if case == ObstacleCase::Steep {
                    for u in &samples {
                        let mut x = u.clone();
                        x.resize(n, 0.0);
                        if r.eval(&x)? < fam.min_rho(u) {
                            steep_violations += 1;
                        }
                    }
                }
                log.pieces.push(PieceLog {
                    piece: describe_piece(piece),
                    case,
                    max_grad_r: max_grad,
                    min_r,
                    steep_violations,
                });
                match case {
                    ObstacleCase::Steep => None,
                    ObstacleCase::Gentle => {
                        let s = (l as f64).sqrt();
                        let factors: Vec<FuncExpr> = (0..l)
                            .map(|i| {
                                let w = FuncExpr::poly(Poly::coord(n, k + i).scale(s));
                                FuncExpr::bump(settings.bump(), FuncExpr::quotient(w, r.clone()))
                            })
                            .collect();
                        Some(FuncExpr::product(factors))
                    }
                }
            }
        };
        out.push(cell_piece(n, k, piece, g_src, g_prev, extra, settings)?);
    }
    Ok(FuncExpr::sum(out))
}

fn describe_piece(c: &Cell) -> String {
    match c {
        Cell::Interval { lo, hi } => format!("({lo}, {hi})"),
        other => match other.as_box() {
            Some(b) => format!("box {b:?}"),
            None => format!("cell of dimension {}", other.dim()),
        },
    }
}

fn boundary_residual(sheet: &Sheet, source: &FuncExpr, g: &FuncExpr, m: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let resid = FuncExpr::sub(source.clone(), g.clone());
    for x in sheet.samples_boundary() {
        for v in resid.jet_at(&x, m)? {
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

fn residual_target(sheet: &Sheet, source: &FuncExpr, g: &FuncExpr, obstacles: &Obstacles, m: usize) -> Result<Jet> {
    let resid = FuncExpr::sub(source.clone(), g.clone());
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for x in sheet.samples_closure() {
        if !pts.iter().any(|p| crate::jet::same_point(p, &x)) {
            pts.push(x);
        }
    }
    let on_sheet = pts.len();
    let mut jet = jet_from_function(&resid, &pts, m)?;
    let mut extra = Vec::new();
    for x in obstacles.samples() {
        if !pts.iter().any(|p| crate::jet::same_point(p, &x)) {
            pts.push(x.clone());
            extra.push(x);
        }
    }
    if !extra.is_empty() {
        let width = jet.indices().len();
        let mut vals: Vec<Vec<f64>> = (0..on_sheet).map(|i| jet.values(i).to_vec()).collect();
        vals.extend(extra.iter().map(|_| vec![0.0; width]));
        jet = Jet::from_values(sheet.n, m, pts, vals)?;
    }
    Ok(jet)
}

fn finish(
    sheet: &Sheet,
    f: FuncExpr,
    source: &FuncExpr,
    g: &FuncExpr,
    obstacles: &Obstacles,
    pieces: &[Cell],
    settings: &Settings,
    log: StepLog,
) -> Result<ExtensionResult> {
    let zones = pieces
        .iter()
        .map(|p| FlatZone::Delta { base: p.clone(), phi: sheet.phi.clone() })
        .collect();
    let mut seams = Vec::new();
    for p in pieces {
        for u in p.sample_boundary(sheet.per_dim) {
            let x = sheet.lift(&u);
            if !seams.iter().any(|s: &Vec<f64>| crate::jet::same_point(s, &x)) {
                seams.push(x);
            }
        }
    }
    Ok(ExtensionResult {
        f,
        target: residual_target(sheet, source, g, obstacles, settings.m)?,
        log: vec![log],
        zones,
        seams,
        settings: *settings,
        report: None,
    })
}

/// Cutoff extension from a flat cell `T x 0` over the given decomposition of
/// `T` (the whole base when `pieces` is empty), with no obstacle cutoff.
/// `g` is the part of the extension already built; the step extends the
/// jet of `source - g`.
pub fn extend_flat_cell(
    sheet: &Sheet,
    source: &FuncExpr,
    pieces: &[Cell],
    g: &FuncExpr,
    settings: &Settings,
) -> Result<ExtensionResult> {
    check_source(source, sheet, settings)?;
    if !sheet.is_flat() || sheet.ell() == 0 {
        return input("extend_flat_cell needs a flat cell of positive codimension");
    }
    let pieces = if pieces.is_empty() { vec![sheet.base.clone()] } else { pieces.to_vec() };
    let mut log = StepLog::new("flat cell", StepKind::FlatCell, sheet.k());
    log.boundary_residual = boundary_residual(sheet, source, g, settings.m)?;
    let f = flattened(sheet, source, g, &pieces, None, settings, &mut log)?;
    finish(sheet, f, source, g, &Obstacles::default(), &pieces, settings, log)
}

/// Cutoff extension from a flat cell that also vanishes on `obstacles`.
/// One-dimensional bases are split at the projections of obstacle points.
pub fn extend_with_obstacle(
    sheet: &Sheet,
    source: &FuncExpr,
    obstacles: &Obstacles,
    g: &FuncExpr,
    settings: &Settings,
) -> Result<ExtensionResult> {
    if !sheet.is_flat() {
        return input("extend_with_obstacle needs a flat cell; use extend_graph for graphs");
    }
    extend_graph(sheet, source, obstacles, g, settings)
}

/// Extension from a graph cell: pull back along `phi_+`, run the flat-cell
/// and obstacle steps on the transported data, push forward along `phi_-`.
pub fn extend_graph(
    sheet: &Sheet,
    source: &FuncExpr,
    obstacles: &Obstacles,
    g: &FuncExpr,
    settings: &Settings,
) -> Result<ExtensionResult> {
    check_source(source, sheet, settings)?;
    if sheet.ell() == 0 {
        return input("graph extension needs positive codimension; use extend_open_cell");
    }
    let flat = sheet.is_flat();
    let kind = if flat { StepKind::FlatCell } else { StepKind::Graph };
    let mut log = StepLog::new(if flat { "flat cell" } else { "graph cell" }, kind, sheet.k());
    log.boundary_residual = boundary_residual(sheet, source, g, settings.m)?;
    let (pieces, cuts) = if sheet.k() == 1 {
        split_base(sheet, obstacles)?
    } else {
        (vec![sheet.base.clone()], Vec::new())
    };
    if !cuts.is_empty() {
        log.notes.push(format!("base split at {cuts:?}"));
    }
    let f = if flat {
        flattened(sheet, source, g, &pieces, Some(obstacles), settings, &mut log)?
    } else {
        let interior = sheet.samples_interior();
        let bnd = sheet.samples_boundary();
        let mut c = f64::INFINITY;
        for x in &interior {
            let dy = sheet.base.boundary_distance(&x[..sheet.k()], sheet.per_dim);
            let dz = bnd.iter().map(|b| dist(b, x)).fold(f64::INFINITY, f64::min);
            c = c.min(if dz == f64::INFINITY { f64::INFINITY } else { dy / dz });
        }
        log.separation = Some(c);
        if !(c > 0.0) {
            return precondition("graph closure is not separated from the cylinder over the base boundary");
        }
        let base_samples = sheet.base.sample_interior(sheet.per_dim);
        let reg = crate::cells::check_lambda_regular(&sheet.phi, &sheet.base, 1.0, settings.m + 1, &base_samples)?;
        log.regularity_margin = Some(reg.worst_margin);
        let plus = sheet.plus_map();
        let g_src = FuncExpr::compose(source.clone(), plus.clone());
        let g_prev = FuncExpr::compose(g.clone(), plus);
        let flat_f = flattened(sheet, &g_src, &g_prev, &pieces, Some(obstacles), settings, &mut log)?;
        FuncExpr::compose(flat_f, sheet.minus_map())
    };
    finish(sheet, f, source, g, obstacles, &pieces, settings, log)
}

/// Zero extension of a full-dimensional cell: `source - g` inside, 0 outside.
/// The residual must be flat on the sampled boundary.
pub fn extend_open_cell(sheet: &Sheet, source: &FuncExpr, g: &FuncExpr, settings: &Settings) -> Result<ExtensionResult> {
    check_source(source, sheet, settings)?;
    if sheet.ell() != 0 {
        return input("zero extension needs a full-dimensional cell");
    }
    let mut log = StepLog::new("open cell", StepKind::Open, sheet.k());
    let resid = boundary_residual(sheet, source, g, settings.m)?;
    log.boundary_residual = resid;
    let scale = sheet
        .samples_interior()
        .iter()
        .map(|x| source.eval(x).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1.0f64, f64::max);
    if resid > 1e-9 * scale {
        return precondition(format!("jet is not flat on the boundary of the open cell (residual {resid:e})"));
    }
    let f = FuncExpr::gate(Region::Cell(sheet.base.clone()), FuncExpr::sub(source.clone(), g.clone()), true);
    let mut res = finish(sheet, f, source, g, &Obstacles::default(), &[], settings, log)?;
    res.zones = vec![FlatZone::Open { cell: sheet.base.clone() }];
    res.seams = sheet.samples_boundary();
    Ok(res)
}
