//! Sampled checks of a constructed extension against its jet.

use serde::{Deserialize, Serialize};

use crate::calculus::FuncExpr;
use crate::cells::Cell;
use crate::error::{input, Result};
use crate::jet::{dist, Jet};
use crate::modulus::Modulus;
use crate::multiindex::{indices_up_to, MultiIndex};
use crate::poly::Poly;

use super::probes::ProbeSpec;

/// Derivatives below this size count as zero in flatness checks.
pub const FLAT_TOL: f64 = 1e-10;
/// Offset used on either side of a seam.
pub const SEAM_STEP: f64 = 1e-6;

/// Where an extension is allowed to be nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatZone {
    /// `{(u, w) : u in base, |w - phi(u)| < min(1, min_j rho_j(u))}`.
    Delta { base: Cell, phi: Vec<Poly> },
    /// Open ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// The open cell itself (full-dimensional strata).
    Open { cell: Cell },
}

impl FlatZone {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            FlatZone::Ball { center, radius } => dist(center, x) < *radius,
            FlatZone::Open { cell } => cell.margin(x) > 0.0,
            FlatZone::Delta { base, phi } => {
                let k = base.ambient_dim();
                let u = &x[..k];
                if !(base.margin(u) > 0.0) {
                    return false;
                }
                let fam = match base.associated_functions() {
                    Ok(f) => f,
                    Err(_) => return false,
                };
                let w2: f64 = x[k..]
                    .iter()
                    .enumerate()
                    .map(|(i, w)| {
                        let c = phi.get(i).map(|p| p.eval(u)).unwrap_or(0.0);
                        (w - c) * (w - c)
                    })
                    .sum();
                w2.sqrt() < fam.min_rho0(u)
            }
        }
    }

    /// Bounding box `(lo, hi)` of the zone in `R^n`; sampled for cells.
    pub fn bounding_box(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        let mut grow = |x: &[f64], r: f64| {
            for i in 0..n {
                lo[i] = lo[i].min(x[i] - r);
                hi[i] = hi[i].max(x[i] + r);
            }
        };
        match self {
            FlatZone::Ball { center, radius } => grow(center, *radius),
            FlatZone::Open { cell } => {
                for x in cell.sample_closure(BOX_SAMPLES) {
                    grow(&x, 0.0);
                }
            }
            FlatZone::Delta { base, phi } => {
                let fam = base.associated_functions().ok();
                let us = base.sample_closure(BOX_SAMPLES);
                let reach = us
                    .iter()
                    .map(|u| fam.as_ref().map_or(1.0, |f| f.min_rho0(u)))
                    .fold(0.0f64, f64::max);
                for u in &us {
                    let mut x = u.clone();
                    x.extend(phi.iter().map(|p| p.eval(u)));
                    x.resize(n, 0.0);
                    grow(&x, reach);
                }
            }
        }
        (lo, hi)
    }
}

const BOX_SAMPLES: usize = 17;

/// Verification record of one extension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub restriction_max_error: f64,
    /// Sample index and field of the largest restriction error.
    pub restriction_worst: Option<(usize, MultiIndex)>,
    pub jet_points: usize,
    /// `sup |d^alpha f|` over probes, `|alpha| <= m`.
    pub sup_derivatives: f64,
    /// Sampled Hoelder seminorm of the order-`m` derivatives.
    pub holder_seminorm: f64,
    /// `sup_derivatives + holder_seminorm`.
    pub norm: f64,
    pub flatness_checked: usize,
    pub flatness_violations: usize,
    pub flatness_max: f64,
    pub seam_points: usize,
    pub seam_residual: f64,
    pub probes: ProbeSpec,
    pub probes_evaluated: usize,
    pub probes_skipped: usize,
    pub omega: String,
}

impl ExtensionReport {
    pub fn is_finite(&self) -> bool {
        self.norm.is_finite() && self.restriction_max_error.is_finite() && self.seam_residual.is_finite()
    }

    /// Restriction within `tol`, no flatness violations, finite norm.
    pub fn passes(&self, tol: f64) -> bool {
        self.is_finite() && self.restriction_max_error <= tol && self.flatness_violations == 0
    }
}

/// Compares `f` with the jet `target` at every sample, then estimates the
/// `C^{m,omega}` norm of `f` on the probe cloud. Probes where `f` cannot be
/// evaluated are skipped and counted.
pub fn verify_extension(
    f: &FuncExpr,
    target: &Jet,
    omega: &Modulus,
    zones: Option<&[FlatZone]>,
    seams: &[Vec<f64>],
    probes: &ProbeSpec,
) -> Result<ExtensionReport> {
    let m = target.order();
    let n = target.dim();
    if probes.dim() != n {
        return input(format!("probe box has dimension {}, jet has {n}", probes.dim()));
    }
    let idx = indices_up_to(n, m);
    let top: Vec<usize> = idx.iter().enumerate().filter(|(_, a)| a.order() == m).map(|(i, _)| i).collect();

    let mut restriction = 0.0f64;
    let mut worst = None;
    for i in 0..target.len() {
        let got = f.jet_at(&target.points()[i], m)?;
        for (k, (g, want)) in got.iter().zip(target.values(i)).enumerate() {
            let e = (g - want).abs();
            if e > restriction || (e.is_nan() && !restriction.is_nan()) {
                restriction = e;
                worst = Some((i, idx[k].clone()));
            }
        }
    }

    let diam = probes.diameter();
    let mut sup = 0.0f64;
    let mut holder = 0.0f64;
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut flat_checked = 0;
    let mut flat_violations = 0;
    let mut flat_max = 0.0f64;
    let scales = probes.scales.max(1);
    for (i, (x, v)) in probes.cloud()?.iter().enumerate() {
        let jx = match f.jet_at(x, m) {
            Ok(j) => j,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        evaluated += 1;
        let size = jx.iter().fold(0.0f64, |s, d| s.max(d.abs()));
        sup = sup.max(size);
        if let Some(z) = zones {
            if !z.iter().any(|zone| zone.contains(x)) {
                flat_checked += 1;
                flat_max = flat_max.max(size);
                if size > FLAT_TOL {
                    flat_violations += 1;
                }
            }
        }
        let h = diam * 0.5f64.powi((i % scales) as i32 + 1);
        let y: Vec<f64> = x.iter().zip(v).map(|(a, d)| a + h * d).collect();
        let jy = match f.jet_at(&y, m) {
            Ok(j) => j,
            Err(_) => continue,
        };
        sup = sup.max(jy.iter().fold(0.0f64, |s, d| s.max(d.abs())));
        let w = omega.eval(h);
        for &k in &top {
            holder = holder.max((jx[k] - jy[k]).abs() / w);
        }
    }

    let mut seam_residual = 0.0f64;
    for s in seams {
        for d in 0..n {
            let mut a = s.clone();
            let mut b = s.clone();
            a[d] -= SEAM_STEP;
            b[d] += SEAM_STEP;
            if let (Ok(ja), Ok(jb)) = (f.jet_at(&a, m), f.jet_at(&b, m)) {
                for (p, q) in ja.iter().zip(&jb) {
                    seam_residual = seam_residual.max((p - q).abs());
                }
            }
        }
    }

    Ok(ExtensionReport {
        restriction_max_error: restriction,
        restriction_worst: worst,
        jet_points: target.len(),
        sup_derivatives: sup,
        holder_seminorm: holder,
        norm: sup + holder,
        flatness_checked: flat_checked,
        flatness_violations: flat_violations,
        flatness_max: flat_max,
        seam_points: seams.len(),
        seam_residual,
        probes: probes.clone(),
        probes_evaluated: evaluated,
        probes_skipped: skipped,
        omega: omega.describe(),
    })
}
