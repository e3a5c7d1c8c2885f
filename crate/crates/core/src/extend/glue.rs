//! Gluing local extensions over the annuli `k-2 < |x| < k` with an explicit
//! partition of unity.

use crate::calculus::{BumpSpec, FuncExpr, Region};
use crate::error::{input, Result};
use crate::jet::{same_point, Jet};
use crate::multiindex::MultiIndex;
use crate::poly::Poly;

use super::driver::extend_jet;
use super::problem::Problem;
use super::{ExtensionResult, Settings};

/// Half-width of the support of the profile `h`.
pub const PROFILE_SUPPORT: f64 = 0.75;

/// A glued extension and its partition.
#[derive(Clone, Debug)]
pub struct GlueResult {
    pub f: FuncExpr,
    /// `psi_1, psi_2, ...`; the partition is `psi_k / sum psi`.
    pub psi: Vec<FuncExpr>,
    /// The partition sums to 1 on `|x| < covered_radius`.
    pub covered_radius: f64,
    pub target: Jet,
    pub settings: Settings,
}

fn profile(settings: &Settings) -> BumpSpec {
    settings.bump()
}

fn norm_sq(n: usize) -> Poly {
    let mut p = Poly::zero(n);
    for i in 0..n {
        let mut a = vec![0; n];
        a[i] = 2;
        p.add_term(MultiIndex(a), 1.0);
    }
    p
}

/// `psi_1 = h(|x|^2)`, `psi_k = h(|x| - (k-1))` for `k >= 2`, with `h(t) = xi(t / 0.75)`.
pub fn partition_bumps(n: usize, count: usize, settings: &Settings) -> Vec<FuncExpr> {
    let spec = profile(settings);
    let s = 1.0 / PROFILE_SUPPORT;
    let mut out = vec![FuncExpr::bump(spec, FuncExpr::poly(norm_sq(n).scale(s)))];
    for k in 2..=count {
        let shift = (k - 1) as f64;
        let radius = FuncExpr::power(FuncExpr::poly(norm_sq(n)), 0.5);
        let arg = FuncExpr::sum(vec![radius.scale(s), FuncExpr::constant(-shift * s)]);
        out.push(FuncExpr::gate(
            Region::Shell {
                center: vec![0.0; n],
                inner: shift - PROFILE_SUPPORT,
                outer: shift + PROFILE_SUPPORT,
            },
            FuncExpr::bump(spec, arg),
            true,
        ));
    }
    out
}

/// Glues `pieces[k-1]`, valid on `k-2 < |x| < k`, into `sum_k phi_k f_k`.
/// Pieces are given with their annulus index, which must run 1, 2, ...
pub fn glue_local(pieces: &[(usize, ExtensionResult)], settings: &Settings) -> Result<GlueResult> {
    settings.validate()?;
    if pieces.is_empty() {
        return input("nothing to glue");
    }
    for (i, (k, _)) in pieces.iter().enumerate() {
        if *k != i + 1 {
            return input(format!("annulus indices must run 1, 2, ... without gaps; found {k} at position {i}"));
        }
    }
    let n = pieces[0].1.target.dim();
    let m = settings.m;
    let count = pieces.len();
    let psi = partition_bumps(n, count, settings);
    let num = FuncExpr::sum(
        psi.iter()
            .zip(pieces)
            .map(|(p, (_, r))| FuncExpr::product(vec![p.clone(), r.f.clone()]))
            .collect(),
    );
    let den = FuncExpr::sum(psi.clone());
    let covered = count as f64 - 1.0 + PROFILE_SUPPORT;
    let f = FuncExpr::gate(
        Region::Shell { center: vec![0.0; n], inner: -1.0, outer: covered },
        FuncExpr::quotient(num, den),
        false,
    );
    let mut pts = Vec::new();
    let mut vals = Vec::new();
    for (_, r) in pieces {
        for i in 0..r.target.len() {
            let x = &r.target.points()[i];
            let radius = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if radius < covered && !pts.iter().any(|p: &Vec<f64>| same_point(p, x)) {
                pts.push(x.clone());
                vals.push(r.target.values(i).to_vec());
            }
        }
    }
    Ok(GlueResult { f, psi, covered_radius: covered, target: Jet::from_values(n, m, pts, vals)?, settings: *settings })
}

impl GlueResult {
    /// `|sum_k phi_k(x) - 1|` at `x`, with `phi_k = psi_k / sum psi`.
    pub fn partition_residual(&self, x: &[f64]) -> Result<f64> {
        let vals = self.psi.iter().map(|p| p.eval(x)).collect::<Result<Vec<_>>>()?;
        let total: f64 = vals.iter().sum();
        if !(total > 0.0) {
            return input(format!("{x:?} is outside the covered region"));
        }
        let s: f64 = vals.iter().map(|v| v / total).sum();
        Ok((s - 1.0).abs())
    }
}

/// Point-jet problem glued from per-annulus extensions.
pub fn glue_problem(problem: &Problem, settings: &Settings) -> Result<GlueResult> {
    if !problem.strata.is_empty() || !problem.extra_graphs.is_empty() {
        return input("gluing from a problem file supports point jets and flat points only");
    }
    let target = super::driver::target_jet(problem, settings)?;
    let rmax = target
        .points()
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let count = (rmax + 1.0 - PROFILE_SUPPORT).floor() as usize + 2;
    let mut pieces = Vec::new();
    for k in 1..=count {
        let (lo, hi) = (k as f64 - 2.0, k as f64);
        let mut sub = Problem::new(problem.n, problem.m);
        sub.p = problem.p;
        sub.plateau = problem.plateau;
        sub.cutoff = problem.cutoff;
        let mut keep_pts = Vec::new();
        let mut keep_vals = Vec::new();
        for i in 0..target.len() {
            let x = &target.points()[i];
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r >= lo && r <= hi {
                keep_pts.push(x.clone());
                keep_vals.push(target.values(i).to_vec());
            }
        }
        if !keep_pts.is_empty() {
            sub.jet = Some(Jet::from_values(problem.n, problem.m, keep_pts, keep_vals)?);
        }
        let res = if sub.jet.is_some() {
            extend_jet(&sub, settings)?
        } else {
            ExtensionResult {
                f: FuncExpr::zero(),
                target: Jet::flat(problem.n, problem.m, Vec::new())?,
                log: Vec::new(),
                zones: Vec::new(),
                seams: Vec::new(),
                settings: *settings,
                report: None,
            }
        };
        pieces.push((k, res));
    }
    glue_local(&pieces, settings)
}
