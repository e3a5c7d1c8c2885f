//! Moduli of continuity: evaluation, grid certification, and the
//! sigma -> tau -> least concave majorant pipeline for plain `C^m` jets.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::jet::Jet;

/// A modulus of continuity `omega`, with `omega(0) := 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Modulus {
    /// `t^alpha`, `0 < alpha <= 1`.
    Holder { alpha: f64 },
    /// `t`.
    Linear,
    /// Piecewise linear through the given samples. Below the first sample the
    /// graph is the segment from the origin; above the last one it continues
    /// with the last slope, or stays constant when `flat_tail` is set.
    Pl {
        points: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        flat_tail: bool,
    },
}

impl Modulus {
    pub fn holder(alpha: f64) -> Result<Modulus> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return input(format!("holder exponent must lie in (0,1], got {alpha}"));
        }
        Ok(Modulus::Holder { alpha })
    }

    /// A piecewise-linear modulus. Only the shape of the sample list is
    /// validated here; positivity, monotonicity and concavity are certified
    /// by [`check_modulus`].
    pub fn pl(points: Vec<[f64; 2]>, flat_tail: bool) -> Result<Modulus> {
        let m = Modulus::Pl { points, flat_tail };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Modulus::Holder { alpha } => Modulus::holder(*alpha).map(|_| ()),
            Modulus::Linear => Ok(()),
            Modulus::Pl { points, .. } => {
                if points.is_empty() {
                    return input("piecewise-linear modulus needs at least one sample");
                }
                if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                    return input("piecewise-linear modulus samples must be finite");
                }
                if points[0][0] <= 0.0 {
                    return input("piecewise-linear modulus abscissae must be positive");
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return input("piecewise-linear modulus abscissae must be strictly increasing");
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Modulus::Holder { alpha } => t.powf(*alpha),
            Modulus::Linear => t,
            Modulus::Pl { points, flat_tail } => {
                let (t0, v0) = (points[0][0], points[0][1]);
                if t <= t0 {
                    return v0 * t / t0;
                }
                for w in points.windows(2) {
                    let ([a, va], [b, vb]) = (w[0], w[1]);
                    if t <= b {
                        return va + (vb - va) * (t - a) / (b - a);
                    }
                }
                let [tl, vl] = points[points.len() - 1];
                if *flat_tail {
                    return vl;
                }
                let slope = if points.len() >= 2 {
                    let [tp, vp] = points[points.len() - 2];
                    (vl - vp) / (tl - tp)
                } else {
                    vl / tl
                };
                vl + slope * (t - tl)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Modulus::Holder { alpha } => format!("holder({alpha})"),
            Modulus::Linear => "linear".to_string(),
            Modulus::Pl { points, flat_tail } => {
                let pts: Vec<String> = points.iter().map(|p| format!("({},{})", p[0], p[1])).collect();
                format!("pl[{}]{}", pts.join(","), if *flat_tail { " flat-tail" } else { "" })
            }
        }
    }
}

/// Geometric grid with `per_decade` points per factor of ten on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = (decades * per_decade as f64).ceil() as usize + 1;
    (0..count)
        .map(|i| lo * 10f64.powf(decades * i as f64 / (count - 1) as f64))
        .collect()
}

/// Default certification grid: `2^-20 .. 2^4`, 64 points per decade.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(2f64.powi(-20), 16.0, 64)
}

/// Values of `omega(t_min)/omega(1)` above this are flagged as "not visibly
/// vanishing at 0". The flag is informational only.
pub const VANISHING_THRESHOLD: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusCertificate {
    pub pass: bool,
    /// First failing check, e.g. `"concavity at t=1"`.
    pub first_violation: Option<String>,
    pub grid_len: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    /// `omega(grid_min) / omega(1)`.
    pub vanishing_ratio: f64,
    pub vanishing_ok: bool,
}

/// Certifies positivity, monotonicity and concavity of `omega` on a sorted
/// grid of positive radii (consecutive triples).
pub fn check_modulus(omega: &Modulus, grid: &[f64]) -> Result<ModulusCertificate> {
    if grid.is_empty() {
        return input("certification grid is empty");
    }
    if grid.len() < 3 {
        return input(format!("certification grid needs at least 3 points, got {}", grid.len()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return input("certification grid must be positive and strictly increasing");
    }
    omega.validate()?;
    let vals: Vec<f64> = grid.iter().map(|&t| omega.eval(t)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 1e-12 * scale;
    // Scan in grid order so the reported violation is the leftmost one.
    let mut first = None;
    for i in 0..grid.len() {
        if !(vals[i] > 0.0) {
            first = Some(format!("positivity at t={}", grid[i]));
        } else if i >= 1 && vals[i] < vals[i - 1] - tol {
            first = Some(format!("monotonicity at t={}", grid[i]));
        } else if i >= 2 {
            let (a, b, c) = (grid[i - 2], grid[i - 1], grid[i]);
            let chord = vals[i - 2] + (vals[i] - vals[i - 2]) * (b - a) / (c - a);
            if vals[i - 1] < chord - tol {
                first = Some(format!("concavity at t={b}"));
            }
        }
        if first.is_some() {
            break;
        }
    }
    let one = omega.eval(1.0);
    let vanishing_ratio = if one > 0.0 { vals[0] / one } else { f64::INFINITY };
    Ok(ModulusCertificate {
        pass: first.is_none(),
        first_violation: first,
        grid_len: grid.len(),
        grid_min: grid[0],
        grid_max: grid[grid.len() - 1],
        vanishing_ratio,
        vanishing_ok: vanishing_ratio <= VANISHING_THRESHOLD,
    })
}

/// Nondecreasing step profile: the value at `t` is the largest breakpoint
/// value with abscissa `<= t`, and 0 before the first breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaProfile {
    pub breakpoints: Vec<(f64, f64)>,
}

impl SigmaProfile {
    pub fn eval(&self, t: f64) -> f64 {
        self.breakpoints
            .iter()
            .take_while(|(s, _)| *s <= t)
            .last()
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.breakpoints.last().map(|b| b.1).unwrap_or(0.0)
    }
}

/// The `C^m` Whitney quotient of one ordered pair:
/// `max_{|g|<=m} |(R_x F)^g(y)| / |x-y|^{m-|g|}`.
pub fn pair_quotient(f: &Jet, xi: usize, yi: usize) -> f64 {
    let d = f.distance(xi, yi);
    let r = f.remainder_at(xi, yi);
    f.indices()
        .iter()
        .zip(r)
        .map(|(a, v)| v.abs() / d.powi((f.order() - a.order()) as i32))
        .fold(0.0, f64::max)
}

/// `sigma(t) = max` of [`pair_quotient`] over ordered pairs with `|x-y| <= t`.
///
/// With an empty `grid` the exact step profile (one breakpoint per distinct
/// pair distance) is returned; otherwise the profile is sampled at the grid.
pub fn sigma_from_jet(f: &Jet, grid: &[f64]) -> SigmaProfile {
    let np = f.points().len();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(np * np.saturating_sub(1));
    for i in 0..np {
        for j in 0..np {
            if i != j {
                pairs.push((f.distance(i, j), pair_quotient(f, i, j)));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut exact: Vec<(f64, f64)> = Vec::new();
    let mut run = 0.0f64;
    for (d, q) in pairs {
        run = run.max(q);
        match exact.last_mut() {
            Some(last) if last.0 == d => last.1 = run,
            _ => exact.push((d, run)),
        }
    }
    let exact = SigmaProfile { breakpoints: exact };
    if grid.is_empty() {
        return exact;
    }
    SigmaProfile { breakpoints: grid.iter().map(|&t| (t, exact.eval(t))).collect() }
}

/// The least concave nondecreasing majorant of the samples, anchored at the
/// origin and constant beyond the sample with the largest value.
pub fn least_concave_majorant(samples: &[(f64, f64)]) -> Result<Modulus> {
    if samples.is_empty() {
        return input("least concave majorant of an empty sample list");
    }
    for &(t, v) in samples {
        if !t.is_finite() || !v.is_finite() || t < 0.0 || v < 0.0 {
            return input(format!("sample ({t},{v}) must be finite and nonnegative"));
        }
        if t == 0.0 && v > 0.0 {
            return input(format!("sample (0,{v}) contradicts omega(0) = 0"));
        }
    }
    let mut pts: Vec<(f64, f64)> = samples.to_vec();
    pts.push((0.0, 0.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        match merged.last_mut() {
            Some(last) if last.0 == p.0 => last.1 = last.1.max(p.1),
            _ => merged.push(p),
        }
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in merged {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let top = hull
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.1 > hull[best].1 { i } else { best });
    hull.truncate(top + 1);
    let points: Vec<[f64; 2]> = hull.into_iter().filter(|p| p.0 > 0.0).map(|p| [p.0, p.1]).collect();
    if points.is_empty() {
        return input("samples are identically zero; no positive majorant is minimal");
    }
    Modulus::pl(points, true)
}

/// `omega_a` for a plain `C^m` jet: the least concave majorant of
/// `tau(t) = sigma(t)` for `t < 1` and `max(1, sigma(t))` for `t >= 1`.
/// Guarantees `omega_a(1) >= 1`.
pub fn modulus_for_cm(f: &Jet) -> Result<Modulus> {
    let sigma = sigma_from_jet(f, &[]);
    let mut tau: Vec<(f64, f64)> = sigma
        .breakpoints
        .iter()
        .map(|&(d, s)| if d < 1.0 { (d, s) } else { (d, s.max(1.0)) })
        .collect();
    tau.push((1.0, sigma.eval(1.0).max(1.0)));
    least_concave_majorant(&tau)
}
