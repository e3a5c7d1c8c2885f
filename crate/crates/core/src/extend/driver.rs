//! Dimension-ordered driver: isolated points first, then strata by
//! increasing dimension, each extending what the previous ones left over.

use crate::calculus::FuncExpr;
use crate::error::{input, precondition, Result};
use crate::jet::{same_point, Jet};

use super::construct::{extend_graph, extend_open_cell, point_piece, support_radius, Obstacles, Sheet};
use super::problem::Problem;
use super::verify::FlatZone;
use super::{ExtensionResult, Settings, StepKind, StepLog};

/// Relative tolerance for jets meeting at a shared point.
const CONSISTENCY_TOL: f64 = 1e-9;

struct PointStratum {
    x: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

struct Plan {
    sheets: Vec<(Sheet, usize)>,
    points: Vec<PointStratum>,
    extra_points: Vec<Vec<f64>>,
    extra_sheets: Vec<Sheet>,
}

fn add_point(points: &mut Vec<PointStratum>, x: Vec<f64>, values: Vec<f64>, label: String) -> Result<bool> {
    if let Some(p) = points.iter().find(|p| same_point(&p.x, &x)) {
        let scale = p.values.iter().chain(&values).fold(1.0f64, |s, v| s.max(v.abs()));
        let diff = p.values.iter().zip(&values).fold(0.0f64, |s, (a, b)| s.max((a - b).abs()));
        if diff > CONSISTENCY_TOL * scale {
            return input(format!("conflicting jets at shared point {x:?} ({} vs {label})", p.label));
        }
        return Ok(false);
    }
    points.push(PointStratum { x, values, label });
    Ok(true)
}

fn plan(problem: &Problem, settings: &Settings) -> Result<Plan> {
    let (n, m) = (problem.n, settings.m);
    if n == 0 {
        return input("ambient dimension must be positive");
    }
    if problem.m != m {
        return input(format!("settings order {m} differs from problem order {}", problem.m));
    }
    if problem.strata.is_empty() && problem.set_dim.unwrap_or(0) >= 1 {
        return input("stratification required: a set of positive dimension must be given as strata");
    }
    let mut sheets = Vec::new();
    for (i, s) in problem.strata.iter().enumerate() {
        let mut sheet = Sheet::from_cell(&s.cell, n)?;
        if let Some(k) = s.samples {
            sheet = sheet.with_samples(k);
        }
        sheets.push((sheet, i));
    }
    let mut points = Vec::new();
    for p in &problem.points {
        add_point(&mut points, p.x.clone(), p.values(n, m)?, format!("point {:?}", p.x))?;
    }
    if let Some(j) = &problem.jet {
        if j.dim() != n || j.order() != m {
            return input(format!("jet is an {}-jet in R^{}, problem wants {m} in R^{n}", j.order(), j.dim()));
        }
        for i in 0..j.len() {
            add_point(&mut points, j.points()[i].clone(), j.values(i).to_vec(), format!("sample {i}"))?;
        }
    }
    let mut extra_points: Vec<Vec<f64>> = Vec::new();
    for x in &problem.extra_points {
        if x.len() != n {
            return input(format!("extra point {x:?} does not lie in R^{n}"));
        }
        extra_points.push(x.clone());
    }
    let mut extra_sheets = Vec::new();
    for c in &problem.extra_graphs {
        let s = Sheet::from_cell(c, n)?;
        if s.ell() == 0 {
            return input("flat obstacles must have positive codimension");
        }
        if s.k() == 1 {
            extra_points.extend(s.samples_boundary());
        }
        extra_sheets.push(s);
    }
    for (sheet, i) in &sheets {
        if sheet.k() == 1 && sheet.ell() > 0 {
            let src = &problem.strata[*i].source;
            for x in sheet.samples_boundary() {
                let v = src.jet_at(&x, m)?;
                add_point(&mut points, x, v, format!("end of stratum {i}"))?;
            }
        }
    }
    // Split one-dimensional strata over the projections of every point.
    loop {
        let mut added = false;
        let us: Vec<f64> = points.iter().map(|p| p.x[0]).chain(extra_points.iter().map(|x| x[0])).collect();
        for (sheet, i) in &sheets {
            if sheet.k() != 1 || sheet.ell() == 0 {
                continue;
            }
            for &u in &us {
                if sheet.base.margin(&[u]) > 1e-12 {
                    let x = sheet.lift(&[u]);
                    if extra_points.iter().any(|e| same_point(e, &x)) {
                        continue;
                    }
                    let v = problem.strata[*i].source.jet_at(&x, m)?;
                    added |= add_point(&mut points, x, v, format!("split of stratum {i}"))?;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for x in extra_points {
        match points.iter().find(|p| same_point(&p.x, &x)) {
            Some(p) if p.values.iter().any(|v| *v != 0.0) => {
                return input(format!("flat point {x:?} carries a nonzero jet from {}", p.label));
            }
            Some(_) => {}
            None => {
                if !kept.iter().any(|k| same_point(k, &x)) {
                    kept.push(x);
                }
            }
        }
    }
    sheets.sort_by_key(|(s, _)| s.k());
    Ok(Plan { sheets, points, extra_points: kept, extra_sheets })
}

fn push_unique(pts: &mut Vec<Vec<f64>>, vals: &mut Vec<Vec<f64>>, x: Vec<f64>, v: Vec<f64>) {
    if !pts.iter().any(|p| same_point(p, &x)) {
        pts.push(x);
        vals.push(v);
    }
}

fn build_target(problem: &Problem, settings: &Settings, plan: &Plan) -> Result<Jet> {
    let (n, m) = (problem.n, settings.m);
    let mut pts = Vec::new();
    let mut vals = Vec::new();
    for p in &plan.points {
        push_unique(&mut pts, &mut vals, p.x.clone(), p.values.clone());
    }
    for (sheet, i) in &plan.sheets {
        let src = &problem.strata[*i].source;
        for x in sheet.samples_closure() {
            if pts.iter().any(|p| same_point(p, &x)) {
                continue;
            }
            let v = src.jet_at(&x, m)?;
            push_unique(&mut pts, &mut vals, x, v);
        }
    }
    let width = crate::multiindex::indices_up_to(n, m).len();
    for x in &plan.extra_points {
        push_unique(&mut pts, &mut vals, x.clone(), vec![0.0; width]);
    }
    for s in &plan.extra_sheets {
        for x in s.samples_closure() {
            push_unique(&mut pts, &mut vals, x, vec![0.0; width]);
        }
    }
    Jet::from_values(n, m, pts, vals)
}

/// The jet an extension of `problem` must restrict to: prescribed points,
/// stratum samples (including automatic end and split points), and flat
/// obstacle samples.
pub fn target_jet(problem: &Problem, settings: &Settings) -> Result<Jet> {
    settings.validate()?;
    let plan = plan(problem, settings)?;
    build_target(problem, settings, &plan)
}

/// Builds an extension of the problem's jet. Strata must be given in
/// adapted coordinates; the driver does not search for a stratification.
pub fn extend_jet(problem: &Problem, settings: &Settings) -> Result<ExtensionResult> {
    settings.validate()?;
    let plan = plan(problem, settings)?;
    let m = settings.m;
    let mut parts: Vec<FuncExpr> = Vec::new();
    let mut log = Vec::new();
    let mut zones = Vec::new();
    let mut seams = Vec::new();
    let current = |parts: &Vec<FuncExpr>| FuncExpr::sum(parts.clone());

    for (pi, p) in plan.points.iter().enumerate() {
        let mut others: Vec<Vec<f64>> = plan
            .points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != pi)
            .map(|(_, q)| q.x.clone())
            .collect();
        others.extend(plan.extra_points.iter().cloned());
        let mut d = support_radius(&p.x, &others)?;
        for s in &plan.extra_sheets {
            d = d.min(s.distance(&p.x));
        }
        if d <= crate::jet::POINT_TOL {
            return precondition(format!("point {:?} touches a flat obstacle", p.x));
        }
        let g = current(&parts);
        let have = g.jet_at(&p.x, m)?;
        let resid: Vec<f64> = p.values.iter().zip(&have).map(|(a, b)| a - b).collect();
        let piece = point_piece(&p.x, &resid, d, settings)?;
        let mut entry = StepLog::new(p.label.clone(), StepKind::Point, 0);
        entry.support_radius = Some(d);
        if piece.is_zero() {
            entry.notes.push("flat jet: no contribution".into());
        } else {
            parts.push(piece);
            zones.push(FlatZone::Ball { center: p.x.clone(), radius: d });
        }
        log.push(entry);
    }

    let mut done: Vec<Sheet> = Vec::new();
    for (sheet, i) in &plan.sheets {
        let spec = &problem.strata[*i];
        let g = current(&parts);
        let step = if sheet.ell() == 0 {
            extend_open_cell(sheet, &spec.source, &g, settings)?
        } else {
            let mut obstacles = Obstacles {
                points: plan.points.iter().map(|p| p.x.clone()).collect(),
                sheets: plan.extra_sheets.clone(),
            };
            obstacles.points.extend(plan.extra_points.iter().cloned());
            obstacles.sheets.extend(done.iter().cloned());
            extend_graph(sheet, &spec.source, &obstacles, &g, settings)?
        };
        let mut entry = step.log.into_iter().next().expect("one log entry per step");
        entry.label = spec.label.clone().unwrap_or_else(|| format!("stratum {i}"));
        if let (Some(c), Some(margin)) = (spec.constant, entry.regularity_margin) {
            if margin > c * (1.0 + 1e-12) {
                return precondition(format!(
                    "graph map of {} is not regular with the declared constant {c} (needs {margin})",
                    entry.label
                ));
            }
        }
        log.push(entry);
        if !step.f.is_zero() {
            parts.push(step.f);
        }
        zones.extend(step.zones);
        seams.extend(step.seams);
        done.push(sheet.clone());
    }

    Ok(ExtensionResult {
        f: FuncExpr::sum(parts),
        target: build_target(problem, settings, &plan)?,
        log,
        zones,
        seams,
        settings: *settings,
        report: None,
    })
}

