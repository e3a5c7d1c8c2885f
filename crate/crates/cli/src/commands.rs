//! One function per subcommand. Each returns a report; nothing here prints.

use whitney_core::calculus::{verify_gromov, FuncExpr, GROMOV_GRID};
use whitney_core::extend::probes::{DEFAULT_PROBES, DEFAULT_SEED};
use whitney_core::extend::{
    cm_extend, extend_family, extend_jet, glue_problem, ExtensionReport, ExtensionResult, FamilyMode, Problem,
    ProbeSpec, Settings, StepLog, FLAT_TOL, RESTRICTION_TOL, SEAM_STEP,
};
use whitney_core::jet::{whitney_constant, Jet};
use whitney_core::modulus::Modulus;
use whitney_core::shvartsman::{chain_distances, compare_norms, delta_omega, field_from_jet};
use whitney_core::Error;

use crate::input::{Construction, Options, ProblemFile, FORMAT_VERSION};
use crate::report::{Csv, Report};
use crate::{Common, Failure, Outcome};

/// Partition residuals above this fail the `glue` check.
const PARTITION_TOL: f64 = 1e-12;

pub struct Opts {
    pub probes: usize,
    pub seed: u64,
    pub plateau: Option<f64>,
    pub csv: bool,
}

impl Opts {
    pub fn new(c: &Common, file: Options) -> Result<Opts, Failure> {
        let probes = c.probes.or(file.probes).unwrap_or(DEFAULT_PROBES);
        if probes == 0 {
            return Err(Error::Input("--probes must be positive".into()).into());
        }
        Ok(Opts {
            probes,
            seed: c.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            plateau: c.plateau.or(file.plateau),
            csv: c.csv,
        })
    }

    fn apply(&self, p: &Problem) -> Problem {
        let mut p = p.clone();
        if let Some(w) = self.plateau {
            p.plateau = Some(w);
        }
        p
    }
}

fn settings_lines(r: &mut Report, s: &Settings) {
    r.kv("m", s.m);
    r.kv("p", s.p);
    r.kv("plateau", s.plateau);
    r.kv("cutoff", s.cutoff);
}

fn tolerance_lines(r: &mut Report) {
    r.kv("tolerance.restriction", RESTRICTION_TOL);
    r.kv("tolerance.flat", FLAT_TOL);
    r.kv("seam_step", SEAM_STEP);
}

fn log_lines(r: &mut Report, log: &[StepLog]) {
    r.section("construction");
    r.kv("steps", log.len());
    for (i, s) in log.iter().enumerate() {
        let k = format!("step.{i}");
        r.kv(&format!("{k}.label"), &s.label);
        r.kv(&format!("{k}.kind"), format!("{:?}", s.kind).to_lowercase());
        r.kv(&format!("{k}.dim"), s.dim);
        r.opt(&format!("{k}.support_radius"), s.support_radius);
        r.kv(&format!("{k}.boundary_residual"), s.boundary_residual);
        r.opt(&format!("{k}.separation"), s.separation);
        r.opt(&format!("{k}.regularity_margin"), s.regularity_margin);
        for (j, p) in s.pieces.iter().enumerate() {
            r.kv(
                &format!("{k}.piece.{j}"),
                format!(
                    "{} case={:?} max_grad_r={} min_r={} steep_violations={}",
                    p.piece, p.case, p.max_grad_r, p.min_r, p.steep_violations
                )
                .to_lowercase(),
            );
        }
        for (j, n) in s.notes.iter().enumerate() {
            r.kv(&format!("{k}.note.{j}"), n);
        }
    }
}

fn verification_lines(r: &mut Report, rep: &ExtensionReport) {
    r.section("verification");
    r.kv("probes", rep.probes.describe());
    r.kv("probes_evaluated", rep.probes_evaluated);
    r.kv("probes_skipped", rep.probes_skipped);
    r.kv("jet_points", rep.jet_points);
    r.kv("restriction_max_error", rep.restriction_max_error);
    r.opt("restriction_worst", rep.restriction_worst.as_ref().map(|(i, a)| format!("point {i} field {a}")));
    r.kv("sup_derivatives", rep.sup_derivatives);
    r.kv("holder_seminorm", rep.holder_seminorm);
    r.kv("norm", rep.norm);
    r.kv("flatness_checked", rep.flatness_checked);
    r.kv("flatness_violations", rep.flatness_violations);
    r.kv("flatness_max", rep.flatness_max);
    r.kv("seam_points", rep.seam_points);
    r.kv("seam_residual", rep.seam_residual);
}

fn status(r: &mut Report, pass: bool) {
    r.kv("status", if pass { "pass" } else { "fail" });
}

fn probe_csv(f: &FuncExpr, spec: &ProbeSpec) -> Result<String, Failure> {
    let n = spec.dim();
    let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    header.push("f".into());
    let mut csv = Csv::new(&header);
    for (x, _) in spec.cloud()? {
        if let Ok(v) = f.eval(&x) {
            let mut row = x.clone();
            row.push(v);
            csv.row(&row);
        }
    }
    Ok(csv.text())
}

fn verified(res: &mut ExtensionResult, omega: &Modulus, o: &Opts) -> Result<(ProbeSpec, ExtensionReport), Failure> {
    let spec = res.default_probes(o.probes, o.seed)?;
    let rep = res.verify(omega, &spec)?.clone();
    Ok((spec, rep))
}

pub fn extend(file: &ProblemFile, o: &Opts) -> Result<Outcome, Failure> {
    let problem = o.apply(file.problem()?);
    let settings = problem.settings()?;
    let omega = problem.omega()?;
    let mut res = extend_jet(&problem, &settings)?;
    let (spec, rep) = verified(&mut res, &omega, o)?;
    let mut r = Report::new("extend");
    r.kv("label", problem.label());
    r.kv("n", problem.n);
    settings_lines(&mut r, &settings);
    r.kv("omega", omega.describe());
    tolerance_lines(&mut r);
    log_lines(&mut r, &res.log);
    r.kv("f.size", res.f.size());
    r.kv("f.zero", res.f.is_zero());
    verification_lines(&mut r, &rep);
    let pass = rep.passes(RESTRICTION_TOL);
    status(&mut r, pass);
    let saved = ProblemFile {
        version: FORMAT_VERSION,
        problem: Some(problem.clone()),
        construction: Some(Construction {
            f: res.f.clone(),
            target: res.target.clone(),
            zones: res.zones.clone(),
            seams: res.seams.clone(),
            settings,
            omega,
        }),
        options: Some(Options { probes: Some(o.probes), seed: Some(o.seed), plateau: o.plateau }),
        ..ProblemFile::default()
    };
    let json = serde_json::to_string_pretty(&saved).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(Outcome {
        report: r,
        pass,
        files: vec![("construction.json".into(), json), ("probes.csv".into(), probe_csv(&res.f, &spec)?)],
    })
}

pub fn verify(file: &ProblemFile, o: &Opts) -> Result<Outcome, Failure> {
    let c = file
        .construction
        .clone()
        .ok_or_else(|| Failure::Core(Error::Schema("verify needs a \"construction\" record".into())))?;
    c.omega.validate()?;
    let mut res = ExtensionResult {
        f: c.f,
        target: c.target,
        log: Vec::new(),
        zones: c.zones,
        seams: c.seams,
        settings: c.settings,
        report: None,
    };
    let (spec, rep) = verified(&mut res, &c.omega, o)?;
    let mut r = Report::new("verify");
    r.kv("n", res.target.dim());
    settings_lines(&mut r, &c.settings);
    r.kv("omega", c.omega.describe());
    tolerance_lines(&mut r);
    r.kv("f.size", res.f.size());
    verification_lines(&mut r, &rep);
    let pass = rep.passes(RESTRICTION_TOL);
    status(&mut r, pass);
    Ok(Outcome { report: r, pass, files: vec![("probes.csv".into(), probe_csv(&res.f, &spec)?)] })
}

pub fn gromov(file: &ProblemFile, _o: &Opts) -> Result<Outcome, Failure> {
    let f = file
        .function
        .as_ref()
        .ok_or_else(|| Failure::Core(Error::Schema("gromov needs a \"function\" record".into())))?;
    let m = file.m.ok_or_else(|| Failure::Core(Error::Schema("gromov needs \"m\"".into())))?;
    let t0 = file.t0.unwrap_or(0.0);
    let radius = file.r.unwrap_or(1.0);
    let grid = file.grid.unwrap_or(GROMOV_GRID);
    let omega = match &file.omega {
        Some(w) => {
            w.validate()?;
            Some(w.clone())
        }
        None => None,
    };
    let c = verify_gromov(f, t0, radius, m, omega.as_ref(), grid)?;
    let mut r = Report::new("gromov");
    r.kv("m", m);
    r.kv("t0", t0);
    r.kv("r", radius);
    r.kv("grid", format!("uniform {grid} points on [t0-r, t0+r]"));
    r.opt("omega", omega.as_ref().map(|w| w.describe()));
    r.kv("hypothesis", if c.hypothesis_holds { "holds" } else { "fails" });
    r.opt("failing_order", c.failing_order);
    r.kv("sup_f", c.sup_f);
    r.kv("bound", c.bound);
    r.opt("holder_constant", c.holder_constant);
    r.opt("bound_omega", c.bound_omega);
    r.kv("observed", c.observed);
    r.kv("margin", c.margin);
    r.kv("message", &c.message);
    status(&mut r, c.pass);
    let mut csv = Csv::new(&["t".into(), "f".into(), format!("d{m}f")]);
    for i in 0..grid {
        let t = t0 - radius + 2.0 * radius * i as f64 / (grid - 1) as f64;
        let d = f.jet_at(&[t], m)?;
        csv.row(&[t, d[0], d[m]]);
    }
    Ok(Outcome { report: r, pass: c.pass, files: vec![("grid.csv".into(), csv.text())] })
}

pub fn whitney(file: &ProblemFile, _o: &Opts) -> Result<Outcome, Failure> {
    let f = file.jet()?;
    let omega = file.omega()?;
    let w = whitney_constant(f, &omega);
    let mut r = Report::new("whitney");
    r.kv("n", f.dim());
    r.kv("m", f.order());
    r.kv("points", f.len());
    r.kv("omega", omega.describe());
    r.kv("pairs_checked", w.pairs_checked);
    r.kv("sup_norm", w.sup_norm);
    r.kv("holder_constant", w.holder_constant);
    r.kv("total", w.total());
    r.opt("worst", w.worst.as_ref().map(|(i, j, a)| format!("x={i} y={j} field {a}")));
    let pass = w.total().is_finite();
    status(&mut r, pass);
    Ok(Outcome { report: r, pass, files: Vec::new() })
}

pub fn cm(file: &ProblemFile, o: &Opts) -> Result<Outcome, Failure> {
    let problem = o.apply(file.problem()?);
    let settings = problem.settings()?;
    let res = cm_extend(&problem, o.probes, o.seed)?;
    let rep = res.result.report.clone().expect("cm_extend verifies");
    let mut r = Report::new("cm");
    r.kv("label", problem.label());
    r.kv("n", problem.n);
    settings_lines(&mut r, &settings);
    r.kv("omega", res.omega.describe());
    r.kv("omega_at_1", res.omega_at_1);
    r.kv("uniform_constant", res.uniform_constant);
    r.kv("sigma_max", res.sigma_max);
    tolerance_lines(&mut r);
    log_lines(&mut r, &res.result.log);
    verification_lines(&mut r, &rep);
    let pass = rep.passes(RESTRICTION_TOL);
    status(&mut r, pass);
    let csv = probe_csv(&res.result.f, &rep.probes)?;
    Ok(Outcome { report: r, pass, files: vec![("probes.csv".into(), csv)] })
}

fn mode_name(mode: FamilyMode) -> &'static str {
    match mode {
        FamilyMode::Fixed => "fixed",
        FamilyMode::PerMember => "per_member",
    }
}

pub fn family(file: &ProblemFile, o: &Opts, mode: Option<FamilyMode>) -> Result<Outcome, Failure> {
    let problems: Vec<Problem> = file
        .problems
        .as_ref()
        .ok_or_else(|| Failure::Core(Error::Schema("family needs a \"problems\" list".into())))?
        .iter()
        .map(|p| o.apply(p))
        .collect();
    let mode = mode.or(file.mode).unwrap_or(FamilyMode::Fixed);
    let fr = extend_family(&problems, mode, o.probes, o.seed);
    let mut r = Report::new("family");
    r.kv("mode", mode_name(mode));
    r.kv("members", fr.members.len());
    r.kv("probes", format!("count={} seed={} (box fitted per member)", fr.probes, fr.seed));
    tolerance_lines(&mut r);
    let mut csv = Csv::new(&["member", "norm", "restriction", "whitney_constant", "omega_at_1"].map(String::from));
    for (i, m) in fr.members.iter().enumerate() {
        let k = format!("member.{i}");
        r.kv(&format!("{k}.label"), &m.label);
        r.opt(&format!("{k}.norm"), m.norm);
        r.opt(&format!("{k}.restriction"), m.restriction);
        r.opt(&format!("{k}.whitney_constant"), m.whitney_constant);
        r.opt(&format!("{k}.omega_at_1"), m.omega_at_1);
        r.kv(&format!("{k}.passed"), m.passed);
        r.opt(&format!("{k}.error"), m.error.as_ref());
        let nan = f64::NAN;
        csv.row(&[
            i as f64,
            m.norm.unwrap_or(nan),
            m.restriction.unwrap_or(nan),
            m.whitney_constant.unwrap_or(nan),
            m.omega_at_1.unwrap_or(nan),
        ]);
    }
    r.section("summary");
    r.kv("sup_norm", fr.sup_norm);
    r.kv("min_norm", fr.min_norm);
    r.kv("ratio", fr.ratio);
    r.opt("worst_member", fr.worst_member);
    r.kv("failures", format!("{:?}", fr.failures));
    r.opt("uniform_constant", fr.uniform_constant);
    let pass = fr.failures.is_empty();
    status(&mut r, pass);
    Ok(Outcome { report: r, pass, files: vec![("members.csv".into(), csv.text())] })
}

pub fn shvartsman(file: &ProblemFile, _o: &Opts) -> Result<Outcome, Failure> {
    let f: &Jet = file.jet()?;
    let omega = file.omega()?;
    let midpoints = file.midpoints.unwrap_or(false);
    let m = f.order();
    let field = field_from_jet(f);
    let d = chain_distances(&field, &omega, m)?;
    let mut max_delta = 0.0f64;
    let mut shortened = 0usize;
    let mut csv = Csv::new(&["i", "j", "delta", "chain"].map(String::from));
    for i in 0..field.len() {
        for j in i + 1..field.len() {
            let dl = delta_omega(&field[i], &field[j], &omega, m)?;
            max_delta = max_delta.max(dl);
            if d[i][j] < dl {
                shortened += 1;
            }
            csv.row(&[i as f64, j as f64, dl, d[i][j]]);
        }
    }
    let c = compare_norms(f, &omega, midpoints)?;
    let mut r = Report::new("shvartsman");
    r.kv("n", f.dim());
    r.kv("m", m);
    r.kv("points", f.len());
    r.kv("omega", omega.describe());
    r.kv("candidates", c.lip.candidates);
    r.kv("midpoints", midpoints);
    r.kv("note", "chain distances route through the candidate set only and are upper bounds");
    r.kv("pairs", field.len() * field.len().saturating_sub(1) / 2);
    r.kv("max_delta", max_delta);
    r.kv("pairs_shortened_by_chain", shortened);
    r.kv("lip.sup_term", c.lip.sup_term);
    r.kv("lip.lambda", c.lip.lambda);
    r.kv("lip.norm", c.lip.norm);
    r.kv("lip.bisection_steps", c.lip.bisection_steps);
    r.kv("whitney_norm", c.whitney_norm);
    r.kv("lip_over_whitney", c.lip_over_whitney);
    r.kv("whitney_over_lip", c.whitney_over_lip);
    let pass = c.lip.norm.is_finite();
    status(&mut r, pass);
    Ok(Outcome { report: r, pass, files: vec![("pairs.csv".into(), csv.text())] })
}

pub fn glue(file: &ProblemFile, o: &Opts) -> Result<Outcome, Failure> {
    let problem = o.apply(file.problem()?);
    let settings = problem.settings()?;
    let g = glue_problem(&problem, &settings)?;
    let m = settings.m;
    let mut restriction = 0.0f64;
    for i in 0..g.target.len() {
        let got = g.f.jet_at(&g.target.points()[i], m)?;
        for (a, b) in got.iter().zip(g.target.values(i)) {
            restriction = restriction.max((a - b).abs());
        }
    }
    let n = problem.n;
    let reach = g.covered_radius;
    let spec = ProbeSpec { count: o.probes, seed: o.seed, lo: vec![-reach; n], hi: vec![reach; n], scales: 0 };
    let mut residual = 0.0f64;
    let mut checked = 0usize;
    for (x, _) in spec.cloud()? {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2.sqrt() < reach {
            residual = residual.max(g.partition_residual(&x)?);
            checked += 1;
        }
    }
    let mut r = Report::new("glue");
    r.kv("label", problem.label());
    r.kv("n", n);
    settings_lines(&mut r, &settings);
    r.kv("annuli", g.psi.len());
    r.kv("covered_radius", reach);
    r.kv("probes", spec.describe());
    r.kv("tolerance.restriction", RESTRICTION_TOL);
    r.kv("tolerance.partition", PARTITION_TOL);
    r.kv("jet_points", g.target.len());
    r.kv("restriction_max_error", restriction);
    r.kv("partition_checked", checked);
    r.kv("partition_residual", residual);
    let pass = restriction <= RESTRICTION_TOL && residual <= PARTITION_TOL;
    status(&mut r, pass);
    Ok(Outcome { report: r, pass, files: vec![("probes.csv".into(), probe_csv(&g.f, &spec)?)] })
}
