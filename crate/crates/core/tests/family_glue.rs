use whitney_core::calculus::FuncExpr;
use whitney_core::cells::Cell;
use whitney_core::extend::*;
use whitney_core::jet::Jet;
use whitney_core::modulus::Modulus;
use whitney_core::poly::Poly;

fn square_jet(points: &[f64]) -> Jet {
    let pts = points.iter().map(|&t| vec![t]).collect();
    let vals = points.iter().map(|&t| vec![t * t, 2.0 * t]).collect();
    Jet::from_values(1, 1, pts, vals).unwrap()
}

fn jet_problem(f: Jet, omega: Option<Modulus>) -> Problem {
    let mut p = Problem::new(f.dim(), f.order());
    p.omega = omega;
    p.jet = Some(f);
    p
}

#[test]
fn cm_two_point_square() {
    let p = jet_problem(square_jet(&[0.0, 1.0]), None);
    let r = cm_extend(&p, 1000, 1).unwrap();
    assert!(r.omega_at_1 >= 1.0);
    let rep = r.result.report.as_ref().unwrap();
    assert!(rep.passes(RESTRICTION_TOL), "{rep:?}");
}

#[test]
fn cm_flat_jet() {
    let p = jet_problem(Jet::flat(1, 1, vec![vec![0.0], vec![2.0]]).unwrap(), None);
    let r = cm_extend(&p, 500, 1).unwrap();
    assert!(r.result.f.is_zero());
    assert_eq!(r.omega.eval(1.0), 1.0);
    assert_eq!(r.omega.eval(5.0), 1.0);
    assert!(r.result.report.as_ref().unwrap().passes(RESTRICTION_TOL));
}

#[test]
fn cm_family_normalization() {
    let mut sigma_max = 0.0f64;
    let mut c = 0.0f64;
    for i in 0..7 {
        let a = 0.5 + 1.5 * i as f64 / 6.0;
        let r = cm_extend(&jet_problem(square_jet(&[0.0, a]), None), 500, 2).unwrap();
        sigma_max = sigma_max.max(r.sigma_max);
        c = c.max(r.uniform_constant);
        assert!(r.omega_at_1 >= 1.0);
    }
    assert!(c <= sigma_max.max(1.0), "C = {c}, max sigma = {sigma_max}");
}

fn segment_member(a: f64, scale: f64) -> Problem {
    let b = Poly::univariate(&[0.0, a, -1.0]);
    let mut p = Problem::new(2, 1);
    p.label = Some(format!("a={a}"));
    p.omega = Some(Modulus::holder(0.5).unwrap());
    p.strata.push(StratumSpec {
        cell: Cell::interval(0.0, a),
        source: FuncExpr::poly(b.mul(&b).embed(2, 0).scale(scale)),
        samples: None,
        constant: None,
        label: None,
    });
    p
}

#[test]
fn family_flags_the_corrupted_member() {
    let mut fam: Vec<Problem> = [0.5, 1.0, 2.0].iter().map(|&a| segment_member(a, 1.0)).collect();
    fam.push(segment_member(1.0, 1e3));
    let r = extend_family(&fam, FamilyMode::Fixed, 500, 3);
    assert_eq!(r.worst_member, Some(3));
    assert!(r.failures.is_empty(), "{r:?}");
    assert!(r.ratio > 100.0);
}

#[test]
fn flat_family_has_zero_norms() {
    let fam: Vec<Problem> = [0.5, 1.0].iter().map(|&a| segment_member(a, 0.0)).collect();
    let r = extend_family(&fam, FamilyMode::Fixed, 300, 3);
    assert_eq!(r.sup_norm, 0.0);
    assert!(r.members.iter().all(|m| m.norm == Some(0.0)));
}

#[test]
fn family_lists_failures_without_aborting() {
    let mut bad = segment_member(1.0, 1.0);
    bad.omega = None;
    let fam = vec![segment_member(0.5, 1.0), bad];
    let r = extend_family(&fam, FamilyMode::Fixed, 300, 3);
    assert_eq!(r.failures, vec![1]);
    assert!(r.members[1].error.is_some());
    assert!(r.members[0].passed);
}

fn piece(p: &Problem) -> ExtensionResult {
    extend_jet(p, &p.settings().unwrap()).unwrap()
}

#[test]
fn glue_identical_pieces() {
    let p = jet_problem(square_jet(&[0.0, 0.5]), Some(Modulus::Linear));
    let a = piece(&p);
    let s = p.settings().unwrap();
    let g = glue_local(&[(1, a.clone()), (2, a.clone()), (3, a.clone())], &s).unwrap();
    for t in [-0.7, -0.2, 0.0, 0.3, 0.5, 0.9, 1.4] {
        let want = a.f.eval(&[t]).unwrap();
        let got = g.f.eval(&[t]).unwrap();
        assert!((want - got).abs() <= 1e-15 * want.abs().max(1.0), "t = {t}: {want} vs {got}");
        assert!(g.partition_residual(&[t]).unwrap() <= 1e-15);
    }
}

#[test]
fn glue_rejects_gaps() {
    let p = jet_problem(square_jet(&[0.0]), Some(Modulus::Linear));
    let a = piece(&p);
    assert!(glue_local(&[(1, a.clone()), (3, a)], &p.settings().unwrap()).is_err());
}

#[test]
fn glue_preserves_jets_on_a_line() {
    let pts: Vec<f64> = (0..7).map(|i| i as f64 * 0.45).collect();
    let p = jet_problem(square_jet(&pts), Some(Modulus::Linear));
    let g = glue_problem(&p, &p.settings().unwrap()).unwrap();
    let f = g.target.clone();
    for i in 0..f.len() {
        let got = g.f.jet_at(&f.points()[i], 1).unwrap();
        for (a, b) in got.iter().zip(f.values(i)) {
            assert!((a - b).abs() <= 1e-8, "{:?}: {got:?} vs {:?}", f.points()[i], f.values(i));
        }
    }
}
