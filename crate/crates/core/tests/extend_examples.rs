use whitney_core::calculus::FuncExpr;
use whitney_core::cells::Cell;
use whitney_core::extend::*;
use whitney_core::jet::{jet_from_function, Jet};
use whitney_core::modulus::Modulus;
use whitney_core::multiindex::MultiIndex;
use whitney_core::poly::Poly;

fn mi(v: &[usize]) -> MultiIndex {
    MultiIndex(v.to_vec())
}

fn poly2(terms: &[(&[usize], f64)]) -> Poly {
    Poly::from_terms(2, terms.iter().map(|(a, c)| (mi(a), *c))).unwrap()
}

fn probes(r: &ExtensionResult, count: usize) -> ProbeSpec {
    r.default_probes(count, 7).unwrap()
}

#[test]
fn point_on_its_own() {
    let s = Settings::new(1);
    let f = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![1.0, 0.0]]).unwrap();
    let r = extend_point(&f, &[], &s).unwrap();
    assert_eq!(r.f.jet_at(&[0.0], 1).unwrap(), vec![1.0, 0.0]);
    assert_eq!(r.f.eval(&[0.3]).unwrap(), 1.0);
    assert_eq!(r.log[0].support_radius, Some(1.0));
}

#[test]
fn point_with_far_neighbour() {
    let s = Settings::new(1);
    let f = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![1.0, 0.0]]).unwrap();
    let r = extend_point(&f, &[vec![3.0]], &s).unwrap();
    assert_eq!(r.log[0].support_radius, Some(1.0));
    assert_eq!(r.f.eval(&[3.0]).unwrap(), 0.0);
    assert_eq!(r.f.eval(&[0.2]).unwrap(), 1.0);
    let near = extend_point(&f, &[vec![0.5]], &s).unwrap();
    assert_eq!(near.log[0].support_radius, Some(0.5));
    let tiny = extend_point(&f, &[vec![1e-9]], &s).unwrap();
    assert_eq!(tiny.log[0].support_radius, Some(1e-9));
}

#[test]
fn flat_point_gives_zero() {
    let s = Settings::new(2);
    let f = Jet::flat(2, 2, vec![vec![0.0, 0.0]]).unwrap();
    let r = extend_point(&f, &[], &s).unwrap();
    assert!(r.f.is_zero());
}

fn segment() -> Sheet {
    Sheet::from_cell(&Cell::interval(0.0, 1.0), 2).unwrap()
}

fn bell() -> FuncExpr {
    // u(1-u)
    FuncExpr::poly(poly2(&[(&[1, 0], 1.0), (&[2, 0], -1.0)]))
}

#[test]
fn flat_cell_restriction_and_support() {
    let s = Settings::new(0);
    let r = extend_flat_cell(&segment(), &bell(), &[], &FuncExpr::zero(), &s).unwrap();
    assert!((r.f.eval(&[0.5, 0.0]).unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(r.f.eval(&[0.5, 10.0]).unwrap(), 0.0);
    // rho = (1, u, 1-u) = 0.5 at u = 0.5; plateau 0.5 needs |w| <= 0.25 / sqrt(1)
    for w in [0.0, 0.1, -0.2, 0.25] {
        assert!((r.f.eval(&[0.5, w]).unwrap() - 0.25).abs() < 1e-15, "w = {w}");
    }
}

#[test]
fn obstacle_free_reproduces_flat_cell() {
    let s = Settings::new(1);
    let src = FuncExpr::poly(poly2(&[(&[2, 0], 1.0), (&[3, 0], -2.0), (&[4, 0], 1.0)]));
    let a = extend_flat_cell(&segment(), &src, &[], &FuncExpr::zero(), &s).unwrap();
    let b = extend_with_obstacle(&segment(), &src, &Obstacles::default(), &FuncExpr::zero(), &s).unwrap();
    for x in [[0.5, 0.0], [0.3, 0.05], [0.7, -0.1]] {
        assert_eq!(a.f.eval(&x).unwrap(), b.f.eval(&x).unwrap());
    }
}

#[test]
fn obstacle_line_above_segment() {
    let s = Settings::new(0);
    let line = Sheet::from_cell(&Cell::graph(vec![Poly::constant(1, 1.0)], Cell::interval(0.0, 1.0)), 2).unwrap();
    let obs = Obstacles { points: Vec::new(), sheets: vec![line] };
    let r = extend_with_obstacle(&segment(), &bell(), &obs, &FuncExpr::zero(), &s).unwrap();
    let plain = extend_flat_cell(&segment(), &bell(), &[], &FuncExpr::zero(), &s).unwrap();
    assert_eq!(r.log[0].pieces[0].case, ObstacleCase::Gentle);
    for u in [0.2, 0.5, 0.8] {
        for w in [1.0, 1.5, -1.0] {
            assert_eq!(r.f.eval(&[u, w]).unwrap(), 0.0);
        }
        for w in [0.0, 0.3, -0.5] {
            assert_eq!(r.f.eval(&[u, w]).unwrap(), plain.f.eval(&[u, w]).unwrap());
        }
    }
}

#[test]
fn obstacle_point_is_flat() {
    let s = Settings::new(1);
    let src = FuncExpr::poly(poly2(&[(&[2, 0], 1.0), (&[3, 0], -2.0), (&[4, 0], 1.0)]));
    let obs = Obstacles { points: vec![vec![0.5, 0.1]], sheets: Vec::new() };
    let r = extend_with_obstacle(&segment(), &src, &obs, &FuncExpr::zero(), &s).unwrap();
    let j = jet_from_function(&r.f, &[vec![0.5, 0.1]], 1).unwrap();
    assert!(j.values(0).iter().all(|v| *v == 0.0), "{:?}", j.values(0));
    let want = src.jet_at(&[0.3, 0.0], 1).unwrap();
    let got = r.f.jet_at(&[0.3, 0.0], 1).unwrap();
    for (a, b) in want.iter().zip(&got) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn graph_with_zero_map_matches_flat_path() {
    let s = Settings::new(1);
    let src = FuncExpr::poly(poly2(&[(&[2, 0], 1.0), (&[3, 0], -2.0), (&[4, 0], 1.0)]));
    let flat = extend_with_obstacle(&segment(), &src, &Obstacles::default(), &FuncExpr::zero(), &s).unwrap();
    let g = extend_graph(&segment(), &src, &Obstacles::default(), &FuncExpr::zero(), &s).unwrap();
    for x in [[0.5, 0.0], [0.3, 0.05], [0.7, -0.1]] {
        assert_eq!(flat.f.eval(&x).unwrap(), g.f.eval(&x).unwrap());
    }
}

fn parabola_sheet() -> Sheet {
    let cell = Cell::graph(vec![Poly::univariate(&[0.0, 0.0, 1.0])], Cell::interval(0.0, 1.0));
    Sheet::from_cell(&cell, 2).unwrap()
}

fn parabola_source() -> FuncExpr {
    // w u^2 (1-u)^2
    let b = Poly::univariate(&[0.0, 0.0, 1.0, -2.0, 1.0]).embed(2, 0);
    FuncExpr::poly(b.mul(&Poly::coord(2, 1)))
}

#[test]
fn graph_over_parabola_restricts() {
    let s = Settings::new(1);
    let mut r = extend_graph(&parabola_sheet(), &parabola_source(), &Obstacles::default(), &FuncExpr::zero(), &s).unwrap();
    let spec = probes(&r, 500);
    let rep = r.verify(&Modulus::Linear, &spec).unwrap();
    assert!(rep.restriction_max_error <= 1e-8, "{rep:?}");
    assert!(rep.is_finite());
    assert!(r.log[0].separation.unwrap() > 0.0);
}

#[test]
fn graph_with_extra_point_is_flat_there() {
    let s = Settings::new(1);
    let obs = Obstacles { points: vec![vec![0.5, 0.6]], sheets: Vec::new() };
    let r = extend_graph(&parabola_sheet(), &parabola_source(), &obs, &FuncExpr::zero(), &s).unwrap();
    let j = r.f.jet_at(&[0.5, 0.6], 1).unwrap();
    assert!(j.iter().all(|v| *v == 0.0), "{j:?}");
}

fn two_point_problem() -> Problem {
    let mut p = Problem::new(1, 1);
    p.omega = Some(Modulus::Linear);
    p.jet = Some(Jet::from_values(1, 1, vec![vec![0.0], vec![1.0]], vec![vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap());
    p
}

#[test]
fn driver_two_points_of_a_square() {
    let p = two_point_problem();
    let s = p.settings().unwrap();
    let mut r = extend_jet(&p, &s).unwrap();
    let spec = probes(&r, 2000);
    let rep = r.verify(&Modulus::Linear, &spec).unwrap().clone();
    assert!(rep.restriction_max_error <= 1e-8, "{rep:?}");
    assert!(rep.norm.is_finite());
    assert_eq!(rep.flatness_violations, 0);
}

#[test]
fn driver_segment_and_flat_point() {
    let mut p = Problem::new(2, 1);
    p.omega = Some(Modulus::holder(0.5).unwrap());
    p.strata.push(StratumSpec {
        cell: Cell::interval(0.0, 1.0),
        source: FuncExpr::poly(poly2(&[(&[2, 0], 1.0), (&[3, 0], -2.0), (&[4, 0], 1.0), (&[1, 1], 1.0)])),
        samples: None,
        constant: None,
        label: Some("segment".into()),
    });
    p.extra_points.push(vec![0.0, 2.0]);
    let s = p.settings().unwrap();
    let mut r = extend_jet(&p, &s).unwrap();
    let spec = probes(&r, 2000);
    let rep = r.verify(&Modulus::holder(0.5).unwrap(), &spec).unwrap().clone();
    assert!(rep.restriction_max_error <= 1e-6, "{rep:?}");
    assert_eq!(rep.flatness_violations, 0, "{rep:?}");
    assert!(r.f.jet_at(&[0.0, 2.0], 1).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn driver_open_box_zero_extension() {
    let mut p = Problem::new(2, 1);
    p.omega = Some(Modulus::Linear);
    // (x(1-x) y(1-y))^2 is flat to first order on the boundary of the unit square
    let q = poly2(&[(&[1, 0], 1.0), (&[2, 0], -1.0)]).mul(&poly2(&[(&[0, 1], 1.0), (&[0, 2], -1.0)]));
    p.strata.push(StratumSpec {
        cell: Cell::open_box(&[(0.0, 1.0), (0.0, 1.0)]),
        source: FuncExpr::poly(q.mul(&q)),
        samples: None,
        constant: None,
        label: None,
    });
    let s = p.settings().unwrap();
    let mut r = extend_jet(&p, &s).unwrap();
    let spec = probes(&r, 2000);
    let rep = r.verify(&Modulus::Linear, &spec).unwrap().clone();
    assert!(rep.restriction_max_error <= 1e-12, "{rep:?}");
    assert!(rep.norm.is_finite());
    // first derivatives vanish linearly at the seam, so the jump is O(step)
    assert!(rep.seam_residual <= 10.0 * SEAM_STEP, "{rep:?}");
}

#[test]
fn positive_dimension_needs_strata() {
    let mut p = Problem::new(2, 1);
    p.set_dim = Some(1);
    let e = extend_jet(&p, &p.settings().unwrap()).unwrap_err();
    assert!(e.to_string().contains("stratification required"), "{e}");
}

#[test]
fn verification_sees_a_perturbation() {
    let p = two_point_problem();
    let s = p.settings().unwrap();
    let r = extend_jet(&p, &s).unwrap();
    let bumped = FuncExpr::sum(vec![r.f.clone(), FuncExpr::coord(0).scale(1e-3)]);
    let spec = probes(&r, 200);
    let rep = verify_extension(&bumped, &r.target, &Modulus::Linear, None, &[], &spec).unwrap();
    assert!((rep.restriction_max_error - 1e-3).abs() < 1e-12, "{rep:?}");
}

#[test]
fn zero_against_flat_jet() {
    let f = Jet::flat(2, 1, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let spec = ProbeSpec::around(f.points(), 1.0, 300, 1).unwrap();
    let rep = verify_extension(&FuncExpr::zero(), &f, &Modulus::Linear, Some(&[]), &[], &spec).unwrap();
    assert_eq!((rep.restriction_max_error, rep.norm, rep.flatness_max), (0.0, 0.0, 0.0));
}
