use proptest::prelude::*;

use whitney_core::calculus::{BumpSpec, FuncExpr};
use whitney_core::extend::*;
use whitney_core::jet::{dist, jet_compose, jet_from_function, jet_mul, taylor_at, whitney_constant, Jet};
use whitney_core::modulus::{least_concave_majorant, modulus_for_cm, Modulus};
use whitney_core::multiindex::indices_up_to;
use whitney_core::poly::Poly;
use whitney_core::shvartsman::{chain_distances, delta_omega, field_from_jet};

fn poly(n: usize, deg: usize, coeffs: &[f64]) -> Poly {
    Poly::from_terms(n, indices_up_to(n, deg).into_iter().zip(coeffs.iter().cycle().copied())).unwrap()
}

fn points(n: usize, flat: &[f64]) -> Vec<Vec<f64>> {
    separated(n, flat, 1e-3)
}

fn separated(n: usize, flat: &[f64], gap: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in flat.chunks_exact(n) {
        if out.iter().all(|p| dist(p, c) > gap) {
            out.push(c.to_vec());
        }
    }
    out
}

fn modulus(kind: u8, a: f64, pl: &[(f64, f64)]) -> Modulus {
    match kind % 3 {
        0 => Modulus::Linear,
        1 => Modulus::holder(a).unwrap(),
        _ => {
            // increasing abscissae with decreasing positive slopes
            let mut t = 0.0;
            let mut v = 0.0;
            let mut slope = 2.0;
            let mut pts = Vec::new();
            for &(dt, shrink) in pl {
                slope *= shrink;
                t += dt;
                v += slope * dt;
                pts.push([t, v]);
            }
            Modulus::pl(pts, kind % 2 == 0).unwrap()
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn moduli_are_monotone_and_concave(
        kind in 0u8..6,
        a in 0.05f64..1.0,
        pl in prop::collection::vec((0.05f64..2.0, 0.3f64..1.0), 1..6),
        s in 1e-3f64..10.0,
        k in 1.0f64..20.0,
    ) {
        let w = modulus(kind, a, &pl);
        let t = s * k;
        prop_assert!(w.eval(s) <= w.eval(t) * (1.0 + 1e-12));
        prop_assert!(w.eval(t) / t <= w.eval(s) / s * (1.0 + 1e-12));
        prop_assert_eq!(w.eval(0.0), 0.0);
    }

    #[test]
    fn majorant_dominates_and_touches_vertices(
        samples in prop::collection::vec((0.01f64..5.0, 0.0f64..3.0), 1..25),
    ) {
        prop_assume!(samples.iter().any(|s| s.1 > 0.0));
        let w = least_concave_majorant(&samples).unwrap();
        for &(t, v) in &samples {
            prop_assert!(w.eval(t) >= v - 1e-12);
        }
        if let Modulus::Pl { points, .. } = &w {
            for p in points {
                prop_assert!(samples.iter().any(|s| s.0 == p[0] && s.1 == p[1]));
            }
        }
    }

    #[test]
    fn cm_modulus_is_at_least_one_at_one(
        n in 1usize..3,
        m in 0usize..3,
        coeffs in prop::collection::vec(-5.0f64..5.0, 10),
        flat in prop::collection::vec(-3.0f64..3.0, 2..12),
    ) {
        let pts = points(n, &flat);
        prop_assume!(!pts.is_empty());
        let f = jet_from_function(&FuncExpr::poly(poly(n, m + 1, &coeffs)), &pts, m).unwrap();
        prop_assert!(modulus_for_cm(&f).unwrap().eval(1.0) >= 1.0);
    }

    #[test]
    fn taylor_reproduces_low_degree_polynomials(
        n in 1usize..4,
        m in 0usize..4,
        coeffs in prop::collection::vec(-2.0f64..2.0, 20),
        flat in prop::collection::vec(-1.0f64..1.0, 3..12),
        z in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let pts = points(n, &flat);
        prop_assume!(!pts.is_empty());
        let p = poly(n, m, &coeffs);
        let f = jet_from_function(&FuncExpr::poly(p.clone()), &pts, m).unwrap();
        for i in 0..f.len() {
            prop_assert!(rel(taylor_at(&f, i).eval(&z[..n]), p.eval(&z[..n])) <= 1e-11);
        }
    }

    #[test]
    fn taylor_difference_is_bounded_by_the_whitney_constant(
        n in 1usize..3,
        m in 0usize..3,
        coeffs in prop::collection::vec(-2.0f64..2.0, 15),
        flat in prop::collection::vec(-1.0f64..1.0, 4..10),
        z in prop::collection::vec(-2.0f64..2.0, 2),
        kind in 0u8..3,
    ) {
        let pts = points(n, &flat);
        prop_assume!(pts.len() >= 2);
        let w = modulus(kind, 0.5, &[(0.5, 0.8), (1.0, 0.5)]);
        let f = jet_from_function(&FuncExpr::poly(poly(n, m + 2, &coeffs)), &pts, m).unwrap();
        let h = whitney_constant(&f, &w).holder_constant;
        let z = &z[..n];
        let c = 2f64.powi(m as i32 + 1) * h;
        for i in 0..f.len() {
            for j in 0..f.len() {
                if i == j {
                    continue;
                }
                let (x, y) = (&f.points()[i], &f.points()[j]);
                let lhs = (taylor_at(&f, i).eval(z) - taylor_at(&f, j).eval(z)).abs();
                let rhs = c * w.eval(dist(x, y)) * (dist(z, x).powi(m as i32) + dist(z, y).powi(m as i32));
                prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12, "{} > {}", lhs, rhs);
            }
        }
    }

    #[test]
    fn jet_algebra_matches_polynomials(
        n in 1usize..4,
        m in 1usize..4,
        a in prop::collection::vec(-1.0f64..1.0, 10),
        b in prop::collection::vec(-1.0f64..1.0, 10),
        flat in prop::collection::vec(-1.0f64..1.0, 3..12),
    ) {
        let pts = points(n, &flat);
        prop_assume!(!pts.is_empty());
        let (p, q) = (poly(n, 2, &a), poly(n, 2, &b));
        let jp = jet_from_function(&FuncExpr::poly(p.clone()), &pts, m).unwrap();
        let jq = jet_from_function(&FuncExpr::poly(q.clone()), &pts, m).unwrap();
        let prod = jet_mul(&jp, &jq).unwrap();
        let want = jet_from_function(&FuncExpr::poly(p.mul(&q)), &pts, m).unwrap();
        for i in 0..prod.len() {
            for (x, y) in prod.values(i).iter().zip(want.values(i)) {
                prop_assert!(rel(*x, *y) <= 1e-12);
            }
        }
        // q o (p, ..., p) on the same base points
        let images: Vec<Vec<f64>> = pts.iter().map(|x| vec![p.eval(x); n]).collect();
        let outer = jet_from_function(&FuncExpr::poly(q.clone()), &images, m);
        if let Ok(outer) = outer {
            let inner = vec![jp.clone(); n];
            let comp = jet_compose(&outer, &inner).unwrap();
            let symbolic = q.compose(&vec![p.clone(); n]).unwrap();
            let want = jet_from_function(&FuncExpr::poly(symbolic), &pts, m).unwrap();
            for i in 0..comp.len() {
                for (x, y) in comp.values(i).iter().zip(want.values(i)) {
                    prop_assert!(rel(*x, *y) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn adding_a_point_of_the_same_polynomial_keeps_the_constant_zero(
        n in 1usize..3,
        m in 0usize..3,
        coeffs in prop::collection::vec(-2.0f64..2.0, 10),
        flat in prop::collection::vec(-1.0f64..1.0, 4..10),
    ) {
        // close pairs would amplify rounding by |x-y|^-(m+1)
        let pts = separated(n, &flat, 0.1);
        prop_assume!(pts.len() >= 2);
        let p = FuncExpr::poly(poly(n, m, &coeffs));
        let small = jet_from_function(&p, &pts[..pts.len() - 1], m).unwrap();
        let big = jet_from_function(&p, &pts, m).unwrap();
        let a = whitney_constant(&small, &Modulus::Linear).holder_constant;
        let b = whitney_constant(&big, &Modulus::Linear).holder_constant;
        // zero in exact arithmetic; what remains is rounding
        prop_assert!(a <= 1e-9 && b <= 1e-9, "{} {}", a, b);
    }

    #[test]
    fn shvartsman_distance_axioms(
        n in 1usize..3,
        m in 0usize..3,
        coeffs in prop::collection::vec(-2.0f64..2.0, 10),
        noise in prop::collection::vec(-0.5f64..0.5, 60),
        flat in prop::collection::vec(-1.5f64..1.5, 4..10),
        kind in 0u8..2,
    ) {
        let pts = points(n, &flat);
        prop_assume!(pts.len() >= 2);
        let w = modulus(kind, 0.5, &[]);
        let f = jet_from_function(&FuncExpr::poly(poly(n, m + 1, &coeffs)), &pts, m).unwrap();
        let width = f.values(0).len();
        let values = (0..f.len())
            .map(|i| f.values(i).iter().enumerate().map(|(k, v)| v + noise[(i * width + k) % noise.len()]).collect())
            .collect();
        let f = Jet::from_values(n, m, f.points().to_vec(), values).unwrap();
        let field = field_from_jet(&f);
        let d = chain_distances(&field, &w, m).unwrap();
        for a in 0..field.len() {
            prop_assert_eq!(delta_omega(&field[a], &field[a], &w, m).unwrap(), 0.0);
            for b in 0..field.len() {
                let ab = delta_omega(&field[a], &field[b], &w, m).unwrap();
                prop_assert_eq!(ab.to_bits(), delta_omega(&field[b], &field[a], &w, m).unwrap().to_bits());
                prop_assert!(d[a][b] <= ab);
                for c in 0..field.len() {
                    prop_assert!(d[a][c] <= d[a][b] + d[b][c]);
                }
            }
        }
    }

    #[test]
    fn bump_plateau_support_and_symmetry(
        p in 0usize..7,
        plateau in 0.05f64..0.95,
        t in -1.5f64..1.5,
    ) {
        let spec = BumpSpec::with_plateau(p, plateau).unwrap();
        let v = spec.eval(t);
        if t.abs() <= plateau {
            prop_assert_eq!(v, 1.0);
        } else if t.abs() >= 1.0 {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert_eq!(v, spec.eval(-t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shrinking_the_plateau_keeps_restriction_values(
        xs in prop::collection::vec(-2.0f64..2.0, 2..5),
        coeffs in prop::collection::vec(-2.0f64..2.0, 4),
        narrow in 0.1f64..0.5,
    ) {
        let pts = points(1, &xs);
        prop_assume!(pts.len() >= 2);
        let f = jet_from_function(&FuncExpr::poly(Poly::univariate(&coeffs)), &pts, 1).unwrap();
        let mut p = Problem::new(1, 1);
        p.jet = Some(f.clone());
        let wide = extend_jet(&p, &p.settings().unwrap()).unwrap();
        p.plateau = Some(narrow);
        let tight = extend_jet(&p, &p.settings().unwrap()).unwrap();
        for x in f.points() {
            let a = wide.f.jet_at(x, 1).unwrap();
            let b = tight.f.jet_at(x, 1).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "{:?} vs {:?}", a, b);
            }
        }
    }

    #[test]
    fn point_extensions_restrict_and_stay_flat(
        xs in prop::collection::vec(-2.0f64..2.0, 2..6),
        coeffs in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        let pts = points(2, &xs);
        prop_assume!(!pts.is_empty());
        let f = jet_from_function(&FuncExpr::poly(poly(2, 3, &coeffs)), &pts, 1).unwrap();
        let mut p = Problem::new(2, 1);
        p.jet = Some(f);
        let mut res = extend_jet(&p, &p.settings().unwrap()).unwrap();
        let spec = res.default_probes(500, 3).unwrap();
        let rep = res.verify(&Modulus::Linear, &spec).unwrap();
        prop_assert!(rep.passes(1e-6), "{:?}", rep);
    }
}
