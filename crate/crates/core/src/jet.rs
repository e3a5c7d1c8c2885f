//! `m`-jets on finite point sets: Taylor polynomials, remainders, Whitney
//! constants, and the truncated jet algebra.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::calculus::FuncExpr;
use crate::error::{domain, input, Error, Result};
use crate::modulus::Modulus;
use crate::multiindex::{indices_up_to, MultiIndex};
use crate::poly::Poly;
use crate::series::{space, Series};

/// Two sample points closer than this (relative) are the same point.
pub const POINT_TOL: f64 = 1e-12;

/// An `m`-jet: a value `F^alpha(x)` for every `|alpha| <= m` and sample `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    n: usize,
    m: usize,
    idx: Vec<MultiIndex>,
    points: Vec<Vec<f64>>,
    /// `values[point][k]` is the field of `idx[k]`.
    values: Vec<Vec<f64>>,
}

pub fn same_point(a: &[f64], b: &[f64]) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |s, v| s.max(v.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= POINT_TOL * scale)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Jet {
    /// Builds a jet from per-point value rows in graded-lex order.
    pub fn from_values(n: usize, m: usize, points: Vec<Vec<f64>>, values: Vec<Vec<f64>>) -> Result<Jet> {
        let idx = indices_up_to(n, m);
        if points.len() != values.len() {
            return input(format!("{} points but {} value rows", points.len(), values.len()));
        }
        for (i, (p, v)) in points.iter().zip(&values).enumerate() {
            if p.len() != n {
                return input(format!("point {i} has dimension {}, expected {n}", p.len()));
            }
            if v.len() != idx.len() {
                return input(format!("point {i} has {} fields, expected {}", v.len(), idx.len()));
            }
            if p.iter().chain(v).any(|x| !x.is_finite()) {
                return input(format!("point {i} has non-finite data"));
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if same_point(&points[i], &points[j]) {
                    return input(format!("duplicate sample point {:?}", points[i]));
                }
            }
        }
        Ok(Jet { n, m, idx, points, values })
    }

    /// Builds a jet from a field map; every `|alpha| <= m` must be present.
    pub fn from_fields(
        n: usize,
        m: usize,
        points: Vec<Vec<f64>>,
        fields: &BTreeMap<MultiIndex, Vec<f64>>,
    ) -> Result<Jet> {
        let idx = indices_up_to(n, m);
        for k in fields.keys() {
            if k.dim() != n || k.order() > m {
                return input(format!("field {k} does not belong to a {m}-jet in {n} variables"));
            }
        }
        let mut values = vec![Vec::with_capacity(idx.len()); points.len()];
        for a in &idx {
            let col = fields.get(a).ok_or_else(|| Error::Input(format!("missing field {a}")))?;
            if col.len() != points.len() {
                return input(format!("field {a} has {} values for {} points", col.len(), points.len()));
            }
            for (row, v) in values.iter_mut().zip(col) {
                row.push(*v);
            }
        }
        Jet::from_values(n, m, points, values)
    }

    pub fn flat(n: usize, m: usize, points: Vec<Vec<f64>>) -> Result<Jet> {
        let len = indices_up_to(n, m).len();
        let values = vec![vec![0.0; len]; points.len()];
        Jet::from_values(n, m, points, values)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.idx
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn field_position(&self, a: &MultiIndex) -> Option<usize> {
        self.idx.iter().position(|b| b == a)
    }

    /// `F^alpha` at point `i`.
    pub fn get(&self, i: usize, a: &MultiIndex) -> f64 {
        self.field_position(a).map(|k| self.values[i][k]).unwrap_or(0.0)
    }

    pub fn find_point(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| same_point(p, x))
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(&self.points[i], &self.points[j])
    }

    pub fn is_flat_at(&self, i: usize) -> bool {
        self.values[i].iter().all(|v| *v == 0.0)
    }

    pub fn is_flat(&self) -> bool {
        (0..self.len()).all(|i| self.is_flat_at(i))
    }

    pub fn fields(&self) -> BTreeMap<MultiIndex, Vec<f64>> {
        self.idx
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), self.values.iter().map(|r| r[k]).collect()))
            .collect()
    }

    /// The jet at point `i` as a truncated series in the displacement.
    pub fn series_at(&self, i: usize) -> Series {
        Series::from_derivatives(&space(self.n, self.m), &self.values[i])
    }

    /// `d^alpha (T_x F)(y)` for `x = points[xi]`, summed over `beta >= alpha`
    /// in graded-lex order.
    pub fn taylor_deriv_at(&self, xi: usize, alpha: &MultiIndex, y: &[f64]) -> f64 {
        let x = &self.points[xi];
        let mut s = 0.0;
        for (k, beta) in self.idx.iter().enumerate() {
            if let Some(g) = beta.checked_sub(alpha) {
                let mut term = self.values[xi][k] / g.factorial();
                for (j, &gj) in g.0.iter().enumerate() {
                    term *= (y[j] - x[j]).powi(gj as i32);
                }
                s += term;
            }
        }
        s
    }

    /// `(R_x F)^alpha(y)` for all `alpha`, with `x = points[xi]`, `y = points[yi]`.
    pub fn remainder_at(&self, xi: usize, yi: usize) -> Vec<f64> {
        let y = &self.points[yi];
        self.idx
            .iter()
            .enumerate()
            .map(|(k, a)| self.values[yi][k] - self.taylor_deriv_at(xi, a, y))
            .collect()
    }

    /// Restriction to a subset of point indices.
    pub fn subset(&self, keep: &[usize]) -> Jet {
        Jet {
            n: self.n,
            m: self.m,
            idx: self.idx.clone(),
            points: keep.iter().map(|&i| self.points[i].clone()).collect(),
            values: keep.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }

    /// Pointwise difference of two jets on the same points.
    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        check_same_support(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Jet { values, ..self.clone() })
    }
}

/// The Taylor polynomial `T^m_a F`, stored as coefficients in `x - a`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPoly {
    pub base: Vec<f64>,
    pub m: usize,
    /// Coefficient of `(x - a)^alpha` is `F^alpha(a) / alpha!`.
    pub centered: Poly,
}

impl TaylorPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let h: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        self.centered.eval(&h)
    }

    pub fn deriv(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        let h: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        self.centered.eval_deriv(alpha, &h)
    }

    /// The same polynomial in absolute coordinates.
    pub fn to_poly(&self) -> Poly {
        let neg: Vec<f64> = self.base.iter().map(|b| -b).collect();
        self.centered.recenter(&neg)
    }
}

pub fn taylor(f: &Jet, a: &[f64]) -> Result<TaylorPoly> {
    let i = f
        .find_point(a)
        .ok_or_else(|| Error::Input(format!("point {a:?} is not a sample of the jet")))?;
    Ok(taylor_at(f, i))
}

pub fn taylor_at(f: &Jet, i: usize) -> TaylorPoly {
    let terms = f
        .idx
        .iter()
        .zip(&f.values[i])
        .map(|(a, v)| (a.clone(), v / a.factorial()));
    TaylorPoly {
        base: f.points[i].clone(),
        m: f.m,
        centered: Poly::from_terms(f.n, terms).expect("indices match arity"),
    }
}

/// `(R^m_x F)^alpha(y)` for all `alpha` in graded-lex order.
pub fn remainder(f: &Jet, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let xi = f
        .find_point(x)
        .ok_or_else(|| Error::Input(format!("point {x:?} is not a sample of the jet")))?;
    let yi = f
        .find_point(y)
        .ok_or_else(|| Error::Input(format!("point {y:?} is not a sample of the jet")))?;
    Ok(f.remainder_at(xi, yi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WhitneyReport {
    /// `max |F^alpha(x)|`.
    pub sup_norm: f64,
    /// `max |(R_x F)^alpha(y)| / (omega(|x-y|) |x-y|^{m-|alpha|})` over ordered pairs.
    pub holder_constant: f64,
    /// `(x index, y index, alpha)` realizing `holder_constant`.
    pub worst: Option<(usize, usize, MultiIndex)>,
    pub pairs_checked: usize,
}

impl WhitneyReport {
    pub fn total(&self) -> f64 {
        self.sup_norm + self.holder_constant
    }
}

/// Exhaustive Whitney constants over all ordered pairs.
pub fn whitney_constant(f: &Jet, omega: &Modulus) -> WhitneyReport {
    whitney_constant_within(f, omega, None)
}

/// As [`whitney_constant`], optionally ignoring pairs farther apart than `radius`.
pub fn whitney_constant_within(f: &Jet, omega: &Modulus, radius: Option<f64>) -> WhitneyReport {
    let sup_norm = f.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut best = 0.0f64;
    let mut worst = None;
    let mut pairs = 0;
    for xi in 0..f.len() {
        for yi in 0..f.len() {
            if xi == yi {
                continue;
            }
            let d = f.distance(xi, yi);
            if radius.is_some_and(|r| d > r) {
                continue;
            }
            pairs += 1;
            let w = omega.eval(d);
            let y = &f.points[yi];
            for (k, a) in f.idx.iter().enumerate() {
                let r = f.values[yi][k] - f.taylor_deriv_at(xi, a, y);
                let q = r.abs() / (w * d.powi((f.m - a.order()) as i32));
                if q > best {
                    best = q;
                    worst = Some((xi, yi, a.clone()));
                }
            }
        }
    }
    WhitneyReport { sup_norm, holder_constant: best, worst, pairs_checked: pairs }
}

fn check_same_support(f: &Jet, g: &Jet) -> Result<()> {
    if f.n != g.n || f.m != g.m {
        return input(format!("jets differ in shape: (n={},m={}) vs (n={},m={})", f.n, f.m, g.n, g.m));
    }
    if f.len() != g.len() || f.points.iter().zip(&g.points).any(|(a, b)| !same_point(a, b)) {
        return input("jets live on different point sets");
    }
    Ok(())
}

/// `FG := J(T F * T G)` truncated at order `m`, pointwise.
pub fn jet_mul(f: &Jet, g: &Jet) -> Result<Jet> {
    check_same_support(f, g)?;
    let values = (0..f.len())
        .map(|i| f.series_at(i).mul(&g.series_at(i)).derivatives())
        .collect();
    Ok(Jet { values, ..f.clone() })
}

/// `F o G` for `F` on `E` in `R^n` and `G = (G_1..G_n)` on a common set `A`
/// in `R^k`: at each `y` in `A`, the truncation of
/// `T_{G^0(y)} F (T_y G)`. Every image point `G^0(y)` must be a sample of `F`.
pub fn jet_compose(f: &Jet, g: &[Jet]) -> Result<Jet> {
    if g.len() != f.n {
        return input(format!("outer jet has {} variables but {} inner jets were given", f.n, g.len()));
    }
    let g0 = &g[0];
    for gi in g {
        check_same_support(g0, gi)?;
    }
    if f.m != g0.m {
        return input(format!("outer order {} differs from inner order {}", f.m, g0.m));
    }
    let zero = MultiIndex::zero(g0.n);
    let mut missing = Vec::new();
    let mut values = Vec::with_capacity(g0.len());
    for y in 0..g0.len() {
        let b: Vec<f64> = g.iter().map(|gi| gi.get(y, &zero)).collect();
        match f.find_point(&b) {
            None => missing.push(format!("{b:?}")),
            Some(bi) => {
                let inner: Vec<Series> = g.iter().map(|gi| gi.series_at(y)).collect();
                values.push(f.series_at(bi).compose(&inner).derivatives());
            }
        }
    }
    if !missing.is_empty() {
        return domain(format!("image points not sampled by the outer jet: {}", missing.join(", ")));
    }
    Jet::from_values(g0.n, g0.m, g0.points.clone(), values)
}

/// `J^m_E f`: the exact jet of an expression at the sample points.
pub fn jet_from_function(f: &FuncExpr, points: &[Vec<f64>], m: usize) -> Result<Jet> {
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    let values = points
        .iter()
        .map(|x| f.jet_at(x, m))
        .collect::<Result<Vec<_>>>()?;
    Jet::from_values(n, m, points.to_vec(), values)
}

/// Pullback along `phi_+(u, w) = (u, w + phi(u))`, where `phi` has one
/// polynomial per `w` coordinate in the `u` variables. The result lives on
/// `phi_-(M)`, the preimage of the sample set of `F`.
pub fn pullback(f: &Jet, phi: &[Poly]) -> Result<Jet> {
    let n = f.n;
    let l = phi.len();
    if l == 0 || l >= n {
        return input(format!("graph map with {l} components does not fit ambient dimension {n}"));
    }
    let k = n - l;
    if phi.iter().any(|p| p.nvars() != k) {
        return input(format!("graph map components must be polynomials in {k} variables"));
    }
    let sp = space(n, f.m);
    let lifted: Vec<Arc<Poly>> = phi.iter().map(|p| Arc::new(p.embed(n, 0))).collect();
    let mut points = Vec::with_capacity(f.len());
    let mut values = Vec::with_capacity(f.len());
    for i in 0..f.len() {
        let x = &f.points[i];
        let u = &x[..k];
        let pre: Vec<f64> = (0..n)
            .map(|j| if j < k { x[j] } else { x[j] - phi[j - k].eval(u) })
            .collect();
        let vars = Series::variables(&sp, &pre);
        let map: Vec<Series> = (0..n)
            .map(|j| {
                if j < k {
                    vars[j].clone()
                } else {
                    vars[j].add(&poly_series(&lifted[j - k], &vars))
                }
            })
            .collect();
        values.push(f.series_at(i).compose(&map).derivatives());
        points.push(pre);
    }
    Jet::from_values(n, f.m, points, values)
}

/// A polynomial evaluated on series inputs.
pub fn poly_series(p: &Poly, inputs: &[Series]) -> Series {
    let sp = inputs[0].space().clone();
    let mut out = Series::zero(&sp);
    let mut cache: Vec<Vec<Series>> = inputs.iter().map(|s| vec![Series::constant(&sp, 1.0), s.clone()]).collect();
    for (a, c) in p.terms() {
        let mut t = Series::constant(&sp, c);
        for (i, &ai) in a.0.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            while cache[i].len() <= ai {
                let next = cache[i].last().unwrap().mul(&inputs[i]);
                cache[i].push(next);
            }
            t = t.mul(&cache[i][ai]);
        }
        out = out.add(&t);
    }
    out
}

/// Extends `F` by flat fields on `extra` and reports the Whitney constants
/// of the union. Extra points that coincide with samples of `F` are allowed
/// only where `F` is already flat.
pub fn zero_extend_flat(f: &Jet, extra: &[Vec<f64>], omega: &Modulus) -> Result<(Jet, WhitneyReport)> {
    let mut points = f.points.clone();
    let mut values = f.values.clone();
    for x in extra {
        if x.len() != f.n {
            return input(format!("extra point {x:?} has the wrong dimension"));
        }
        match f.find_point(x) {
            Some(i) if !f.is_flat_at(i) => {
                return input(format!("extra point {x:?} overlaps a sample with nonzero jet"));
            }
            Some(_) => {}
            None => {
                if points.iter().any(|p| same_point(p, x)) {
                    continue;
                }
                points.push(x.clone());
                values.push(vec![0.0; f.idx.len()]);
            }
        }
    }
    let union = Jet::from_values(f.n, f.m, points, values)?;
    let report = whitney_constant(&union, omega);
    Ok((union, report))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JetRepr {
    n: usize,
    m: usize,
    points: Vec<Vec<f64>>,
    fields: BTreeMap<String, Vec<f64>>,
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        // Field keys in graded-lex order.
        struct Fields<'a>(&'a Jet);
        impl Serialize for Fields<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeMap;
                let j = self.0;
                let mut map = s.serialize_map(Some(j.idx.len()))?;
                for (k, a) in j.idx.iter().enumerate() {
                    let col: Vec<f64> = j.values.iter().map(|r| r[k]).collect();
                    map.serialize_entry(&a.to_string(), &col)?;
                }
                map.end()
            }
        }
        let mut st = s.serialize_struct("Jet", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("points", &self.points)?;
        st.serialize_field("fields", &Fields(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Jet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = JetRepr::deserialize(d)?;
        let mut fields = BTreeMap::new();
        for (k, v) in r.fields {
            let a = MultiIndex::parse(&k).map_err(serde::de::Error::custom)?;
            fields.insert(a, v);
        }
        Jet::from_fields(r.n, r.m, r.points, &fields).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    fn t_squared() -> Jet {
        Jet::from_values(1, 1, vec![vec![0.0], vec![1.0]], vec![vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap()
    }

    #[test]
    fn taylor_examples() {
        let f = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![1.0, 2.0]]).unwrap();
        let t = taylor(&f, &[0.0]).unwrap();
        assert_eq!(t.to_poly(), Poly::univariate(&[1.0, 2.0]));
        let g = Jet::from_values(1, 2, vec![vec![0.0]], vec![vec![0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(taylor(&g, &[0.0]).unwrap().to_poly(), Poly::univariate(&[0.0, 0.0, 1.0]));
        assert!(taylor(&g, &[1.0]).is_err());
    }

    #[test]
    fn remainder_examples() {
        let f = t_squared();
        assert_eq!(remainder(&f, &[0.0], &[1.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(remainder(&f, &[1.0], &[1.0]).unwrap(), vec![0.0, 0.0]);
        assert!(remainder(&f, &[0.5], &[1.0]).is_err());
    }

    #[test]
    fn whitney_examples() {
        let r = whitney_constant(&t_squared(), &Modulus::Linear);
        assert_eq!(r.holder_constant, 2.0);
        assert_eq!(r.worst.as_ref().unwrap().2, mi(&[1]));
        let one = Jet::from_values(1, 0, vec![vec![0.0]], vec![vec![5.0]]).unwrap();
        let r = whitney_constant(&one, &Modulus::Linear);
        assert_eq!((r.sup_norm, r.holder_constant), (5.0, 0.0));
        let flat = Jet::flat(2, 1, vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let r = whitney_constant(&flat, &Modulus::Linear);
        assert_eq!((r.sup_norm, r.holder_constant), (0.0, 0.0));
        let far = whitney_constant_within(&t_squared(), &Modulus::Linear, Some(0.5));
        assert_eq!((far.pairs_checked, far.holder_constant), (0, 0.0));
    }

    #[test]
    fn algebra_examples() {
        let f = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![1.0, 2.0]]).unwrap();
        let g = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![3.0, 4.0]]).unwrap();
        assert_eq!(jet_mul(&f, &g).unwrap().values(0), &[3.0, 10.0]);
        let h = Jet::from_values(1, 1, vec![vec![1.0]], vec![vec![3.0, 4.0]]).unwrap();
        assert!(jet_mul(&f, &h).is_err());

        let outer = Jet::from_values(1, 1, vec![vec![2.0]], vec![vec![5.0, 3.0]]).unwrap();
        let inner = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![2.0, 4.0]]).unwrap();
        assert_eq!(jet_compose(&outer, &[inner]).unwrap().values(0), &[5.0, 12.0]);
        let bad = Jet::from_values(1, 1, vec![vec![0.0]], vec![vec![7.0, 4.0]]).unwrap();
        match jet_compose(&outer, &[bad]) {
            Err(Error::Domain(msg)) => assert!(msg.contains("7.0")),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn pullback_of_vertical_coordinate() {
        // f(u,w) = w on the graph of u^2: pullback at (u,0) is u^2 + w.
        let pts: Vec<Vec<f64>> = [0.0, 0.5, 2.0].iter().map(|&u| vec![u, u * u]).collect();
        let vals: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[1], 0.0, 1.0]).collect();
        let f = Jet::from_values(2, 1, pts, vals).unwrap();
        let phi = Poly::from_terms(1, [(mi(&[2]), 1.0)]).unwrap();
        let g = pullback(&f, &[phi]).unwrap();
        for (i, &u) in [0.0, 0.5, 2.0].iter().enumerate() {
            assert_eq!(g.points()[i], vec![u, 0.0]);
            assert_eq!(g.values(i), &[u * u, 2.0 * u, 1.0]);
        }
    }

    #[test]
    fn zero_extension() {
        let f = Jet::from_values(1, 0, vec![vec![0.0]], vec![vec![1.0]]).unwrap();
        let (u, r) = zero_extend_flat(&f, &[vec![2.0]], &Modulus::Linear).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(r.holder_constant, 0.5);
        let (same, _) = zero_extend_flat(&f, &[], &Modulus::Linear).unwrap();
        assert_eq!(same, f);
        assert!(zero_extend_flat(&f, &[vec![0.0]], &Modulus::Linear).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = t_squared();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"n":1,"m":1,"points":[[0.0],[1.0]],"fields":{"(0)":[0.0,1.0],"(1)":[0.0,2.0]}}"#);
        let back: Jet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let missing = r#"{"n":1,"m":1,"points":[[0.0]],"fields":{"(0)":[0.0]}}"#;
        assert!(serde_json::from_str::<Jet>(missing).is_err());
    }
}
