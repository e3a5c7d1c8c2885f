//! Seeded Halton probe clouds for sampled norm estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Box, size and seed of a probe cloud. Reports carry this record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub count: usize,
    pub seed: u64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Number of geometric pair scales for Hoelder quotients.
    pub scales: usize,
}

pub const DEFAULT_PROBES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_SCALES: usize = 12;

impl ProbeSpec {
    /// Bounding box of `points` enlarged by `margin` on every side.
    pub fn around(points: &[Vec<f64>], margin: f64, count: usize, seed: u64) -> Result<ProbeSpec> {
        let n = match points.first() {
            Some(p) => p.len(),
            None => return input("probe box needs at least one point"),
        };
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in points {
            for i in 0..n {
                lo[i] = lo[i].min(p[i] - margin);
                hi[i] = hi[i].max(p[i] + margin);
            }
        }
        Ok(ProbeSpec { count, seed, lo, hi, scales: DEFAULT_SCALES })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    pub fn describe(&self) -> String {
        format!(
            "halton count={} seed={} scales={} box={:?}..{:?}",
            self.count, self.seed, self.scales, self.lo, self.hi
        )
    }

    /// Probe points paired with unit directions for the pair quotients.
    pub fn cloud(&self) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let n = self.dim();
        if 2 * n > PRIMES.len() {
            return input(format!("probe clouds support at most {} dimensions", PRIMES.len() / 2));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let h: Vec<f64> = (0..2 * n)
                .map(|d| (radical_inverse(i as u64 + 1, PRIMES[d]) + shift[d]).fract())
                .collect();
            let x: Vec<f64> = (0..n).map(|d| self.lo[d] + (self.hi[d] - self.lo[d]) * h[d]).collect();
            out.push((x, direction(&h[n..])));
        }
        Ok(out)
    }
}

fn direction(u: &[f64]) -> Vec<f64> {
    match u.len() {
        1 => vec![if u[0] < 0.5 { -1.0 } else { 1.0 }],
        2 => {
            let t = std::f64::consts::TAU * u[0];
            vec![t.cos(), t.sin()]
        }
        3 => {
            let z = 2.0 * u[0] - 1.0;
            let t = std::f64::consts::TAU * u[1];
            let s = (1.0 - z * z).max(0.0).sqrt();
            vec![s * t.cos(), s * t.sin(), z]
        }
        _ => {
            let v: Vec<f64> = u.iter().map(|c| 2.0 * c - 1.0).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm == 0.0 {
                let mut e = vec![0.0; u.len()];
                e[0] = 1.0;
                e
            } else {
                v.iter().map(|c| c / norm).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        let v: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn cloud_is_deterministic_and_inside() {
        let spec = ProbeSpec::around(&[vec![0.0, 0.0], vec![1.0, 2.0]], 0.5, 200, 7).unwrap();
        let a = spec.cloud().unwrap();
        assert_eq!(a, spec.cloud().unwrap());
        for (x, v) in &a {
            assert!(x[0] >= -0.5 && x[0] <= 1.5 && x[1] >= -0.5 && x[1] <= 2.5);
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
        }
        let other = ProbeSpec { seed: 8, ..spec }.cloud().unwrap();
        assert_ne!(a, other);
    }
}
