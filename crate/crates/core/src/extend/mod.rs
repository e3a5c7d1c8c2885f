//! The extension construction: isolated points, flat cells, obstacles,
//! graph cells, the dimension-ordered driver, gluing over annuli, the
//! reduction from `C^m` to `C^{m,omega}`, and family sweeps.

pub mod construct;
mod driver;
mod family;
mod glue;
pub mod probes;
mod problem;
mod verify;

use serde::{Deserialize, Serialize};

use crate::calculus::{BumpSpec, FuncExpr, DEFAULT_PLATEAU};
use crate::error::{input, Result};
use crate::jet::Jet;

pub use construct::{
    extend_flat_cell, extend_graph, extend_open_cell, extend_point, extend_with_obstacle, Obstacles, Sheet,
};
pub use driver::{extend_jet, target_jet};
pub use family::{cm_extend, extend_family, CmResult, FamilyMode, FamilyReport, MemberSummary, RESTRICTION_TOL};
pub use glue::{glue_local, glue_problem, partition_bumps, GlueResult, PROFILE_SUPPORT};
pub use probes::ProbeSpec;
pub use problem::{PointJet, Problem, StratumSpec, PROBLEM_KEYS};
pub use verify::{verify_extension, ExtensionReport, FlatZone, FLAT_TOL, SEAM_STEP};

/// Construction parameters shared by every step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub m: usize,
    /// Smoothness of the bump functions, at least `m + 1`.
    pub p: usize,
    pub plateau: f64,
    /// Constant in the cell cutoff `xi(C sqrt(l) w_i / rho_j(u))`, at least 1.
    pub cutoff: f64,
}

impl Settings {
    pub fn new(m: usize) -> Settings {
        Settings { m, p: 2 * m + 1, plateau: DEFAULT_PLATEAU, cutoff: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < self.m + 1 {
            return input(format!("smoothness p = {} must be at least m + 1 = {}", self.p, self.m + 1));
        }
        if !(self.plateau > 0.0 && self.plateau < 1.0) {
            return input(format!("plateau half-width must lie in (0,1), got {}", self.plateau));
        }
        if !(self.cutoff >= 1.0) || !self.cutoff.is_finite() {
            return input(format!("cutoff constant must be finite and at least 1, got {}", self.cutoff));
        }
        Ok(())
    }

    pub fn bump(&self) -> BumpSpec {
        BumpSpec { p: self.p, plateau: self.plateau }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Point,
    FlatCell,
    Graph,
    Open,
}

/// Which branch of the obstacle step a piece took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleCase {
    /// `|grad r| <= 1`: multiplied by the `r` cutoff.
    Gentle,
    /// `|grad r| > 1` somewhere: the cell cutoff already keeps clear.
    Steep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceLog {
    pub piece: String,
    pub case: ObstacleCase,
    pub max_grad_r: f64,
    pub min_r: f64,
    /// Samples with `r(u) < d(u, boundary)` in the steep case.
    pub steep_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub label: String,
    pub kind: StepKind,
    pub dim: usize,
    pub support_radius: Option<f64>,
    pub pieces: Vec<PieceLog>,
    /// `max |J(F - g)|` on the sampled boundary of the stratum.
    pub boundary_residual: f64,
    pub separation: Option<f64>,
    pub regularity_margin: Option<f64>,
    pub notes: Vec<String>,
}

impl StepLog {
    pub(crate) fn new(label: impl Into<String>, kind: StepKind, dim: usize) -> StepLog {
        StepLog {
            label: label.into(),
            kind,
            dim,
            support_radius: None,
            pieces: Vec::new(),
            boundary_residual: 0.0,
            separation: None,
            regularity_margin: None,
            notes: Vec::new(),
        }
    }
}

/// A constructed extension with the jet it must restrict to.
#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub f: FuncExpr,
    pub target: Jet,
    pub log: Vec<StepLog>,
    pub zones: Vec<FlatZone>,
    pub seams: Vec<Vec<f64>>,
    pub settings: Settings,
    pub report: Option<ExtensionReport>,
}

impl ExtensionResult {
    /// Runs [`verify_extension`] on the result and stores the report.
    pub fn verify(&mut self, omega: &crate::modulus::Modulus, probes: &ProbeSpec) -> Result<&ExtensionReport> {
        let r = verify_extension(&self.f, &self.target, omega, Some(&self.zones), &self.seams, probes)?;
        self.report = Some(r);
        Ok(self.report.as_ref().unwrap())
    }

    /// Probe box fitted to the support of `f`: the flat zones and the
    /// target samples, enlarged by a quarter of the largest side.
    pub fn default_probes(&self, count: usize, seed: u64) -> Result<ProbeSpec> {
        let mut corners: Vec<Vec<f64>> = self.target.points().to_vec();
        for z in &self.zones {
            let (lo, hi) = z.bounding_box(self.target.dim());
            if lo.iter().chain(&hi).all(|v| v.is_finite()) {
                corners.push(lo);
                corners.push(hi);
            }
        }
        let tight = ProbeSpec::around(&corners, 0.0, count, seed)?;
        let side = tight.lo.iter().zip(&tight.hi).map(|(a, b)| b - a).fold(0.0f64, f64::max);
        let margin = if side > 0.0 { 0.25 * side } else { 1.0 };
        ProbeSpec::around(&corners, margin, count, seed)
    }
}
