//! Family sweeps and the reduction from `C^m` to `C^{m,omega}` data.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jet::whitney_constant;
use crate::modulus::{modulus_for_cm, sigma_from_jet, Modulus};

use super::driver::{extend_jet, target_jet};
use super::problem::Problem;
use super::ExtensionResult;

/// Restriction tolerance used by family and reduction checks.
pub const RESTRICTION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    /// Every member uses its own declared modulus.
    Fixed,
    /// Every member gets the modulus built from its own jet.
    PerMember,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberSummary {
    pub label: String,
    pub norm: Option<f64>,
    pub restriction: Option<f64>,
    pub whitney_constant: Option<f64>,
    pub omega_at_1: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub mode: FamilyMode,
    pub members: Vec<MemberSummary>,
    pub sup_norm: f64,
    pub min_norm: f64,
    /// `sup_norm / min_norm` over members with a positive norm.
    pub ratio: f64,
    pub worst_member: Option<usize>,
    pub failures: Vec<usize>,
    /// `max(omega(1), 1/omega(1))` over members, per-member mode only.
    pub uniform_constant: Option<f64>,
    pub probes: usize,
    pub seed: u64,
}

/// The result of the `C^m` pipeline.
#[derive(Clone, Debug)]
pub struct CmResult {
    pub result: ExtensionResult,
    pub omega: Modulus,
    pub omega_at_1: f64,
    /// `max(omega(1), 1/omega(1))`.
    pub uniform_constant: f64,
    /// Largest value of the remainder profile over sampled pairs.
    pub sigma_max: f64,
}

/// Builds the modulus from the sampled `C^m` remainders of the jet, then
/// extends under it and verifies.
pub fn cm_extend(problem: &Problem, probes: usize, seed: u64) -> Result<CmResult> {
    let settings = problem.settings()?;
    let target = target_jet(problem, &settings)?;
    let omega = modulus_for_cm(&target)?;
    let sigma_max = sigma_from_jet(&target, &[]).max_value();
    let mut result = extend_jet(problem, &settings)?;
    let spec = result.default_probes(probes, seed)?;
    result.verify(&omega, &spec)?;
    let w1 = omega.eval(1.0);
    Ok(CmResult { result, omega_at_1: w1, uniform_constant: w1.max(1.0 / w1), sigma_max, omega })
}

fn run_member(problem: &Problem, mode: FamilyMode, probes: usize, seed: u64) -> Result<(MemberSummary, f64)> {
    let settings = problem.settings()?;
    let (mut result, omega) = match mode {
        FamilyMode::Fixed => (extend_jet(problem, &settings)?, problem.omega()?),
        FamilyMode::PerMember => {
            let cm = cm_extend(problem, probes, seed)?;
            (cm.result, cm.omega)
        }
    };
    let spec = result.default_probes(probes, seed)?;
    let report = result.verify(&omega, &spec)?.clone();
    let wc = whitney_constant(&result.target, &omega);
    let w1 = omega.eval(1.0);
    Ok((
        MemberSummary {
            label: problem.label(),
            norm: Some(report.norm),
            restriction: Some(report.restriction_max_error),
            whitney_constant: Some(wc.holder_constant),
            omega_at_1: Some(w1),
            passed: report.passes(RESTRICTION_TOL),
            error: None,
        },
        w1.max(1.0 / w1),
    ))
}

/// Extends every member and aggregates norms. Failing members are listed,
/// not fatal.
pub fn extend_family(problems: &[Problem], mode: FamilyMode, probes: usize, seed: u64) -> FamilyReport {
    let mut members = Vec::new();
    let mut failures = Vec::new();
    let mut uniform: Option<f64> = None;
    for (i, p) in problems.iter().enumerate() {
        match run_member(p, mode, probes, seed) {
            Ok((s, c)) => {
                if !s.passed {
                    failures.push(i);
                }
                if mode == FamilyMode::PerMember {
                    uniform = Some(uniform.map_or(c, |u| u.max(c)));
                }
                members.push(s);
            }
            Err(e) => {
                failures.push(i);
                members.push(MemberSummary {
                    label: p.label(),
                    norm: None,
                    restriction: None,
                    whitney_constant: None,
                    omega_at_1: None,
                    passed: false,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let norms: Vec<(usize, f64)> = members.iter().enumerate().filter_map(|(i, s)| s.norm.map(|v| (i, v))).collect();
    let sup = norms.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
    let positive: Vec<f64> = norms.iter().map(|(_, v)| *v).filter(|v| *v > 0.0).collect();
    let min = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if positive.is_empty() { 1.0 } else { sup / min };
    let worst = norms.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|(i, _)| *i);
    FamilyReport {
        mode,
        members,
        sup_norm: sup,
        min_norm: if positive.is_empty() { 0.0 } else { min },
        ratio,
        worst_member: worst,
        failures,
        uniform_constant: uniform,
        probes,
        seed,
    }
}
