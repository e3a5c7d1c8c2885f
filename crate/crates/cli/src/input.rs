//! Problem files: a version tag, the records a command needs, and options.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use whitney_core::calculus::FuncExpr;
use whitney_core::extend::{FamilyMode, FlatZone, Problem, Settings, PROBLEM_KEYS};
use whitney_core::jet::Jet;
use whitney_core::modulus::Modulus;
use whitney_core::Error;

use crate::Failure;

pub const FORMAT_VERSION: u32 = 1;

pub const FILE_KEYS: &[&str] = &[
    "version",
    "problem",
    "problems",
    "mode",
    "function",
    "m",
    "t0",
    "r",
    "grid",
    "omega",
    "jet",
    "midpoints",
    "construction",
    "options",
];

/// Options that flags override.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau: Option<f64>,
}

/// A built extension, enough to re-run verification without rebuilding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Construction {
    pub f: FuncExpr,
    pub target: Jet,
    pub zones: Vec<FlatZone>,
    pub seams: Vec<Vec<f64>>,
    pub settings: Settings,
    pub omega: Modulus,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problems: Option<Vec<Problem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<FamilyMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FuncExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Modulus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<Jet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub midpoints: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

fn schema(msg: impl Into<String>) -> Failure {
    Failure::Core(Error::Schema(msg.into()))
}

/// Drops keys outside `known`; each one is a warning, or an error when strict.
fn prune(obj: &mut Map<String, Value>, known: &[&str], place: &str, strict: bool, warnings: &mut Vec<String>) -> Result<(), Failure> {
    let unknown: Vec<String> = obj.keys().filter(|k| !known.contains(&k.as_str())).cloned().collect();
    for k in unknown {
        if strict {
            return Err(schema(format!("unknown field {k:?} in {place}")));
        }
        warnings.push(format!("ignoring unknown field {k:?} in {place}"));
        obj.remove(&k);
    }
    Ok(())
}

fn prune_problem(v: &mut Value, place: &str, strict: bool, warnings: &mut Vec<String>) -> Result<(), Failure> {
    match v.as_object_mut() {
        Some(obj) => prune(obj, PROBLEM_KEYS, place, strict, warnings),
        None => Err(schema(format!("{place} must be an object"))),
    }
}

/// Parses a problem file. Unknown keys at the top level and in problem
/// records are warned about (or rejected with `strict`); anything deeper is
/// checked by the record types themselves.
pub fn parse(text: &str, strict: bool) -> Result<(ProblemFile, Vec<String>), Failure> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| schema(format!("not valid JSON: {e}")))?;
    let mut warnings = Vec::new();
    let obj = v.as_object_mut().ok_or_else(|| schema("a problem file must be a JSON object"))?;
    prune(obj, FILE_KEYS, "the problem file", strict, &mut warnings)?;
    if let Some(p) = obj.get_mut("problem") {
        prune_problem(p, "\"problem\"", strict, &mut warnings)?;
    }
    if let Some(Value::Array(ps)) = obj.get_mut("problems") {
        for (i, p) in ps.iter_mut().enumerate() {
            prune_problem(p, &format!("\"problems\"[{i}]"), strict, &mut warnings)?;
        }
    }
    let file: ProblemFile = serde_json::from_value(v).map_err(|e| schema(e.to_string()))?;
    if file.version != FORMAT_VERSION {
        return Err(schema(format!("unsupported version {}, expected {FORMAT_VERSION}", file.version)));
    }
    Ok((file, warnings))
}

pub fn load(path: &Path, strict: bool) -> Result<(ProblemFile, Vec<String>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse(&text, strict)
}

impl ProblemFile {
    pub fn problem(&self) -> Result<&Problem, Failure> {
        self.problem.as_ref().ok_or_else(|| schema("this command needs a \"problem\" record"))
    }

    pub fn omega(&self) -> Result<Modulus, Failure> {
        let w = self.omega.clone().ok_or_else(|| schema("this command needs an \"omega\" record"))?;
        w.validate()?;
        Ok(w)
    }

    pub fn jet(&self) -> Result<&Jet, Failure> {
        self.jet.as_ref().ok_or_else(|| schema("this command needs a \"jet\" record"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_warn_or_fail() {
        let text = r#"{"version":1,"colour":"red","problem":{"n":1,"m":0,"extra":1}}"#;
        let (f, w) = parse(text, false).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(f.problem.unwrap().n, 1);
        assert!(matches!(parse(text, true), Err(Failure::Core(Error::Schema(_)))));
    }

    #[test]
    fn version_is_checked() {
        assert!(parse(r#"{"version":2}"#, false).is_err());
        assert!(parse(r#"{}"#, false).is_err());
        assert!(parse(r#"[1]"#, false).is_err());
    }
}
