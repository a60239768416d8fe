//! Golden fixtures: expected summaries stored as TOML and recomputed on demand.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cech::{cech_cohomology, default_window, same_h1_span, TransitionSheaf};
use crate::criteria::{evaluate, KINDS};
use crate::error::{Error, Result};
use crate::expr::parse_on;

pub const SCHEMA: u32 = 1;
pub const SUITES: [&str; 2] = ["acceptance", "claims"];
pub const CRITERIA: u32 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Stated in the source result.
    Claim,
    Derived,
    Trivial,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compare {
    #[default]
    Exact,
    /// `expected` lists `H¹` representatives; they must span the computed `H¹`.
    H1Span,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub id: String,
    #[serde(default)]
    pub criterion: Option<u32>,
    pub kind: String,
    /// Result the record is taken from, with a short description.
    pub anchor: String,
    pub origin: Origin,
    #[serde(default)]
    pub compare: Compare,
    #[serde(default)]
    pub inputs: Value,
    pub expected: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub schema: u32,
    pub suite: String,
    pub record: Vec<GoldenRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldenOutcome {
    pub id: String,
    pub criterion: Option<u32>,
    pub kind: String,
    pub anchor: String,
    pub pass: bool,
    pub expected: Value,
    pub computed: Value,
    pub diff: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldenReport {
    pub schema: u32,
    pub suite: String,
    pub outcomes: Vec<GoldenOutcome>,
}

impl GoldenReport {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.outcomes.iter().filter(|o| !o.pass).map(|o| o.id.as_str()).collect()
    }
}

/// `SUPERPROJ_FIXTURES` if set, else the fixtures directory of this crate.
pub fn fixtures_dir() -> PathBuf {
    std::env::var_os("SUPERPROJ_FIXTURES").map(PathBuf::from).unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

pub fn load_fixture(dir: &Path, suite: &str) -> Result<FixtureFile> {
    let path = dir.join(format!("{suite}.toml"));
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("fixture {}: {e}", path.display())))?;
    let f: FixtureFile = toml::from_str(&text).map_err(|e| Error::Config(format!("fixture {}: {e}", path.display())))?;
    validate(&f, suite)?;
    Ok(f)
}

fn validate(f: &FixtureFile, suite: &str) -> Result<()> {
    if f.schema != SCHEMA {
        return Err(Error::Config(format!("fixture schema {} (expected {SCHEMA})", f.schema)));
    }
    if f.suite != suite {
        return Err(Error::Config(format!("fixture declares suite {} but was loaded as {suite}", f.suite)));
    }
    let mut ids = BTreeSet::new();
    for r in &f.record {
        if !ids.insert(&r.id) {
            return Err(Error::Config(format!("duplicate record id {}", r.id)));
        }
        if !KINDS.contains(&r.kind.as_str()) {
            return Err(Error::Config(format!("record {} has unknown kind {}", r.id, r.kind)));
        }
    }
    if suite == "acceptance" {
        let crits: Vec<u32> = f.record.iter().filter_map(|r| r.criterion).collect();
        let want: Vec<u32> = (1..=CRITERIA).collect();
        let mut sorted = crits.clone();
        sorted.sort_unstable();
        if sorted != want || crits.len() != f.record.len() {
            return Err(Error::Config(format!("acceptance fixture must hold one record per criterion 1..={CRITERIA}, found {crits:?}")));
        }
    }
    Ok(())
}

fn diff(expected: &Value, computed: &Value) -> Vec<String> {
    match (expected, computed) {
        (Value::Object(e), Value::Object(c)) => {
            let keys: BTreeSet<&String> = e.keys().chain(c.keys()).collect();
            keys.into_iter()
                .filter(|k| e.get(*k) != c.get(*k))
                .map(|k| format!("{k}: expected {}, computed {}", show(e.get(k)), show(c.get(k))))
                .collect()
        }
        _ if expected == computed => Vec::new(),
        _ => vec![format!("expected {expected}, computed {computed}")],
    }
}

fn show(v: Option<&Value>) -> String {
    v.map_or("(absent)".into(), |v| v.to_string())
}

fn h1_span(r: &GoldenRecord) -> Result<(Value, bool)> {
    let m = r.inputs.get("m").and_then(Value::as_u64).ok_or_else(|| Error::Config("input m missing".into()))? as usize;
    let text = r.inputs.get("transition").and_then(Value::as_str).ok_or_else(|| Error::Config("input transition missing".into()))?;
    let listed = r.expected.as_array().ok_or_else(|| Error::Config("expected must list generators".into()))?;
    let listed = listed.iter().map(|g| parse_on(g.as_str().unwrap_or(""), 1, m)).collect::<Result<Vec<_>>>()?;
    let s = TransitionSheaf::new(parse_on(text, 1, m)?)?;
    let c = cech_cohomology(&s, default_window(&s))?;
    let same = same_h1_span(&s, &listed, &c.generators_h1, c.window_used.d)?;
    Ok((Value::from(c.generators_h1.iter().map(|g| g.render()).collect::<Vec<_>>()), same))
}

fn run_record(r: &GoldenRecord) -> GoldenOutcome {
    let (computed, pass, d) = match r.compare {
        Compare::Exact => match evaluate(&r.kind, &r.inputs) {
            Ok(c) => {
                let d = diff(&r.expected, &c);
                (c, d.is_empty(), d)
            }
            Err(e) => (Value::Null, false, vec![format!("error: {e}")]),
        },
        Compare::H1Span => match h1_span(r) {
            Ok((c, same)) => (c, same, if same { Vec::new() } else { vec!["listed generators span a different subspace of H¹".into()] }),
            Err(e) => (Value::Null, false, vec![format!("error: {e}")]),
        },
    };
    GoldenOutcome { id: r.id.clone(), criterion: r.criterion, kind: r.kind.clone(), anchor: r.anchor.clone(), pass, expected: r.expected.clone(), computed, diff: d }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Restrict to these criteria.
    pub only: Option<Vec<u32>>,
    /// Replaces the `seed` input of randomized records.
    pub seed: Option<u64>,
}

pub fn run_golden_in(dir: &Path, suite: &str, opts: &RunOptions) -> Result<GoldenReport> {
    let f = load_fixture(dir, suite)?;
    let records: Vec<GoldenRecord> = f
        .record
        .into_iter()
        .filter(|r| opts.only.as_ref().is_none_or(|o| r.criterion.is_some_and(|c| o.contains(&c))))
        .map(|mut r| {
            if let (Some(seed), Some(obj)) = (opts.seed, r.inputs.as_object_mut()) {
                if obj.contains_key("seed") {
                    obj.insert("seed".into(), Value::from(seed));
                }
            }
            r
        })
        .collect();
    let outcomes = records.par_iter().map(run_record).collect();
    Ok(GoldenReport { schema: SCHEMA, suite: suite.into(), outcomes })
}

pub fn run_golden(suite: &str) -> Result<GoldenReport> {
    run_golden_in(&fixtures_dir(), suite, &RunOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claims_suite() {
        let r = run_golden("claims").unwrap();
        let ids: Vec<_> = r.outcomes.iter().map(|o| o.id.as_str()).collect();
        assert_eq!(ids, vec!["pic-1-4", "t14-h1", "cech-p13"]);
        assert!(r.all_pass(), "{:?}", r.outcomes.iter().flat_map(|o| o.diff.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn missing_fixture_is_config_error() {
        let dir = std::env::temp_dir().join("superproj-no-fixtures");
        assert!(matches!(run_golden_in(&dir, "acceptance", &RunOptions::default()), Err(Error::Config(_))));
    }

    #[test]
    fn fixture_claim_bijection() {
        let f = load_fixture(&fixtures_dir(), "acceptance").unwrap();
        let claims = load_fixture(&fixtures_dir(), "claims").unwrap();
        let kinds: BTreeSet<&str> = f.record.iter().chain(&claims.record).map(|r| r.kind.as_str()).collect();
        assert_eq!(kinds, KINDS.iter().copied().collect());
        let bad = FixtureFile { schema: 1, suite: "acceptance".into(), record: f.record[1..].to_vec() };
        assert!(matches!(validate(&bad, "acceptance"), Err(Error::Config(_))));
        let mut dup = f.clone();
        dup.record.push(f.record[0].clone());
        assert!(validate(&dup, "acceptance").is_err());
    }

    #[test]
    fn diff_lists_keys() {
        let e = serde_json::json!({"a": 1, "b": [1, 2]});
        let c = serde_json::json!({"a": 1, "b": [1, 3], "c": true});
        assert_eq!(diff(&e, &c), vec!["b: expected [1,2], computed [1,3]", "c: expected (absent), computed true"]);
    }
}
