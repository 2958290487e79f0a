use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::SuiteConfig;
use super::suite::{SuiteRun, FAMILIES};
use crate::error::{Error, Result};
use crate::report::{fmt_num, CertificationReport, Status, SCHEMA};

/// JSON Schema for every JSON document the toolkit writes.
pub const JSON_SCHEMA: &str = include_str!("../../schema/tml-1.schema.json");

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, to_pretty(v))?;
    Ok(())
}

fn params_label(r: &CertificationReport) -> String {
    r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Counts per status plus the overall verdict.
pub fn summary(reports: &[CertificationReport]) -> Value {
    let mut counts: BTreeMap<String, usize> = [Status::Pass, Status::Fail, Status::Skipped, Status::Budget, Status::Error]
        .iter()
        .map(|s| (s.to_string(), 0))
        .collect();
    for r in reports {
        *counts.entry(r.status.to_string()).or_default() += 1;
    }
    json!({
        "reports": reports.len(),
        "counts": counts,
        "expected_failures": reports.iter().filter(|r| r.expect_fail).count(),
        "all_meet_expectation": reports.iter().all(CertificationReport::meets_expectation),
    })
}

fn family_rank(claim: &str) -> usize {
    FAMILIES.iter().position(|(_, ids)| ids.contains(&claim)).unwrap_or(usize::MAX)
}

/// Writes `suite.json`, `reports/<claim_id>.json`, `tables/observations.csv`
/// and `fixtures/*.json` under `out`. Reports are grouped by claim id in
/// suite order. Returns the path of `suite.json`.
pub fn write_suite(run: &SuiteRun, cfg: &SuiteConfig, out: &Path) -> Result<PathBuf> {
    let mut by_claim: BTreeMap<(usize, String), Vec<&CertificationReport>> = BTreeMap::new();
    for r in &run.reports {
        by_claim
            .entry((family_rank(&r.claim_id), r.claim_id.clone()))
            .or_default()
            .push(r);
    }
    let mut entries = Vec::new();
    for ((_, claim), reps) in &by_claim {
        let file = format!("reports/{claim}.json");
        write_json(
            &out.join(&file),
            &json!({
                "schema": SCHEMA,
                "kind": "claim_reports",
                "claim_id": claim,
                "reports": reps.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            }),
        )?;
        for r in reps {
            entries.push(json!({
                "claim_id": claim,
                "params": r.params,
                "status": r.status.to_string(),
                "expect_fail": r.expect_fail,
                "meets_expectation": r.meets_expectation(),
                "file": file,
            }));
        }
    }
    for (stem, v) in &run.fixtures {
        write_json(&out.join("fixtures").join(format!("{stem}.json")), v)?;
    }
    write_observations(&run.reports, &out.join("tables").join("observations.csv"))?;
    let config: BTreeMap<&str, String> = cfg.entries().into_iter().collect();
    let suite = json!({
        "schema": SCHEMA,
        "kind": "suite",
        "config": config,
        "summary": summary(&run.reports),
        "reports": entries,
    });
    let path = out.join("suite.json");
    write_json(&path, &suite)?;
    Ok(path)
}

/// One row per observation: `claim_id, params, status, name, value`.
pub fn write_observations(reports: &[CertificationReport], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["claim_id", "params", "status", "name", "value"]).map_err(io)?;
    for r in reports {
        let params = params_label(r);
        let status = r.status.to_string();
        for o in &r.observed {
            w.write_record([r.claim_id.as_str(), &params, &status, &o.name, &fmt_num(o.value)])
                .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
