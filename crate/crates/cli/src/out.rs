use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use tml::report::{CertificationReport, SCHEMA};
use tml::{Error, Result};

use crate::OutArgs;

pub const DEFAULT_OUT: &str = "tml-out";

/// `--out`, else `$OUTPUT_DIR`, else `./tml-out`.
pub fn out_dir(args: &OutArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| std::env::var_os("OUTPUT_DIR").filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `reports/<claim_id>.json` for each claim present, in first-seen order.
pub fn write_reports(out: &Path, reports: &[CertificationReport]) -> Result<Vec<PathBuf>> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_claim: BTreeMap<&str, Vec<serde_json::Value>> = BTreeMap::new();
    for r in reports {
        if !by_claim.contains_key(r.claim_id.as_str()) {
            order.push(&r.claim_id);
        }
        by_claim.entry(&r.claim_id).or_default().push(r.to_json());
    }
    let mut paths = Vec::new();
    for claim in order {
        let path = out.join("reports").join(format!("{claim}.json"));
        tml::certify::write_json(
            &path,
            &json!({
                "schema": SCHEMA,
                "kind": "claim_reports",
                "claim_id": claim,
                "reports": by_claim[claim],
            }),
        )?;
        paths.push(path);
    }
    Ok(paths)
}

/// One status line per report.
pub fn print_reports(reports: &[CertificationReport]) {
    for r in reports {
        let params = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
        let expect = if r.expect_fail { " (expected failure)" } else { "" };
        println!("{:<16} {:<8} {params}{expect}", r.claim_id, r.status.to_string());
    }
}
