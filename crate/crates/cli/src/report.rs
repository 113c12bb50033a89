//! `assocnorm report`: folds the CSVs of earlier runs into one summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};

use crate::output::{num, Table};

const INPUTS: [&str; 6] = ["equilibrium", "grid", "norm", "associate", "construct_norms", "verify"];

type Rows = Vec<BTreeMap<String, String>>;

fn read(path: &Path) -> anyhow::Result<Rows> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header = r.headers()?.clone();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(header.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect());
    }
    Ok(rows)
}

fn field<'a>(row: &'a BTreeMap<String, String>, key: &str) -> &'a str {
    row.get(key).map(String::as_str).unwrap_or("")
}

/// Weak-to-strong ratios per label from an `associate` table.
fn associate_ratios(rows: &Rows) -> Vec<(String, f64)> {
    let mut by_label: BTreeMap<&str, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for row in rows {
        let v = field(row, "value").parse::<f64>().ok();
        let e = by_label.entry(field(row, "label")).or_default();
        match field(row, "norm_kind") {
            "weak" => e.0 = v,
            "strong" => e.1 = v,
            _ => {}
        }
    }
    by_label
        .into_iter()
        .filter_map(|(l, (w, s))| match (w, s) {
            (Some(w), Some(s)) if s > 0.0 => Some((l.to_string(), w / s)),
            _ => None,
        })
        .collect()
}

/// Returns the text summary and the constants table.
pub fn build(dir: &Path) -> anyhow::Result<(String, Table)> {
    let mut found = BTreeMap::new();
    for name in INPUTS {
        let path = dir.join(format!("{name}.csv"));
        if path.exists() {
            found.insert(name, read(&path)?);
        }
    }
    if found.is_empty() {
        bail!("no result files in {}; run another subcommand first", dir.display());
    }
    let mut text = String::from("# assocnorm report\n\n## Inputs\n\n");
    for (name, rows) in &found {
        writeln!(text, "- {name}.csv: {} rows", rows.len())?;
    }

    let mut constants = Table::new("constants", &["source", "quantity", "value", "threshold", "status"]);
    if let Some(rows) = found.get("verify") {
        text.push_str("\n## Suites\n\n");
        let mut verdicts: BTreeMap<&str, bool> = BTreeMap::new();
        for row in rows {
            let ok = field(row, "status") != "FAIL";
            *verdicts.entry(field(row, "suite")).or_insert(true) &= ok;
            if field(row, "check") != "error" {
                constants.push(vec![
                    field(row, "suite").to_string(),
                    field(row, "check").to_string(),
                    field(row, "value").to_string(),
                    field(row, "threshold").to_string(),
                    field(row, "status").to_string(),
                ]);
            }
        }
        for (suite, ok) in verdicts {
            writeln!(text, "- {suite}: {}", if ok { "PASS" } else { "FAIL" })?;
        }
    }
    if let Some(rows) = found.get("associate") {
        for (label, r) in associate_ratios(rows) {
            constants.push(vec!["associate".into(), format!("weak/strong {label}"), num(r), String::new(), "INFO".into()]);
        }
    }

    text.push_str("\n## Empirical constants\n\n| source | quantity | value | threshold | status |\n|---|---|---|---|---|\n");
    let bytes = constants.to_bytes()?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    for rec in r.records() {
        let rec = rec?;
        let cells: Vec<&str> = rec.iter().collect();
        writeln!(text, "| {} |", cells.join(" | "))?;
    }
    Ok((text, constants))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_pair_weak_with_strong() {
        let mk = |l: &str, k: &str, v: &str| {
            [("label", l), ("norm_kind", k), ("value", v)]
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect::<BTreeMap<_, _>>()
        };
        let rows = vec![mk("g", "weak", "1.0"), mk("g", "strong", "4.0"), mk("h", "weak", "1.0")];
        assert_eq!(associate_ratios(&rows), vec![("g".to_string(), 0.25)]);
    }

    #[test]
    fn empty_dir_is_an_error() {
        let dir = std::env::temp_dir().join("assocnorm-report-empty-test");
        std::fs::create_dir_all(&dir).unwrap();
        assert!(build(&dir).is_err());
    }
}
