use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use assocnorm::NormReport;

pub const NORM_HEADER: [&str; 8] =
    ["label", "norm_kind", "value", "est_error", "component_G_frak", "component_G_cal", "t_min", "t_max"];

/// Full precision: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A CSV table held in memory until it is written.
pub struct Table {
    pub name: &'static str,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        Self { name, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn norm_row(&mut self, label: &str, kind: &str, r: &NormReport) {
        self.push(vec![
            label.to_string(),
            kind.to_string(),
            num(r.value),
            num(r.est_error),
            opt(r.component(assocnorm::functionals::G_FRAK)),
            opt(r.component(assocnorm::functionals::G_CAL)),
            num(r.truncation_used.0),
            num(r.truncation_used.1),
        ]);
    }

    pub fn to_bytes(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}.csv", self.name));
        fs::write(&path, self.to_bytes()?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(opt(None), "");
    }

    #[test]
    fn header_comes_first() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["1".into(), "two, three".into()]);
        let s = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(s, "a,b\n1,\"two, three\"\n");
    }
}
