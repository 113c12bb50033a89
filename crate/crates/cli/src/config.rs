//! Run configuration, read from a TOML file.
//!
//! ```toml
//! p = 2.0
//! grid_n = 8
//! seed = 7
//! suites = ["identity", "hoelder"]
//! output_dir = "out"
//!
//! [v0]
//! kind = "unit"
//!
//! [v1]
//! kind = "power"
//! scale = 1.0
//! gamma = 1.0
//!
//! [quadrature]
//! abs_tol = 1e-10
//! rel_tol = 1e-8
//! ```
//!
//! Every key except `v0`, `v1` and `p` has a default. The only environment
//! override is `ASSOCNORM_OUT_DIR`, which replaces `output_dir`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use assocnorm::{CorpusSpec, EquilibriumSolution, QuadratureSpec, Weight, WeightPair};
use serde::{Deserialize, Serialize};

pub const OUT_DIR_ENV: &str = "ASSOCNORM_OUT_DIR";

pub const ALL_SUITES: [&str; 7] = ["hoelder", "embedding", "reflexivity", "corol-divergence", "hardy", "identity", "blocks"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightSpec {
    Unit,
    Power {
        #[serde(default = "one")]
        scale: f64,
        gamma: f64,
    },
}

impl WeightSpec {
    pub fn build(&self) -> assocnorm::Result<Weight> {
        match *self {
            WeightSpec::Unit => Ok(Weight::unit()),
            WeightSpec::Power { scale, gamma } => Weight::power(scale, gamma),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdiv: usize,
    /// Truncation window for functions without compact support.
    pub t_min: f64,
    pub t_max: f64,
    pub allow_numeric_derivative: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdiv: q.max_subdiv,
            t_min: q.t_min,
            t_max: q.t_max,
            allow_numeric_derivative: q.allow_numeric_derivative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Largest accepted residual of the differential identity.
    pub identity: f64,
    /// Ceiling for measured ratios whose constants are never fixed.
    pub ratio_ceiling: f64,
    /// Largest relative change under a tenfold tolerance tightening.
    pub drift: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { identity: 1e-6, ratio_ceiling: 100.0, drift: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: f64,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    pub v0: WeightSpec,
    pub v1: WeightSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn one() -> f64 {
    1.0
}

fn default_grid_n() -> usize {
    8
}

fn default_seed() -> u64 {
    CorpusSpec::default().seed
}

fn default_suites() -> Vec<String> {
    ALL_SUITES.iter().map(|s| s.to_string()).collect()
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            bail!("p must be a finite number above 1, got {}", self.p);
        }
        if self.grid_n < 1 {
            bail!("grid_n must be at least 1");
        }
        let q = &self.quadrature;
        if !(q.abs_tol > 0.0 && q.rel_tol > 0.0 && q.max_subdiv > 0) {
            bail!("quadrature tolerances must be positive");
        }
        if !(q.t_min > 0.0 && q.t_max > q.t_min) {
            bail!("quadrature window must satisfy 0 < t_min < t_max");
        }
        let t = &self.thresholds;
        if !(t.identity > 0.0 && t.ratio_ceiling > 0.0 && t.drift > 0.0) {
            bail!("thresholds must be positive");
        }
        for s in &self.suites {
            if !ALL_SUITES.contains(&s.as_str()) {
                bail!("unknown suite {s:?}; known suites are {}", ALL_SUITES.join(", "));
            }
        }
        self.v0.build()?;
        self.v1.build()?;
        Ok(())
    }

    pub fn pair(&self) -> anyhow::Result<WeightPair> {
        Ok(WeightPair::new(self.v0.build()?, self.v1.build()?, self.p)?)
    }

    /// Unit weights skip the endpoint divergence check; every other pair must pass it.
    pub fn solution(&self) -> anyhow::Result<EquilibriumSolution> {
        let pair = self.pair()?;
        if self.v0 == WeightSpec::Unit && self.v1 == WeightSpec::Unit {
            return Ok(EquilibriumSolution::new_unchecked(pair));
        }
        Ok(EquilibriumSolution::new(pair)?)
    }

    pub fn quad(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdiv: q.max_subdiv,
            t_min: q.t_min,
            t_max: q.t_max,
            allow_numeric_derivative: q.allow_numeric_derivative,
        }
    }

    pub fn corpus(&self) -> CorpusSpec {
        CorpusSpec { seed: self.seed, ..CorpusSpec::default() }
    }

    /// `--out`, then the environment, then the config file.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"
p = 2.0
[v0]
kind = "unit"
[v1]
kind = "power"
gamma = 1.0
"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::parse(LINEAR).unwrap();
        assert_eq!(c.grid_n, 8);
        assert_eq!(c.seed, 7);
        assert_eq!(c.suites.len(), 7);
        assert_eq!(c.v1, WeightSpec::Power { scale: 1.0, gamma: 1.0 });
        assert_eq!(c.quad().abs_tol, 1e-10);
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::parse(LINEAR).unwrap();
        c.suites = vec!["identity".into()];
        c.quadrature.t_max = 500.0;
        let again = RunConfig::parse(&c.emit()).unwrap();
        assert_eq!(c, again);
        assert_eq!(again.emit(), c.emit());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse(&LINEAR.replace("p = 2.0", "p = 1.0")).is_err());
        assert!(RunConfig::parse(&format!("grid_n = 0\n{LINEAR}")).is_err());
        assert!(RunConfig::parse(&format!("suites = [\"nope\"]\n{LINEAR}")).is_err());
        assert!(RunConfig::parse(&format!("colour = 1\n{LINEAR}")).is_err());
        assert!(RunConfig::parse(&LINEAR.replace("gamma = 1.0", "gamma = 1.0\nscale = -1.0")).is_err());
        assert!(RunConfig::parse("p = 2.0").is_err());
    }

    #[test]
    fn unit_pair_uses_override() {
        let text = "p = 2.0\n[v0]\nkind = \"unit\"\n[v1]\nkind = \"unit\"\n";
        assert!(RunConfig::parse(text).unwrap().solution().is_ok());
    }
}
