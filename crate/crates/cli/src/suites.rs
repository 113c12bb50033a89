//! The named verification suites behind `assocnorm verify`.

use assocnorm::*;

use crate::config::RunConfig;
use crate::output::{num, opt, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

/// One measured quantity, compared against a threshold when it has one.
#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, name: &str, value: f64, threshold: Option<f64>, ok: bool) -> Self {
        let status = match (threshold, ok) {
            (None, true) => Status::Info,
            (_, true) => Status::Pass,
            (_, false) => Status::Fail,
        };
        Self { suite, name: name.into(), value, threshold, status, detail: String::new() }
    }

    fn at_most(suite: &'static str, name: &str, value: f64, limit: f64) -> Self {
        Self::new(suite, name, value, Some(limit), value <= limit)
    }

    fn at_least(suite: &'static str, name: &str, value: f64, limit: f64) -> Self {
        Self::new(suite, name, value, Some(limit), value >= limit)
    }

    fn info(suite: &'static str, name: &str, value: f64) -> Self {
        Self::new(suite, name, value, None, value.is_finite())
    }

    fn error(suite: &'static str, err: &dyn std::fmt::Display) -> Self {
        let mut c = Self::new(suite, "error", f64::NAN, None, false);
        c.detail = err.to_string();
        c
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

pub const VERIFY_HEADER: [&str; 6] = ["suite", "check", "value", "threshold", "status", "detail"];

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new("verify", &VERIFY_HEADER);
    for c in checks {
        t.push(vec![
            c.suite.to_string(),
            c.name.clone(),
            num(c.value),
            opt(c.threshold),
            c.status.as_str().to_string(),
            c.detail.clone(),
        ]);
    }
    t
}

pub fn summary(checks: &[Check], suites: &[String]) -> String {
    let mut out = String::new();
    for s in suites {
        let mine: Vec<&Check> = checks.iter().filter(|c| c.suite == s).collect();
        let failed: Vec<&&Check> = mine.iter().filter(|c| c.status == Status::Fail).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict}  {s} ({} checks)\n", mine.len()));
        for c in &mine {
            let bound = c.threshold.map(|t| format!(" (limit {t:.4e})")).unwrap_or_default();
            let detail = if c.detail.is_empty() { String::new() } else { format!(" {}", c.detail) };
            out.push_str(&format!("      {:<5} {} = {:.6e}{bound}{detail}\n", c.status.as_str(), c.name, c.value));
        }
    }
    out
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    sol: EquilibriumSolution,
    quad: QuadratureSpec,
}

impl Ctx<'_> {
    fn grid(&self) -> Result<EtaGrid> {
        build_eta_grid(&self.sol, self.cfg.grid_n)
    }

    /// Interior of the grid span, where windows and their inverses exist.
    fn span(&self) -> Result<(f64, f64)> {
        let g = self.grid()?;
        let lo = g.eta(g.min_index() + 1).unwrap_or(g.span().0);
        let hi = g.eta(g.max_index() - 1).unwrap_or(g.span().1);
        Ok((lo, hi))
    }
}

fn identity(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "identity";
    let (lo, hi) = ctx.span()?;
    let (mut ident, mut eq, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for t in log_spaced(lo, hi, 100) {
        ident = ident.max(ctx.sol.check_identity(t, EquilibriumSolution::diff_step(t))?);
        let c = ctx.sol.certificate(t)?;
        eq = eq.max(c.equilibrium / ctx.sol.v1_total(t)?);
        norm = norm.max(c.normalization);
    }
    let thr = ctx.cfg.thresholds.identity;
    let range = format!("t in [{lo:.4e}, {hi:.4e}]");
    Ok(vec![
        Check::at_most(S, "max differential identity residual", ident, thr).with_detail(range),
        Check::at_most(S, "max relative equilibrium residual", eq, thr),
        Check::at_most(S, "max normalization residual", norm, thr),
    ])
}

fn hoelder(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "hoelder";
    let spec = ctx.cfg.corpus();
    let fs = hat_corpus(&spec)?;
    let gs = g_corpus(&spec)?;
    let base = max_of(holder_matrix(&fs, &gs, &ctx.sol, &ctx.quad)?.into_iter().flatten());
    let tight = max_of(holder_matrix(&fs, &gs, &ctx.sol, &ctx.quad.tightened(10.0))?.into_iter().flatten());
    let t = &ctx.cfg.thresholds;
    Ok(vec![
        Check::at_most(S, "C_impl max pairing ratio", base, t.ratio_ceiling)
            .with_detail(format!("{} x {} pairs", fs.len(), gs.len())),
        Check::at_most(S, "drift under tightening", (base / tight - 1.0).abs(), t.drift),
    ])
}

fn embedding(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "embedding";
    let mut ratios = Vec::new();
    for g in g_corpus(&ctx.cfg.corpus())? {
        ratios.push(verify_embedding(&g, &ctx.sol, &ctx.quad)?.ratio);
    }
    let worst = max_of(ratios.iter().copied());
    let worst = if ratios.iter().all(|r| r.is_finite()) { worst } else { f64::INFINITY };
    Ok(vec![
        Check::at_most(S, "max weak / dual-weighted ratio", worst, ctx.cfg.thresholds.ratio_ceiling),
        Check::info(S, "min weak / dual-weighted ratio", min_of(ratios)),
    ])
}

fn reflexivity(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "reflexivity";
    let grid = ctx.grid()?;
    let corpus = hat_corpus(&ctx.cfg.corpus())?;
    let reports = verify_reflexivity(&corpus, &grid, &ctx.quad)?;
    let doubled: Vec<_> = corpus.iter().map(|f| f.scale(2.0)).collect();
    let reports2 = verify_reflexivity(&doubled, &grid, &ctx.quad)?;
    let over = reports.iter().filter(|r| r.j_lower > r.holder_upper * (1.0 + 1e-9)).count();
    let drift = max_of(
        reports
            .iter()
            .zip(&reports2)
            .map(|(a, b)| (b.sandwich_ratio() / a.sandwich_ratio() - 1.0).abs()),
    );
    let t = &ctx.cfg.thresholds;
    Ok(vec![
        Check::at_least(S, "min c_emp", min_of(reports.iter().map(|r| r.c_emp())), f64::MIN_POSITIVE),
        Check::info(S, "max C_emp", max_of(reports.iter().map(|r| r.c_upper()))),
        Check::at_most(S, "lower estimates above upper bound", over as f64, 0.0),
        Check::at_most(S, "worst sandwich ratio", max_of(reports.iter().map(|r| r.sandwich_ratio())), t.ratio_ceiling),
        Check::at_most(S, "sandwich drift under f -> 2f", drift, t.drift),
    ])
}

fn divergence(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "corol-divergence";
    let grid = ctx.grid()?;
    let (c, d) = (grid.eta(0).unwrap_or(1.0), grid.eta(1).unwrap_or(2.0));
    let f = HalfLineFunction::indicator(c, d);
    let eps = [1e-1, 1e-2, 1e-3];
    let rows = verify_strong_of_weak_zero(&f, &[(c, d)], &eps, &ctx.sol, &ctx.quad)?;
    let scaled: Vec<f64> = rows.iter().map(|r| r.ratio * r.epsilon).collect();
    let mut out = vec![Check::at_least(
        S,
        "min ratio over certified lower bound",
        min_of(rows.iter().map(|r| r.ratio / r.lower_bound)),
        1.0,
    )
    .with_detail(format!("oscillators on [{c:.6}, {d:.6}]"))];
    for r in &rows {
        out.push(Check::info(S, &format!("ratio at eps={:e}", r.epsilon), r.ratio).with_detail(format!("n={}", r.n)));
    }
    out.push(Check::at_least(S, "min/max of ratio*eps", min_of(scaled.iter().copied()) / max_of(scaled), 0.5));
    Ok(out)
}

fn hardy(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "hardy";
    let grid = ctx.grid()?;
    let p = ctx.cfg.p;
    let (mut a, mut aa) = (0.0f64, 0.0f64);
    for k in grid.min_index() + 1..grid.max_index() {
        let r = hardy_constants(&grid, k, &ctx.quad)?;
        a = a.max(r.a1.value).max(r.a2.value);
        aa = aa.max(r.aa1.value.powf(p)).max(r.aa2.value.powf(p));
    }
    let (lo, hi) = ctx.span()?;
    let mut emb = 0.0f64;
    for t in log_spaced(lo, hi, 100) {
        let (x, y) = embedding_constants(&ctx.sol, t)?;
        emb = emb.max(x).max(y);
    }
    let slack = 1e-6;
    Ok(vec![
        Check::at_most(S, "max A1, A2", a, 1.0 + slack),
        Check::at_most(S, "max p-th power of the weighted Hardy constants", aa, 1.0 / (p - 1.0) + slack),
        Check::at_most(S, "max embedding constant", emb, 1.0 + slack),
    ])
}

fn blocks(ctx: &Ctx) -> Result<Vec<Check>> {
    const S: &str = "blocks";
    let grid = ctx.grid()?;
    let tight = ctx.quad.tightened(10.0);
    let (mut lo, mut hi, mut drift) = (f64::INFINITY, 0.0f64, 0.0f64);
    for g in g_corpus(&ctx.cfg.corpus())? {
        let r = block_norm(&g, &grid, &ctx.quad)?.report.value / weak_norm(&g, &ctx.sol, &ctx.quad)?.value;
        let rt = block_norm(&g, &grid, &tight)?.report.value / weak_norm(&g, &ctx.sol, &tight)?.value;
        lo = lo.min(r);
        hi = hi.max(r);
        drift = drift.max((r / rt - 1.0).abs());
    }
    let t = &ctx.cfg.thresholds;
    Ok(vec![
        Check::at_least(S, "min block / weak ratio", lo, 1.0 / t.ratio_ceiling),
        Check::at_most(S, "max block / weak ratio", hi, t.ratio_ceiling),
        Check::at_most(S, "drift under tightening", drift, t.drift),
    ])
}

pub fn run(cfg: &RunConfig, sol: EquilibriumSolution, suites: &[String]) -> Vec<Check> {
    let ctx = Ctx { cfg, sol, quad: cfg.quad() };
    let mut out = Vec::new();
    for s in suites {
        let result = match s.as_str() {
            "identity" => identity(&ctx),
            "hoelder" => hoelder(&ctx),
            "embedding" => embedding(&ctx),
            "reflexivity" => reflexivity(&ctx),
            "corol-divergence" => divergence(&ctx),
            "hardy" => hardy(&ctx),
            "blocks" => blocks(&ctx),
            _ => unreachable!("suite names are validated with the config"),
        };
        let suite = crate::config::ALL_SUITES.iter().find(|n| **n == s).expect("known suite");
        match result {
            Ok(checks) => out.extend(checks),
            Err(e) => out.push(Check::error(suite, &e)),
        }
    }
    out
}

pub fn any_failed(checks: &[Check]) -> bool {
    checks.iter().any(|c| c.status == Status::Fail)
}
