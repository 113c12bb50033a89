//! `assocnorm`: equilibrium windows, associate norms and verification suites
//! from the command line. Results go to CSV files in the output directory.

mod config;
mod functions;
mod output;
mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use assocnorm::*;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;
use functions::parse_function;
use output::{num, Table, NORM_HEADER};

#[derive(Parser)]
#[command(name = "assocnorm", version, about = "Associate norms of weighted Sobolev spaces on the half-line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides ASSOCNORM_OUT_DIR and the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Windows a(t), b(t) with their residuals.
    Equilibrium {
        #[command(flatten)]
        common: Common,
        /// Explicit points; otherwise a log-spaced sweep.
        #[arg(long = "t", num_args = 1..)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        t_lo: f64,
        #[arg(long, default_value_t = 100.0)]
        t_hi: f64,
        #[arg(long, default_value_t = 33)]
        points: usize,
    },
    /// The covering grid η_k.
    Grid {
        #[command(flatten)]
        common: Common,
        /// Half-width; defaults to grid_n from the config.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Sobolev norms of the given functions (default: the hat corpus).
    Norm {
        #[command(flatten)]
        common: Common,
        #[arg(long = "function")]
        functions: Vec<String>,
    },
    /// Strong, weak and block norms (default: the g corpus).
    Associate {
        #[command(flatten)]
        common: Common,
        #[arg(long = "function")]
        functions: Vec<String>,
        #[arg(long)]
        skip_blocks: bool,
    },
    /// Oscillator or witness constructions.
    Construct {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Kind::Oscillator)]
        kind: Kind,
        /// Density h (oscillator) or the functional f (witness).
        #[arg(long, default_value = "one")]
        h: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        d: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Fix the block count instead of deriving it from eps.
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long, default_value = "normalized")]
        mode: DensityMode,
        /// Number of witness terms.
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite names; defaults to the config's list.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Aggregate earlier CSVs into report.md and constants.csv.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Oscillator,
    Witness,
}

type Outcome<T> = std::result::Result<T, Failure>;

enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

trait Usage<T> {
    fn usage(self) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Usage<T> for std::result::Result<T, E> {
    fn usage(self) -> Outcome<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.into())
    }
}

struct Setup {
    cfg: RunConfig,
    out: PathBuf,
}

fn setup(common: &Common) -> Outcome<Setup> {
    let cfg = RunConfig::load(&common.config).usage()?;
    let out = cfg.out_dir(common.out.as_deref());
    Ok(Setup { cfg, out })
}

fn solution(cfg: &RunConfig) -> Outcome<EquilibriumSolution> {
    cfg.solution().context("weight pair rejected").usage()
}

fn emit(table: &Table, dir: &Path, echo: bool) -> anyhow::Result<()> {
    let path = table.write(dir)?;
    if echo {
        print!("{}", String::from_utf8(table.to_bytes()?)?);
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn equilibrium(common: &Common, t: &[f64], lo: f64, hi: f64, points: usize) -> Outcome<()> {
    let Setup { cfg, out } = setup(common)?;
    if t.is_empty() && !(lo > 0.0 && hi > lo && points >= 1) {
        return Err(Failure::Usage(anyhow::anyhow!("sweep needs 0 < t-lo < t-hi and points >= 1")));
    }
    if t.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Failure::Usage(anyhow::anyhow!("points must be positive")));
    }
    let sol = solution(&cfg)?;
    let ts = if t.is_empty() { log_spaced(lo, hi, points) } else { t.to_vec() };
    let mut table = Table::new("equilibrium", &["t", "a", "b", "a_inv", "residual_eq2", "residual_eq3"]);
    let mut series = Table::new("equilibrium_series", &["x", "y", "series"]);
    for &t in &ts {
        let c = sol.certificate(t)?;
        let a_inv = sol.a_inv(t)?;
        table.push(vec![num(t), num(c.a), num(c.b), num(a_inv), num(c.equilibrium), num(c.normalization)]);
        for (y, name) in [(c.a, "a"), (c.b, "b"), (a_inv, "a_inv")] {
            series.push(vec![num(t), num(y), name.into()]);
        }
    }
    emit(&table, &out, true)?;
    emit(&series, &out, false)?;
    Ok(())
}

fn grid(common: &Common, n: Option<usize>) -> Outcome<()> {
    let Setup { cfg, out } = setup(common)?;
    let sol = solution(&cfg)?;
    let n = n.unwrap_or(cfg.grid_n);
    if n < 1 {
        return Err(Failure::Usage(anyhow::anyhow!("grid half-width must be at least 1")));
    }
    let g = build_eta_grid(&sol, n)?;
    let mut table = Table::new("grid", &["k", "eta", "a_eta", "b_eta"]);
    for (k, eta) in g.iter() {
        let (a, b) = sol.window(eta)?;
        table.push(vec![k.to_string(), num(eta), num(a), num(b)]);
    }
    for stop in g.stops() {
        eprintln!("grid stopped at k = {} ({} side): {}", stop.index, stop.side, stop.reason);
    }
    emit(&table, &out, true)?;
    Ok(())
}

fn functions_or(specs: &[String], fallback: impl FnOnce() -> Result<Vec<HalfLineFunction>>) -> Outcome<Vec<HalfLineFunction>> {
    if specs.is_empty() {
        return Ok(fallback()?);
    }
    specs.iter().map(|s| parse_function(s)).collect::<anyhow::Result<Vec<_>>>().usage()
}

fn norm(common: &Common, specs: &[String]) -> Outcome<()> {
    let Setup { cfg, out } = setup(common)?;
    let pair = cfg.pair().usage()?;
    let fs = functions_or(specs, || hat_corpus(&cfg.corpus()))?;
    let quad = cfg.quad();
    let mut table = Table::new("norm", &NORM_HEADER);
    for f in &fs {
        table.norm_row(f.label(), "sobolev", &sobolev_norm(f, &pair, &quad)?);
    }
    emit(&table, &out, true)?;
    Ok(())
}

fn associate(common: &Common, specs: &[String], skip_blocks: bool) -> Outcome<()> {
    let Setup { cfg, out } = setup(common)?;
    let sol = solution(&cfg)?;
    let gs = functions_or(specs, || g_corpus(&cfg.corpus()))?;
    let quad = cfg.quad();
    let grid = if skip_blocks { None } else { Some(build_eta_grid(&sol, cfg.grid_n)?) };
    let mut table = Table::new("associate", &NORM_HEADER);
    for g in &gs {
        table.norm_row(g.label(), "strong", &strong_norm(g, &sol, &quad)?);
        table.norm_row(g.label(), "weak", &weak_norm(g, &sol, &quad)?);
        if let Some(grid) = &grid {
            table.norm_row(g.label(), "block", &block_norm(g, grid, &quad)?.report);
        }
    }
    emit(&table, &out, true)?;
    Ok(())
}

struct ConstructArgs<'a> {
    kind: Kind,
    h: &'a str,
    c: f64,
    d: f64,
    eps: f64,
    blocks: Option<usize>,
    mode: DensityMode,
    k: usize,
}

fn construct(common: &Common, a: ConstructArgs) -> Outcome<()> {
    let Setup { cfg, out } = setup(common)?;
    let sol = solution(&cfg)?;
    let h = parse_function(a.h).usage()?;
    let quad = cfg.quad();
    let mut norms = Table::new("construct_norms", &NORM_HEADER);
    match a.kind {
        Kind::Oscillator => {
            if !(0.0 < a.c && a.c < a.d) {
                return Err(Failure::Usage(anyhow::anyhow!("need 0 < c < d")));
            }
            let (g, plan) = match a.blocks {
                Some(n) => oscillator_with_blocks(&h, a.c, a.d, n, &sol, a.mode)?,
                None => oscillator(&h, a.c, a.d, a.eps, &sol, a.mode)?,
            };
            let mut table = Table::new("construct_plan", &["i", "alpha", "beta"]);
            for (i, (al, be)) in plan.alphas.iter().zip(&plan.betas).enumerate() {
                table.push(vec![(i + 1).to_string(), num(*al), num(*be)]);
            }
            let mut series = Table::new("construct_series", &["x", "y", "series"]);
            for i in 0..=512 {
                let x = a.c + (a.d - a.c) * i as f64 / 512.0;
                series.push(vec![num(x), num(g.evaluate(x)), "g".into()]);
            }
            let label = format!("oscillator n={}", plan.n);
            norms.norm_row(&label, "weak", &weak_norm(&g, &sol, &quad)?);
            norms.norm_row(&label, "strong", &strong_norm(&g, &sol, &quad)?);
            eprintln!("n = {}, mass = {:.6e}, comp constant = {:.6e}", plan.n, plan.mass, plan.comp_constant);
            emit(&table, &out, false)?;
            emit(&series, &out, false)?;
        }
        Kind::Witness => {
            let segments: Vec<(f64, f64)> = (1..=a.k.max(1)).map(|j| (j as f64 + 1.0, j as f64 + 2.0)).collect();
            let w = witness_unbounded(&h, &segments, &sol, a.k, &quad)?;
            let mut table = Table::new(
                "construct_witness",
                &["k", "lo", "hi", "min_abs", "theta", "epsilon", "pairing", "norm_bound", "partial_pairing"],
            );
            for (t, partial) in w.terms.iter().zip(&w.partial_pairings) {
                table.push(vec![
                    t.k.to_string(),
                    num(t.lo),
                    num(t.hi),
                    num(t.min_abs),
                    num(t.theta),
                    num(t.epsilon),
                    num(t.pairing),
                    num(t.norm_bound),
                    num(*partial),
                ]);
            }
            norms.norm_row(&format!("witness K={}", a.k), "weak", &weak_norm(&w.g, &sol, &quad)?);
            emit(&table, &out, false)?;
        }
    }
    emit(&norms, &out, true)?;
    Ok(())
}

fn verify(common: &Common, names: &[String]) -> Outcome<bool> {
    let Setup { mut cfg, out } = setup(common)?;
    if !names.is_empty() {
        cfg.suites = names.to_vec();
        cfg.validate().usage()?;
    }
    let sol = solution(&cfg)?;
    let checks = suites::run(&cfg, sol, &cfg.suites);
    let text = suites::summary(&checks, &cfg.suites);
    emit(&suites::table(&checks), &out, false)?;
    std::fs::write(out.join("verify_summary.txt"), &text)?;
    std::fs::write(out.join("verify_config.toml"), cfg.emit())?;
    print!("{text}");
    Ok(!suites::any_failed(&checks))
}

fn report(common: &Common) -> Outcome<()> {
    let Setup { out, .. } = setup(common)?;
    let (text, constants) = report::build(&out)?;
    std::fs::write(out.join("report.md"), &text)?;
    emit(&constants, &out, false)?;
    print!("{text}");
    Ok(())
}

fn execute(cli: Cli) -> Outcome<bool> {
    match cli.command {
        Command::Equilibrium { common, t, t_lo, t_hi, points } => equilibrium(&common, &t, t_lo, t_hi, points)?,
        Command::Grid { common, n } => grid(&common, n)?,
        Command::Norm { common, functions } => norm(&common, &functions)?,
        Command::Associate { common, functions, skip_blocks } => associate(&common, &functions, skip_blocks)?,
        Command::Construct { common, kind, h, c, d, eps, blocks, mode, k } => {
            construct(&common, ConstructArgs { kind, h: &h, c, d, eps, blocks, mode, k })?
        }
        Command::Verify { common, suites } => return verify(&common, &suites),
        Command::Report { common } => report(&common)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            eprintln!("usage: assocnorm <SUBCOMMAND> --config <FILE> [OPTIONS]; see --help");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
