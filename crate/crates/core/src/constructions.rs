//! Test functions used by the verification suites: the small-norm
//! oscillator, the extremal functions of the block decomposition, derivatives
//! of bumps, the unbounded-pairing witness and seeded corpora.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{EquilibriumSolution, EtaGrid};
use crate::error::{Error, Result};
use crate::function::HalfLineFunction;
use crate::functionals::{cell_kernels, grid_table};
use crate::quadrature::{self, integrate, panel_points, Primitive, QuadratureSpec};

/// Observed bound `weak_norm(g̃) ≤ OSCILLATOR_CONSTANT · ε` for oscillators
/// built by [`oscillator`] in normalized mode.
pub const OSCILLATOR_CONSTANT: f64 = 4.0;

/// Largest block count [`oscillator`] will build.
pub const MAX_BLOCKS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DensityMode {
    /// `g̃ = V1·|h|·(±)`, blocks of equal `|h|` mass.
    Raw,
    /// `g̃ = |h|·(±)`, blocks of equal `|h|/V1` mass.
    #[default]
    Normalized,
}

impl std::str::FromStr for DensityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "normalized" => Ok(Self::Normalized),
            other => Err(Error::InvalidInput(format!("unknown density mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorPlan {
    pub n: usize,
    /// Block ends `α_0 = c < … < α_n = d`.
    pub alphas: Vec<f64>,
    /// Sign switches `β_i ∈ (α_i, α_{i+1})`.
    pub betas: Vec<f64>,
    pub mode: DensityMode,
    pub epsilon: Option<f64>,
    /// Total mass of the partition density on `[c, d]`.
    pub mass: f64,
    /// `(∫_{a(c)}^d w V1^{p'} / ∫_c^d w V1^{p'})^{1/p'}`.
    pub comp_constant: f64,
}

impl OscillatorPlan {
    pub fn interval(&self) -> (f64, f64) {
        (self.alphas[0], *self.alphas.last().expect("n ≥ 1"))
    }

    /// `+1` on `[α_i, β_i]`, `−1` on `(β_i, α_{i+1})`, 0 outside `[c, d]`.
    pub fn sign(&self, x: f64) -> f64 {
        let (c, d) = self.interval();
        if !(x >= c && x <= d) || self.mass == 0.0 {
            return 0.0;
        }
        let i = self.alphas.partition_point(|a| *a <= x).clamp(1, self.n) - 1;
        if x <= self.betas[i] {
            1.0
        } else {
            -1.0
        }
    }
}

fn w_v1_moment(sol: &EquilibriumSolution, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    let pc = sol.p_conj();
    let pts = panel_points(lo, hi, quadrature::geometric_points(lo, hi, 1.5));
    let mut failure = None;
    let e = integrate(
        |t| match sol.v1_total(t) {
            Ok(v) => sol.w(t) * v.powf(pc),
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        &pts,
        quad,
    );
    match failure {
        Some(err) => Err(err),
        None => Ok(e.value),
    }
}

struct MassProfile {
    prim: Primitive,
    total: f64,
}

impl MassProfile {
    fn build(h: &HalfLineFunction, c: f64, d: f64, sol: &EquilibriumSolution, mode: DensityMode) -> Result<Self> {
        let pts = panel_points(c, d, h.breakpoints().iter().copied());
        let mut failure = None;
        let prim = Primitive::build(
            1,
            |x, out| {
                let v = h.evaluate(x).abs();
                out[0] = match mode {
                    DensityMode::Raw => v,
                    DensityMode::Normalized if v == 0.0 => 0.0,
                    DensityMode::Normalized => match sol.v1_total(x) {
                        Ok(v1) => v / v1,
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    },
                };
            },
            &pts,
            1e-14,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let total = prim.total(0);
        Ok(Self { prim, total })
    }

    /// The point where the cumulative mass reaches `target`.
    fn invert(&self, target: f64) -> f64 {
        quadrature::bisect_boundary(|x| self.prim.eval(x, 0) >= target, self.prim.lo(), self.prim.hi(), 0.0)
    }
}

fn check_interval(c: f64, d: f64) -> Result<()> {
    if !(c > 0.0 && d > c && d.is_finite()) {
        return Err(Error::InvalidInput(format!("oscillator needs 0 < c < d < ∞, got [{c}, {d}]")));
    }
    Ok(())
}

/// Splits `[c, d]` into `n` blocks of equal partition mass, each sign-balanced.
pub fn oscillator_with_blocks(
    h: &HalfLineFunction,
    c: f64,
    d: f64,
    n: usize,
    sol: &EquilibriumSolution,
    mode: DensityMode,
) -> Result<(HalfLineFunction, OscillatorPlan)> {
    check_interval(c, d)?;
    if n == 0 {
        return Err(Error::InvalidInput("oscillator needs at least one block".into()));
    }
    if n > MAX_BLOCKS {
        return Err(Error::BlockBudgetExceeded {
            needed: n as f64,
            limit: MAX_BLOCKS,
        });
    }
    let profile = MassProfile::build(h, c, d, sol, mode)?;
    let quad = QuadratureSpec::default();
    let inner = w_v1_moment(sol, c, d, &quad)?;
    let outer_lo = sol.a(c).unwrap_or(0.0);
    let outer = w_v1_moment(sol, outer_lo, d, &quad)?;
    let comp_constant = (outer / inner).powf(1.0 / sol.p_conj());
    build(h, c, d, n, sol, mode, profile, None, comp_constant)
}

/// The oscillator for target `ε`: `n > ε^{-1} (∫_c^d w V1^{p'})^{1/p'} · μ([c, d])`.
pub fn oscillator(
    h: &HalfLineFunction,
    c: f64,
    d: f64,
    epsilon: f64,
    sol: &EquilibriumSolution,
    mode: DensityMode,
) -> Result<(HalfLineFunction, OscillatorPlan)> {
    check_interval(c, d)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("ε must be positive, got {epsilon}")));
    }
    let profile = MassProfile::build(h, c, d, sol, mode)?;
    let quad = QuadratureSpec::default();
    let inner = w_v1_moment(sol, c, d, &quad)?;
    let needed = (inner.powf(1.0 / sol.p_conj()) * profile.total / epsilon).floor() + 1.0;
    if !(needed <= MAX_BLOCKS as f64) {
        return Err(Error::BlockBudgetExceeded {
            needed,
            limit: MAX_BLOCKS,
        });
    }
    let outer_lo = sol.a(c).unwrap_or(0.0);
    let outer = w_v1_moment(sol, outer_lo, d, &quad)?;
    let comp_constant = (outer / inner).powf(1.0 / sol.p_conj());
    build(h, c, d, needed as usize, sol, mode, profile, Some(epsilon), comp_constant)
}

#[allow(clippy::too_many_arguments)]
fn build(
    h: &HalfLineFunction,
    c: f64,
    d: f64,
    n: usize,
    sol: &EquilibriumSolution,
    mode: DensityMode,
    profile: MassProfile,
    epsilon: Option<f64>,
    comp_constant: f64,
) -> Result<(HalfLineFunction, OscillatorPlan)> {
    if profile.total == 0.0 {
        let plan = OscillatorPlan {
            n: 1,
            alphas: vec![c, d],
            betas: vec![0.5 * (c + d)],
            mode,
            epsilon,
            mass: 0.0,
            comp_constant,
        };
        return Ok((HalfLineFunction::zero(), plan));
    }
    let m = profile.total;
    let mut alphas = Vec::with_capacity(n + 1);
    alphas.push(c);
    for i in 1..n {
        alphas.push(profile.invert(m * i as f64 / n as f64));
    }
    alphas.push(d);
    let betas: Vec<f64> = (0..n).map(|i| profile.invert(m * (i as f64 + 0.5) / n as f64)).collect();
    let plan = OscillatorPlan {
        n,
        alphas,
        betas,
        mode,
        epsilon,
        mass: m,
        comp_constant,
    };
    let shared = Arc::new(plan.clone());
    let hh = h.clone();
    let sol = sol.clone();
    let eval = move |x: f64| {
        let s = shared.sign(x);
        if s == 0.0 {
            return 0.0;
        }
        let v = s * hh.evaluate(x).abs();
        match mode {
            DensityMode::Normalized => v,
            DensityMode::Raw => v * sol.v1_total(x).unwrap_or(f64::NAN),
        }
    };
    let mut bps = plan.alphas.clone();
    bps.extend(plan.betas.iter().copied());
    bps.extend(h.breakpoints().iter().copied().filter(|b| *b > c && *b < d));
    let g = HalfLineFunction::new(format!("osc[{c},{d}]n{n}"), eval)
        .with_support(c, d)
        .with_breakpoints(bps);
    Ok((g, plan))
}

/// `∫_{α_i}^{α_{i+1}} g/V1` for every block of `plan`, by direct quadrature.
pub fn block_means(
    g: &HalfLineFunction,
    plan: &OscillatorPlan,
    sol: &EquilibriumSolution,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let extra = g.breakpoints();
    (0..plan.n)
        .map(|i| {
            let (lo, hi) = (plan.alphas[i], plan.alphas[i + 1]);
            let mut pts: Vec<f64> = extra.iter().copied().filter(|b| *b > lo && *b < hi).collect();
            pts.push(plan.betas[i]);
            let pts = panel_points(lo, hi, pts);
            let mut failure = None;
            let e = integrate(
                |x| match sol.v1_total(x) {
                    Ok(v) => g.evaluate(x) / v,
                    Err(err) => {
                        failure.get_or_insert(err);
                        0.0
                    }
                },
                &pts,
                quad,
            );
            failure.map_or(Ok(e.value), Err)
        })
        .collect()
}

struct CellPrimitive {
    lo: f64,
    hi: f64,
    anchor: f64,
    prim: Primitive,
}

/// The extremal function `F^{(δ)}_{i,N}` of the block decomposition.
///
/// With `G = G^{(δ)}_{i,k}` and `φ = w·|G|^{p'-1} sgn G` on the cell
/// `[η_{k-1}, η_k]`, the function is
/// `F(x) = V1(x)^{-1} ∫ φ(t) K(t, x) dt` over `[η_{k-1}, x]` (`i = 1`) or
/// `[a(x), η_k]` (`i = 2`, for `x ∈ [η_k, η_{k+1}]`), with `K = W(a(x), t)`
/// for `δ = 0` and `K = V1(t)` for `δ = 1`, summed over `|k| ≤ N`.
/// Then `∫ g (F^{(δ)}_{1,N} + F^{(δ)}_{2,N})` equals the `δ` block sum over
/// `|k| ≤ N`.
pub fn extremal_f(
    g: &HalfLineFunction,
    grid: &EtaGrid,
    delta: u8,
    i: u8,
    n: i64,
    quad: &QuadratureSpec,
) -> Result<HalfLineFunction> {
    if delta > 1 || !(i == 1 || i == 2) || n < 0 {
        return Err(Error::InvalidInput(format!("bad extremal index δ={delta} i={i} N={n}")));
    }
    let (Some(e_lo), Some(e_hi)) = (grid.eta(-n - 1), grid.eta(n + 1)) else {
        let (glo, ghi) = grid.span();
        return Err(Error::GridUnderCoverage {
            grid_lo: glo,
            grid_hi: ghi,
            need_lo: f64::NAN,
            need_hi: f64::NAN,
        });
    };
    let label = format!("F{delta}{i}N{n}[{}]", g.label());
    let Some((x_lo, x_hi)) = g.window((quad.t_min, quad.t_max)) else {
        return Ok(HalfLineFunction::zero().with_label(label));
    };
    let (lo, hi) = (x_lo.max(e_lo), x_hi.min(e_hi));
    if !(hi > lo) {
        return Ok(HalfLineFunction::zero().with_label(label));
    }
    let sol = grid.solution().clone();
    let table = grid_table(g, grid, lo, hi, quad)?;
    let t_lo = sol.a(lo).unwrap_or(0.0);
    let pc = sol.p_conj();
    let idx = (i - 1) as usize + 2 * delta as usize;
    let bps: Vec<f64> = g.breakpoints().iter().copied().filter(|b| *b >= lo && *b <= hi).collect();
    let mut kinks = bps.clone();
    kinks.extend(bps.iter().filter_map(|b| sol.a(*b).ok()));

    let mut cells: Vec<Option<CellPrimitive>> = Vec::new();
    for k in -n..=n {
        let (l, u) = grid.cell(k).expect("grid covers ±(N+1)");
        if u <= t_lo || l >= hi {
            cells.push(None);
            continue;
        }
        let anchor = if i == 1 {
            grid.eta(k - 2).or_else(|| sol.a(l).ok()).unwrap_or(0.0)
        } else {
            l
        };
        let pts = panel_points(l, u, kinks.iter().copied().filter(|x| *x > l && *x < u));
        let mut failure = None;
        let dim = if delta == 0 { 2 } else { 1 };
        let prim = Primitive::build(
            dim,
            |t, out| {
                let r = cell_kernels(&table, &sol, u, t).and_then(|ker| Ok((ker[idx], sol.v1_total(t)?)));
                match r {
                    Ok((gv, v1)) => {
                        let phi = sol.w(t) * gv.abs().powf(pc - 1.0) * gv.signum();
                        if delta == 0 {
                            out[0] = phi;
                            out[1] = phi * sol.dual_mass(anchor, t);
                        } else {
                            out[0] = phi * v1;
                        }
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        out.iter_mut().for_each(|o| *o = 0.0);
                    }
                }
            },
            &pts,
            (quad.rel_tol * 1e-5).clamp(1e-14, 1e-10),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        cells.push(Some(CellPrimitive { lo: l, hi: u, anchor, prim }));
    }

    let etas: Vec<f64> = (-n - 1..=n + 1).map(|k| grid.eta(k).expect("covered")).collect();
    let cells = Arc::new(cells);
    let eval_sol = sol.clone();
    let eval = move |x: f64| -> f64 {
        // cell j of `etas` is [etas[j], etas[j+1]] and carries k = j − n
        let j = etas.partition_point(|e| *e <= x);
        if j == 0 || j >= etas.len() {
            return 0.0;
        }
        let j = j - 1;
        let slot = if i == 1 { Some(j) } else { j.checked_sub(1) };
        let Some(cell) = slot.and_then(|s| cells.get(s)).and_then(|c| c.as_ref()) else {
            return 0.0;
        };
        let Ok((a, b)) = eval_sol.window(x) else {
            return f64::NAN;
        };
        let v1 = eval_sol.dual_mass(a, b);
        let (s, e) = if i == 1 { (cell.lo, x.min(cell.hi)) } else { (a.max(cell.lo), cell.hi) };
        if !(e > s) {
            return 0.0;
        }
        let int = if delta == 0 {
            cell.prim.between(s, e, 1) - eval_sol.dual_mass(cell.anchor, a) * cell.prim.between(s, e, 0)
        } else {
            cell.prim.between(s, e, 0)
        };
        int / v1
    };
    let (s_lo, s_hi) = if i == 1 {
        (grid.eta(-n - 1).expect("covered"), grid.eta(n).expect("covered"))
    } else {
        (grid.eta(-n).expect("covered"), grid.eta(n + 1).expect("covered"))
    };
    let mut out_bps: Vec<f64> = grid.values().iter().copied().filter(|x| *x >= s_lo && *x <= s_hi).collect();
    out_bps.extend(kinks.iter().copied());
    out_bps.extend(kinks.iter().filter_map(|b| sol.a_inv(*b).ok()));
    out_bps.retain(|x| *x >= s_lo && *x <= s_hi);
    Ok(HalfLineFunction::new(label, eval).with_support(s_lo, s_hi).with_breakpoints(out_bps))
}

/// `g_φ = φ'` for a compactly supported `φ` with a declared derivative.
pub fn smooth_to_g(phi: &HalfLineFunction) -> Result<HalfLineFunction> {
    match phi.window((0.0, f64::INFINITY)) {
        None => return Ok(HalfLineFunction::zero().with_label(format!("d({})", phi.label()))),
        Some((lo, hi)) if phi.support().is_some() && lo > 0.0 && hi.is_finite() => {
            let d = phi.derivative_fn(false)?;
            Ok(HalfLineFunction::new(format!("d({})", phi.label()), move |x| d(x))
                .with_support(lo, hi)
                .with_breakpoints(phi.breakpoints().iter().copied()))
        }
        Some(_) => Err(Error::InvalidInput(format!(
            "{} must have compact support inside (0, ∞)",
            phi.label()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessTerm {
    pub k: usize,
    pub lo: f64,
    pub hi: f64,
    /// Sampled minimum of `|f|` on the segment.
    pub min_abs: f64,
    pub theta: f64,
    /// Oscillator target, chosen so that `weak_norm(g_k) ≤ 2^{-k}`.
    pub epsilon: f64,
    /// `θ_k ∫ |f|` over the segment, at least `1/k`.
    pub pairing: f64,
    pub norm_bound: f64,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub g: HalfLineFunction,
    pub terms: Vec<WitnessTerm>,
    pub plans: Vec<OscillatorPlan>,
    /// Running sums of `∫ |f g_k|`, measured on the built `g`.
    pub partial_pairings: Vec<f64>,
}

fn sampled_min_abs(f: &HalfLineFunction, lo: f64, hi: f64) -> f64 {
    let n = 1024;
    let mut m = f64::INFINITY;
    for j in 0..=n {
        m = m.min(f.evaluate(lo + (hi - lo) * j as f64 / n as f64).abs());
    }
    for b in f.breakpoints().iter().filter(|b| **b > lo && **b < hi) {
        m = m.min(f.evaluate(*b).abs());
    }
    m
}

/// The coefficients of the unbounded-pairing witness without building it.
pub fn witness_terms(
    f: &HalfLineFunction,
    segments: &[(f64, f64)],
    k_max: usize,
    quad: &QuadratureSpec,
) -> Result<Vec<WitnessTerm>> {
    if segments.len() < k_max || k_max == 0 {
        return Err(Error::InvalidInput(format!(
            "{} segments given, {k_max} needed",
            segments.len()
        )));
    }
    let segs = &segments[..k_max];
    for (j, s) in segs.iter().enumerate() {
        let prev_hi = if j == 0 { 0.0 } else { segs[j - 1].1 };
        if !(s.0 > 0.0 && s.1 > s.0 && s.0 >= prev_hi && s.1.is_finite()) {
            return Err(Error::InvalidInput(format!("segment {j} [{}, {}] is not disjoint and increasing", s.0, s.1)));
        }
    }
    segs.iter()
        .enumerate()
        .map(|(j, &(lo, hi))| {
            let k = j + 1;
            let m = sampled_min_abs(f, lo, hi);
            if !(m > 0.0) {
                return Err(Error::SegmentRejected { index: k, lo, hi });
            }
            let theta = 1.0 / (k as f64 * m * (hi - lo));
            let pts = panel_points(lo, hi, f.breakpoints().iter().copied());
            let mass = integrate(|x| f.evaluate(x).abs(), &pts, quad).value;
            let bound = 0.5f64.powi(k as i32);
            Ok(WitnessTerm {
                k,
                lo,
                hi,
                min_abs: m,
                theta,
                epsilon: bound / OSCILLATOR_CONSTANT,
                pairing: theta * mass,
                norm_bound: bound,
            })
        })
        .collect()
}

/// `g = Σ_{k ≤ k_max} g_k` with `|g_k| = θ_k` on segment `k` and
/// `weak_norm(g_k) ≤ 2^{-k}`, so `weak_norm(g) < 1` while `∫ |f g| ≥ Σ 1/k`.
pub fn witness_unbounded(
    f: &HalfLineFunction,
    segments: &[(f64, f64)],
    sol: &EquilibriumSolution,
    k_max: usize,
    quad: &QuadratureSpec,
) -> Result<Witness> {
    let terms = witness_terms(f, segments, k_max, quad)?;
    let mut plans = Vec::with_capacity(terms.len());
    let mut parts = Vec::with_capacity(terms.len());
    for t in &terms {
        let h = HalfLineFunction::new("theta", {
            let th = t.theta;
            move |_| th
        });
        let (gk, plan) = oscillator(&h, t.lo, t.hi, t.epsilon, sol, DensityMode::Normalized)?;
        plans.push(plan);
        parts.push(gk);
    }
    let los: Vec<f64> = terms.iter().map(|t| t.lo).collect();
    let his: Vec<f64> = terms.iter().map(|t| t.hi).collect();
    let shared = Arc::new(parts.clone());
    let (l2, h2) = (los.clone(), his.clone());
    let eval = move |x: f64| {
        let j = l2.partition_point(|l| *l <= x);
        if j == 0 || x > h2[j - 1] {
            return 0.0;
        }
        shared[j - 1].evaluate(x)
    };
    let mut bps = Vec::new();
    for p in &parts {
        bps.extend_from_slice(p.breakpoints());
    }
    let g = HalfLineFunction::new(format!("witness[K={k_max}]"), eval)
        .with_support(los[0], *his.last().expect("k_max ≥ 1"))
        .with_breakpoints(bps);
    let mut partial = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for (t, p) in terms.iter().zip(&parts) {
        let mut pts: Vec<f64> = p.breakpoints().to_vec();
        pts.extend(f.breakpoints().iter().copied());
        let pts = panel_points(t.lo, t.hi, pts);
        acc += integrate(|x| (f.evaluate(x) * p.evaluate(x)).abs(), &pts, quad).value;
        partial.push(acc);
    }
    Ok(Witness {
        g,
        terms,
        plans,
        partial_pairings: partial,
    })
}

/// Parameters of the seeded test-function corpora.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusSpec {
    pub seed: u64,
    pub hats: usize,
    pub bumps: usize,
    /// Supports are drawn inside `[lo, hi]`.
    pub lo: f64,
    pub hi: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            seed: 7,
            hats: 7,
            bumps: 3,
            lo: 0.5,
            hi: 4.0,
        }
    }
}

fn draw_support(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> (f64, f64) {
    let span = spec.hi - spec.lo;
    let width = rng.gen_range(0.15 * span..0.5 * span);
    let lo = rng.gen_range(spec.lo..spec.hi - width);
    (lo, lo + width)
}

/// Hats and quartic bumps with `f(0) = 0` and compact support in `(0, ∞)`.
pub fn hat_corpus(spec: &CorpusSpec) -> Result<Vec<HalfLineFunction>> {
    if !(spec.lo > 0.0 && spec.hi > spec.lo) {
        return Err(Error::InvalidInput(format!("corpus window [{}, {}]", spec.lo, spec.hi)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.hats + spec.bumps);
    for _ in 0..spec.hats {
        let (lo, hi) = draw_support(&mut rng, spec);
        let peak = lo + (hi - lo) * rng.gen_range(0.25..0.75);
        let height = rng.gen_range(0.5..2.0);
        out.push(HalfLineFunction::hat(lo, peak, hi, height)?);
    }
    for _ in 0..spec.bumps {
        let (lo, hi) = draw_support(&mut rng, spec);
        let height = rng.gen_range(0.5..2.0);
        out.push(HalfLineFunction::quartic_bump(lo, hi, height)?);
    }
    Ok(out)
}

/// Candidates for the associate side: indicators, hats and sign-changing
/// piecewise-linear functions, `hats + bumps` members in total.
pub fn g_corpus(spec: &CorpusSpec) -> Result<Vec<HalfLineFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let total = spec.hats + spec.bumps;
    let mut out = Vec::with_capacity(total);
    for j in 0..total {
        let (lo, hi) = draw_support(&mut rng, spec);
        let height = rng.gen_range(0.5..2.0);
        let g = match j % 3 {
            0 => HalfLineFunction::indicator(lo, hi).scale(height),
            1 => {
                let peak = lo + (hi - lo) * rng.gen_range(0.25..0.75);
                HalfLineFunction::hat(lo, peak, hi, height)?
            }
            _ => {
                let u = rng.gen_range(0.2..0.45);
                let v = rng.gen_range(0.55..0.8);
                let down = -rng.gen_range(0.5..2.0);
                HalfLineFunction::piecewise_linear(
                    format!("zigzag[{lo},{hi}]"),
                    vec![(lo, 0.0), (lo + u * (hi - lo), height), (lo + v * (hi - lo), down), (hi, 0.0)],
                )?
            }
        };
        out.push(g);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::build_eta_grid;
    use crate::functionals::{block_norm, weak_norm};
    use crate::weights::{Weight, WeightPair};

    fn linear() -> EquilibriumSolution {
        let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
        EquilibriumSolution::new(pair).unwrap()
    }

    #[test]
    fn oscillator_blocks_balance() {
        let sol = linear();
        let one = HalfLineFunction::indicator(1.0, 2.0);
        let (g, plan) = oscillator(&one, 1.0, 2.0, 0.1, &sol, DensityMode::Normalized).unwrap();
        assert!(plan.n >= 1);
        assert_eq!(plan.alphas.len(), plan.n + 1);
        let means = block_means(&g, &plan, &sol, &QuadratureSpec::default()).unwrap();
        let worst = means.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-10 * plan.mass, "{worst}");
        assert_eq!(g.evaluate(1.5).abs(), 1.0);
        let q = QuadratureSpec::default();
        let w = weak_norm(&g, &sol, &q).unwrap().value;
        assert!(w <= OSCILLATOR_CONSTANT * 0.1, "{w}");
    }

    #[test]
    fn raw_mode_and_zero_input() {
        let sol = linear();
        let one = HalfLineFunction::indicator(1.0, 2.0);
        let (g, plan) = oscillator_with_blocks(&one, 1.0, 2.0, 8, &sol, DensityMode::Raw).unwrap();
        let means = block_means(&g, &plan, &sol, &QuadratureSpec::default()).unwrap();
        assert!(means.iter().all(|m| m.abs() < 1e-10 * plan.mass));
        let v1 = sol.v1_total(1.3).unwrap();
        assert!((g.evaluate(1.3).abs() - v1).abs() < 1e-14);
        let (z, plan) = oscillator(&HalfLineFunction::zero(), 1.0, 2.0, 0.1, &sol, DensityMode::Normalized).unwrap();
        assert_eq!(plan.n, 1);
        assert_eq!(z.evaluate(1.5), 0.0);
        assert!(matches!(
            oscillator(&one, 1.0, 2.0, 1e-9, &sol, DensityMode::Normalized),
            Err(Error::BlockBudgetExceeded { .. })
        ));
    }

    #[test]
    fn extremal_pairing_matches_block_sum() {
        let sol = linear();
        let grid = build_eta_grid(&sol, 5).unwrap();
        let g = HalfLineFunction::indicator(1.0, 2.0);
        let q = QuadratureSpec::default();
        let f1 = extremal_f(&g, &grid, 0, 1, 3, &q).unwrap();
        let f2 = extremal_f(&g, &grid, 0, 2, 3, &q).unwrap();
        let sum = f1.add(&f2);
        let pts = panel_points(1.0, 2.0, sum.breakpoints().iter().copied());
        let pairing = integrate(|x| g.evaluate(x) * sum.evaluate(x), &pts, &q).value;
        let blocks = block_norm(&g, &grid, &q).unwrap().block_sum(0, Some(3));
        assert!((pairing - blocks).abs() <= 1e-5 * blocks, "{pairing} {blocks}");
    }

    #[test]
    fn smooth_to_g_needs_compact_support() {
        let bump = HalfLineFunction::quartic_bump(1.0, 3.0, 1.0).unwrap();
        let g = smooth_to_g(&bump).unwrap();
        assert_eq!(g.evaluate(2.0), 0.0);
        assert!(smooth_to_g(&HalfLineFunction::new("x", |x| x).with_derivative(|_| 1.0)).is_err());
    }

    #[test]
    fn witness_rejects_empty_segments() {
        let f = HalfLineFunction::indicator(1.0, 2.0);
        let r = witness_terms(&f, &[(3.0, 4.0)], 1, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::SegmentRejected { index: 1, .. })));
    }

    #[test]
    fn corpus_is_seeded() {
        let spec = CorpusSpec::default();
        let a = hat_corpus(&spec).unwrap();
        let b = hat_corpus(&spec).unwrap();
        assert_eq!(a.len(), 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label(), y.label());
            assert_eq!(x.evaluate(0.0), 0.0);
        }
        assert_eq!(g_corpus(&spec).unwrap().len(), 10);
    }
}
