//! The Sobolev norm and the associate-norm functionals.
//!
//! With `w = v1^{-p'}`, `V1` the window mass and `[t, a⁻¹(t)]` the forward
//! window at `t`:
//!
//! * strong: `𝖦(g)^{p'} = ∫ w(t) (∫_t^{a⁻¹(t)} |g|)^{p'} dt`
//! * weak, first part: `𝔾(g)^{p'} = ∫ w(t) |∫_t^{a⁻¹(t)} g(x)/V1(x) · W(a(x), t) dx|^{p'} dt`
//! * weak, second part: `𝒢(g)^{p'} = ∫ w(t) V1(t)^{p'} |∫_t^{a⁻¹(t)} g/V1|^{p'} dt`
//!
//! where `W(s, t) = ∫_s^t w`. The inner integrals are never computed by a
//! nested quadrature. Instead the primitives of `|g|`, `g/V1` and
//! `g·W(A, a(x))/V1` are tabulated once as piecewise Chebyshev series, so each
//! inner integral is a difference of table lookups and keeps its sign exactly.
//! Since `W(a(x), t) = W(A, t) − W(A, a(x))` for any anchor `A`, the kernel of
//! `𝔾` splits into a part depending only on `t` and a tabulated part in `x`.
//! The anchor is chosen per block of the `x` axis so that the two terms stay
//! of the size of `V1` and the subtraction does not cancel.

use crate::equilibrium::{EquilibriumSolution, EtaGrid};
use crate::error::{Error, Result, Side};
use crate::function::HalfLineFunction;
use crate::quadrature::{self, integrate, integrate_vec, panel_points, Estimate, Primitive, QuadratureSpec};
use crate::weights::WeightPair;

pub const G_FRAK: &str = "G_frak";
pub const G_CAL: &str = "G_cal";

/// A computed norm with its error estimate and the window it was taken over.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub est_error: f64,
    pub truncation_used: (f64, f64),
    /// Named parts; for the weak norm these are `G_frak` and `G_cal`.
    pub components: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl NormReport {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            est_error: 0.0,
            truncation_used: (0.0, 0.0),
            components: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// `I^{1/q}` with the propagated error of `I`.
fn root(e: &Estimate, q: f64) -> (f64, f64) {
    let v = e.value.max(0.0);
    let r = v.powf(1.0 / q);
    let err = if v > 0.0 { r / (q * v) * e.error } else { e.error.powf(1.0 / q) };
    (r, err)
}

fn primitive_tol(quad: &QuadratureSpec) -> f64 {
    (quad.rel_tol * 1e-5).clamp(1e-14, 1e-10)
}

/// `‖v0 f‖_p + ‖v1 f'‖_p`.
pub fn sobolev_norm(f: &HalfLineFunction, pair: &WeightPair, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    let Some((lo, hi)) = f.window((quad.t_min, quad.t_max)) else {
        return Ok(NormReport::zero());
    };
    let mut warnings = Vec::new();
    if !f.has_derivative() && quad.allow_numeric_derivative {
        warnings.push(format!("numeric derivative used for {}", f.label()));
    }
    let df = f.derivative_fn(quad.allow_numeric_derivative)?;
    let p = pair.p();
    let mut pts = f.breakpoints().to_vec();
    if lo > 0.0 {
        pts.extend(quadrature::geometric_points(lo, hi, 2.0));
    }
    let pts = panel_points(lo, hi, pts);
    let [e0, e1] = integrate_vec(
        |x| {
            let a = (pair.v0.evaluate(x) * f.evaluate(x)).abs().powf(p);
            let b = (pair.v1.evaluate(x) * df(x)).abs().powf(p);
            [a, b]
        },
        &pts,
        quad,
    );
    for (e, name) in [(&e0, "v0 f"), (&e1, "v1 f'")] {
        if !e.converged {
            warnings.push(format!("quadrature for ‖{name}‖ did not reach tolerance"));
        }
    }
    let (n0, r0) = root(&e0, p);
    let (n1, r1) = root(&e1, p);
    Ok(NormReport {
        value: n0 + n1,
        est_error: r0 + r1,
        truncation_used: (lo, hi),
        components: vec![("v0_f".into(), n0), ("v1_df".into(), n1)],
        warnings,
    })
}

/// Inner integrals over pieces of a forward window.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Inner {
    /// `∫ |g|`.
    pub abs: f64,
    /// `∫ g/V1`.
    pub q: f64,
    /// `∫ g(x)/V1(x) · W(a(x), t) dx`.
    pub frak: f64,
}

/// Tabulated primitives of `g` over a union of blocks `[B_j, B_{j+1}]`.
pub(crate) struct InnerTable {
    sol: EquilibriumSolution,
    blocks: Vec<f64>,
    anchors: Vec<f64>,
    prim: Primitive,
    weak: bool,
}

impl InnerTable {
    /// `blocks` must be increasing and every forward window `[t, a⁻¹(t)]`
    /// must meet at most two consecutive blocks for the anchors to stay local.
    pub fn build(
        g: &HalfLineFunction,
        sol: &EquilibriumSolution,
        blocks: Vec<f64>,
        weak: bool,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        let anchors = if weak {
            blocks[..blocks.len() - 1]
                .iter()
                .map(|&b| match sol.a(b) {
                    Ok(a) => Ok(a),
                    Err(Error::WindowUnsolvable { .. }) if sol.dual_mass(0.0, b).is_finite() => Ok(0.0),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let (lo, hi) = (blocks[0], *blocks.last().expect("at least two block ends"));
        let mut pts: Vec<f64> = blocks.clone();
        pts.extend(g.breakpoints().iter().copied());
        let pts = panel_points(lo, hi, pts);
        let mut failure: Option<Error> = None;
        let dim = if weak { 3 } else { 1 };
        let prim = Primitive::build(
            dim,
            |x, out| {
                let gx = g.evaluate(x);
                out[0] = gx.abs();
                if !weak {
                    return;
                }
                match sol.window(x) {
                    Ok((a, b)) => {
                        let v1 = sol.dual_mass(a, b);
                        let j = blocks.partition_point(|b| *b <= x).clamp(1, blocks.len() - 1) - 1;
                        out[1] = gx / v1;
                        out[2] = gx * sol.dual_mass(anchors[j], a) / v1;
                    }
                    Err(e) => {
                        if gx != 0.0 && failure.is_none() {
                            failure = Some(e);
                        }
                        out[1] = 0.0;
                        out[2] = 0.0;
                    }
                }
            },
            &pts,
            primitive_tol(quad),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(Self {
            sol: sol.clone(),
            blocks,
            anchors,
            prim,
            weak,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.blocks[0], *self.blocks.last().expect("non-empty"))
    }

    /// Inner integrals over `x ∈ [s, e]`, with the `𝔾` kernel evaluated at `t`.
    pub fn segment(&self, t: f64, s: f64, e: f64) -> Inner {
        let (lo, hi) = self.range();
        let (s, e) = (s.max(lo), e.min(hi));
        let mut out = Inner::default();
        if !(e > s) {
            return out;
        }
        out.abs = self.prim.between(s, e, 0);
        if !self.weak {
            return out;
        }
        let mut j = self.blocks.partition_point(|b| *b <= s).clamp(1, self.blocks.len() - 1) - 1;
        while j + 1 < self.blocks.len() && self.blocks[j] < e {
            let (l, h) = (s.max(self.blocks[j]), e.min(self.blocks[j + 1]));
            if h > l {
                let dq = self.prim.between(l, h, 1);
                let dr = self.prim.between(l, h, 2);
                out.q += dq;
                out.frak += self.sol.dual_mass(self.anchors[j], t) * dq - dr;
            }
            j += 1;
        }
        out
    }
}

/// Block ends `x_lo, a⁻¹(x_lo), a⁻¹(a⁻¹(x_lo)), …` until past `x_hi`.
fn forward_chain(sol: &EquilibriumSolution, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut chain = vec![lo];
    while *chain.last().expect("non-empty") < hi {
        let next = sol.a_inv(*chain.last().expect("non-empty"))?;
        if !(next > *chain.last().expect("non-empty")) || chain.len() > 100_000 {
            return Err(Error::WindowUnsolvable {
                t: *chain.last().expect("non-empty"),
                endpoint: Side::Upper,
            });
        }
        chain.push(next.min(hi));
        if next >= hi {
            break;
        }
    }
    if chain.len() < 2 {
        chain.push(hi);
    }
    Ok(chain)
}

/// Support of `g` as seen by the window functionals: never starting at 0.
fn x_window(g: &HalfLineFunction, quad: &QuadratureSpec, warnings: &mut Vec<String>) -> Option<(f64, f64)> {
    let (lo, hi) = g.window((quad.t_min, quad.t_max))?;
    if g.support().is_none() {
        warnings.push(format!("no declared support; truncated to [{}, {}]", quad.t_min, quad.t_max));
    }
    if lo <= 0.0 {
        warnings.push(format!("support starts at 0; cut at {}", quad.t_min));
        return (hi > quad.t_min).then_some((quad.t_min, hi));
    }
    Some((lo, hi))
}

/// Lower end of the outer integral: `a(x_lo)`, or 0 where no window reaches.
fn outer_lo(sol: &EquilibriumSolution, x_lo: f64) -> Result<f64> {
    match sol.a(x_lo) {
        Ok(a) => Ok(a),
        Err(Error::WindowUnsolvable {
            endpoint: Side::Lower, ..
        }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn outer_points(sol: &EquilibriumSolution, lo: f64, hi: f64, kinks: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = kinks.to_vec();
    pts.extend(kinks.iter().filter_map(|&x| sol.a(x).ok()));
    if lo > 0.0 {
        pts.extend(quadrature::geometric_points(lo, hi, 1.5));
    } else {
        pts.extend(quadrature::geometric_points(hi * 1e-3, hi, 1.5));
    }
    panel_points(lo, hi, pts)
}

/// `𝖦(g)`.
pub fn strong_norm(g: &HalfLineFunction, sol: &EquilibriumSolution, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    let mut warnings = Vec::new();
    let Some((x_lo, x_hi)) = x_window(g, quad, &mut warnings) else {
        return Ok(NormReport::zero());
    };
    let table = InnerTable::build(g, sol, vec![x_lo, x_hi], false, quad)?;
    let t_lo = outer_lo(sol, x_lo)?;
    let pc = sol.p_conj();
    let pts = outer_points(sol, t_lo, x_hi, g.breakpoints());
    let mut failure = None;
    let e = integrate(
        |t| match sol.a_inv(t) {
            Ok(ai) => sol.w(t) * table.segment(t, t, ai).abs.powf(pc),
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        &pts,
        quad,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    if !e.converged {
        warnings.push("outer quadrature did not reach tolerance".into());
    }
    let (value, est_error) = root(&e, pc);
    Ok(NormReport {
        value,
        est_error,
        truncation_used: (t_lo, x_hi),
        components: vec![("G_sans".into(), value)],
        warnings,
    })
}

/// `𝔾(g) + 𝒢(g)`, both parts reported as components.
pub fn weak_norm(g: &HalfLineFunction, sol: &EquilibriumSolution, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    let mut warnings = Vec::new();
    let Some((x_lo, x_hi)) = x_window(g, quad, &mut warnings) else {
        let mut r = NormReport::zero();
        r.components = vec![(G_FRAK.into(), 0.0), (G_CAL.into(), 0.0)];
        return Ok(r);
    };
    let blocks = forward_chain(sol, x_lo, x_hi)?;
    let table = InnerTable::build(g, sol, blocks.clone(), true, quad)?;
    let t_lo = outer_lo(sol, x_lo)?;
    let pc = sol.p_conj();
    let mut kinks = g.breakpoints().to_vec();
    kinks.extend(blocks.iter().copied());
    let pts = outer_points(sol, t_lo, x_hi, &kinks);
    let mut failure = None;
    let [ef, ec] = integrate_vec(
        |t| {
            let r = sol.a_inv(t).and_then(|ai| Ok((ai, sol.v1_total(t)?)));
            match r {
                Ok((ai, v1)) => {
                    let inner = table.segment(t, t, ai);
                    let w = sol.w(t);
                    [w * inner.frak.abs().powf(pc), w * (v1 * inner.q.abs()).powf(pc)]
                }
                Err(err) => {
                    failure.get_or_insert(err);
                    [0.0, 0.0]
                }
            }
        },
        &pts,
        quad,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    if !(ef.converged && ec.converged) {
        warnings.push("outer quadrature did not reach tolerance".into());
    }
    let (frak, rf) = root(&ef, pc);
    let (cal, rc) = root(&ec, pc);
    Ok(NormReport {
        value: frak + cal,
        est_error: rf + rc,
        truncation_used: (t_lo, x_hi),
        components: vec![(G_FRAK.into(), frak), (G_CAL.into(), cal)],
        warnings,
    })
}

/// One block integral `∫_{η_{k-1}}^{η_k} w |G^{(δ)}_{i,k}|^{p'}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockEntry {
    pub k: i64,
    pub i: u8,
    pub delta: u8,
    pub value: f64,
}

/// Block form of the weak norm with the table of block integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockNormReport {
    pub report: NormReport,
    pub blocks: Vec<BlockEntry>,
}

impl BlockNormReport {
    /// Sum of the entries with the given `δ`, restricted to `|k| ≤ n` when given.
    pub fn block_sum(&self, delta: u8, n: Option<i64>) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.delta == delta && n.map_or(true, |n| b.k.abs() <= n))
            .map(|b| b.value)
            .sum()
    }
}

/// The kernels `G^{(δ)}_{i,k}(t)` for `t` in cell `k`, in the order
/// `[(1,0), (2,0), (1,1), (2,1)]`.
pub(crate) fn cell_kernels(table: &InnerTable, sol: &EquilibriumSolution, eta_k: f64, t: f64) -> Result<[f64; 4]> {
    let ai = sol.a_inv(t)?;
    let v1 = sol.v1_total(t)?;
    let g1 = table.segment(t, t, eta_k);
    let g2 = table.segment(t, eta_k, ai);
    Ok([g1.frak, g2.frak, v1 * g1.q, v1 * g2.q])
}

/// Inner-integral table over the grid cells touching `[x_lo, x_hi]`.
pub(crate) fn grid_table(
    g: &HalfLineFunction,
    grid: &EtaGrid,
    x_lo: f64,
    x_hi: f64,
    quad: &QuadratureSpec,
) -> Result<InnerTable> {
    let (glo, ghi) = grid.span();
    if x_lo < glo || x_hi > ghi {
        return Err(Error::GridUnderCoverage {
            grid_lo: glo,
            grid_hi: ghi,
            need_lo: x_lo,
            need_hi: x_hi,
        });
    }
    let mut blocks: Vec<f64> = grid
        .values()
        .windows(2)
        .filter(|w| w[1] > x_lo && w[0] < x_hi)
        .flat_map(|w| [w[0], w[1]])
        .collect();
    blocks.dedup();
    InnerTable::build(g, grid.solution(), blocks, true, quad)
}

/// The block form of the weak norm over the cells of `grid`.
pub fn block_norm(g: &HalfLineFunction, grid: &EtaGrid, quad: &QuadratureSpec) -> Result<BlockNormReport> {
    quad.validate()?;
    let sol = grid.solution();
    let mut warnings = Vec::new();
    let Some((x_lo, x_hi)) = x_window(g, quad, &mut warnings) else {
        return Ok(BlockNormReport {
            report: NormReport::zero(),
            blocks: Vec::new(),
        });
    };
    let t_lo = outer_lo(sol, x_lo)?;
    let (glo, ghi) = grid.span();
    if t_lo < glo || x_hi > ghi {
        return Err(Error::GridUnderCoverage {
            grid_lo: glo,
            grid_hi: ghi,
            need_lo: t_lo,
            need_hi: x_hi,
        });
    }
    let table = grid_table(g, grid, x_lo, x_hi, quad)?;
    let pc = sol.p_conj();
    let mut entries = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for k in grid.min_index() + 1..=grid.max_index() {
        let (lo, hi) = grid.cell(k).expect("k in range");
        if !(hi > t_lo && lo < x_hi) {
            continue;
        }
        let kinks: Vec<f64> = g.breakpoints().iter().copied().filter(|b| *b > lo && *b < hi).collect();
        let pts = outer_points(sol, lo, hi, &kinks);
        let pts: Vec<f64> = pts.into_iter().filter(|x| *x >= lo && *x <= hi).collect();
        let mut failure = None;
        let est = integrate_vec(
            |t| match cell_kernels(&table, sol, hi, t) {
                Ok(ker) => {
                    let w = sol.w(t);
                    ker.map(|v| w * v.abs().powf(pc))
                }
                Err(err) => {
                    failure.get_or_insert(err);
                    [0.0; 4]
                }
            },
            &pts,
            quad,
        );
        if let Some(err) = failure {
            return Err(err);
        }
        for (idx, e) in est.iter().enumerate() {
            let (i, delta) = [(1, 0), (2, 0), (1, 1), (2, 1)][idx];
            entries.push(BlockEntry {
                k,
                i,
                delta,
                value: e.value,
            });
            total += e.value;
            total_err += e.error;
            if !e.converged {
                warnings.push(format!("block k={k} i={i} δ={delta} did not reach tolerance"));
            }
        }
    }
    let (value, est_error) = root(
        &Estimate {
            value: total,
            error: total_err,
            converged: true,
        },
        pc,
    );
    Ok(BlockNormReport {
        report: NormReport {
            value,
            est_error,
            truncation_used: (t_lo, x_hi),
            components: vec![("block_sum".into(), total)],
            warnings,
        },
        blocks: entries,
    })
}

/// `g·χ_[η_{-n}, η_n]`.
pub fn truncate(g: &HalfLineFunction, grid: &EtaGrid, n: i64) -> Result<HalfLineFunction> {
    match (grid.eta(-n), grid.eta(n)) {
        (Some(lo), Some(hi)) => Ok(g.restrict(lo, hi).with_label(format!("({})_N{n}", g.label()))),
        _ => {
            let (glo, ghi) = grid.span();
            Err(Error::GridUnderCoverage {
                grid_lo: glo,
                grid_hi: ghi,
                need_lo: f64::NAN,
                need_hi: f64::NAN,
            })
        }
    }
}

/// The explicit dual norm for unit weights: the sum of
/// `(∫_0^∞ |∫_t^{t+1/2} v|^{p'} dt)^{1/p'}` and
/// `(∫_0^{1/2} t^{-p'} |∫_0^t ∫_t^{y+1/2} v dy|^{p'} dt + ∫_{1/2}^∞ |∫_{t-1/2}^t ∫_t^{y+1/2} v dy|^{p'} dt)^{1/p'}`.
pub fn remark_unit_norm(v: &HalfLineFunction, pair: &WeightPair, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    if !pair.is_unit() {
        return Err(Error::NonUnitWeights {
            v0: pair.v0.family().to_string(),
            v1: pair.v1.family().to_string(),
        });
    }
    let Some((lo, hi)) = v.window((quad.t_min, quad.t_max)) else {
        return Ok(NormReport::zero());
    };
    let pc = pair.p_conj();
    let tol = primitive_tol(quad);
    let p_pts = panel_points(0.0, hi + 1.0, v.breakpoints().iter().copied().chain([lo, hi]));
    let prim_v = Primitive::build(1, |x, out| out[0] = v.evaluate(x), &p_pts, tol);
    let pp_pts = panel_points(0.0, hi + 1.0, p_pts.iter().copied());
    let prim_pv = Primitive::build(1, |x, out| out[0] = prim_v.eval(x, 0), &pp_pts, tol);
    let big_p = |x: f64| prim_v.eval(x, 0);
    let big_pp = |x: f64| prim_pv.eval(x, 0);

    let t_lo = (lo - 0.5).max(0.0);
    let mut kinks: Vec<f64> = v.breakpoints().to_vec();
    kinks.extend(v.breakpoints().iter().map(|b| b - 0.5));
    kinks.push(0.5);
    let pts = panel_points(t_lo, hi, kinks);
    let [first, second] = integrate_vec(
        |t| {
            let one = (big_p(t + 0.5) - big_p(t)).abs().powf(pc);
            let base = if t < 0.5 { 0.0 } else { t - 0.5 };
            let s = big_pp(t + 0.5) - big_pp(base + 0.5) - (t - base) * big_p(t);
            let two = if t < 0.5 {
                (s.abs() / t).powf(pc)
            } else {
                s.abs().powf(pc)
            };
            [one, two]
        },
        &pts,
        quad,
    );
    let (a, ea) = root(&first, pc);
    let (b, eb) = root(&second, pc);
    Ok(NormReport {
        value: a + b,
        est_error: ea + eb,
        truncation_used: (t_lo, hi),
        components: vec![("first".into(), a), ("second".into(), b)],
        warnings: Vec::new(),
    })
}

/// `(∫_{a(t)}^t w·(V1⁺)^α, V1(t)^{α+1})`: the left side never exceeds the right.
pub fn kernel_bound(sol: &EquilibriumSolution, t: f64, alpha: f64, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let (a, b) = sol.window(t)?;
    let v1 = sol.dual_mass(a, b);
    let pts = panel_points(a, t, quadrature::geometric_points(a.max(1e-300), t, 1.5));
    let mut failure = None;
    let e = integrate(
        |x| match sol.v1(x) {
            Ok(m) => sol.w(x) * m.plus.powf(alpha),
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        &pts,
        quad,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    Ok((e.value, v1.powf(alpha + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::build_eta_grid;
    use crate::weights::Weight;

    fn linear() -> EquilibriumSolution {
        let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
        EquilibriumSolution::new(pair).unwrap()
    }

    fn unit() -> EquilibriumSolution {
        let pair = WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap();
        EquilibriumSolution::new_unchecked(pair)
    }

    #[test]
    fn sobolev_norm_of_hat() {
        let hat = HalfLineFunction::hat(0.0, 1.0, 2.0, 1.0).unwrap();
        let q = QuadratureSpec::default();
        let unit_pair = WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap();
        let r = sobolev_norm(&hat, &unit_pair, &q).unwrap();
        assert!((r.value - ((2.0f64 / 3.0).sqrt() + 2f64.sqrt())).abs() < 1e-10);
        let lin = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
        let r = sobolev_norm(&hat, &lin, &q).unwrap();
        assert!((r.value - ((2.0f64 / 3.0).sqrt() + (8.0f64 / 3.0).sqrt())).abs() < 1e-10);
        assert_eq!(sobolev_norm(&HalfLineFunction::zero(), &lin, &q).unwrap().value, 0.0);
    }

    #[test]
    fn strong_norm_unit_indicator() {
        let r = strong_norm(&HalfLineFunction::indicator(1.0, 2.0), &unit(), &QuadratureSpec::default()).unwrap();
        assert!((r.value - (5.0f64 / 24.0).sqrt()).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn weak_norm_bounded_by_strong() {
        let sol = linear();
        let g = HalfLineFunction::indicator(1.0, 2.0);
        let q = QuadratureSpec::default();
        let s = strong_norm(&g, &sol, &q).unwrap();
        let w = weak_norm(&g, &sol, &q).unwrap();
        let frak = w.component(G_FRAK).unwrap();
        let cal = w.component(G_CAL).unwrap();
        assert!(frak > 0.0 && cal > 0.0);
        assert!(frak <= 0.5 * s.value * (1.0 + 1e-9));
        assert!(cal <= 2.0 * s.value * (1.0 + 1e-9));
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let sol = linear();
        let q = QuadratureSpec::default();
        let z = HalfLineFunction::zero();
        assert_eq!(strong_norm(&z, &sol, &q).unwrap().value, 0.0);
        assert_eq!(weak_norm(&z, &sol, &q).unwrap().value, 0.0);
        let grid = build_eta_grid(&sol, 3).unwrap();
        let b = block_norm(&z, &grid, &q).unwrap();
        assert_eq!(b.report.value, 0.0);
    }

    #[test]
    fn blocks_follow_support() {
        let sol = linear();
        let grid = build_eta_grid(&sol, 4).unwrap();
        let (e0, e1) = grid.cell(1).unwrap();
        let g = HalfLineFunction::indicator(e0, e1);
        let b = block_norm(&g, &grid, &QuadratureSpec::default()).unwrap();
        for entry in &b.blocks {
            let expected_nonzero = (entry.k == 0 && entry.i == 2) || (entry.k == 1 && entry.i == 1);
            if expected_nonzero {
                assert!(entry.value > 1e-8, "{entry:?}");
            } else {
                assert!(entry.value.abs() < 1e-14, "{entry:?}");
            }
        }
    }

    #[test]
    fn remark_first_term() {
        let pair = WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap();
        let r = remark_unit_norm(&HalfLineFunction::indicator(1.0, 2.0), &pair, &QuadratureSpec::default()).unwrap();
        let first = r.component("first").unwrap();
        assert!((first * first - 5.0 / 24.0).abs() < 1e-10);
        let lin = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
        assert!(matches!(
            remark_unit_norm(&HalfLineFunction::indicator(1.0, 2.0), &lin, &QuadratureSpec::default()),
            Err(Error::NonUnitWeights { .. })
        ));
    }

    #[test]
    fn kernel_bound_holds() {
        let sol = linear();
        for &t in &[0.5, 1.0, 3.0] {
            for &alpha in &[0.5, 1.0, 2.0] {
                let (lhs, rhs) = kernel_bound(&sol, t, alpha, &QuadratureSpec::default()).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-9), "{lhs} {rhs}");
            }
        }
    }

    #[test]
    fn truncation_outside_grid_is_reported() {
        let sol = linear();
        let grid = build_eta_grid(&sol, 2).unwrap();
        let g = HalfLineFunction::indicator(1.0, 2.0);
        assert!(truncate(&g, &grid, 3).is_err());
        let t = truncate(&g, &grid, 2).unwrap();
        for &x in &[1.0, 1.3, 2.0, 2.05] {
            assert_eq!(t.evaluate(x), g.evaluate(x));
        }
    }
}
