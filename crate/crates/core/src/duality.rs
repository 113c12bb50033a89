//! Pairings, lower estimates of the dual functional by explicit families, and
//! the verification suites built on them.

use rayon::prelude::*;

use crate::constructions::{extremal_f, oscillator, smooth_to_g, DensityMode, OSCILLATOR_CONSTANT};
use crate::equilibrium::{EquilibriumSolution, EtaGrid};
use crate::error::{Error, Result};
use crate::function::HalfLineFunction;
use crate::functionals::{sobolev_norm, weak_norm};
use crate::quadrature::{self, integrate, panel_points, scan_max, Estimate, Primitive, QuadratureSpec};

/// Combination weights tried when mixing the two lower-bound mechanisms.
pub const MIX_WEIGHTS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// `∫ f g` over the common window.
pub fn pairing(f: &HalfLineFunction, g: &HalfLineFunction, quad: &QuadratureSpec) -> Result<Estimate> {
    let fallback = (quad.t_min, quad.t_max);
    let (Some((a, b)), Some((c, d))) = (f.window(fallback), g.window(fallback)) else {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        });
    };
    let (lo, hi) = (a.max(c), b.min(d));
    if !(hi > lo) {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        });
    }
    let pts = panel_points(lo, hi, f.breakpoints().iter().chain(g.breakpoints()).copied());
    let e = integrate(|x| f.evaluate(x) * g.evaluate(x), &pts, quad);
    if !e.value.is_finite() {
        return Err(Error::QuadratureFailure {
            s: lo,
            t: hi,
            reason: "pairing is not finite".into(),
        });
    }
    Ok(e)
}

/// `(∫ w V1^{-p} |f|^p)^{1/p}`.
pub fn window_average_norm(f: &HalfLineFunction, sol: &EquilibriumSolution, quad: &QuadratureSpec) -> Result<f64> {
    let Some((lo, hi)) = f.window((quad.t_min, quad.t_max)) else {
        return Ok(0.0);
    };
    let p = sol.pair().p();
    let mut pts = f.breakpoints().to_vec();
    pts.extend(quadrature::geometric_points(lo.max(quad.t_min), hi, 1.5));
    let pts = panel_points(lo, hi, pts);
    let mut failure = None;
    let e = integrate(
        |x| {
            let fx = f.evaluate(x);
            if fx == 0.0 {
                return 0.0;
            }
            match sol.v1_total(x) {
                Ok(v) => sol.w(x) * (fx.abs() / v).powf(p),
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        },
        &pts,
        quad,
    );
    failure.map_or(Ok(e.value.max(0.0).powf(1.0 / p)), Err)
}

/// `2 (‖v1 f'‖_p + (∫ w V1^{-p} |f|^p)^{1/p})`, an upper bound for
/// `|∫ f g| / weak_norm(g)` over all `g`.
pub fn holder_bound(f: &HalfLineFunction, sol: &EquilibriumSolution, quad: &QuadratureSpec) -> Result<f64> {
    let s = sobolev_norm(f, sol.pair(), quad)?;
    let deriv = s.component("v1_df").unwrap_or(0.0);
    Ok(2.0 * (deriv + window_average_norm(f, sol, quad)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub f_label: String,
    pub sobolev_value: f64,
    /// Best `|∫ f g| / weak_norm(g)` over the family.
    pub j_lower: f64,
    pub holder_upper: f64,
    pub family_size: usize,
    /// Per-member `(label, ratio)`.
    pub ratios: Vec<(String, f64)>,
}

impl SandwichReport {
    /// `J_lower / ‖f‖_W`.
    pub fn c_emp(&self) -> f64 {
        ratio(self.j_lower, self.sobolev_value)
    }

    /// `holder_upper / ‖f‖_W`.
    pub fn c_upper(&self) -> f64 {
        ratio(self.holder_upper, self.sobolev_value)
    }

    /// `holder_upper / J_lower`.
    pub fn sandwich_ratio(&self) -> f64 {
        ratio(self.holder_upper, self.j_lower)
    }

    pub fn best(&self) -> Option<&str> {
        self.ratios
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(l, _)| l.as_str())
    }
}

/// `a / b` with `0/0 = 0`.
pub fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Lower estimate of the dual functional of `f` from a finite family.
pub fn estimate_j(
    f: &HalfLineFunction,
    family: &[HalfLineFunction],
    sol: &EquilibriumSolution,
    quad: &QuadratureSpec,
) -> Result<SandwichReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let sob = sobolev_norm(f, sol.pair(), quad)?;
    let upper = if sob.value == 0.0 { 0.0 } else { holder_bound(f, sol, quad)? };
    let ratios = family
        .par_iter()
        .map(|g| -> Result<(String, f64)> {
            let num = pairing(f, g, quad)?.value.abs();
            if num == 0.0 {
                return Ok((g.label().to_string(), 0.0));
            }
            let den = weak_norm(g, sol, quad)?.value;
            Ok((g.label().to_string(), if den > 0.0 { num / den } else { 0.0 }))
        })
        .collect::<Result<Vec<_>>>()?;
    let j_lower = ratios.iter().fold(0.0f64, |m, r| m.max(r.1));
    Ok(SandwichReport {
        f_label: f.label().to_string(),
        sobolev_value: sob.value,
        j_lower,
        holder_upper: upper,
        family_size: family.len(),
        ratios,
    })
}

/// `v0^p |f|^{p-1} sgn f`, the extremal element for the `L^p_{v0}` pairing.
pub fn primal_extremal(f: &HalfLineFunction, sol: &EquilibriumSolution) -> HalfLineFunction {
    let p = sol.pair().p();
    let v0 = sol.pair().v0.clone();
    let ff = f.clone();
    let mut g = HalfLineFunction::new(format!("v0[{}]", f.label()), move |x| {
        let y = ff.evaluate(x);
        v0.evaluate(x).powf(p) * y.abs().powf(p - 1.0) * y.signum() * (y != 0.0) as u8 as f64
    })
    .with_breakpoints(f.breakpoints().iter().copied());
    if let Some((lo, hi)) = f.support() {
        g = g.with_support(lo, hi);
    }
    g
}

/// `φ'` for `φ = −v1^p |f'|^{p-1} sgn f'`, with the jumps of `f'` replaced by
/// linear ramps so that `φ` is continuous and compactly supported.
pub fn derivative_extremal(f: &HalfLineFunction, sol: &EquilibriumSolution) -> Result<HalfLineFunction> {
    let Some((lo, hi)) = f.support().filter(|(l, h)| h > l) else {
        return Err(Error::InvalidInput(format!("{} needs a compact support", f.label())));
    };
    let df = f.derivative_fn(false)?;
    let mut kinks: Vec<f64> = f.breakpoints().iter().copied().filter(|b| *b >= lo && *b <= hi).collect();
    kinks.extend([lo, hi]);
    kinks.sort_by(|a, b| a.total_cmp(b));
    kinks.dedup();
    let gap = kinks.windows(2).map(|w| w[1] - w[0]).fold(hi - lo, f64::min);
    let r = (0.05 * gap).min(0.5 * lo);
    let h = 0.25 * r;
    let p = sol.pair().p();
    let v1 = sol.pair().v1.clone();
    let ramps = kinks.clone();
    // (d̃, d̃') with d̃ the ramped derivative
    let smoothed = move |x: f64| -> (f64, f64) {
        let j = ramps.partition_point(|b| *b < x);
        for b in [j.checked_sub(1), Some(j)].into_iter().flatten().filter_map(|i| ramps.get(i)) {
            if (x - b).abs() < r {
                let (l, u) = (df(b - r), df(b + r));
                let slope = (u - l) / (2.0 * r);
                return (l + slope * (x - (b - r)), slope);
            }
        }
        if x < lo || x > hi {
            (0.0, 0.0)
        } else {
            (df(x), (df(x + h) - df(x - h)) / (2.0 * h))
        }
    };
    let s2 = smoothed.clone();
    let v1d = v1.clone();
    let psi = move |d: f64| if d == 0.0 { 0.0 } else { d.abs().powf(p - 1.0) * d.signum() };
    let phi = HalfLineFunction::new(format!("phi[{}]", f.label()), move |x| -v1.evaluate(x).powf(p) * psi(smoothed(x).0))
        .with_derivative(move |x| {
            let (d, dd) = s2(x);
            if d == 0.0 && dd == 0.0 {
                return 0.0;
            }
            let v = v1d.evaluate(x);
            let dpsi = if d == 0.0 { 0.0 } else { (p - 1.0) * d.abs().powf(p - 2.0) };
            -(p * v.powf(p - 1.0) * v1d.derivative(x) * psi(d) + v.powf(p) * dpsi * dd)
        })
        .with_support(lo - r, hi + r)
        .with_breakpoints(kinks.iter().flat_map(|b| [b - r, *b, b + r]));
    smooth_to_g(&phi)
}

/// The sign pattern `sgn f` on the support of `f`.
pub fn sign_pattern(f: &HalfLineFunction) -> HalfLineFunction {
    let ff = f.clone();
    let mut g = HalfLineFunction::new(format!("sgn[{}]", f.label()), move |x| {
        let y = ff.evaluate(x);
        if y == 0.0 {
            0.0
        } else {
            y.signum()
        }
    })
    .with_breakpoints(f.breakpoints().iter().copied());
    if let Some((lo, hi)) = f.support() {
        g = g.with_support(lo, hi);
    }
    g
}

/// Smallest `N` with `η_{-N} ≤ lo` and `η_N ≥ hi`, if the grid leaves room
/// for the extremal construction at that `N`.
fn covering_index(grid: &EtaGrid, lo: f64, hi: f64) -> Option<i64> {
    let n_max = grid.max_index().min(-grid.min_index()) - 1;
    (0..=n_max).find(|&n| grid.eta(-n).is_some_and(|e| e <= lo) && grid.eta(n).is_some_and(|e| e >= hi))
}

/// The lower-bound family for `f`: the primal extremal element, the
/// derivative of the ramped `v1^p |f'|^{p-1}`, their positive mixes, `f`
/// itself, `sgn f`, and the extremal functions built from `sgn f`.
pub fn j_family(f: &HalfLineFunction, grid: &EtaGrid, quad: &QuadratureSpec) -> Result<Vec<HalfLineFunction>> {
    let sol = grid.solution();
    let Some((lo, hi)) = f.window((quad.t_min, quad.t_max)) else {
        return Ok(vec![HalfLineFunction::zero()]);
    };
    let gv = primal_extremal(f, sol);
    let mut family = vec![gv.clone(), f.clone(), sign_pattern(f)];
    if f.has_derivative() && f.support().is_some() {
        let gphi = derivative_extremal(f, sol)?;
        let a = weak_norm(&gv, sol, quad)?.value;
        let b = weak_norm(&gphi, sol, quad)?.value;
        if a > 0.0 && b > 0.0 {
            for lam in MIX_WEIGHTS {
                family.push(gv.scale(lam / a).add(&gphi.scale(1.0 / b)).with_label(format!("mix{lam}")));
            }
        }
        family.push(gphi);
    }
    let t_lo = sol.a(lo).unwrap_or(lo);
    if let Some(n) = covering_index(grid, t_lo, hi) {
        let sgn = sign_pattern(f);
        for delta in [0, 1] {
            let f1 = extremal_f(&sgn, grid, delta, 1, n, quad)?;
            let f2 = extremal_f(&sgn, grid, delta, 2, n, quad)?;
            family.push(f1.add(&f2).with_label(format!("extremal{delta}")));
        }
    }
    Ok(family)
}

/// Ratio of the embedding test: `weak_norm(g) / ‖g/v0‖_{p'}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddingReport {
    pub weak: f64,
    pub dual_weighted: f64,
    pub ratio: f64,
}

pub fn verify_embedding(g: &HalfLineFunction, sol: &EquilibriumSolution, quad: &QuadratureSpec) -> Result<EmbeddingReport> {
    let weak = weak_norm(g, sol, quad)?.value;
    let pc = sol.p_conj();
    let v0 = &sol.pair().v0;
    let den = match g.window((quad.t_min, quad.t_max)) {
        None => 0.0,
        Some((lo, hi)) => {
            let mut pts = g.breakpoints().to_vec();
            pts.extend(quadrature::geometric_points(lo.max(quad.t_min), hi, 1.5));
            let pts = panel_points(lo, hi, pts);
            integrate(
                |x| {
                    let y = g.evaluate(x);
                    if y == 0.0 {
                        0.0
                    } else {
                        (y.abs() / v0.evaluate(x)).powf(pc)
                    }
                },
                &pts,
                quad,
            )
            .value
            .max(0.0)
            .powf(1.0 / pc)
        }
    };
    if den == 0.0 && weak > 0.0 {
        return Err(Error::QuadratureFailure {
            s: quad.t_min,
            t: quad.t_max,
            reason: format!("‖g/v0‖ vanished while the weak norm is {weak}"),
        });
    }
    Ok(EmbeddingReport {
        weak,
        dual_weighted: den,
        ratio: ratio(weak, den),
    })
}

/// One row of the divergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceRow {
    pub epsilon: f64,
    pub n: usize,
    /// `∫ |f g̃|`.
    pub pairing: f64,
    pub weak: f64,
    pub ratio: f64,
    /// `ε^{-1} ∫_c^d |f| / OSCILLATOR_CONSTANT`.
    pub lower_bound: f64,
}

/// Pairs `|f|` with oscillators `|g̃| = 1` on the first segment where `f` is
/// not negligible; the ratio grows like `1/ε`.
pub fn verify_strong_of_weak_zero(
    f: &HalfLineFunction,
    segments: &[(f64, f64)],
    eps: &[f64],
    sol: &EquilibriumSolution,
    quad: &QuadratureSpec,
) -> Result<Vec<DivergenceRow>> {
    let mut found = None;
    for &(c, d) in segments {
        let pts = panel_points(c, d, f.breakpoints().iter().copied());
        let mass = integrate(|x| f.evaluate(x).abs(), &pts, quad).value;
        if mass > 0.0 {
            found = Some((c, d, mass));
            break;
        }
    }
    let (c, d, mass) = found.ok_or(Error::NoWitnessSegment)?;
    let one = HalfLineFunction::new("one", |_| 1.0);
    eps.iter()
        .map(|&e| {
            let (g, plan) = oscillator(&one, c, d, e, sol, DensityMode::Normalized)?;
            let pts = panel_points(c, d, g.breakpoints().iter().chain(f.breakpoints()).copied());
            let num = integrate(|x| (f.evaluate(x) * g.evaluate(x)).abs(), &pts, quad).value;
            let weak = weak_norm(&g, sol, quad)?.value;
            Ok(DivergenceRow {
                epsilon: e,
                n: plan.n,
                pairing: num,
                weak,
                ratio: ratio(num, weak),
                lower_bound: mass / (e * OSCILLATOR_CONSTANT),
            })
        })
        .collect()
}

/// A supremum with the point where it is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sup {
    pub value: f64,
    pub at: f64,
}

/// Hardy-type constants of cell `k` of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyReport {
    pub k: i64,
    /// `sup_t (∫_t^{η_k} v0^p)^{1/p} (∫_{η_{k-1}}^t w)^{1/p'}`, at most 1.
    pub a1: Sup,
    /// `sup_t (∫_{η_k}^{a⁻¹(t)} v0^p)^{1/p} (∫_t^{η_k} w)^{1/p'}`, at most 1.
    pub a2: Sup,
    /// `sup_t (∫_t^{η_k} w (V1⁻)^{-p})^{1/p} (∫_{η_{k-1}}^t w)^{1/p'}`; its `p`-th power is at most `1/(p-1)`.
    pub aa1: Sup,
    /// `sup_t (∫_{η_k}^{a⁻¹(t)} w (V1⁻)^{-p})^{1/p} (∫_t^{η_k} w)^{1/p'}`; same bound.
    pub aa2: Sup,
}

const SCAN: usize = 512;
const XTOL: f64 = 1e-8;

/// The sups over `t ∈ (η_{k-1}, η_k)`; needs `η_{k+1}` as well.
pub fn hardy_constants(grid: &EtaGrid, k: i64, quad: &QuadratureSpec) -> Result<HardyReport> {
    let sol = grid.solution();
    let (Some(lo), Some(mid), Some(hi)) = (grid.eta(k - 1), grid.eta(k), grid.eta(k + 1)) else {
        let (glo, ghi) = grid.span();
        return Err(Error::GridUnderCoverage {
            grid_lo: glo,
            grid_hi: ghi,
            need_lo: f64::NAN,
            need_hi: f64::NAN,
        });
    };
    let p = sol.pair().p();
    let pc = sol.p_conj();
    let mut failure = None;
    let prim = Primitive::build(
        1,
        |x, out| {
            out[0] = match sol.v1(x) {
                Ok(m) => sol.w(x) * m.minus.powf(-p),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &[lo, mid, hi],
        (quad.rel_tol * 1e-5).clamp(1e-14, 1e-10),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let ai = |t: f64| sol.a_inv(t).unwrap_or(f64::NAN).min(hi);
    let sup = |f: &mut dyn FnMut(f64) -> f64| {
        let (at, value) = scan_max(|t| f(t), lo, mid, SCAN, XTOL);
        Sup { value, at }
    };
    let a1 = sup(&mut |t| sol.primal_mass(t, mid).powf(1.0 / p) * sol.dual_mass(lo, t).powf(1.0 / pc));
    let a2 = sup(&mut |t| sol.primal_mass(mid, ai(t)).max(0.0).powf(1.0 / p) * sol.dual_mass(t, mid).powf(1.0 / pc));
    let aa1 = sup(&mut |t| prim.between(t, mid, 0).powf(1.0 / p) * sol.dual_mass(lo, t).powf(1.0 / pc));
    let aa2 = sup(&mut |t| prim.between(mid, ai(t), 0).max(0.0).powf(1.0 / p) * sol.dual_mass(t, mid).powf(1.0 / pc));
    Ok(HardyReport { k, a1, a2, aa1, aa2 })
}

/// `(𝒜_a(t), 𝒜_b(t))`: `V1(t)^{1/p'}` times `(∫_t^{a⁻¹(t)} v0^p)^{1/p}`,
/// respectively `(∫_{b⁻¹(t)}^t v0^p)^{1/p}`.
pub fn embedding_constants(sol: &EquilibriumSolution, t: f64) -> Result<(f64, f64)> {
    let p = sol.pair().p();
    let v1 = sol.v1_total(t)?.powf(1.0 / sol.p_conj());
    let up = sol.primal_mass(t, sol.a_inv(t)?).powf(1.0 / p);
    let down = sol.primal_mass(sol.b_inv(t)?, t).powf(1.0 / p);
    Ok((v1 * up, v1 * down))
}

/// `|∫ f g| / (‖f‖_W · weak_norm(g))` for all pairs, rows indexed by `f`.
pub fn holder_matrix(
    fs: &[HalfLineFunction],
    gs: &[HalfLineFunction],
    sol: &EquilibriumSolution,
    quad: &QuadratureSpec,
) -> Result<Vec<Vec<f64>>> {
    let sob: Vec<f64> = fs
        .par_iter()
        .map(|f| sobolev_norm(f, sol.pair(), quad).map(|r| r.value))
        .collect::<Result<_>>()?;
    let weak: Vec<f64> = gs
        .par_iter()
        .map(|g| weak_norm(g, sol, quad).map(|r| r.value))
        .collect::<Result<_>>()?;
    fs.par_iter()
        .zip(&sob)
        .map(|(f, sf)| {
            gs.iter()
                .zip(&weak)
                .map(|(g, wg)| Ok(ratio(pairing(f, g, quad)?.value.abs(), sf * wg)))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Sandwich reports for every member of `corpus`.
pub fn verify_reflexivity(corpus: &[HalfLineFunction], grid: &EtaGrid, quad: &QuadratureSpec) -> Result<Vec<SandwichReport>> {
    corpus
        .par_iter()
        .map(|f| {
            let family = j_family(f, grid, quad)?;
            estimate_j(f, &family, grid.solution(), quad)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::build_eta_grid;
    use crate::weights::{Weight, WeightPair};

    fn linear() -> EquilibriumSolution {
        let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
        EquilibriumSolution::new(pair).unwrap()
    }

    #[test]
    fn pairing_of_hat_and_indicator() {
        let hat = HalfLineFunction::hat(1.0, 1.5, 2.0, 1.0).unwrap();
        let chi = HalfLineFunction::indicator(1.0, 2.0);
        let q = QuadratureSpec::default();
        assert!((pairing(&hat, &chi, &q).unwrap().value - 0.5).abs() < 1e-13);
        assert_eq!(pairing(&HalfLineFunction::zero(), &chi, &q).unwrap().value, 0.0);
    }

    #[test]
    fn integration_by_parts_for_g_phi() {
        let phi = HalfLineFunction::quartic_bump(1.0, 3.0, 1.0).unwrap();
        let g = smooth_to_g(&phi).unwrap();
        let f = HalfLineFunction::hat(0.5, 2.2, 3.5, 1.0).unwrap();
        let q = QuadratureSpec::default();
        let lhs = pairing(&f, &g, &q).unwrap().value;
        let df = f.derivative_fn(false).unwrap();
        let dfun = HalfLineFunction::new("df", move |x| df(x)).with_breakpoints(f.breakpoints().iter().copied());
        let rhs = -pairing(&dfun, &phi, &q).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-6, "{lhs} {rhs}");
    }

    #[test]
    fn holder_bound_dominates_family() {
        let sol = linear();
        let grid = build_eta_grid(&sol, 8).unwrap();
        let q = QuadratureSpec::default();
        let f = HalfLineFunction::hat(1.0, 2.0, 3.0, 1.0).unwrap();
        let family = j_family(&f, &grid, &q).unwrap();
        let r = estimate_j(&f, &family, &sol, &q).unwrap();
        assert!(r.j_lower > 0.0);
        assert!(r.j_lower <= r.holder_upper * (1.0 + 1e-8), "{r:?}");
        let smaller = estimate_j(&f, &family[..2], &sol, &q).unwrap();
        assert!(smaller.j_lower <= r.j_lower);
        assert!(matches!(estimate_j(&f, &[], &sol, &q), Err(Error::EmptyFamily)));
    }

    #[test]
    fn embedding_zero_over_zero() {
        let r = verify_embedding(&HalfLineFunction::zero(), &linear(), &QuadratureSpec::default()).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn hardy_bounds_on_linear_weights() {
        let sol = linear();
        let grid = build_eta_grid(&sol, 3).unwrap();
        let r = hardy_constants(&grid, 0, &QuadratureSpec::default()).unwrap();
        assert!(r.a1.value <= 1.0 + 1e-9 && r.a2.value <= 1.0 + 1e-9, "{r:?}");
        assert!(r.aa1.value.powi(2) <= 1.0 + 1e-9 && r.aa2.value.powi(2) <= 1.0 + 1e-9, "{r:?}");
        let (a, b) = embedding_constants(&sol, 2.0).unwrap();
        assert!(a <= 1.0 && b <= 1.0);
    }

    #[test]
    fn no_witness_for_zero() {
        let r = verify_strong_of_weak_zero(
            &HalfLineFunction::zero(),
            &[(1.0, 2.0)],
            &[0.1],
            &linear(),
            &QuadratureSpec::default(),
        );
        assert!(matches!(r, Err(Error::NoWitnessSegment)));
    }
}
