//! Equilibrium windows `(a(t), b(t))` and the covering grid `η_k`.
//!
//! For each `t` the window balances the dual mass `∫ v1^{-p'}` on both sides of
//! `t` and is normalised so that
//! `(∫_a^b v1^{-p'})^{1/p'} (∫_a^b v0^p)^{1/p} = 1`.
//! The solver parametrises the window by its half-mass `m`: both ends follow
//! from walking mass `m` left and right of `t`, and the normalisation residual
//! is then increasing in `m`, so a bracketed solve in `ln m` converges
//! globally without derivatives.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result, Side};
use crate::quadrature::illinois;
use crate::weights::WeightPair;

/// Default reporting tolerance for residual certificates.
pub const DEFAULT_TOL: f64 = 1e-10;

fn normalization(pair: &WeightPair, a: f64, b: f64, m: f64) -> f64 {
    let primal = pair.primal().mass(a, b);
    (2.0 * m).powf(1.0 / pair.p_conj()) * primal.powf(1.0 / pair.p()) - 1.0
}

/// Window for half-mass `m` around `t`, or `None` if either side runs out.
fn window_for_mass(pair: &WeightPair, t: f64, m: f64) -> Option<(f64, f64)> {
    let dual = pair.dual();
    Some((dual.left_end(t, m)?, dual.right_end(t, m)?))
}

/// Solves the window at `t` without any caching. The tolerance is accepted
/// for interface symmetry; the bracket is always driven to a few ulps.
pub fn solve_window(pair: &WeightPair, t: f64, _tol: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("window centre must be positive, got {t}")));
    }
    let dual = pair.dual();
    let left_cap = dual.mass(0.0, t);
    let right_cap = dual.mass(t, f64::INFINITY);
    let cap = left_cap.min(right_cap);
    let binding = if left_cap <= right_cap { Side::Lower } else { Side::Upper };

    let residual = |lm: f64| -> f64 {
        let m = lm.exp();
        if m > cap {
            return f64::INFINITY;
        }
        match window_for_mass(pair, t, m) {
            Some((a, b)) => normalization(pair, a, b, m),
            None => f64::INFINITY,
        }
    };

    let mut guess = dual.mass(0.5 * t, t);
    if !(guess > 0.0 && guess.is_finite()) {
        guess = 1.0;
    }
    if guess >= cap {
        guess = 0.5 * cap;
    }
    let step = std::f64::consts::LN_2;
    let mut lo = guess.ln();
    let mut flo = residual(lo);
    let mut hi = lo;
    let mut fhi = flo;

    if flo < 0.0 {
        let mut found = false;
        for _ in 0..2100 {
            let next = hi + step;
            if next.exp() >= cap {
                // test the cap itself before giving up
                let at_cap = if cap.is_finite() {
                    let a = if left_cap <= cap { 0.0 } else { dual.left_end(t, cap).unwrap_or(0.0) };
                    let b = if right_cap <= cap {
                        f64::INFINITY
                    } else {
                        dual.right_end(t, cap).unwrap_or(f64::INFINITY)
                    };
                    normalization(pair, a, b, cap)
                } else {
                    f64::NEG_INFINITY
                };
                if at_cap < 0.0 || at_cap.is_nan() {
                    return Err(Error::WindowUnsolvable { t, endpoint: binding });
                }
                lo = hi;
                flo = fhi;
                hi = cap.ln();
                fhi = at_cap;
                found = true;
                break;
            }
            lo = hi;
            flo = fhi;
            hi = next;
            fhi = residual(hi);
            if fhi >= 0.0 {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::WindowUnsolvable { t, endpoint: binding });
        }
    } else {
        let mut found = false;
        for _ in 0..2100 {
            hi = lo;
            fhi = flo;
            lo -= step;
            flo = residual(lo);
            if flo < 0.0 {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::WindowUnsolvable { t, endpoint: Side::Lower });
        }
    }
    let root = illinois(residual, lo, hi, flo, fhi).ok_or(Error::WindowUnsolvable { t, endpoint: binding })?;
    let m = root.exp().min(cap);
    let a = dual.left_end(t, m).unwrap_or(0.0);
    let b = dual.right_end(t, m).unwrap_or(f64::INFINITY);
    let (a, b) = if right_cap.is_finite() && m > 0.25 * right_cap {
        refine_by_right_end(pair, t, b).unwrap_or((a, b))
    } else {
        (a, b)
    };
    if !(b.is_finite() && b > t) {
        return Err(Error::WindowUnsolvable { t, endpoint: Side::Upper });
    }
    if !(a >= 0.0 && a < t) {
        return Err(Error::WindowUnsolvable { t, endpoint: Side::Lower });
    }
    Ok((a, b))
}

/// Re-solves with `ln b` as the unknown. Near a finite right tail the mass
/// determines `b` poorly, while `b` determines the mass well.
fn refine_by_right_end(pair: &WeightPair, t: f64, b0: f64) -> Option<(f64, f64)> {
    let dual = pair.dual();
    let residual = |u: f64| -> f64 {
        let b = u.exp();
        let m = dual.mass(t, b);
        match dual.left_end(t, m) {
            Some(a) => normalization(pair, a, b, m),
            None => f64::INFINITY,
        }
    };
    let start = if b0.is_finite() && b0 > t { b0.ln() } else { (2.0 * t).ln() };
    let step = 0.05;
    let (mut lo, mut hi) = (start - step, start + step);
    if lo <= t.ln() {
        lo = t.ln() + 0.5 * (start - t.ln()).max(f64::EPSILON);
    }
    let (mut flo, mut fhi) = (residual(lo), residual(hi));
    let mut width = step;
    for _ in 0..200 {
        if flo < 0.0 && fhi >= 0.0 {
            return illinois(residual, lo, hi, flo, fhi).map(|u| {
                let b = u.exp();
                (dual.left_end(t, dual.mass(t, b)).unwrap_or(0.0), b)
            });
        }
        width *= 2.0;
        if flo >= 0.0 {
            hi = lo;
            fhi = flo;
            lo = t.ln() + 0.5 * (lo - t.ln());
            flo = residual(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi += width;
            fhi = residual(hi);
        }
    }
    None
}

/// Dual or primal masses of the window at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowMasses {
    /// Mass on `(a(t), t)`.
    pub minus: f64,
    /// Mass on `(t, b(t))`.
    pub plus: f64,
    pub total: f64,
}

/// Residuals of the two defining conditions at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    /// `|∫_a^t v1^{-p'} − ∫_t^b v1^{-p'}|`.
    pub equilibrium: f64,
    /// `|(∫_a^b v1^{-p'})^{1/p'} (∫_a^b v0^p)^{1/p} − 1|`.
    pub normalization: f64,
}

#[derive(Default)]
struct Cache {
    windows: RwLock<HashMap<u64, (f64, f64)>>,
    a_inv: RwLock<HashMap<u64, f64>>,
}

/// The boundary functions `a`, `b` of a weight pair and their inverses.
///
/// Cheap to clone; clones share the memo cache. The cache stores exact
/// solutions keyed by the bit pattern of the argument, so cached and uncached
/// evaluation return identical values.
#[derive(Clone)]
pub struct EquilibriumSolution {
    pair: Arc<WeightPair>,
    tol: f64,
    cache: Option<Arc<Cache>>,
}

impl std::fmt::Debug for EquilibriumSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EquilibriumSolution")
            .field("v0", &self.pair.v0)
            .field("v1", &self.pair.v1)
            .field("p", &self.pair.p())
            .field("tol", &self.tol)
            .field("cached", &self.cache.is_some())
            .finish()
    }
}

impl EquilibriumSolution {
    /// Requires the endpoint divergence condition at `c = 1`.
    pub fn new(pair: WeightPair) -> Result<Self> {
        let report = pair.check_divergence_condition(1.0)?;
        match report.satisfied() {
            Some(true) => Ok(Self::new_unchecked(pair)),
            Some(false) => Err(Error::DivergenceConditionUnmet(format!(
                "lower product {}, upper product {}",
                report.lower_product, report.upper_product
            ))),
            None => Err(Error::DivergenceConditionUnmet(format!(
                "undetermined (lower {:?}, upper {:?})",
                report.lower, report.upper
            ))),
        }
    }

    /// Skips the divergence condition; windows that cannot be solved are
    /// reported per `t`. This is the path for unit weights.
    pub fn new_unchecked(pair: WeightPair) -> Self {
        Self {
            pair: Arc::new(pair),
            tol: DEFAULT_TOL,
            cache: Some(Arc::new(Cache::default())),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Disables (or re-enables with a fresh store) the memo cache.
    pub fn with_cache(mut self, enabled: bool) -> Self {
        self.cache = enabled.then(|| Arc::new(Cache::default()));
        self
    }

    pub fn pair(&self) -> &WeightPair {
        &self.pair
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn p_conj(&self) -> f64 {
        self.pair.p_conj()
    }

    /// `v1^{-p'}(x)`.
    pub fn w(&self, x: f64) -> f64 {
        self.pair.dual().value(x)
    }

    /// `∫_s^t v1^{-p'}` (signed: negative when `t < s`).
    pub fn dual_mass(&self, s: f64, t: f64) -> f64 {
        if t >= s {
            self.pair.dual().mass(s, t)
        } else {
            -self.pair.dual().mass(t, s)
        }
    }

    /// `∫_s^t v0^p` (signed).
    pub fn primal_mass(&self, s: f64, t: f64) -> f64 {
        if t >= s {
            self.pair.primal().mass(s, t)
        } else {
            -self.pair.primal().mass(t, s)
        }
    }

    pub fn window(&self, t: f64) -> Result<(f64, f64)> {
        let key = t.to_bits();
        if let Some(cache) = &self.cache {
            if let Some(w) = cache.windows.read().expect("cache lock").get(&key) {
                return Ok(*w);
            }
        }
        let w = solve_window(&self.pair, t, self.tol)?;
        if let Some(cache) = &self.cache {
            cache.windows.write().expect("cache lock").insert(key, w);
        }
        Ok(w)
    }

    pub fn a(&self, t: f64) -> Result<f64> {
        Ok(self.window(t)?.0)
    }

    pub fn b(&self, t: f64) -> Result<f64> {
        Ok(self.window(t)?.1)
    }

    /// The `t` with `a(t) = s`.
    pub fn a_inv(&self, s: f64) -> Result<f64> {
        let key = s.to_bits();
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.a_inv.read().expect("cache lock").get(&key) {
                return Ok(*v);
            }
        }
        let v = self.solve_a_inv(s)?;
        if let Some(cache) = &self.cache {
            cache.a_inv.write().expect("cache lock").insert(key, v);
        }
        Ok(v)
    }

    fn solve_a_inv(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("a_inv needs a finite s ≥ 0, got {s}")));
        }
        let dual = self.pair.dual();
        let residual = |t: f64| -> f64 {
            let m = dual.mass(s, t);
            if !m.is_finite() {
                return f64::INFINITY;
            }
            match dual.right_end(t, m) {
                Some(b) => normalization(&self.pair, s, b, m),
                None => f64::INFINITY,
            }
        };
        let mut h = if s > 0.0 { 0.25 * s } else { 1.0 };
        let mut lo = s;
        let mut flo = -1.0;
        let mut hi = s + h;
        let mut fhi = residual(hi);
        let mut iters = 0;
        while fhi < 0.0 {
            lo = hi;
            flo = fhi;
            h *= 2.0;
            hi = s + h;
            iters += 1;
            if iters > 2000 || !hi.is_finite() || hi > 1e300 {
                return Err(Error::WindowUnsolvable { t: s, endpoint: Side::Upper });
            }
            fhi = residual(hi);
        }
        if s == 0.0 && lo == 0.0 {
            // the residual is −1 at t = 0 only in the limit; walk down first
            let mut x = hi;
            loop {
                let y = 0.5 * x;
                if y < 1e-300 {
                    break;
                }
                let fy = residual(y);
                if fy < 0.0 {
                    lo = y;
                    flo = fy;
                    break;
                }
                hi = y;
                fhi = fy;
                x = y;
            }
        }
        illinois(residual, lo, hi, flo, fhi).ok_or(Error::WindowUnsolvable { t: s, endpoint: Side::Upper })
    }

    /// The `t` with `b(t) = s`.
    pub fn b_inv(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("b_inv needs a positive s, got {s}")));
        }
        let dual = self.pair.dual();
        let residual = |t: f64| -> f64 {
            let m = dual.mass(t, s);
            if !m.is_finite() {
                return f64::INFINITY;
            }
            match dual.left_end(t, m) {
                Some(a) => normalization(&self.pair, a, s, m),
                None => f64::INFINITY,
            }
        };
        // residual decreases in t; −1 at t = s
        let mut hi = s;
        let mut fhi = -1.0;
        let mut lo = 0.75 * s;
        let mut flo = residual(lo);
        while flo < 0.0 {
            hi = lo;
            fhi = flo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::WindowUnsolvable { t: s, endpoint: Side::Lower });
            }
            flo = residual(lo);
        }
        illinois(residual, lo, hi, flo, fhi).ok_or(Error::WindowUnsolvable { t: s, endpoint: Side::Lower })
    }

    /// `V1^-`, `V1^+` and `V1` at `t`.
    pub fn v1(&self, t: f64) -> Result<WindowMasses> {
        let (a, b) = self.window(t)?;
        let minus = self.dual_mass(a, t);
        let plus = self.dual_mass(t, b);
        Ok(WindowMasses {
            minus,
            plus,
            total: minus + plus,
        })
    }

    /// `V1(t) = ∫_{a(t)}^{b(t)} v1^{-p'}`.
    pub fn v1_total(&self, t: f64) -> Result<f64> {
        let (a, b) = self.window(t)?;
        Ok(self.dual_mass(a, b))
    }

    /// `V0^-`, `V0^+` and `V0` at `t`.
    pub fn v0(&self, t: f64) -> Result<WindowMasses> {
        let (a, b) = self.window(t)?;
        let minus = self.primal_mass(a, t);
        let plus = self.primal_mass(t, b);
        Ok(WindowMasses {
            minus,
            plus,
            total: minus + plus,
        })
    }

    pub fn certificate(&self, t: f64) -> Result<Certificate> {
        let (a, b) = self.window(t)?;
        let minus = self.dual_mass(a, t);
        let plus = self.dual_mass(t, b);
        let norm = normalization(&self.pair, a, b, 0.5 * (minus + plus));
        Ok(Certificate {
            t,
            a,
            b,
            equilibrium: (minus - plus).abs(),
            normalization: norm.abs(),
        })
    }

    /// Step used for central differences at `t`.
    pub fn diff_step(t: f64) -> f64 {
        (1e-6 * t).max(1e-9)
    }

    /// `(a'(t), b'(t))` by central differences with step `h`.
    pub fn window_derivative(&self, t: f64, h: f64) -> Result<(f64, f64)> {
        let (al, bl) = self.window(t - h)?;
        let (ar, br) = self.window(t + h)?;
        Ok(((ar - al) / (2.0 * h), (br - bl) / (2.0 * h)))
    }

    /// `|w(a) a' + w(b) b' − 2 w(t)|` with `w = v1^{-p'}`.
    pub fn check_identity(&self, t: f64, h: f64) -> Result<f64> {
        if !(h > 0.0 && h < t) {
            return Err(Error::InvalidInput(format!("step {h} must lie in (0, t)")));
        }
        let (a, b) = self.window(t)?;
        let (da, db) = self.window_derivative(t, h)?;
        Ok((self.w(a) * da + self.w(b) * db - 2.0 * self.w(t)).abs())
    }
}

/// Why the grid stopped short of the requested half-width.
#[derive(Clone, Debug, PartialEq)]
pub struct GridStop {
    /// The first index that could not be computed.
    pub index: i64,
    pub side: Side,
    pub reason: String,
}

/// The sequence `η_0 = 1`, `η_k = a^{-1}(η_{k-1})`, `η_{-k} = a(η_{-k+1})`.
#[derive(Clone, Debug)]
pub struct EtaGrid {
    min_index: i64,
    values: Vec<f64>,
    solution: EquilibriumSolution,
    requested: usize,
    stops: Vec<GridStop>,
}

impl EtaGrid {
    pub fn solution(&self) -> &EquilibriumSolution {
        &self.solution
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn max_index(&self) -> i64 {
        self.min_index + self.values.len() as i64 - 1
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    /// Where the walk stopped early, if it did.
    pub fn stops(&self) -> &[GridStop] {
        &self.stops
    }

    pub fn eta(&self, k: i64) -> Option<f64> {
        if k < self.min_index || k > self.max_index() {
            return None;
        }
        Some(self.values[(k - self.min_index) as usize])
    }

    /// `(k, η_k)` pairs in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.min_index + i as i64, *v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `[η_{k-1}, η_k]`.
    pub fn cell(&self, k: i64) -> Option<(f64, f64)> {
        Some((self.eta(k - 1)?, self.eta(k)?))
    }

    /// The index `k` with `x ∈ [η_{k-1}, η_k)`.
    pub fn cell_of(&self, x: f64) -> Option<i64> {
        let i = self.values.partition_point(|v| *v <= x);
        if i == 0 || i == self.values.len() {
            return None;
        }
        Some(self.min_index + i as i64)
    }

    pub fn span(&self) -> (f64, f64) {
        (self.values[0], *self.values.last().expect("grid is never empty"))
    }
}

/// Builds `η_{-n..n}`, stopping early (and recording why) where the window
/// map degenerates or cannot be solved.
pub fn build_eta_grid(sol: &EquilibriumSolution, n: usize) -> Result<EtaGrid> {
    if n == 0 {
        return Err(Error::InvalidInput("grid half-width must be at least 1".into()));
    }
    let mut up = vec![1.0];
    let mut stops = Vec::new();
    for k in 1..=n as i64 {
        let prev = *up.last().expect("non-empty");
        match sol.a_inv(prev) {
            Ok(v) if v > prev && v.is_finite() => up.push(v),
            Ok(v) => {
                stops.push(GridStop {
                    index: k,
                    side: Side::Upper,
                    reason: format!("degenerate value {v}"),
                });
                break;
            }
            Err(e) => {
                stops.push(GridStop {
                    index: k,
                    side: Side::Upper,
                    reason: e.to_string(),
                });
                break;
            }
        }
    }
    let mut down = Vec::new();
    let mut prev = 1.0;
    for k in 1..=n as i64 {
        match sol.a(prev) {
            Ok(v) if v > 0.0 && v < prev => {
                down.push(v);
                prev = v;
            }
            Ok(v) => {
                stops.push(GridStop {
                    index: -k,
                    side: Side::Lower,
                    reason: format!("degenerate value {v}"),
                });
                break;
            }
            Err(e) => {
                stops.push(GridStop {
                    index: -k,
                    side: Side::Lower,
                    reason: e.to_string(),
                });
                break;
            }
        }
    }
    let min_index = -(down.len() as i64);
    down.reverse();
    down.extend(up);
    Ok(EtaGrid {
        min_index,
        values: down,
        solution: sol.clone(),
        requested: n,
        stops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Weight;

    fn linear() -> EquilibriumSolution {
        let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).unwrap(), 2.0).unwrap();
        EquilibriumSolution::new(pair).unwrap()
    }

    #[test]
    fn wide_windows_keep_normalization() {
        let pair = WeightPair::new(Weight::power(1.0, -0.337).unwrap(), Weight::power(1.0, 1.4).unwrap(), 1.3).unwrap();
        let sol = EquilibriumSolution::new(pair).unwrap();
        let mut last = 0.0;
        for t in [10.0, 40.0, 77.0, 78.5, 80.0] {
            let c = sol.certificate(t).unwrap();
            assert!(c.normalization.abs() < 1e-12, "t = {t}: {}", c.normalization);
            assert!(c.b > last);
            last = c.b;
            assert!((sol.b_inv(c.b).unwrap() / t - 1.0).abs() < 1e-12);
        }
    }

    fn unit() -> EquilibriumSolution {
        let pair = WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap();
        EquilibriumSolution::new_unchecked(pair)
    }

    #[test]
    fn linear_weight_window() {
        let sol = linear();
        let (a, b) = sol.window(1.0).unwrap();
        assert!((a - 0.690_983_005_625_052_6).abs() < 1e-12, "{a}");
        assert!((b - 1.809_016_994_374_947_4).abs() < 1e-12, "{b}");
        let (a, b) = sol.window(2.0).unwrap();
        assert!((a - 1.381_966_011_250_105).abs() < 1e-12);
        assert!((b - 3.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn unit_weight_window() {
        let sol = unit();
        for &t in &[0.5, 1.0, 7.25, 100.0] {
            let (a, b) = sol.window(t).unwrap();
            assert!((a - (t - 0.5)).abs() < 1e-12 * t.max(1.0), "t={t} a={a}");
            assert!((b - (t + 0.5)).abs() < 1e-12 * t.max(1.0), "t={t} b={b}");
        }
        match sol.window(0.25) {
            Err(Error::WindowUnsolvable { endpoint, .. }) => assert_eq!(endpoint, Side::Lower),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_weight_needs_override() {
        let pair = WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap();
        assert!(matches!(
            EquilibriumSolution::new(pair),
            Err(Error::DivergenceConditionUnmet(_))
        ));
    }

    #[test]
    fn inverses_round_trip() {
        let sol = linear();
        for &t in &[0.01, 0.3, 1.0, 5.0, 123.0] {
            let (a, b) = sol.window(t).unwrap();
            assert!((sol.a_inv(a).unwrap() - t).abs() < 1e-12 * t);
            assert!((sol.b_inv(b).unwrap() - t).abs() < 1e-12 * t);
        }
        let u = unit();
        assert!((u.a_inv(0.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((u.a_inv(1.0).unwrap() - 1.5).abs() < 1e-14);
        assert!((u.b_inv(2.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn certificates_are_tight() {
        let sol = linear();
        for &t in &[0.1, 1.0, 10.0] {
            let c = sol.certificate(t).unwrap();
            assert!(c.equilibrium <= 1e-12 * sol.v1_total(t).unwrap());
            assert!(c.normalization <= 1e-12);
            let v = sol.v1(t).unwrap();
            assert!((v.total - 2.0 * v.minus).abs() < 1e-12 * v.total);
        }
    }

    #[test]
    fn identity_residuals() {
        let sol = linear();
        for &t in &[1.0, 10.0] {
            assert!(sol.check_identity(t, 1e-5).unwrap() < 1e-6);
        }
        assert!(unit().check_identity(2.0, 1e-5).unwrap() < 1e-9);
    }

    #[test]
    fn eta_grid_closed_form() {
        let sol = linear();
        let grid = build_eta_grid(&sol, 2).unwrap();
        let rho = (5.0 + 5f64.sqrt()) / 5.0;
        assert_eq!(grid.eta(0), Some(1.0));
        for k in -2..=2i64 {
            let want = rho.powi(k as i32);
            assert!((grid.eta(k).unwrap() - want).abs() < 1e-12, "k={k}");
        }
        assert!(grid.stops().is_empty());
    }

    #[test]
    fn unit_grid_stops_at_zero() {
        let grid = build_eta_grid(&unit(), 3).unwrap();
        assert!((grid.eta(1).unwrap() - 1.5).abs() < 1e-14);
        assert!((grid.eta(-1).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(grid.min_index(), -1);
        assert_eq!(grid.stops().len(), 1);
        assert_eq!(grid.stops()[0].side, Side::Lower);
    }

    #[test]
    fn cache_does_not_change_values() {
        let cached = linear();
        let plain = linear().with_cache(false);
        for &t in &[0.2, 0.2, 3.3] {
            assert_eq!(cached.window(t).unwrap(), plain.window(t).unwrap());
        }
    }
}
