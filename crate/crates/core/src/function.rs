//! Real functions on the half-line with the metadata quadrature needs:
//! an optional derivative, an optional compact support and the points where
//! the function or its derivative jumps.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Fx = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct HalfLineFunction {
    eval: Fx,
    deriv: Option<Fx>,
    support: Option<(f64, f64)>,
    breakpoints: Vec<f64>,
    label: String,
}

impl fmt::Debug for HalfLineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfLineFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints.len())
            .field("has_derivative", &self.deriv.is_some())
            .finish()
    }
}

fn sorted(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|x| x.is_finite());
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

impl HalfLineFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            deriv: None,
            support: None,
            breakpoints: Vec::new(),
            label: label.into(),
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(d));
        self
    }

    /// Declares `[lo, hi]` as the support; the support ends become breakpoints.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self.breakpoints.extend([lo, hi]);
        self.breakpoints = sorted(std::mem::take(&mut self.breakpoints));
        self
    }

    pub fn with_breakpoints(mut self, pts: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(pts);
        self.breakpoints = sorted(std::mem::take(&mut self.breakpoints));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_| 0.0),
            deriv: Some(Arc::new(|_| 0.0)),
            support: None,
            breakpoints: Vec::new(),
            label: "zero".into(),
        }
        .with_empty_support()
    }

    fn with_empty_support(mut self) -> Self {
        self.support = Some((1.0, 1.0));
        self
    }

    /// `χ_[lo, hi]`.
    pub fn indicator(lo: f64, hi: f64) -> Self {
        Self::new(format!("chi[{lo},{hi}]"), move |x| if x >= lo && x <= hi { 1.0 } else { 0.0 })
            .with_support(lo, hi)
    }

    /// Continuous piecewise-linear function through `knots`, zero outside them.
    pub fn piecewise_linear(label: impl Into<String>, knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 || knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidInput("knots must be strictly increasing and at least two".into()));
        }
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let lo = xs[0];
        let hi = *xs.last().expect("len ≥ 2");
        let k1 = Arc::new(knots);
        let k2 = k1.clone();
        let locate = |k: &[(f64, f64)], x: f64| -> Option<usize> {
            if x < k[0].0 || x > k[k.len() - 1].0 {
                return None;
            }
            let i = k.partition_point(|p| p.0 <= x);
            Some(i.clamp(1, k.len() - 1) - 1)
        };
        let f = move |x: f64| match locate(&k1, x) {
            None => 0.0,
            Some(i) => {
                let (x0, y0) = k1[i];
                let (x1, y1) = k1[i + 1];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        };
        let d = move |x: f64| {
            if x <= k2[0].0 || x >= k2[k2.len() - 1].0 {
                return 0.0;
            }
            match locate(&k2, x) {
                None => 0.0,
                Some(i) => (k2[i + 1].1 - k2[i].1) / (k2[i + 1].0 - k2[i].0),
            }
        };
        Ok(Self::new(label, f).with_derivative(d).with_support(lo, hi).with_breakpoints(xs))
    }

    /// The hat rising from `(lo, 0)` to `(peak, height)` and back to `(hi, 0)`.
    pub fn hat(lo: f64, peak: f64, hi: f64, height: f64) -> Result<Self> {
        Self::piecewise_linear(
            format!("hat[{lo},{peak},{hi}]x{height}"),
            vec![(lo, 0.0), (peak, height), (hi, 0.0)],
        )
    }

    /// `height · (1 − u²)²` with `u` mapping `[lo, hi]` onto `[−1, 1]`;
    /// continuously differentiable and compactly supported.
    pub fn quartic_bump(lo: f64, hi: f64, height: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidInput(format!("bump needs lo < hi, got [{lo}, {hi}]")));
        }
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let f = move |x: f64| {
            let u = (x - c) / r;
            if u.abs() >= 1.0 {
                0.0
            } else {
                let s = 1.0 - u * u;
                height * s * s
            }
        };
        let d = move |x: f64| {
            let u = (x - c) / r;
            if u.abs() >= 1.0 {
                0.0
            } else {
                -4.0 * height * u * (1.0 - u * u) / r
            }
        };
        Ok(Self::new(format!("bump[{lo},{hi}]x{height}"), f)
            .with_derivative(d)
            .with_support(lo, hi)
            .with_breakpoints([c]))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// True when the declared support is empty (the zero function).
    pub fn is_trivially_zero(&self) -> bool {
        matches!(self.support, Some((lo, hi)) if !(hi > lo))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(x))
    }

    /// Central difference with step `1e-6·max(1, x)`, one-sided next to a breakpoint.
    pub fn numeric_derivative(&self, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1.0);
        let f = |y: f64| self.evaluate(y);
        match self.breakpoints.iter().find(|b| (*b - x).abs() < 2.0 * h) {
            None => (f(x + h) - f(x - h)) / (2.0 * h),
            Some(&b) if x >= b => (f(b + 3.0 * h) - f(b + h)) / (2.0 * h),
            Some(&b) => (f(b - h) - f(b - 3.0 * h)) / (2.0 * h),
        }
    }

    /// Declared derivative, else a numeric one if `allow_numeric`.
    pub fn derivative_fn(&self, allow_numeric: bool) -> Result<Fx> {
        if let Some(d) = &self.deriv {
            return Ok(d.clone());
        }
        if !allow_numeric {
            return Err(Error::DerivativeRequired(self.label.clone()));
        }
        let me = self.clone();
        Ok(Arc::new(move |x| me.numeric_derivative(x)))
    }

    /// `λ·f`.
    pub fn scale(&self, lambda: f64) -> Self {
        let f = self.eval.clone();
        let d = self.deriv.clone();
        Self {
            eval: Arc::new(move |x| lambda * f(x)),
            deriv: d.map(|d| Arc::new(move |x| lambda * d(x)) as Fx),
            support: self.support,
            breakpoints: self.breakpoints.clone(),
            label: format!("{}*({})", lambda, self.label),
        }
    }

    /// `f + μ·g`.
    pub fn axpy(&self, mu: f64, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let deriv = match (&self.deriv, &other.deriv) {
            (Some(df), Some(dg)) => {
                let (df, dg) = (df.clone(), dg.clone());
                Some(Arc::new(move |x| df(x) + mu * dg(x)) as Fx)
            }
            _ => None,
        };
        let support = match (self.effective_support(), other.effective_support()) {
            (Some(None), s) | (s, Some(None)) => s.flatten(),
            (Some(Some((a, b))), Some(Some((c, d)))) => Some((a.min(c), b.max(d))),
            _ => None,
        };
        let mut bps = self.breakpoints.clone();
        bps.extend_from_slice(&other.breakpoints);
        Self {
            eval: Arc::new(move |x| f(x) + mu * g(x)),
            deriv,
            support,
            breakpoints: sorted(bps),
            label: format!("{} + {}*({})", self.label, mu, other.label),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// `Some(None)` for an empty support, `Some(Some(..))` for a declared one.
    fn effective_support(&self) -> Option<Option<(f64, f64)>> {
        match self.support {
            Some((lo, hi)) if hi > lo => Some(Some((lo, hi))),
            Some(_) => Some(None),
            None => None,
        }
    }

    /// `f·χ_[lo, hi]`; the derivative, where declared, is cut the same way.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let f = self.eval.clone();
        let deriv = self.deriv.clone().map(|d| Arc::new(move |x| if x >= lo && x <= hi { d(x) } else { 0.0 }) as Fx);
        let support = match self.effective_support() {
            Some(None) => Some((1.0, 1.0)),
            Some(Some((a, b))) => {
                let (l, h) = (a.max(lo), b.min(hi));
                if h > l {
                    Some((l, h))
                } else {
                    Some((1.0, 1.0))
                }
            }
            None => Some((lo, hi)),
        };
        let mut bps: Vec<f64> = self.breakpoints.iter().copied().filter(|b| *b >= lo && *b <= hi).collect();
        if let Some((l, h)) = support {
            if h > l {
                bps.extend([l, h]);
            }
        }
        Self {
            eval: Arc::new(move |x| if x >= lo && x <= hi { f(x) } else { 0.0 }),
            deriv,
            support,
            breakpoints: sorted(bps),
            label: format!("({})|[{lo},{hi}]", self.label),
        }
    }

    /// `|f|`.
    pub fn abs(&self) -> Self {
        let f = self.eval.clone();
        Self {
            eval: Arc::new(move |x| f(x).abs()),
            deriv: None,
            support: self.support,
            breakpoints: self.breakpoints.clone(),
            label: format!("|{}|", self.label),
        }
    }

    /// The interval quadrature should cover: the declared support, else `fallback`.
    pub fn window(&self, fallback: (f64, f64)) -> Option<(f64, f64)> {
        match self.effective_support() {
            Some(None) => None,
            Some(Some((lo, hi))) => Some((lo, hi)),
            None => Some(fallback),
        }
    }

    /// Spot-checks that the function vanishes outside its declared support.
    pub fn check_support(&self) -> bool {
        let Some((lo, hi)) = self.support else { return true };
        if !(hi > lo) {
            return [0.5, 1.0, 2.0].iter().all(|x| self.evaluate(*x) == 0.0);
        }
        let probes = [lo * 0.5, lo - 1e-3 * lo.max(1.0), hi + 1e-3 * hi.max(1.0), hi * 2.0, hi + 10.0];
        probes
            .iter()
            .filter(|x| **x > 0.0 && (**x < lo || **x > hi))
            .all(|x| self.evaluate(*x) == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_values_and_slopes() {
        let h = HalfLineFunction::hat(0.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(h.evaluate(0.5), 0.5);
        assert_eq!(h.evaluate(1.5), 0.5);
        assert_eq!(h.evaluate(3.0), 0.0);
        assert_eq!(h.derivative(0.5), Some(1.0));
        assert_eq!(h.derivative(1.5), Some(-1.0));
        assert_eq!(h.breakpoints(), &[0.0, 1.0, 2.0]);
        assert!(h.check_support());
    }

    #[test]
    fn bump_is_smooth() {
        let b = HalfLineFunction::quartic_bump(1.0, 3.0, 2.0).unwrap();
        assert_eq!(b.evaluate(2.0), 2.0);
        assert_eq!(b.evaluate(1.0), 0.0);
        for &x in &[1.3, 2.2, 2.9] {
            let num = (b.evaluate(x + 1e-6) - b.evaluate(x - 1e-6)) / 2e-6;
            assert!((num - b.derivative(x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn numeric_derivative_respects_breakpoints() {
        let h = HalfLineFunction::hat(0.0, 1.0, 2.0, 1.0).unwrap();
        let bare = HalfLineFunction::new("h", move |x| h.evaluate(x)).with_breakpoints([0.0, 1.0, 2.0]);
        assert!((bare.numeric_derivative(0.5) - 1.0).abs() < 1e-8);
        assert!((bare.numeric_derivative(1.0 + 1e-7) + 1.0).abs() < 1e-6);
        assert!(bare.derivative_fn(false).is_err());
    }

    #[test]
    fn restriction_and_combination() {
        let g = HalfLineFunction::indicator(1.0, 2.0);
        let r = g.restrict(1.5, 5.0);
        assert_eq!(r.support(), Some((1.5, 2.0)));
        assert_eq!(r.evaluate(1.2), 0.0);
        let z = g.sub(&g);
        assert_eq!(z.evaluate(1.5), 0.0);
        assert!(HalfLineFunction::zero().is_trivially_zero());
        let s = g.add(&HalfLineFunction::indicator(3.0, 4.0));
        assert_eq!(s.support(), Some((1.0, 4.0)));
    }
}
