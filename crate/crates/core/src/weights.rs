//! Weight functions on the half-line and integrals of their signed powers.
//!
//! Every quantity downstream is built from two densities: the dual density
//! `w = v1^{-p'}` and the primal density `v0^p`. A [`Density`] is a weight
//! raised to a fixed power; it knows its integral over any subinterval of
//! `[0, ∞]` and how to walk a prescribed mass to the left or right of a point.
//! Power weights answer all of this in closed form, anything else falls back
//! to adaptive quadrature with an explicit divergence test.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result, Side};
use crate::quadrature::{self, bisect_boundary, illinois, QuadratureSpec};

/// Partial sums beyond this are treated as a divergent integral.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// An exponent `p` together with its conjugate `p' = p/(p-1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentPair {
    pub p: f64,
    pub p_conj: f64,
}

impl ExponentPair {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("exponent p must lie in (1, ∞), got {p}")));
        }
        Ok(Self {
            p,
            p_conj: p / (p - 1.0),
        })
    }
}

/// What a weight is, as far as closed forms are concerned.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    Unit,
    /// `scale · x^gamma`.
    Power { scale: f64, gamma: f64 },
    Custom { label: String },
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFamily::Unit => f.write_str("1"),
            WeightFamily::Power { scale, gamma } if *scale == 1.0 => write!(f, "x^{gamma}"),
            WeightFamily::Power { scale, gamma } => write!(f, "{scale}·x^{gamma}"),
            WeightFamily::Custom { label } => f.write_str(label),
        }
    }
}

/// A nonnegative weight function on `(0, ∞)`.
#[derive(Clone)]
pub struct Weight {
    family: WeightFamily,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({})", self.family)
    }
}

impl Weight {
    pub fn unit() -> Self {
        Self {
            family: WeightFamily::Unit,
            eval: Arc::new(|_| 1.0),
        }
    }

    pub fn power(scale: f64, gamma: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "power weight needs scale > 0 and finite gamma, got {scale}, {gamma}"
            )));
        }
        if gamma == 0.0 && scale == 1.0 {
            return Ok(Self::unit());
        }
        Ok(Self {
            family: WeightFamily::Power { scale, gamma },
            eval: Arc::new(move |x| scale * x.powf(gamma)),
        })
    }

    /// A weight given only by its values; integrals use quadrature.
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            family: WeightFamily::Custom { label: label.into() },
            eval: Arc::new(f),
        }
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn is_unit(&self) -> bool {
        self.family == WeightFamily::Unit
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `w'(x)`: exact for powers, a central difference for custom weights.
    pub fn derivative(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::Unit => 0.0,
            WeightFamily::Power { scale, gamma } => scale * gamma * x.powf(gamma - 1.0),
            WeightFamily::Custom { .. } => {
                let h = 1e-5 * x;
                (self.evaluate(x + h) - self.evaluate(x - h)) / (2.0 * h)
            }
        }
    }

    /// `(scale, gamma)` when the weight is a power.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match self.family {
            WeightFamily::Unit => Some((1.0, 0.0)),
            WeightFamily::Power { scale, gamma } => Some((scale, gamma)),
            WeightFamily::Custom { .. } => None,
        }
    }

    /// `∫_s^t w^r` in closed form, `None` for custom weights. Infinite
    /// values are returned as `f64::INFINITY`.
    pub fn antiderivative_of_power(&self, r: f64, s: f64, t: f64) -> Option<f64> {
        let (scale, gamma) = self.power_params()?;
        Some(PowerLaw::new(scale.powf(r), r * gamma).mass(s, t))
    }

    /// The density `x ↦ w(x)^r`.
    pub fn pow(&self, r: f64, quad: &QuadratureSpec) -> Density {
        let closed = self.power_params().map(|(scale, gamma)| PowerLaw::new(scale.powf(r), r * gamma));
        Density {
            weight: self.clone(),
            r,
            closed,
            quad: quad.clone(),
        }
    }
}

/// `coef · x^e`, with exact masses and exact mass inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLaw {
    pub coef: f64,
    pub e: f64,
}

impl PowerLaw {
    pub fn new(coef: f64, e: f64) -> Self {
        Self { coef, e }
    }

    fn is_log(&self) -> bool {
        (self.e + 1.0).abs() < 1e-14
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coef * x.powf(self.e)
    }

    /// `∫_s^t coef·x^e` for `0 ≤ s ≤ t ≤ ∞`.
    pub fn mass(&self, s: f64, t: f64) -> f64 {
        if !(t > s) {
            return 0.0;
        }
        if self.is_log() {
            if s == 0.0 || t.is_infinite() {
                return f64::INFINITY;
            }
            return self.coef * (t / s).ln();
        }
        let q = self.e + 1.0;
        if s == 0.0 {
            if q < 0.0 {
                return f64::INFINITY;
            }
            return if t.is_infinite() {
                f64::INFINITY
            } else {
                self.coef * t.powf(q) / q
            };
        }
        if t.is_infinite() {
            return if q > 0.0 {
                f64::INFINITY
            } else {
                self.coef * s.powf(q) / -q
            };
        }
        // s^q·expm1(q·ln(t/s)) keeps relative accuracy for narrow intervals
        self.coef * s.powf(q) * (q * (t / s).ln()).exp_m1() / q
    }

    /// The `t ≥ s` with `∫_s^t = m`, `None` if the mass to the right is short.
    pub fn right_end(&self, s: f64, m: f64) -> Option<f64> {
        if m <= 0.0 {
            return Some(s);
        }
        let k = m / self.coef;
        if self.is_log() {
            if s == 0.0 {
                return None;
            }
            let t = s * k.exp();
            return t.is_finite().then_some(t);
        }
        let q = self.e + 1.0;
        if s == 0.0 {
            if q < 0.0 {
                return None;
            }
            return Some((k * q).powf(1.0 / q));
        }
        // t^q = s^q (1 + k q s^{-q})
        let z = k * q * s.powf(-q);
        if z <= -1.0 {
            return None;
        }
        let t = s * (z.ln_1p() / q).exp();
        t.is_finite().then_some(t)
    }

    /// The `s ≤ t` with `∫_s^t = m`, `None` if the mass to the left is short.
    pub fn left_end(&self, t: f64, m: f64) -> Option<f64> {
        if m <= 0.0 {
            return Some(t);
        }
        if t.is_infinite() {
            return None;
        }
        let k = m / self.coef;
        if self.is_log() {
            let s = t * (-k).exp();
            return (s > 0.0).then_some(s);
        }
        let q = self.e + 1.0;
        // s^q = t^q (1 − k q t^{-q})
        let z = -k * q * t.powf(-q);
        if z < -1.0 {
            return None;
        }
        if z == -1.0 {
            return Some(0.0);
        }
        let s = t * (z.ln_1p() / q).exp();
        (s >= 0.0 && s.is_finite()).then_some(s)
    }
}

/// A weight raised to a fixed real power.
#[derive(Clone, Debug)]
pub struct Density {
    weight: Weight,
    r: f64,
    closed: Option<PowerLaw>,
    quad: QuadratureSpec,
}

impl Density {
    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn exponent(&self) -> f64 {
        self.r
    }

    pub fn closed_form(&self) -> Option<PowerLaw> {
        self.closed
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.closed {
            Some(law) => law.value(x),
            None => {
                let w = self.weight.evaluate(x);
                if w == 0.0 && self.r < 0.0 {
                    f64::INFINITY
                } else {
                    w.powf(self.r)
                }
            }
        }
    }

    /// `∫_s^t` of the density for `0 ≤ s ≤ t ≤ ∞`; an infinite result is
    /// reported as [`Error::DivergentIntegral`] naming the offending end.
    pub fn integral(&self, s: f64, t: f64) -> Result<f64> {
        let v = self.mass(s, t);
        if v.is_finite() {
            return Ok(v);
        }
        let side = if t.is_finite() || self.mass(0.0, 1.0).is_infinite() && s == 0.0 {
            Side::Lower
        } else {
            Side::Upper
        };
        Err(Error::DivergentIntegral { side, s, t })
    }

    /// Like [`Density::integral`] but with divergence encoded as `+∞`.
    pub fn mass(&self, s: f64, t: f64) -> f64 {
        if !(t > s) {
            return 0.0;
        }
        if let Some(law) = self.closed {
            return law.mass(s, t);
        }
        if s == 0.0 && t.is_infinite() {
            return self.mass(0.0, 1.0) + self.mass(1.0, f64::INFINITY);
        }
        if s == 0.0 {
            return self.tail_towards_zero(t);
        }
        if t.is_infinite() {
            return self.tail_towards_infinity(s);
        }
        self.finite_mass(s, t)
    }

    fn finite_mass(&self, s: f64, t: f64) -> f64 {
        let pts = quadrature::panel_points(s, t, quadrature::geometric_points(s, t, 2.0));
        let spec = self.quad.tightened(10.0);
        quadrature::integrate(|x| self.value(x), &pts, &spec).value
    }

    /// Sums dyadic pieces `[t 2^{-j-1}, t 2^{-j}]` until they become negligible,
    /// pass the divergence threshold, or stop shrinking.
    fn tail_towards_zero(&self, t: f64) -> f64 {
        self.dyadic_tail(t, 0.5)
    }

    fn tail_towards_infinity(&self, s: f64) -> f64 {
        self.dyadic_tail(s.max(f64::MIN_POSITIVE), 2.0)
    }

    fn dyadic_tail(&self, start: f64, factor: f64) -> f64 {
        let mut total = 0.0;
        let mut x = start;
        let mut flat = 0;
        let mut last = f64::NAN;
        for _ in 0..1000 {
            let y = x * factor;
            if !(y > 0.0) || !y.is_finite() {
                break;
            }
            let (lo, hi) = if y < x { (y, x) } else { (x, y) };
            let piece = self.finite_mass(lo, hi);
            if !piece.is_finite() {
                return f64::INFINITY;
            }
            total += piece;
            if total > DIVERGENCE_THRESHOLD {
                return f64::INFINITY;
            }
            if piece <= 1e-16 * total || piece == 0.0 && total == 0.0 && flat > 60 {
                return total;
            }
            if last.is_finite() && piece >= 0.999 * last {
                flat += 1;
                if flat >= 40 {
                    return f64::INFINITY;
                }
            } else {
                flat = 0;
            }
            last = piece;
            x = y;
        }
        total
    }

    /// The `t ≥ s` carrying mass `m` on `[s, t]`, or `None` if the whole
    /// right tail carries less.
    pub fn right_end(&self, s: f64, m: f64) -> Option<f64> {
        if let Some(law) = self.closed {
            return law.right_end(s, m);
        }
        if m <= 0.0 {
            return Some(s);
        }
        let mut h = s.max(1e-3);
        let mut hi = s + h;
        let mut fhi = self.mass(s, hi) - m;
        while fhi < 0.0 {
            h *= 2.0;
            hi = s + h;
            if !hi.is_finite() || hi > 1e300 {
                return None;
            }
            fhi = self.mass(s, hi) - m;
        }
        illinois(|x| self.mass(s, x) - m, s, hi, -m, fhi)
    }

    /// The `s ≤ t` carrying mass `m` on `[s, t]`, or `None` if `(0, t)` is short.
    pub fn left_end(&self, t: f64, m: f64) -> Option<f64> {
        if let Some(law) = self.closed {
            return law.left_end(t, m);
        }
        if m <= 0.0 {
            return Some(t);
        }
        let full = self.mass(0.0, t);
        if full < m {
            return None;
        }
        if full == m {
            return Some(0.0);
        }
        // the mass on [s, t] decreases in s
        Some(bisect_boundary(|s| self.mass(s, t) < m, 0.0, t, 0.0))
    }
}

/// Outcome of a divergence test at one end of the half-line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointStatus {
    /// The norm product is infinite, as required.
    Diverges,
    /// The norm product is finite.
    Finite,
    /// Partial integrals neither settled nor crossed the threshold.
    Undetermined,
}

/// Diagnostics of the endpoint divergence condition at a split point `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceReport {
    pub c: f64,
    pub lower: EndpointStatus,
    pub upper: EndpointStatus,
    /// `‖1/v1‖_{p',(0,c)} · ‖v0‖_{p,(0,c)}` (infinite when divergent).
    pub lower_product: f64,
    /// `‖1/v1‖_{p',(c,∞)} · ‖v0‖_{p,(c,∞)}`.
    pub upper_product: f64,
}

impl DivergenceReport {
    /// `Some(true)` when both products diverge, `None` if either side is undetermined.
    pub fn satisfied(&self) -> Option<bool> {
        use EndpointStatus::*;
        match (self.lower, self.upper) {
            (Diverges, Diverges) => Some(true),
            (Finite, _) | (_, Finite) => Some(false),
            _ => None,
        }
    }
}

/// `v0`, `v1` and the exponent pair, with the two densities every solver uses.
#[derive(Clone, Debug)]
pub struct WeightPair {
    pub v0: Weight,
    pub v1: Weight,
    pub exponents: ExponentPair,
    dual: Density,
    primal: Density,
}

impl WeightPair {
    pub fn new(v0: Weight, v1: Weight, p: f64) -> Result<Self> {
        Self::with_quadrature(v0, v1, p, &QuadratureSpec::default())
    }

    pub fn with_quadrature(v0: Weight, v1: Weight, p: f64, quad: &QuadratureSpec) -> Result<Self> {
        let exponents = ExponentPair::new(p)?;
        let dual = v1.pow(-exponents.p_conj, quad);
        let primal = v0.pow(p, quad);
        let pair = Self {
            v0,
            v1,
            exponents,
            dual,
            primal,
        };
        pair.spot_check()?;
        Ok(pair)
    }

    pub fn p(&self) -> f64 {
        self.exponents.p
    }

    pub fn p_conj(&self) -> f64 {
        self.exponents.p_conj
    }

    /// The density `v1^{-p'}`.
    pub fn dual(&self) -> &Density {
        &self.dual
    }

    /// The density `v0^p`.
    pub fn primal(&self) -> &Density {
        &self.primal
    }

    pub fn is_unit(&self) -> bool {
        self.v0.is_unit() && self.v1.is_unit()
    }

    /// Nonnegativity of both weights and local integrability of `v1^{-p'}`
    /// on a few compact intervals.
    fn spot_check(&self) -> Result<()> {
        for &x in &[1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3] {
            for (name, w) in [("v0", &self.v0), ("v1", &self.v1)] {
                let y = w.evaluate(x);
                if !(y >= 0.0) {
                    return Err(Error::InvalidInput(format!("{name}({x}) = {y} is not a nonnegative number")));
                }
            }
        }
        for &(s, t) in &[(0.01, 0.1), (0.5, 2.0), (10.0, 20.0)] {
            if !self.dual.mass(s, t).is_finite() {
                return Err(Error::InvalidInput(format!(
                    "1/v1 is not locally p'-integrable on [{s}, {t}]"
                )));
            }
        }
        Ok(())
    }

    /// Tests whether the norm products on `(0, c)` and `(c, ∞)` both diverge.
    pub fn check_divergence_condition(&self, c: f64) -> Result<DivergenceReport> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("split point must be positive, got {c}")));
        }
        let (p, pc) = (self.p(), self.p_conj());
        let side = |s: f64, t: f64| {
            let (wd, wp) = (self.dual.mass(s, t), self.primal.mass(s, t));
            let product = wd.powf(1.0 / pc) * wp.powf(1.0 / p);
            let status = if product.is_infinite() {
                EndpointStatus::Diverges
            } else if product.is_finite() {
                EndpointStatus::Finite
            } else {
                // 0 · ∞ counts as zero, anything else is unknown
                if wd == 0.0 || wp == 0.0 {
                    EndpointStatus::Finite
                } else {
                    EndpointStatus::Undetermined
                }
            };
            let product = if product.is_nan() && status == EndpointStatus::Finite { 0.0 } else { product };
            (status, product)
        };
        let (lower, lower_product) = side(0.0, c);
        let (upper, upper_product) = side(c, f64::INFINITY);
        Ok(DivergenceReport {
            c,
            lower,
            upper,
            lower_product,
            upper_product,
        })
    }
}

/// `∫_s^t w^r` for the weight `w`, closed form when available.
pub fn integrate_power(w: &Weight, r: f64, s: f64, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(s >= 0.0 && t > s) {
        return Err(Error::InvalidInput(format!("need 0 ≤ s < t, got s = {s}, t = {t}")));
    }
    w.pow(r, quad).integral(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn closed_form_examples() {
        let x = Weight::power(1.0, 1.0).unwrap();
        assert!((integrate_power(&x, -2.0, 1.0, 2.0, &q()).unwrap() - 0.5).abs() < 1e-15);
        assert!((integrate_power(&Weight::unit(), 3.0, 0.0, 3.0, &q()).unwrap() - 3.0).abs() < 1e-15);
        let sqrt = Weight::power(1.0, 0.5).unwrap();
        assert!((integrate_power(&sqrt, 2.0, 0.0, 1.0, &q()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn divergence_names_the_side() {
        let x = Weight::power(1.0, 1.0).unwrap();
        match integrate_power(&x, -2.0, 0.0, 1.0, &q()) {
            Err(Error::DivergentIntegral { side, .. }) => assert_eq!(side, Side::Lower),
            other => panic!("{other:?}"),
        }
        match integrate_power(&Weight::unit(), 1.0, 1.0, f64::INFINITY, &q()) {
            Err(Error::DivergentIntegral { side, .. }) => assert_eq!(side, Side::Upper),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn log_case_is_exact() {
        let w = Weight::power(2.0, -1.0).unwrap();
        let v = integrate_power(&w, 1.0, 1.0, std::f64::consts::E, &q()).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn power_law_inversion_round_trips() {
        for &e in &[-3.0, -2.0, -1.0, -0.5, 0.0, 1.0, 2.5] {
            let law = PowerLaw::new(1.7, e);
            for &s in &[0.3, 1.0, 4.0] {
                for &m in &[1e-6, 0.01, 0.3] {
                    if let Some(t) = law.right_end(s, m) {
                        assert!((law.mass(s, t) - m).abs() < 1e-12 * m.max(1.0), "e={e} s={s} m={m}");
                    }
                    if let Some(l) = law.left_end(s, m) {
                        assert!((law.mass(l, s) - m).abs() < 1e-12 * m.max(1.0), "e={e} s={s} m={m}");
                    }
                }
            }
        }
        assert!(PowerLaw::new(1.0, 0.0).left_end(0.5, 0.6).is_none());
        assert!(PowerLaw::new(1.0, -2.0).right_end(1.0, 1.5).is_none());
    }

    #[test]
    fn numeric_density_matches_closed_form() {
        let custom = Weight::custom("x^1.5", |x: f64| x.powf(1.5));
        let exact = Weight::power(1.0, 1.5).unwrap();
        for &(r, s, t) in &[(1.0, 0.0, 2.0), (-0.5, 0.1, 3.0), (2.0, 1.0, 5.0)] {
            let a = integrate_power(&custom, r, s, t, &q()).unwrap();
            let b = integrate_power(&exact, r, s, t, &q()).unwrap();
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{r} {s} {t}: {a} vs {b}");
        }
    }

    #[test]
    fn numeric_divergence_detection() {
        let custom = Weight::custom("x", |x: f64| x);
        assert!(custom.pow(-2.0, &q()).mass(0.0, 1.0).is_infinite());
        assert!(custom.pow(-1.0, &q()).mass(0.0, 1.0).is_infinite());
        assert!(custom.pow(1.0, &q()).mass(1.0, f64::INFINITY).is_infinite());
        let tail = custom.pow(-2.0, &q()).mass(1.0, f64::INFINITY);
        assert!((tail - 1.0).abs() < 1e-8, "{tail}");
    }

    #[test]
    fn numeric_mass_walks() {
        let d = Weight::custom("x", |x: f64| x).pow(-2.0, &q());
        let t = d.right_end(1.0, 0.5).unwrap();
        assert!((t - 2.0).abs() < 1e-8);
        let s = d.left_end(2.0, 0.5).unwrap();
        assert!((s - 1.0).abs() < 1e-8);
        assert!(d.right_end(1.0, 1.5).is_none());
    }

    #[test]
    fn divergence_condition_examples() {
        let x = Weight::power(1.0, 1.0).unwrap();
        let pair = WeightPair::new(Weight::unit(), x, 2.0).unwrap();
        assert_eq!(pair.check_divergence_condition(1.0).unwrap().satisfied(), Some(true));

        let unit = WeightPair::new(Weight::unit(), Weight::unit(), 2.0).unwrap();
        let rep = unit.check_divergence_condition(1.0).unwrap();
        assert_eq!(rep.lower, EndpointStatus::Finite);
        assert!((rep.lower_product - 1.0).abs() < 1e-15);
        assert_eq!(rep.satisfied(), Some(false));

        let inv = WeightPair::new(Weight::power(1.0, -1.0).unwrap(), Weight::unit(), 2.0).unwrap();
        assert_eq!(inv.check_divergence_condition(1.0).unwrap().satisfied(), Some(true));
    }

    #[test]
    fn exponent_pair_rejects_bad_p() {
        assert!(ExponentPair::new(1.0).is_err());
        let e = ExponentPair::new(3.0).unwrap();
        assert!((1.0 / e.p + 1.0 / e.p_conj - 1.0).abs() < 1e-15);
    }
}
