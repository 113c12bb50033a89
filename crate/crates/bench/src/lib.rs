//! Fixtures shared by the criterion benches.

use assocnorm::{EquilibriumSolution, HalfLineFunction, Weight, WeightPair};

/// `v0 = 1`, `v1 = x` with exponent `p`.
pub fn linear(p: f64) -> EquilibriumSolution {
    let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0).expect("valid power"), p).expect("valid pair");
    EquilibriumSolution::new(pair).expect("divergence condition holds")
}

/// `v0 = x^{-1/2}`, `v1 = x^{1/2}`: no closed form for the windows.
pub fn custom(p: f64) -> EquilibriumSolution {
    let pair = WeightPair::new(
        Weight::custom("x^-1/2", |x: f64| x.powf(-0.5)),
        Weight::custom("x^1/2", f64::sqrt),
        p,
    )
    .expect("valid pair");
    EquilibriumSolution::new_unchecked(pair).with_cache(false)
}

pub fn zigzag() -> HalfLineFunction {
    HalfLineFunction::piecewise_linear("zigzag", vec![(1.0, 0.0), (1.3, 1.0), (1.8, -0.7), (2.2, 0.0)])
        .expect("increasing knots")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_solve() {
        assert!(linear(2.0).window(1.0).is_ok());
        assert!(custom(2.0).window(1.0).is_ok());
        assert_eq!(zigzag().evaluate(1.3), 1.0);
    }
}
