//! Equilibrium windows, weighted Sobolev norms and associate-space norms on
//! the half-line `(0, ∞)`.
//!
//! For weights `v0`, `v1` and `1 < p < ∞` the crate solves for the windows
//! `[a(t), b(t)]` that balance the mass of `v1^{-p'}` around `t`, builds the
//! covering grid `η_k`, evaluates the Sobolev norm `‖v0 f‖_p + ‖v1 f'‖_p` and
//! the strong and weak associate norms, and provides the test-function
//! constructions and checks that compare them.
//!
//! ```
//! use assocnorm::{EquilibriumSolution, HalfLineFunction, QuadratureSpec, Weight, WeightPair};
//!
//! let pair = WeightPair::new(Weight::unit(), Weight::power(1.0, 1.0)?, 2.0)?;
//! let sol = EquilibriumSolution::new(pair)?;
//! let (a, b) = sol.window(1.0)?;
//! assert!((a - 0.6909830056250525).abs() < 1e-12 && (b - 1.8090169943749475).abs() < 1e-12);
//!
//! let g = HalfLineFunction::indicator(1.0, 2.0);
//! let weak = assocnorm::weak_norm(&g, &sol, &QuadratureSpec::default())?;
//! assert!(weak.value > 0.0);
//! # Ok::<(), assocnorm::Error>(())
//! ```

pub mod error;
pub mod quadrature;
pub mod weights;
pub mod equilibrium;
pub mod function;
pub mod functionals;
pub mod constructions;
pub mod duality;

pub use constructions::{
    extremal_f, g_corpus, hat_corpus, oscillator, oscillator_with_blocks, smooth_to_g, witness_terms,
    witness_unbounded, CorpusSpec, DensityMode, OscillatorPlan, Witness, WitnessTerm, OSCILLATOR_CONSTANT,
};
pub use duality::{
    embedding_constants, estimate_j, hardy_constants, holder_bound, holder_matrix, j_family, pairing,
    verify_embedding, verify_reflexivity, verify_strong_of_weak_zero, DivergenceRow, EmbeddingReport, HardyReport,
    SandwichReport,
};
pub use equilibrium::{build_eta_grid, solve_window, Certificate, EquilibriumSolution, EtaGrid, WindowMasses};
pub use error::{Error, Result, Side};
pub use function::HalfLineFunction;
pub use functionals::{
    block_norm, remark_unit_norm, sobolev_norm, strong_norm, truncate, weak_norm, BlockEntry, BlockNormReport,
    NormReport,
};
pub use quadrature::{Estimate, QuadratureSpec};
pub use weights::{integrate_power, DivergenceReport, EndpointStatus, ExponentPair, Weight, WeightFamily, WeightPair};
