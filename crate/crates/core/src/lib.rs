//! Simulation and numerical verification machinery for one-dimensional
//! Levy-type processes with discontinuous characteristics.
//!
//! The crate covers two scenarios: two Levy processes glued at a threshold
//! (the left dynamics act on (-inf, 0], the right on (0, inf)) and
//! stable-like processes whose stability index jumps at finitely many
//! points. For both it provides
//!
//! * Levy triplets, characteristic exponents and symbols ([`levy`],
//!   [`symbol`]),
//! * generator application to smooth bumps by direct quadrature and by
//!   symbol inversion, with cross-route checks ([`operators`], [`fourier`]),
//! * the approximating sequences used to handle the discontinuities:
//!   mollified index functions, shrinking exceptional sets and glue weights
//!   ([`approx`]),
//! * path simulation with reproducible substream seeding ([`sim`]), and
//! * diagnostics: symbol growth conditions, exit and transition-density
//!   bounds, and the empirical martingale-problem test ([`diag`]).

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod diag;
pub mod error;
pub mod fourier;
pub mod levy;
pub mod operators;
pub mod quad;
pub mod sim;
pub mod stability;
pub mod stats;
pub mod symbol;
pub mod testfn;

pub use error::{LevyError, Result};
pub use levy::{eval_levy_khinchine, stable_normalizer, JumpDist, JumpMeasure, LevyTriplet};
pub use operators::{
    apply_generator_fourier, apply_generator_integral, generator_difference_sup, GeneratorSpec,
};
pub use sim::{
    sample_stable, simulate_glued_sde, simulate_levy_increments, simulate_stable_like,
    InitialLaw, LevyIncrementSampler, PathEnsemble, SimConfig,
};
pub use stability::{Branch, StabilityIndexFn};
pub use symbol::{AlphaFn, SymbolFn};
pub use testfn::TestFn;
