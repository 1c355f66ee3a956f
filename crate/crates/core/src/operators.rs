//! Application of generators to test functions by two independent routes.
//!
//! The integral route evaluates the drift/diffusion terms plus the jump
//! integral directly. For symmetric measures the compensator cancels
//! pairwise and the jump part reduces to
//!
//! ```text
//! int_0^inf ( f(x + c z) + f(x - c z) - 2 f(x) ) rho(z) dz
//! ```
//!
//! with a Taylor regime below z = 1e-4 (second difference ~ c^2 z^2 f''(x)),
//! adaptive panels on the smooth region, and an exact cutoff where f's
//! support ends. The scale c covers generators whose symbol is q(c xi).
//!
//! The frequency route inverts the symbol against the test function's
//! transform table (see `fourier`). Route agreement is the main correctness
//! check of the crate.

use crate::error::{LevyError, Result};
use crate::levy::{stable_normalizer, JumpDist, JumpMeasure, LevyTriplet};
use crate::quad::{gl16, gl24, linear_breaks, log_breaks};
use crate::stability::StabilityIndexFn;
use crate::symbol::SymbolFn;
use crate::testfn::TestFn;
use std::sync::Arc;

/// Taylor-regime boundary for the singular jump integral.
const SMALL_Z: f64 = 1e-4;

/// The operators this crate can apply.
#[derive(Debug, Clone)]
pub enum GeneratorSpec {
    /// Generator of a Levy process.
    Levy(LevyTriplet),
    /// Stable-like generator with state-dependent index and normalized h(x).
    StableLike(StabilityIndexFn),
    /// Stable-like generator driven by a mollified index.
    StableLikeApprox(Arc<crate::approx::MollifiedAlpha>),
    /// Left generator on (-inf, 0], right generator on (0, inf).
    Glued {
        left: LevyTriplet,
        right: LevyTriplet,
    },
    /// Smooth interpolation with symbol q1(g1 xi) + q2(g2 xi).
    GluedApprox {
        left: LevyTriplet,
        right: LevyTriplet,
        n: u32,
    },
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Levy(t) => t.validate(),
            GeneratorSpec::StableLike(a) => a.validate(),
            GeneratorSpec::StableLikeApprox(_) => Ok(()),
            GeneratorSpec::Glued { left, right }
            | GeneratorSpec::GluedApprox { left, right, .. } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    pub fn symbol(&self) -> Result<SymbolFn> {
        match self {
            GeneratorSpec::Levy(t) => SymbolFn::from_triplet(t.clone()),
            GeneratorSpec::StableLike(a) => SymbolFn::stable_like(a.clone()),
            GeneratorSpec::StableLikeApprox(m) => Ok(SymbolFn::stable_like_smooth(m.clone())),
            GeneratorSpec::Glued { left, right } => SymbolFn::glued(left.clone(), right.clone()),
            GeneratorSpec::GluedApprox { left, right, n } => {
                SymbolFn::glued_approx(left.clone(), right.clone(), *n)
            }
        }
    }
}

struct AdaptiveCtx<'f> {
    f: &'f dyn Fn(f64) -> f64,
    max_depth: u32,
}

fn adaptive_panel(ctx: &AdaptiveCtx<'_>, a: f64, b: f64, depth: u32) -> Result<f64> {
    let hi = gl24().integrate(a, b, ctx.f);
    let lo = gl16().integrate(a, b, ctx.f);
    if (hi - lo).abs() <= 1e-13 * (1.0 + hi.abs()) {
        return Ok(hi);
    }
    if depth >= ctx.max_depth {
        return Err(LevyError::Quadrature(format!(
            "panel [{a}, {b}] did not converge after {depth} refinements; last gap {}",
            (hi - lo).abs()
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive_panel(ctx, a, mid, depth + 1)? + adaptive_panel(ctx, mid, b, depth + 1)?)
}

fn adaptive_over_breaks<F: Fn(f64) -> f64>(breaks: &[f64], f: F) -> Result<f64> {
    let ctx = AdaptiveCtx {
        f: &f,
        max_depth: 14,
    };
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        acc += adaptive_panel(&ctx, w[0], w[1], 0)?;
    }
    Ok(acc)
}

/// Jump integral for a symmetric measure with one-sided density rho, scaled
/// by c: int_0^inf (f(x+cz) + f(x-cz) - 2 f(x)) rho(z) dz.
fn symmetric_jump_integral(
    measure: &JumpMeasure,
    f: &TestFn,
    x: f64,
    c: f64,
) -> Result<f64> {
    let (alpha, lambda, scale) = match *measure {
        JumpMeasure::Stable { alpha, scale } => (alpha, 0.0, scale),
        JumpMeasure::TemperedStable {
            alpha,
            lambda,
            scale,
        } => (alpha, lambda, scale),
        _ => unreachable!("symmetric_jump_integral only handles stable-type measures"),
    };
    let rho = |z: f64| scale * (-lambda * z).exp() * z.powf(-1.0 - alpha);

    // Taylor regime [0, SMALL_Z]
    let mut acc = 0.5 * c * c * f.d2(x) * measure.small_square_mass(SMALL_Z);

    // furthest z at which f(x +- c z) can be nonzero
    let (l, r) = f.support();
    let z_reach = ((l - x).abs().max((r - x).abs())) / c;
    let y_num = z_reach.max(2.0 * SMALL_Z);

    let mut breaks = log_breaks(SMALL_Z, y_num, 0.2);
    // split at support edges seen through the scaling
    for edge in [l, r] {
        for z in [(edge - x) / c, (x - edge) / c] {
            if z > SMALL_Z && z < y_num {
                breaks.push(z);
            }
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * a.abs().max(1.0));
    acc += adaptive_over_breaks(&breaks, |z| {
        (f.eval(x + c * z) + f.eval(x - c * z) - 2.0 * f.eval(x)) * rho(z)
    })?;

    // beyond the support, only -2 f(x) survives
    let fx = f.eval(x);
    if fx != 0.0 {
        acc -= fx * measure.tail_mass(y_num);
    }
    Ok(acc)
}

/// int (f(x + c y) - f(x) - c y f'(x) 1_{[-1,1]}(y)) nu(dy) for the
/// finite-activity families, with the compensator evaluated explicitly.
fn finite_activity_jump_integral(
    measure: &JumpMeasure,
    f: &TestFn,
    x: f64,
    c: f64,
) -> Result<f64> {
    let term = |y: f64| {
        let comp = if y.abs() <= 1.0 { c * y * f.d1(x) } else { 0.0 };
        f.eval(x + c * y) - f.eval(x) - comp
    };
    match measure {
        JumpMeasure::CompoundPoisson { rate, jumps } => match jumps {
            JumpDist::Point { size } => Ok(rate * term(*size)),
            _ => {
                let (lo, hi) = jumps.effective_support();
                // resolve both the density scale and f's features through c
                let width = ((hi - lo) / 12.0).min(0.35 / c.max(1e-12));
                let mut breaks = linear_breaks(lo, hi, width);
                for cut in [-1.0, 1.0] {
                    if cut > lo && cut < hi {
                        breaks.push(cut);
                    }
                }
                breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let v = adaptive_over_breaks(&breaks, |y| term(y) * jumps.density(y))?;
                Ok(rate * v)
            }
        },
        JumpMeasure::Table { atoms } => Ok(atoms.iter().map(|&(y, w)| w * term(y)).sum()),
        _ => unreachable!(),
    }
}

/// A^{(c)} f(x) for the generator with symbol q(c xi), q the triplet's
/// exponent: c b f'(x) + (c^2 a / 2) f''(x) + scaled jump integral.
fn apply_triplet_scaled(t: &LevyTriplet, f: &TestFn, x: f64, c: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let mut acc = c * t.drift * f.d1(x) + 0.5 * c * c * t.diffusion * f.d2(x);
    acc += match &t.jumps {
        JumpMeasure::None => 0.0,
        JumpMeasure::Stable { .. } | JumpMeasure::TemperedStable { .. } => {
            symmetric_jump_integral(&t.jumps, f, x, c)?
        }
        m => finite_activity_jump_integral(m, f, x, c)?,
    };
    Ok(acc)
}

/// Af(x) by direct quadrature of the jump integral plus local terms.
pub fn apply_generator_integral(spec: &GeneratorSpec, f: &TestFn, x: f64) -> Result<f64> {
    spec.validate()?;
    match spec {
        GeneratorSpec::Levy(t) => apply_triplet_scaled(t, f, x, 1.0),
        GeneratorSpec::Glued { left, right } => {
            let t = if x <= 0.0 { left } else { right };
            apply_triplet_scaled(t, f, x, 1.0)
        }
        GeneratorSpec::GluedApprox { left, right, n } => {
            let g1 = crate::approx::glue_weight_left(*n, x);
            Ok(apply_triplet_scaled(left, f, x, g1)?
                + apply_triplet_scaled(right, f, x, 1.0 - g1)?)
        }
        GeneratorSpec::StableLike(a) => {
            let al = a.eval(x);
            let h = stable_normalizer(al)?;
            let m = JumpMeasure::Stable { alpha: al, scale: h };
            symmetric_jump_integral(&m, f, x, 1.0)
        }
        GeneratorSpec::StableLikeApprox(mol) => {
            let al = mol.eval(x);
            let h = stable_normalizer(al)?;
            let m = JumpMeasure::Stable { alpha: al, scale: h };
            symmetric_jump_integral(&m, f, x, 1.0)
        }
    }
}

/// Value and imaginary residual of the frequency-route application.
#[derive(Debug, Clone, Copy)]
pub struct FourierApplied {
    pub value: f64,
    pub im_residual: f64,
}

pub fn apply_generator_fourier_detailed(
    spec: &GeneratorSpec,
    f: &TestFn,
    x: f64,
) -> Result<FourierApplied> {
    spec.validate()?;
    let sym = spec.symbol()?;
    let ctx = f.fourier_ctx();
    let (value, im_residual) = ctx.apply_row(&sym.row(x), x);
    if im_residual.abs() > 1e-6 * (1.0 + value.abs()) {
        return Err(LevyError::Truncation(format!(
            "imaginary residual {im_residual} at x = {x} exceeds sanity bound"
        )));
    }
    Ok(FourierApplied { value, im_residual })
}

/// Af(x) via the symbol: -int e^{i x xi} q(x, xi) fhat(xi) dxi.
pub fn apply_generator_fourier(spec: &GeneratorSpec, f: &TestFn, x: f64) -> Result<f64> {
    Ok(apply_generator_fourier_detailed(spec, f, x)?.value)
}

/// Af on an ascending uniform grid, sharing symbol preparation across points.
pub fn apply_generator_fourier_batch(
    spec: &GeneratorSpec,
    f: &TestFn,
    xs: &[f64],
) -> Result<Vec<f64>> {
    spec.validate()?;
    let sym = spec.symbol()?;
    Ok(f.fourier_ctx().apply_batch(&sym, xs))
}

/// sup over a dense grid (>= 512 points per unit length, endpoints included)
/// of |A_a f - A_b f| on a finite union of closed intervals.
pub fn generator_difference_sup(
    spec_a: &GeneratorSpec,
    spec_b: &GeneratorSpec,
    f: &TestFn,
    region: &[(f64, f64)],
) -> Result<f64> {
    let mut sup = 0.0f64;
    for &(a, b) in region {
        if !(b >= a) {
            return Err(LevyError::InvalidInput(format!(
                "region interval [{a}, {b}] is empty"
            )));
        }
        let n = (((b - a) * 512.0).ceil() as usize).max(1);
        let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let va = apply_generator_fourier_batch(spec_a, f, &xs)?;
        let vb = apply_generator_fourier_batch(spec_b, f, &xs)?;
        for (x, y) in va.iter().zip(&vb) {
            sup = sup.max((x - y).abs());
        }
    }
    Ok(sup)
}
