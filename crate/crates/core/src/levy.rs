//! Levy triplets, jump measures and characteristic exponents.
//!
//! A triplet (b, a, nu) determines a Levy process through its
//! characteristic exponent
//!
//! ```text
//! q(xi) = -i b xi + (a/2) xi^2 - int ( e^{i xi y} - 1 - i xi y 1_{[-1,1]}(y) ) nu(dy)
//! ```
//!
//! Jump measures are restricted to a closed set of tagged families so that
//! integrability of `1 ∧ y^2` can be certified per family instead of being
//! assumed for a black-box sampler.

use crate::error::{LevyError, Result};
use crate::quad::{gl16, gl24, linear_breaks, log_breaks};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Jump-size distribution of a compound Poisson measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JumpDist {
    /// Deterministic jumps of the given size.
    Point { size: f64 },
    /// Gaussian jump sizes.
    Normal { mean: f64, std_dev: f64 },
    /// Uniform jump sizes on (lo, hi).
    Uniform { lo: f64, hi: f64 },
}

impl JumpDist {
    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpDist::Point { size } => {
                if size == 0.0 || !size.is_finite() {
                    return Err(LevyError::InvalidMeasure(
                        "point jump size must be finite and nonzero".into(),
                    ));
                }
            }
            JumpDist::Normal { mean, std_dev } => {
                if !(std_dev > 0.0) || !mean.is_finite() {
                    return Err(LevyError::InvalidMeasure(
                        "normal jump distribution needs finite mean and std_dev > 0".into(),
                    ));
                }
            }
            JumpDist::Uniform { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(LevyError::InvalidMeasure(
                        "uniform jump distribution needs lo < hi".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Density at y; `Point` has no density and is handled separately.
    pub fn density(&self, y: f64) -> f64 {
        match *self {
            JumpDist::Point { .. } => panic!("point mass has no density"),
            JumpDist::Normal { mean, std_dev } => {
                let z = (y - mean) / std_dev;
                (-0.5 * z * z).exp() / (std_dev * (2.0 * std::f64::consts::PI).sqrt())
            }
            JumpDist::Uniform { lo, hi } => {
                if y > lo && y < hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval outside of which the density is negligible.
    pub fn effective_support(&self) -> (f64, f64) {
        match *self {
            JumpDist::Point { size } => (size, size),
            JumpDist::Normal { mean, std_dev } => (mean - 12.0 * std_dev, mean + 12.0 * std_dev),
            JumpDist::Uniform { lo, hi } => (lo, hi),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match *self {
            JumpDist::Point { .. } => false,
            JumpDist::Normal { mean, .. } => mean == 0.0,
            JumpDist::Uniform { lo, hi } => lo == -hi,
        }
    }
}

/// Tagged description of a Levy measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JumpMeasure {
    /// No jumps.
    None,
    /// Symmetric alpha-stable measure with density h / |y|^{1+alpha}.
    Stable { alpha: f64, scale: f64 },
    /// Symmetric tempered stable measure with density h e^{-lambda |y|} / |y|^{1+alpha}.
    TemperedStable { alpha: f64, lambda: f64, scale: f64 },
    /// Finite-activity measure: rate times a jump distribution.
    CompoundPoisson { rate: f64, jumps: JumpDist },
    /// Finite list of atoms (size, mass); sizes must be nonzero.
    Table { atoms: Vec<(f64, f64)> },
}

impl JumpMeasure {
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpMeasure::None => Ok(()),
            JumpMeasure::Stable { alpha, scale } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(LevyError::AlphaOutOfRange(*alpha));
                }
                if !(*scale > 0.0) {
                    return Err(LevyError::InvalidMeasure(
                        "stable scale h must be positive".into(),
                    ));
                }
                Ok(())
            }
            JumpMeasure::TemperedStable {
                alpha,
                lambda,
                scale,
            } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(LevyError::AlphaOutOfRange(*alpha));
                }
                if !(*lambda > 0.0) || !(*scale > 0.0) {
                    return Err(LevyError::InvalidMeasure(
                        "tempered stable needs lambda > 0 and scale > 0".into(),
                    ));
                }
                Ok(())
            }
            JumpMeasure::CompoundPoisson { rate, jumps } => {
                if !(*rate > 0.0) {
                    return Err(LevyError::InvalidMeasure(
                        "compound Poisson rate must be positive".into(),
                    ));
                }
                jumps.validate()
            }
            JumpMeasure::Table { atoms } => {
                if atoms.is_empty() {
                    return Err(LevyError::InvalidMeasure("atom table is empty".into()));
                }
                for &(y, w) in atoms {
                    if y == 0.0 || !y.is_finite() {
                        return Err(LevyError::InvalidMeasure(
                            "atom sizes must be finite and nonzero".into(),
                        ));
                    }
                    if !(w > 0.0) || !w.is_finite() {
                        return Err(LevyError::InvalidMeasure(
                            "atom masses must be positive and finite".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// int (1 ∧ y^2) nu(dy), the Levy-measure integrability certificate.
    pub fn one_wedge_square_mass(&self) -> f64 {
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Stable { alpha, scale } => {
                2.0 * scale * (1.0 / (2.0 - alpha) + 1.0 / alpha)
            }
            JumpMeasure::TemperedStable {
                alpha,
                lambda,
                scale,
            } => {
                let gl = gl24();
                let inner = gl.integrate_panels(&log_breaks(1e-12, 1.0, 0.8), |y| {
                    y * y * scale * (-lambda * y).exp() * y.powf(-1.0 - alpha)
                });
                let outer = gl.integrate_panels(
                    &log_breaks(1.0, 1.0 + 60.0 / lambda, 0.5),
                    |y| scale * (-lambda * y).exp() * y.powf(-1.0 - alpha),
                );
                2.0 * (inner + outer)
            }
            JumpMeasure::CompoundPoisson { rate, .. } => *rate, // bounded by total mass
            JumpMeasure::Table { atoms } => {
                atoms.iter().map(|&(y, w)| w * (y * y).min(1.0)).sum()
            }
        }
    }

    /// nu({|y| > r}) for r > 0.
    pub fn tail_mass(&self, r: f64) -> f64 {
        assert!(r > 0.0);
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Stable { alpha, scale } => 2.0 * scale * r.powf(-alpha) / alpha,
            JumpMeasure::TemperedStable {
                alpha,
                lambda,
                scale,
            } => {
                let gl = gl24();
                2.0 * gl.integrate_panels(&log_breaks(r, r + 80.0 / lambda, 0.5), |y| {
                    scale * (-lambda * y).exp() * y.powf(-1.0 - alpha)
                })
            }
            JumpMeasure::CompoundPoisson { rate, jumps } => match jumps {
                JumpDist::Point { size } => {
                    if size.abs() > r {
                        *rate
                    } else {
                        0.0
                    }
                }
                _ => {
                    let (lo, hi) = jumps.effective_support();
                    let gl = gl24();
                    let mut mass = 0.0;
                    if hi > r {
                        mass += gl.integrate_panels(&linear_breaks(r.max(lo), hi, 0.5), |y| {
                            jumps.density(y)
                        });
                    }
                    if lo < -r {
                        mass += gl.integrate_panels(&linear_breaks(lo, (-r).min(hi), 0.5), |y| {
                            jumps.density(y)
                        });
                    }
                    rate * mass
                }
            },
            JumpMeasure::Table { atoms } => atoms
                .iter()
                .filter(|&&(y, _)| y.abs() > r)
                .map(|&(_, w)| w)
                .sum(),
        }
    }

    /// int_{r < |y| <= 1} y nu(dy), the drift correction used when jumps
    /// below r are dropped in simulation. Zero for symmetric families.
    pub fn band_compensator(&self, r: f64) -> f64 {
        assert!(r > 0.0);
        match self {
            JumpMeasure::None
            | JumpMeasure::Stable { .. }
            | JumpMeasure::TemperedStable { .. } => 0.0,
            JumpMeasure::CompoundPoisson { rate, jumps } => match jumps {
                JumpDist::Point { size } => {
                    if size.abs() > r && size.abs() <= 1.0 {
                        rate * size
                    } else {
                        0.0
                    }
                }
                _ => {
                    let (lo, hi) = jumps.effective_support();
                    let gl = gl24();
                    let mut acc = 0.0;
                    let a = r.max(lo);
                    let b = 1.0f64.min(hi);
                    if b > a {
                        acc += gl
                            .integrate_panels(&linear_breaks(a, b, 0.25), |y| y * jumps.density(y));
                    }
                    let a2 = (-1.0f64).max(lo);
                    let b2 = (-r).min(hi);
                    if b2 > a2 {
                        acc += gl.integrate_panels(&linear_breaks(a2, b2, 0.25), |y| {
                            y * jumps.density(y)
                        });
                    }
                    rate * acc
                }
            },
            JumpMeasure::Table { atoms } => atoms
                .iter()
                .filter(|&&(y, _)| y.abs() > r && y.abs() <= 1.0)
                .map(|&(y, w)| y * w)
                .sum(),
        }
    }

    /// int_{|y| <= r} y^2 nu(dy).
    pub fn small_square_mass(&self, r: f64) -> f64 {
        assert!(r > 0.0 && r <= 1.0);
        match self {
            JumpMeasure::None => 0.0,
            JumpMeasure::Stable { alpha, scale } => 2.0 * scale * r.powf(2.0 - alpha) / (2.0 - alpha),
            JumpMeasure::TemperedStable {
                alpha,
                lambda,
                scale,
            } => {
                // Three-term expansion of e^{-lambda y}; the remainder is
                // O(lambda^3 r^{5-alpha}) and r is always <= 1e-2 here.
                let a = *alpha;
                let l = *lambda;
                2.0 * scale
                    * (r.powf(2.0 - a) / (2.0 - a) - l * r.powf(3.0 - a) / (3.0 - a)
                        + 0.5 * l * l * r.powf(4.0 - a) / (4.0 - a))
            }
            JumpMeasure::CompoundPoisson { rate, jumps } => match jumps {
                JumpDist::Point { size } => {
                    if size.abs() <= r {
                        rate * size * size
                    } else {
                        0.0
                    }
                }
                _ => {
                    let (lo, hi) = jumps.effective_support();
                    let a = (-r).max(lo);
                    let b = r.min(hi);
                    if b <= a {
                        return 0.0;
                    }
                    rate * gl24()
                        .integrate_panels(&linear_breaks(a, b, 0.25), |y| y * y * jumps.density(y))
                }
            },
            JumpMeasure::Table { atoms } => atoms
                .iter()
                .filter(|&&(y, _)| y.abs() <= r)
                .map(|&(y, w)| w * y * y)
                .sum(),
        }
    }

    /// Whether the measure is symmetric under y -> -y by construction.
    pub fn is_symmetric(&self) -> bool {
        match self {
            JumpMeasure::None | JumpMeasure::Stable { .. } | JumpMeasure::TemperedStable { .. } => {
                true
            }
            JumpMeasure::CompoundPoisson { jumps, .. } => jumps.is_symmetric(),
            JumpMeasure::Table { atoms } => atoms.iter().all(|&(y, w)| {
                atoms
                    .iter()
                    .any(|&(y2, w2)| (y2 + y).abs() < 1e-15 && (w2 - w).abs() < 1e-15)
            }),
        }
    }
}

/// Characteristics (b, a, nu) of a one-dimensional Levy process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub drift: f64,
    pub diffusion: f64,
    pub jumps: JumpMeasure,
}

impl LevyTriplet {
    pub fn new(drift: f64, diffusion: f64, jumps: JumpMeasure) -> Result<Self> {
        let t = LevyTriplet {
            drift,
            diffusion,
            jumps,
        };
        t.validate()?;
        Ok(t)
    }

    /// Brownian motion with variance parameter a (symbol a xi^2 / 2).
    pub fn brownian(a: f64) -> Self {
        LevyTriplet {
            drift: 0.0,
            diffusion: a,
            jumps: JumpMeasure::None,
        }
    }

    /// Symmetric alpha-stable process normalized so that q(xi) = |xi|^alpha.
    pub fn stable(alpha: f64) -> Result<Self> {
        let h = stable_normalizer(alpha)?;
        Ok(LevyTriplet {
            drift: 0.0,
            diffusion: 0.0,
            jumps: JumpMeasure::Stable { alpha, scale: h },
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.drift.is_finite() {
            return Err(LevyError::InvalidMeasure("drift must be finite".into()));
        }
        if !(self.diffusion >= 0.0) || !self.diffusion.is_finite() {
            return Err(LevyError::InvalidMeasure(
                "diffusion coefficient must be finite and >= 0".into(),
            ));
        }
        self.jumps.validate()?;
        let mass = self.jumps.one_wedge_square_mass();
        if !mass.is_finite() {
            return Err(LevyError::InvalidMeasure(
                "int (1 ∧ y^2) nu(dy) is not finite".into(),
            ));
        }
        Ok(())
    }

    /// A growth constant C with |q(xi)| <= C (1 + xi^2), assembled from
    /// |b| |xi| <= |b| (1+xi^2)/2, the diffusion term and the standard
    /// jump-part bounds.
    pub fn growth_constant(&self) -> f64 {
        let jump_part = match &self.jumps {
            JumpMeasure::None => 0.0,
            m => 0.5 * m.small_square_mass(1.0) + 2.0 * m.tail_mass(1.0),
        };
        0.5 * self.drift.abs() + 0.5 * self.diffusion + jump_part
    }

    pub fn is_symmetric(&self) -> bool {
        self.drift == 0.0 && self.jumps.is_symmetric()
    }
}

/// c_alpha = int (1 - cos y) / |y|^{1+alpha} dy = pi / (Gamma(1+alpha) sin(pi alpha / 2)).
pub fn stable_cos_integral(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::AlphaOutOfRange(alpha));
    }
    let s = (std::f64::consts::FRAC_PI_2 * alpha).sin();
    Ok(std::f64::consts::PI / (gamma(1.0 + alpha) * s))
}

/// The normalization h(alpha) with int (1 - cos y) h / |y|^{1+alpha} dy = 1,
/// so that the stable symbol is exactly |xi|^alpha.
pub fn stable_normalizer(alpha: f64) -> Result<f64> {
    Ok(1.0 / stable_cos_integral(alpha)?)
}

/// Standard normal distribution function.
fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(z / std::f64::consts::SQRT_2))
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// E[J 1_{a < J <= b}] for J ~ Normal(mean, std_dev).
fn normal_partial_mean(mean: f64, std_dev: f64, a: f64, b: f64) -> f64 {
    let al = (a - mean) / std_dev;
    let be = (b - mean) / std_dev;
    mean * (std_normal_cdf(be) - std_normal_cdf(al))
        + std_dev * (std_normal_pdf(al) - std_normal_pdf(be))
}

/// Jump term of the exponent in closed form:
/// -int (e^{i xi y} - 1 - i xi y 1_{[-1,1]}(y)) nu(dy).
fn jump_exponent(measure: &JumpMeasure, xi: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::ZERO;
    }
    match measure {
        JumpMeasure::None => Complex64::ZERO,
        JumpMeasure::Stable { alpha, scale } => {
            let c = stable_cos_integral(*alpha).expect("validated");
            Complex64::new(scale * c * xi.abs().powf(*alpha), 0.0)
        }
        JumpMeasure::TemperedStable {
            alpha,
            lambda,
            scale,
        } => {
            let re = if (alpha - 1.0).abs() > 0.05 {
                tempered_stable_exponent(*alpha, *lambda, *scale, xi)
            } else {
                tempered_quadrature_exponent(*alpha, *lambda, *scale, xi)
            };
            Complex64::new(re, 0.0)
        }
        JumpMeasure::CompoundPoisson { rate, jumps } => {
            // rate * (1 - E cos(xi J)) - i rate (E sin(xi J) - xi E[J 1_{|J|<=1}])
            let (e_cos, e_sin, pm) = match *jumps {
                JumpDist::Point { size } => {
                    let (s, c) = (xi * size).sin_cos();
                    let pm = if size.abs() <= 1.0 { size } else { 0.0 };
                    (c, s, pm)
                }
                JumpDist::Normal { mean, std_dev } => {
                    let damp = (-0.5 * xi * xi * std_dev * std_dev).exp();
                    let (s, c) = (xi * mean).sin_cos();
                    (damp * c, damp * s, normal_partial_mean(mean, std_dev, -1.0, 1.0))
                }
                JumpDist::Uniform { lo, hi } => {
                    let d = xi * (hi - lo);
                    let e_cos = ((xi * hi).sin() - (xi * lo).sin()) / d;
                    let e_sin = ((xi * lo).cos() - (xi * hi).cos()) / d;
                    let a = lo.max(-1.0);
                    let b = hi.min(1.0);
                    let pm = if b > a {
                        (b * b - a * a) / (2.0 * (hi - lo))
                    } else {
                        0.0
                    };
                    (e_cos, e_sin, pm)
                }
            };
            Complex64::new(rate * (1.0 - e_cos), -rate * (e_sin - xi * pm))
        }
        JumpMeasure::Table { atoms } => {
            let mut re = 0.0;
            let mut im = 0.0;
            for &(y, w) in atoms {
                let (s, c) = (xi * y).sin_cos();
                re += w * (1.0 - c);
                let comp = if y.abs() <= 1.0 { xi * y } else { 0.0 };
                im -= w * (s - comp);
            }
            Complex64::new(re, im)
        }
    }
}

/// q(xi) without re-validating the triplet; constructors and `validate`
/// guard the invariants, so evaluation loops can skip the checks.
pub fn eval_levy_khinchine_unchecked(triplet: &LevyTriplet, xi: f64) -> Complex64 {
    let local = Complex64::new(0.5 * triplet.diffusion * xi * xi, -triplet.drift * xi);
    local + jump_exponent(&triplet.jumps, xi)
}

/// Characteristic exponent q(xi) of the triplet, with c = 0.
///
/// Closed forms are used for every family except tempered stable near
/// alpha = 1, which falls back to panel quadrature.
pub fn eval_levy_khinchine(triplet: &LevyTriplet, xi: f64) -> Result<Complex64> {
    triplet.validate()?;
    Ok(eval_levy_khinchine_unchecked(triplet, xi))
}

/// Closed form of int (1 - cos(xi y)) h e^{-lambda|y|} |y|^{-1-alpha} dy for
/// alpha in (0,2) \ {1}, via Gamma(-alpha) [(lambda - i xi)^alpha + c.c. - 2 lambda^alpha].
fn tempered_stable_exponent(alpha: f64, lambda: f64, scale: f64, xi: f64) -> f64 {
    let g_neg = gamma(2.0 - alpha) / (alpha * (alpha - 1.0)); // Gamma(-alpha) = Gamma(2-a)/((-a)(1-a))
    let r = (lambda * lambda + xi * xi).powf(0.5 * alpha);
    let c = (alpha * (xi / lambda).atan()).cos();
    -2.0 * scale * g_neg * (r * c - lambda.powf(alpha))
}

/// Panel quadrature of the tempered stable cosine integral; the exponential
/// taper makes the range finite. Production fallback near alpha = 1.
fn tempered_quadrature_exponent(alpha: f64, lambda: f64, scale: f64, xi: f64) -> f64 {
    let xia = xi.abs();
    if xia == 0.0 {
        return 0.0;
    }
    let dens = |y: f64| scale * (-lambda * y).exp() * y.powf(-1.0 - alpha);
    let gl = gl24();
    let y_c = (1e-8 / xia).min(0.1);
    // series expansion of int_0^{y_c} y^2 e^{-lambda y} rho(y) dy
    let mut acc = 0.5
        * xi
        * xi
        * scale
        * (y_c.powf(2.0 - alpha) / (2.0 - alpha) - lambda * y_c.powf(3.0 - alpha) / (3.0 - alpha)
            + 0.5 * lambda * lambda * y_c.powf(4.0 - alpha) / (4.0 - alpha));
    let y_mid = (4.0 / xia).min(1.0).max(y_c);
    let two_sin_sq = |y: f64| {
        let s = (0.5 * xi * y).sin();
        2.0 * s * s * dens(y)
    };
    if y_mid > y_c {
        acc += gl.integrate_panels(&log_breaks(y_c, y_mid, 0.35), two_sin_sq);
    }
    let y_end = y_mid + 80.0 / lambda;
    acc += gl.integrate_panels(
        &linear_breaks(y_mid, y_end, std::f64::consts::PI / xia),
        two_sin_sq,
    );
    2.0 * acc
}

/// Independent quadrature oracle for the Levy-Khinchine jump integral.
///
/// Deliberately built from a different panel layout and rule order than the
/// production closed forms; used by tests to cross-check every tagged family.
pub fn levy_khinchine_quadrature_oracle(triplet: &LevyTriplet, xi: f64) -> Complex64 {
    let local = Complex64::new(0.5 * triplet.diffusion * xi * xi, -triplet.drift * xi);
    let m = &triplet.jumps;
    let re = match m {
        JumpMeasure::None => 0.0,
        JumpMeasure::Stable { alpha, scale } | JumpMeasure::TemperedStable { alpha, scale, .. } => {
            let lambda = match m {
                JumpMeasure::TemperedStable { lambda, .. } => *lambda,
                _ => 0.0,
            };
            let xia = xi.abs().max(1e-300);
            let dens = |y: f64| scale * (-lambda * y).exp() * y.powf(-1.0 - alpha);
            let gl = gl16();
            let two_sin_sq = |y: f64| {
                let s = (0.5 * xi * y).sin();
                2.0 * s * s * dens(y)
            };
            let y_c = 1e-10 / xia;
            let mut acc = 0.5 * xi * xi * scale * y_c.powf(2.0 - alpha) / (2.0 - alpha);
            // smooth region out to a few wavelengths
            let y_s = (8.0 / xia).max(2.0 * y_c);
            acc += gl.integrate_panels(&log_breaks(y_c, y_s, 0.25), two_sin_sq);
            // oscillatory region in doubling chunks; the remaining stable
            // tail is closed off by the analytic 1-part plus a two-term
            // integration-by-parts expansion of the cosine part, whose
            // remainder is bounded by 2 (1+a)(2+a) rho(y) / (y^2 xi^3)
            let width = std::f64::consts::PI / (2.0 * xia);
            let mut a = y_s;
            loop {
                let b = 2.0 * a;
                acc += gl.integrate_panels(&linear_breaks(a, b, width), two_sin_sq);
                a = b;
                if lambda > 0.0 {
                    if lambda * a > 100.0 {
                        break;
                    }
                } else {
                    let rem =
                        2.0 * (1.0 + alpha) * (2.0 + alpha) * dens(a) / (a * a * xia * xia * xia);
                    if rem < 1e-11 * (1.0 + acc.abs()) {
                        acc += scale * a.powf(-alpha) / alpha;
                        // - int_a^inf cos(xi y) rho(y) dy to two terms
                        acc += (xia * a).sin() * dens(a) / xia
                            - (xia * a).cos() * (1.0 + alpha) * dens(a) / (a * xia * xia);
                        break;
                    }
                }
            }
            2.0 * acc
        }
        JumpMeasure::CompoundPoisson { rate, jumps } => match jumps {
            JumpDist::Point { size } => rate * (1.0 - (xi * size).cos()),
            _ => {
                let (lo, hi) = jumps.effective_support();
                let w = (std::f64::consts::PI / xi.abs().max(1e-9)).min(0.05);
                rate * gl16().integrate_panels(&linear_breaks(lo, hi, w), |y| {
                    (1.0 - (xi * y).cos()) * jumps.density(y)
                })
            }
        },
        JumpMeasure::Table { atoms } => atoms
            .iter()
            .map(|&(y, w)| w * (1.0 - (xi * y).cos()))
            .sum(),
    };
    // q carries minus the integral, so the sin part enters negated
    let im = -jump_sin_quadrature_oracle(m, xi);
    local + Complex64::new(re, im)
}

/// Quadrature of int (sin(xi y) - xi y 1_{[-1,1]}(y)) nu(dy); zero for
/// symmetric measures. Oracle companion of the closed-form imaginary parts.
fn jump_sin_quadrature_oracle(measure: &JumpMeasure, xi: f64) -> f64 {
    if xi == 0.0 || measure.is_symmetric() {
        return 0.0;
    }
    match measure {
        JumpMeasure::None | JumpMeasure::Stable { .. } | JumpMeasure::TemperedStable { .. } => 0.0,
        JumpMeasure::CompoundPoisson { rate, jumps } => match jumps {
            JumpDist::Point { size } => {
                let comp = if size.abs() <= 1.0 { xi * size } else { 0.0 };
                rate * ((xi * size).sin() - comp)
            }
            _ => {
                let (lo, hi) = jumps.effective_support();
                let w = (std::f64::consts::PI / xi.abs()).min((hi - lo).max(1e-6) / 8.0);
                let mut breaks = linear_breaks(lo, hi, w);
                for c in [-1.0, 1.0] {
                    if c > lo && c < hi {
                        breaks.push(c);
                    }
                }
                breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
                rate * gl16().integrate_panels(&breaks, |y| {
                    let comp = if y.abs() <= 1.0 { xi * y } else { 0.0 };
                    ((xi * y).sin() - comp) * jumps.density(y)
                })
            }
        },
        JumpMeasure::Table { atoms } => atoms
            .iter()
            .map(|&(y, w)| {
                let comp = if y.abs() <= 1.0 { xi * y } else { 0.0 };
                w * ((xi * y).sin() - comp)
            })
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_case() {
        let t = LevyTriplet::brownian(1.0);
        let q = eval_levy_khinchine(&t, 2.0).unwrap();
        assert!((q.re - 2.0).abs() < 1e-14);
        assert!(q.im.abs() < 1e-14);
    }

    #[test]
    fn pure_drift_case() {
        let t = LevyTriplet::new(1.0, 0.0, JumpMeasure::None).unwrap();
        let q = eval_levy_khinchine(&t, 3.0).unwrap();
        assert!(q.re.abs() < 1e-14);
        assert!((q.im + 3.0).abs() < 1e-14);
    }

    #[test]
    fn normalized_stable_symbol_is_power_law() {
        let t = LevyTriplet::stable(1.5).unwrap();
        let q = eval_levy_khinchine(&t, 2.0).unwrap();
        let expect = 2.0f64.powf(1.5); // 2.8284...
        assert!((q.re - expect).abs() < 1e-12, "got {}", q.re);
        assert!(q.im == 0.0);
    }

    #[test]
    fn stable_closed_form_matches_quadrature_oracle() {
        for &alpha in &[0.5, 1.0, 1.5, 1.9] {
            let t = LevyTriplet::stable(alpha).unwrap();
            for &xi in &[0.1, 1.0, 2.0, 10.0, 50.0] {
                let q = eval_levy_khinchine(&t, xi).unwrap();
                let o = levy_khinchine_quadrature_oracle(&t, xi);
                let tol = 1e-6 * (1.0 + q.norm());
                assert!(
                    (q - o).norm() < tol,
                    "alpha={alpha} xi={xi}: closed {q} oracle {o}"
                );
            }
        }
    }

    #[test]
    fn normalizer_cauchy_value() {
        let h = stable_normalizer(1.0).unwrap();
        assert!((h - 1.0 / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn normalizer_near_two_is_finite_positive() {
        let h = stable_normalizer(1.99).unwrap();
        assert!(h.is_finite() && h > 0.0);
    }

    #[test]
    fn normalizer_self_consistency_alpha_half() {
        // Plug h back into the defining integral and quadrature it.
        let h = stable_normalizer(0.5).unwrap();
        let t = LevyTriplet::new(0.0, 0.0, JumpMeasure::Stable { alpha: 0.5, scale: h }).unwrap();
        let q = levy_khinchine_quadrature_oracle(&t, 1.0);
        assert!((q.re - 1.0).abs() < 1e-10, "defining integral = {}", q.re);
    }

    #[test]
    fn normalizer_self_consistency_random_alphas() {
        use rand::Rng;
        let mut rng = crate::sim::seeded_rng(7, 0);
        for _ in 0..20 {
            let alpha: f64 = 0.1 + 1.8 * rng.random::<f64>();
            let h = stable_normalizer(alpha).unwrap();
            let t =
                LevyTriplet::new(0.0, 0.0, JumpMeasure::Stable { alpha, scale: h }).unwrap();
            let q = levy_khinchine_quadrature_oracle(&t, 1.0);
            assert!(
                (q.re - 1.0).abs() < 1e-8,
                "alpha={alpha}: defining integral = {}",
                q.re
            );
        }
    }

    #[test]
    fn normalizer_rejects_out_of_range() {
        assert!(stable_normalizer(0.0).is_err());
        assert!(stable_normalizer(2.0).is_err());
        assert!(stable_normalizer(-1.0).is_err());
    }

    #[test]
    fn families_agree_with_oracle_on_grid() {
        let families = vec![
            LevyTriplet::new(0.3, 0.5, JumpMeasure::Stable { alpha: 1.2, scale: 0.4 }).unwrap(),
            LevyTriplet::new(
                0.0,
                0.0,
                JumpMeasure::TemperedStable {
                    alpha: 1.5,
                    lambda: 2.0,
                    scale: 0.7,
                },
            )
            .unwrap(),
            LevyTriplet::new(
                0.0,
                0.0,
                JumpMeasure::CompoundPoisson {
                    rate: 2.0,
                    jumps: JumpDist::Point { size: 1.0 },
                },
            )
            .unwrap(),
            LevyTriplet::new(
                -0.2,
                1.0,
                JumpMeasure::CompoundPoisson {
                    rate: 1.5,
                    jumps: JumpDist::Normal {
                        mean: 0.3,
                        std_dev: 0.8,
                    },
                },
            )
            .unwrap(),
            LevyTriplet::new(
                0.0,
                0.0,
                JumpMeasure::Table {
                    atoms: vec![(0.5, 1.0), (-2.0, 0.3)],
                },
            )
            .unwrap(),
        ];
        for t in &families {
            for k in 0..=20 {
                let xi = -50.0 + 5.0 * k as f64;
                let q = eval_levy_khinchine(t, xi).unwrap();
                let o = levy_khinchine_quadrature_oracle(t, xi);
                let tol = 1e-6 * (1.0 + q.norm());
                assert!(
                    (q - o).norm() < tol,
                    "triplet {t:?} xi={xi}: {q} vs {o}"
                );
            }
        }
    }

    #[test]
    fn tempered_stable_closed_form_vs_quadrature() {
        for &alpha in &[0.5, 1.3, 1.7] {
            for &xi in &[0.5, 3.0, 20.0] {
                let cf = tempered_stable_exponent(alpha, 1.5, 0.6, xi);
                let quad = tempered_quadrature_exponent(alpha, 1.5, 0.6, xi);
                assert!(
                    (cf - quad).abs() < 1e-8 * (1.0 + cf.abs()),
                    "alpha={alpha} xi={xi}: closed {cf} quad {quad}"
                );
            }
        }
    }

    #[test]
    fn growth_constant_bounds_symbol_on_grid() {
        let t = LevyTriplet::new(0.5, 0.7, JumpMeasure::Stable { alpha: 1.5, scale: 0.3 })
            .unwrap();
        let c = t.growth_constant();
        for k in 0..=100 {
            let xi = -50.0 + k as f64;
            let q = eval_levy_khinchine(&t, xi).unwrap();
            assert!(q.norm() <= c * (1.0 + xi * xi) * (1.0 + 1e-12));
            assert!(q.re >= -1e-12);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(LevyTriplet::new(0.0, -1.0, JumpMeasure::None).is_err());
        assert!(LevyTriplet::new(0.0, 0.0, JumpMeasure::Stable { alpha: 2.5, scale: 1.0 }).is_err());
        assert!(LevyTriplet::new(0.0, 0.0, JumpMeasure::Stable { alpha: 1.0, scale: -1.0 }).is_err());
        assert!(LevyTriplet::new(
            0.0,
            0.0,
            JumpMeasure::Table {
                atoms: vec![(0.0, 1.0)]
            }
        )
        .is_err());
    }

    #[test]
    fn integrability_certificate_stable() {
        // 2h (1/(2-a) + 1/a) against direct quadrature of (1 ∧ y^2) nu(dy)
        let m = JumpMeasure::Stable { alpha: 1.3, scale: 0.5 };
        let gl = gl24();
        let inner = gl.integrate_panels(&log_breaks(1e-14, 1.0, 0.4), |y| {
            y * y * 0.5 * y.powf(-2.3)
        });
        let outer = gl.integrate_panels(&log_breaks(1.0, 1e12, 0.4), |y| 0.5 * y.powf(-2.3));
        let direct = 2.0 * (inner + outer);
        assert!((m.one_wedge_square_mass() - direct).abs() < 1e-6);
    }
}
