//! Compactly supported smooth test functions.
//!
//! The library is a fixed family of scaled and shifted copies of the bump
//! g(u) = exp(-1/(1-u^2)) on (-1, 1), with analytic first and second
//! derivatives. Transforms follow the convention
//! fhat(xi) = (2 pi)^{-1} int e^{-i x xi} f(x) dx, under which the scaled
//! bump satisfies fhat(xi) = s r e^{-i c xi} ghat(r xi) with ghat real and
//! even; ghat is evaluated by panel quadrature with the panel count tied to
//! the oscillation count.

use crate::error::{LevyError, Result};
use crate::quad::{gl16, gl24, linear_breaks};
use num_complex::Complex64;
use std::sync::{Arc, OnceLock};

/// One scaled bump s * g((x - c)/r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
    pub amplitude: f64,
}

fn g(u: f64) -> f64 {
    if u * u < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

fn g1(u: f64) -> f64 {
    if u * u < 1.0 {
        let d = 1.0 - u * u;
        -2.0 * u / (d * d) * g(u)
    } else {
        0.0
    }
}

fn g2(u: f64) -> f64 {
    if u * u < 1.0 {
        let d = 1.0 - u * u;
        let d2 = d * d;
        ((-2.0 / d2) - 8.0 * u * u / (d2 * d) + 4.0 * u * u / (d2 * d2)) * g(u)
    } else {
        0.0
    }
}

/// ghat(w) = (1/pi) int_0^1 cos(u w) g(u) du; real and even in w.
///
/// For large w the direct quadrature stalls at the f64 cancellation floor
/// (~1e-16 absolute) long before the true super-polynomially small value.
/// All derivatives of g vanish at the endpoints, so two integrations by
/// parts give ghat(w) = -(pi w^2)^{-1} int cos(u w) g''(u) du, pushing the
/// noise floor down by w^2 and keeping weighted tails resolvable.
pub fn bump_transform(w: f64) -> f64 {
    let w = w.abs();
    let n_panels = ((w / 2.0).ceil() as usize).max(8);
    let gl = gl16();
    let h = 1.0 / n_panels as f64;
    let mut acc = 0.0;
    if w < 30.0 {
        for i in 0..n_panels {
            acc += gl.integrate(i as f64 * h, (i + 1) as f64 * h, |u| (u * w).cos() * g(u));
        }
    } else {
        for i in 0..n_panels {
            acc += gl.integrate(i as f64 * h, (i + 1) as f64 * h, |u| (u * w).cos() * g2(u));
        }
        acc = -acc / (w * w);
    }
    acc / std::f64::consts::PI
}

impl Bump {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * g((x - self.center) / self.radius)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.amplitude / self.radius * g1((x - self.center) / self.radius)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.amplitude / (self.radius * self.radius) * g2((x - self.center) / self.radius)
    }

    pub fn transform(&self, xi: f64) -> Complex64 {
        let magnitude = self.amplitude * self.radius * bump_transform(self.radius * xi);
        Complex64::from_polar(1.0, -self.center * xi) * magnitude
    }
}

/// A test function: a finite sum of bumps with analytic derivatives, a known
/// compact support and an on-demand transform table (see `fourier`).
#[derive(Debug, Clone)]
pub struct TestFn {
    pub label: String,
    parts: Vec<Bump>,
    support: (f64, f64),
    pub(crate) ctx: OnceLock<Arc<crate::fourier::FourierCtx>>,
}

impl TestFn {
    pub fn bump(label: &str, center: f64, radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0) || !amplitude.is_finite() || !center.is_finite() {
            return Err(LevyError::InvalidTestFn(
                "bump needs radius > 0 and finite center/amplitude".into(),
            ));
        }
        Ok(TestFn {
            label: label.to_string(),
            parts: vec![Bump {
                center,
                radius,
                amplitude,
            }],
            support: (center - radius, center + radius),
        ctx: OnceLock::new(),
        })
    }

    /// Pointwise sum; used for linearity checks.
    pub fn sum(label: &str, a: &TestFn, b: &TestFn) -> Self {
        let mut parts = a.parts.clone();
        parts.extend_from_slice(&b.parts);
        let support = (
            a.support.0.min(b.support.0),
            a.support.1.max(b.support.1),
        );
        TestFn {
            label: label.to_string(),
            parts,
            support,
            ctx: OnceLock::new(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.parts.iter().map(|p| p.eval(x)).sum()
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.parts.iter().map(|p| p.d1(x)).sum()
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.parts.iter().map(|p| p.d2(x)).sum()
    }

    pub fn transform(&self, xi: f64) -> Complex64 {
        self.parts.iter().map(|p| p.transform(xi)).sum()
    }

    /// Closed support interval [l, r].
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// The five canonical bumps used across tests and experiments.
    pub fn canonical_library() -> Vec<TestFn> {
        vec![
            TestFn::bump("bump0", 0.0, 1.0, 1.0).unwrap(),
            TestFn::bump("bump_wide", 0.0, 2.5, 1.0).unwrap(),
            TestFn::bump("bump_right", 1.0, 1.5, 0.8).unwrap(),
            TestFn::bump("bump_left", -1.5, 0.8, 1.2).unwrap(),
            TestFn::bump("bump_shift", 0.5, 2.0, 0.6).unwrap(),
        ]
    }

    /// Plancherel check: int f^2 dx = 2 pi int |fhat|^2 dxi under our
    /// transform convention. Returns the relative mismatch.
    pub fn parseval_mismatch(&self) -> f64 {
        let (l, r) = self.support;
        let lhs = gl24().integrate_panels(&linear_breaks(l, r, (r - l) / 64.0), |x| {
            let v = self.eval(x);
            v * v
        });
        let ctx = self.fourier_ctx();
        let rhs = 2.0 * std::f64::consts::PI * ctx.transform_l2();
        (lhs - rhs).abs() / lhs.max(1e-300)
    }

    pub fn fourier_ctx(&self) -> Arc<crate::fourier::FourierCtx> {
        self.ctx
            .get_or_init(|| {
                Arc::new(
                    crate::fourier::FourierCtx::build(self)
                        .expect("transform table construction failed"),
                )
            })
            .clone()
    }
}
