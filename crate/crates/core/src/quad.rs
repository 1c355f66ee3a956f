//! Gauss-Legendre panel quadrature.
//!
//! All singular and oscillatory integrals in this crate are reduced to
//! smooth integrands on explicit panels; this module supplies the panel
//! rule and a few panel-layout helpers.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over [a, b] with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Complex-valued single panel.
    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::ZERO;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Integrates over consecutive panels given by `breaks`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        let mut acc = 0.0;
        for w in breaks.windows(2) {
            acc += self.integrate(w[0], w[1], &mut f);
        }
        acc
    }

    pub fn integrate_panels_c<F: FnMut(f64) -> Complex64>(
        &self,
        breaks: &[f64],
        mut f: F,
    ) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for w in breaks.windows(2) {
            acc += self.integrate_c(w[0], w[1], &mut f);
        }
        acc
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static GL16: OnceLock<GaussLegendre> = OnceLock::new();
static GL24: OnceLock<GaussLegendre> = OnceLock::new();
static GL32: OnceLock<GaussLegendre> = OnceLock::new();

pub fn gl16() -> &'static GaussLegendre {
    GL16.get_or_init(|| GaussLegendre::new(16))
}

pub fn gl24() -> &'static GaussLegendre {
    GL24.get_or_init(|| GaussLegendre::new(24))
}

pub fn gl32() -> &'static GaussLegendre {
    GL32.get_or_init(|| GaussLegendre::new(32))
}

/// Panel boundaries from `a` to `b`, uniform, at most `max_width` wide.
pub fn linear_breaks(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    assert!(b >= a && max_width > 0.0);
    let n = (((b - a) / max_width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut v: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    v[n] = b;
    v
}

/// Panel boundaries geometrically spaced in [a, b] with 0 < a < b, at most
/// `max_log_width` wide in log coordinates.
pub fn log_breaks(a: f64, b: f64, max_log_width: f64) -> Vec<f64> {
    assert!(a > 0.0 && b >= a && max_log_width > 0.0);
    let la = a.ln();
    let lb = b.ln();
    let n = (((lb - la) / max_log_width).ceil() as usize).max(1);
    let h = (lb - la) / n as f64;
    let mut v: Vec<f64> = (0..=n).map(|i| (la + h * i as f64).exp()).collect();
    v[0] = a;
    v[n] = b;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let gl = GaussLegendre::new(24);
        // degree 2n-1 polynomial
        let v = gl.integrate(-1.0, 1.0, |x| x.powi(46) + 3.0 * x.powi(7));
        let exact = 2.0 / 47.0;
        assert!((v - exact).abs() < 1e-14, "got {v}, want {exact}");
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [16, 24, 32] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn panel_integration_of_oscillatory_function() {
        let gl = gl24();
        let breaks = linear_breaks(0.0, 10.0, 1.0);
        let v = gl.integrate_panels(&breaks, |x| (5.0 * x).cos());
        let exact = (50.0f64).sin() / 5.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn log_breaks_cover_range() {
        let b = log_breaks(1e-8, 1.0, 0.5);
        assert_eq!(b[0], 1e-8);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
    }
}
