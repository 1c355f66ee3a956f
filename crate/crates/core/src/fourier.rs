//! Frequency-domain application of generators.
//!
//! Af(x) = - int e^{i x xi} q(x, xi) fhat(xi) dxi, evaluated on an adaptive
//! Gauss-Legendre grid in xi. The grid is refined geometrically near 0
//! (symbols may have a kink there) and extended outward until the weighted
//! tail int (1 + xi^2) |fhat| falls below tolerance, exploiting the
//! super-polynomial decay of bump transforms.

use crate::error::{LevyError, Result};
use crate::quad::gl24;
use crate::symbol::{SymbolFn, SymbolKind, SymbolRow};
use crate::testfn::TestFn;
use num_complex::Complex64;

/// Uniform panel width of the outer grid; with 24-point panels this keeps
/// the oscillation e^{i x xi} hyper-convergent for |x| up to 16.
const PANEL_WIDTH: f64 = 1.5;
/// Stop once a panel's contribution to int (1+xi^2)|fhat| is below this for
/// three consecutive panels.
const TAIL_TOL: f64 = 1e-12;
const XI_MAX: f64 = 20_000.0;

/// Transform table of one test function on the adaptive xi-grid.
#[derive(Debug)]
pub struct FourierCtx {
    /// ascending, symmetric about 0
    nodes: Vec<f64>,
    weights: Vec<f64>,
    fhat: Vec<Complex64>,
    /// int (1 + xi^2) |fhat(xi)| dxi over the grid
    poly_weight: f64,
    /// sum of the last panels' tail metric, an upper proxy for truncation
    tail_bound: f64,
}

impl FourierCtx {
    pub fn build(f: &TestFn) -> Result<Self> {
        let gl = gl24();
        let mut pos_nodes: Vec<f64> = Vec::new();
        let mut pos_weights: Vec<f64> = Vec::new();

        // graded panels near zero, then uniform
        let mut edges: Vec<f64> = vec![0.0];
        let mut e = PANEL_WIDTH * 2f64.powi(-16);
        while e < PANEL_WIDTH {
            edges.push(e);
            e *= 2.0;
        }
        edges.push(PANEL_WIDTH);
        let push_panel = |a: f64, b: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                nodes.push(mid + half * t);
                weights.push(w * half);
            }
        };
        for w in edges.windows(2) {
            push_panel(w[0], w[1], &mut pos_nodes, &mut pos_weights);
        }

        // fill transforms for the graded region
        let mut pos_fhat: Vec<Complex64> = pos_nodes.iter().map(|&xi| f.transform(xi)).collect();

        let mut hi = PANEL_WIDTH;
        let mut quiet_panels = 0;
        while quiet_panels < 3 {
            if hi >= XI_MAX {
                return Err(LevyError::Truncation(format!(
                    "tail of (1+xi^2)|fhat| not below {TAIL_TOL} by xi = {XI_MAX} for '{}'",
                    f.label
                )));
            }
            let a = hi;
            let b = hi + PANEL_WIDTH;
            let start = pos_nodes.len();
            push_panel(a, b, &mut pos_nodes, &mut pos_weights);
            let mut panel_metric = 0.0;
            for i in start..pos_nodes.len() {
                let xi = pos_nodes[i];
                let t = f.transform(xi);
                pos_fhat.push(t);
                panel_metric += pos_weights[i] * (1.0 + xi * xi) * t.norm();
            }
            if panel_metric < TAIL_TOL {
                quiet_panels += 1;
            } else {
                quiet_panels = 0;
            }
            hi = b;
        }

        // mirror: fhat(-xi) = conj(fhat(xi)) for real f
        let n = pos_nodes.len();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut weights = Vec::with_capacity(2 * n);
        let mut fhat = Vec::with_capacity(2 * n);
        for i in (0..n).rev() {
            nodes.push(-pos_nodes[i]);
            weights.push(pos_weights[i]);
            fhat.push(pos_fhat[i].conj());
        }
        nodes.extend_from_slice(&pos_nodes);
        weights.extend_from_slice(&pos_weights);
        fhat.extend_from_slice(&pos_fhat);

        let poly_weight = nodes
            .iter()
            .zip(&weights)
            .zip(&fhat)
            .map(|((&xi, &w), t)| w * (1.0 + xi * xi) * t.norm())
            .sum();
        Ok(FourierCtx {
            nodes,
            weights,
            fhat,
            poly_weight,
            tail_bound: 3.0 * TAIL_TOL,
        })
    }

    pub fn xi_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// int (1 + xi^2) |fhat| dxi, the weight in the uniform operator bounds.
    pub fn poly_weight(&self) -> f64 {
        self.poly_weight
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// int |fhat|^2 dxi on the grid.
    pub fn transform_l2(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.fhat)
            .map(|((_, &w), t)| w * t.norm_sqr())
            .sum()
    }

    /// int w(xi) |fhat| dxi for a custom weight, e.g. the (B2) bound factor.
    pub fn weighted_abs_integral<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.fhat)
            .map(|((&xi, &wt), t)| wt * w(xi) * t.norm())
            .sum()
    }

    /// -int e^{i x xi} q(x, xi) fhat(xi) dxi for a prepared symbol row.
    pub fn apply_row(&self, row: &SymbolRow<'_>, x: f64) -> (f64, f64) {
        let mut acc = Complex64::ZERO;
        for ((&xi, &w), t) in self.nodes.iter().zip(&self.weights).zip(&self.fhat) {
            let phase = Complex64::from_polar(1.0, x * xi);
            acc += phase * row.eval(xi) * *t * w;
        }
        (-acc.re, -acc.im)
    }

    /// Af on an ascending uniform grid of x-values, exploiting symbol
    /// structure: x-independent rows collapse to one weighted sum swept by a
    /// phase rotation across the grid.
    pub fn apply_batch(&self, sym: &SymbolFn, xs: &[f64]) -> Vec<f64> {
        let mut out = vec![Complex64::ZERO; xs.len()];
        if xs.is_empty() {
            return Vec::new();
        }
        let uniform = xs.len() >= 2 && {
            let dx = xs[1] - xs[0];
            xs.windows(2)
                .all(|w| ((w[1] - w[0]) - dx).abs() < 1e-12 * dx.abs().max(1.0))
        };
        if !uniform || xs.len() < 8 {
            for (j, &x) in xs.iter().enumerate() {
                let row = sym.row(x);
                let mut acc = Complex64::ZERO;
                for ((&xi, &w), t) in self.nodes.iter().zip(&self.weights).zip(&self.fhat) {
                    acc += Complex64::from_polar(1.0, x * xi) * row.eval(xi) * *t * w;
                }
                out[j] = acc;
            }
            return out.iter().map(|c| -c.re).collect();
        }
        self.apply_batch_uniform(sym, xs, &mut out);
        out.iter().map(|c| -c.re).collect()
    }

    fn apply_batch_uniform(&self, sym: &SymbolFn, xs: &[f64], out: &mut [Complex64]) {
        match &sym.kind {
            SymbolKind::Glued { left, right } => {
                let split = xs.partition_point(|&x| x <= 0.0);
                let left_sym = SymbolFn::from_triplet(left.clone()).expect("validated");
                let right_sym = SymbolFn::from_triplet(right.clone()).expect("validated");
                self.apply_batch_uniform(&left_sym, &xs[..split], &mut out[..split]);
                self.apply_batch_uniform(&right_sym, &xs[split..], &mut out[split..]);
            }
            SymbolKind::GluedApprox { left, right, n } => {
                let lo = xs.partition_point(|&x| x <= 0.0);
                let hi = xs.partition_point(|&x| x < 1.0 / *n as f64);
                let left_sym = SymbolFn::from_triplet(left.clone()).expect("validated");
                let right_sym = SymbolFn::from_triplet(right.clone()).expect("validated");
                self.apply_batch_uniform(&left_sym, &xs[..lo], &mut out[..lo]);
                // mixing zone: plain row evaluation
                for (j, &x) in xs[lo..hi].iter().enumerate() {
                    let row = sym.row(x);
                    let mut acc = Complex64::ZERO;
                    for ((&xi, &w), t) in self.nodes.iter().zip(&self.weights).zip(&self.fhat) {
                        acc += Complex64::from_polar(1.0, x * xi) * row.eval(xi) * *t * w;
                    }
                    out[lo + j] = acc;
                }
                self.apply_batch_uniform(&right_sym, &xs[hi..], &mut out[hi..]);
            }
            SymbolKind::StableLike(alpha) => {
                // group maximal runs of equal alpha(x); constant branches
                // make these long and the per-run setup cheap
                let mut j0 = 0;
                while j0 < xs.len() {
                    let a0 = alpha.eval(xs[j0]);
                    let mut j1 = j0 + 1;
                    while j1 < xs.len() && alpha.eval(xs[j1]) == a0 {
                        j1 += 1;
                    }
                    let zk: Vec<Complex64> = self
                        .nodes
                        .iter()
                        .zip(&self.weights)
                        .zip(&self.fhat)
                        .map(|((&xi, &w), t)| *t * (w * xi.abs().powf(a0)))
                        .collect();
                    self.rotate_sum(&zk, &xs[j0..j1], &mut out[j0..j1]);
                    j0 = j1;
                }
            }
            _ if sym.x_independent => {
                let row = sym.row(0.0);
                let zk: Vec<Complex64> = self
                    .nodes
                    .iter()
                    .zip(&self.weights)
                    .zip(&self.fhat)
                    .map(|((&xi, &w), t)| row.eval(xi) * *t * w)
                    .collect();
                self.rotate_sum(&zk, xs, out);
            }
            _ => {
                for (j, &x) in xs.iter().enumerate() {
                    let row = sym.row(x);
                    let mut acc = Complex64::ZERO;
                    for ((&xi, &w), t) in self.nodes.iter().zip(&self.weights).zip(&self.fhat) {
                        acc += Complex64::from_polar(1.0, x * xi) * row.eval(xi) * *t * w;
                    }
                    out[j] = acc;
                }
            }
        }
    }

    /// out[j] += sum_k z_k e^{i x_j xi_k} for uniform x_j, one phase rotation
    /// per node.
    fn rotate_sum(&self, zk: &[Complex64], xs: &[f64], out: &mut [Complex64]) {
        if xs.is_empty() {
            return;
        }
        let x0 = xs[0];
        let dx = if xs.len() > 1 { xs[1] - xs[0] } else { 0.0 };
        for (k, &xi) in self.nodes.iter().enumerate() {
            let rot = Complex64::from_polar(1.0, dx * xi);
            let mut cur = Complex64::from_polar(1.0, x0 * xi) * zk[k];
            for o in out.iter_mut() {
                *o += cur;
                cur *= rot;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyTriplet;

    #[test]
    fn brownian_symbol_reproduces_second_derivative() {
        // q = xi^2 / 2 acts as f -> f''/2
        let f = TestFn::bump("b", 0.0, 1.0, 1.0).unwrap();
        let ctx = f.fourier_ctx();
        let sym = SymbolFn::from_triplet(LevyTriplet::brownian(1.0)).unwrap();
        for &x in &[0.0, 0.3, -0.7] {
            let (v, resid) = ctx.apply_row(&sym.row(x), x);
            assert!(
                (v - 0.5 * f.d2(x)).abs() < 1e-9,
                "x = {x}: {v} vs {}",
                0.5 * f.d2(x)
            );
            assert!(resid.abs() < 1e-9);
        }
    }

    #[test]
    fn drift_symbol_reproduces_first_derivative() {
        let f = TestFn::bump("b", 0.2, 1.4, 0.9).unwrap();
        let ctx = f.fourier_ctx();
        let t = LevyTriplet::new(2.0, 0.0, crate::levy::JumpMeasure::None).unwrap();
        let sym = SymbolFn::from_triplet(t).unwrap();
        let (v, _) = ctx.apply_row(&sym.row(0.5), 0.5);
        assert!((v - 2.0 * f.d1(0.5)).abs() < 1e-9);
    }

    #[test]
    fn batch_matches_pointwise() {
        let f = TestFn::bump("b", 0.0, 1.5, 1.0).unwrap();
        let ctx = f.fourier_ctx();
        let sym = SymbolFn::glued_approx(
            LevyTriplet::stable(1.2).unwrap(),
            LevyTriplet::stable(1.8).unwrap(),
            5,
        )
        .unwrap();
        let xs: Vec<f64> = (0..64).map(|i| -2.0 + i as f64 * 0.0625).collect();
        let batch = ctx.apply_batch(&sym, &xs);
        for (j, &x) in xs.iter().enumerate() {
            let (v, _) = ctx.apply_row(&sym.row(x), x);
            assert!(
                (batch[j] - v).abs() < 1e-9 * (1.0 + v.abs()),
                "x = {x}: batch {} vs pointwise {v}",
                batch[j]
            );
        }
    }
}
