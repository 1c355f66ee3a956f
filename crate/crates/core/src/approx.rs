//! Approximating sequences for operators with discontinuous coefficients:
//! mollified stability indices alpha_n, shrinking exceptional open sets U_m,
//! and the glue weights used near a threshold.

use crate::error::{LevyError, Result};
use crate::levy::LevyTriplet;
use crate::quad::{gl24, linear_breaks};
use crate::stability::StabilityIndexFn;
use crate::symbol::SymbolFn;
use std::sync::Arc;
use std::sync::OnceLock;

/// g1^n: 1 on (-inf, 0], linear down to 0 on (0, 1/n), 0 on [1/n, inf).
pub fn glue_weight_left(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    if x <= 0.0 {
        1.0
    } else if nf * x >= 1.0 {
        0.0
    } else {
        1.0 - nf * x
    }
}

/// The pair (g1^n, g2^n) with g2 = 1 - g1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlueWeights {
    pub n: u32,
}

impl GlueWeights {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(LevyError::InvalidInput("glue index n must be >= 1".into()));
        }
        Ok(GlueWeights { n })
    }

    pub fn left(&self, x: f64) -> f64 {
        glue_weight_left(self.n, x)
    }

    pub fn right(&self, x: f64) -> f64 {
        1.0 - self.left(x)
    }
}

/// q^n(x, xi) = q1(g1^n(x) xi) + q2(g2^n(x) xi).
pub fn glued_approx_symbol(left: LevyTriplet, right: LevyTriplet, n: u32) -> Result<SymbolFn> {
    SymbolFn::glued_approx(left, right, n)
}

// --- mollifier -------------------------------------------------------------

fn bump_raw(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// 1 / int_{-1}^{1} exp(-1/(1-u^2)) du, computed once by quadrature.
fn bump_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| {
        let gl = gl24();
        let mass = 2.0 * gl.integrate_panels(&linear_breaks(0.0, 1.0, 0.05), bump_raw);
        1.0 / mass
    })
}

/// The standard normalized bump scaled to support [-1/k, 1/k].
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    pub k: u32,
}

impl Mollifier {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(LevyError::InvalidInput("mollifier order must be >= 1".into()));
        }
        Ok(Mollifier { k })
    }

    /// The base bump phi with supp phi in [-1, 1], phi >= 0, unit mass.
    pub fn base(u: f64) -> f64 {
        bump_norm() * bump_raw(u)
    }

    /// phi_k(x) = k phi(k x).
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.k as f64;
        k * Self::base(k * x)
    }

    pub fn support(&self) -> (f64, f64) {
        let w = 1.0 / self.k as f64;
        (-w, w)
    }
}

// --- exceptional sets ------------------------------------------------------

/// Shrinking open neighborhoods U_m of the discontinuity set, one row per m.
#[derive(Debug, Clone)]
pub struct ExceptionalSets {
    /// intervals[m-1] lists the disjoint open intervals of U_m.
    intervals: Vec<Vec<(f64, f64)>>,
    measures: Vec<f64>,
}

impl ExceptionalSets {
    /// Derived-set construction specialized to a finite breakpoint list: all
    /// points are isolated, the hierarchy stops at level one, and the radii
    /// are r_j^m = (1 ∧ gap_j) / (m 2^{j+2}) with j enumerating the points
    /// left to right starting at 1.
    pub fn from_breakpoints(breakpoints: &[f64], m_max: u32) -> Result<Self> {
        for w in breakpoints.windows(2) {
            if !(w[1] > w[0]) {
                return Err(LevyError::InvalidInput(
                    "breakpoints must be strictly increasing (duplicates not allowed)".into(),
                ));
            }
        }
        let base: Vec<(f64, f64)> = breakpoints
            .iter()
            .enumerate()
            .map(|(idx, &d)| {
                let j = idx as i32 + 1;
                let gap = breakpoints
                    .iter()
                    .filter(|&&o| o != d)
                    .map(|&o| (o - d).abs())
                    .fold(f64::INFINITY, f64::min);
                let r1 = gap.min(1.0) / 2f64.powi(j + 2);
                (d, r1)
            })
            .collect();
        let mut intervals = Vec::with_capacity(m_max as usize);
        let mut measures = Vec::with_capacity(m_max as usize);
        for m in 1..=m_max {
            let row: Vec<(f64, f64)> = base
                .iter()
                .map(|&(d, r1)| {
                    let r = r1 / m as f64;
                    (d - r, d + r)
                })
                .collect();
            let lambda = row.iter().map(|(l, r)| r - l).sum();
            intervals.push(row);
            measures.push(lambda);
        }
        Ok(ExceptionalSets {
            intervals,
            measures,
        })
    }

    /// The single-threshold choice U_m = (-1/m, 1/m).
    pub fn threshold(m_max: u32) -> Self {
        let mut intervals = Vec::new();
        let mut measures = Vec::new();
        for m in 1..=m_max {
            let r = 1.0 / m as f64;
            intervals.push(vec![(-r, r)]);
            measures.push(2.0 * r);
        }
        ExceptionalSets {
            intervals,
            measures,
        }
    }

    pub fn m_max(&self) -> u32 {
        self.intervals.len() as u32
    }

    /// The open intervals of U_m (1-indexed m).
    pub fn intervals_at(&self, m: u32) -> &[(f64, f64)] {
        &self.intervals[m as usize - 1]
    }

    pub fn measure(&self, m: u32) -> f64 {
        self.measures[m as usize - 1]
    }

    pub fn contains(&self, m: u32, x: f64) -> bool {
        self.intervals_at(m).iter().any(|&(l, r)| x > l && x < r)
    }

    /// [lo, hi] ∖ U_m as a list of closed intervals.
    pub fn complement_in(&self, m: u32, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cur = lo;
        let mut gaps: Vec<(f64, f64)> = self
            .intervals_at(m)
            .iter()
            .filter(|&&(l, r)| r > lo && l < hi)
            .map(|&(l, r)| (l.max(lo), r.min(hi)))
            .collect();
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (l, r) in gaps {
            if l > cur {
                out.push((cur, l));
            }
            cur = cur.max(r);
        }
        if hi > cur {
            out.push((cur, hi));
        }
        out
    }

    /// Checks closure(U_{m+1}) subset U_m and m * lambda(U_m) <= lambda(U_1).
    pub fn verify(&self) -> Result<()> {
        for m in 1..self.m_max() {
            for &(l1, r1) in self.intervals_at(m + 1) {
                let covered = self
                    .intervals_at(m)
                    .iter()
                    .any(|&(l0, r0)| l0 < l1 && r1 < r0);
                if !covered {
                    return Err(LevyError::Diagnostic(format!(
                        "closure of U_{} interval ({l1}, {r1}) not inside U_{m} (B1)",
                        m + 1
                    )));
                }
            }
        }
        let l1 = self.measure(1);
        for m in 1..=self.m_max() {
            if self.measure(m) * m as f64 > l1 * (1.0 + 1e-12) {
                return Err(LevyError::Diagnostic(format!(
                    "measure decay failed at m = {m}: {} * {m} > {l1}",
                    self.measure(m)
                )));
            }
        }
        Ok(())
    }
}

// --- Tietze-style extension ------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Piece {
    Base,
    Ramp { x0: f64, y0: f64, x1: f64, y1: f64 },
    Const(f64),
}

/// alpha^{(m)}: equals alpha on [-m, m] ∖ U_m, linear across each removed
/// interval, constant beyond the outermost retained points. Continuous and
/// preserving inf/sup of the restriction.
#[derive(Debug, Clone)]
pub struct ExtendedAlpha {
    alpha: StabilityIndexFn,
    /// piece i covers [starts[i], starts[i+1]), with sentinels at +-inf
    starts: Vec<f64>,
    pieces: Vec<Piece>,
    kinks: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl ExtendedAlpha {
    pub fn build(alpha: &StabilityIndexFn, m: u32, sets: &ExceptionalSets) -> Result<Self> {
        let mf = m as f64;
        let mut gaps: Vec<(f64, f64)> = sets
            .intervals_at(m)
            .iter()
            .filter(|&&(l, r)| r > -mf && l < mf)
            .map(|&(l, r)| (l.max(-mf), r.min(mf)))
            .collect();
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // retained components of [-m, m]
        let mut comps: Vec<(f64, f64)> = Vec::new();
        let mut cur = -mf;
        for &(l, r) in &gaps {
            if l > cur {
                comps.push((cur, l));
            }
            cur = cur.max(r);
        }
        if mf > cur {
            comps.push((cur, mf));
        }
        if comps.is_empty() {
            return Err(LevyError::Schedule(format!(
                "[-{m}, {m}] is entirely covered by U_{m}; nothing to extend"
            )));
        }
        let first = comps[0].0;
        let last = comps[comps.len() - 1].1;
        let mut starts = vec![f64::NEG_INFINITY, first];
        let mut pieces = vec![Piece::Const(alpha.eval(first))];
        for (i, &(_a, b)) in comps.iter().enumerate() {
            pieces.push(Piece::Base);
            starts.push(b);
            if i + 1 < comps.len() {
                let c = comps[i + 1].0;
                pieces.push(Piece::Ramp {
                    x0: b,
                    y0: alpha.eval(b),
                    x1: c,
                    y1: alpha.eval(c),
                });
                starts.push(c);
            }
        }
        pieces.push(Piece::Const(alpha.eval(last)));
        starts.push(f64::INFINITY);

        let mut kinks: Vec<f64> = starts
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        for &bp in alpha.kinks() {
            if comps.iter().any(|&(a, b)| bp >= a && bp <= b) {
                kinks.push(bp);
            }
        }
        kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        kinks.dedup();

        // inf/sup over the pieces: base pieces sample alpha's branch bounds,
        // ramps and constants are bounded by attained alpha values.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, p) in pieces.iter().enumerate() {
            match *p {
                Piece::Const(v) => {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                Piece::Ramp { y0, y1, .. } => {
                    lo = lo.min(y0.min(y1));
                    hi = hi.max(y0.max(y1));
                }
                Piece::Base => {
                    let a = starts[i];
                    let b = starts[i + 1];
                    lo = lo.min(alpha.eval(a).min(alpha.eval(b)));
                    hi = hi.max(alpha.eval(a).max(alpha.eval(b)));
                    for &bp in alpha.kinks() {
                        if bp >= a && bp <= b {
                            lo = lo.min(alpha.eval(bp));
                            hi = hi.max(alpha.eval(bp));
                        }
                    }
                }
            }
        }
        Ok(ExtendedAlpha {
            alpha: alpha.clone(),
            starts,
            pieces,
            kinks,
            lo,
            hi,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.starts.partition_point(|&s| s <= x).max(1) - 1;
        let i = i.min(self.pieces.len() - 1);
        match self.pieces[i] {
            Piece::Base => self.alpha.eval(x),
            Piece::Const(v) => v,
            Piece::Ramp { x0, y0, x1, y1 } => y0 + (x - x0) / (x1 - x0) * (y1 - y0),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn kinks_in(&self, a: f64, b: f64) -> &[f64] {
        let i = self.kinks.partition_point(|&k| k <= a);
        let j = self.kinks.partition_point(|&k| k < b);
        &self.kinks[i..j]
    }
}

// --- mollified alpha -------------------------------------------------------

/// alpha^{(m),k} = alpha^{(m)} * phi_k. Where the extension is affine on the
/// whole window (x - 1/k, x + 1/k) the convolution against the symmetric
/// unit-mass kernel reproduces it exactly and no quadrature is needed.
#[derive(Debug, Clone)]
pub struct MollifiedAlpha {
    ext: ExtendedAlpha,
    pub k: u32,
}

impl MollifiedAlpha {
    pub fn new(ext: ExtendedAlpha, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(LevyError::InvalidInput("mollifier order must be >= 1".into()));
        }
        Ok(MollifiedAlpha { ext, k })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = 1.0 / self.k as f64;
        let kinks = self.ext.kinks_in(x - w, x + w);
        if kinks.is_empty() {
            return self.ext.eval(x);
        }
        // u-coordinates: (ext * phi_k)(x) = int_{-1}^{1} ext(x - u/k) phi(u) du
        let kf = self.k as f64;
        let mut breaks = vec![-1.0];
        for &t in kinks.iter().rev() {
            let u = kf * (x - t);
            if u > -1.0 && u < 1.0 {
                breaks.push(u);
            }
        }
        breaks.push(1.0);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut fine = Vec::new();
        for wnd in breaks.windows(2) {
            let seg = linear_breaks(wnd[0], wnd[1], 0.2);
            fine.extend_from_slice(&seg[..seg.len() - 1]);
        }
        fine.push(1.0);
        gl24().integrate_panels(&fine, |u| self.ext.eval(x - u / kf) * Mollifier::base(u))
    }

    /// Quadrature-only evaluation, used to cross-check the exact fast path.
    pub fn eval_by_quadrature(&self, x: f64) -> f64 {
        let kf = self.k as f64;
        let w = 1.0 / kf;
        let mut breaks = vec![-1.0, 1.0];
        for &t in self.ext.kinks_in(x - w, x + w) {
            let u = kf * (x - t);
            if u > -1.0 && u < 1.0 {
                breaks.push(u);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut fine = Vec::new();
        for wnd in breaks.windows(2) {
            let seg = linear_breaks(wnd[0], wnd[1], 0.1);
            fine.extend_from_slice(&seg[..seg.len() - 1]);
        }
        fine.push(1.0);
        gl24().integrate_panels(&fine, |u| self.ext.eval(x - u / kf) * Mollifier::base(u))
    }

    /// Bounds inherited from the extension; convolution cannot widen them.
    pub fn range(&self) -> (f64, f64) {
        self.ext.range()
    }
}

/// Builds alpha^{(m),k} for a single (m, k): extension on [-m, m] ∖ U_m
/// followed by convolution with phi_k.
pub fn mollify_alpha(alpha: &StabilityIndexFn, m: u32, k: u32) -> Result<MollifiedAlpha> {
    alpha.validate()?;
    if m == 0 {
        return Err(LevyError::InvalidInput("extension index m must be >= 1".into()));
    }
    let sets = ExceptionalSets::from_breakpoints(&alpha.discontinuities(), m)?;
    let ext = ExtendedAlpha::build(alpha, m, &sets)?;
    MollifiedAlpha::new(ext, k)
}

// --- schedules ---------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScheduleEntry {
    pub n: u32,
    /// Mollification order k_n selected for this n.
    pub k: u32,
    /// Certified sup of |alpha_n - alpha| over the grid on [-n, n] ∖ U_n.
    pub sup_error: f64,
    pub inf_alpha_n: f64,
    pub sup_alpha_n: f64,
    pub alpha_n: Arc<MollifiedAlpha>,
}

/// The sequences alpha_n = alpha^{(n), k_n} together with the sets U_m and
/// the numeric certificates behind (S1)-(S3).
#[derive(Debug, Clone)]
pub struct ApproximationSchedule {
    pub alpha: StabilityIndexFn,
    pub sets: ExceptionalSets,
    pub entries: Vec<ScheduleEntry>,
}

impl ApproximationSchedule {
    /// Verifies (S1) on the stored sets and returns the global (S2) bounds.
    pub fn certify(&self) -> Result<(f64, f64)> {
        self.sets.verify()?;
        let lo = self
            .entries
            .iter()
            .map(|e| e.inf_alpha_n)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .entries
            .iter()
            .map(|e| e.sup_alpha_n)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(lo > 0.0 && hi < 2.0) {
            return Err(LevyError::Schedule(format!(
                "schedule bounds [{lo}, {hi}] violate (S2)"
            )));
        }
        for e in &self.entries {
            if !(e.sup_error < 1.0 / e.n as f64) {
                return Err(LevyError::Schedule(format!(
                    "(S3) fails at n = {}: sup error {} >= 1/n",
                    e.n, e.sup_error
                )));
            }
        }
        Ok((lo, hi))
    }
}

/// Grid points on [-n, n] ∖ U_n at the given density, always including the
/// complement interval endpoints where the approximation error peaks.
fn complement_grid(sets: &ExceptionalSets, n: u32, per_unit: usize) -> Vec<f64> {
    let mut pts = Vec::new();
    for (a, b) in sets.complement_in(n, -(n as f64), n as f64) {
        let cnt = (((b - a) * per_unit as f64).ceil() as usize).max(1);
        for i in 0..=cnt {
            pts.push(a + (b - a) * i as f64 / cnt as f64);
        }
    }
    pts
}

/// Selects k_n for every n <= n_max so that (S2) holds with margin eps and
/// the sup distance on [-n, n] ∖ U_n is below 1/n, certifying both on a
/// dense grid.
pub fn select_schedule(
    alpha: &StabilityIndexFn,
    eps: f64,
    n_max: u32,
) -> Result<ApproximationSchedule> {
    alpha.validate()?;
    let (inf_a, sup_a) = alpha.range();
    if !(eps > 0.0 && eps < (2.0 - sup_a).min(inf_a)) {
        return Err(LevyError::Schedule(format!(
            "eps = {eps} must lie in (0, min(2 - sup alpha, inf alpha)) = (0, {})",
            (2.0 - sup_a).min(inf_a)
        )));
    }
    if n_max == 0 {
        return Err(LevyError::InvalidInput("n_max must be >= 1".into()));
    }
    let sets = ExceptionalSets::from_breakpoints(&alpha.discontinuities(), n_max)?;
    let mut entries = Vec::with_capacity(n_max as usize);
    let mut k_prev: u32 = 1;
    for n in 1..=n_max {
        let ext = ExtendedAlpha::build(alpha, n, &sets)?;
        let grid = complement_grid(&sets, n, 512);
        let target = 1.0 / n as f64;
        let mut k = k_prev.max(n);
        let mut best: Option<(u32, f64, f64, f64)> = None;
        let mut achieved = f64::INFINITY;
        for _ in 0..40 {
            let mol = MollifiedAlpha::new(ext.clone(), k)?;
            let mut sup = 0.0f64;
            for &x in &grid {
                let d = (mol.eval(x) - alpha.eval(x)).abs();
                if d > sup {
                    sup = d;
                    if sup >= target {
                        break;
                    }
                }
            }
            achieved = achieved.min(sup);
            if sup < target {
                // (S2) bounds on a dense grid; the extension is constant
                // outside [-n, n] so [-n-2, n+2] covers the variation.
                let nn = n as f64;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let cnt = ((2.0 * nn + 4.0) * 128.0) as usize;
                for i in 0..=cnt {
                    let x = -nn - 2.0 + (2.0 * nn + 4.0) * i as f64 / cnt as f64;
                    let v = mol.eval(x);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                if lo >= inf_a - eps && hi <= sup_a + eps {
                    best = Some((k, sup, lo, hi));
                    break;
                }
            }
            k = k.saturating_mul(2);
        }
        let (k_n, sup, lo, hi) = best.ok_or_else(|| {
            LevyError::Schedule(format!(
                "no k met the 1/n target at n = {n}; best sup distance achieved was {achieved}"
            ))
        })?;
        k_prev = k_n;
        entries.push(ScheduleEntry {
            n,
            k: k_n,
            sup_error: sup,
            inf_alpha_n: lo,
            sup_alpha_n: hi,
            alpha_n: Arc::new(MollifiedAlpha::new(ExtendedAlpha::build(alpha, n, &sets)?, k_n)?),
        });
    }
    Ok(ApproximationSchedule {
        alpha: alpha.clone(),
        sets,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mollifier_mass_and_support() {
        let phi = Mollifier::new(3).unwrap();
        let gl = gl24();
        let mass = gl.integrate_panels(&linear_breaks(-1.0 / 3.0, 1.0 / 3.0, 0.01), |x| {
            phi.eval(x)
        });
        assert!((mass - 1.0).abs() < 1e-10, "mass = {mass}");
        assert_eq!(phi.eval(0.34), 0.0);
        assert_eq!(phi.eval(-0.4), 0.0);
        for i in 0..100 {
            let x = -0.33 + 0.66 * i as f64 / 99.0;
            assert!(phi.eval(x) >= 0.0);
        }
    }

    #[test]
    fn exceptional_sets_single_origin() {
        let sets = ExceptionalSets::from_breakpoints(&[0.0], 5).unwrap();
        for m in 1..=5u32 {
            let iv = sets.intervals_at(m);
            assert_eq!(iv.len(), 1);
            let r = 1.0 / (8.0 * m as f64);
            assert!((iv[0].0 + r).abs() < 1e-15);
            assert!((iv[0].1 - r).abs() < 1e-15);
            assert!((sets.measure(m) - 1.0 / (4.0 * m as f64)).abs() < 1e-15);
        }
        sets.verify().unwrap();
    }

    #[test]
    fn exceptional_sets_threshold_variant() {
        let sets = ExceptionalSets::threshold(6);
        for m in 1..=6u32 {
            let iv = sets.intervals_at(m);
            assert_eq!(iv, &[(-1.0 / m as f64, 1.0 / m as f64)]);
        }
        sets.verify().unwrap();
    }

    #[test]
    fn exceptional_sets_empty() {
        let sets = ExceptionalSets::from_breakpoints(&[], 4).unwrap();
        for m in 1..=4 {
            assert!(sets.intervals_at(m).is_empty());
            assert_eq!(sets.measure(m), 0.0);
        }
        sets.verify().unwrap();
    }

    #[test]
    fn exceptional_sets_duplicates_rejected() {
        assert!(ExceptionalSets::from_breakpoints(&[0.0, 0.0], 3).is_err());
    }

    #[test]
    fn exceptional_sets_disjoint_and_nested() {
        let sets = ExceptionalSets::from_breakpoints(&[-1.0, -0.3, 0.0, 2.0], 8).unwrap();
        sets.verify().unwrap();
        for m in 1..=8 {
            let iv = sets.intervals_at(m);
            for w in iv.windows(2) {
                assert!(w[0].1 < w[1].0, "intervals overlap at m = {m}");
            }
        }
    }

    #[test]
    fn glue_weights_partition() {
        let g = GlueWeights::new(7).unwrap();
        for i in 0..200 {
            let x = -1.0 + i as f64 * 0.02;
            let l = g.left(x);
            let r = g.right(x);
            assert_eq!(l + r, 1.0); // exact partition
            assert!(l.max(r) >= 0.5);
        }
        assert_eq!(g.left(0.0), 1.0);
        assert_eq!(g.left(-3.0), 1.0);
        assert_eq!(g.left(1.0 / 7.0), 0.0);
        assert_eq!(g.left(5.0), 0.0);
    }

    #[test]
    fn extension_matches_alpha_on_retained_set() {
        let alpha = StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap();
        let sets = ExceptionalSets::from_breakpoints(&[0.0], 3).unwrap();
        let ext = ExtendedAlpha::build(&alpha, 2, &sets).unwrap();
        let r = 1.0 / 16.0;
        for &x in &[-2.0, -1.0, -r, r, 0.5, 2.0] {
            assert_eq!(ext.eval(x), alpha.eval(x), "x = {x}");
        }
        // linear across the removed interval, continuous at its ends
        let mid = ext.eval(0.0);
        assert!((mid - 1.5).abs() < 1e-12);
        // constant continuation
        assert_eq!(ext.eval(-10.0), 1.2);
        assert_eq!(ext.eval(10.0), 1.8);
        let (lo, hi) = ext.range();
        assert_eq!((lo, hi), (1.2, 1.8));
    }

    #[test]
    fn mollified_constant_alpha_is_exact() {
        let alpha = StabilityIndexFn::constant(1.5).unwrap();
        for (m, k) in [(1, 1), (3, 7), (5, 64)] {
            let mol = mollify_alpha(&alpha, m, k).unwrap();
            for &x in &[-8.0, -0.01, 0.0, 0.3, 6.0] {
                assert!((mol.eval(x) - 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mollified_equals_alpha_away_from_window() {
        // jump at 0; m = 1 gives U_1 = (-1/8, 1/8). With k = 4 the window
        // around x = 2/k = 0.5 misses both the removed interval and the jump.
        let alpha = StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap();
        let mol = mollify_alpha(&alpha, 1, 4).unwrap();
        let x = 2.0 / 4.0;
        assert_eq!(mol.eval(x), alpha.eval(x));
        assert_eq!(mol.eval(-x), alpha.eval(-x));
    }

    #[test]
    fn fast_path_agrees_with_quadrature() {
        let alpha = StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap();
        let mol = mollify_alpha(&alpha, 2, 32).unwrap();
        for i in 0..80 {
            let x = -1.0 + i as f64 * 0.025;
            let fast = mol.eval(x);
            let quad = mol.eval_by_quadrature(x);
            assert!(
                (fast - quad).abs() < 1e-11,
                "x = {x}: fast {fast} vs quadrature {quad}"
            );
        }
    }

    #[test]
    fn sup_distance_decreases_in_k() {
        let alpha = StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap();
        let sets = ExceptionalSets::from_breakpoints(&[0.0], 2).unwrap();
        let ext = ExtendedAlpha::build(&alpha, 2, &sets).unwrap();
        let grid = complement_grid(&sets, 2, 512);
        let mut prev = f64::INFINITY;
        for k in [4u32, 16, 64, 256, 1024] {
            let mol = MollifiedAlpha::new(ext.clone(), k).unwrap();
            let sup = grid
                .iter()
                .map(|&x| (mol.eval(x) - alpha.eval(x)).abs())
                .fold(0.0f64, f64::max);
            assert!(sup <= prev + 1e-12, "k = {k}: {sup} > {prev}");
            prev = sup;
        }
        assert!(prev < 1e-3, "sup distance failed to approach 0: {prev}");
    }

    #[test]
    fn schedule_constant_alpha() {
        let alpha = StabilityIndexFn::constant(1.5).unwrap();
        let s = select_schedule(&alpha, 0.2, 5).unwrap();
        for e in &s.entries {
            // only kernel-mass rounding near the extension boundaries
            assert!(e.sup_error <= 1e-12, "n = {}: {}", e.n, e.sup_error);
        }
        s.certify().unwrap();
    }

    #[test]
    fn schedule_step_alpha() {
        let alpha = StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap();
        let s = select_schedule(&alpha, 0.1, 10).unwrap();
        let e = &s.entries[9];
        assert!(e.sup_error < 0.1, "sup error at n = 10: {}", e.sup_error);
        s.certify().unwrap();
    }

    #[test]
    fn schedule_two_breakpoints() {
        let alpha = StabilityIndexFn::steps(vec![-1.0, 1.0], vec![0.8, 1.5, 1.1]).unwrap();
        let s = select_schedule(&alpha, 0.1, 6).unwrap();
        let (lo, hi) = s.certify().unwrap();
        assert!(lo > 0.0 && hi < 2.0);
    }

    #[test]
    fn schedule_rejects_bad_eps() {
        let alpha = StabilityIndexFn::step(0.0, 1.2, 1.8).unwrap();
        assert!(select_schedule(&alpha, 0.5, 3).is_err()); // 2 - 1.8 = 0.2 < 0.5
    }

    #[test]
    fn glued_approx_symbol_examples() {
        let left = LevyTriplet::stable(1.0).unwrap();
        let right = LevyTriplet::stable(1.0).unwrap();
        let n = 4;
        let sym = glued_approx_symbol(left.clone(), right, n).unwrap();
        // at x = -5 exactly the left symbol
        let q = sym.eval(-5.0, 3.0);
        let ql = crate::symbol::levy_exponent(&left, 3.0);
        assert_eq!(q, ql);
        // Cauchy pair at the midpoint: |xi/2| + |xi/2| = |xi|
        let qm = sym.eval(0.5 / n as f64, 3.0);
        assert!((qm.re - 3.0).abs() < 1e-12);
        // (A1)
        assert_eq!(sym.eval(0.03, 0.0), num_complex::Complex64::ZERO);
    }
}
