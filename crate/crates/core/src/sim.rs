//! Path simulation: exact symmetric stable draws, Levy increments with
//! small-jump truncation and compensating drift, and left-point Euler
//! schemes for the threshold-glued SDE and stable-like dynamics.
//!
//! Reproducibility: one root seed; every path owns ChaCha substreams keyed
//! by `path * 4 + channel` (channel 0 = initial value, 1 = first driver,
//! 2 = second driver), so changing the path count or the thread count never
//! reshuffles earlier paths.

use crate::error::{LevyError, Result};
use crate::levy::{stable_cos_integral, JumpDist, JumpMeasure, LevyTriplet};
use crate::symbol::AlphaFn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

const STREAMS_PER_PATH: u64 = 4;

/// Deterministic RNG for (seed, stream).
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn channel_rng(seed: u64, path: u64, channel: u64) -> ChaCha8Rng {
    seeded_rng(seed, path * STREAMS_PER_PATH + channel)
}

// --- stable sampling ---------------------------------------------------------

/// One draw of the standard symmetric alpha-stable law, CF exp(-|xi|^alpha),
/// by the polar transform method. Valid for 0 < alpha <= 2; alpha = 2 gives
/// Normal(0, 2) and alpha = 1 the standard Cauchy.
pub fn sample_standard_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = std::f64::consts::PI * (rng.random::<f64>() - 0.5);
    let w = (-(1.0 - rng.random::<f64>()).ln()).max(1e-300);
    if alpha == 1.0 {
        return u.tan();
    }
    let t = alpha * u;
    let s = (1.0 - alpha) * u;
    (t.sin() / u.cos().powf(1.0 / alpha)) * (s.cos() / w).powf((1.0 - alpha) / alpha)
}

/// n i.i.d. draws with CF exp(-|xi|^alpha).
pub fn sample_stable(alpha: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(LevyError::AlphaOutOfRange(alpha));
    }
    let mut rng = seeded_rng(seed, 0);
    Ok((0..n).map(|_| sample_standard_stable(alpha, &mut rng)).collect())
}

// --- increment sampler -------------------------------------------------------

/// Per-step increment machinery for one Levy triplet.
///
/// Jumps with |y| <= eps_jump are dropped and replaced by the compensating
/// drift int_{eps<|y|<=1} y nu(dy); for the stable family an exact mode
/// samples the whole jump part as a scaled stable draw instead.
#[derive(Debug, Clone)]
pub struct LevyIncrementSampler {
    pub triplet: LevyTriplet,
    pub eps_jump: f64,
    pub exact_stable: bool,
    big_rate: f64,
    compensator: f64,
    /// (multiplier M, alpha) with jump symbol M |xi|^alpha, exact mode only
    stable_mult: Option<(f64, f64)>,
    /// cumulative weights for table atoms above the cutoff
    table_cdf: Vec<(f64, f64)>,
}

impl LevyIncrementSampler {
    pub fn new(triplet: LevyTriplet, eps_jump: f64, exact_stable: bool) -> Result<Self> {
        triplet.validate()?;
        if !(eps_jump > 0.0) {
            return Err(LevyError::InvalidConfig(
                "eps_jump must be positive: nu(|y| > eps) is not finite at eps = 0".into(),
            ));
        }
        let mut exact = exact_stable;
        let stable_mult = match &triplet.jumps {
            JumpMeasure::Stable { alpha, scale } => {
                Some((scale * stable_cos_integral(*alpha)?, *alpha))
            }
            _ => {
                exact = false;
                None
            }
        };
        let (big_rate, compensator) = if exact {
            (0.0, 0.0)
        } else {
            (
                triplet.jumps.tail_mass(eps_jump),
                triplet.jumps.band_compensator(eps_jump),
            )
        };
        let table_cdf = match &triplet.jumps {
            JumpMeasure::Table { atoms } => {
                let mut acc = 0.0;
                atoms
                    .iter()
                    .filter(|&&(y, _)| y.abs() > eps_jump)
                    .map(|&(y, w)| {
                        acc += w;
                        (y, acc)
                    })
                    .collect()
            }
            _ => Vec::new(),
        };
        Ok(LevyIncrementSampler {
            triplet,
            eps_jump,
            exact_stable: exact,
            big_rate,
            compensator,
            stable_mult,
            table_cdf,
        })
    }

    /// One increment over a step of length dt.
    pub fn sample_increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        let t = &self.triplet;
        let mut inc = t.drift * dt;
        if t.diffusion > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            inc += (t.diffusion * dt).sqrt() * z;
        }
        if self.exact_stable {
            let (m, alpha) = self.stable_mult.expect("exact mode implies stable jumps");
            inc += (m * dt).powf(1.0 / alpha) * sample_standard_stable(alpha, rng);
            return inc;
        }
        if self.big_rate > 0.0 {
            let lambda = self.big_rate * dt;
            let count = Poisson::new(lambda).expect("positive rate").sample(rng) as usize;
            for _ in 0..count {
                inc += self.sample_jump_size(rng);
            }
            inc -= self.compensator * dt;
        }
        inc
    }

    /// Jump size from nu conditioned on |y| > eps_jump.
    fn sample_jump_size<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let eps = self.eps_jump;
        match &self.triplet.jumps {
            JumpMeasure::None => 0.0,
            JumpMeasure::Stable { alpha, .. } => {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let u: f64 = rng.random::<f64>();
                sign * eps * (1.0 - u).powf(-1.0 / alpha)
            }
            JumpMeasure::TemperedStable { alpha, lambda, .. } => loop {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let u: f64 = rng.random::<f64>();
                let mag = eps * (1.0 - u).powf(-1.0 / alpha);
                if rng.random::<f64>() < (-lambda * (mag - eps)).exp() {
                    break sign * mag;
                }
            },
            JumpMeasure::CompoundPoisson { jumps, .. } => match jumps {
                JumpDist::Point { size } => *size,
                JumpDist::Normal { mean, std_dev } => loop {
                    let y = Normal::new(*mean, *std_dev).unwrap().sample(rng);
                    if y.abs() > eps {
                        break y;
                    }
                },
                JumpDist::Uniform { lo, hi } => loop {
                    let y = lo + (hi - lo) * rng.random::<f64>();
                    if y.abs() > eps {
                        break y;
                    }
                },
            },
            JumpMeasure::Table { .. } => {
                let total = self.table_cdf.last().map(|&(_, c)| c).unwrap_or(0.0);
                let u = rng.random::<f64>() * total;
                self.table_cdf
                    .iter()
                    .find(|&&(_, c)| u <= c)
                    .map(|&(y, _)| y)
                    .unwrap_or(0.0)
            }
        }
    }
}

/// Increments of n_paths x n_steps, path-major. Each path uses its own
/// substream of the root seed.
pub fn simulate_levy_increments(
    sampler: &LevyIncrementSampler,
    dt: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(LevyError::InvalidConfig("dt must be positive".into()));
    }
    let mut out = vec![0.0; n_steps * n_paths];
    out.par_chunks_mut(n_steps).enumerate().for_each(|(p, row)| {
        let mut rng = channel_rng(seed, p as u64, 1);
        for v in row.iter_mut() {
            *v = sampler.sample_increment(dt, &mut rng);
        }
    });
    Ok(out)
}

// --- initial laws and ensembles -----------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum InitialLaw {
    Point { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std_dev: f64 },
}

impl InitialLaw {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitialLaw::Point { value } => value,
            InitialLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            InitialLaw::Normal { mean, std_dev } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + std_dev * z
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialLaw::Point { value } if value.is_finite() => Ok(()),
            InitialLaw::Uniform { lo, hi } if lo < hi => Ok(()),
            InitialLaw::Normal { std_dev, .. } if std_dev > 0.0 => Ok(()),
            _ => Err(LevyError::InvalidConfig("invalid initial law".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub kind: String,
    pub eps_jump: f64,
    pub exact_stable: bool,
}

/// N simulated trajectories on the uniform grid t_k = k dt, cadlag
/// convention: the stored value at t_k is the post-jump state.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub dt: f64,
    /// number of steps M; states per path = M + 1
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: SchemeMeta,
    /// path-major: states[p * (M+1) + k]
    pub states: Vec<f64>,
}

const DUMP_MAGIC: &[u8; 8] = b"LVYPATHS";
const DUMP_VERSION: u32 = 1;

impl PathEnsemble {
    pub fn t_end(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn path(&self, p: usize) -> &[f64] {
        let w = self.n_steps + 1;
        &self.states[p * w..(p + 1) * w]
    }

    pub fn state(&self, p: usize, k: usize) -> f64 {
        self.states[p * (self.n_steps + 1) + k]
    }

    pub fn terminal_values(&self) -> Vec<f64> {
        (0..self.n_paths).map(|p| self.state(p, self.n_steps)).collect()
    }

    /// Binary dump: magic "LVYPATHS", version u32, M u64, N u64, dt f64,
    /// seed u64, then N * (M + 1) states as little-endian f64, path-major.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(self.n_steps as u64).to_le_bytes())?;
        w.write_all(&(self.n_paths as u64).to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.states.len() * 8);
        for v in &self.states {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(LevyError::InvalidInput("bad ensemble dump magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != DUMP_VERSION {
            return Err(LevyError::InvalidInput("unsupported dump version".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let m = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let dt = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let seed = u64::from_le_bytes(b8);
        let mut states = vec![0.0; n * (m + 1)];
        let mut raw = vec![0u8; states.len() * 8];
        r.read_exact(&mut raw)?;
        for (i, chunk) in raw.chunks_exact(8).enumerate() {
            states[i] = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        Ok(PathEnsemble {
            dt,
            n_steps: m,
            n_paths: n,
            seed,
            scheme: SchemeMeta {
                kind: "dump".into(),
                eps_jump: 0.0,
                exact_stable: false,
            },
            states,
        })
    }

    /// Long-format CSV: path_id, t, x.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "path_id,t,x")?;
        for p in 0..self.n_paths {
            for k in 0..=self.n_steps {
                writeln!(w, "{},{},{}", p, k as f64 * self.dt, self.state(p, k))?;
            }
        }
        Ok(())
    }
}

// --- path sources --------------------------------------------------------------

/// Anything that can deterministically produce path p of a fixed ensemble.
pub trait PathSource: Sync {
    fn n_paths(&self) -> usize;
    fn n_steps(&self) -> usize;
    fn dt(&self) -> f64;
    /// Fills `buf` (length n_steps + 1) with the states of path p.
    fn path_into(&self, p: usize, buf: &mut [f64]) -> Result<()>;
}

impl PathSource for PathEnsemble {
    fn n_paths(&self) -> usize {
        self.n_paths
    }
    fn n_steps(&self) -> usize {
        self.n_steps
    }
    fn dt(&self) -> f64 {
        self.dt
    }
    fn path_into(&self, p: usize, buf: &mut [f64]) -> Result<()> {
        buf.copy_from_slice(self.path(p));
        Ok(())
    }
}

/// Applies `f` to every path in index order; parallel but deterministic
/// (results land in a vector indexed by path).
pub fn map_paths<S: PathSource + ?Sized, T: Send, F>(src: &S, f: F) -> Result<Vec<T>>
where
    F: Fn(usize, &[f64]) -> T + Sync,
{
    let w = src.n_steps() + 1;
    let results: Vec<Result<T>> = (0..src.n_paths())
        .into_par_iter()
        .map_init(
            || vec![0.0; w],
            |buf, p| {
                src.path_into(p, buf)?;
                Ok(f(p, buf))
            },
        )
        .collect();
    results.into_iter().collect()
}

fn materialize<S: PathSource>(src: &S, seed: u64, scheme: SchemeMeta) -> Result<PathEnsemble> {
    let w = src.n_steps() + 1;
    let total = w.checked_mul(src.n_paths()).ok_or_else(|| {
        LevyError::InvalidConfig("ensemble dimensions overflow".into())
    })?;
    if total > 200_000_000 {
        return Err(LevyError::InvalidConfig(format!(
            "ensemble of {total} states is too large to materialize; reduce n_paths or dt"
        )));
    }
    let mut states = vec![0.0; total];
    let errs: Vec<Result<()>> = states
        .par_chunks_mut(w)
        .enumerate()
        .map(|(p, chunk)| src.path_into(p, chunk))
        .collect();
    for e in errs {
        e?;
    }
    Ok(PathEnsemble {
        dt: src.dt(),
        n_steps: src.n_steps(),
        n_paths: src.n_paths(),
        seed,
        scheme,
        states,
    })
}

/// Common simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub x0: InitialLaw,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end > 0.0 && self.t_end >= self.dt) {
            return Err(LevyError::InvalidConfig(
                "need 0 < dt <= t_end".into(),
            ));
        }
        if self.n_paths == 0 {
            return Err(LevyError::InvalidConfig("n_paths must be >= 1".into()));
        }
        self.x0.validate()
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// Single-driver Levy dynamics X_{k+1} = X_k + dL_k.
pub struct LevySim {
    pub sampler: LevyIncrementSampler,
    pub config: SimConfig,
}

impl PathSource for LevySim {
    fn n_paths(&self) -> usize {
        self.config.n_paths
    }
    fn n_steps(&self) -> usize {
        self.config.n_steps()
    }
    fn dt(&self) -> f64 {
        self.config.dt
    }
    fn path_into(&self, p: usize, buf: &mut [f64]) -> Result<()> {
        let mut x = self.config.x0.sample(&mut channel_rng(self.config.seed, p as u64, 0));
        let mut rng = channel_rng(self.config.seed, p as u64, 1);
        buf[0] = x;
        for k in 0..self.n_steps() {
            x += self.sampler.sample_increment(self.config.dt, &mut rng);
            if !x.is_finite() {
                return Err(LevyError::NonFiniteState { path: p, step: k });
            }
            buf[k + 1] = x;
        }
        Ok(())
    }
}

impl LevySim {
    pub fn run(&self) -> Result<PathEnsemble> {
        self.config.validate()?;
        materialize(
            self,
            self.config.seed,
            SchemeMeta {
                kind: "levy".into(),
                eps_jump: self.sampler.eps_jump,
                exact_stable: self.sampler.exact_stable,
            },
        )
    }
}

/// Threshold-glued dynamics: the left driver acts while X_k <= 0, the right
/// while X_k > 0; the indicator is frozen at the left grid point, matching
/// the pre-jump state in the SDE. Both drivers advance every step.
pub struct GluedSim {
    pub left: LevyIncrementSampler,
    pub right: LevyIncrementSampler,
    pub config: SimConfig,
    pub left_seed: u64,
    pub right_seed: u64,
}

impl GluedSim {
    pub fn new(
        left: LevyTriplet,
        right: LevyTriplet,
        config: SimConfig,
        eps_jump: f64,
        exact_stable: bool,
    ) -> Result<Self> {
        config.validate()?;
        let l = LevyIncrementSampler::new(left, eps_jump, exact_stable)?;
        let r = LevyIncrementSampler::new(right, eps_jump, exact_stable)?;
        for (side, s) in [("left", &l), ("right", &r)] {
            if !hartman_wintner_quick(&s.triplet) {
                log::warn!(
                    "{side} triplet may fail the Hartman-Wintner growth condition; \
                     transition-density bounds are not guaranteed"
                );
            }
        }
        Ok(GluedSim {
            left: l,
            right: r,
            left_seed: config.seed,
            right_seed: config.seed,
            config,
        })
    }

    pub fn run(&self) -> Result<PathEnsemble> {
        self.config.validate()?;
        materialize(
            self,
            self.config.seed,
            SchemeMeta {
                kind: "glued".into(),
                eps_jump: self.left.eps_jump,
                exact_stable: self.left.exact_stable && self.right.exact_stable,
            },
        )
    }
}

impl PathSource for GluedSim {
    fn n_paths(&self) -> usize {
        self.config.n_paths
    }
    fn n_steps(&self) -> usize {
        self.config.n_steps()
    }
    fn dt(&self) -> f64 {
        self.config.dt
    }
    fn path_into(&self, p: usize, buf: &mut [f64]) -> Result<()> {
        let mut x = self.config.x0.sample(&mut channel_rng(self.config.seed, p as u64, 0));
        let mut rng_l = channel_rng(self.left_seed, p as u64, 1);
        let mut rng_r = channel_rng(self.right_seed, p as u64, 2);
        let dt = self.config.dt;
        buf[0] = x;
        for k in 0..self.n_steps() {
            let dl = self.left.sample_increment(dt, &mut rng_l);
            let dr = self.right.sample_increment(dt, &mut rng_r);
            x += if x <= 0.0 { dl } else { dr };
            if !x.is_finite() {
                return Err(LevyError::NonFiniteState { path: p, step: k });
            }
            buf[k + 1] = x;
        }
        Ok(())
    }
}

/// Stable-like dynamics: exact symmetric stable increment with the index
/// frozen at the pre-step state, X_{k+1} = X_k + dt^{1/alpha(X_k)} S_k.
pub struct StableLikeSim {
    pub alpha: AlphaFn,
    pub config: SimConfig,
}

impl PathSource for StableLikeSim {
    fn n_paths(&self) -> usize {
        self.config.n_paths
    }
    fn n_steps(&self) -> usize {
        self.config.n_steps()
    }
    fn dt(&self) -> f64 {
        self.config.dt
    }
    fn path_into(&self, p: usize, buf: &mut [f64]) -> Result<()> {
        let mut x = self.config.x0.sample(&mut channel_rng(self.config.seed, p as u64, 0));
        let mut rng = channel_rng(self.config.seed, p as u64, 1);
        let dt = self.config.dt;
        buf[0] = x;
        for k in 0..self.n_steps() {
            let a = self.alpha.eval(x);
            x += dt.powf(1.0 / a) * sample_standard_stable(a, &mut rng);
            if !x.is_finite() {
                return Err(LevyError::NonFiniteState { path: p, step: k });
            }
            buf[k + 1] = x;
        }
        Ok(())
    }
}

impl StableLikeSim {
    pub fn run(&self) -> Result<PathEnsemble> {
        self.config.validate()?;
        materialize(
            self,
            self.config.seed,
            SchemeMeta {
                kind: "stable_like".into(),
                eps_jump: 0.0,
                exact_stable: true,
            },
        )
    }
}

/// Euler simulation of the glued SDE with both drivers derived from one
/// root seed; exact stable jumps are used when both sides are stable.
pub fn simulate_glued_sde(
    left: LevyTriplet,
    right: LevyTriplet,
    x0: InitialLaw,
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    let exact = matches!(left.jumps, JumpMeasure::Stable { .. } | JumpMeasure::None)
        && matches!(right.jumps, JumpMeasure::Stable { .. } | JumpMeasure::None);
    let config = SimConfig {
        t_end,
        dt,
        n_paths,
        seed,
        x0,
    };
    GluedSim::new(left, right, config, 1e-3, exact)?.run()
}

/// Markov-chain approximation to the stable-like martingale problem.
pub fn simulate_stable_like(
    alpha: AlphaFn,
    x0: InitialLaw,
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    let (lo, hi) = alpha.range();
    if !(lo > 0.0 && hi < 2.0) {
        return Err(LevyError::AlphaOutOfRange(if lo <= 0.0 { lo } else { hi }));
    }
    StableLikeSim {
        alpha,
        config: SimConfig {
            t_end,
            dt,
            n_paths,
            seed,
            x0,
        },
    }
    .run()
}

/// Coarse Hartman-Wintner screen: Re q grows against log(1 + |xi|) across
/// two decades. Used only for warn-level precondition checks.
fn hartman_wintner_quick(t: &LevyTriplet) -> bool {
    let q = |xi: f64| crate::symbol::levy_exponent(t, xi).re;
    let r1 = q(1e2) / (1.0 + 1e2f64).ln();
    let r2 = q(1e4) / (1.0 + 1e4f64).ln();
    r2 > r1 && r2 > 5.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{empirical_cf, ks_two_sample};

    #[test]
    fn stable_alpha_two_is_gaussian_with_variance_two() {
        let n = 100_000;
        let xs = sample_stable(2.0, n, 42).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        // Var = 2; the sampling error of the variance is ~ sqrt(2/n)*Var
        let sigma = 2.0 * (2.0 / n as f64).sqrt();
        assert!((var - 2.0).abs() < 4.0 * sigma, "var = {var}");
        assert!(mean.abs() < 4.0 * (2.0 / n as f64).sqrt());
        for &xi in &[0.5, 1.0, 2.0] {
            let cf = empirical_cf(&xs, xi);
            let target = (-xi * xi).exp();
            assert!((cf.re - target).abs() < 0.01, "xi = {xi}");
            assert!(cf.im.abs() < 0.01);
        }
    }

    #[test]
    fn stable_alpha_one_is_cauchy() {
        let n = 100_000;
        let mut xs = sample_stable(1.0, n, 7).unwrap();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = xs[n / 2];
        assert!(median.abs() < 0.02, "median = {median}");
        let cf = empirical_cf(&xs, 1.0);
        let target = (-1.0f64).exp();
        assert!((cf.re - target).abs() <= 3.0 / (n as f64).sqrt() + 0.005);
    }

    #[test]
    fn stable_cf_test_alpha_three_halves() {
        let n = 100_000;
        let xs = sample_stable(1.5, n, 12345).unwrap();
        for &xi in &[0.5, 1.0, 2.0] {
            let cf = empirical_cf(&xs, xi);
            let target = (-xi.abs().powf(1.5)).exp();
            let err = ((cf.re - target).powi(2) + cf.im.powi(2)).sqrt();
            assert!(err <= 0.01, "xi = {xi}: err = {err}");
        }
    }

    #[test]
    fn stable_rejects_bad_alpha() {
        assert!(sample_stable(0.0, 10, 1).is_err());
        assert!(sample_stable(2.1, 10, 1).is_err());
    }

    #[test]
    fn sampler_rejects_zero_cutoff() {
        // nu(|y| > eps) is infinite at eps = 0 for infinite-activity measures
        let t = LevyTriplet::stable(1.5).unwrap();
        assert!(LevyIncrementSampler::new(t, 0.0, false).is_err());
    }

    #[test]
    fn gaussian_increments_have_step_variance() {
        let t = LevyTriplet::brownian(1.0);
        let s = LevyIncrementSampler::new(t, 1e-3, false).unwrap();
        let dt = 0.25;
        let incs = simulate_levy_increments(&s, dt, 64, 512, 5).unwrap();
        let n = incs.len() as f64;
        let mean = incs.iter().sum::<f64>() / n;
        let var = incs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let sigma = dt * (2.0 / n).sqrt();
        assert!((var - dt).abs() < 4.0 * sigma, "var = {var} vs dt = {dt}");
    }

    #[test]
    fn exact_stable_increment_cf() {
        let t = LevyTriplet::stable(1.5).unwrap();
        let s = LevyIncrementSampler::new(t, 1e-3, true).unwrap();
        let dt = 0.1;
        let incs = simulate_levy_increments(&s, dt, 1, 100_000, 99).unwrap();
        for &xi in &[1.0, 2.0] {
            let cf = empirical_cf(&incs, xi);
            let target = (-dt * xi.abs().powf(1.5)).exp();
            assert!((cf.re - target).abs() < 0.01, "xi = {xi}: {} vs {target}", cf.re);
        }
    }

    #[test]
    fn compound_poisson_mean_jump_count() {
        let t = LevyTriplet::new(
            0.0,
            0.0,
            JumpMeasure::CompoundPoisson {
                rate: 2.0,
                jumps: JumpDist::Point { size: 1.0 },
            },
        )
        .unwrap();
        let s = LevyIncrementSampler::new(t, 1e-3, false).unwrap();
        let n = 20_000;
        let incs = simulate_levy_increments(&s, 1.0, 1, n, 21).unwrap();
        // each unit jump adds 1, compensator is rate * 1 * dt (|1| <= 1).
        // count = increment + compensator
        let mean_count =
            incs.iter().map(|v| v + 2.0).sum::<f64>() / n as f64;
        assert!(
            (mean_count - 2.0).abs() < 4.0 * (2.0 / n as f64).sqrt(),
            "mean count = {mean_count}"
        );
    }

    #[test]
    fn exact_vs_truncated_stable_ks() {
        let t = LevyTriplet::stable(1.5).unwrap();
        let dt = 0.1;
        let n = 10_000;
        let exact = simulate_levy_increments(
            &LevyIncrementSampler::new(t.clone(), 1e-3, true).unwrap(),
            dt,
            1,
            n,
            3,
        )
        .unwrap();
        let truncated = simulate_levy_increments(
            &LevyIncrementSampler::new(t, 1e-3, false).unwrap(),
            dt,
            1,
            n,
            4,
        )
        .unwrap();
        let d = ks_two_sample(&exact, &truncated);
        assert!(d <= 0.02, "KS distance {d}");
    }

    #[test]
    fn seed_determinism_bitwise() {
        let left = LevyTriplet::stable(1.2).unwrap();
        let right = LevyTriplet::stable(1.8).unwrap();
        let run = || {
            simulate_glued_sde(
                left.clone(),
                right.clone(),
                InitialLaw::Point { value: 0.0 },
                0.5,
                0.01,
                256,
                77,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.states.len(), b.states.len());
        for (x, y) in a.states.iter().zip(&b.states) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn glued_pure_drift_is_exact() {
        let drift = LevyTriplet::new(1.0, 0.0, JumpMeasure::None).unwrap();
        let ens = simulate_glued_sde(
            drift.clone(),
            drift,
            InitialLaw::Point { value: 0.0 },
            1.0,
            0.01,
            3,
            1,
        )
        .unwrap();
        for p in 0..3 {
            assert!((ens.state(p, ens.n_steps) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn glued_drift_switching_sticks_at_threshold() {
        // +1 drift below the threshold, -1 above: from -0.5 the state reaches
        // 0 at t = 0.5 and then chatters within one step of it.
        let up = LevyTriplet::new(1.0, 0.0, JumpMeasure::None).unwrap();
        let down = LevyTriplet::new(-1.0, 0.0, JumpMeasure::None).unwrap();
        let dt = 0.01;
        let ens = simulate_glued_sde(
            up,
            down,
            InitialLaw::Point { value: -0.5 },
            1.0,
            dt,
            1,
            1,
        )
        .unwrap();
        let k_hit = (0.5 / dt).round() as usize;
        assert!((ens.state(0, k_hit) - 0.0).abs() < 1e-12);
        for k in k_hit..=ens.n_steps {
            assert!(
                ens.state(0, k).abs() <= dt + 1e-12,
                "escaped the threshold band at step {k}: {}",
                ens.state(0, k)
            );
        }
        // exact ODE oracle before the switch: X_t = -0.5 + t
        for k in 0..k_hit {
            let t = k as f64 * dt;
            assert!((ens.state(0, k) - (-0.5 + t)).abs() < 1e-12);
        }
    }

    #[test]
    fn glued_left_right_equal_matches_single_process_law() {
        let t = LevyTriplet::stable(1.5).unwrap();
        let n = 10_000;
        let glued = simulate_glued_sde(
            t.clone(),
            t.clone(),
            InitialLaw::Point { value: 0.0 },
            0.5,
            0.01,
            n,
            8,
        )
        .unwrap();
        let single = LevySim {
            sampler: LevyIncrementSampler::new(t, 1e-3, true).unwrap(),
            config: SimConfig {
                t_end: 0.5,
                dt: 0.01,
                n_paths: n,
                seed: 9,
                x0: InitialLaw::Point { value: 0.0 },
            },
        }
        .run()
        .unwrap();
        let d = ks_two_sample(&glued.terminal_values(), &single.terminal_values());
        assert!(d <= 0.02, "KS distance {d}");
    }

    #[test]
    fn glued_locality_under_driver_seed_change() {
        let left = LevyTriplet::stable(1.2).unwrap();
        let right = LevyTriplet::stable(1.8).unwrap();
        let config = SimConfig {
            t_end: 0.25,
            dt: 0.005,
            n_paths: 2_000,
            seed: 31,
            x0: InitialLaw::Point { value: -1.5 },
        };
        let base = GluedSim::new(left.clone(), right.clone(), config, 1e-3, true).unwrap();
        let mut reseeded = GluedSim::new(left, right, config, 1e-3, true).unwrap();
        reseeded.right_seed = 0xDEAD_BEEF;
        let a = base.run().unwrap();
        let b = reseeded.run().unwrap();
        let mut checked = 0;
        for p in 0..config.n_paths {
            let pa = a.path(p);
            if pa.iter().all(|&x| x <= 0.0) {
                checked += 1;
                let pb = b.path(p);
                for (u, v) in pa.iter().zip(pb) {
                    assert_eq!(u.to_bits(), v.to_bits(), "path {p} diverged");
                }
            }
        }
        assert!(checked > 100, "too few non-crossing paths ({checked}) for the check");
    }

    #[test]
    fn stable_like_constant_alpha_terminal_cf() {
        let alpha = AlphaFn::Piecewise(crate::stability::StabilityIndexFn::constant(1.5).unwrap());
        let t_end = 0.5;
        let ens = simulate_stable_like(
            alpha,
            InitialLaw::Point { value: 0.0 },
            t_end,
            0.01,
            100_000,
            55,
        )
        .unwrap();
        let xt = ens.terminal_values();
        for &xi in &[0.5, 1.0, 2.0] {
            let cf = empirical_cf(&xt, xi);
            let target = (-t_end * xi.abs().powf(1.5)).exp();
            let err = ((cf.re - target).powi(2) + cf.im.powi(2)).sqrt();
            assert!(err <= 0.01, "xi = {xi}: err = {err}");
        }
    }

    #[test]
    fn stable_like_alpha_near_two_brownian_scaling() {
        // alpha = 2 is outside (0,2) for the index function; 1.999 is close
        // enough that Var(X_T) ~ 2T within Monte Carlo error.
        let alpha = AlphaFn::Piecewise(crate::stability::StabilityIndexFn::constant(1.999).unwrap());
        let t_end = 1.0;
        let n = 50_000;
        let ens = simulate_stable_like(
            alpha,
            InitialLaw::Point { value: 0.0 },
            t_end,
            0.02,
            n,
            13,
        )
        .unwrap();
        let xt = ens.terminal_values();
        let mean = xt.iter().sum::<f64>() / n as f64;
        let var = xt.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
        let sigma = 2.0 * t_end * (2.0 / n as f64).sqrt();
        assert!((var - 2.0 * t_end).abs() < 6.0 * sigma, "var = {var}");
    }

    #[test]
    fn increment_batch_means_stationarity() {
        // finite-variance triplet: BM + compound Poisson
        let t = LevyTriplet::new(
            0.5,
            1.0,
            JumpMeasure::CompoundPoisson {
                rate: 1.0,
                jumps: JumpDist::Normal {
                    mean: 0.0,
                    std_dev: 0.5,
                },
            },
        )
        .unwrap();
        let s = LevyIncrementSampler::new(t, 1e-3, false).unwrap();
        let dt = 0.05;
        let n_steps = 200;
        let n_paths = 200;
        let incs = simulate_levy_increments(&s, dt, n_steps, n_paths, 17).unwrap();
        // 10 disjoint time windows; each batch mean within 3 sigma of the
        // theoretical mean dt * b (compound part has mean 0)
        let batches = 10;
        let per = n_steps / batches;
        let step_var = dt * (1.0 + 1.0 * 0.25); // a dt + rate dt E[J^2]
        for b in 0..batches {
            let mut sum = 0.0;
            let mut cnt = 0usize;
            for p in 0..n_paths {
                for k in (b * per)..((b + 1) * per) {
                    sum += incs[p * n_steps + k];
                    cnt += 1;
                }
            }
            let mean = sum / cnt as f64;
            let sd = (step_var / cnt as f64).sqrt();
            assert!(
                (mean - 0.5 * dt).abs() < 3.5 * sd,
                "batch {b}: mean {mean} vs {}",
                0.5 * dt
            );
        }
    }

    #[test]
    fn dump_round_trip() {
        let t = LevyTriplet::brownian(1.0);
        let ens = LevySim {
            sampler: LevyIncrementSampler::new(t, 1e-3, false).unwrap(),
            config: SimConfig {
                t_end: 0.2,
                dt: 0.02,
                n_paths: 17,
                seed: 2,
                x0: InitialLaw::Point { value: 0.3 },
            },
        }
        .run()
        .unwrap();
        let mut buf = Vec::new();
        ens.write_binary(&mut buf).unwrap();
        let back = PathEnsemble::read_binary(&buf[..]).unwrap();
        assert_eq!(back.n_paths, ens.n_paths);
        assert_eq!(back.n_steps, ens.n_steps);
        assert_eq!(back.seed, ens.seed);
        for (a, b) in ens.states.iter().zip(&back.states) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
