//! Experiment configuration: a single TOML file with a hard schema.
//! Unknown keys are errors — silent typos corrupt scientific runs.

use anyhow::{bail, Context, Result};
use levytype::sim::InitialLaw;
use levytype::{stable_normalizer, JumpDist, JumpMeasure, LevyTriplet, StabilityIndexFn};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Glued,
    StableLike,
    DiagnosticsOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// All artifacts land here; nothing is written outside it.
    pub output_dir: PathBuf,
    #[serde(default)]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub glued: Option<GluedConfig>,
    #[serde(default)]
    pub stable_like: Option<StableLikeConfig>,
    /// Single-triplet symbol source for diagnostics-only runs.
    #[serde(default)]
    pub levy: Option<TripletConfig>,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    /// Written by the runner into manifests; ignored on input.
    #[serde(default)]
    pub meta: Option<MetaConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaConfig {
    pub tool: String,
    pub version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_end: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    #[serde(default = "default_eps_jump")]
    pub eps_jump: f64,
    /// Long-format CSV dump alongside the binary dump.
    #[serde(default = "default_true")]
    pub write_csv: bool,
    #[serde(default = "default_x0")]
    pub x0: InitialLaw,
}

fn default_eps_jump() -> f64 {
    1e-3
}

fn default_x0() -> InitialLaw {
    InitialLaw::Point { value: 0.0 }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluedConfig {
    pub left: TripletConfig,
    pub right: TripletConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableLikeConfig {
    /// Strictly increasing jump locations of the index function.
    pub breakpoints: Vec<f64>,
    /// Branch values, one more than breakpoints.
    pub values: Vec<f64>,
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Margin for the (S2) bounds; defaults to half the available room.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
}

fn default_n_max() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletConfig {
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub diffusion: f64,
    #[serde(default)]
    pub jumps: Option<JumpsConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpsConfig {
    None,
    /// scale omitted means the normalization with symbol |xi|^alpha.
    Stable { alpha: f64, scale: Option<f64> },
    TemperedStable { alpha: f64, lambda: f64, scale: f64 },
    CompoundPoisson { rate: f64, jumps: JumpDist },
    Table { atoms: Vec<(f64, f64)> },
}

impl TripletConfig {
    pub fn to_triplet(&self) -> Result<LevyTriplet> {
        let jumps = match &self.jumps {
            None | Some(JumpsConfig::None) => JumpMeasure::None,
            Some(JumpsConfig::Stable { alpha, scale }) => JumpMeasure::Stable {
                alpha: *alpha,
                scale: match scale {
                    Some(s) => *s,
                    None => stable_normalizer(*alpha)?,
                },
            },
            Some(JumpsConfig::TemperedStable {
                alpha,
                lambda,
                scale,
            }) => JumpMeasure::TemperedStable {
                alpha: *alpha,
                lambda: *lambda,
                scale: *scale,
            },
            Some(JumpsConfig::CompoundPoisson { rate, jumps }) => JumpMeasure::CompoundPoisson {
                rate: *rate,
                jumps: jumps.clone(),
            },
            Some(JumpsConfig::Table { atoms }) => JumpMeasure::Table {
                atoms: atoms.clone(),
            },
        };
        Ok(LevyTriplet::new(self.drift, self.diffusion, jumps)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "default_true")]
    pub symbol_conditions: bool,
    #[serde(default = "default_true")]
    pub hartman_wintner: bool,
    #[serde(default = "default_true")]
    pub density_bound: bool,
    #[serde(default = "default_true")]
    pub martingale: bool,
    /// Length of the approximating-symbol prefix checked by (A1)-(A4).
    #[serde(default = "default_n_approx")]
    pub n_approx: u32,
    #[serde(default = "default_density_time")]
    pub density_time: f64,
    /// Weight and window times for the martingale test; defaults to
    /// grid-snapped 0.4 T and 0.7 T.
    #[serde(default)]
    pub martingale_times: Option<Vec<f64>>,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    /// Exit-probability check (diagnostics-only scenario with a triplet):
    /// threshold K' and horizon t.
    #[serde(default)]
    pub exit_check: Option<ExitCheckConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExitCheckConfig {
    pub k_prime: f64,
    pub t: f64,
}

fn default_n_approx() -> u32 {
    8
}

fn default_density_time() -> f64 {
    1.0
}

fn default_z_max() -> f64 {
    3.0
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            symbol_conditions: true,
            hartman_wintner: true,
            density_bound: true,
            martingale: true,
            n_approx: default_n_approx(),
            density_time: default_density_time(),
            martingale_times: None,
            z_max: default_z_max(),
            exit_check: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
        Ok(cfg)
    }

    pub fn stability_index(&self) -> Result<Option<StabilityIndexFn>> {
        match &self.stable_like {
            None => Ok(None),
            Some(s) => {
                let alpha = StabilityIndexFn::steps(s.breakpoints.clone(), s.values.clone())?;
                Ok(Some(alpha))
            }
        }
    }

    /// First failing invariant, if any; referenced specs validate fully
    /// before any simulation starts.
    pub fn validate(&self) -> Result<()> {
        match self.scenario {
            Scenario::Glued => {
                let g = self
                    .glued
                    .as_ref()
                    .context("scenario = glued needs a [glued] section")?;
                g.left.to_triplet().context("invalid [glued.left]")?;
                g.right.to_triplet().context("invalid [glued.right]")?;
                self.require_simulation()?;
            }
            Scenario::StableLike => {
                let s = self
                    .stable_like
                    .as_ref()
                    .context("scenario = stable_like needs a [stable_like] section")?;
                StabilityIndexFn::steps(s.breakpoints.clone(), s.values.clone())
                    .context("invalid [stable_like]")?;
                self.require_simulation()?;
            }
            Scenario::DiagnosticsOnly => {
                if self.levy.is_none() && self.stable_like.is_none() {
                    bail!("scenario = diagnostics_only needs a [levy] triplet or a [stable_like] index");
                }
                if let Some(t) = &self.levy {
                    t.to_triplet().context("invalid [levy]")?;
                }
                if let Some(s) = &self.stable_like {
                    StabilityIndexFn::steps(s.breakpoints.clone(), s.values.clone())
                        .context("invalid [stable_like]")?;
                }
                if self.diagnostics.exit_check.is_some() {
                    self.require_simulation()
                        .context("exit_check needs a [simulation] section")?;
                }
            }
        }
        if let Some(sim) = &self.simulation {
            let core = levytype::SimConfig {
                t_end: sim.t_end,
                dt: sim.dt,
                n_paths: sim.n_paths,
                seed: sim.seed,
                x0: sim.x0,
            };
            core.validate().context("invalid [simulation]")?;
            if !(sim.eps_jump > 0.0) {
                bail!("invalid [simulation]: eps_jump must be positive");
            }
        }
        if let Some(times) = &self.diagnostics.martingale_times {
            if times.len() < 2 {
                bail!("diagnostics.martingale_times needs at least two entries");
            }
        }
        Ok(())
    }

    fn require_simulation(&self) -> Result<()> {
        if self.simulation.is_none() {
            bail!("this scenario needs a [simulation] section");
        }
        Ok(())
    }
}
