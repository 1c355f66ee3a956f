//! Experiment execution: validates the configuration, runs the scenario,
//! and writes all artifacts atomically into the output directory. Artifacts
//! are staged inside the output directory and promoted only on success, so
//! failed runs leave no partial outputs behind.

use crate::config::{ExperimentConfig, MetaConfig, Scenario, SimulationConfig};
use anyhow::{bail, Context, Result};
use levytype::approx::{select_schedule, ApproximationSchedule, ExceptionalSets};
use levytype::diag::{
    check_exceptional_sets, check_symbol_conditions, exit_probability_check, hartman_wintner,
    martingale_defect_batch, transition_density_bound, ConditionReport, MartingaleItem,
    MartingaleTestReport, WeightFn,
};
use levytype::operators::GeneratorSpec;
use levytype::sim::{GluedSim, LevyIncrementSampler, LevySim, PathEnsemble, StableLikeSim};
use levytype::symbol::{AlphaFn, SymbolFn};
use levytype::{JumpMeasure, LevyTriplet, SimConfig, TestFn};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub check_only: bool,
}

#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub condition_failures: usize,
}

struct Stage {
    dir: PathBuf,
    names: Vec<String>,
}

impl Stage {
    fn new(out_dir: &Path) -> Result<Self> {
        let dir = out_dir.join(".staging");
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        Ok(Stage {
            dir,
            names: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)
            .with_context(|| format!("writing artifact {name}"))?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn commit(self, out_dir: &Path) -> Result<Vec<String>> {
        for name in &self.names {
            fs::rename(self.dir.join(name), out_dir.join(name))
                .with_context(|| format!("promoting artifact {name}"))?;
        }
        fs::remove_dir_all(&self.dir)?;
        Ok(self.names)
    }

    fn abort(self) {
        let _ = fs::remove_dir_all(&self.dir);
    }
}

fn conditions_csv(reports: &[ConditionReport]) -> String {
    let mut s = String::from("condition,grid,worst,threshold,verdict\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},\"{}\",{},{},{}",
            r.condition, r.grid, r.worst, r.threshold, r.verdict
        );
    }
    s
}

fn martingale_csv(reports: &[MartingaleTestReport]) -> String {
    let mut s = String::from("test_fn,weights,t_start,t_end,defect,std_err,z,n_paths\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.test_fn,
            r.weights.join("+"),
            r.times[r.times.len() - 2],
            r.times[r.times.len() - 1],
            r.defect,
            r.std_err,
            r.z,
            r.n_paths
        );
    }
    s
}

fn schedule_csv(schedule: &ApproximationSchedule) -> String {
    let mut s = String::from("n,k,sup_error,inf_alpha_n,sup_alpha_n\n");
    for e in &schedule.entries {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            e.n, e.k, e.sup_error, e.inf_alpha_n, e.sup_alpha_n
        );
    }
    s
}

pub fn u_sets_csv(sets: &ExceptionalSets) -> String {
    let mut s = String::from("m,j,left,right\n");
    for m in 1..=sets.m_max() {
        for (j, (l, r)) in sets.intervals_at(m).iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{}", m, j + 1, l, r);
        }
    }
    s
}

fn standard_x_grid() -> Vec<f64> {
    (-40..=40).map(|i| i as f64 * 0.25).collect()
}

fn standard_xi_grid() -> Vec<f64> {
    (-100..=100).map(|i| i as f64 * 0.5).collect()
}

/// Weight/window times for the martingale test, snapped to the step grid.
fn martingale_times(sim: &SimulationConfig, requested: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    match requested {
        Some(times) => Ok(times.clone()),
        None => {
            let snap = |t: f64| (t / sim.dt).round() * sim.dt;
            let t1 = snap(0.4 * sim.t_end);
            let t2 = snap(0.7 * sim.t_end);
            if t2 <= t1 {
                bail!("simulation grid too coarse for the default martingale window");
            }
            Ok(vec![t1, t2])
        }
    }
}

fn martingale_items(spec: &GeneratorSpec, times: &[f64]) -> Vec<MartingaleItem> {
    let weights = [
        WeightFn::bump("w_bump", 0.0, 2.0),
        WeightFn::inverse_quadratic("w_invq"),
    ];
    let mut items = Vec::new();
    for f in TestFn::canonical_library() {
        for w in &weights {
            items.push(MartingaleItem {
                spec: spec.clone(),
                f: f.clone(),
                weights: vec![w.clone()],
                times: times.to_vec(),
            });
        }
    }
    items
}

fn core_sim_config(sim: &SimulationConfig) -> SimConfig {
    SimConfig {
        t_end: sim.t_end,
        dt: sim.dt,
        n_paths: sim.n_paths,
        seed: sim.seed,
        x0: sim.x0,
    }
}

fn dump_ensemble(stage: &mut Stage, sim: &SimulationConfig, ens: &PathEnsemble) -> Result<()> {
    let mut bin = Vec::new();
    ens.write_binary(&mut bin)?;
    stage.write("ensemble.bin", &bin)?;
    if sim.write_csv {
        let mut csv = Vec::new();
        ens.write_csv(&mut csv)?;
        stage.write("ensemble.csv", &csv)?;
    }
    Ok(())
}

fn exact_mode(left: &LevyTriplet, right: &LevyTriplet) -> bool {
    let ok = |t: &LevyTriplet| matches!(t.jumps, JumpMeasure::Stable { .. } | JumpMeasure::None);
    ok(left) && ok(right)
}

/// Runs one experiment: validate, simulate, diagnose, write artifacts.
/// Idempotent for a fixed seed; thread count never changes any output.
pub fn run_experiment(
    mut config: ExperimentConfig,
    overrides: &RunOverrides,
) -> Result<RunSummary> {
    if let Some(seed) = overrides.seed {
        if let Some(sim) = config.simulation.as_mut() {
            sim.seed = seed;
        }
    }
    config.validate()?;
    let out_dir = overrides
        .out
        .clone()
        .unwrap_or_else(|| config.output_dir.clone());
    if overrides.check_only {
        return Ok(RunSummary {
            out_dir,
            artifacts: Vec::new(),
            condition_failures: 0,
        });
    }
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let mut stage = Stage::new(&out_dir)?;
    match execute(&config, &mut stage) {
        Ok(condition_failures) => {
            // manifest: the resolved configuration plus tool metadata
            let mut manifest = config.clone();
            manifest.meta = Some(MetaConfig {
                tool: "levytype".into(),
                version: env!("CARGO_PKG_VERSION").into(),
            });
            let text = toml::to_string_pretty(&manifest)?;
            stage.write("manifest.toml", text.as_bytes())?;
            let artifacts = stage.commit(&out_dir)?;
            Ok(RunSummary {
                out_dir,
                artifacts,
                condition_failures,
            })
        }
        Err(e) => {
            stage.abort();
            Err(e)
        }
    }
}

fn execute(config: &ExperimentConfig, stage: &mut Stage) -> Result<usize> {
    let mut conditions: Vec<ConditionReport> = Vec::new();
    let diag = &config.diagnostics;

    match config.scenario {
        Scenario::Glued => {
            let g = config.glued.as_ref().expect("validated");
            let left = g.left.to_triplet()?;
            let right = g.right.to_triplet()?;
            let sim = config.simulation.as_ref().expect("validated");
            let gsim = GluedSim::new(
                left.clone(),
                right.clone(),
                core_sim_config(sim),
                sim.eps_jump,
                exact_mode(&left, &right),
            )?;
            let ensemble = gsim.run()?;
            dump_ensemble(stage, sim, &ensemble)?;

            if diag.symbol_conditions {
                let symbols: Vec<SymbolFn> = (1..=diag.n_approx)
                    .map(|n| SymbolFn::glued_approx(left.clone(), right.clone(), n))
                    .collect::<levytype::Result<_>>()?;
                conditions.extend(check_symbol_conditions(
                    &symbols,
                    &standard_xi_grid(),
                    &standard_x_grid(),
                )?);
            }
            if diag.hartman_wintner {
                for (side, t) in [("left", &left), ("right", &right)] {
                    let sym = SymbolFn::from_triplet(t.clone())?;
                    let mut rep = hartman_wintner(&sym, 1e8, 16)?;
                    rep.grid = format!("{side} driver, {}", rep.grid);
                    conditions.push(rep);
                }
            }
            if diag.density_bound {
                let symbols: Vec<SymbolFn> = (1..=diag.n_approx)
                    .map(|n| SymbolFn::glued_approx(left.clone(), right.clone(), n))
                    .collect::<levytype::Result<_>>()?;
                let rep =
                    transition_density_bound(&symbols, &standard_x_grid(), diag.density_time)?;
                stage.write(
                    "density.csv",
                    format!(
                        "bound,gamma,envelope_c,xi_cut,tail\n{},{},{},{},{}\n",
                        rep.bound, rep.gamma, rep.envelope_c, rep.xi_cut, rep.tail
                    )
                    .as_bytes(),
                )?;
            }
            if diag.martingale {
                let times = martingale_times(sim, &diag.martingale_times)?;
                let spec = GeneratorSpec::Glued { left, right };
                let reports = martingale_defect_batch(&ensemble, &martingale_items(&spec, &times))?;
                stage.write("martingale.csv", martingale_csv(&reports).as_bytes())?;
            }
        }
        Scenario::StableLike => {
            let alpha = config.stability_index()?.expect("validated");
            let sim = config.simulation.as_ref().expect("validated");
            let sched_cfg = config.stable_like.as_ref().unwrap().schedule;
            let (eps, n_max) = match sched_cfg {
                Some(s) => {
                    let (lo, hi) = alpha.range();
                    (s.eps.unwrap_or(0.5 * (2.0 - hi).min(lo)), s.n_max)
                }
                None => {
                    let (lo, hi) = alpha.range();
                    (0.5 * (2.0 - hi).min(lo), 10)
                }
            };
            let schedule = select_schedule(&alpha, eps, n_max)?;
            schedule.certify()?;
            stage.write("schedule.csv", schedule_csv(&schedule).as_bytes())?;
            stage.write("u_sets.csv", u_sets_csv(&schedule.sets).as_bytes())?;
            conditions.push(check_exceptional_sets(&schedule.sets));

            let ssim = StableLikeSim {
                alpha: AlphaFn::Piecewise(alpha.clone()),
                config: core_sim_config(sim),
            };
            let ensemble = ssim.run()?;
            dump_ensemble(stage, sim, &ensemble)?;

            let symbols: Vec<SymbolFn> = schedule
                .entries
                .iter()
                .take(diag.n_approx as usize)
                .map(|e| SymbolFn::stable_like_smooth(e.alpha_n.clone()))
                .collect();
            if diag.symbol_conditions {
                conditions.extend(check_symbol_conditions(
                    &symbols,
                    &standard_xi_grid(),
                    &standard_x_grid(),
                )?);
            }
            if diag.density_bound {
                let rep =
                    transition_density_bound(&symbols, &standard_x_grid(), diag.density_time)?;
                stage.write(
                    "density.csv",
                    format!(
                        "bound,gamma,envelope_c,xi_cut,tail\n{},{},{},{},{}\n",
                        rep.bound, rep.gamma, rep.envelope_c, rep.xi_cut, rep.tail
                    )
                    .as_bytes(),
                )?;
            }
            if diag.martingale {
                let times = martingale_times(sim, &diag.martingale_times)?;
                let spec = GeneratorSpec::StableLike(alpha);
                let reports = martingale_defect_batch(&ensemble, &martingale_items(&spec, &times))?;
                stage.write("martingale.csv", martingale_csv(&reports).as_bytes())?;
            }
        }
        Scenario::DiagnosticsOnly => {
            if let Some(tc) = &config.levy {
                let t = tc.to_triplet()?;
                let sym = SymbolFn::from_triplet(t.clone())?;
                if diag.hartman_wintner {
                    conditions.push(hartman_wintner(&sym, 1e8, 16)?);
                }
                if diag.density_bound {
                    let rep = transition_density_bound(
                        std::slice::from_ref(&sym),
                        &[0.0],
                        diag.density_time,
                    )?;
                    stage.write(
                        "density.csv",
                        format!(
                            "bound,gamma,envelope_c,xi_cut,tail\n{},{},{},{},{}\n",
                            rep.bound, rep.gamma, rep.envelope_c, rep.xi_cut, rep.tail
                        )
                        .as_bytes(),
                    )?;
                }
                if let Some(exit) = diag.exit_check {
                    let sim = config.simulation.as_ref().expect("validated");
                    let ens = LevySim {
                        sampler: LevyIncrementSampler::new(
                            t.clone(),
                            sim.eps_jump,
                            matches!(t.jumps, JumpMeasure::Stable { .. }),
                        )?,
                        config: core_sim_config(sim),
                    }
                    .run()?;
                    let rep = exit_probability_check(&ens, &sym, exit.k_prime, exit.t)?;
                    stage.write(
                        "exit.csv",
                        format!(
                            "frequency,std_err,bound,margin,verdict\n{},{},{},{},{}\n",
                            rep.frequency, rep.std_err, rep.bound, rep.margin, rep.verdict
                        )
                        .as_bytes(),
                    )?;
                }
            }
            if let Some(alpha) = config.stability_index()? {
                let sym = SymbolFn::stable_like(alpha)?;
                if diag.symbol_conditions {
                    conditions.extend(check_symbol_conditions(
                        std::slice::from_ref(&sym),
                        &standard_xi_grid(),
                        &standard_x_grid(),
                    )?);
                }
                if diag.density_bound && config.levy.is_none() {
                    let rep = transition_density_bound(
                        std::slice::from_ref(&sym),
                        &standard_x_grid(),
                        diag.density_time,
                    )?;
                    stage.write(
                        "density.csv",
                        format!(
                            "bound,gamma,envelope_c,xi_cut,tail\n{},{},{},{},{}\n",
                            rep.bound, rep.gamma, rep.envelope_c, rep.xi_cut, rep.tail
                        )
                        .as_bytes(),
                    )?;
                }
            }
        }
    }

    let failures = conditions
        .iter()
        .filter(|c| c.verdict == levytype::diag::Verdict::Fail)
        .count();
    if !conditions.is_empty() {
        stage.write("conditions.csv", conditions_csv(&conditions).as_bytes())?;
    }
    Ok(failures)
}
