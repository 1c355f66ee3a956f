//! Tidy plot-ready CSVs derived from a completed run's artifacts.
//! Plotting itself stays out of process; these files feed any stack.

use crate::config::{ExperimentConfig, Scenario};
use anyhow::{bail, Context, Result};
use levytype::approx::select_schedule;
use levytype::sim::PathEnsemble;
use levytype::symbol::SymbolFn;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Derives plot CSVs next to the artifacts in `dir`:
/// histograms per time slice, alpha_n overlays, U_m interval tables,
/// symbol-ratio shells, and martingale z-scores. Returns the file names.
pub fn emit_plot_data(dir: &Path) -> Result<Vec<String>> {
    let manifest_path = dir.join("manifest.toml");
    if !manifest_path.exists() {
        bail!(
            "no manifest.toml in {}; not a completed run directory",
            dir.display()
        );
    }
    let config = ExperimentConfig::load(&manifest_path)?;
    let mut written = Vec::new();

    // marginal histograms from the binary ensemble dump
    let bin_path = dir.join("ensemble.bin");
    if bin_path.exists() {
        let bytes = fs::read(&bin_path)?;
        let ens = PathEnsemble::read_binary(&bytes[..]).context("reading ensemble.bin")?;
        let mut csv = String::from("t,bin_left,bin_right,count\n");
        let slices = [0, ens.n_steps / 4, ens.n_steps / 2, 3 * ens.n_steps / 4, ens.n_steps];
        for &k in &slices {
            let values: Vec<f64> = (0..ens.n_paths).map(|p| ens.state(p, k)).collect();
            let t = k as f64 * ens.dt;
            let (lo, hi) = robust_range(&values);
            let bins = 64usize;
            let width = (hi - lo).max(1e-300) / bins as f64;
            let mut counts = vec![0usize; bins];
            for &v in &values {
                if v >= lo && v <= hi {
                    let b = (((v - lo) / width) as usize).min(bins - 1);
                    counts[b] += 1;
                }
            }
            for (b, c) in counts.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    t,
                    lo + b as f64 * width,
                    lo + (b + 1) as f64 * width,
                    c
                );
            }
        }
        fs::write(dir.join("plot_histograms.csv"), csv)?;
        written.push("plot_histograms.csv".into());
    }

    // stable-like: alpha_n overlays per n, rebuilt from the manifest
    if config.scenario == Scenario::StableLike {
        let alpha = config.stability_index()?.expect("stable_like manifest");
        let sched = config.stable_like.as_ref().unwrap().schedule;
        let (lo_a, hi_a) = alpha.range();
        let (eps, n_max) = match sched {
            Some(s) => (s.eps.unwrap_or(0.5 * (2.0 - hi_a).min(lo_a)), s.n_max),
            None => (0.5 * (2.0 - hi_a).min(lo_a), 10),
        };
        let schedule = select_schedule(&alpha, eps, n_max)?;
        let bp = &alpha.breakpoints;
        let (lo, hi) = if bp.is_empty() {
            (-2.0, 2.0)
        } else {
            (bp[0] - 2.0, bp[bp.len() - 1] + 2.0)
        };
        let mut csv = String::from("n,x,alpha_n\n");
        let steps = ((hi - lo) * 128.0) as usize;
        for e in &schedule.entries {
            for i in 0..=steps {
                let x = lo + (hi - lo) * i as f64 / steps as f64;
                let _ = writeln!(csv, "{},{},{}", e.n, x, e.alpha_n.eval(x));
            }
        }
        fs::write(dir.join("plot_alpha_n.csv"), csv)?;
        written.push("plot_alpha_n.csv".into());

        let mut ucsv = String::from("m,j,left,right\n");
        for m in 1..=schedule.sets.m_max() {
            for (j, (l, r)) in schedule.sets.intervals_at(m).iter().enumerate() {
                let _ = writeln!(ucsv, "{},{},{},{}", m, j + 1, l, r);
            }
        }
        fs::write(dir.join("plot_u_intervals.csv"), ucsv)?;
        written.push("plot_u_intervals.csv".into());
    }

    // symbol-ratio shells: Re q / log(1+xi) per approximation index
    if config.scenario == Scenario::Glued {
        let g = config.glued.as_ref().expect("glued manifest");
        let left = g.left.to_triplet()?;
        let right = g.right.to_triplet()?;
        let mut csv = String::from("n,xi,min_ratio\n");
        for n in 1..=config.diagnostics.n_approx {
            let sym = SymbolFn::glued_approx(left.clone(), right.clone(), n)?;
            for k in 0..=12 {
                let xi = 10f64.powf(0.5 * k as f64);
                let mut min_ratio = f64::INFINITY;
                for i in -40..=40 {
                    let x = i as f64 * 0.25;
                    min_ratio = min_ratio.min(sym.eval(x, xi).re / (1.0 + xi).ln());
                }
                let _ = writeln!(csv, "{},{},{}", n, xi, min_ratio);
            }
        }
        fs::write(dir.join("plot_symbol_shells.csv"), csv)?;
        written.push("plot_symbol_shells.csv".into());
    }

    // martingale z-scores in tidy form
    let mg_path = dir.join("martingale.csv");
    if mg_path.exists() {
        let text = fs::read_to_string(&mg_path)?;
        let mut csv = String::from("test_fn,weights,z\n");
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() >= 7 {
                let _ = writeln!(csv, "{},{},{}", cols[0], cols[1], cols[6]);
            }
        }
        fs::write(dir.join("plot_zscores.csv"), csv)?;
        written.push("plot_zscores.csv".into());
    }

    if written.is_empty() {
        bail!("run directory {} has no plottable artifacts", dir.display());
    }
    Ok(written)
}

/// 0.5% .. 99.5% quantile range, padded; heavy-tailed marginals would
/// otherwise stretch the bins over a handful of extreme paths.
fn robust_range(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    let lo = v[(n as f64 * 0.005) as usize];
    let hi = v[((n as f64 * 0.995) as usize).min(n - 1)];
    let pad = 0.05 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}
