//! Data tables for the five standard figures.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kickwell_core::{
    basis_state, default_spectrum, entanglement_series, run_trajectory, BoxBasis,
    EntanglementSeries, EvolveOptions, Trajectory,
};

use crate::config::{ExperimentConfig, PotentialConfig};
use crate::csv::{Cell, Table};
use crate::error::HarnessError;
use crate::run::build_kick;

pub const DEFAULT_STEPS: usize = 50;

/// Smallest basis for which the default runs keep direct and recursed
/// energies within the default `cross_tol`.
pub fn default_n_max(id: u32) -> usize {
    match id {
        1 => 1024,
        2 => 512,
        _ => 768,
    }
}
pub const FIG1_K: [f64; 2] = [4.0, 10.0];
pub const FIG1_KICKS: [usize; 4] = [1, 2, 5, 10];
pub const FIG2_K: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG345_R: [f64; 3] = [PI / 4.0, PI / 2.0, PI];
const FIG12_ALPHA: f64 = 1.0;
const FIG345_K: f64 = 1.0;

/// Overrides for the built-in parameter sets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOptions {
    pub n_max: Option<usize>,
    pub steps: Option<usize>,
    /// Replaces the `k` list (figures 1, 2) or the `r` list (figures 3 to 5).
    pub values: Option<Vec<f64>>,
    /// Kick counts sampled by figure 1.
    pub kicks: Option<Vec<usize>>,
}

fn simulate(cfg: &ExperimentConfig) -> Result<(Trajectory, EntanglementSeries), HarnessError> {
    cfg.validate()?;
    let basis = BoxBasis::new(cfg.n_max, cfg.hbar)?;
    let u = build_kick(&basis, cfg)?;
    let z = kickwell_core::transition_matrix(&u, cfg.tolerances.leak_fail)?;
    let spec = default_spectrum(&basis, &cfg.potential.to_potential())?;
    let opts = EvolveOptions {
        leak_fail: cfg.tolerances.leak_fail,
        cross_tol: cfg.tolerances.cross_tol,
    };
    let p0 = basis_state(cfg.n_max, cfg.initial_level)?;
    let traj = run_trajectory(&z, &basis, Some(&spec), &p0, cfg.n_steps, &opts)?;
    let series = entanglement_series(&traj)?;
    Ok((traj, series))
}

fn shifted(k: f64, n_max: usize, steps: usize) -> ExperimentConfig {
    let pot = PotentialConfig::CosShifted {
        k_over_hbar: k,
        alpha: FIG12_ALPHA,
    };
    ExperimentConfig::new(format!("k{k}"), pot, n_max, steps)
}

fn ratio(r: f64, n_max: usize, steps: usize) -> ExperimentConfig {
    let pot = PotentialConfig::CosRatio {
        k_over_hbar: FIG345_K,
        r,
    };
    ExperimentConfig::new(format!("r{r}"), pot, n_max, steps)
}

fn series_table<F>(
    label: &str,
    keys: &[f64],
    runs: &[(Trajectory, EntanglementSeries)],
    first: usize,
    f: F,
) -> Table
where
    F: Fn(&(Trajectory, EntanglementSeries), usize) -> f64,
{
    let mut header = vec!["N".to_string()];
    header.extend(keys.iter().map(|v| format!("{label}{v}")));
    let mut t = Table::new(header);
    let steps = runs.first().map_or(0, |r| r.0.steps());
    for n in first..=steps {
        let mut row: Vec<Cell> = vec![n.into()];
        row.extend(runs.iter().map(|r| Cell::from(f(r, n))));
        t.push(row);
    }
    t
}

/// Builds the tables for figure `id` as `(file name, table)` pairs.
pub fn figure_tables(id: u32, opts: &FigureOptions) -> Result<Vec<(String, Table)>, HarnessError> {
    let n_max = opts.n_max.unwrap_or_else(|| default_n_max(id));
    let steps = opts.steps.unwrap_or(DEFAULT_STEPS);
    match id {
        1 => {
            let ks = opts.values.clone().unwrap_or_else(|| FIG1_K.to_vec());
            let kicks = opts.kicks.clone().unwrap_or_else(|| FIG1_KICKS.to_vec());
            let last = kicks.iter().copied().max().unwrap_or(1).max(1);
            if let Some(&bad) = kicks.iter().find(|&&n| n == 0) {
                return Err(HarnessError::Invalid {
                    field: "kicks".to_string(),
                    reason: format!("kick counts start at 1, got {bad}"),
                });
            }
            let mut out = Vec::new();
            for &k in &ks {
                let (traj, _) = simulate(&shifted(k, n_max, last))?;
                let mut header = vec!["n".to_string()];
                header.extend(kicks.iter().map(|n| format!("P_n(N={n})")));
                let mut t = Table::new(header);
                for level in 0..n_max {
                    let mut row: Vec<Cell> = vec![(level + 1).into()];
                    row.extend(
                        kicks
                            .iter()
                            .map(|&n| Cell::from(traj.populations[n][level])),
                    );
                    t.push(row);
                }
                out.push((format!("fig1_k{k}.csv"), t));
            }
            Ok(out)
        }
        2 => {
            let ks = opts.values.clone().unwrap_or_else(|| FIG2_K.to_vec());
            let runs = ks
                .iter()
                .map(|&k| simulate(&shifted(k, n_max, steps)))
                .collect::<Result<Vec<_>, _>>()?;
            let t = series_table("P_1_k", &ks, &runs, 0, |r, n| r.0.populations[n][0]);
            Ok(vec![("fig2.csv".to_string(), t)])
        }
        3..=5 => {
            let rs = opts.values.clone().unwrap_or_else(|| FIG345_R.to_vec());
            let runs = rs
                .iter()
                .map(|&r| simulate(&ratio(r, n_max, steps)))
                .collect::<Result<Vec<_>, _>>()?;
            let t = match id {
                3 => series_table("P_1_r", &rs, &runs, 0, |r, n| r.0.populations[n][0]),
                4 => series_table("S_V_r", &rs, &runs, 0, |r, n| r.1.s_v[n]),
                _ => series_table("E_r_r", &rs, &runs, 1, |r, n| r.1.partial(n)),
            };
            Ok(vec![(format!("fig{id}.csv"), t)])
        }
        other => Err(HarnessError::UnknownFigure(other)),
    }
}

/// Writes the figure tables into `dir` and returns their paths.
pub fn emit_figure(
    id: u32,
    opts: &FigureOptions,
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    let tables = figure_tables(id, opts)?;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut paths = Vec::new();
    for (name, t) in tables {
        let p = dir.join(name);
        t.write(&p)?;
        paths.push(p);
    }
    Ok(paths)
}
