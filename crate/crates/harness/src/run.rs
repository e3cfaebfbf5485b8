//! Single runs and parameter sweeps.

use std::path::{Path, PathBuf};
use std::time::Instant;

use kickwell_core::bessel::series_cutoff;
use kickwell_core::evolve::{AsymptoticOptions, CorrectionMethod};
use kickwell_core::kick::certified_band;
use kickwell_core::{
    asymptotic_rate, basis_state, constant_rate_check, default_spectrum, entanglement_series,
    kick_operator_bessel, kick_operator_quadrature, run_dephasing, run_trajectory, BoxBasis,
    DensityMatrix, EntanglementSeries, EvolveOptions, KickOperator, KickPotential, Trajectory,
    TransitionMatrix,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, KickRoute};
use crate::csv::{Cell, Table};
use crate::error::HarnessError;

/// Relative tolerance for flagging a spectrum as constant-rate.
const CONSTANT_RATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KickSummary {
    pub method: String,
    pub dim: usize,
    pub unitarity_defect: f64,
    pub certified_band: usize,
    pub max_certified_leakage: f64,
    pub worst_certified_level: usize,
    pub top_column_leakage: f64,
    pub near_resonances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub steps: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub final_diffusion_rate: f64,
    pub lost_probability: f64,
    /// Largest relative gap between direct and recursed energies.
    pub max_recursion_gap: f64,
    /// Per-step gain when every `c_m` vanishes, otherwise `null`.
    pub constant_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSummary {
    pub final_s_v: f64,
    pub max_e_r: f64,
    pub telescoping_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSummary {
    pub closed_form_rate: f64,
    pub numeric_rate: f64,
    pub geometric_correction: f64,
    pub correction_method: String,
    pub converged: bool,
    pub lost_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingSummary {
    pub cycles: usize,
    pub final_trace: f64,
    pub final_energy: f64,
    pub final_purity: f64,
    pub final_max_off_diagonal: f64,
    pub max_hermiticity_defect: f64,
}

/// Everything a run reports besides its tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config: ExperimentConfig,
    pub wall_time_s: f64,
    pub kick: KickSummary,
    pub trajectory: TrajectorySummary,
    pub entanglement: EntanglementSummary,
    pub asymptotic: Option<AsymptoticSummary>,
    pub dephasing: Option<DephasingSummary>,
    /// File names of the tables written next to the record.
    pub tables: Vec<String>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialises")
    }
}

/// A finished run: its record plus named result tables.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub tables: Vec<(String, Table)>,
}

impl RunOutput {
    pub fn table(&self, suffix: &str) -> Option<&Table> {
        self.tables
            .iter()
            .find(|(n, _)| n.ends_with(suffix))
            .map(|(_, t)| t)
    }

    /// Writes every table and `<name>_record.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        for (name, table) in &self.tables {
            table.write(&dir.join(name))?;
        }
        let path = dir.join(format!("{}_record.json", self.record.config.name));
        std::fs::write(&path, self.record.to_json()).map_err(|e| HarnessError::io(&path, e))?;
        Ok(path)
    }
}

pub fn build_kick(basis: &BoxBasis, cfg: &ExperimentConfig) -> Result<KickOperator, HarnessError> {
    let pot = cfg.potential.to_potential();
    Ok(match cfg.kick_method {
        KickRoute::Quadrature => kick_operator_quadrature(basis, &pot)?,
        KickRoute::Bessel => {
            kick_operator_bessel(basis, &pot, series_cutoff(pot.strength_bound()))?
        }
    })
}

fn kick_summary(u: &KickOperator, z: &TransitionMatrix) -> KickSummary {
    let band = certified_band(z.dim());
    let (worst, leak) = z.max_leakage(band);
    KickSummary {
        method: format!("{:?}", u.method()),
        dim: u.dim(),
        unitarity_defect: u.unitarity_defect(),
        certified_band: band,
        max_certified_leakage: leak,
        worst_certified_level: worst + 1,
        top_column_leakage: z.column_leakage()[z.dim() - 1],
        near_resonances: u.near_resonances().len(),
    }
}

fn trajectory_table(traj: &Trajectory, n_show: usize) -> Table {
    let n_show = n_show.min(traj.populations[0].len());
    let mut header: Vec<String> = ["N", "E_N", "D_N", "total_prob"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=n_show).map(|n| format!("P_{n}")));
    let mut t = Table::new(header);
    for n in 0..=traj.steps() {
        let mut row: Vec<Cell> = vec![
            n.into(),
            traj.energies[n].into(),
            traj.diffusion_rate[n].into(),
            traj.total_prob[n].into(),
        ];
        row.extend(traj.populations[n][..n_show].iter().map(|&p| Cell::from(p)));
        t.push(row);
    }
    t
}

fn entanglement_table(series: &EntanglementSeries) -> Table {
    let mut t = Table::new(["N", "S_V", "E_r"]);
    for (n, &s) in series.s_v.iter().enumerate() {
        let e = if n == 0 {
            Cell::from("")
        } else {
            Cell::from(series.partial(n))
        };
        t.push(vec![n.into(), s.into(), e]);
    }
    t
}

fn asymptotic_table(a: &AsymptoticSummary) -> Table {
    let mut t = Table::new([
        "closed_form_rate",
        "numeric_rate",
        "geometric_correction",
        "correction_method",
        "converged",
    ]);
    t.push(vec![
        a.closed_form_rate.into(),
        a.numeric_rate.into(),
        a.geometric_correction.into(),
        a.correction_method.clone().into(),
        a.converged.to_string().into(),
    ]);
    t
}

fn recursion_gap(traj: &Trajectory) -> f64 {
    let Some(rec) = &traj.recursed_energies else {
        return 0.0;
    };
    traj.energies
        .iter()
        .zip(rec)
        .map(|(d, r)| (d - r).abs() / d.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Runs one validated experiment in memory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let basis = BoxBasis::new(cfg.n_max, cfg.hbar)?;
    let pot: KickPotential = cfg.potential.to_potential();
    let u = build_kick(&basis, cfg)?;
    let z = kickwell_core::transition_matrix(&u, cfg.tolerances.leak_fail)?;
    let spec = default_spectrum(&basis, &pot)?;
    let opts = EvolveOptions {
        leak_fail: cfg.tolerances.leak_fail,
        cross_tol: cfg.tolerances.cross_tol,
    };
    let p0 = basis_state(cfg.n_max, cfg.initial_level)?;
    let traj = run_trajectory(&z, &basis, Some(&spec), &p0, cfg.n_steps, &opts)?;
    let series = entanglement_series(&traj)?;
    let rate = constant_rate_check(&spec, CONSTANT_RATE_TOL);

    let name = &cfg.name;
    let mut tables = vec![
        (
            format!("{name}_trajectory.csv"),
            trajectory_table(&traj, cfg.n_show),
        ),
        (
            format!("{name}_entanglement.csv"),
            entanglement_table(&series),
        ),
    ];

    let asymptotic = match &cfg.asymptotic {
        Some(a) => {
            let report = asymptotic_rate(
                &z,
                &spec,
                &basis,
                &AsymptoticOptions {
                    steps: a.steps,
                    fit_fraction: a.fit_fraction,
                    evolve: opts,
                    ..AsymptoticOptions::default()
                },
            )?;
            let summary = AsymptoticSummary {
                closed_form_rate: report.closed_form_rate,
                numeric_rate: report.numeric_rate,
                geometric_correction: report.geometric_correction,
                correction_method: match report.correction_method {
                    CorrectionMethod::LinearSolve => "linear_solve".to_string(),
                    CorrectionMethod::PartialSums { terms, converged } => {
                        format!("partial_sums({terms};{converged})")
                    }
                },
                converged: report.converged,
                lost_probability: report.trajectory_lost_probability,
            };
            tables.push((format!("{name}_asymptotic.csv"), asymptotic_table(&summary)));
            Some(summary)
        }
        None => None,
    };

    let dephasing = match &cfg.dephasing {
        Some(d) => {
            let rho0 = DensityMatrix::pure_level(cfg.n_max, cfg.initial_level)?;
            let run = run_dephasing(&rho0, &u, &basis, &d.schedule(), d.cycles())?;
            let n_show = cfg.n_show.min(cfg.n_max);
            let mut header: Vec<String> = [
                "cycle",
                "trace",
                "energy",
                "purity",
                "max_off_diagonal",
                "hermiticity_defect",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            header.extend((1..=n_show).map(|n| format!("P_{n}")));
            let mut t = Table::new(header);
            for r in &run.records {
                let mut row: Vec<Cell> = vec![
                    r.cycle.into(),
                    r.trace.into(),
                    r.energy.into(),
                    r.purity.into(),
                    r.max_off_diagonal.into(),
                    r.hermiticity_defect.into(),
                ];
                row.extend(r.populations[..n_show].iter().map(|&p| Cell::from(p)));
                t.push(row);
            }
            tables.push((format!("{name}_dephasing.csv"), t));
            let last = run.records.last().expect("initial record present");
            Some(DephasingSummary {
                cycles: d.cycles(),
                final_trace: last.trace,
                final_energy: last.energy,
                final_purity: last.purity,
                final_max_off_diagonal: last.max_off_diagonal,
                max_hermiticity_defect: run
                    .records
                    .iter()
                    .map(|r| r.hermiticity_defect)
                    .fold(0.0, f64::max),
            })
        }
        None => None,
    };

    let steps = traj.steps();
    let record = RunRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        kick: kick_summary(&u, &z),
        trajectory: TrajectorySummary {
            steps,
            initial_energy: traj.energies[0],
            final_energy: traj.energies[steps],
            final_diffusion_rate: traj.diffusion_rate[steps],
            lost_probability: traj.lost_probability(),
            max_recursion_gap: recursion_gap(&traj),
            constant_rate: rate.rate.map(|r| r * cfg.hbar * cfg.hbar),
        },
        entanglement: EntanglementSummary {
            final_s_v: series.s_v[steps],
            max_e_r: series.e_r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            telescoping_residual: series.telescoping_residual,
        },
        asymptotic,
        dephasing,
        tables: tables.iter().map(|(n, _)| n.clone()).collect(),
    };
    Ok(RunOutput { record, tables })
}

/// Runs a config and writes its outputs into `dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<RunRecord, HarnessError> {
    let out = run(cfg)?;
    out.write(dir)?;
    Ok(out.record)
}

/// One sweep entry: the config name and its record or error message.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub name: String,
    pub outcome: Result<RunRecord, String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    /// Config name against asymptotic rate, final `S_V` and leakage.
    pub fn summary(&self) -> Table {
        let mut t = Table::new([
            "id",
            "name",
            "status",
            "rate",
            "final_s_v",
            "max_certified_leakage",
            "lost_probability",
        ]);
        for (i, e) in self.entries.iter().enumerate() {
            let row = match &e.outcome {
                Ok(r) => {
                    let rate = r
                        .asymptotic
                        .as_ref()
                        .map(|a| a.numeric_rate)
                        .unwrap_or(r.trajectory.final_diffusion_rate);
                    vec![
                        i.into(),
                        e.name.clone().into(),
                        "ok".into(),
                        rate.into(),
                        r.entanglement.final_s_v.into(),
                        r.kick.max_certified_leakage.into(),
                        r.trajectory.lost_probability.into(),
                    ]
                }
                Err(msg) => vec![
                    i.into(),
                    e.name.clone().into(),
                    format!("error: {}", msg.replace([',', '\n'], ";")).into(),
                    "".into(),
                    "".into(),
                    "".into(),
                    "".into(),
                ],
            };
            t.push(row);
        }
        t
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.outcome.is_err()).count()
    }
}

/// Runs every config on `workers` threads; `out` receives each run's files
/// plus `sweep_summary.csv`. A failing config is recorded and skipped.
pub fn sweep(
    configs: &[ExperimentConfig],
    workers: usize,
    out: Option<&Path>,
) -> Result<SweepReport, HarnessError> {
    let mut seen = std::collections::HashSet::new();
    for c in configs {
        if !seen.insert(c.name.as_str()) {
            return Err(HarnessError::Invalid {
                field: "name".to_string(),
                reason: format!("duplicate run name `{}` in sweep", c.name),
            });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Invalid {
            field: "workers".to_string(),
            reason: e.to_string(),
        })?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| {
                let outcome = match out {
                    Some(dir) => run_to_dir(c, dir),
                    None => run(c).map(|o| o.record),
                };
                SweepEntry {
                    name: c.name.clone(),
                    outcome: outcome.map_err(|e| e.to_string()),
                }
            })
            .collect()
    });
    let report = SweepReport { entries };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        report.summary().write(&dir.join("sweep_summary.csv"))?;
    }
    Ok(report)
}
