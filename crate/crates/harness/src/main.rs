use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kickwell::config::AsymptoticConfig;
use kickwell::{load_configs, ExperimentConfig, FigureOptions};
use kickwell_core::{BoxBasis, TransitionMatrix};

#[derive(Parser)]
#[command(
    name = "kickwell",
    version,
    about = "Measured kicked particle in a square well"
)]
struct Cli {
    /// Reserved; no code path draws random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output_dir` or `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the kick unitary and transition matrix.
    KickMatrix(Common),
    /// Measured trajectory and entanglement tables.
    Evolve(Common),
    /// Long-time diffusion rate; `--steps` sets the fit run length.
    Asymptote(Common),
    /// Density-matrix run using the config's `dephasing` block.
    Dephase(Common),
    /// Data behind one of the figures (1 to 5).
    Figure {
        id: u32,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        /// Comma-separated k (figures 1, 2) or r (figures 3 to 5) values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Comma-separated kick counts for figure 1.
        #[arg(long, value_delimiter = ',')]
        kicks: Option<Vec<usize>>,
    },
    /// Run every config in a file in parallel.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn load(common: &Common) -> Result<Vec<ExperimentConfig>> {
    let mut cfgs = load_configs(&common.config)?;
    for c in &mut cfgs {
        if let Some(n) = common.n_max {
            c.n_max = n;
        }
        if let Some(s) = common.steps {
            c.n_steps = s;
        }
        c.validate()?;
    }
    Ok(cfgs)
}

fn out_dir(common: &Common, cfg: &ExperimentConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write_run(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    let out = kickwell::run(cfg).with_context(|| format!("run `{}`", cfg.name))?;
    let path = out.write(dir)?;
    let r = &out.record;
    println!(
        "{}: E_N = {:.6e}, S_V = {:.6e}, lost = {:.3e}, record {}",
        cfg.name,
        r.trajectory.final_energy,
        r.entanglement.final_s_v,
        r.trajectory.lost_probability,
        path.display()
    );
    if let Some(a) = &r.asymptotic {
        println!(
            "  closed form {:.8e}, fitted {:.8e}, correction {:.6e}, converged {}",
            a.closed_form_rate, a.numeric_rate, a.geometric_correction, a.converged
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let _ = cli.seed;
    match cli.command {
        Command::KickMatrix(common) => {
            for cfg in load(&common)? {
                let basis = BoxBasis::new(cfg.n_max, cfg.hbar)?;
                let u = kickwell::run::build_kick(&basis, &cfg)?;
                let z = TransitionMatrix::from_kick(&u);
                let dir = out_dir(&common, &cfg);
                std::fs::create_dir_all(&dir)?;
                let path = dir.join(format!("{}_kick.csv", cfg.name));
                std::fs::write(&path, kickwell::dump::matrix_csv(&u, &z))?;
                println!(
                    "{}: dim {}, unitarity defect {:.3e}, wrote {}",
                    cfg.name,
                    u.dim(),
                    u.unitarity_defect(),
                    path.display()
                );
            }
        }
        Command::Evolve(common) => {
            for mut cfg in load(&common)? {
                cfg.asymptotic = None;
                cfg.dephasing = None;
                write_run(&cfg, &out_dir(&common, &cfg))?;
            }
        }
        Command::Asymptote(common) => {
            let steps = common.steps;
            let plain = Common {
                steps: None,
                ..common
            };
            for mut cfg in load(&plain)? {
                let mut a = cfg.asymptotic.unwrap_or_else(AsymptoticConfig::default);
                if let Some(s) = steps {
                    a.steps = s;
                }
                cfg.asymptotic = Some(a);
                cfg.dephasing = None;
                cfg.validate()?;
                write_run(&cfg, &out_dir(&plain, &cfg))?;
            }
        }
        Command::Dephase(common) => {
            for cfg in load(&common)? {
                if cfg.dephasing.is_none() {
                    bail!("config `{}` has no `dephasing` block", cfg.name);
                }
                write_run(&cfg, &out_dir(&common, &cfg))?;
            }
        }
        Command::Figure {
            id,
            out,
            n_max,
            steps,
            values,
            kicks,
        } => {
            let opts = FigureOptions {
                n_max,
                steps,
                values,
                kicks,
            };
            for p in kickwell::emit_figure(id, &opts, &out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Sweep { common, workers } => {
            let cfgs = load(&common)?;
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let report = kickwell::sweep(&cfgs, workers, Some(&dir))?;
            print!("{}", report.summary().to_csv());
            if report.failures() > 0 {
                eprintln!("{} of {} runs failed", report.failures(), cfgs.len());
                std::process::exit(2);
            }
        }
    }
    Ok(())
}
