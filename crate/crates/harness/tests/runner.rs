use std::process::Command;

use kickwell::config::{AsymptoticConfig, DephasingConfig};
use kickwell::figure::FigureOptions;
use kickwell::{figure_tables, parse_configs, run, sweep, ExperimentConfig, PotentialConfig};

fn null_config(name: &str) -> ExperimentConfig {
    ExperimentConfig::new(name, PotentialConfig::Null, 16, 10)
}

#[test]
fn null_potential_gives_a_frozen_trajectory() {
    let out = run(&null_config("null")).unwrap();
    let t = out.table("_trajectory.csv").unwrap();
    for n in 0..=10 {
        assert_eq!(t.float(n, "P_1"), Some(1.0));
        assert_eq!(t.float(n, "E_N"), Some(0.5));
    }
    let e = out.table("_entanglement.csv").unwrap();
    assert!((0..=10).all(|n| e.float(n, "S_V") == Some(0.0)));
    assert_eq!(out.record.kick.unitarity_defect, 0.0);
}

#[test]
fn echoed_config_parses_back_to_itself() {
    let mut cfg = ExperimentConfig::new(
        "echo",
        PotentialConfig::CosShifted {
            k_over_hbar: 0.7,
            alpha: 0.3,
        },
        64,
        5,
    );
    cfg.dephasing = Some(DephasingConfig::Continuous {
        gamma0: 0.2,
        period: 1.5,
        offset: 0.25,
        cycles: 4,
    });
    cfg.asymptotic = Some(AsymptoticConfig {
        steps: 50,
        fit_fraction: 0.5,
    });
    cfg.tolerances.cross_tol = 1e-3;
    let record = run(&cfg).unwrap().record;
    let json = record.to_json();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let echoed = ExperimentConfig::from_json(&value["config"].to_string()).unwrap();
    assert_eq!(echoed, cfg);
    let back: kickwell::RunRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back.config, cfg);
}

#[test]
fn reruns_write_identical_bytes() {
    let mut cfg = ExperimentConfig::new(
        "det",
        PotentialConfig::CosRatio {
            k_over_hbar: 1.0,
            r: 0.75,
        },
        128,
        20,
    );
    cfg.tolerances.cross_tol = 1e-4;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run(&cfg).unwrap().write(d.path()).unwrap();
    }
    for name in ["det_trajectory.csv", "det_entanglement.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn sweep_of_null_configs_has_zero_rates() {
    let cfgs: Vec<_> = (0..3).map(|i| null_config(&format!("n{i}"))).collect();
    let report = sweep(&cfgs, 3, None).unwrap();
    assert_eq!(report.entries.len(), 3);
    for e in &report.entries {
        assert_eq!(
            e.outcome.as_ref().unwrap().trajectory.final_diffusion_rate,
            0.0
        );
    }
}

#[test]
fn failing_config_leaves_siblings_intact() {
    let mut good = ExperimentConfig::new(
        "good",
        PotentialConfig::CosShifted {
            k_over_hbar: 1.0,
            alpha: 1.0,
        },
        128,
        10,
    );
    good.tolerances.cross_tol = 1e-4;
    // far too small a basis for this kick
    let bad = ExperimentConfig::new(
        "bad",
        PotentialConfig::CosRatio {
            k_over_hbar: 20.0,
            r: 3.0,
        },
        16,
        10,
    );
    let alone = run(&good).unwrap().record;
    let dir = tempfile::tempdir().unwrap();
    let report = sweep(&[bad, good.clone()], 2, Some(dir.path())).unwrap();
    assert_eq!(report.failures(), 1);
    assert!(report.entries[0]
        .outcome
        .as_ref()
        .unwrap_err()
        .contains("n_max"));
    let sibling = report.entries[1].outcome.as_ref().unwrap();
    assert_eq!(sibling.trajectory, alone.trajectory);
    assert_eq!(sibling.entanglement, alone.entanglement);
    let summary = std::fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(dir.path().join("good_trajectory.csv").exists());
}

#[test]
fn figure_one_without_a_kick_stays_in_the_ground_state() {
    let opts = FigureOptions {
        n_max: Some(32),
        values: Some(vec![0.0]),
        kicks: Some(vec![1, 3, 7]),
        ..FigureOptions::default()
    };
    let tables = figure_tables(1, &opts).unwrap();
    assert_eq!(tables.len(), 1);
    let t = &tables[0].1;
    for (level, row) in t.rows.iter().enumerate() {
        for col in ["P_n(N=1)", "P_n(N=3)", "P_n(N=7)"] {
            let expected = if level == 0 { 1.0 } else { 0.0 };
            assert_eq!(t.float(level, col), Some(expected), "{row:?}");
        }
    }
}

#[test]
fn figure_five_peaks_at_the_first_kick() {
    let t = &figure_tables(5, &FigureOptions::default()).unwrap()[0].1;
    for col in t.header.iter().skip(1) {
        let series: Vec<f64> = (0..t.rows.len())
            .map(|i| t.float(i, col).unwrap())
            .collect();
        assert!(series.windows(2).all(|w| w[1] < w[0]), "{col}");
    }
}

#[test]
fn unknown_figure_is_an_error() {
    assert!(figure_tables(6, &FigureOptions::default()).is_err());
}

#[test]
fn bessel_route_needs_a_ratio_potential() {
    let text = r#"{"potential": {"kind": "cos_shifted", "k_over_hbar": 1, "alpha": 1},
                   "n_max": 8, "n_steps": 2, "kick_method": "bessel"}"#;
    let err = parse_configs(text).unwrap_err().to_string();
    assert!(err.contains("kick_method"), "{err}");
}

#[test]
fn cli_runs_evolve_and_reports_parse_errors() {
    let bin = env!("CARGO_BIN_EXE_kickwell");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"name": "cli", "potential": {"kind": "cos_shifted", "k_over_hbar": 1.0, "alpha": 0.7853981633974483},
            "n_max": 128, "n_steps": 10}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let res = Command::new(bin)
        .args(["evolve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--steps", "5"])
        .output()
        .unwrap();
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = std::fs::read_to_string(out.join("cli_trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("N,E_N,D_N,total_prob,P_1,"));

    std::fs::write(&cfg, "{\n\"n_max\": 4,\n]").unwrap();
    let res = Command::new(bin)
        .args(["evolve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("line 3"), "{err}");
}
