use std::fs;
use std::path::Path;
use std::process::Command;

use clap::Parser;
use open_dicke::cli::{self, Cli, CommandKind, CutoffPolicy, DataFile, RunArgs, RunConfig};
use open_dicke::criticality::{SweepMode, SweepParameter};
use open_dicke::open_system::SystemSpec;
use open_dicke::Error;

fn config_from(args: &[&str]) -> open_dicke::Result<RunConfig> {
    let cli = Cli::try_parse_from(std::iter::once("open-dicke").chain(args.iter().copied()))
        .map_err(|e| Error::Config { key: "argv".into(), reason: e.to_string() })?;
    cli::parse_config(cli.command.kind(), cli.command.args())
}

fn config_key(result: open_dicke::Result<RunConfig>) -> String {
    match result {
        Err(Error::Config { key, .. }) => key,
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn fig2_defaults_use_the_current_figure_parameters() {
    let cfg = cli::parse_config(CommandKind::Fig2, &RunArgs::default()).unwrap();
    let s = cfg.spec;
    assert_eq!((s.delta, s.gamma_l, s.gamma_r, s.epsilon, s.g), (0.1, 0.1, 0.1, 0.0, 0.1));
    assert_eq!((s.dicke.omega, s.dicke.omega0), (1.0, 1.0));
    assert_eq!(cfg.n_values, vec![4, 8, 16, 20, 24]);
    assert!(cfg.infinite);
    assert_eq!(cfg.mode, SweepMode::GroundState);

    let fig3 = cli::parse_config(CommandKind::Fig3, &RunArgs::default()).unwrap();
    assert_eq!((fig3.spec.gamma_l, fig3.spec.gamma_r), (0.01, 0.01));

    let fig4 = config_from(&["fig4", "--N", "6", "--gamma-b", "0.1"]).unwrap();
    assert_eq!(fig4.lambdas, vec![0.5, 0.05]);
    assert!(!fig4.spec.include_tq);
}

#[test]
fn flags_override_defaults() {
    let cfg = config_from(&[
        "sweep", "--N", "2,3", "--omega0-grid", "0.05:0.2:0.05", "--g", "-0.2", "--tc", "0.3", "--mode", "me",
        "--n-max", "7", "--format", "json",
    ])
    .unwrap();
    assert_eq!(cfg.n_values, vec![2, 3]);
    assert_eq!(cfg.grid.parameter, SweepParameter::Omega0);
    assert_eq!(cfg.spec.dicke.lambda, 0.1);
    assert_eq!((cfg.spec.g, cfg.spec.delta), (-0.2, 0.3));
    assert_eq!(cfg.mode, SweepMode::MeNoBackaction);
    assert_eq!(cfg.cutoff, CutoffPolicy::Fixed { n_max: 7 });
}

#[test]
fn invalid_values_name_the_offending_flag() {
    assert_eq!(config_key(config_from(&["fig2", "--lambda-grid", "0.6:0.3:0.01"])), "--lambda-grid");
    assert_eq!(config_key(config_from(&["fig2", "--lambda-grid", "0.3:0.6"])), "--lambda-grid");
    assert_eq!(config_key(config_from(&["fig2", "--gamma-b", "-0.1"])), "--gamma-b");
    assert_eq!(config_key(config_from(&["fig2", "--gamma-l", "-0.1"])), "--gamma-l");
    assert_eq!(config_key(config_from(&["fig2", "--auto-cutoff", "2"])), "--auto-cutoff");
    assert_eq!(
        config_key(config_from(&["sweep", "--mode", "normal", "--lambda-grid", "0.3:0.6:0.1"])),
        "--lambda-grid"
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let good = serde_json::to_value(RunConfig::defaults(CommandKind::Sweep)).unwrap();

    let mut top = good.clone();
    top["lamda"] = serde_json::json!(0.3);
    let mut nested = good.clone();
    nested["spec"]["gama_b"] = serde_json::json!(0.1);
    for (name, value) in [("top", top), ("nested", nested)] {
        let path = dir.path().join(format!("{name}.json"));
        fs::write(&path, value.to_string()).unwrap();
        let args = RunArgs {
            config: Some(path),
            ..RunArgs::default()
        };
        let err = cli::parse_config(CommandKind::Sweep, &args).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
    }

    let path = dir.path().join("good.json");
    fs::write(&path, good.to_string()).unwrap();
    let args = RunArgs {
        config: Some(path.clone()),
        ..RunArgs::default()
    };
    assert_eq!(cli::parse_config(CommandKind::Sweep, &args).unwrap(), RunConfig::defaults(CommandKind::Sweep));
    // a sweep file cannot drive fig2
    let err = cli::parse_config(CommandKind::Fig2, &args).unwrap_err();
    assert!(matches!(err, Error::Config { ref key, .. } if key == "command"));
}

fn small_sweep(dir: &Path) -> RunConfig {
    let mut cfg = config_from(&[
        "sweep", "--N", "2", "--lambda-grid", "0.1:0.7:0.15", "--n-max", "8", "--inf", "--mode", "ground",
    ])
    .unwrap();
    cfg.output_dir = dir.to_path_buf();
    cfg
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep(dir.path());
    let first = cli::run(&cfg).unwrap();
    let before: Vec<Vec<u8>> = first.files.iter().map(|p| fs::read(p).unwrap()).collect();
    let second = cli::run(&cfg).unwrap();
    assert_eq!(first.files, second.files);
    for (p, bytes) in second.files.iter().zip(before) {
        assert_eq!(fs::read(p).unwrap(), bytes, "{}", p.display());
    }
    assert_eq!(files_in(dir.path()), vec!["sweep_ground_N2.csv", "sweep_ground_N_inf.csv"]);
}

#[test]
fn headers_round_trip_to_the_config() {
    for format in ["csv", "json"] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_sweep(dir.path());
        cfg.format = serde_json::from_value(serde_json::json!(format)).unwrap();
        let summary = cli::run(&cfg).unwrap();
        for path in &summary.files {
            let file = DataFile::read(path).unwrap();
            let back: RunConfig = serde_json::from_value(file.metadata["config"].clone()).unwrap();
            assert_eq!(back, cfg);
            let system: SystemSpec = serde_json::from_value(file.metadata["system"].clone()).unwrap();
            if path.to_string_lossy().contains("N2") {
                assert_eq!((system.dicke.n_qubits, system.dicke.n_max), (2, 8));
            }
            assert_eq!(file.columns[..4], ["lambda", "occupation", "current", "fano"]);
            assert_eq!(file.rows.len(), if path.to_string_lossy().contains("inf") { 3 } else { 5 });
        }
    }
}

#[test]
fn csv_values_carry_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep(dir.path());
    let summary = cli::run(&cfg).unwrap();
    let text = fs::read_to_string(&summary.files[0]).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    let value = body[1].split(',').nth(2).unwrap();
    assert_eq!(value.split('e').next().unwrap().trim_start_matches('-').len(), 18, "{value}");
}

#[test]
fn fig2_writes_current_and_derivative_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config_from(&["fig2", "--N", "2,3", "--inf", "--lambda-grid", "0.3:0.7:0.05", "--n-max", "10", "--out", out])
        .unwrap();
    cli::run(&cfg).unwrap();
    let names = files_in(dir.path());
    for tag in ["N2", "N3", "N_inf"] {
        assert!(names.contains(&format!("fig2_current_{tag}.csv")), "{names:?}");
        assert!(names.contains(&format!("fig2_d_current_{tag}.csv")), "{names:?}");
    }
}

#[test]
fn fig4_writes_spectrum_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config_from(&["fig4", "--N", "2", "--n-max", "3", "--gamma-b", "0.1", "--out", out]).unwrap();
    cli::run(&cfg).unwrap();
    assert_eq!(
        files_in(dir.path()),
        vec![
            "fig4_histogram_N2_lambda0.050000.csv",
            "fig4_histogram_N2_lambda0.500000.csv",
            "fig4_reference.csv",
            "fig4_spectrum_N2_lambda0.050000.csv",
            "fig4_spectrum_N2_lambda0.500000.csv",
        ]
    );
    let hist = DataFile::read(&dir.path().join("fig4_histogram_N2_lambda0.500000.csv")).unwrap();
    let total: f64 = hist.column("probability").unwrap().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    let spectrum = DataFile::read(&dir.path().join("fig4_spectrum_N2_lambda0.500000.csv")).unwrap();
    assert_eq!(spectrum.rows.len(), (4 * 3) * (4 * 3));
}

#[test]
fn failed_runs_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // the second N exceeds the dense eigensolver guard after the first wrote its files
    let cfg = config_from(&["spectrum", "--N", "1,40", "--n-max", "6", "--out", out]).unwrap();
    let err = cli::run(&cfg).unwrap_err();
    assert!(matches!(err, Error::DimensionGuard { .. }), "{err}");
    assert!(files_in(dir.path()).is_empty());
}

#[test]
fn binary_reports_errors_and_oracle_results() {
    let bin = env!("CARGO_BIN_EXE_open-dicke");
    let bad = Command::new(bin).args(["fig2", "--gamma-b", "-0.1"]).output().unwrap();
    assert!(!bad.status.success());
    let stderr = String::from_utf8_lossy(&bad.stderr);
    assert!(stderr.contains("--gamma-b"), "{stderr}");

    let oracle = Command::new(bin).arg("oracle").output().unwrap();
    assert!(oracle.status.success());
    let stdout = String::from_utf8_lossy(&oracle.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 5, "{stdout}");
}
