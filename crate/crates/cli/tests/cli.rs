use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use compacton_cli::args::RunArgs;
use compacton_cli::config::{load, ExperimentConfig, Preset};
use proptest::prelude::*;

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compacton"))
        .args(args)
        .current_dir(cwd)
        .env_remove("COMPACTON_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn last_row(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect()
}

prop_compose! {
    fn configs()(
        n in 1.01..3.0,
        c0 in 0.01..5.0,
        family in prop::sample::select(vec!["linear2", "linear4", "mass-damping", "nonlinear4"]),
        coefs in prop::collection::btree_map("[a-z]{1,6}[0-9]", -1.0f64..1.0, 0..4),
        dx in 1e-3..1.0,
        dt in 1e-3..1.0,
        length in 10.0..5000.0,
        seq in any::<bool>(),
        tol in prop::option::of(1e-14..1e-6),
        t_end in 1.0..3000.0,
        every in 0.1..50.0,
        samples in 1usize..5000,
        ns in prop::collection::vec(1.01..3.0, 0..5),
        betas in prop::collection::vec(0.0..0.1, 0..4),
        dir in "[a-z_/]{1,12}",
        snapshots in any::<bool>(),
    ) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.compacton.n = n;
        cfg.compacton.c0 = c0;
        cfg.perturbation.family = family.to_string();
        cfg.perturbation.coefficients = coefs;
        cfg.solver.dx = dx;
        cfg.solver.dt = dt;
        cfg.solver.length = length;
        cfg.solver.exec = if seq { "sequential" } else { "parallel" }.to_string();
        cfg.solver.newton_tol = tol;
        cfg.time.t_end = t_end;
        cfg.time.sample_every = every;
        cfg.ode.samples = samples;
        cfg.figure.n_values = ns;
        cfg.figure.beta0_values = betas;
        cfg.output.dir = dir.into();
        cfg.output.snapshots = snapshots;
        cfg
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trips(cfg in configs()) {
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }
}

#[test]
fn dotted_keys_and_tables_agree() {
    let dotted =
        ExperimentConfig::from_toml("solver.dx = 0.1\ncompacton.n = 1.5\nperturbation.beta0 = 0.01\n").unwrap();
    let tables =
        ExperimentConfig::from_toml("[solver]\ndx = 0.1\n[compacton]\nn = 1.5\n[perturbation]\nbeta0 = 0.01\n")
            .unwrap();
    assert_eq!(dotted, tables);
    assert_eq!(dotted.solver.dt, 0.1);
    assert_eq!(dotted.coefficient("beta0"), Some(0.01));
}

#[test]
fn unknown_keys_are_rejected() {
    for text in ["solver.dxx = 0.1", "colour = 3", "time.t = 1", "[ode]\nsteps = 3"] {
        assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
    }
    let out = bin(&["ode", "--set", "solver.dxx=0.1"], Path::new("."));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dxx"));
}

#[test]
fn layers_apply_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    fs::write(&file, "time.t_end = 40\nsolver.dx = 0.1\ncompacton.c0 = 0.5\n").unwrap();
    let args = RunArgs {
        config: Some(file.clone()),
        set: vec!["solver.dx=0.05".into()],
        c0: Some(0.75),
        ..RunArgs::default()
    };
    let cfg = load(Preset::Full { t_end: 2000.0 }, Some(&file), &args.overrides().unwrap()).unwrap();
    assert_eq!(cfg.time.t_end, 40.0);
    assert_eq!(cfg.solver.length, 2400.0);
    assert_eq!(cfg.solver.dx, 0.05);
    assert_eq!(cfg.compacton.c0, 0.75);
    assert_eq!(cfg.solver.dt, 0.1);
}

#[test]
fn invalid_values_are_rejected() {
    for set in ["solver.dx=-1", "time.t_end=0", "solver.exec=threads", "ode.samples=0"] {
        let err = load(
            Preset::Desk,
            None,
            &[compacton_cli::config::parse_assignment(set).unwrap()],
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2, "{set}");
    }
}

#[test]
fn ode_fourth_order_decay() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &[
            "ode", "--n", "2", "--family", "linear4", "--beta0", "0.001", "--c0", "1", "--t-end", "2000", "--out", "o",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = last_row(&dir.path().join("o/trajectory.csv"));
    assert_eq!(row[0], 2000.0);
    assert!((row[1] - (-0.05f64).exp()).abs() <= 1e-8 * row[1]);
    assert!((row[2] - 4.0 / 3.0 * row[1]).abs() <= 1e-12);
}

#[test]
fn ode_mass_damping() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &[
            "ode",
            "--family",
            "mass-damping",
            "--eps0",
            "0.001",
            "--n",
            "2",
            "--t-end",
            "1000",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let row = last_row(&dir.path().join("o/trajectory.csv"));
    assert!((row[1] - (-1.0f64).exp()).abs() <= 1e-8 * row[1]);
}

#[test]
fn sixth_order_outside_window_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &[
            "ode",
            "--n",
            "2.5",
            "--family",
            "linear6",
            "--set",
            "perturbation.gamma0=0.001",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("7/3"));
    let out = bin(&["ode", "--family", "mass-damping", "--beta0", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_compacton"))
        .args(["ode", "--t-end", "10"])
        .current_dir(dir.path())
        .env("COMPACTON_OUT_DIR", "from_env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from_env/trajectory.csv").exists());
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--t-end", "20", "--length", "80", "--sample-every", "5"];
    for out in ["a", "b"] {
        let mut args = vec!["simulate", "--out", out];
        args.extend(common);
        assert!(bin(&args, dir.path()).status.success());
        let mut args = vec!["figure2", "--ns", "2,5/4", "--beta0s", "0.01", "--out", out];
        args.extend(common);
        assert!(bin(&args, dir.path()).status.success());
    }
    let a = read_dir_sorted(&dir.path().join("a"));
    assert!(a.len() > 5);
    assert_eq!(a, read_dir_sorted(&dir.path().join("b")));
}

#[test]
fn simulate_unperturbed_keeps_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &[
            "simulate", "--beta0", "0", "--t-end", "30", "--length", "80", "--out", "s",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let value = |label: &str| -> f64 {
        let line = stdout.lines().find(|l| l.starts_with(label)).unwrap();
        line[label.len()..].split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!(value("mass drift") <= 1e-9);
    assert!(value("shape error") <= 0.05);
    assert!(dir.path().join("s/conservation.csv").exists());
    assert!(dir.path().join("s/snap_t30.0.csv").exists());
}

#[test]
fn figure_runs_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &["figure1", "--ns", "2", "--t-end", "30", "--length", "80", "--out", "f"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("f/figure1_n2.0000.csv")).unwrap();
    assert!(text.starts_with("t,A_num,A_adb\n"));
    assert_eq!(text.lines().count(), 5);
    let out = bin(
        &[
            "figure2", "--ns", "3", "--beta0s", "0.001", "--t-end", "30", "--length", "80", "--out", "f",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let meta = fs::read_to_string(dir.path().join("f/figure2_n3.0000_beta0.001.meta")).unwrap();
    assert!(meta.contains("limiting = true"));
    let out = bin(&["figure1", "--family", "linear2", "--out", "f"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_suites_report_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["check", "sixth-order"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("4 passed, 0 failed"));
    let out = bin(&["check", "oracle"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
