use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn revsurf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revsurf"))
        .args(args)
        .current_dir(cwd)
        .env_remove("REVSURF_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV text, skipping comments and the header.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn bound_states_example_reproduces_table_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = revsurf(&["bound-states", "rho=1", "lambda=1", "zmax=1.5", "eta=0", "count=3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("n[1],c_squared[1],c[1],omega[meV]"), "{text}");
    let c: Vec<f64> = rows(&text).iter().map(|r| r[2]).collect();
    for (got, want) in c.iter().zip([1.451, 2.946, 4.432]) {
        assert!((got / want - 1.0).abs() < 1e-3, "{c:?}");
    }
}

#[test]
fn dimensionless_energies_equal_c_squared() {
    let dir = tempfile::tempdir().unwrap();
    let o = revsurf(&["--dimensionless", "bound-states", "lambda=1", "zmax=4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("omega[hbar^2/(2m rho^2)]"));
    for r in rows(&text) {
        assert!((r[3] - r[1]).abs() < 1e-12 * r[1].abs());
    }
    let o = revsurf(&["--dimensionless", "transport", "R1=40", "R2=2", "a=10", "eps=2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transport_fig6_example_sweeps_500_energies() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["transport", "R1=40", "R2=2", "a=10", "eps=2", "Emin=0.1", "Emax=50", "points=500"];
    let o = revsurf(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("E_l[meV],E_total[meV],T[1],R[1]"));
    let data = rows(&text);
    assert_eq!(data.len(), 500);
    assert_eq!((data[0][0], data[499][0]), (0.1, 50.0));
    for r in &data {
        assert!((r[2] + r[3] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn transition_not_shorter_than_half_length_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = revsurf(&["transport", "eps=12", "a=10", "R1=40", "R2=2", "energy=5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("eps = 12 must be shorter than the half length a = 10"), "{}", stderr(&o));
}

#[test]
fn usage_errors_name_the_offending_token() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["bound-states", "rho=1", "lambda=1", "zmax=1.5", "colour=3"], "argument 'colour=3': unknown key 'colour'"),
        (&["bound-states", "rho=x", "lambda=1", "zmax=1.5"], "argument 'rho=x': 'rho' expects a positive number"),
        (&["bound-states", "rho=1", "zmax=1.5"], "missing required key 'lambda'"),
        (&["transport", "R1=40", "R2=2", "a=10", "eps=2", "energy=5", "grid=50"], "below the minimum of 500"),
        (&["experiment", "id=fig9"], "unknown experiment 'fig9'"),
    ];
    for (args, msg) in cases {
        let o = revsurf(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(msg), "{args:?}: {}", stderr(&o));
    }
    // clap-level errors use the same code
    assert_eq!(revsurf(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn config_file_sections_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# geometry run\n[run]\nout = from_file\n\n[geometry]\nshape = cylinder\nradius = 2 # nm\nz = 0\n\n[transport]\nR1 = 40\n",
    )
    .unwrap();
    let cfg_arg = cfg.to_str().unwrap();

    let o = revsurf(&["--config", cfg_arg, "geometry"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("from_file/geometry.csv")).unwrap();
    assert_eq!(rows(&text)[0][1], 2.0);

    // tokens override file values; --out overrides [run] out
    let o = revsurf(&["--config", cfg_arg, "--out", "from_flag", "geometry", "radius=5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("from_flag/geometry.csv")).unwrap();
    assert_eq!(rows(&text)[0][1], 5.0);

    fs::write(&cfg, "[geometry]\nshape = cylinder\nradius = two\n").unwrap();
    let o = revsurf(&["--config", cfg_arg, "geometry"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.cfg:3: 'radius' expects a positive number"), "{}", stderr(&o));
}

#[test]
fn workers_from_environment_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_revsurf"))
            .args(["geometry", "shape=cylinder", "radius=1", "z=0"])
            .current_dir(dir.path())
            .env("REVSURF_WORKERS", workers)
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(0));
    let o = run("lots");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("REVSURF_WORKERS"));
}

#[test]
fn experiment_writes_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = revsurf(&["--out", "data", "--workers", "2", "experiment", "id=table1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS"), "{}", stdout(&o));
    let names: Vec<String> =
        fs::read_dir(dir.path().join("data")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().any(|n| n.ends_with(".summary.json")), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("table1") && n.ends_with(".csv")), "{names:?}");

    let o = revsurf(&["experiment", "id=table1", "grid=1000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_subset_and_tampered_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = revsurf(&["--out", "v", "verify", "only=table_one,gaas_energy_scale"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = fs::read_to_string(dir.path().join("v/verify_report.json")).unwrap();
    assert!(report.contains("\"table_one\""));

    // 1% off: dimensionless eigenvalues survive, meV values do not
    let o = revsurf(&["--out", "v", "verify", "only=table_one,gaas_energy_scale", "hbar2_over_2me=38.480798"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("PASS table_one")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("FAIL gaas_energy_scale")), "{text}");
}

#[test]
fn verify_coarse_grid_fails_convergence_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let o = revsurf(&["--out", "v", "verify", "only=convergence", "grid=50"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("FAIL convergence"), "{text}");
    assert!(text.contains("below the minimum"), "{text}");
}
