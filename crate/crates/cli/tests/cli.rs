use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Output};

use vesflex::io;

fn vesflex(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vesflex"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn preset(name: &str) -> String {
    format!("{}/presets/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn freq_reports_zero_frequency_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let o = vesflex(
        &[
            "freq",
            "--config",
            &preset("reference.toml"),
            "--omega-cycles",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("A_max = 0.10555 kW"), "{}", stdout(&o));
    let cols = io::read_table(
        File::open(dir.path().join("freq.csv")).unwrap(),
        &io::FREQ_HEADER,
    )
    .unwrap();
    assert!((cols[2][0] - 0.105546).abs() < 1e-6);
}

#[test]
fn ensemble_triangle_schedule_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let o = vesflex(
        &["ensemble", "--ref", &preset("triangle21.csv")],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("loads_used=50"));
    let path = dir.path().join("schedule.csv");
    let s = io::read_schedule(File::open(&path).unwrap(), 1.0).unwrap();
    assert!(vesflex::ensemble::validate_schedule(&s).unwrap());
    let mut again = Vec::new();
    io::write_schedule(&mut again, &s).unwrap();
    assert_eq!(again, fs::read(&path).unwrap());
}

#[test]
fn ensemble_over_cap_is_a_domain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = vesflex(&["ensemble", "--max-loads", "24"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("need 50"));
}

#[test]
fn simulate_with_mismatched_lengths_names_both() {
    let dir = tempfile::tempdir().unwrap();
    let power = dir.path().join("p.csv");
    fs::write(&power, "t_hours,p_kW\n0,1\n0.25,1\n0.5,1\n").unwrap();
    let dist = dir.path().join("d.csv");
    fs::write(
        &dist,
        "t_hours,theta_a_C,q_d_kW\n0,30,1\n0.25,30,1\n0.5,30,1\n0.75,30,1\n",
    )
    .unwrap();
    let o = vesflex(
        &[
            "simulate",
            "--power",
            power.to_str().unwrap(),
            "--disturbance",
            dist.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains('3') && err.contains('4'), "{err}");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = vesflex(&["plan", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("bad.toml");
    let text = fs::read_to_string(preset("reference.toml"))
        .unwrap()
        .replace("R_C_per_kW", "R_K_per_kW");
    fs::write(&cfg, text).unwrap();
    let o = vesflex(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("R_K_per_kW"));
    let bad_csv = dir.path().join("r.csv");
    fs::write(&bad_csv, "t_hours,r_ba_W\n0,1\n1,1\n").unwrap();
    let o = vesflex(
        &["plan", "--reference", bad_csv.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r_ba_W"));
}

#[test]
fn infeasible_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hot.toml");
    let text = fs::read_to_string(preset("reference.toml"))
        .unwrap()
        .replacen("p_rated_kW = 3.0", "p_rated_kW = 0.5", 1)
        .replacen("theta_a_C = 30.0", "theta_a_C = 40.0", 1);
    fs::write(&cfg, text).unwrap();
    let o = vesflex(&["plan", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn outputs_are_deterministic_and_reingest() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in ["plan", "envelope", "humidity", "deferrable", "simulate"] {
        assert_eq!(vesflex(&[cmd], a.path()).status.code(), Some(0), "{cmd}");
        assert_eq!(vesflex(&[cmd], b.path()).status.code(), Some(0), "{cmd}");
    }
    for f in [
        "plan.csv",
        "envelope.csv",
        "humidity.csv",
        "deferrable.csv",
        "simulate.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }

    let plan_path = a.path().join("plan.csv");
    let (p, theta) = io::read_plan(File::open(&plan_path).unwrap()).unwrap();
    let mut again = Vec::new();
    io::write_plan(&mut again, &p, &theta).unwrap();
    assert_eq!(again, fs::read(&plan_path).unwrap());

    let env_path = a.path().join("envelope.csv");
    let env = io::read_envelope(File::open(&env_path).unwrap()).unwrap();
    let mut again = Vec::new();
    io::write_envelope(&mut again, &env).unwrap();
    assert_eq!(again, fs::read(&env_path).unwrap());

    let rec = io::read_record(
        File::open(a.path().join("deferrable.csv")).unwrap(),
        &io::DEFERRABLE_HEADER,
    )
    .unwrap();
    assert_eq!(rec[0], Some(1.0));
    assert_eq!(rec[1], Some(0.0));
}

#[test]
fn capacity_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = vesflex(&["capacity"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rec = io::read_record(
        File::open(dir.path().join("capacity.csv")).unwrap(),
        &io::CAPACITY_HEADER,
    )
    .unwrap();
    let e_c = rec[2].unwrap();
    assert!((e_c - 1.40197).abs() < 1e-4, "{e_c}");
    assert_eq!(rec[4], Some(10.0));
}

#[test]
fn envelope_soundness_check_uses_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = vesflex(&["envelope", "--samples", "25", "--seed", "42"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("seed=42 feasible=25/25"));
}
