//! End-to-end checks of the `mclt` binary: exit codes, config files, flag
//! overrides, and report output.

use std::io::Write;
use std::process::{Command, Output};

fn mclt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mclt"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_emits_a_csv_row_and_succeeds() {
    let out = mclt(&[
        "verify", "--model", "rademacher", "--n", "16", "--reps", "2000", "--seed", "3",
        "--bound", "thm1", "--a", "1.0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,n,reps,seed,bound_kind,a,bound_value,mc_stderr,dw_est,dw_stderr,dk_est,cond2_dev,pass"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("rademacher,16,2000,3,thm1,1.0000000000000000e0,"));
    assert!(row.ends_with(",true"));
    assert!(lines.next().is_none());
}

#[test]
fn unknown_model_and_bad_flags_exit_1() {
    let out = mclt(&["verify", "--model", "heisenberg", "--reps", "500"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown model"));

    let out = mclt(&["verify", "--bound", "thm9", "--reps", "500"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mclt(&["verify", "--a", "sideways", "--reps", "500"]);
    assert_eq!(out.status.code(), Some(1));

    let out = mclt(&["verify", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));

    // closed forms need certificates the model does not carry
    let out = mclt(&[
        "verify", "--model", "drifting-variance", "--n", "8", "--reps", "500", "--bound", "cor1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("condition2"));
}

#[test]
fn runtime_failures_exit_2() {
    // completed models pad with zero-variance steps, so the unsmoothed
    // per-path bound hits an exact zero denominator
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        cfg,
        "model.id = completed\n\
         model.params.base.id = twostep\n\
         model.params.base.n = 2\n\
         model.params.beta = 1\n\
         sim.reps = 500\n\
         bound.kind = thm1\n\
         bound.a = 0"
    )
    .unwrap();
    let out = mclt(&["verify", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("singular term"));
}

#[test]
fn failed_verification_exits_3() {
    // the biased fixture drifts by 0.1 per step; at n = 1024 the measured
    // distance is far above any bound, so the row reports pass = false
    let out = mclt(&[
        "verify", "--model", "biased", "--n", "1024", "--reps", "2000", "--bound", "thm1",
        "--a", "1.0",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().ends_with(",false"));
}

#[test]
fn config_file_drives_the_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        cfg,
        "# verification run\n\
         model.id = pairswap\n\
         model.n = 32\n\
         model.params.u = 0.25\n\
         sim.reps = 2000\n\
         sim.seed = 11\n\
         bound.kind = thm2\n\
         bound.a = 0.5\n\
         output.path = {}",
        csv.display()
    )
    .unwrap();
    let path = cfg.path().to_str().unwrap().to_owned();
    let out = mclt(&["verify", "--config", &path, "--n", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    // the --n flag beat model.n while everything else came from the file
    assert!(row.starts_with("pairswap,16,2000,11,thm2,5.0000000000000000e-1,"), "{row}");
    let written = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(written, text);

    let out = mclt(&["verify", "--config", "/definitely/not/here.cfg"]);
    assert_eq!(out.status.code(), Some(1));

    let mut broken = tempfile::NamedTempFile::new().unwrap();
    writeln!(broken, "model.flavour = mint").unwrap();
    let out = mclt(&["verify", "--config", broken.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown configuration key"));
}

#[test]
fn rate_scan_reports_rows_and_slope() {
    let out = mclt(&[
        "rate-scan", "--model", "rademacher", "--reps", "2000", "--seed", "2", "--bound",
        "cor1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5, "header plus one row per default grid point");
    assert!(stderr(&out).contains("fitted rate"));

    // too short a grid is a configuration error
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "n_grid = 8, 16\nsim.reps = 500").unwrap();
    let out = mclt(&["rate-scan", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("n_grid too short"));
}

#[test]
fn stein_check_prints_the_sweep_table() {
    let out = mclt(&["stein-check", "--s", "0,1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("function"));
    for name in ["linear", "abs", "sin", "clipped_ramp"] {
        assert_eq!(
            text.lines().filter(|l| l.starts_with(name)).count(),
            2,
            "{name} rows"
        );
    }
    assert!(!text.contains("false"));
}

#[test]
fn models_list_names_the_whole_catalog() {
    let out = mclt(&["models", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for id in [
        "rademacher",
        "pairswap",
        "drifting-variance",
        "asymmetric-two-point",
        "biased",
        "twostep",
        "completed",
    ] {
        assert!(text.lines().any(|l| l.starts_with(id)), "missing {id}");
    }
}

#[test]
fn thread_cap_is_honored_and_garbage_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_mclt"))
        .args(["verify", "--model", "rademacher", "--n", "8", "--reps", "1000"])
        .env("MCLT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let out = Command::new(env!("CARGO_BIN_EXE_mclt"))
        .args(["verify", "--model", "rademacher", "--n", "8", "--reps", "1000"])
        .env("MCLT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("MCLT_THREADS"));
}
