use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagseq"))
        .args(args)
        .env_remove("DIAGSEQ_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["bench", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["session", "--bogus"]).status.code(), Some(1));
    let bad_measure = run(&["session", "--dpi", "x.dpi", "--measure", "xyz", "--seed", "1"]);
    assert_eq!(bad_measure.status.code(), Some(1));
    assert_eq!(run(&["report"]).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.dpi");
    let o = run(&["session", "--dpi", missing.to_str().unwrap(), "--measure", "ent", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.dpi"));

    let broken = dir.path().join("broken.dpi");
    fs::write(&broken, "[K]\nax1: (and A\n").unwrap();
    let o = run(&["session", "--dpi", broken.to_str().unwrap(), "--measure", "ent", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let config = dir.path().join("grid.toml");
    fs::write(&config, "rounds = 3\n").unwrap();
    let o = run(&["bench", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_session_and_report_work_together() {
    let dir = tempfile::tempdir().unwrap();
    let dpis = dir.path().join("dpis");
    let o = run(&[
        "gen", "--axioms", "12", "--conflicts", "2", "--min-size", "2", "--max-size", "3", "--count", "2", "--seed",
        "4", "--out", dpis.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dpis.join("manifest.csv").exists());

    let dpi = dpis.join("dpi_0.dpi");
    let args = ["session", "--dpi", dpi.to_str().unwrap(), "--measure", "spl", "--seed", "9", "--trace"];
    let first = run(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    assert!(text.contains("aborted: false"), "{text}");
    assert!(text.contains("step,query_id,x,answer,leading,eliminated"), "{text}");
    let strip_time = |s: &str| s.lines().filter(|l| !l.starts_with("wall_ms")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip_time(&text), strip_time(&stdout(&run(&args))));

    let config = dir.path().join("grid.toml");
    fs::write(
        &config,
        "dpis = [\"dpis\"]\nmeasures = [\"ent\", \"rnd\"]\ndists = [\"mod\"]\nprob_choices = 1\n\
         strategies = [\"random\"]\nld = [6]\nruns = 3\nseed = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&["bench", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("report.md")).unwrap();

    let from_scenario = run(&["report", "--scenario", out.join("scenario.csv").to_str().unwrap()]);
    assert_eq!(stdout(&from_scenario), report);
    let from_runs = run(&["report", "--runs", out.join("runs.csv").to_str().unwrap()]);
    assert_eq!(stdout(&from_runs), report);
}
