//! Acceptance sweep: one test, and so one pass/fail line, per certified
//! behavior. The arithmetic checks run the shared verification suite at
//! full depth; the last test drives the installed binary end to end.

use std::fs;
use std::process::{Command, Output};

use ffquat_cli::checks::{self, Level};

fn assert_check(report: checks::CheckReport) {
    assert!(
        report.passed(),
        "{} failed: {}",
        report.name,
        report.detail
    );
    println!("{}: {}", report.name, report.detail);
}

#[test]
fn a01_class_mass_certificates() {
    assert_check(checks::class_mass(Level::Full));
}

#[test]
fn a02_class_number_census() {
    assert_check(checks::class_number_census(Level::Full));
}

#[test]
fn a03_embedding_multiplicities() {
    assert_check(checks::embedding_multiplicity(Level::Full));
}

#[test]
fn a04_supersingular_locus() {
    assert_check(checks::supersingular_locus(Level::Full));
}

#[test]
fn a05_spectral_identity() {
    assert_check(checks::spectral_identity());
}

#[test]
fn a06_hecke_operators() {
    assert_check(checks::hecke_operators(Level::Full));
}

#[test]
fn a07_equidistribution_slope() {
    assert_check(checks::equidistribution(9));
}

#[test]
fn a08_surjectivity_degree() {
    assert_check(checks::surjectivity(11));
}

#[test]
fn a09_rankin_expansion() {
    assert_check(checks::rankin_expansion());
}

#[test]
#[ignore = "minutes-long period scan; run with --ignored"]
fn a10_period_ratios() {
    assert_check(checks::period_ratios());
}

// --- the binary ---------------------------------------------------------------

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffquat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

#[test]
fn a11_cli_determinism_and_store() {
    // Pinned one-line outputs.
    let h = run(&["classnum", "--q", "3", "--D", "t^3+2*t+1"]);
    assert_eq!(stdout_of(&h), "7\n");
    let classes = run(&["quat", "classes", "--q", "3", "--P0", "t^3-t-1"]);
    assert_eq!(stdout_of(&classes), "n=4, weights 4,1,1,1, mass 13/4\n");
    let locus = run(&["drinfeld", "ss", "--q", "3", "--P0", "t^3-t-1"]);
    assert!(stdout_of(&locus).starts_with("n=4, mass 13/4"));

    // Rejected preconditions exit 2; stdout stays silent.
    let rejected = run(&["classnum", "--q", "3", "--D", "t^2+1"]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(rejected.stdout.is_empty());
    let unparsed = run(&["classnum", "--q", "3", "--D", "2t"]);
    assert_eq!(unparsed.status.code(), Some(2));

    // Identical configuration gives byte-identical stdout.
    let first = run(&["selftest", "--level", "quick"]);
    let second = run(&["selftest", "--level", "quick"]);
    assert!(
        first.status.success(),
        "selftest failed:\n{}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert_eq!(
        first.stdout, second.stdout,
        "selftest stdout must not vary between identical runs"
    );

    // Store lifecycle: build, hit, survive version drift and corruption.
    let dir = std::env::temp_dir().join(format!("ffquat-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("temp store dir");
    let dir_arg = dir.to_str().expect("utf-8 temp path");
    let cached = || {
        run(&[
            "quat", "classes", "--q", "3", "--P0", "t^3-t-1", "--cache-dir", dir_arg,
        ])
    };

    let built = cached();
    assert_eq!(stdout_of(&built), "n=4, weights 4,1,1,1, mass 13/4\n");
    assert!(String::from_utf8_lossy(&built.stderr).contains("cache: stored"));
    let code = ffquat::irred::poly_code(&ffquat::parse::parse_poly("t^3-t-1", 3).unwrap());
    let store = dir.join(format!("cls_q3_d2_p0_{code}.json"));
    let canonical = fs::read(&store).expect("store written");

    let hit = cached();
    assert_eq!(hit.stdout, built.stdout);
    assert!(String::from_utf8_lossy(&hit.stderr).contains("cache: hit"));
    assert_eq!(fs::read(&store).unwrap(), canonical, "a hit must not rewrite");

    let mut drifted: serde_json::Value = serde_json::from_slice(&canonical).unwrap();
    drifted["version"] = serde_json::Value::from(999);
    fs::write(&store, drifted.to_string()).unwrap();
    let rebuilt = cached();
    assert_eq!(rebuilt.stdout, built.stdout);
    assert!(String::from_utf8_lossy(&rebuilt.stderr).contains("version"));
    assert_eq!(fs::read(&store).unwrap(), canonical, "drift must rebuild canonically");

    fs::write(&store, b"{ not a store").unwrap();
    let recovered = cached();
    assert_eq!(recovered.stdout, built.stdout);
    assert!(String::from_utf8_lossy(&recovered.stderr).contains("rebuilding"));
    assert_eq!(fs::read(&store).unwrap(), canonical, "corruption must rebuild canonically");

    let _ = fs::remove_dir_all(&dir);
    println!("cli: pinned outputs, exit codes, byte-stable selftest, store lifecycle all hold");
}
