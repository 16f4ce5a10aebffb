//! End-to-end checks of the command-line surface: determinism, report
//! contents, and machine-parseable failures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gibbsworks"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("configs")
}

fn run(args: &[&str]) -> Output {
    let cfg = configs();
    let mut cmd = bin();
    for a in args {
        cmd.arg(a.replace("$C", cfg.to_str().unwrap()));
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn pressure_reports_golden_mean_log() {
    let out = run(&[
        "pressure",
        "--spec",
        "$C/golden_mean.toml",
        "--potential",
        "$C/zero.toml",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("log_lambda: 4.81211825059603e-1"), "{text}");
}

#[test]
fn patterns_counts_golden_mean_words() {
    let out = run(&[
        "patterns",
        "--spec",
        "$C/golden_mean.toml",
        "--volume",
        "0..2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("count: 5"), "{text}");
    assert!(text.starts_with("000\n001\n010\n100\n101\n"), "{text}");
}

#[test]
fn kernel_two_row_field_table() {
    // single site under a pure field: probabilities e^{+-h} / 2cosh h
    let out = run(&[
        "kernel",
        "--spec",
        "$C/golden_mean.toml",
        "--potential",
        "$C/field.toml",
        "--volume",
        "0..0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[2].starts_with('0'), "{text}");
    assert!(lines[3].starts_with('1'), "{text}");
    let p1: f64 = lines[3].split('\t').nth(2).unwrap().parse().unwrap();
    let expect = 1f64.exp() / (1f64.exp() + 1.0);
    assert!((p1 - expect).abs() < 1e-12);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "equilibrium",
        "--spec",
        "$C/golden_mean.toml",
        "--potential",
        "$C/field.toml",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_is_json_lines() {
    let out = run(&[
        "kernel",
        "--spec",
        "$C/spins1d.toml",
        "--potential",
        "$C/ising.toml",
        "--volume",
        "0..1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("valid json line");
        assert!(v.get("pattern").is_some());
        assert!(v.get("prob").is_some());
    }
}

#[test]
fn dlr_check_passes_for_equilibrium_measure() {
    let out = run(&[
        "dlr-check",
        "--spec",
        "$C/golden_mean.toml",
        "--potential",
        "$C/field.toml",
        "--volume",
        "0..2",
        "--outer",
        "-2..4",
        "--measure",
        "equilibrium",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn limit_check_converges_for_local_potentials() {
    let out = run(&[
        "kernel",
        "--spec",
        "$C/spins1d.toml",
        "--potential",
        "$C/ising.toml",
        "--volume",
        "0..0",
        "--limit-check",
        "6",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn error_paths_have_distinct_exit_codes() {
    // parse error: malformed volume
    let out = run(&[
        "patterns",
        "--spec",
        "$C/golden_mean.toml",
        "--volume",
        "oops",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // cap exceeded
    let out = run(&[
        "patterns",
        "--spec",
        "$C/golden_mean.toml",
        "--volume",
        "0..40",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // window too wide for the transfer matrix: a three-site local table
    let wide = configs().join("golden_mean.toml");
    let tmp = std::env::temp_dir().join("gibbsworks_wide_potential.toml");
    std::fs::write(
        &tmp,
        "[local]\nwindow = [[-1], [0], [1]]\nrows = [{ pattern = [\"1\", \"1\", \"1\"], value = 1.0 }]\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "pressure",
            "--spec",
            wide.to_str().unwrap(),
            "--potential",
            tmp.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.lines().count() == 1, "single-line reason: {err}");
}

#[test]
fn variation_reports_the_summable_norm() {
    let out = run(&[
        "variation",
        "--spec",
        "$C/spins1d.toml",
        "--potential",
        "$C/ising.toml",
        "--n-max",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // for the unit coupling: delta_1 = 2, later variations vanish,
    // sup norm 1, so the norm is 3
    assert!(text.contains("1\t2.00000000000000e0"), "{text}");
    assert!(text.contains("2\t0.00000000000000e0"), "{text}");
    assert!(text.contains("sv_norm: 3.00000000000000e0"), "{text}");
}

#[test]
fn cocycle_reports_value_within_bound() {
    let out = run(&[
        "cocycle",
        "--spec",
        "$C/spins1d.toml",
        "--potential",
        "$C/ising.toml",
        "--x",
        "+1@0..0",
        "--y",
        "-1@0..0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cocycle: -4.00000000000000e0"), "{text}");
    assert!(text.contains("bound: 1.80000000000000e1"), "{text}");
}

#[test]
fn cap_env_var_is_honored() {
    let cfg = configs();
    let out = bin()
        .env("GIBBSWORKS_CAP", "4")
        .args([
            "patterns",
            "--spec",
            cfg.join("golden_mean.toml").to_str().unwrap(),
            "--volume",
            "0..2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // an explicit flag overrides the environment
    let out = bin()
        .env("GIBBSWORKS_CAP", "4")
        .args([
            "patterns",
            "--spec",
            cfg.join("golden_mean.toml").to_str().unwrap(),
            "--volume",
            "0..2",
            "--cap",
            "1024",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn compat_and_decompose_agree_on_golden_mean() {
    let out = run(&[
        "compat",
        "--spec",
        "$C/golden_mean.toml",
        "--radius",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("class 0: 000 010"), "{text}");
    assert!(text.contains("classes: 4"), "{text}");

    let out = run(&[
        "decompose",
        "--images",
        "2,1,0,3,4",
        "--spec",
        "$C/golden_mean.toml",
        "--radius",
        "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("(000, 010)"));
    // class-breaking permutations are refused with the dedicated code
    let out = run(&[
        "decompose",
        "--images",
        "1,0,2,3,4",
        "--spec",
        "$C/golden_mean.toml",
        "--radius",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn entropy_block_rates_report_upper_bound() {
    let out = run(&[
        "entropy",
        "--spec",
        "$C/golden_mean.toml",
        "--measure",
        "equilibrium",
        "--potential",
        "$C/zero.toml",
        "--n-max",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("upper-bound:"), "{text}");
    // bits flag rescales: log2 of the same quantity
    let bits = run(&[
        "entropy",
        "--spec",
        "$C/golden_mean.toml",
        "--measure",
        "bernoulli:0.5,0.5",
        "--n-max",
        "2",
        "--bits",
    ]);
    assert!(stdout(&bits).contains("1.00000000000000e0"));
}
