use std::path::PathBuf;
use std::process::{Command, Output};

use bb84_core::SweepTable;

fn bb84(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bb84"))
        .args(args)
        .output()
        .expect("spawn bb84")
}

fn stdout(args: &[&str]) -> String {
    let out = bb84(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn preset(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(bb84(&["critical-p"]).status.code(), Some(0));
    assert_eq!(bb84(&["assess", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(bb84(&["assess"]).status.code(), Some(2));
    assert_eq!(bb84(&["nope"]).status.code(), Some(2));
    assert_eq!(bb84(&[]).status.code(), Some(2));
    assert_eq!(bb84(&["--help"]).status.code(), Some(0));

    let usage = bb84(&[
        "simulate", "--p", "0.1", "--omega", "0.2,0.3", "--q", "0.5,0.5",
    ]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&usage.stderr).lines().count(), 1);
}

#[test]
fn runtime_failure_is_exit_one() {
    let out = bb84(&["critical-p", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phase.csv");
    let path_str = path.to_str().unwrap();
    let args = ["phase2d", "--n-eves", "2", "--p-steps", "11"];
    let printed = stdout(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--out", path_str]);
    assert_eq!(stdout(&with_file), "");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn csv_layout_and_round_trip() {
    let runs: [&[&str]; 7] = [
        &[
            "assess",
            "--p",
            "0.05",
            "--omega",
            "0.3,0.5",
            "--q",
            "0.25,0.25,0.5",
        ],
        &["qber-curve", "--p-max", "0.24", "--p-steps", "25"],
        &["lost-info", "--omega", "0.8", "--p-steps", "9"],
        &["phase2d", "--p-steps", "21"],
        &["phase3d", "--p", "0.05", "--omega-steps", "6"],
        &[
            "simulate",
            "--photons",
            "20000",
            "--seed",
            "5",
            "--p",
            "0.1",
            "--omega",
            "0.6",
        ],
        &["verify", "--n-eves", "2", "--trials", "20", "--seed", "7"],
    ];
    for args in runs {
        let text = stdout(args);
        assert!(text.ends_with('\n') && !text.contains('\r'), "{args:?}");
        let table = SweepTable::from_csv(&text).unwrap();
        assert!(!table.is_empty(), "{args:?}");
        assert_eq!(table.to_csv(), text, "{args:?}");
        for line in text.lines().skip(1) {
            for field in line.split(',') {
                if let Ok(v) = field.parse::<f64>() {
                    let digits = field
                        .trim_start_matches('-')
                        .split('e')
                        .next()
                        .unwrap()
                        .chars()
                        .filter(char::is_ascii_digit)
                        .collect::<String>();
                    let significant = digits.trim_start_matches('0').len();
                    assert!(significant <= 12, "{field} in {args:?}");
                    assert!(v.is_finite());
                }
            }
        }
    }
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let base = [
        "simulate",
        "--photons",
        "1000000",
        "--seed",
        "42",
        "--p",
        "0.1",
        "--omega",
        "0.6",
        "--q",
        "0.5,0.5",
    ];
    let first = stdout(&base);
    assert_eq!(first, stdout(&base));
    for threads in ["1", "4"] {
        let mut args = base.to_vec();
        args.extend(["--threads", threads]);
        assert_eq!(first, stdout(&args), "threads = {threads}");
    }
}

#[test]
fn verify_passes_and_repeats() {
    let args = ["verify", "--n-eves", "3", "--trials", "1000", "--seed", "7"];
    let out = bb84(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
    assert_eq!(text, stdout(&args));
}

#[test]
fn presets_load() {
    let n1 = stdout(&["phase2d", "--config", &preset("boundary_n1.json")]);
    let table = SweepTable::from_csv(&n1).unwrap();
    assert_eq!(table.len(), 200);
    assert_eq!(table.rows()[0][1].as_f64(), Some(1.0));

    let surface = stdout(&[
        "phase3d",
        "--config",
        &preset("surface_p0.05.json"),
        "--omega-steps",
        "5",
    ]);
    assert_eq!(SweepTable::from_csv(&surface).unwrap().len(), 25);

    for (cmd, file) in [
        ("qber-curve", "qber_n1.json"),
        ("lost-info", "lost_info_omega0.8.json"),
        ("phase3d", "surface_p0.1.json"),
        ("phase2d", "boundary_n3_uniform.json"),
        ("qber-curve", "qber_n3_uniform.json"),
    ] {
        let mut args = vec![cmd, "--config"];
        let path = preset(file);
        args.push(&path);
        if cmd == "phase3d" {
            args.extend(["--omega-steps", "4"]);
        }
        assert!(!stdout(&args).is_empty(), "{file}");
    }
}

#[test]
fn flags_override_config() {
    let text = stdout(&[
        "phase2d",
        "--config",
        &preset("boundary_n1.json"),
        "--p-steps",
        "3",
        "--q-rule",
        "uniform",
    ]);
    assert_eq!(SweepTable::from_csv(&text).unwrap().len(), 3);
}
