use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracweyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Data rows (comment lines and the column header stripped).
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn artifact_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn solve_writes_artifacts_and_prints_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = fracweyl(&[
        "solve",
        "--domain",
        "interval:0,1",
        "--s",
        "0.5",
        "--p",
        "2",
        "--n",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let printed = String::from_utf8(res.stdout).unwrap();
    let mantissa = printed.trim().split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 12);
    assert!(printed.trim().parse::<f64>().unwrap() > 0.0);
    for name in ["eigenfunction.csv", "iterations.csv", "solve.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let text = fs::read_to_string(out.join("eigenfunction.csv")).unwrap();
    assert!(text.starts_with("# fracweyl format-version 1\n"));
    assert!(text.contains("# config: {"));
    assert_eq!(rows(&out.join("eigenfunction.csv")).len(), 63);
}

#[test]
fn invalid_exponent_exits_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = fracweyl(&["solve", "--p", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 3);
    assert!(!out.exists());
}

#[test]
fn domain_errors_have_their_own_code() {
    assert_eq!(code(&fracweyl(&["solve", "--domain", "interval:1,0"])), 4);
    assert_eq!(code(&fracweyl(&["solve", "--domain", "hexagon:1"])), 4);
    assert_eq!(code(&fracweyl(&["solve", "--n", "1"])), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for threads in ["1", "2"] {
        let mut snapshots = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("t{threads}-{run}"));
            let o = out.to_str().unwrap();
            let common = [
                "--domain",
                "box:0,0;1,1",
                "--n",
                "10",
                "--seed",
                "7",
                "--threads",
                threads,
                "--out",
                o,
            ];
            for cmd in ["solve", "spectrum", "grid-dump"] {
                let mut args = vec![cmd];
                args.extend(common);
                assert_eq!(code(&fracweyl(&args)), 0, "{cmd}");
            }
            // The spectrum path is part of the embedded config, so both runs read the same file.
            let mut args = vec!["bounds", "--spectrum"];
            let spectrum = dir
                .path()
                .join(format!("t{threads}-0"))
                .join("spectrum.csv");
            args.push(spectrum.to_str().unwrap());
            args.extend(common);
            assert_eq!(code(&fracweyl(&args)), 0);
            snapshots.push(artifact_bytes(&out));
        }
        assert_eq!(snapshots[0].len(), 10);
        assert_eq!(snapshots[0], snapshots[1], "threads={threads}");
    }
}

#[test]
fn spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let res = fracweyl(&["spectrum", "--s", "0.5", "--n", "256", "--out", o]);
    assert_eq!(code(&res), 0);
    let record: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(record["fit"]["slope"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("slope.json").exists());
    let counts: Vec<usize> = rows(&dir.path().join("counting.csv"))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(rows(&dir.path().join("spectrum.csv")).len(), 255);

    assert_eq!(code(&fracweyl(&["spectrum", "--p", "3", "--out", o])), 5);
}

#[test]
fn bounds_against_measured_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let base = ["--s", "0.75", "--p", "2", "--n", "256", "--out", o];
    let mut args = vec!["spectrum"];
    args.extend(base);
    assert_eq!(code(&fracweyl(&args)), 0);
    let spectrum = dir.path().join("spectrum.csv");
    let mut args = vec![
        "bounds",
        "--r",
        "1",
        "--spectrum",
        spectrum.to_str().unwrap(),
    ];
    args.extend(base);
    let res = fracweyl(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let table = rows(&dir.path().join("bounds.csv"));
    let valid: Vec<_> = table.iter().filter(|r| r[2] == "true").collect();
    assert!(!valid.is_empty());
    for r in valid {
        let lower: f64 = r[1].parse().unwrap();
        let measured: f64 = r[5].parse().unwrap();
        assert!(lower <= measured, "{r:?}");
    }
    let text = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(text.contains("# uncalibrated"));
}

#[test]
fn bounds_without_spectrum_and_subcritical_upper() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let res = fracweyl(&[
        "bounds",
        "--s",
        "0.5",
        "--lambda0",
        "14",
        "--r",
        "1",
        "--n",
        "32",
        "--out",
        o,
    ]);
    assert_eq!(code(&res), 0);
    let table = rows(&dir.path().join("bounds.csv"));
    assert!(table
        .iter()
        .all(|r| r.len() == 6 && r[3].is_empty() && r[5].is_empty()));
    let text = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(!text.contains("# uncalibrated"));

    assert_eq!(
        code(&fracweyl(&["bounds", "--s", "0.5", "--upper", "--out", o])),
        6
    );
}

#[test]
fn checks_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let res = fracweyl(&["check", "--properties", "scaling,poincare", "--out", o]);
    assert_eq!(code(&res), 0);
    let lines: Vec<serde_json::Value> = String::from_utf8(res.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["verdict"] == "pass"));

    assert_eq!(
        code(&fracweyl(&[
            "check",
            "--properties",
            "scaling,nonsense",
            "--out",
            o
        ])),
        2
    );
    let res = fracweyl(&[
        "check",
        "--properties",
        "poincare",
        "--corrupt-weights",
        "0.01",
        "--out",
        o,
    ]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8(res.stdout)
        .unwrap()
        .contains("\"verdict\":\"fail\""));
    assert_eq!(
        code(&fracweyl(&[
            "check",
            "--properties",
            "symmetry",
            "--out",
            o
        ])),
        4
    );
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "domain = \"interval:0,2\"\nn = 16\n").unwrap();
    let o = dir.path().join("out");
    let res = fracweyl(&[
        "--config",
        cfg.to_str().unwrap(),
        "grid-dump",
        "--n",
        "40",
        "--out",
        o.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0);
    assert_eq!(String::from_utf8(res.stdout).unwrap().trim(), "15");
    let text = fs::read_to_string(o.join("grid.csv")).unwrap();
    assert!(text.contains("\"n\":16"));
    assert!(text.contains("\"b\":2.0"));

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(
        code(&fracweyl(&["--config", cfg.to_str().unwrap(), "solve"])),
        2
    );
    assert_eq!(
        code(&fracweyl(&[
            "--config",
            dir.path().join("missing.toml").to_str().unwrap(),
            "solve"
        ])),
        8
    );
}
