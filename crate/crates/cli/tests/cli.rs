//! End-to-end tests of the `netput-eff` binary.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netput-eff"))
}

fn write_file(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn cell<'a>(line: &'a str, header: &str, column: &str) -> &'a str {
    let idx = header.split(',').position(|c| c == column).unwrap();
    line.split(',').nth(idx).unwrap()
}

#[test]
fn eval_scan_example_with_observed_direction() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,2,2\nB,4,5\nC,4,2\n");
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "fdh", "--p", "1", "--p", "-inf"])
        .env("NETPUT_EFF_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows: Vec<&str> = lines.collect();

    let c_mean = rows
        .iter()
        .find(|r| r.starts_with("C,1,"))
        .expect("row for unit C at order 1");
    assert_eq!(cell(c_mean, &header, "score"), "0.75");
    assert_eq!(cell(c_mean, &header, "status"), "weakly-efficient");

    // The -inf token dispatches to the joint-expansion measure.
    let c_dir = rows.iter().find(|r| r.starts_with("C,-inf,")).unwrap();
    assert_eq!(cell(c_dir, &header, "measure"), "directional");
    assert_eq!(cell(c_dir, &header, "score"), "0");

    // Efficient units score zero with an efficient status.
    let a_mean = rows.iter().find(|r| r.starts_with("A,1,")).unwrap();
    assert_eq!(cell(a_mean, &header, "score"), "0");
    assert_eq!(cell(a_mean, &header, "status"), "efficient");
}

#[test]
fn eval_csv_roundtrip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(
        dir.path(),
        "units.csv",
        "id,x1,x2,y1\nA,1.25,2.5,3.1\nB,2.75,1.1,2.9\nC,3.5,3.7,1.3\n",
    );
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "2", "--outputs", "1", "--tech", "vrs"])
        .args(["--p", "0.5", "--p", "1", "--direction", "unit"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    for line in lines {
        let raw = cell(line, &header, "score");
        let parsed: f64 = raw.parse().unwrap();
        assert_eq!(format!("{parsed}"), raw, "score field does not round-trip");
    }
}

#[test]
fn dual_markers_and_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,2,2\nB,4,5\nC,4,2\n");

    // Convex hull duals close their gaps at the joint-expansion order.
    let out = bin()
        .args(["dual"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "vrs", "--p", "-inf"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    for line in lines {
        let gap: f64 = cell(line, &header, "gap").parse().unwrap();
        assert!(gap <= 1e-6, "gap {gap} in {line}");
    }

    // Low orders on a non-convex hull yield marker rows, not failures.
    let out = bin()
        .args(["dual"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "fdh", "--p", "0", "--p", "inf"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    for line in lines {
        if cell(line, &header, "p") == "0" {
            assert_eq!(cell(line, &header, "note"), "convexity-required");
        } else {
            let residual: f64 = cell(line, &header, "residual").parse().unwrap();
            assert!(residual <= 1e-7);
        }
    }
}

#[test]
fn dual_marks_infeasible_units_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,3,2\nB,0.5,1\n");
    let hrep = write_file(dir.path(), "tech.hs", "1 0 <= 0\n1 1 <= 0\n0 1 <= 2\n");
    let out = bin()
        .args(["dual"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "hrep", "--hrep"])
        .arg(&hrep)
        .args(["--p", "1", "--direction", "unit"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows: Vec<&str> = lines.collect();
    let a = rows.iter().find(|r| r.starts_with("A,")).unwrap();
    let gap: f64 = cell(a, &header, "gap").parse().unwrap();
    assert!(gap <= 1e-6);
    let b = rows.iter().find(|r| r.starts_with("B,")).unwrap();
    assert_eq!(cell(b, &header, "note"), "infeasible");
    assert_eq!(cell(b, &header, "score"), "-inf");
}

#[test]
fn classify_reports_consistent_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,1,1\nB,2,2\nC,2,1\nD,3,0.5\n");
    let out = bin()
        .args(["classify"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "fdh", "--direction", "unit"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows: Vec<&str> = lines.collect();

    let c = rows.iter().find(|r| r.starts_with("C,")).unwrap();
    assert_eq!(cell(c, &header, "status"), "weakly-efficient");
    assert_eq!(cell(c, &header, "score_directional"), "0");
    let mean: f64 = cell(c, &header, "score_mean").parse().unwrap();
    assert!(mean > 0.0);

    let d = rows.iter().find(|r| r.starts_with("D,")).unwrap();
    assert_eq!(cell(d, &header, "status"), "inefficient");

    let a = rows.iter().find(|r| r.starts_with("A,")).unwrap();
    assert_eq!(cell(a, &header, "status"), "efficient");

    for row in &rows {
        assert_eq!(cell(row, &header, "consistent"), "true", "{row}");
    }
}

#[test]
fn unsupported_regimes_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(
        dir.path(),
        "units.csv",
        "id,x1,x2,y1,y2\nA,1,1,1,1\nB,2,1.5,2,1.5\nC,2,2,1,1\n",
    );
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "2", "--outputs", "2", "--tech", "vrs"])
        .args(["--p", "2", "--direction", "unit"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("unsupported"), "rows still emitted with markers: {text}");
}

#[test]
fn halfspace_technology_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,3,2\nB,0.5,1\n");
    let hrep = write_file(dir.path(), "tech.hs", "1 0 <= 0\n1 1 <= 0\n0 1 <= 2\n");
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "hrep", "--hrep"])
        .arg(&hrep)
        .args(["--p", "1", "--direction", "unit", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();

    // Unit A sits on the weakly efficient boundary with mean score 1/2.
    let a = rows.iter().find(|r| r["id"] == "A").unwrap();
    assert!((a["score"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    // Unit B is outside the halfspace set: the score serializes as "-inf".
    let b = rows.iter().find(|r| r["id"] == "B").unwrap();
    assert_eq!(b["score"].as_str().unwrap(), "-inf");
    assert_eq!(b["status"].as_str().unwrap(), "infeasible");
}

#[test]
fn custom_direction_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,3,2\nB,2,2\n");
    let gfile = write_file(dir.path(), "dir.txt", "1 0\n");
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "vrs", "--p", "1"])
        .arg(format!("--direction=custom:{}", gfile.display()))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    // Only the input coordinate may move: unit A reaches the hull at -2.
    let a = lines.next().unwrap();
    assert_eq!(cell(a, &header, "p"), "1");
    let score: f64 = cell(a, &header, "score").parse().unwrap();
    assert!((score - 1.0).abs() < 1e-9);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,2,2\nB,oops,5\n");
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:"), "stderr should name line 3: {err}");

    let data = write_file(dir.path(), "dup.csv", "id,x1,y1\nA,2,2\nA,3,5\n");
    let out = bin()
        .args(["eval"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
}

#[test]
fn hidden_oracle_subcommand_bounds_the_score() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_file(dir.path(), "units.csv", "id,x1,y1\nA,3,2\n");
    let hrep = write_file(dir.path(), "tech.hs", "1 0 <= 0\n1 1 <= 0\n0 1 <= 2\n");
    let out = bin()
        .args(["oracle"])
        .arg(&data)
        .args(["--inputs", "1", "--outputs", "1", "--tech", "hrep", "--hrep"])
        .arg(&hrep)
        .args(["--p", "1", "--direction", "unit", "--resolution", "801"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let row = lines.next().unwrap();
    let lower: f64 = cell(row, &header, "lower").parse().unwrap();
    let upper: f64 = cell(row, &header, "upper").parse().unwrap();
    assert!(lower <= 0.5 + 1e-9 && 0.5 <= upper + 1e-9);
    assert!((lower - 0.5).abs() < 1e-2);
}
