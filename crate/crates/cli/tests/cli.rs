use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn conecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecut"))
        .args(args)
        .env_remove("CONECUT_FORMAT")
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> Vec<u8> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read(path).expect("golden file")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const VOLUME: &[&str] = &[
    "volume",
    "--profile",
    "cone",
    "--radius",
    "1",
    "--height",
    "1",
    "--slabs",
    "4",
    "--mode",
    "both",
    "--format",
    "csv",
];
const CONVERGE: &[&str] = &[
    "converge",
    "--profile",
    "cylinder",
    "--radius",
    "1",
    "--height",
    "1",
    "--base-slabs",
    "2",
    "--levels",
    "10",
    "--format",
    "csv",
];
const DEMOCRITUS: &[&str] = &[
    "democritus",
    "--profile",
    "cone",
    "--radius",
    "1",
    "--height",
    "1",
    "--z",
    "0.5",
    "--eps",
    "0.1",
    "--format",
    "csv",
];

#[test]
fn volume_matches_golden_and_hand_values() {
    let out = conecut(VOLUME);
    assert!(out.status.success());
    assert_eq!(out.stdout, golden("volume_cone_n4.csv"));
    let row = &csv_rows(&out)[0];
    assert_eq!(row[0], "4");
    assert!((num(&row[1]) - 0.21875 * PI).abs() < 1e-15);
    assert!((num(&row[2]) - 0.46875 * PI).abs() < 1e-15);
    assert!((num(&row[3]) - PI / 3.0).abs() < 1e-15);
    assert!((num(&row[4]) - PI / 4.0).abs() < 1e-15);
}

#[test]
fn converge_cylinder_is_exact() {
    let out = conecut(CONVERGE);
    assert!(out.status.success());
    assert_eq!(out.stdout, golden("converge_cylinder.csv"));
    for row in csv_rows(&out) {
        assert_eq!(num(&row[3]), 0.0);
        assert_eq!(num(&row[4]), 0.0);
        assert_eq!(num(&row[5]), 0.0);
    }
}

#[test]
fn democritus_row() {
    let out = conecut(DEMOCRITUS);
    assert!(out.status.success());
    assert_eq!(out.stdout, golden("democritus_cone.csv"));
    let row = &csv_rows(&out)[0];
    assert_eq!(num(&row[0]), 0.1);
    assert!((num(&row[1]) - 0.09 * PI).abs() < 1e-15);
    assert!((num(&row[2]) - 0.9 * PI).abs() < 1e-14);
}

#[test]
fn machine_output_is_deterministic() {
    for args in [
        VOLUME,
        CONVERGE,
        DEMOCRITUS,
        &["rg", "--levels", "6", "--format", "json"][..],
        &["fixedpoint", "--slabs", "64", "--format", "csv"][..],
        &["density", "--format", "json"][..],
    ] {
        assert_eq!(conecut(args).stdout, conecut(args).stdout, "{args:?}");
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    for base in [
        &["volume", "--slabs", "16"][..],
        &["converge", "--profile", "paraboloid", "--levels", "5"][..],
        &["democritus"][..],
        &["density", "--z", "0.25"][..],
    ] {
        let csv = conecut(&[base, &["--format", "csv"]].concat());
        let json = conecut(&[base, &["--format", "json"]].concat());
        let json: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
        let rows = json["rows"].as_array().unwrap();
        let csv_rows = csv_rows(&csv);
        assert_eq!(rows.len(), csv_rows.len());
        for (j, c) in rows.iter().zip(&csv_rows) {
            for (jv, cv) in j.as_array().unwrap().iter().zip(c) {
                match jv.as_f64() {
                    Some(x) => assert_eq!(x, num(cv), "{base:?}"),
                    None => assert!(cv.is_empty()),
                }
            }
        }
    }
}

#[test]
fn rg_csv_and_json_agree() {
    let csv = conecut(&["rg", "--levels", "5", "--format", "csv"]);
    let json = conecut(&["rg", "--levels", "5", "--format", "json"]);
    let series: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    for row in csv_rows(&csv) {
        let (level, bin): (usize, usize) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let lv = &series["levels"][level];
        assert_eq!(
            lv["figure"]["slabs"][bin]["volume"].as_f64().unwrap(),
            num(&row[2])
        );
        assert_eq!(lv["errors"][bin].as_f64().unwrap(), num(&row[3]));
    }
}

#[test]
fn fixedpoint_csv_and_json_agree() {
    let csv = conecut(&["fixedpoint", "--slabs", "16", "--format", "csv"]);
    let json = conecut(&["fixedpoint", "--slabs", "16", "--format", "json"]);
    let rep: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(
            rep["invariance_distance"][i].as_f64().unwrap(),
            num(&row[3])
        );
        let slabs = rep["iterates"][i]["slabs"].as_array().unwrap();
        assert_eq!(slabs.len().to_string(), row[1]);
    }
}

#[test]
fn usage_errors_exit_two_on_stderr() {
    for args in [
        &["volume", "--slabs", "-3", "--profile", "cone"][..],
        &["volume", "--nonsense"][..],
        &["frobnicate"][..],
        &["rg", "--levels", "many"][..],
    ] {
        let out = conecut(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn module_errors_exit_one_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let wavy = dir.path().join("wavy.csv");
    std::fs::write(&wavy, "z,r\n0,1\n0.5,0.2\n1,0.8\n").unwrap();
    let wavy_arg = format!("table:{}", wavy.display());
    for args in [
        vec!["fixedpoint", "--slabs", "6"],
        vec!["volume", "--profile", &wavy_arg, "--mode", "both"],
        vec!["democritus", "--z", "0.95", "--eps", "0.1"],
        vec!["density", "--eps", "0.01,0.02"],
        vec!["rg", "--target", "0.3"],
        vec!["volume", "--profile", "table:/definitely/not/here.csv"],
    ] {
        let out = conecut(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("error"), "{args:?}: {err}");
    }
    // single-mode runs on a non-monotone profile still succeed
    let out = conecut(&["volume", "--profile", &wavy_arg, "--mode", "inscribed"]);
    assert!(out.status.success());
}

#[test]
fn table_profile_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("cone.csv");
    std::fs::write(&table, "z,r\n0,1\n1,0\n").unwrap();
    let out_path = dir.path().join("report.csv");
    let out = conecut(&[
        "volume",
        "--profile",
        &format!("table:{}", table.display()),
        "--slabs",
        "4",
        "--format",
        "csv",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&out_path).unwrap();
    let analytic =
        String::from_utf8(conecut(&["volume", "--slabs", "4", "--format", "csv"]).stdout).unwrap();
    // same stacks; only the exact column differs (quadrature vs closed form)
    let cols = |s: &str| -> Vec<String> {
        s.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(str::to_owned)
            .collect()
    };
    let (a, b) = (cols(&written), cols(&analytic));
    assert_eq!(a[1], b[1]);
    assert_eq!(a[2], b[2]);
    assert!((num(&a[3]) - num(&b[3])).abs() < 1e-10);
}

#[test]
fn format_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_conecut"))
        .args(["volume", "--slabs", "4"])
        .env("CONECUT_FORMAT", "csv")
        .output()
        .unwrap();
    assert_eq!(out.stdout, golden("volume_cone_n4.csv"));
}
