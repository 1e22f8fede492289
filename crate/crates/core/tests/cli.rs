use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use catlab::cli::{write_table, Cell, Format, Table};
use tempfile::TempDir;

fn catlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catlab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).trim().to_string()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn tc_prints_and_writes() {
    let dir = TempDir::new().unwrap();
    let o = catlab(dir.path(), &["tc", "--gamma", "0.185"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "T_c=0.300105, x_fold=0.816145");
    let text = fs::read_to_string(dir.path().join("catlab_tc.csv")).unwrap();
    assert!(text.starts_with("gamma,T_c,x_fold\n"));
    let rows = read_csv(&dir.path().join("catlab_tc.csv"));
    let tc: f64 = rows[0][1].parse().unwrap();
    assert!((tc - 0.30).abs() < 0.01);
}

#[test]
fn qre_at_zero_temperature() {
    let dir = TempDir::new().unwrap();
    let o = catlab(dir.path(), &["qre", "--gamma", "0.185", "--temp", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&dir.path().join("catlab_qre.csv"));
    let got: Vec<(f64, &str)> = rows.iter().map(|r| (r[1].parse().unwrap(), r[2].as_str())).collect();
    assert_eq!(got, vec![(0.0, "stable"), (0.5925, "unstable"), (1.0, "stable")]);
}

#[test]
fn mechanism_summary() {
    let dir = TempDir::new().unwrap();
    let o = catlab(dir.path(), &["mechanism", "--gamma", "0.1", "--x0", "0.999", "--mode", "minimal"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("final_x=0.000000, hysteresis=true"), "{}", stdout(&o));
}

#[test]
fn sweep_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let args = ["sweep", "--gamma", "0.185", "--alpha", "2", "--tmin", "0", "--tmax", "0.5", "--tstep", "0.01"];
    let o = catlab(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    let got = fs::read(dir.path().join("catlab_sweep.csv")).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/sweep_gamma0.185.csv");
    assert!(got == fs::read(golden).unwrap(), "sweep output drifted from golden file");
    assert!(!got.contains(&b'\r'));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_catlab"))
            .current_dir(dir.path())
            .env("CATLAB_THREADS", threads)
            .args(["sweep", "--gamma", "0.3", "--tstep", "0.001", "--out", out])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("4", "b.csv"));
    let bad = Command::new(env!("CARGO_BIN_EXE_catlab"))
        .current_dir(dir.path())
        .env("CATLAB_THREADS", "zero")
        .args(["tc"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn same_config_same_bytes() {
    let dir = TempDir::new().unwrap();
    for sub in ["nash", "qre", "simulate", "qlearn", "mechanism", "perturb"] {
        for fmt in ["csv", "json"] {
            let a = format!("{sub}_a.{fmt}");
            let b = format!("{sub}_b.{fmt}");
            for out in [&a, &b] {
                let o = catlab(
                    dir.path(),
                    &[sub, "--seed", "5", "--format", fmt, "--out", out, "--temp", "0.3", "--steps", "2000"],
                );
                assert_eq!(o.status.code(), Some(0), "{sub}: {}", stderr(&o));
            }
            let ra = fs::read(dir.path().join(&a)).unwrap();
            let rb = fs::read(dir.path().join(&b)).unwrap();
            if fmt == "csv" {
                assert_eq!(ra, rb, "{sub}");
            } else {
                // Only the echoed output path differs.
                let strip = |v: Vec<u8>| {
                    let mut j: serde_json::Value = serde_json::from_slice(&v).unwrap();
                    j["meta"]["config"]["out"] = serde_json::Value::Null;
                    j
                };
                assert_eq!(strip(ra), strip(rb), "{sub}");
            }
        }
    }
}

#[test]
fn json_layout() {
    let dir = TempDir::new().unwrap();
    let o = catlab(dir.path(), &["tc", "--gamma", "0.2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("catlab_tc.json")).unwrap()).unwrap();
    assert_eq!(j["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(j["meta"]["config"]["gamma"], 0.2);
    assert_eq!(j["meta"]["config"]["subcommand"], "tc");
    assert_eq!(j["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn config_precedence_and_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");

    fs::write(&cfg, r#"{"gamma": 0.2}"#).unwrap();
    let o = catlab(dir.path(), &["tc", "--config", "c.json", "--gamma", "0.3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("catlab_tc.json")).unwrap()).unwrap();
    assert_eq!(j["meta"]["config"]["gamma"], 0.3);

    fs::write(&cfg, r#"{"alpha": 0.5}"#).unwrap();
    let o = catlab(dir.path(), &["nash", "--config", "c.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha: subadditive regime unsupported"), "{}", stderr(&o));

    fs::write(&cfg, r#"{"gama": 0.5}"#).unwrap();
    let o = catlab(dir.path(), &["nash", "--config", "c.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gama"));

    fs::write(&cfg, r#"{"gamma": "high"}"#).unwrap();
    let o = catlab(dir.path(), &["nash", "--config", "c.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma"));

    fs::write(&cfg, "{}").unwrap();
    let o = catlab(dir.path(), &["qre", "--config", "c.json"]);
    assert_eq!(o.status.code(), Some(0));

    fs::write(&cfg, r#"{"subcommand": "tc"}"#).unwrap();
    let o = catlab(dir.path(), &["--config", "c.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("T_c="));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(catlab(dir.path(), &["qre", "--gamma", "1.2"]).status.code(), Some(2));
    assert_eq!(catlab(dir.path(), &["qre", "--temp", "-1"]).status.code(), Some(2));
    assert_eq!(catlab(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(catlab(dir.path(), &["qlearn", "--temp", "0"]).status.code(), Some(2));
    assert_eq!(catlab(dir.path(), &["perturb", "--eps0", "0.5"]).status.code(), Some(2));
    let o = catlab(dir.path(), &["tc", "--out", "missing/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("out"));
    assert_eq!(catlab(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn every_subcommand_round_trips() {
    let dir = TempDir::new().unwrap();
    let subs = [
        "nash", "qre", "tc", "sweep", "simulate", "qlearn", "mechanism", "perturb", "inequalities",
    ];
    for sub in subs {
        let o = catlab(dir.path(), &[sub, "--steps", "1000", "--temp", "0.3"]);
        assert_eq!(o.status.code(), Some(0), "{sub}: {}", stderr(&o));
        let path = dir.path().join(format!("catlab_{sub}.csv"));
        for row in read_csv(&path) {
            for cell in row {
                if let Ok(v) = cell.parse::<f64>() {
                    // 17 significant digits re-print to the same text.
                    if cell.contains('e') {
                        assert_eq!(format!("{v:.16e}"), cell);
                    }
                }
            }
        }
    }
}

#[test]
fn header_only_table() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("empty.csv");
    let table = Table {
        header: vec!["T", "branch_id", "x", "stability"],
        rows: vec![],
    };
    write_table(&table, &path, Format::Csv, &serde_json::Value::Null).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "T,branch_id,x,stability\n");

    let table = Table {
        header: vec!["a", "b"],
        rows: vec![vec![Cell::Num(0.1), Cell::Missing]],
    };
    let path = dir.path().join("one.csv");
    write_table(&table, &path, Format::Csv, &serde_json::Value::Null).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n1.0000000000000001e-1,\n");
}
