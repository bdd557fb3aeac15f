use ricci_lab::cli::report::{Cell, Table};
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ricci-lab"))
}

const SMALL_PINCHING: &str = "seed = 11\n[anderson_chow]\nsimplex_n = 60\nrho_samples = 10\nsamples = 20000\n";

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap()).map(|e| (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())).collect();
    v.sort();
    v
}

#[test]
fn malformed_config_exits_2_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    for body in ["seed = \"seven\"", "[anderson_chow]\nsampels = 10\n", "[barrier]\na_values = []\n", "[neck_spectral\norder = 4"] {
        let cfg = tmp.path().join("bad.toml");
        std::fs::write(&cfg, body).unwrap();
        let st = bin().args(["anderson-chow", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
        assert_eq!(st.status.code(), Some(2), "{body}: {}", String::from_utf8_lossy(&st.stderr));
        assert!(!out.exists(), "{body}");
    }
    let st = bin().args(["soliton", "--config", "/nonexistent/x.toml", "--out"]).arg(&out).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn passing_scenario_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let st = bin().args(["neck-spectral", "--out"]).arg(tmp.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stdout));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "neck-spectral");
    assert_eq!(summary["schema_version"], 1);
    assert!(summary["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(summary["timings"][0]["seconds"].is_null());
}

#[test]
fn failing_check_exits_1_with_summary() {
    // the combined product inequality has counterexamples, so this scenario fails
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, SMALL_PINCHING).unwrap();
    let out = tmp.path().join("out");
    let st = bin().args(["anderson-chow", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    let failed: Vec<&str> = summary["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(failed, ["c15_product_inequalities"]);
    assert!(out.join("certificate.json").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, SMALL_PINCHING).unwrap();
    let run = |name: &str, format: &str| {
        let out = tmp.path().join(name);
        bin().args(["anderson-chow", "--format", format, "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
        files(&out)
    };
    assert_eq!(run("a", "csv"), run("b", "csv"));
    assert_eq!(run("c", "json"), run("d", "json"));
    // a different seed changes the sweep
    let out = tmp.path().join("e");
    bin().args(["anderson-chow", "--seed", "12", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_ne!(files(&out), run("f", "csv"));
}

#[test]
fn barrier_csv_reads_back() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "[barrier]\na_values = [100.0]\nlarge_a = [1e7]\nsamples = 2000\n").unwrap();
    let out = tmp.path().join("out");
    bin().args(["barrier", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    let t = Table::read_csv(&out.join("barrier_a100.csv")).unwrap();
    assert_eq!(t.header, ["s", "psi", "d_psi"]);
    assert_eq!(t.rows.len(), 2000);
    let s: Vec<f64> = t.column("s").unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*s.last().unwrap(), 9.0 / 8.0);
    let text = std::fs::read_to_string(out.join("barrier_a100.csv")).unwrap();
    assert_eq!(Table::from_csv("barrier_a100", &text).unwrap().to_csv(), text);
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    let neg = summary["checks"].as_array().unwrap().iter().find(|c| c["name"] == "c04_barrier_negativity").unwrap();
    assert!(neg["value"].as_f64().unwrap() > 0.0);
    assert!(matches!(t.rows[0][0], Cell::Num(_)));
}

#[test]
fn print_config_round_trips() {
    let st = bin().args(["soliton", "--print-config", "--seed", "3"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let cfg = ricci_lab::cli::ScenarioConfig::from_toml(&String::from_utf8(st.stdout).unwrap()).unwrap();
    assert_eq!(cfg.seed, 3);
}
