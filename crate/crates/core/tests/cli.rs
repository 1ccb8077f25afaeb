use std::path::Path;
use std::process::{Command, Output};

fn ck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse-kit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn build_circle_and_errors() {
    let o = ck(&["build", "circle", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cells: 3/3"));
    assert!(stdout(&o).contains("euler characteristic: 0"));
    assert_eq!(ck(&["build", "mk", "--p", "4", "--q", "2", "--k", "1"]).status.code(), Some(3));
    assert_eq!(ck(&["build", "nonsense"]).status.code(), Some(3));
    assert_eq!(ck(&["verify-prop51", "--p", "5"]).status.code(), Some(3));
}

#[test]
fn build_writes_an_interchange_file_that_homology_reads() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m1.json");
    let f = file.to_str().unwrap();
    let o = ck(&["build", "mk", "--p", "5", "--q", "2", "--k", "1", "--reduce", "--out", f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cells: 53/165/111"));
    let h = ck(&["homology", "--input", f]);
    assert_eq!(stdout(&h).lines().skip(2).collect::<Vec<_>>(), ["H_0 = Z", "H_1 = Z^2", "H_2 = 0"]);
}

#[test]
fn prop51_report_is_deterministic_and_witnesses_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["verify-prop51", "--p", "5", "--q", "2", "--k", "1", "--reduce", "--out", out];
    let a = ck(&args);
    let b = ck(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["status"], "pass");
    assert!(r.get("timing_ms").is_none());
    for c in r["checks"].as_array().unwrap() {
        let w = c["witness"].as_str().expect("pass records reference witnesses");
        let path = dir.path().join(w);
        let o = ck(&["check-witness", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{w}");
    }
    assert!(Path::new(out).join("report.json").exists());
}

#[test]
fn tampered_witness_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(ck(&["verify-prop52", "--p", "5", "--q", "2", "--k", "1", "--reduce", "--out", out]).status.code(), Some(0));
    let path = dir.path().join("beta.witness.json");
    let mut w: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let beta = w["witness"]["beta"].as_array_mut().unwrap();
    let i = beta.iter().position(|v| v.as_i64() == Some(0)).unwrap();
    beta[i] = 5.into();
    std::fs::write(&path, w.to_string()).unwrap();
    let o = ck(&["check-witness", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&o)["status"], "fail");
}

#[test]
fn small_p_warns_but_runs() {
    let o = ck(&["verify-prop51", "--p", "3", "--q", "2", "--k", "1", "--reduce", "--timing"]);
    let r = report(&o);
    assert!(r["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("≤ q²")));
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);
    assert!(r.get("timing_ms").is_some());
}

#[test]
fn single_stage_tower_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "p = 5\nq = 2\nk = 1\nreduce = true\nstages = 1\n").unwrap();
    let o = ck(&["--config", cfg.to_str().unwrap(), "verify-tower"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["params"]["stages"], "1");
    assert_eq!(r["status"], "pass");
    std::fs::write(&cfg, "p = 5\nunknown = 1\n").unwrap();
    assert_eq!(ck(&["--config", cfg.to_str().unwrap(), "verify-tower"]).status.code(), Some(3));
}

#[test]
fn node_limit_gives_an_inconclusive_exit() {
    let base = ["verify-prop51", "--p", "5", "--q", "2", "--k", "2", "--reduce"];
    let norm = |r: &serde_json::Value| {
        r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "norm-bound").unwrap().clone()
    };
    let o = ck(&[&base[..], &["--method", "ilp", "--node-limit", "1"]].concat());
    assert_eq!(o.status.code(), Some(2));
    let open = norm(&report(&o));
    assert_eq!(open["status"], "inconclusive");
    let bound = |k: &str| open["values"][k].as_str().unwrap().parse::<i64>().unwrap();
    let exact = report(&ck(&base));
    assert_eq!(exact["status"], "pass");
    let m: i64 = norm(&exact)["values"]["m"].as_str().unwrap().parse().unwrap();
    assert!(bound("m_lower") <= m && m <= bound("m_upper"));
}
