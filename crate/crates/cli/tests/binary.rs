use std::process::Command;

fn metaspin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metaspin"))
}

#[test]
fn csv_output_is_deterministic_across_job_counts() {
    let run = |jobs: &str| {
        let o = metaspin()
            .args(["barriers", "--gamma-min", "6", "--gamma-max", "10", "--gamma-step", "1", "--jobs", jobs])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let a = run("1");
    assert_eq!(a, run("3"));
    let s = String::from_utf8(a).unwrap();
    assert!(s.starts_with("gamma_ratio,a_lu,a_ul,a_lu_sw,a_ul_sw,representation_discrepancy,status\n"));
    assert_eq!(s.lines().count(), 6);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.json");
    let run = || {
        let o = metaspin()
            .env("METASPIN_CACHE_DIR", dir.path())
            .args(["steady-sweep", "--gamma-min", "2", "--gamma-max", "4", "--gamma-step", "2", "--spin-j", "5", "--format", "json", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        v
    };
    let cold = run();
    assert_eq!(cold["summary"]["solves"], 2);
    let warm = run();
    assert_eq!(warm["summary"]["solves"], 0);
    assert_eq!(warm["summary"]["cache_hits"], 2);
    assert_eq!(cold["rows"], warm["rows"]);
}

#[test]
fn invalid_config_exits_nonzero() {
    let o = metaspin().args(["steady-sweep", "--gamma-min", "5", "--gamma-max", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));
}

#[test]
fn verify_exits_zero() {
    let o = metaspin().arg("verify").output().unwrap();
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().all(|l| !l.starts_with("FAIL")));
}
