use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ffm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffm"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("FFM_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn verify_json(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("verify_q5.json")).unwrap()).unwrap()
}

fn check<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn scan_succeeds_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffm(&["scan", "--degrees", "3", "--jobs", "1"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("lvalues_q5_n3.csv")).unwrap();
    assert!(csv.starts_with("q,n,P,c_0,c_1,c_2,a_num,a_den,b_num,b_den,"));
    assert_eq!(csv.lines().count(), 41);
    assert!(dir.path().join("cache/q5_n3.cache").exists());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["scan", "--q", "7", "--degrees", "3"][..],
        &["scan", "--degrees", "4"],
        &["moments", "--degrees", "3", "--jobs", "0"],
        &["scan", "--degrees", "3", "--symbols", "nope"],
        &["divisor-sums", "--max-series-degree", "65"],
    ] {
        let out = ffm(args, dir.path());
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn odd_moment_order_leaves_holder_columns_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffm(&["moments", "--degrees", "3", "--k", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("moments_q5.csv")).unwrap();
    let mut lines = csv.lines();
    let headers: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let holds = headers.iter().position(|h| *h == "holder_holds").unwrap();
    assert_eq!(row[holds], "");
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = ffm(&["scan", "--degrees", "3"], &blocker.join("sub"));
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn injected_fault_is_reported_with_its_conductor() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffm(
        &[
            "verify",
            "--degrees",
            "3",
            "--inject-fault",
            "--max-series-degree",
            "20",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = verify_json(dir.path());
    assert_eq!(report["fault_injected"], true);
    let fe = check(&report, "functional_equation");
    assert_eq!(fe["passed"], false);
    assert_eq!(fe["failed"], 1);
    assert!(fe["failures"][0].as_str().unwrap().contains("P = "));
}

#[test]
fn tiny_tolerance_makes_the_rh_check_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffm(
        &[
            "verify",
            "--degrees",
            "3",
            "--tol",
            "1e-17",
            "--max-series-degree",
            "20",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = verify_json(dir.path());
    assert_eq!(check(&report, "rh_defect")["passed"], false);
    assert_eq!(check(&report, "functional_equation")["passed"], true);
}

#[test]
fn cache_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("elsewhere");
    let out = Command::new(env!("CARGO_BIN_EXE_ffm"))
        .args(["scan", "--degrees", "3", "--out-dir"])
        .arg(dir.path().join("out"))
        .env("FFM_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(cache.join("q5_n3.cache").exists());
    assert!(!dir.path().join("out/cache").exists());
}

#[test]
fn reruns_are_byte_identical_and_hit_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["moments", "--degrees", "3,5", "--jobs", "2"];
    assert_eq!(ffm(&args, dir.path()).status.code(), Some(0));
    let first = fs::read(dir.path().join("moments_q5.csv")).unwrap();
    let scan = ffm(&["scan", "--degrees", "3,5"], dir.path());
    assert!(String::from_utf8_lossy(&scan.stdout)
        .contains("n=5 conductors=624 cache_hits=624 recomputed=0"));
    let other = tempfile::tempdir().unwrap();
    assert_eq!(
        ffm(
            &["moments", "--degrees", "3,5", "--jobs", "1"],
            other.path()
        )
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        first,
        fs::read(other.path().join("moments_q5.csv")).unwrap()
    );
}

#[test]
fn json_format_and_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffm(
        &["charsum", "--degrees", "3", "--format", "json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("charsum_q5.json")).unwrap())
            .unwrap();
    assert!(!rows.as_array().unwrap().is_empty());

    let out = ffm(
        &["divisor-sums", "--k", "2", "--max-series-degree", "12"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("brute_mismatches=0"));
    assert!(dir.path().join("divisor_sums_q5.csv").exists());
}
