use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smoothlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_reports_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        r#"{"checks":[{"id":"jackson-1.4","params":{"f":["cos","abs_sin"]}},{"id":"orlicz-sandwich","params":{"trials":3}}],"N":64,"seed":1}"#,
    );
    let o = smoothlab(&["run", &cfg, "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        ["00_jackson-1.4.csv", "00_jackson-1.4.json", "01_orlicz-sandwich.csv", "01_orlicz-sandwich.json", "summary.csv"]
    );
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "id,verdict,constant,runtime_ms");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("jackson-1.4,pass,"));

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("00_jackson-1.4.json")).unwrap()).unwrap();
    assert_eq!(report["params"]["N"], 64);
    assert_eq!(report["seed"], 1);
    let csv = fs::read_to_string(out.join("00_jackson-1.4.csv")).unwrap();
    assert!(csv.starts_with("index,lhs,rhs,ratio\n"));
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"checks":[{"id":"jackson-8.10","params":{"f":"random","N":64}}],"seed":4}"#);
    let read = |dir: &str, jobs: &str| {
        let out = tmp.path().join(dir);
        let o = smoothlab(&["run", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(out.join("00_jackson-8.10.csv")).unwrap()
    };
    assert_eq!(read("a", "1"), read("b", "3"));
}

#[test]
fn unknown_id_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"checks":[{"id":"basic-2.1"},{"id":"jackson-99"}]}"#);
    let o = smoothlab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("jackson-99") && err.contains("checks[1].id"), "{err}");
}

#[test]
fn bad_parameter_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"checks":[{"id":"jackson-1.4","params":{"N":7}}]}"#);
    let o = smoothlab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("checks[0].params.N"), "{}", stderr(&o));
}

#[test]
fn failed_verdict_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // The printed exponent of the full-index polynomial form is not stable.
    let cfg = write_config(
        tmp.path(),
        r#"{"checks":[{"id":"jackson-5.10","params":{"form":"integral","exponent":"printed"}}],"N":256}"#,
    );
    let o = smoothlab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let summary = fs::read_to_string(tmp.path().join("o/summary.csv")).unwrap();
    assert!(summary.contains("jackson-5.10,fail,"));
}

#[test]
fn list_and_describe() {
    let o = smoothlab(&["--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.lines().all(|l| l.split_whitespace().count() > 1));

    let o = smoothlab(&["describe", "basic-2.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("m^{1/s}/2"));
    let o = smoothlab(&["describe", "cesaro-5.1"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("contraction"));
    let o = smoothlab(&["describe", "nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
}
