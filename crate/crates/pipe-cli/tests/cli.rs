use std::path::PathBuf;
use std::process::{Command, Output};

fn pipe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pipe")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn passing_construction_exits_zero() {
    let o = pipe(&["repro", "prop34_rw", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["seed"], 3);
    assert!(report["entries"].as_array().unwrap().iter().all(|e| e["verdict"] == "pass"));
}

#[test]
fn tsv_report_has_header_and_rows() {
    let o = pipe(&["repro", "prop41", "--format", "tsv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# format_version=1"));
    assert_eq!(lines.next().unwrap(), "construction\tclaim\tverdict\tmeasured\tstatement");
    assert!(lines.all(|l| l.starts_with("prop41\t")));
}

#[test]
fn failing_claims_set_exit_code() {
    let o = pipe(&["repro", "prop36"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"fail\""));
}

#[test]
fn bad_requests_are_errors() {
    for args in [
        vec!["repro", "prop99"],
        vec!["repro", "prop41", "--n", "0"],
        vec!["pe", "/no/such/file", "--method", "rw", "--k", "2"],
    ] {
        let o = pipe(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    }
    assert!(!pipe(&["wl", &data("graphs.g6"), "--k", "4"]).status.success());
    assert!(!pipe(&["pairs", &data("pairs.g6"), "--methods", "ph,gnn"]).status.success());
}

#[test]
fn pairs_report_lists_every_pair_and_method() {
    let o = pipe(&["pairs", &data("pairs.g6"), "--methods", "ph,ph_lpe,pipe"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = report["entries"].as_array().unwrap();
    let verdict_of = |pair: &str, method: &str| {
        entries
            .iter()
            .find(|e| e["construction"] == pair && e["claim"] == method)
            .map(|e| e["measured"].as_str().unwrap().to_string())
            .unwrap()
    };
    assert_eq!(verdict_of("pair0", "ph_only"), "distinguished");
    assert_eq!(verdict_of("pair1", "pipe"), "equal");
}

#[test]
fn rw_encoding_of_k4() {
    let o = pipe(&["pe", &data("graphs.g6"), "--method", "rw", "--k", "2"]);
    assert!(o.status.success());
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1]["graph"], 1);
    for row in lines[1]["rows"].as_array().unwrap() {
        let r: Vec<f64> = serde_json::from_value(row.clone()).unwrap();
        assert!(r[0].abs() < 1e-12 && (r[1] - 1.0 / 3.0).abs() < 1e-12, "{r:?}");
    }
    let o = pipe(&["pe", &data("graphs.g6"), "--method", "distance", "--k", "2", "--anchors", "0,1"]);
    assert_eq!(json_lines(&o)[0]["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn petersen_persistence_counts() {
    for f in ["degree", "lap", "rw"] {
        let o = pipe(&["ph", &data("graphs.g6"), "--filtration", f]);
        assert!(o.status.success(), "{f}");
        let first = &json_lines(&o)[0];
        let d0 = first["dim0"]["tuples"].as_array().unwrap();
        let d1 = first["dim1"]["tuples"].as_array().unwrap();
        assert_eq!(d0.len(), 10);
        assert_eq!(d0.iter().filter(|t| t["death"] == "inf").count(), 1);
        assert_eq!(d1.iter().filter(|t| t["death"] == "inf").count(), 6);
    }
}

#[test]
fn wl_histograms() {
    let o = pipe(&["wl", &data("graphs.g6"), "--k", "1"]);
    let lines = json_lines(&o);
    // Petersen and K4 are regular: one colour class each.
    assert_eq!(lines[0]["histogram"].as_array().unwrap().len(), 1);
    assert_eq!(lines[1]["histogram"].as_array().unwrap().len(), 1);
    let o = pipe(&["wl", &data("graphs.g6"), "--k", "2"]);
    assert!(o.status.success());
    // Diagonal, adjacent and non-adjacent pairs of the Petersen graph.
    assert_eq!(json_lines(&o)[0]["histogram"].as_array().unwrap().len(), 3);
}

#[test]
fn graph6_round_trip() {
    let o = pipe(&["g6", "roundtrip", &data("graphs.g6")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "IheA@GUAo\nC~\nEhEG\n");
}
