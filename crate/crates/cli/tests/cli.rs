use std::path::Path;
use std::process::{Command, Output};

use dynr::suite::VerificationReport;

fn dynr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynr")).args(args).output().expect("binary runs")
}

fn report(path: &Path) -> VerificationReport {
    VerificationReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_run_exits_zero_and_reports_mu() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = dynr(&["verify", "--algebra", "sl2", "--family", "pl:nu=1.0", "--checks", "plcdybe,scalar", "--samples", "20", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert!(r.passed);
    assert_eq!(r.mu, Some(-0.75));
    assert_eq!(r.results.iter().map(|s| s.points_evaluated).collect::<Vec<_>>(), [20, 20]);
}

#[test]
fn wrong_mu_exits_one() {
    let o = dynr(&["verify", "--family", "pl:nu=1.0", "--checks", "plcdybe", "--mu", "0", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let r = VerificationReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(r.results[0].notes.iter().any(|n| n.contains("offset")));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "--checks", "plcdybe,nonsense"],
        vec!["verify", "--family", "pl:tau=1"],
        vec!["verify", "--samples", "0"],
        vec!["verify", "--tol-fd", "-1e-5"],
        vec!["verify", "--algebra", "file:/nonexistent.json"],
        vec!["algebra", "info", "--algebra", "so5"],
        vec!["frobnicate"],
    ] {
        assert_eq!(dynr(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_round_trip_and_csv_conversion() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = dynr(&["verify", "--family", "cayley1", "--algebra", "gl2", "--checks", "plcdybe,equivariance", "--samples", "4", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let again = dir.path().join("again.json");
    let o = dynr(&["report", "convert", json.to_str().unwrap(), "--format", "json", "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&json), report(&again));
    let o = dynr(&["report", "convert", json.to_str().unwrap(), "--format", "csv"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check_name,points,max_abs,mean_abs,tolerance,passed"));
    assert!(lines.next().unwrap().starts_with("plcdybe,4,"));
    assert!(lines.next().unwrap().starts_with("equivariance,4,"));
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        dynr(&["verify", "--algebra", "sl3", "--family", "pl:nu=0.3", "--samples", "6", "--seed", "11", "--out", p.to_str().unwrap()]);
        let mut r = report(&p);
        r.config.out = None;
        r
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a.results, b.results);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# run\nfamily = pl:nu=2.0\nchecks = plcdybe\nsamples = 3\nseed = 4\n").unwrap();
    let out = dir.path().join("r.json");
    let o = dynr(&["verify", "--config", cfg.to_str().unwrap(), "--samples", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.config.samples, 5);
    assert_eq!(r.config.seed, 4);
    assert_eq!(r.mu, Some(0.25 - 4.0));
}

#[test]
fn algebra_info_prints_basis() {
    let o = dynr(&["algebra", "info", "--algebra", "sl2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("dimension: 3"));
    let o = dynr(&["algebra", "info", "--algebra", "gl2", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["dim"], 4);
}

#[test]
fn algebra_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sl2.json");
    let o = dynr(&["algebra", "info", "--algebra", "sl2", "--json"]);
    std::fs::write(&p, &o.stdout).unwrap();
    let spec = format!("file:{}", p.display());
    let o = dynr(&["verify", "--algebra", &spec, "--family", "pl:nu=1", "--checks", "plcdybe,scalar", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // the standard r-matrix needs a built-in sl(n) or gl(n)
    let o = dynr(&["verify", "--algebra", &spec, "--family", "pl:nu=1", "--checks", "jacobi", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
