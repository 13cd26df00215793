use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

use symspec::controllability::parse_system_spec;
use symspec::datasets::dataset_by_name;
use symspec::report::{self, MethodChoice};

fn symspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn symspec_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_symspec"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const FIG5_EDGES: &str = "1 2\n2 3\n3 4\n4 5\n2 5\n5 6\n";

#[test]
fn analyze_fig5() {
    let o = symspec(&["analyze", "--dataset", "fig5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "UnfriendlyOrthogonalEigenvector, 3 witnesses, symmetric: yes, automorphism (1 6)(2 5)(3 4)"
    );
}

#[test]
fn analyze_usa() {
    let o = symspec(&["analyze", "--dataset", "usa"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "Friendly, symmetric: no");
}

#[test]
fn analyze_single_declared_vertex() {
    let o = symspec_stdin(&["analyze", "-"], "# one vertex, no edges\nv\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Friendly"));
}

#[test]
fn parse_errors_report_line_numbers() {
    let o = symspec_stdin(&["analyze", "-"], "1 2\n2 3 4\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn analyze_json_matches_library() {
    let o = symspec(&["analyze", "--dataset", "fig5", "--json"]);
    let from_cli: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let g = dataset_by_name("fig5").unwrap().graph;
    let direct = serde_json::to_value(report::analyze(&g, "fig5", 1e-4)).unwrap();
    assert_eq!(from_cli, direct);
}

#[test]
fn controllability_fig5() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.txt");
    fs::write(&one, format!("{FIG5_EDGES}leader: 1\n")).unwrap();
    let o = symspec(&["controllability", one.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("controllable\n"));
    assert!(text.contains("spectral (tol 1e-6): controllable"));
    assert!(text.contains("kalman: controllable (rank 6 of 6)"));

    let two = dir.path().join("two.txt");
    fs::write(&two, format!("{FIG5_EDGES}leader: 1 6\n")).unwrap();
    let o = symspec(&["controllability", two.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("uncontrollable\n"));
    assert!(text.contains("leader symmetric: yes"));
    assert!(text.contains("{1, 6}"));
}

#[test]
fn controllability_json_matches_library() {
    let spec = format!("{FIG5_EDGES}leader: 1 6\n");
    let o = symspec_stdin(&["controllability", "-", "--json"], &spec);
    let from_cli: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sys = parse_system_spec(&spec).unwrap();
    let direct = serde_json::to_value(report::controllability_report(&sys, 1e-6, MethodChoice::Both).unwrap()).unwrap();
    assert_eq!(from_cli, direct);
}

#[test]
fn controllability_on_dataset_with_leader_flag() {
    let o = symspec(&["controllability", "--dataset", "fig5", "--leader", "1", "--method", "spectral"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("controllable"));
    assert!(!stdout(&o).contains("kalman"));
}

#[test]
fn empty_leader_line_is_an_input_error() {
    let o = symspec_stdin(&["controllability", "-"], &format!("{FIG5_EDGES}leader:\n"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("leader is connected to no follower"));
}

#[test]
fn trajectory_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = symspec(&[
        "controllability",
        "--dataset",
        "fig5",
        "--leader",
        "1",
        "--trajectory",
        out.to_str().unwrap(),
        "--steps",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,x1,x2,x3,x4,x5,x6");
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn montecarlo_writes_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("run");
    let prefix = prefix.to_str().unwrap();
    let o = symspec(&["montecarlo", "--n", "5", "--p", "1.0", "--trials", "10", "--out", prefix]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for suffix in ["_repeated.csv", "_orthogonal.csv", "_repeated.svg", "_orthogonal.svg", "_metadata.json"] {
        assert!(fs::metadata(format!("{prefix}{suffix}")).is_ok(), "{suffix}");
    }
    let csv = fs::read_to_string(format!("{prefix}_repeated.csv")).unwrap();
    assert_eq!(csv, "n,p,probability,trials\n5,1,1,10\n");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{prefix}_metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["tolerance"]["semantics"], "absolute");
}

#[test]
fn montecarlo_same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let prefix = dir.path().join(name);
        let prefix = prefix.to_str().unwrap().to_owned();
        let o = symspec(&["montecarlo", "--n", "6,9", "--p", "0.3,0.6", "--trials", "40", "--seed", "7", "--out", &prefix]);
        assert_eq!(o.status.code(), Some(0));
        (
            fs::read(format!("{prefix}_repeated.csv")).unwrap(),
            fs::read(format!("{prefix}_orthogonal.csv")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn unwritable_output_is_an_error() {
    let o = symspec(&["montecarlo", "--n", "3", "--p", "0.5", "--trials", "2", "--out", "/nonexistent/dir/x"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn automorphisms_fig4() {
    let o = symspec(&["automorphisms", "--dataset", "fig4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("automorphism group order 2"));
    assert!(text.contains("subgraphs of symmetry: {1, 2, 3} {4, 5, 6}"));
}

#[test]
fn dataset_list_and_show() {
    let o = symspec(&["dataset", "list"]);
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').next().unwrap().to_owned()).collect();
    assert_eq!(names, ["fig4", "fig5", "usa", "usa-me-ri"]);

    let o = symspec(&["dataset", "show", "usa"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 107);

    let o = symspec(&["dataset", "show", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn permutation_reports() {
    let o = symspec(&["permutation", "2", "1", "4", "5", "3"]);
    let text = stdout(&o);
    assert!(text.contains("cycles: (1 2)(3 4 5)"));
    assert!(text.contains("multiplicity of eigenvalue -1: 1"));

    let o = symspec(&["permutation", "--cycles", "(1 2)(3 4)", "--n", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["even_cycles"], 2);
    assert_eq!(v["minus_one_multiplicity"], 2);

    assert_eq!(symspec(&["permutation", "1", "1"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(symspec(&["bogus"]).status.code(), Some(1));
    assert_eq!(symspec(&["--help"]).status.code(), Some(0));
}
