use std::process::Command;

use extriloc_cli::{export_dot, load_scenario, run_scenario, DotKind, RunOptions, Scenario, Status};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extriloc"))
}

fn scenario(json: &str) -> Scenario {
    Scenario::from_json(json).unwrap()
}

#[test]
fn stable_n4_exhaustive_gives_eight_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = bin().args(["--scenario", "stable_n4_exhaustive", "--report"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["schema"], 1);
    let verdicts: Vec<&Value> = r["results"].as_array().unwrap().iter().filter(|x| x["suite"] == "classify").collect();
    assert_eq!(verdicts.len(), 8);
    let decided: Vec<&str> =
        verdicts.iter().filter(|v| v["status"] == "pass").map(|v| v["subcat"].as_str().unwrap()).collect();
    assert_eq!(decided, ["{}", "{J1, J2, J3}"]);
}

#[test]
fn a2_tstructure_is_abelian() {
    let out = bin().args(["--scenario", "a2_tstructure_abelian"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = r["results"].as_array().unwrap().iter().find(|x| x["suite"] == "classify").unwrap();
    assert_eq!(c["details"]["classification"], "abelian");
    assert!(r["results"].as_array().unwrap().iter().all(|x| x["status"] == "pass"));
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"backend\": ").unwrap();
    assert_eq!(bin().arg("--scenario").arg(&p).status().unwrap().code(), Some(2));
    std::fs::write(&p, r#"{"backend":{"kind":"derived","quiver":"B2","window":1},"subcat":{"kind":"zero"}}"#).unwrap();
    assert_eq!(bin().arg("--scenario").arg(&p).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["--scenario", "a2_verdier", "--suite", "nope"]).status().unwrap().code(), Some(2));
}

#[test]
fn label_outside_window_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.json");
    std::fs::write(
        &p,
        r#"{"backend":{"kind":"derived","quiver":"A2","window":1},"subcat":{"kind":"explicit","labels":["S1[9]"]}}"#,
    )
    .unwrap();
    assert_eq!(bin().arg("--scenario").arg(&p).status().unwrap().code(), Some(3));
}

#[test]
fn failing_suite_exits_1() {
    // The Verdier quotient by the orbit of S2 keeps every shift of S1,
    // while the standard heart only sees degree 0: the tables disagree.
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    std::fs::write(
        &p,
        r#"{"backend":{"kind":"derived","quiver":"A2","window":1},
            "subcat":{"kind":"shift_orbit","labels":["S2"]},
            "cotorsion":{"kind":"t_structure","cut":0},
            "suites":["heart"]}"#,
    )
    .unwrap();
    let out = bin().arg("--scenario").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"][0]["status"], "fail");
}

#[test]
fn reports_are_byte_identical() {
    let run = || bin().args(["--scenario", "a3_rigid_heart", "--seed", "5"]).output().unwrap().stdout;
    let a = run();
    assert!(!a.is_empty());
    assert_eq!(a, run());
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["seed"], 5);
    assert!(r["timing_ms"].is_null());
}

#[test]
fn suite_and_window_overrides() {
    let mut sc = load_scenario("a2_verdier").unwrap();
    sc.set_window(1);
    let opts = RunOptions { suites: vec![extriloc_cli::Suite::Verdier], timing: true };
    let r = run_scenario(&sc, &opts).unwrap();
    assert_eq!(r.window, Some(1));
    assert_eq!(r.results.len(), 1);
    assert_eq!(r.results[0].suite, "verdier");
    assert_eq!(r.results[0].status, Status::Pass);
    assert!(r.timing_ms.is_some());
}

#[test]
fn ar_quiver_of_a2_window_1() {
    let sc = scenario(r#"{"backend":{"kind":"derived","quiver":"A2","window":1},"subcat":{"kind":"zero"}}"#);
    let dot = export_dot(&sc, DotKind::ArQuiver).unwrap();
    let vertices = dot.lines().filter(|l| l.trim_end().ends_with("\";") && !l.contains("->")).count();
    let arrows = dot.lines().filter(|l| l.contains("->")).count();
    assert_eq!(vertices, 9);
    // ZA2 cut to nine vertices: a zigzag path.
    assert_eq!(arrows, 8);
    assert!(dot.contains("\"S2\" -> \"P1\";") && dot.contains("\"P1\" -> \"S1\";"));
}

fn edges(dot: &str) -> Vec<(String, String)> {
    dot.lines()
        .filter(|l| l.contains("->"))
        .map(|l| {
            let parts: Vec<&str> = l.split('"').collect();
            (parts[1].to_string(), parts[3].to_string())
        })
        .collect()
}

#[test]
fn sn_graph_extremes() {
    let zero = scenario(r#"{"backend":{"kind":"derived","quiver":"A2","window":1},"subcat":{"kind":"zero"}}"#);
    let e = edges(&export_dot(&zero, DotKind::SnGraph).unwrap());
    assert_eq!(e.len(), 9);
    assert!(e.iter().all(|(a, b)| a == b));

    let all = scenario(r#"{"backend":{"kind":"derived","quiver":"A2","window":1},"subcat":{"kind":"all"}}"#);
    let e = edges(&export_dot(&all, DotKind::SnGraph).unwrap());
    let be = all.build_backend().unwrap();
    let nonzero: usize = be
        .work_labels()
        .into_iter()
        .flat_map(|a| be.work_labels().into_iter().map(move |b| (a, b)))
        .map(|(a, b)| be.hom_dim_ind(a, b))
        .sum();
    assert_eq!(e.len(), nonzero);
}

#[test]
fn bundled_scenarios_pass_in_odd_characteristic() {
    let runs = [
        ("a2_tstructure_abelian", &[3u32, 5][..]),
        ("a2_verdier", &[3, 5]),
        ("a3_rigid_heart", &[3, 5]),
        ("stable_n4_exhaustive", &[3]),
    ];
    for (name, primes) in runs {
        for &p in primes {
            let mut sc = load_scenario(name).unwrap();
            match &mut sc.backend {
                extriloc_cli::scenario::BackendSpec::Derived { p: q, .. }
                | extriloc_cli::scenario::BackendSpec::StableNakayama { p: q, .. } => *q = p,
            }
            let r = run_scenario(&sc, &RunOptions::default()).unwrap();
            assert_eq!(r.exit_code(), 0, "{name} at p = {p}: {:?}", r.results.iter().find(|x| x.status == Status::Fail));
        }
    }
}
