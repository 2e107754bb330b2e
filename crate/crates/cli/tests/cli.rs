use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relayrate"))
        .args(args)
        .env_remove("RELAYRATE_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn info_ends_with_h() {
    let o = run(&["info", &fixture("pairwise_shared.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().last().unwrap(), "h = (3.000000, 3.000000, 3.000000)");
    assert!(out.contains("{1,2,3}\t6.000000"));
}

#[test]
fn malformed_input_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"type\":\"component\",\"users\":3,\"components\":[],\"colour\":1}").unwrap();
    let o = run(&["info", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 1"));

    std::fs::write(&path, "{\"type\":\"component\",\"users\":1,\"components\":[]}").unwrap();
    let o = run(&["info", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("users must be ≥ 2"));

    let o = run(&["info", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn imeasure_table_and_svg() {
    let o = run(&["imeasure", &fixture("pairwise_shared.json")]);
    let out = stdout(&o);
    assert!(out.contains("{1,2}\t1.000000"));
    assert!(out.contains("{1,2,3}\t0.000000"));

    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("d.svg");
    let o = run(&["imeasure", &fixture("pairwise_shared.json"), "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.starts_with("<?xml") && doc.contains("<circle"));

    let four = dir.path().join("four.json");
    let g = run(&["gen", "component", "--users", "4", "--rate", "1,2=1", "-o", four.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(0));
    let table = dir.path().join("t.svg");
    let o = run(&["imeasure", four.to_str().unwrap(), "--svg", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("notice"));
    assert!(std::fs::read_to_string(&table).unwrap().starts_with("subset\tI_K"));
}

#[test]
fn independent_source_has_no_shared_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ind.json");
    run(&["gen", "component", "--users", "3", "--rate", "1=1", "--rate", "2=2", "--rate", "3=1", "-o", path.to_str().unwrap()]);
    let out = stdout(&run(&["imeasure", path.to_str().unwrap()]));
    for line in out.lines().skip(1) {
        let (k, v) = line.split_once('\t').unwrap();
        if k.contains(',') {
            assert_eq!(v, "0.000000", "{line}");
        }
    }
}

#[test]
fn balanced_exit_codes() {
    assert_eq!(run(&["balanced", &fixture("sensors_noisy.json")]).status.code(), Some(0));
    assert_eq!(run(&["balanced", &fixture("sensors_close.json")]).status.code(), Some(0));
    let o = run(&["balanced", &fixture("sensors_spread.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT BALANCED"));

    let dir = tempfile::tempdir().unwrap();
    let two = dir.path().join("two.json");
    run(&["gen", "sensor", "--rho", "0.3", "--sigma", "0.1,0.4", "-o", two.to_str().unwrap()]);
    assert_eq!(run(&["balanced", two.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn pstar_verdicts() {
    let o = run(&["pstar", &fixture("pairwise_shared.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("r* = (1.500000, 1.500000, 1.500000)"));

    let o = run(&["pstar", &fixture("single_pair.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violated subset {1}"));

    assert_eq!(run(&["pstar", &fixture("skewed_pairs.json")]).status.code(), Some(1));

    let o = run(&["pstar", "--slepian-wolf", &fixture("pairwise_shared.json")]);
    assert!(stdout(&o).contains("sum over {1,2,3} >= 6.000000"));
}

#[test]
fn kappa_verdicts() {
    let src = fixture("skewed_pairs.json");
    let o = run(&["kappa", &src, "--channel", &fixture("channel_unit.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("EXACT κ* = 10"), "{}", stdout(&o));

    let o = run(&["kappa", &src, "--channel", &fixture("channel_10_4_4.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("BOUNDS [1.25, 1.5]"), "{}", stdout(&o));

    let o = run(&["kappa", &src, "--channel", &fixture("channel_dead.json")]);
    assert!(stdout(&o).contains("UNBOUNDED"));

    let o = run(&["kappa", &fixture("pairwise_shared.json"), "--channel", &fixture("channel_unit.json")]);
    assert!(stdout(&o).contains("EXACT κ* = 3"));
}

#[test]
fn kappa_rejects_mismatched_users() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("ch.json");
    std::fs::write(&ch, r#"{"field_order":2,"uplink_noise_entropy":0,"downlink_noise_entropies":[0,0]}"#).unwrap();
    let o = run(&["kappa", &fixture("skewed_pairs.json"), "--channel", ch.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn storage_reports() {
    let out = stdout(&run(&["storage", &fixture("pairwise_shared.json")]));
    assert!(out.contains("optimal storage rate = 4.500000"));
    assert!(out.contains("(applicable)"));
    let out = stdout(&run(&["storage", &fixture("single_pair.json")]));
    assert!(out.contains("optimal storage rate = 4.000000"));
    assert!(out.contains("not applicable"));

    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.json");
    run(&["gen", "component", "--users", "3", "-o", zero.to_str().unwrap()]);
    assert!(stdout(&run(&["storage", zero.to_str().unwrap()])).contains("optimal storage rate = 0.000000"));
}

#[test]
fn json_mode_is_one_object_with_matching_numbers() {
    for args in [
        vec!["info"],
        vec!["imeasure"],
        vec!["balanced"],
        vec!["pstar"],
        vec!["storage"],
    ] {
        let mut full = vec!["--json"];
        full.extend(args);
        let path = fixture("sensors_close.json");
        full.push(&path);
        let out = stdout(&run(&full));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{full:?}: {e}\n{out}"));
        assert!(v.is_object());
    }
    let human = stdout(&run(&["storage", &fixture("sensors_close.json")]));
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["--json", "storage", &fixture("sensors_close.json")]))).unwrap();
    let rate = v["optimal_rate"].as_f64().unwrap();
    assert!(human.contains(&format!("optimal storage rate = {rate:.6}")));

    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&[
        "--json",
        "kappa",
        &fixture("skewed_pairs.json"),
        "--channel",
        &fixture("channel_10_4_4.json"),
    ])))
    .unwrap();
    assert_eq!(v["result"]["verdict"], "bounds");
    assert_eq!(v["result"]["upper"], 1.5);
    assert_eq!(v["result"]["witness"]["rates"].as_array().unwrap().len(), 3);
}

#[test]
fn output_is_deterministic() {
    for cmd in ["info", "imeasure", "balanced", "pstar", "storage"] {
        let a = run(&[cmd, &fixture("sensors_spread.json")]);
        let b = run(&[cmd, &fixture("sensors_spread.json")]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn tolerance_flag_and_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_relayrate"))
        .args(["pstar", &fixture("pairwise_shared.json")])
        .env("RELAYRATE_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_relayrate"))
        .args(["pstar", &fixture("single_pair.json")])
        .env("RELAYRATE_TOL", "0.6")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["--tol", "0.6", "pstar", &fixture("single_pair.json")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn strict_mode_rejects_non_entropic_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"type":"profile","users":2,"entropies":[{"subset":[1],"H":2},{"subset":[2],"H":1},{"subset":[1,2],"H":1.5}]}"#,
    )
    .unwrap();
    let o = run(&["info", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(run(&["--strict", "info", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn gen_round_trips_through_info() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let o = run(&["gen", "sensor", "--rho", "0.2", "--sigma", "0.1,0.12,0.14", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(fixture("sensors_close.json")).unwrap());
    assert_eq!(run(&["gen", "component", "--users", "3", "--rate", "4=1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "sensor", "--rho", "1.5", "--sigma", "0.1,0.2"]).status.code(), Some(2));
}
