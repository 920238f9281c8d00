use std::path::Path;

use qjc_cli::run_with;

fn run(args: &[&str], dir: Option<&Path>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qjc").chain(args.iter().copied());
    let code = run_with(argv, dir, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn qnum_prints_the_value() {
    let (code, out, _) = run(&["qnum", "--kind", "boson", "--n", "3", "--q", "0.5"], None);
    assert_eq!(code, 0);
    assert_eq!(out, "5.25\n");
}

#[test]
fn qnum_symbolic() {
    let (code, out, _) = run(&["qnum", "--kind", "fermion", "--n", "3", "--q", "symbolic"], None);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "q^2 - q + 1");
}

#[test]
fn rewrite_symbolic() {
    let (code, out, _) = run(&["rewrite", "a adag adag", "--q", "symbolic"], None);
    assert_eq!(code, 0);
    assert_eq!(out, "q^2*adag^2*a + [2]_B*adag*qN(-1)\n");
}

#[test]
fn rewrite_syntax_error_is_bad_input() {
    let (code, _, err) = run(&["rewrite", "a + * adag"], None);
    assert_eq!(code, 2);
    assert!(err.contains("syntax error"), "{err}");
}

#[test]
fn unknown_subcommand_exits_2_with_usage() {
    let (code, _, err) = run(&["frobnicate"], None);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn bad_q_exits_2() {
    assert_eq!(run(&["qnum", "--kind", "boson", "--n", "3", "--q", "-1"], None).0, 2);
    assert_eq!(run(&["euler", "--q", "symbolic"], None).0, 2);
}

#[test]
fn failed_check_exits_1_and_names_the_relation() {
    // boson Euler kernel does not decay, so the moments miss [n]_B!
    let (code, _, err) = run(&["euler", "--kind", "boson", "--q", "0.9"], None);
    assert_eq!(code, 1);
    assert!(err.contains("lattice integral of x^n exp(-x) = [n]!"), "{err}");
}

#[test]
fn passing_suite_exits_0() {
    let (code, _, err) = run(&["fock-verify", "--nb", "8", "--mf", "6", "--q", "0.3,0.5,0.9"], None);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn report_goes_to_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["qnum", "--kind", "boson", "--n", "3", "--format", "csv"], Some(dir.path()));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("qnum.csv")).unwrap();
    assert!(text.starts_with("# config: command=qnum q=0.5 nb=40 mf=6"));
    assert!(text.contains("qnum,0,value,5.2500000000000000e0\n"));
}

#[test]
fn unwritable_path_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("r.json");
    let (code, _, err) = run(
        &["qnum", "--kind", "boson", "--n", "3", "--out", bad.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 2);
    assert!(err.contains("cannot write report"), "{err}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &Path| {
        vec![
            "scs-overlap".to_string(),
            "--q".into(),
            "0.3,0.5".into(),
            "--out".into(),
            p.to_str().unwrap().to_string(),
        ]
    };
    let a_args = args(&a);
    let b_args = args(&b);
    run(&a_args.iter().map(String::as_str).collect::<Vec<_>>(), None);
    run(&b_args.iter().map(String::as_str).collect::<Vec<_>>(), None);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["jc-spectrum", "--nb", "4", "--mf", "2", "--q", "0.7"];
    let mut j = base.to_vec();
    j.push("--format");
    j.push("json");
    let mut c = base.to_vec();
    c.push("--format");
    c.push("csv");
    run(&j, Some(dir.path()));
    run(&c, Some(dir.path()));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("jc-spectrum.json")).unwrap()).unwrap();
    let csv_text = std::fs::read_to_string(dir.path().join("jc-spectrum.csv")).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv_text.as_bytes());
    let csv_vals: Vec<String> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[0] != "checks" && &r[2] == "eigenvalue")
        .map(|r| r[3].to_string())
        .collect();
    let json_text = std::fs::read_to_string(dir.path().join("jc-spectrum.json")).unwrap();
    let rows = json["sections"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv_vals.len());
    for (row, v) in rows.iter().zip(&csv_vals) {
        assert_eq!(row[1].as_f64().unwrap(), v.parse::<f64>().unwrap());
        assert!(json_text.contains(v.as_str()));
    }
}

#[test]
fn config_echo_is_in_report() {
    let dir = tempfile::tempdir().unwrap();
    run(&["jc-trace", "--nb", "3", "--mf", "3", "--strict"], Some(dir.path()));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("jc-trace.json")).unwrap()).unwrap();
    let cfg = json["config"].as_array().unwrap();
    let get = |k: &str| cfg.iter().find(|e| e["key"] == k).map(|e| e["value"].as_str().unwrap().to_string());
    assert_eq!(get("strict").as_deref(), Some("true"));
    assert_eq!(get("nb").as_deref(), Some("3"));
    assert_eq!(get("omega1").as_deref(), Some("0.5"));
    assert!(get("out").is_none());
}

#[test]
fn classical_spectrum_needs_one_fermion_level() {
    assert_eq!(run(&["jc-spectrum", "--classical", "--mf", "4", "--nb", "4"], None).0, 2);
    let (code, _, err) = run(&["jc-spectrum", "--classical", "--mf", "2", "--nb", "10", "--q", "0.9999"], None);
    assert_eq!(code, 0, "{err}");
}
