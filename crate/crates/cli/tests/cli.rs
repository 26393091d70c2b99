use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resurgence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eval_negative_one() {
    let o = run(&["eval", "-z", "-1", "--digits", "50", "--format", "kv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("value.re = -3.8010481260968401677754215655180836257093716939"), "{out}");
    assert!(out.contains("value.im = 0\n"), "{out}");
}

#[test]
fn eval_origin_and_crosscheck() {
    let o = run(&["eval", "-z", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value.re    0\n"));
    let o = run(&["eval", "-z", "0.5+2i", "--crosscheck", "--method", "bilateral"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("crosscheck  passed"));
}

#[test]
fn eval_on_branch_cut_is_a_domain_error() {
    let o = run(&["eval", "-z", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("branch cut"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["eval", "--bogus"][..],
        &["eval", "-z", "1+"],
        &["eval", "-z", "-1", "--method", "nonsense"],
        &["polys"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn precision_shortfall_exits_one() {
    let o = run(&["scan", "--u-min", "6", "--u-max", "100", "--digits", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("precision"));
    let o = run(&["fit", "--digits", "100"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn polys_text_is_exact() {
    let o = run(&["polys", "--K", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "# polytable kind=P K=3\n\
         -2/3 1/1\n\
         47/2160 7/24 -1/1 2/3\n\
         -433/24192 -73/1920 1/3 -1/36 -2/3 2/5\n\
         28583/2488320 -106619/2903040 -223/1152 433/1728 31/72 -5/12 -2/9 4/21\n"
    );
    let o = run(&["polys", "--K", "0"]);
    assert_eq!(stdout(&o), "# polytable kind=P K=0\n-2/3 1/1\n");
}

#[test]
fn polys_beyond_known_constants_explains_itself() {
    let o = run(&["polys", "--K", "80"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("resurgence fit"));
}

#[test]
fn out_file_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    let p = path.to_str().unwrap();
    let o = run(&["polys", "--K", "5", "--out", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("smoothness: 6 of 6"));
    let text = std::fs::read_to_string(&path).unwrap();
    let table = resurgence::polyengine::PolyTable::from_text(&text).unwrap();
    assert_eq!(table.to_text(), text);
    let manifest = std::fs::read_to_string(format!("{p}.manifest")).unwrap();
    assert!(manifest.contains("manifest.command = polys"));
    assert!(manifest.contains("manifest.output_digest = sha256:"));
}

#[test]
fn runs_are_deterministic() {
    let a = run(&["scan", "--u-min", "20", "--u-max", "40", "--count", "4", "--format", "csv", "--threads", "2"]);
    let b = run(&["scan", "--u-min", "20", "--u-max", "40", "--count", "4", "--format", "csv", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let out = stdout(&a);
    assert!(out.starts_with("u,x,S,predicted,residual,digits\n"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn deltas_listing() {
    let o = run(&["deltas", "--K", "2"]);
    assert_eq!(stdout(&o), "# deltas K=2\n1/1\n-1/24 0/1 2/1\n1/1152 -1/12 -1/12 4/3 2/1\n");
}

#[test]
fn fit_round_trips_through_polys() {
    let dir = tempfile::tempdir().unwrap();
    let consts = dir.path().join("c.txt");
    let c = consts.to_str().unwrap();
    let o = run(&["fit", "--K", "8", "--constants-out", c, "--format", "kv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("constants.8.value = -4418823132978307/90349817875660800"));
    let from_fit = run(&["polys", "--K", "8", "--constants", c]);
    let shipped = run(&["polys", "--K", "8"]);
    assert_eq!(stdout(&from_fit), stdout(&shipped));
}

#[test]
fn constants_report() {
    let o = run(&["constants", "--k-hi", "100", "--format", "kv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("C = 1.0688539158679530"), "{out}");
    assert!(out.contains("in_corridor = true"));
}

#[test]
fn verify_all_quick() {
    let o = run(&["verify-all", "--quick"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("criterion")).count(), 10, "{out}");
    assert_eq!(o.status.code(), Some(0), "{out}");
}
