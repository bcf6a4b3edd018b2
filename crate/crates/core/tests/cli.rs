use std::path::Path;
use std::process::{Command, Output};

fn qcop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcop"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value_of(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no '{key}' line in:\n{text}"))
        .to_string()
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &p]);
    let o = qcop(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn gen_solve_bound_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(
        dir.path(),
        "a.qscp",
        &["--m", "6", "--n", "10", "--qclass", "4"],
    );

    let brute = stdout(&qcop(&["solve", "--in", &inst, "--method", "brute"]));
    let bb = stdout(&qcop(&["solve", "--in", &inst]));
    let opt: f64 = value_of(&brute, "value").parse().unwrap();
    assert_eq!(value_of(&bb, "value"), value_of(&brute, "value"));
    assert_eq!(value_of(&bb, "proven"), "true");

    for variant in ["nlb", "nlbr", "nlbr1"] {
        let out = stdout(&qcop(&["bound", "--in", &inst, "--variant", variant]));
        let bound: f64 = value_of(&out, "bound").parse().unwrap();
        assert!(bound <= opt, "{variant}: {bound} > {opt}");
    }
}

#[test]
fn transforms_keep_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(
        dir.path(),
        "a.qscp",
        &["--m", "5", "--n", "9", "--qclass", "6"],
    );
    let base = value_of(
        &stdout(&qcop(&["solve", "--in", &inst, "--method", "brute"])),
        "value",
    );
    for repr in [
        "sym",
        "ut",
        "cnx",
        "cnv",
        "symi",
        "dannil",
        "lannil",
        "transpose",
    ] {
        let out = dir.path().join(format!("{repr}.qscp"));
        let out = out.to_str().unwrap();
        let o = qcop(&["transform", "--in", &inst, "--repr", repr, "--out", out]);
        assert!(
            o.status.success(),
            "{repr}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = std::fs::read_to_string(out).unwrap();
        assert!(
            text.contains(&format!("# repr {}", repr.to_uppercase()))
                || !["sym", "ut", "cnx", "cnv", "symi"].contains(&repr)
        );
        let v = value_of(
            &stdout(&qcop(&["solve", "--in", out, "--method", "brute"])),
            "value",
        );
        assert_eq!(v, base, "{repr}");
    }
}

#[test]
fn bench_bounds_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        "sweep.classes = 4,5\nsweep.m = 5\nsweep.n = 9\nsweep.count = 2\nrepresentations = ORG,SYM,CNX\nvariants = nlb,nlbr\n",
    )
    .unwrap();
    let o = qcop(&[
        "bench",
        "bounds",
        "--config",
        cfg.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&csv).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("schema=1"));
    assert!(lines.next().unwrap().starts_with("instance,m,n,seed"));
    // 4 instances × 3 representations × 2 variants
    assert_eq!(
        lines.filter(|l| l.ends_with(",ok")).count(),
        4 * 3 * 2,
        "{rows}"
    );
    assert!(stdout(&o).contains("SYM"));
}

#[test]
fn bench_solve_reports_consistent_optima() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "instance = 5 9 default 4\ninstance = 4 8 3 7\nrepresentations = ORG,SYM,UT\n",
    )
    .unwrap();
    let o = qcop(&["bench", "solve", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().count() > 2 * 3);
}

#[test]
fn wilcoxon_on_pairs_file() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    std::fs::write(&pairs, "sym,org\n5,3\n7,2\n4,4\n9,1\n6,5\n8,2\n").unwrap();
    let out = stdout(&qcop(&[
        "stats",
        "wilcoxon",
        "--pairs",
        pairs.to_str().unwrap(),
    ]));
    assert_eq!(value_of(&out, "n_effective"), "5");
    assert_eq!(value_of(&out, "w_plus"), "15");
    assert_eq!(value_of(&out, "method"), "exact");
    // all five signs positive: 2 of 32 patterns are as extreme
    assert_eq!(value_of(&out, "p_value"), "0.0625");
}

#[test]
fn export_lp_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_to(
        dir.path(),
        "a.qscp",
        &["--m", "4", "--n", "6", "--qclass", "1"],
    );
    let lp = stdout(&qcop(&["export-lp", "--in", &inst]));
    assert!(lp.starts_with("\\ QSCP m=4 n=6"));
    assert!(lp.contains("Subject To\n c1:") && lp.contains("c4:") && lp.ends_with("End\n"));
    let stats = stdout(&qcop(&["analyze", "--in", &inst]));
    assert_eq!(value_of(&stats, "m"), "4");
    assert_eq!(value_of(&stats, "n"), "6");
}

#[test]
fn load_orlib_converts() {
    let dir = tempfile::tempdir().unwrap();
    let scp = dir.path().join("tiny.txt");
    std::fs::write(&scp, "2 3\n4 5 6\n2 1 2\n2 2 3\n").unwrap();
    let o = qcop(&["load-orlib", "--in", scp.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("QSCP 2 3\n"), "{text}");
    let native = dir.path().join("tiny.qscp");
    std::fs::write(&native, &text).unwrap();
    let solved = stdout(&qcop(&["solve", "--in", native.to_str().unwrap()]));
    assert_eq!(value_of(&solved, "value"), "5");
}

#[test]
fn exit_codes() {
    assert_eq!(qcop(&["--help"]).status.code(), Some(0));
    assert_eq!(qcop(&["gen", "--m", "3"]).status.code(), Some(1));
    assert_eq!(
        qcop(&["gen", "--m", "3", "--n", "5", "--qclass", "9"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        qcop(&["solve", "--in", "/nonexistent/x.qscp"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 3\n1 1 1\n2 1 9\n2 2 3\n").unwrap();
    let o = qcop(&["load-orlib", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}
