mod common;

use std::process::Command;

use common::configs_dir;
use tiltlab::cli::config::SurfaceConfig;
use tiltlab::cli::run;

fn cfg(name: &str) -> String {
    configs_dir().join(format!("{name}.json")).display().to_string()
}

/// Runs in-process and returns `(exit, stdout, stderr)`.
fn tl(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("tiltlab").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = tl(args);
    assert_eq!(code, 0, "args {args:?}\nstderr: {err}\nstdout: {out}");
    out
}

fn input_error(args: &[&str]) -> String {
    let (code, out, err) = tl(args);
    assert_eq!(code, 2, "args {args:?}\nstdout: {out}");
    assert!(out.is_empty());
    err
}

#[test]
fn constant_examples() {
    let q = cfg("quintic");
    let out = ok(&["constant", "--config", &q]);
    assert!(out.contains("C_S = 2\n"), "{out}");
    assert!(out.contains("closed-form cross-check = match\n"), "{out}");
    assert!(out.contains("d_fallback = false\n"));

    assert!(ok(&["constant", "--config", &cfg("quasi_elliptic")]).contains("C_S = 1\n"));
    assert!(ok(&["constant", "--config", &cfg("kodaira0")]).contains("C_S = 0\n"));
    assert!(ok(&["constant", "--config", &cfg("p1xp1")]).contains("C_S = 0\n"));
}

#[test]
fn check_examples() {
    let out = ok(&["check", "--config", &cfg("quintic"), "--ch0", "2", "--ch1", "0", "--ch2", "1"]);
    assert!(out.contains("delta = -4\ndelta_tilde = 4\n"), "{out}");
    assert!(out.contains("corrected_bogomolov = holds"));
    assert!(!out.contains("cannot be mu-semistable"));

    let out = ok(&["check", "--config", &cfg("kodaira0"), "--ch0", "2", "--ch1", "0", "--ch2", "1"]);
    assert!(out.contains("corrected_bogomolov = fails"));
    assert!(out.contains("class cannot be mu-semistable"));

    let out = ok(&["check", "--config", &cfg("quintic"), "--ch0", "1", "--ch1", "0", "--ch2", "0"]);
    assert!(out.contains("delta_tilde = 2\n"), "{out}");

    let out =
        ok(&["check", "--config", &cfg("p1xp1"), "--ch0", "2", "--ch1", "1,-1/2", "--ch2", "-3/4", "--B", "1/3,2"]);
    let get = |key: &str| out.lines().find_map(|l| l.strip_prefix(key)).unwrap().to_string();
    assert_eq!(get("delta = "), get("delta_B = "));
}

#[test]
fn wall_examples() {
    let base = [
        "wall",
        "--config",
        &cfg("p1xp1"),
        "--e-ch0",
        "2",
        "--e-ch1",
        "1,0",
        "--f-ch0",
        "1",
        "--f-ch1",
        "0,1",
        "--L",
        "1,1",
    ];
    let found = ok(&[&base[..], &["--M", "1,3"]].concat());
    assert!(found.contains("L.delta = 1/2\nM.delta = -1/2\nt = 1/2\n"), "{found}");
    assert!(found.contains("wall = found"));
    let none = ok(&[&base[..], &["--M", "2,1"]].concat());
    assert!(none.contains("wall = none"), "{none}");
    let degenerate = ok(&[
        "wall",
        "--config",
        &cfg("p1xp1"),
        "--e-ch0",
        "2",
        "--e-ch1",
        "2,4",
        "--f-ch0",
        "1",
        "--f-ch1",
        "1,2",
        "--L",
        "1,1",
        "--M",
        "1,3",
    ]);
    assert!(degenerate.contains("wall = degenerate"));

    let csv = ok(&[&base[..], &["--M", "1,3", "--steps", "5", "--format", "csv"]].concat());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "t,mu_t(E),mu_t(F)");
    // At the wall the two slopes agree.
    assert_eq!(lines[3], "1/2,1,1");
    assert!(input_error(&[&base[..], &["--M", "1,3", "--steps", "1"]].concat()).contains("--steps"));
}

#[test]
fn charge_heart_support() {
    let q = cfg("quintic");
    let out = ok(&["charge", "--config", &q, "--ch0", "0", "--ch1", "0", "--ch2", "1"]);
    assert!(out.contains("Re Z = -1\nIm Z = 0\n"), "{out}");

    let out = ok(&["support", "--config", &q, "--B", "0", "--C_H", "0"]);
    assert!(out.contains("support = NegDefinite"));
    assert!(out.contains("kernel_dim = 1\n"));
    assert!(out.contains("restricted_signature = (0,1,0)"));

    let err = input_error(&["support", "--config", &q, "--H", "0"]);
    assert!(err.contains("--H"), "{err}");

    let out = ok(&["heart", "--config", &q, "--ch0", "1", "--ch1", "0", "--ch2", "0"]);
    assert!(out.contains("torsion_pair = boundary-F"));
    assert!(out.contains("boundary_chain = certified"));
    let out = ok(&["heart", "--config", &q, "--ch0", "1", "--ch1", "1", "--ch2", "0"]);
    assert!(out.contains("torsion_pair = T\n") && out.contains("allowed_region = true"), "{out}");
    let out = ok(&["heart", "--config", &q, "--ch0", "1", "--ch1", "0", "--ch2", "9"]);
    assert!(out.contains("heart_object = rejected"));
}

#[test]
fn support_grid_independent_of_jobs() {
    let table = |jobs: &str| {
        ok(&[
            "support",
            "--config",
            &cfg("p1xp1"),
            "--grid-scales",
            "1,2,7/2",
            "--grid-shifts",
            "-1,0,1/3",
            "--jobs",
            jobs,
            "--format",
            "csv",
        ])
    };
    let one = table("1");
    assert_eq!(one, table("4"));
    assert_eq!(one.lines().count(), 10);
    assert!(one.lines().skip(1).all(|l| l.ends_with(",2,\"(0,2,0)\",NegDefinite")), "{one}");
}

#[test]
fn hyper_examples() {
    assert!(ok(&["hyper", "qsig", "--n", "3", "--d", "3", "--l", "1"]).contains("q_signature = (1,1,0)"));
    assert!(ok(&["hyper", "qeval", "--n", "3", "--d", "3", "--l", "1", "--b", "3", "--a", "1"]).contains("q_Y = 0\n"));
    let out = ok(&["hyper", "kernel", "--n", "3", "--d", "3", "--l", "1", "--t", "1"]);
    assert!(out.contains("kernel = NegDefinite"), "{out}");
    let out = ok(&["hyper", "Q", "--n", "2", "--d", "5", "--ch0", "2", "--b", "3", "--h-ch2", "-1/2"]);
    assert!(out.contains("Q_Y = 19\ndelta_bar = 19\n"), "{out}");
    input_error(&["hyper", "qsig", "--n", "1", "--d", "3"]);
    input_error(&["hyper", "qsig", "--n", "3", "--d", "0"]);
    input_error(&["hyper", "qeval", "--n", "3", "--d", "3", "--l", "2", "--b", "1", "--a", "1"]);
}

#[test]
fn kvbound_examples() {
    let q = cfg("quintic");
    let out = ok(&["kvbound", "--config", &q, "--L", "1"]);
    assert!(out.contains("bound = 8\n") && out.contains("nonvanishing = consistent"));
    assert!(ok(&["kvbound", "--config", &q, "--L", "2"]).contains("nonvanishing = inconsistent"));
    assert!(ok(&["kvbound", "--config", &cfg("kodaira0"), "--L", "1"]).contains("nonvanishing = inconsistent"));
}

#[test]
fn input_errors() {
    let q = cfg("quintic");
    assert!(input_error(&["check", "--config", &q, "--ch0", "1", "--ch1", "0.5"]).contains("--ch1"));
    assert!(input_error(&["check", "--config", &q, "--ch0", "1", "--ch1", "1,2"]).contains("--ch1"));
    assert!(input_error(&["constant", "--config", "/nonexistent/x.json"]).contains("cannot read"));
    input_error(&["constant"]);
    input_error(&["frobnicate"]);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(&q).unwrap().replace(r#"[["5"]]"#, "[[5.0]]");
    std::fs::write(&path, text).unwrap();
    let err = input_error(&["constant", "--config", path.to_str().unwrap()]);
    assert!(err.contains("ns.gram[0][0]") && err.contains("line 7"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = tl(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage: tiltlab"));
}

#[test]
fn json_and_csv_formats() {
    let out = ok(&["constant", "--config", &cfg("quintic"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["C_S"], "2");
    assert_eq!(v["verdicts"]["closed-form cross-check"], "match");
    let csv = ok(&["constant", "--config", &cfg("quintic"), "--format", "csv"]);
    assert!(csv.starts_with("section,key,value\nmeta,command,"));
    assert!(csv.contains("results,C_S,2\n"));
}

#[test]
fn normalize_roundtrip() {
    for name in ["quintic", "quasi_elliptic", "kodaira0", "p1xp1"] {
        let original = SurfaceConfig::parse(&std::fs::read_to_string(cfg(name)).unwrap()).unwrap();
        let text = ok(&["normalize", "--config", &cfg(name)]);
        assert_eq!(SurfaceConfig::parse(&text).unwrap(), original);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.json");
        std::fs::write(&path, &text).unwrap();
        assert_eq!(ok(&["normalize", "--config", path.to_str().unwrap()]), text);
    }
}

#[test]
fn binary_exit_codes_and_seeded_selftest() {
    let bin = env!("CARGO_BIN_EXE_tiltlab");
    let run_bin = |args: &[&str], seed: Option<&str>| {
        let mut c = Command::new(bin);
        c.args(args);
        match seed {
            Some(s) => c.env("TILTLAB_SEED", s),
            None => c.env_remove("TILTLAB_SEED"),
        };
        c.output().unwrap()
    };
    let a = run_bin(&["selftest", "--cases", "60"], Some("17"));
    let b = run_bin(&["selftest", "--cases", "60"], Some("17"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("seed = 17\n"));
    assert_eq!(run_bin(&["selftest"], Some("nope")).status.code(), Some(2));
    assert_eq!(run_bin(&["constant", "--config", "/nonexistent"], None).status.code(), Some(2));
    let out = run_bin(&["constant", "--config", &cfg("quintic")], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
}
