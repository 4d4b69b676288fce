use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn llrcal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llrcal"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn llrcal")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn theory_prints_key_value_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = llrcal(dir.path(), &["theory", "--eer", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(value(&text, "mu"), 0.0);
    assert_eq!(value(&text, "cllr"), 1.0);

    let o = llrcal(dir.path(), &["theory", "--mu", "2"]);
    assert!((value(&stdout(&o), "eer") - 0.158655).abs() < 1e-6);
}

#[test]
fn calibrate_apply_evaluate_det_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sim = |seed: &str, out: &str| {
        let o = llrcal(
            d,
            &[
                "simulate", "--mu", "2", "--ntar", "20000", "--nnon", "20000", "--seed", seed,
                "--a", "2.5", "--b", "-1", "--out", out,
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    sim("1", "train.txt");
    sim("2", "eval.txt");

    let o = llrcal(
        d,
        &[
            "calibrate",
            "--method",
            "cmlg",
            "--scores",
            "train.txt",
            "--out",
            "c.cal",
        ],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((value(&text, "a") - 2.5).abs() < 0.1, "{text}");
    assert!((value(&text, "b") + 1.0).abs() < 0.1, "{text}");
    assert!((value(&text, "eer") - 0.158655).abs() < 0.01, "{text}");
    let cal = fs::read_to_string(d.join("c.cal")).unwrap();
    assert!(cal.contains("method cmlg"));

    let o = llrcal(
        d,
        &[
            "apply", "--cal", "c.cal", "--scores", "eval.txt", "--out", "e.llr",
        ],
    );
    assert!(o.status.success());

    let o = llrcal(d, &["evaluate", "--scores", "e.llr", "--report", "r.txt"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (min, cllr) = (value(&text, "min_cllr"), value(&text, "cllr"));
    assert!(min <= cllr && cllr - min < 0.02, "{text}");
    let report = fs::read_to_string(d.join("r.txt")).unwrap();
    for key in [
        "n_e 20000",
        "cllr ",
        "min_cllr ",
        "eer ",
        "det_slope ",
        "expect_r_nontarget ",
    ] {
        assert!(report.contains(key), "missing {key} in {report}");
    }

    let o = llrcal(d, &["det", "--scores", "e.llr", "--out", "det.csv"]);
    assert!(o.status.success());
    assert!((value(&stdout(&o), "slope") + 1.0).abs() < 0.1);
    let csv = fs::read_to_string(d.join("det.csv")).unwrap();
    assert!(csv.starts_with("threshold,p_miss,p_fa\n"));
    assert!(csv.trim_end().ends_with("inf,1,0"));
}

#[test]
fn exit_codes_follow_failure_family() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // usage error
    assert_eq!(llrcal(d, &["theory"]).status.code(), Some(2));
    assert_eq!(
        llrcal(d, &["theory", "--eer", "0.1", "--mu", "2"])
            .status
            .code(),
        Some(2)
    );
    // domain error
    assert_eq!(
        llrcal(d, &["theory", "--eer", "0.9"]).status.code(),
        Some(2)
    );

    // malformed score file
    fs::write(d.join("bad.txt"), "tgt 1.0\nmaybe 2.0\n").unwrap();
    let o = llrcal(d, &["evaluate", "--scores", "bad.txt", "--report", "r"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    // one class missing
    fs::write(d.join("tgt_only.txt"), "tgt 1.0\ntgt 2.0\n").unwrap();
    let o = llrcal(
        d,
        &["evaluate", "--scores", "tgt_only.txt", "--report", "r"],
    );
    assert_eq!(o.status.code(), Some(3));

    // separable training data
    fs::write(d.join("sep.txt"), "tgt 1\ntgt 2\nnon -1\nnon -2\n").unwrap();
    let o = llrcal(
        d,
        &[
            "calibrate",
            "--method",
            "logreg",
            "--scores",
            "sep.txt",
            "--out",
            "c",
        ],
    );
    assert_eq!(o.status.code(), Some(3));

    // unreadable input
    let o = llrcal(
        d,
        &[
            "evaluate",
            "--scores",
            "does-not-exist.txt",
            "--report",
            "r",
        ],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn calibration_without_coefficients_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("s.txt"), "tgt 1\nnon 0\n").unwrap();
    fs::write(d.join("c.cal"), "a 2\n").unwrap();
    let o = llrcal(
        d,
        &["apply", "--cal", "c.cal", "--scores", "s.txt", "--out", "o"],
    );
    assert_eq!(o.status.code(), Some(2));
}
