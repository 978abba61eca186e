use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_compgen");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("COMPGEN_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.json")
}

/// A 1% corpus without concatenation, generated once through the environment override.
fn small_corpus() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(BIN)
            .args(["generate", "--scale", "0.01", "--wo-concat", "--threads", "2"])
            .env("COMPGEN_OUT_DIR", dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        dir
    })
    .path()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", "--config", default_config().to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    let dir = tempfile::tempdir().unwrap();
    let grammar = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/grammar.pcfg")).unwrap();
    let broken = grammar.replacen("s_decl\tS -> Clause .\t0.85", "s_decl\tS -> Clause .\t0.80", 1);
    assert_ne!(broken, grammar);
    fs::write(dir.path().join("broken.pcfg"), broken).unwrap();
    let cfg = dir.path().join("broken.json");
    fs::write(&cfg, r#"{"paths": {"grammar": "broken.pcfg"}}"#).unwrap();
    let bad = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("S: lhs S sums to"), "{}", stdout(&bad));

    fs::write(&cfg, r#"{"paths": {"grammar": "missing.pcfg"}}"#).unwrap();
    let missing = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("missing.pcfg"), "{}", stderr(&missing));

    let nofile = run(&["validate", "--config", "/nonexistent/config.json"]);
    assert_eq!(nofile.status.code(), Some(2));
}

#[test]
fn generate_honours_scale_and_wo_concat() {
    let dir = small_corpus();
    let m = manifest(dir);
    assert_eq!(m["counts"]["train"], 438);
    assert_eq!(m["counts"]["dev"], 50);
    assert_eq!(m["counts"]["test"], 50);
    assert_eq!(m["counts"]["gen"], 760);
    assert_eq!(m["train"]["concatenated"], 0);
    assert_eq!(m["config"]["concatenate"], false);
    assert_eq!(m["config"]["out_dir"], dir.display().to_string());
    for split in ["train", "dev", "test", "gen"] {
        let jsonl = fs::read_to_string(dir.join(format!("{split}.jsonl"))).unwrap();
        let tsv = fs::read_to_string(dir.join(format!("{split}.tsv"))).unwrap();
        assert_eq!(jsonl.lines().count(), m["counts"][split].as_u64().unwrap() as usize);
        assert_eq!(tsv.lines().count(), jsonl.lines().count() + 1);
    }
}

#[test]
fn out_flag_beats_environment_and_output_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["generate", "--scale", "0.01", "--wo-concat", "--threads", "1", "--out", a.path().to_str().unwrap()])
        .env("COMPGEN_OUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!env_dir.path().join("manifest.json").exists());
    for f in ["train.jsonl", "dev.jsonl", "test.jsonl", "gen.jsonl", "gen.tsv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(small_corpus().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn audit_passes_then_catches_a_leak() {
    let dir = small_corpus();
    let ok = run(&["audit", dir.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}{}", stdout(&ok), stderr(&ok));

    let tampered = tempfile::tempdir().unwrap();
    for f in ["train.jsonl", "dev.jsonl", "test.jsonl", "manifest.json"] {
        fs::copy(dir.join(f), tampered.path().join(f)).unwrap();
    }
    let gen = fs::read_to_string(dir.join("gen.jsonl")).unwrap();
    let line = gen.lines().find(|l| l.contains("\"pattern\":\"pp_in_subj\"")).unwrap();
    let mut train = fs::read_to_string(dir.join("train.jsonl")).unwrap();
    train.push_str(&line.replace("\"split\":\"gen\"", "\"split\":\"train\""));
    train.push('\n');
    fs::write(tampered.path().join("train.jsonl"), train).unwrap();
    let bad = run(&["audit", tampered.path().to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let out = stdout(&bad);
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.starts_with("pp_in_subj: leak"), "{out}");
}

#[test]
fn score_references_and_alignment_errors() {
    let dir = small_corpus();
    let work = tempfile::tempdir().unwrap();
    let gen = fs::read_to_string(dir.join("gen.jsonl")).unwrap();
    let records: Vec<Value> = gen.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let plain: String = records.iter().map(|r| format!("{}\n", r["target"].as_str().unwrap())).collect();
    let hyp = work.path().join("hyp.txt");
    fs::write(&hyp, plain).unwrap();
    let report = work.path().join("report.json");
    let out = run(&[
        "score",
        "--corpus",
        dir.to_str().unwrap(),
        "--hyp",
        hyp.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("overall"));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["overall"]["exact_pct"], 100.0);
    assert_eq!(rep["overall"]["bleu"], 100.0);
    assert_eq!(rep["overall"]["partial_pct"], 100.0);
    assert_eq!(rep["per_pattern"].as_array().unwrap().len(), 42);
    assert_eq!(rep["per_group"].as_array().unwrap().len(), 3);

    let mut lines: Vec<String> =
        records.iter().map(|r| serde_json::json!({"id": r["id"], "hypothesis": r["target"]}).to_string()).collect();
    lines.swap(0, 1);
    let shuffled = work.path().join("shuffled.jsonl");
    fs::write(&shuffled, lines.join("\n")).unwrap();
    let bad = run(&["score", "--corpus", dir.to_str().unwrap(), "--hyp", shuffled.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("line 1"), "{}", stderr(&bad));
}

#[test]
fn score_worked_partial_match_trio() {
    let dir = tempfile::tempdir().unwrap();
    let rec = |id: &str| {
        serde_json::json!({
            "id": id, "split": "gen", "pattern": "subj_to_obj_common",
            "source": "The woman found the panda .", "target": "jyosei ga panda o mituke ta",
            "annotation": {"constituent": ["panda"], "expected_role": "direct_object",
                           "depth": {"cp": 0, "pp": 0, "ce": 0, "adj": 0}, "in_cp": false},
            "provenance": {"seed": 0, "grammar": "gen:subj_to_obj_common", "augmentation": [], "trees": []}
        })
        .to_string()
    };
    let gen: String = ["a", "b", "c"].iter().map(|id| rec(id) + "\n").collect();
    fs::write(dir.path().join("gen.jsonl"), gen).unwrap();
    let hyp = dir.path().join("hyp.txt");
    fs::write(&hyp, "jyosei ga inu o mituke ta\npanda ga jyosei o mituke ta\ndansei ga panda o mituke ta\n").unwrap();
    let report = dir.path().join("r.json");
    let out = run(&[
        "score",
        "--corpus",
        dir.path().to_str().unwrap(),
        "--hyp",
        hyp.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["overall"]["exact_pct"], 0.0);
    assert_eq!(rep["overall"]["partial_pct"].as_f64().unwrap(), 100.0 / 3.0);
}

#[test]
fn inspect_filters() {
    let dir = small_corpus();
    let d = dir.to_str().unwrap();
    let out = stdout(&run(&["inspect", d, "--pattern", "pp_in_subj", "--split", "gen"]));
    let heads: Vec<&str> = out.lines().filter(|l| !l.starts_with(' ') && l.contains('[')).collect();
    assert_eq!(heads.len(), 20);
    assert!(heads.iter().all(|h| h.ends_with("[gen] pp_in_subj")));
    assert!(out.ends_with("20 record(s) shown\n"));

    let out = stdout(&run(&["inspect", d, "--depth", "cp=5"]));
    let depths: Vec<&str> = out.lines().filter(|l| l.starts_with("  depths:")).collect();
    assert!(!depths.is_empty());
    assert!(depths.iter().all(|l| l.contains("cp=5 ")));

    let out = stdout(&run(&["inspect", d, "--regex", "^Who ", "--limit", "3"]));
    assert!(out.ends_with("3 record(s) shown\n"));

    let empty = tempfile::tempdir().unwrap();
    for s in ["train", "dev", "test", "gen"] {
        fs::write(empty.path().join(format!("{s}.jsonl")), "").unwrap();
    }
    let o = run(&["inspect", empty.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 record(s) shown\n");

    let bad = run(&["inspect", d, "--depth", "cp"]);
    assert_eq!(bad.status.code(), Some(2));
}
