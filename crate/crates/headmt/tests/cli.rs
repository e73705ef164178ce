use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use headmt::format::{graph_to_string, load_table, save_model, save_table, tree_to_string};
use headmt_core::train::{Choice, CostTable};
use headmt_core::Cost;
use headmt_testkit::fixtures::*;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn headmt(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_headmt"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // The command may exit before reading its input.
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn translate_french_fixture() {
    let cfg = data("en-fr.config.json");
    let o = headmt(&["translate", "--config", path(&cfg)], &format!("{FR_SENTENCE}\n"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), format!("{FR_EXPECTED}\n"));
    let (s, t, b) = (data("en.json"), data("fr.json"), data("en-fr.bilex.json"));
    let o = headmt(
        &["translate", "--src-model", path(&s), "--tgt-model", path(&t), "--bilex", path(&b)],
        &format!("{FR_SENTENCE}\n"),
    );
    assert_eq!(stdout(&o), format!("{FR_EXPECTED}\n"));
}

#[test]
fn translate_trace_costs_add_up() {
    let cfg = data("en-fr.config.json");
    let o = headmt(&["translate", "--config", path(&cfg), "--trace"], &format!("{FR_SENTENCE}\n"));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let total = v["cost"].as_f64().unwrap();
    let mut sum = 0.0;
    for st in v["stages"].as_array().unwrap() {
        let s: f64 = st["choices"].as_array().unwrap().iter().map(|c| c["cost"].as_f64().unwrap()).sum();
        assert!((s - st["cost"].as_f64().unwrap()).abs() < 1e-9);
        assert!(st["ms"].as_f64().unwrap() >= 0.0);
        sum += s;
    }
    assert!((sum - total).abs() < 1e-9, "{sum} vs {total}");
    let names: Vec<&str> = v["stages"].as_array().unwrap().iter().map(|s| s["stage"].as_str().unwrap()).collect();
    assert_eq!(names, ["analyze", "transfer", "generate"]);
    let toks: Vec<&str> = v["tokens"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert_eq!(toks.join(" "), FR_EXPECTED);
}

#[test]
fn per_line_errors_keep_going() {
    let cfg = data("en-fr.config.json");
    let input = format!("{FR_SENTENCE}\n\nzzz qqq\n{FR_SENTENCE}\n");
    let o = headmt(&["translate", "--config", path(&cfg)], &input);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines, [FR_EXPECTED, "", "", FR_EXPECTED]);
    let err = stderr(&o);
    assert!(err.contains("line 2: empty sentence"), "{err}");
    assert!(err.contains("line 3:"), "{err}");
}

#[test]
fn parallel_output_keeps_input_order() {
    let model = data("en-ambig.json");
    let input: String = ["show flights to boston", "flights", "", "show flights", "cheap flights to boston"]
        .iter()
        .cycle()
        .take(40)
        .map(|s| format!("{s}\n"))
        .collect();
    let seq = headmt(&["analyze", "--model", path(&model), "--nbest", "2"], &input);
    let par = headmt(&["--parallel", "4", "analyze", "--model", path(&model), "--nbest", "2"], &input);
    assert_eq!(stdout(&seq), stdout(&par));
    assert_eq!(stderr(&seq), stderr(&par));
    assert_eq!(stdout(&seq).lines().count(), 40);
}

#[test]
fn analyze_output_shape() {
    let model = data("en.json");
    let o = headmt(&["analyze", "--model", path(&model)], &format!("{FR_SENTENCE}\n"));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["tokens"].as_array().unwrap().len(), 4);
    let d = &v["derivations"][0];
    assert!((d["cost"].as_f64().unwrap() - 5.7).abs() < 1e-9);
    assert_eq!(d["tree"]["word"], "flights");
    let keys: Vec<&String> = d["tree"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["word", "automaton", "state", "left", "right"]);
}

#[test]
fn generate_orders_graph() {
    let g = fragment(&[(0, "vols"), (1, "pas-chers"), (2, "à"), (3, "boston")], &[(0, "adj", 1), (0, "mod", 2), (2, "pobj", 3)]);
    let model = data("fr.json");
    let o = headmt(&["generate", "--model", path(&model)], &format!("{}\n", graph_to_string(&g)));
    assert_eq!(stdout(&o), format!("{FR_EXPECTED}\n"));
    let o = headmt(&["generate", "--model", path(&model), "--trace"], &format!("{}\n", graph_to_string(&g)));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let sum: f64 = v["stages"][0]["choices"].as_array().unwrap().iter().map(|c| c["cost"].as_f64().unwrap()).sum();
    assert!((sum - v["cost"].as_f64().unwrap()).abs() < 1e-9);
    assert_eq!(v["positions"].as_array().unwrap().len(), 4);
}

#[test]
fn validate_exit_codes() {
    let good = data("ab.json");
    let o = headmt(&["validate", "--model", path(&good), "--bilex", path(&data("en-fr.bilex.json"))], "");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let dir = tempfile::tempdir().unwrap();
    let mut def = fixture_ab();
    def.lexicon[0].automaton = "nowhere".into();
    let broken = dir.path().join("broken.json");
    save_model(&broken, &def).unwrap();
    let o = headmt(&["validate", "--model", path(&broken)], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("nowhere"));
    let o = headmt(&["analyze", "--model", path(&broken)], "a\n");
    assert_eq!(o.status.code(), Some(1));
    let mut def = fixture_ab();
    def.automata.iter_mut().find(|a| a.id == "ab").unwrap().stop[0].cost = Cost::ZERO;
    let unnormalized = dir.path().join("sum.json");
    save_model(&unnormalized, &def).unwrap();
    let o = headmt(&["validate", "--model", path(&unnormalized)], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("q0"));
}

#[test]
fn file_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("ab.json")).unwrap();
    let truncated = dir.path().join("cut.json");
    std::fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    let o = headmt(&["analyze", "--model", path(&truncated)], "a\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    let o = headmt(&["analyze", "--model", path(&dir.path().join("absent.json"))], "");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    let o = headmt(&["analyze", "--modle", "x"], "");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(headmt(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(headmt(&["train", "--method", "guess", "--in", "a", "--out", "b"], "").status.code(), Some(2));
    assert_eq!(headmt(&["translate", "--config", "c", "--bilex", "b"], "").status.code(), Some(2));
}

#[test]
fn sampling_is_deterministic() {
    let model = data("ab.json");
    let args = ["sample", "--model", path(&model), "--count", "3", "--seed", "7"];
    let a = headmt(&args, "");
    let b = headmt(&args, "");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 3);
    let many = headmt(&["sample", "--model", path(&model), "--count", "200", "--seed", "1"], "");
    for line in stdout(&many).lines() {
        let n = line.split(' ').filter(|w| *w == "a").count();
        assert_eq!(line.split(' ').filter(|w| *w == "b").count(), n);
        assert!(line.contains('h'));
    }
    let generic = data("planted/english.json");
    assert_eq!(headmt(&["sample", "--model", path(&generic)], "").status.code(), Some(1));
}

#[test]
fn sampled_trees_score_like_the_library() {
    let model = data("en-ambig.json");
    let o = headmt(&["sample", "--model", path(&model), "--count", "5", "--seed", "3", "--tree"], "");
    let m = headmt_core::Model::compile(&fixture_en_ambig()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for line in stdout(&o).lines() {
        let t = headmt::format::parse_tree(line).unwrap();
        let f = dir.path().join("t.json");
        std::fs::write(&f, tree_to_string(&t)).unwrap();
        let s = headmt(&["score", "--model", path(&model), "--tree", path(&f)], "");
        let c: f64 = stdout(&s).trim().parse().unwrap();
        assert_eq!(c, m.derivation_cost(&t).value());
    }
}

#[test]
fn score_reports_inf() {
    let dir = tempfile::tempdir().unwrap();
    let t = headmt_core::OrderedDependencyTree::leaf("flights", "noun", "n0")
        .with_left("mod", headmt_core::OrderedDependencyTree::leaf("boston", "leaf", "l0"));
    let f = dir.path().join("t.json");
    std::fs::write(&f, tree_to_string(&t)).unwrap();
    let o = headmt(&["score", "--model", path(&data("en.json")), "--tree", path(&f)], "");
    assert_eq!(stdout(&o), "inf\n");
}

#[test]
fn train_from_counts() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("c.tsv");
    std::fs::write(&counts, "dep\th r\td1\t3\t1\ndep\th r\td2\t1\t0\n").unwrap();
    let out = dir.path().join("t.json");
    let o = headmt(&["train", "--method", "prob", "--in", path(&counts), "--out", path(&out)], "");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = load_table(&out).unwrap();
    let d1 = t.get(&Choice::dep("h", "r", "d1")).unwrap().value();
    assert!((d1 - (4.0f64 / 3.0).ln()).abs() < 1e-12);
    let o = headmt(&["train", "--method", "disc", "--in", path(&counts), "--out", path(&out), "--no-backoff"], "");
    assert_eq!(o.status.code(), Some(0));
    let t = load_table(&out).unwrap();
    assert_eq!(t.backoff, headmt_core::train::Backoff::None);
    // log((1 + 0.5) / (3 + 0.5))
    let d1 = t.get(&Choice::dep("h", "r", "d1")).unwrap().value();
    assert!((d1 - (1.5f64 / 3.5).ln()).abs() < 1e-12);
}

#[test]
fn reflexive_training_penalizes_round_trip_breaker() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["meandist", "normdist"] {
        let out = dir.path().join(method);
        let o = headmt(
            &[
                "reflexive-train",
                "--fwd",
                path(&data("planted/fwd.config.json")),
                "--bwd",
                path(&data("planted/bwd.config.json")),
                "--corpus",
                path(&data("planted/corpus.txt")),
                "--method",
                method,
                "--out",
                path(&out),
            ],
            "",
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let t = load_table(&out.join("fwd.bilex.json")).unwrap();
        let c = |id: &str| t.get(&Choice::xfer(id, "big", None)).unwrap().value();
        assert!(c("big#1") > c("big#2"), "{method}: {} vs {}", c("big#1"), c("big#2"));
        assert_eq!(std::fs::read_to_string(out.join("round_trips.jsonl")).unwrap().lines().count(), 2);
    }
    let o = headmt(
        &["reflexive-train", "--fwd", "a", "--bwd", "b", "--corpus", "c", "--method", "prob", "--out", "d"],
        "",
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trained_overlay_changes_translation() {
    let dir = tempfile::tempdir().unwrap();
    let p = planted();
    let src = dir.path().join("planted");
    std::fs::create_dir(&src).unwrap();
    for f in ["english.json", "french.json", "fwd.bilex.json"] {
        std::fs::copy(data(&format!("planted/{f}")), src.join(f)).unwrap();
    }
    let plain = data("planted/fwd.config.json");
    let o = headmt(&["translate", "--config", path(&plain)], &format!("{}\n", p.probe));
    assert_eq!(stdout(&o).trim(), p.wrong);
    let mut t = CostTable::from_lexicon(&p.forward);
    t.insert(Choice::xfer("big#1", "big", None), Cost::new(2.0));
    save_table(&src.join("bilex.json"), &t).unwrap();
    let cfg = src.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"source": "english.json", "target": "french.json", "bilex": "fwd.bilex.json",
            "overlays": [{"component": "bilex", "path": "bilex.json"}]}"#,
    )
    .unwrap();
    let o = headmt(&["translate", "--config", path(&cfg)], &format!("{}\n", p.probe));
    assert_eq!(stdout(&o).trim(), p.correct, "{}", stderr(&o));
    std::fs::write(
        &cfg,
        r#"{"source": "english.json", "target": "french.json", "bilex": "fwd.bilex.json",
            "overlays": [{"component": "source", "path": "bilex.json"}]}"#,
    )
    .unwrap();
    let o = headmt(&["translate", "--config", path(&cfg)], "big house\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("xfer"), "{}", stderr(&o));
}

#[test]
fn in_process_run_matches_binary() {
    let cfg = data("en-fr.config.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = headmt::run(["headmt", "translate", "--config", path(&cfg)], FR_SENTENCE.as_bytes(), &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), format!("{FR_EXPECTED}\n"));
}
