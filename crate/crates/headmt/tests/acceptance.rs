//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Instant;

use serde_json::Value;

use headmt::format::{graph_to_string, save_bilex, save_model};
use headmt_core::generation::generate;
use headmt_core::pipeline::Pipeline;
use headmt_core::{Model, ModelDef};
use headmt_testkit::criteria::{self, Outcome};
use headmt_testkit::fixtures::*;
use headmt_testkit::random::{random_derivation, random_model, ModelShape};

fn run_bin(args: &[&str], input: &str) -> Result<String, String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_headmt"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    let _ = child.stdin.take().unwrap().write_all(input.as_bytes());
    let o = child.wait_with_output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn num(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("not a finite cost: {v}"))
}

/// Checks one traced output line: choice costs add up to each stage's cost
/// and the stages to the total. Returns the total.
fn audit_line(line: &str) -> Result<f64, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("{e}: {line}"))?;
    let total = num(&v["cost"])?;
    let mut sum = 0.0;
    for st in v["stages"].as_array().ok_or("no stages")? {
        let mut s = 0.0;
        for c in st["choices"].as_array().ok_or("no choices")? {
            s += num(&c["cost"])?;
        }
        let stage = num(&st["cost"])?;
        if (s - stage).abs() > 1e-9 {
            return Err(format!("{} stage: choices {s} vs {stage}", st["stage"]));
        }
        sum += s;
    }
    if (sum - total).abs() > 1e-9 {
        return Err(format!("choices {sum} vs total {total}"));
    }
    Ok(total)
}

struct Case {
    name: String,
    source: ModelDef,
    target: ModelDef,
    lexicon: headmt_core::transfer::BilingualLexicon,
    sentences: Vec<String>,
}

fn cost_audit(dir: &Path) -> Outcome {
    let mut cases: Vec<Case> = phenomena()
        .into_iter()
        .map(|p| Case {
            name: p.name.to_string(),
            source: p.source,
            target: p.target,
            lexicon: p.lexicon,
            sentences: vec![p.sentence.to_string()],
        })
        .collect();
    cases.push(Case {
        name: "french".into(),
        source: fixture_en(),
        target: fixture_fr_target(),
        lexicon: fixture_fr_lexicon(),
        sentences: vec![FR_SENTENCE.into(), "flights to boston".into(), "cheap flights".into()],
    });
    let p = planted();
    let english: Vec<String> = ["big house", "big man", "fat house", "big fat man", "house"].iter().map(|s| s.to_string()).collect();
    cases.push(Case { name: "planted-fwd".into(), source: p.english.clone(), target: p.french.clone(), lexicon: p.forward.clone(), sentences: english });
    let french = ["grand maison", "gros demeure", "grand homme", "maison"].iter().map(|s| s.to_string()).collect();
    cases.push(Case { name: "planted-bwd".into(), source: p.french, target: p.english, lexicon: p.backward, sentences: french });

    let mut runs = 0;
    let mut go = || -> Result<(), String> {
        for c in &cases {
            let (s, t, b) = (dir.join(format!("{}.src.json", c.name)), dir.join(format!("{}.tgt.json", c.name)), dir.join(format!("{}.bilex.json", c.name)));
            save_model(&s, &c.source).map_err(|e| e.to_string())?;
            save_model(&t, &c.target).map_err(|e| e.to_string())?;
            save_bilex(&b, &c.lexicon).map_err(|e| e.to_string())?;
            let pipe = Pipeline::new(&c.source, &c.target, c.lexicon.clone()).map_err(|e| e.to_string())?;
            let input: String = c.sentences.iter().map(|x| format!("{x}\n")).collect();
            let out = run_bin(
                &["translate", "--src-model", s.to_str().unwrap(), "--tgt-model", t.to_str().unwrap(), "--bilex", b.to_str().unwrap(), "--trace"],
                &input,
            )?;
            for (line, sentence) in out.lines().zip(&c.sentences) {
                let want = pipe.translate(&tokens(sentence));
                match want {
                    Err(_) if line.is_empty() => continue,
                    Err(e) => return Err(format!("{}: {sentence:?}: library failed ({}) but CLI printed", c.name, e.error)),
                    Ok(w) => {
                        let total = audit_line(line).map_err(|e| format!("{}: {sentence:?}: {e}", c.name))?;
                        if (total - w.cost.value()).abs() > 1e-9 {
                            return Err(format!("{}: {sentence:?}: CLI total {total} vs pipeline {}", c.name, w.cost));
                        }
                        let v: Value = serde_json::from_str(line).unwrap();
                        for (st, lib) in v["stages"].as_array().unwrap().iter().zip(&w.stages) {
                            if (num(&st["cost"])? - lib.cost.value()).abs() > 1e-9 {
                                return Err(format!("{}: {sentence:?}: {} stage cost differs", c.name, lib.stage.name()));
                            }
                        }
                        if (num(&v["stages"][0]["cost"])? - w.analysis.cost.value()).abs() > 1e-9 {
                            return Err(format!("{}: analysis stage is not the analysis cost", c.name));
                        }
                        runs += 1;
                    }
                }
            }
        }
        // generate --trace on graphs of sampled derivations.
        let mut rng = headmt_testkit::rng(11);
        let mut graphs = 0;
        while graphs < 40 {
            let def = random_model(&mut rng, ModelShape::default());
            let Ok(model) = Model::compile(&def) else { continue };
            let Some(tree) = random_derivation(&def, &mut rng, 6) else { continue };
            let g = tree.unorder();
            let path = dir.join("gen.json");
            save_model(&path, &def).map_err(|e| e.to_string())?;
            let out = run_bin(&["generate", "--model", path.to_str().unwrap(), "--trace"], &format!("{}\n", graph_to_string(&g)))?;
            let (_, sol) = generate(&g, &model, true).map_err(|e| e.to_string())?;
            let total = audit_line(out.trim()).map_err(|e| format!("generate: {e}"))?;
            if (total - sol.cost.value()).abs() > 1e-9 {
                return Err(format!("generate: CLI total {total} vs library {}", sol.cost));
            }
            graphs += 1;
            runs += 1;
        }
        Ok(())
    };
    match go() {
        Ok(()) => Outcome { pass: true, detail: format!("{runs} traced runs") },
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    // The first criterion has a time limit, so it runs alone.
    let t = Instant::now();
    let first = criteria::parser_optimality(100, 21);
    results.push((1, "parser optimality", first, t.elapsed().as_secs_f64()));
    type Job<'a> = (usize, &'static str, Box<dyn FnOnce() -> Outcome + Send + 'a>);
    let jobs: Vec<Job> = vec![
        (2, "pruning admissibility", Box::new(|| criteria::pruning_admissibility(100, 21))),
        (3, "head-automaton power", Box::new(criteria::automaton_power)),
        (4, "inside probability", Box::new(criteria::inside_agreement)),
        (5, "monte-carlo consistency", Box::new(|| criteria::monte_carlo(100_000, 5))),
        (6, "transfer optimality", Box::new(|| criteria::transfer_optimality(100, 6))),
        (7, "translation phenomena", Box::new(criteria::phenomena_suite)),
        (8, "generation optimality", Box::new(|| criteria::generation_optimality(200, 8))),
        (9, "estimator exactness", Box::new(|| criteria::estimator_exactness(100_000, 9))),
        (10, "reflexive discrimination", Box::new(criteria::reflexive_discrimination)),
        (11, "cost audit", Box::new(|| cost_audit(dir.path()))),
    ];
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(n, name, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let o = f();
                    (n, name, o, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        for h in handles {
            results.push(h.join().unwrap_or_else(|_| panic!("criterion panicked")));
        }
    });
    let mut failed = 0;
    for (n, name, o, secs) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {n:>2} {name:<26} {tag}  {} ({secs:.1}s)", o.detail);
    }
    println!("{} of {} criteria passed in {:.1}s", results.len() - failed, results.len(), started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
