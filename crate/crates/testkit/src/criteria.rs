//! Whole-system checks shared by the crate test suites and the acceptance
//! run. Each returns an [`Outcome`] instead of panicking so a runner can
//! report every check.

use std::time::Instant;

use rand::Rng;

use headmt_core::analysis::{analyze, analyze_with, inside_probability, AnalysisOptions};
use headmt_core::generation::{generate, order_tree};
use headmt_core::key::tree_key;
use headmt_core::model::DEFAULT_DEPTH_BOUND;
use headmt_core::pipeline::{Component, Pipeline};
use headmt_core::train::{
    estimate_discriminative, estimate_from_counts, estimate_mean_distance, estimate_normalized_distance,
    estimate_probabilistic, record_choices, reflexive_train, supervised_counts, Choice, ChoiceCounts, ChoiceFamily,
    ComponentTables, CostTable, DistanceAccumulator, Method, ReflexiveOptions,
};
use headmt_core::transfer::{brute_force_tilings, is_tiling, transfer, transfer_with, TransferOptions};
use headmt_core::{Cost, Model, ModelDef};

use crate::fixtures::*;
use crate::oracle;
use crate::random::{random_derivation, random_model, random_transfer_instance, random_tree, ModelShape};

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn ok(detail: String) -> Self {
        Outcome { pass: true, detail }
    }

    fn fail(detail: String) -> Self {
        Outcome { pass: false, detail }
    }

    fn from(r: Result<String, String>) -> Self {
        match r {
            Ok(d) => Outcome::ok(d),
            Err(d) => Outcome::fail(d),
        }
    }
}

/// Random models with parseable and random sentences of at most six words.
pub fn parser_instances(models: usize, seed: u64) -> Vec<(ModelDef, Vec<Vec<String>>)> {
    let mut rng = crate::rng(seed);
    let mut out = Vec::new();
    while out.len() < models {
        let def = random_model(&mut rng, ModelShape::default());
        if Model::compile(&def).is_err() {
            continue;
        }
        let mut sentences = Vec::new();
        for _ in 0..20 {
            if sentences.len() >= 4 {
                break;
            }
            if let Some(t) = random_derivation(&def, &mut rng, 6) {
                sentences.push(t.linearize());
            }
        }
        let words = def.vocabulary();
        for _ in 0..2 {
            let n = rng.gen_range(1..=6);
            sentences.push((0..n).map(|_| words[rng.gen_range(0..words.len())].clone()).collect());
        }
        out.push((def, sentences));
    }
    out
}

/// Best analysis against exhaustive derivation enumeration, plus n-best
/// prefix soundness on sentences of at most five words.
pub fn parser_optimality(models: usize, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut parsed = 0;
    let mut run = || -> Result<(), String> {
        for (k, (def, sentences)) in parser_instances(models, seed).iter().enumerate() {
            let model = Model::compile(def).unwrap();
            for s in sentences {
                let toks: Vec<&str> = s.iter().map(String::as_str).collect();
                let all = oracle::enumerate_derivations(def, &toks);
                let got = analyze(&model, &toks, 3).map_err(|e| format!("model {k}: {e}"))?;
                checked += 1;
                let best = oracle::best_derivation(&all);
                match (best, got.first()) {
                    (None, None) => {}
                    (Some((t, c)), Some(d)) => {
                        parsed += 1;
                        if d.cost != Cost::new(*c) || &d.tree != t {
                            return Err(format!("model {k} {toks:?}: chart {} vs oracle {c}", d.cost));
                        }
                        if toks.len() <= 5 {
                            let mut sorted: Vec<_> = all.iter().map(|(t, c)| (Cost::new(*c), tree_key(t), t)).collect();
                            sorted.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
                            for (i, d) in got.iter().enumerate() {
                                if d.cost != sorted[i].0 || &d.tree != sorted[i].2 {
                                    return Err(format!("model {k} {toks:?}: n-best rank {i} differs"));
                                }
                            }
                        }
                        if d.tree.linearize() != s.as_slice() {
                            return Err(format!("model {k} {toks:?}: yield differs"));
                        }
                    }
                    (b, g) => return Err(format!("model {k} {toks:?}: oracle {:?} vs chart {:?}", b.map(|x| x.1), g.map(|d| d.cost))),
                }
            }
        }
        Ok(())
    };
    let r = run();
    let secs = start.elapsed().as_secs_f64();
    Outcome::from(r.and_then(|_| {
        if secs < 60.0 {
            Ok(format!("{models} models, {checked} sentences ({parsed} parseable), {secs:.1}s"))
        } else {
            Err(format!("too slow: {secs:.1}s"))
        }
    }))
}

/// Best cost and tree agree with pruning on and off.
pub fn pruning_admissibility(models: usize, seed: u64) -> Outcome {
    let mut mismatches = 0;
    let mut checked = 0;
    for (def, sentences) in parser_instances(models, seed) {
        let model = Model::compile(&def).unwrap();
        for s in sentences {
            let on = analyze_with(&model, &s, AnalysisOptions { nbest: 1, prune: true }).unwrap();
            let off = analyze_with(&model, &s, AnalysisOptions { nbest: 1, prune: false }).unwrap();
            checked += 1;
            if on.derivations.first() != off.derivations.first() {
                mismatches += 1;
            }
        }
    }
    let d = format!("{checked} sentences, {mismatches} mismatches");
    if mismatches == 0 {
        Outcome::ok(d)
    } else {
        Outcome::fail(d)
    }
}

fn sequences(alphabet: &[&'static str], max: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            for a in alphabet {
                let mut t: Vec<&str> = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn exhaustive_language(
    model: &Model,
    aut: &str,
    start: &str,
    alphabet: &[&'static str],
    max: usize,
    member: impl Fn(&[&str], &[&str]) -> bool,
) -> Result<usize, String> {
    let all = sequences(alphabet, max);
    let mut pairs = 0;
    for l in &all {
        for r in all.iter().filter(|r| l.len() + r.len() <= max) {
            pairs += 1;
            let (c, _) = model.automaton_accept_cost(aut, start, l, r).map_err(|e| e.to_string())?;
            if c.is_finite() != member(l, r) {
                return Err(format!("{aut}: ({l:?}, {r:?}) finite={}", c.is_finite()));
            }
        }
    }
    Ok(pairs)
}

/// The two-state automaton accepts exactly (aⁿ, bⁿ); the palindrome
/// automaton exactly (x, reverse x).
pub fn automaton_power() -> Outcome {
    let ab = Model::compile(&fixture_ab()).unwrap();
    let pal_def = ModelDef::new(headmt_core::Mode::Generic)
        .relations(&["x", "y", "z"])
        .automaton(palindrome_automaton())
        .word("p", "pal")
        .root("p", "pal", "p0", 0.0);
    let pal = Model::compile(&pal_def).unwrap();
    let r = exhaustive_language(&ab, "ab", "q0", &["a", "b"], 10, |l, r| {
        l.len() == r.len() && l.iter().all(|&x| x == "a") && r.iter().all(|&x| x == "b")
    })
    .and_then(|n| {
        let states = ab.automaton(ab.automaton_id("ab").unwrap()).states().len();
        if states != 2 {
            return Err(format!("ab automaton has {states} states"));
        }
        exhaustive_language(&pal, "pal", "p0", &["x", "y", "z"], 8, |l, r| l.iter().eq(r.iter().rev())).map(|m| (n, m))
    });
    Outcome::from(r.map(|(n, m)| format!("ab: {n} pairs up to length 10; palindrome: {m} pairs up to length 8")))
}

/// Chart inside probability against summed brute-force derivation
/// probabilities.
pub fn inside_agreement() -> Outcome {
    let mut cases: Vec<(ModelDef, Vec<&str>)> = vec![
        (fixture_en_ambig(), tokens(EN_AMBIG_SENTENCE)),
        (fixture_en_ambig(), tokens("show cheap flights to boston")),
        (fixture_en_ambig(), tokens("cheap flights to boston")),
        (fixture_en_ambig(), tokens("boston to")),
        (fixture_ab(), tokens("a a h b b")),
    ];
    let mut ambiguous = fixture_ab();
    ambiguous.automata[0] = ambiguous.automata[0].clone().left("q0", "a", "q0", (1.0f64 / 8.0).ln().abs());
    ambiguous.automata[0].stop[0].cost = Cost::new((8.0f64 / 3.0).ln());
    cases.push((ambiguous, tokens("a a h b")));
    let mut worst: f64 = 0.0;
    for (def, toks) in &cases {
        let m = Model::compile(def).unwrap();
        let chart = inside_probability(&m, toks).unwrap();
        let brute: f64 =
            oracle::enumerate_derivations(def, toks).iter().map(|(t, _)| oracle::derivation_probability(def, t)).sum();
        worst = worst.max((chart - brute).abs());
        if (chart - brute).abs() > 1e-12 {
            return Outcome::fail(format!("{toks:?}: chart {chart} vs brute force {brute}"));
        }
    }
    let amb = oracle::enumerate_derivations(&fixture_en_ambig(), &tokens(EN_AMBIG_SENTENCE)).len();
    Outcome::ok(format!("{} sentences, max error {worst:.1e}, {amb} derivations of the ambiguous one", cases.len()))
}

/// Yield lengths of sampled derivations of the two-state model: P(2n+1)
/// is 0.5ⁿ⁺¹ and the mean is 3.
pub fn monte_carlo(samples: usize, seed: u64) -> Outcome {
    let m = Model::compile(&fixture_ab()).unwrap();
    let mut rng = crate::rng(seed);
    let mut counts = vec![0usize; 64];
    let mut total = 0usize;
    for _ in 0..samples {
        let s = match m.sample_with(&mut rng, DEFAULT_DEPTH_BOUND) {
            Ok(s) => s,
            Err(e) => return Outcome::fail(format!("sample failed: {e}")),
        };
        let n = (s.tokens.len() - 1) / 2;
        counts[n.min(63)] += 1;
        total += s.tokens.len();
    }
    let mut worst: f64 = 0.0;
    for (n, &c) in counts.iter().enumerate().take(16) {
        let emp = c as f64 / samples as f64;
        let exact = 0.5f64.powi(n as i32 + 1);
        worst = worst.max((emp - exact).abs());
    }
    let mean = total as f64 / samples as f64;
    let d = format!("{samples} samples, mean length {mean:.4}, max point error {worst:.4}");
    if worst <= 0.01 && (mean - 3.0).abs() <= 0.05 {
        Outcome::ok(d)
    } else {
        Outcome::fail(d)
    }
}

/// Transfer against the tiling oracle, and decomposition-pruned search
/// against the whole-tree search.
pub fn transfer_optimality(instances: usize, seed: u64) -> Outcome {
    let mut rng = crate::rng(seed);
    let mut solved = 0;
    let mut decomposed = 0;
    for case in 0..instances {
        let inst = random_transfer_instance(&mut rng, 6);
        let tgt = Model::compile(&inst.target).unwrap();
        let all = brute_force_tilings(&inst.source, &inst.lexicon, &tgt);
        let res = transfer(&inst.source, &inst.lexicon, &tgt);
        let plain = transfer_with(&inst.source, &inst.lexicon, &tgt, TransferOptions { decompose: false });
        let best = all.iter().map(|t| t.cost).min();
        match (best, &res) {
            (None, Err(_)) => {}
            (Some(best), Ok(out)) => {
                solved += 1;
                if out.stats.decomposition_nodes.len() > 1 {
                    decomposed += 1;
                }
                if out.cost != best {
                    return Outcome::fail(format!("case {case}: search {} vs oracle {best}", out.cost));
                }
                if !all.iter().filter(|t| t.cost == best).any(|t| oracle::isomorphic(&t.graph, &out.graph)) {
                    return Outcome::fail(format!("case {case}: target graph not among optimal tilings"));
                }
                if !is_tiling(&inst.source, &inst.lexicon, &out.tiling) {
                    return Outcome::fail(format!("case {case}: result is not a tiling"));
                }
                let steps: Cost = out.steps.iter().map(|s| s.cost).sum();
                if (steps.value() - out.cost.value()).abs() > 1e-9 {
                    return Outcome::fail(format!("case {case}: trace sums to {steps}, cost {}", out.cost));
                }
            }
            (b, r) => return Outcome::fail(format!("case {case}: oracle {b:?} vs search {:?}", r.as_ref().map(|o| o.cost))),
        }
        let same = match (&res, &plain) {
            (Ok(a), Ok(b)) => a.cost == b.cost && oracle::isomorphic(&a.graph, &b.graph),
            (Err(_), Err(_)) => true,
            _ => false,
        };
        if !same {
            return Outcome::fail(format!("case {case}: decomposition changed the result"));
        }
    }
    Outcome::ok(format!("{instances} instances, {solved} tileable, {decomposed} with inner decomposition nodes"))
}

/// The phenomena fixtures and the French example translate as expected.
pub fn phenomena_suite() -> Outcome {
    let mut all = phenomena();
    all.push(Phenomenon {
        name: "compositional",
        source: fixture_en(),
        target: fixture_fr_target(),
        lexicon: fixture_fr_lexicon(),
        sentence: FR_SENTENCE,
        expected: FR_EXPECTED,
    });
    let mut names = Vec::new();
    for p in &all {
        let pipe = match Pipeline::new(&p.source, &p.target, p.lexicon.clone()) {
            Ok(p) => p,
            Err(e) => return Outcome::fail(format!("{}: {e}", p.name)),
        };
        match pipe.translate(&tokens(p.sentence)) {
            Ok(t) if t.tokens.join(" ") == p.expected => names.push(p.name),
            Ok(t) => return Outcome::fail(format!("{}: got {:?}, want {:?}", p.name, t.tokens.join(" "), p.expected)),
            Err(e) => return Outcome::fail(format!("{}: {}", p.name, e.error)),
        }
    }
    Outcome::ok(names.join(", "))
}

/// Generation against exhaustive ordering enumeration on random trees.
pub fn generation_optimality(trees: usize, seed: u64) -> Outcome {
    let mut rng = crate::rng(seed);
    let shape = ModelShape { transition_density: 0.35, ..ModelShape::default() };
    let mut checked = 0;
    let mut orderable = 0;
    while checked < trees {
        let def = random_model(&mut rng, shape);
        let Ok(model) = Model::compile(&def) else { continue };
        let words = def.vocabulary();
        let words: Vec<&str> = words.iter().map(String::as_str).collect();
        let rels: Vec<&str> = def.relations.iter().map(String::as_str).collect();
        let mut graphs = Vec::new();
        if let Some(t) = random_derivation(&def, &mut rng, 6) {
            graphs.push(t.unorder());
        }
        let n = rng.gen_range(1..=6);
        graphs.push(random_tree(&mut rng, &words, &rels, n, 4));
        for g in graphs {
            checked += 1;
            for apply in [true, false] {
                let want = oracle::best_ordering_cost(&def, &g, apply);
                let got = order_tree(&g, &model, apply);
                match got {
                    Ok(s) => {
                        if s.cost != Cost::new(want) {
                            return Outcome::fail(format!("tree {checked}: ordered {} vs oracle {want}", s.cost));
                        }
                        if s.tokens().len() != g.nodes.len() {
                            return Outcome::fail(format!("tree {checked}: output length {}", s.tokens().len()));
                        }
                        if apply {
                            orderable += 1;
                        }
                    }
                    Err(_) if want.is_infinite() => {}
                    Err(e) => return Outcome::fail(format!("tree {checked}: {e}, oracle {want}")),
                }
            }
            if let Ok((toks, s)) = generate(&g, &model, true) {
                if toks.len() != g.nodes.len() || s.tree.unorder().nodes.len() != g.nodes.len() {
                    return Outcome::fail(format!("tree {checked}: generate lost nodes"));
                }
            }
        }
    }
    Outcome::ok(format!("{checked} trees, {orderable} orderable"))
}

fn close(a: Option<Cost>, b: f64) -> bool {
    a.is_some_and(|a| (a.value() - b).abs() <= 1e-12 || (a.is_infinite() && b.is_infinite()))
}

/// Estimators on hand-computed counts, and recovery of a known model from
/// its own samples.
pub fn estimator_exactness(samples: usize, seed: u64) -> Outcome {
    let e = |x: &str| Choice::dep("h", "r", x);
    let mut n = ChoiceCounts::new();
    n.add(&e("half"), 5.0, 0.0);
    n.add(&e("rest"), 5.0, 0.0);
    n.add(&Choice::null("sure"), 7.0, 0.0);
    n.add(&e("never"), 0.0, 1.0);
    let p = estimate_probabilistic(&n);
    let mut d = ChoiceCounts::new();
    d.add(&e("a"), 2.0, 4.0);
    d.add(&e("b"), 3.0, 3.0);
    d.add(&e("c"), 0.0, 9.0);
    let q = estimate_discriminative(&d);
    let mut acc = DistanceAccumulator::new();
    acc.add(&e("m"), 0.2);
    acc.add(&e("m"), 0.4);
    acc.add(&Choice::null("one"), 0.7);
    let mean = estimate_mean_distance(&acc);
    let mut norm_acc = DistanceAccumulator::new();
    norm_acc.add(&e("x"), 0.3);
    norm_acc.add(&e("y"), 0.9);
    norm_acc.add(&Choice::null("z"), 0.0);
    let norm = estimate_normalized_distance(&norm_acc);
    let checks = [
        ("prob ln 2", close(p.get(&e("half")), std::f64::consts::LN_2)),
        ("prob certain", close(p.get(&Choice::null("sure")), 0.0)),
        ("prob unseen", close(p.get(&e("never")), f64::INFINITY)),
        ("disc 4/2", close(q.get(&e("a")), (4.5f64 / 2.5).ln())),
        ("disc even", close(q.get(&e("b")), 0.0)),
        ("disc 0/9", close(q.get(&e("c")), (9.5f64 / 0.5).ln())),
        ("mean", close(mean.get(&e("m")), 0.3)),
        ("mean single", close(mean.get(&Choice::null("one")), 0.7)),
        ("mean unseen", mean.get(&e("none")).is_none()),
        ("norm ratio", close(norm.get(&e("x")), 0.5)),
        ("norm zero context", close(norm.get(&Choice::null("z")), 1.0)),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Outcome::fail(format!("hand value {name}"));
    }
    // Recovery from samples.
    let def = fixture_en_ambig();
    let m = Model::compile(&def).unwrap();
    let mut rng = crate::rng(seed);
    let mut counts = ChoiceCounts::new();
    for _ in 0..samples {
        let s = m.sample_with(&mut rng, DEFAULT_DEPTH_BOUND).unwrap();
        counts.add_positive(&record_choices(&m.derivation_trace(&s.tree).steps));
    }
    let est = estimate_probabilistic(&counts);
    let truth = CostTable::from_model(&def);
    let mut worst: f64 = 0.0;
    for (c, v) in truth.entries() {
        if c.family == ChoiceFamily::Unk {
            continue;
        }
        let Some(x) = est.get(c) else { return Outcome::fail(format!("{c} never sampled")) };
        worst = worst.max((x.value() - v.value()).abs());
    }
    let d = format!("{} hand values; {} parameters from {samples} samples, max error {worst:.4} nats", checks.len(), truth.len() - 1);
    if worst <= 0.05 {
        Outcome::ok(d)
    } else {
        Outcome::fail(d)
    }
}

fn planted_pipelines(p: &Planted) -> (Pipeline, Pipeline) {
    let fwd = Pipeline::new(&p.english, &p.french, p.forward.clone()).unwrap();
    let bwd = Pipeline::new(&p.french, &p.english, p.backward.clone()).unwrap();
    (fwd, bwd)
}

fn probe(p: &Planted, pipe: &Pipeline) -> String {
    pipe.translate(&tokens(p.probe)).map(|t| t.tokens.join(" ")).unwrap_or_else(|e| format!("<{}>", e.error))
}

/// Reflexive training separates the round-trip-breaking entry, and the
/// planted ambiguity is resolved by methods B, C and E but not by uniform
/// costs.
pub fn reflexive_discrimination() -> Outcome {
    let p = planted();
    let (fwd, bwd) = planted_pipelines(&p);
    let corpus: Vec<Vec<&str>> = p.corpus.iter().map(|s| tokens(s)).collect();
    let bad = Choice::xfer("big#1", "big", None);
    let good = Choice::xfer("big#2", "big", None);
    let mut parts = Vec::new();
    let mut tables = Vec::new();
    for method in [Method::MeanDistance, Method::NormalizedDistance] {
        let r = reflexive_train(&fwd, &bwd, &corpus, ReflexiveOptions { method, iterations: 1 }).unwrap();
        let t = r.forward.get(Component::Lexicon).cloned().unwrap_or_default();
        let (b, g) = (t.lookup(&bad), t.lookup(&good));
        if b <= g {
            return Outcome::fail(format!("{}: big#1 {b} not above big#2 {g}", method.name()));
        }
        parts.push(format!("{} {b}>{g}", method.name()));
        tables.push(r.forward);
    }
    let uniform = ComponentTables {
        tables: Component::ALL.iter().map(|&c| (c, CostTable::uniform(1.0))).collect(),
    };
    let a = probe(&p, &uniform.apply(&fwd).unwrap());
    if a == p.correct {
        return Outcome::fail(format!("uniform costs already pick {a:?}"));
    }
    let refs: Vec<(Vec<&str>, Vec<&str>)> = p.references.iter().map(|(s, t)| (tokens(s), tokens(t))).collect();
    let counts = supervised_counts(&fwd, &refs, 1000).unwrap();
    let mut picks = vec![("A", a)];
    for (name, method) in [("B", Method::Probabilistic), ("C", Method::Discriminative)] {
        let t = estimate_from_counts(method, &counts);
        picks.push((name, probe(&p, &t.apply(&fwd).unwrap())));
    }
    picks.push(("E", probe(&p, &tables[1].apply(&fwd).unwrap())));
    let summary: Vec<String> = picks.iter().map(|(n, s)| format!("{n}:{s}")).collect();
    if picks[1..].iter().all(|(_, s)| s == p.correct) {
        Outcome::ok(format!("{}; {}", parts.join(", "), summary.join(", ")))
    } else {
        Outcome::fail(summary.join(", "))
    }
}
