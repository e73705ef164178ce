use headmt_core::analysis::{analyze, analyze_with, inside_probability, AnalysisOptions, Chart};
use headmt_core::model::{AutomatonDef, Mode, ModelDef};
use headmt_core::{Error, Model, OrderedDependencyTree};
use headmt_testkit::criteria::{parser_optimality, pruning_admissibility};
use headmt_testkit::oracle;
use headmt_testkit::random::{random_derivation, random_model, ModelShape};
use headmt_testkit::*;
use proptest::prelude::*;

fn en() -> Model {
    Model::compile(&fixture_en()).unwrap()
}

#[test]
fn en_sentence_has_its_unique_tree() {
    let toks = tokens("cheap flights to boston");
    let ds = analyze(&en(), &toks, 3).unwrap();
    assert_eq!(ds.len(), 1);
    let to = OrderedDependencyTree::leaf("to", "prep", "p0").with_right("pobj", OrderedDependencyTree::leaf("boston", "leaf", "l0"));
    let want = OrderedDependencyTree::leaf("flights", "noun", "n0")
        .with_left("mod", OrderedDependencyTree::leaf("cheap", "leaf", "l0"))
        .with_right("mod", to);
    assert_eq!(ds[0].tree, want);
    assert!((ds[0].cost.value() - 5.7).abs() < 1e-9);
    let brute = oracle::enumerate_derivations(&fixture_en(), &toks);
    assert_eq!(brute.len(), 1);
    assert!((brute[0].1 - 5.7).abs() < 1e-9);
}

#[test]
fn one_word_sentence() {
    let ds = analyze(&en(), &["flights"], 1).unwrap();
    assert_eq!(ds[0].tree, OrderedDependencyTree::leaf("flights", "noun", "n0"));
    assert!((ds[0].cost.value() - 1.2).abs() < 1e-9);
}

#[test]
fn empty_sentence_is_an_error() {
    let none: [&str; 0] = [];
    assert_eq!(analyze(&en(), &none, 1).unwrap_err(), Error::EmptySentence);
}

#[test]
fn unparseable_sentence_gives_nothing() {
    assert!(analyze(&en(), &tokens("boston cheap"), 1).unwrap().is_empty());
}

#[test]
fn ambiguous_attachment_nbest() {
    let def = fixture_en_ambig();
    let m = Model::compile(&def).unwrap();
    let toks = tokens(EN_AMBIG_SENTENCE);
    let mut brute = oracle::enumerate_derivations(&def, &toks);
    assert_eq!(brute.len(), 2);
    brute.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let one = analyze(&m, &toks, 1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].tree, brute[0].0);
    let two = analyze(&m, &toks, 2).unwrap();
    assert_eq!(two.len(), 2);
    for (d, (t, c)) in two.iter().zip(&brute) {
        assert_eq!(&d.tree, t);
        assert!((d.cost.value() - c).abs() < 1e-9);
    }
    assert!(two[0].cost <= two[1].cost);
}

#[test]
fn left_and_right_combination() {
    let m = en();
    let toks = tokens("cheap flights to boston");
    let mut chart = Chart::new(&m, &toks, AnalysisOptions::nbest(1)).unwrap();
    let cheap = chart.initial_edges(0).remove(0);
    let flights = chart.initial_edges(1).remove(0);
    let joined = chart.combine_left(&flights, &cheap);
    assert_eq!(joined.len(), 1);
    let e = &joined[0];
    assert_eq!((e.head, e.i, e.j), (1, 0, 2));
    // flights stop 0.2, cheap stop 0.0, left mod 0.7, lexical 0.0, dependency 1.0
    assert!((e.cost.value() - 1.9).abs() < 1e-9);

    let to = chart.initial_edges(2);
    let to_final = to.iter().find(|e| m.automaton(e.automaton).state_name(e.state) == "p1").unwrap().clone();
    let boston = chart.initial_edges(3).remove(0);
    let pp = chart.combine_right(&to_final, &boston);
    assert_eq!(pp.len(), 1);
    let right = chart.combine_right(&flights, &pp[0]);
    assert_eq!(right.len(), 1);
    assert_eq!((right[0].i, right[0].j), (1, 4));
    // 0.2 + (0.0 + 0.1 + 0.1 + 0.5) + 0.4 + 0.2 + 1.5
    assert!((right[0].cost.value() - 3.0).abs() < 1e-9);
}

#[test]
fn combination_needs_a_dependency_parameter() {
    let m = en();
    let toks = tokens("boston flights");
    let mut chart = Chart::new(&m, &toks, AnalysisOptions::nbest(1)).unwrap();
    let b = chart.initial_edges(0).remove(0);
    let f = chart.initial_edges(1).remove(0);
    assert!(chart.combine_left(&f, &b).is_empty());
}

/// "a h": `a` has two automata whose stop costs make the two h-headed
/// edges over the whole span cost `x` and `y`. h also has two states that
/// can take the dependent.
fn prune_model(x: f64, y: f64) -> Model {
    let def = ModelDef::new(Mode::Generic)
        .relations(&["r"])
        .automaton(AutomatonDef::new("h", &["h0", "h1", "h2"]).left("h0", "r", "h1", 1.0).left("h2", "r", "h1", 1.0).stop("h1", 0.0))
        .automaton(AutomatonDef::new("x", &["x0"]).stop("x0", x - 2.5))
        .automaton(AutomatonDef::new("y", &["y0"]).stop("y0", y - 2.5))
        .word("h", "h")
        .word("a", "x")
        .word("a", "y")
        .dep("h", "r", "a", 1.5)
        .lex_start("r", "a", "x", "x0", 0.0)
        .lex_start("r", "a", "y", "y0", 0.0)
        .root("h", "h", "h0", 0.0);
    Model::compile(&def).unwrap()
}

fn offer(m: &Model, nbest: usize) -> Vec<(String, f64)> {
    let mut chart = Chart::new(m, &["a", "h"], AnalysisOptions::nbest(nbest)).unwrap();
    let h = chart.initial_edges(1).remove(0);
    let mut cands = Vec::new();
    for a in chart.initial_edges(0) {
        cands.extend(chart.combine_left(&h, &a));
    }
    cands.sort_by(|a, b| b.cost.cmp(&a.cost));
    for c in cands {
        chart.prune(c);
    }
    let mut out: Vec<(String, f64)> = chart
        .edges(0, 2)
        .map(|e| {
            let t = e.tree(&chart);
            (format!("{}:{}", t.state, t.left[0].tree.automaton), e.cost.value())
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[test]
fn prune_drops_worse_edge_per_signature() {
    let m = prune_model(3.0, 4.0);
    let kept = offer(&m, 1);
    assert_eq!(kept, [("h0:x".to_string(), 3.0), ("h2:x".to_string(), 3.0)]);
    assert_eq!(offer(&m, 2).len(), 4);
}

#[test]
fn prune_ties() {
    let m = prune_model(3.0, 3.0);
    assert_eq!(offer(&m, 2).len(), 4);
    // The canonical key compares start states: "x" sorts before "y".
    assert_eq!(offer(&m, 1), [("h0:x".to_string(), 3.0), ("h2:x".to_string(), 3.0)]);
}

#[test]
fn inside_probability_examples() {
    let def = fixture_en_ambig();
    let m = Model::compile(&def).unwrap();
    // One derivation and one automaton path.
    let p = inside_probability(&m, &tokens("cheap flights")).unwrap();
    let best = analyze(&m, &tokens("cheap flights"), 1).unwrap();
    assert!((p - (-best[0].cost.value()).exp()).abs() < 1e-12);
    // The noun may write its left and right mod in either order.
    let p = inside_probability(&m, &tokens("cheap flights to boston")).unwrap();
    let best = analyze(&m, &tokens("cheap flights to boston"), 1).unwrap();
    assert!((p - 2.0 * (-best[0].cost.value()).exp()).abs() < 1e-12);
    let toks = tokens(EN_AMBIG_SENTENCE);
    let brute: f64 = oracle::enumerate_derivations(&def, &toks).iter().map(|(t, _)| oracle::derivation_probability(&def, t)).sum();
    assert!((inside_probability(&m, &toks).unwrap() - brute).abs() < 1e-12);
    assert_eq!(inside_probability(&m, &tokens("boston cheap")).unwrap(), 0.0);
    assert_eq!(inside_probability(&en(), &["flights"]), Err(Error::NotProbabilistic));
}

#[test]
fn unknown_word_gets_a_leaf() {
    let m = en();
    let ds = analyze(&m, &tokens("flights zzz"), 1).unwrap();
    assert!(ds.is_empty() || ds[0].tree.linearize() == ["flights", "zzz"]);
    let ds = analyze(&m, &["zzz"], 1).unwrap();
    assert_eq!(ds.len(), 1);
    assert!(ds[0].cost.value() >= m.unknown_word_penalty().value());
}

const DENSE_WORDS: usize = 12;

/// Every word takes any number of dependents on either side.
fn dense_model() -> Model {
    let words: Vec<String> = (0..DENSE_WORDS).map(|i| format!("w{i}")).collect();
    let mut def = ModelDef::new(Mode::Generic)
        .relations(&["r"])
        .automaton(AutomatonDef::new("m", &["s"]).left("s", "r", "s", 0.5).right("s", "r", "s", 0.5).stop("s", 0.0));
    for w in &words {
        def = def.word(w, "m").root(w, "m", "s", 0.0).lex_start("r", w, "m", "s", 0.0);
        for d in &words {
            def = def.dep(w, "r", d, 0.25);
        }
    }
    Model::compile(&def).unwrap()
}

#[test]
fn combination_count_growth() {
    let m = dense_model();
    let mut r = rng(4);
    let sentence = |n: usize, r: &mut rand_chacha::ChaCha8Rng| -> Vec<String> {
        use rand::Rng;
        (0..n).map(|_| format!("w{}", r.gen_range(0..DENSE_WORDS))).collect()
    };
    for n in [3usize, 4, 5] {
        let short = analyze_with(&m, &sentence(n, &mut r), AnalysisOptions::nbest(1)).unwrap();
        let long = analyze_with(&m, &sentence(2 * n, &mut r), AnalysisOptions::nbest(1)).unwrap();
        assert!(!short.derivations.is_empty() && !long.derivations.is_empty());
        let v = DENSE_WORDS as f64;
        let bound = |n: f64| n.powi(3) * (n * n).min(v * v);
        let growth = long.stats.combinations as f64 / short.stats.combinations as f64;
        let trend = bound(2.0 * n as f64) / bound(n as f64);
        assert!(growth <= 2.0 * trend, "n={n}: growth {growth} vs trend {trend}");
    }
}

#[test]
fn random_models_against_enumeration() {
    let o = parser_optimality(12, 21);
    assert!(o.pass, "{}", o.detail);
    let o = pruning_admissibility(30, 22);
    assert!(o.pass, "{}", o.detail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn best_parse_is_faithful(seed in any::<u64>()) {
        let mut r = rng(seed);
        let def = random_model(&mut r, ModelShape::default());
        let m = Model::compile(&def).unwrap();
        if let Some(t) = random_derivation(&def, &mut r, 6) {
            let toks = t.linearize();
            let ds = analyze(&m, &toks, 3).unwrap();
            prop_assert!(!ds.is_empty());
            prop_assert!(ds[0].cost.value() <= m.derivation_cost(&t).value() + 1e-9);
            for w in ds.windows(2) {
                prop_assert!(w[0].cost <= w[1].cost);
            }
            for d in &ds {
                prop_assert_eq!(d.tree.linearize(), toks.clone());
                prop_assert!((d.cost.value() - m.derivation_cost(&d.tree).value()).abs() < 1e-9);
            }
        }
    }
}
