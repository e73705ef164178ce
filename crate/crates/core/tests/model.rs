use headmt_core::model::{validate_model, AutomatonDef, Mode, ModelDef, ViolationKind};
use headmt_core::{Cost, Error, Model, OrderedDependencyTree};
use headmt_testkit::oracle;
use headmt_testkit::random::{random_derivation, random_model, ModelShape};
use headmt_testkit::*;
use proptest::prelude::*;
use regex::Regex;

const LN2: f64 = std::f64::consts::LN_2;

fn ab() -> Model {
    Model::compile(&fixture_ab()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn ab_fixture_validates() {
    let r = validate_model(&fixture_ab());
    assert!(r.is_valid(), "{:?}", r.violations);
}

#[test]
fn dangling_automaton_reported() {
    let def = fixture_ab().word("c", "missing");
    let r = validate_model(&def);
    assert!(r.violations.iter().any(|v| v.kind == ViolationKind::DanglingAutomaton));
    assert!(matches!(Model::compile(&def), Err(Error::InvalidModel(_))));
}

#[test]
fn stop_cost_zero_breaks_normalization() {
    let mut def = fixture_ab();
    def.automata[0].stop[0].cost = Cost::ZERO;
    let r = validate_model(&def);
    let v: Vec<_> = r.violations.iter().filter(|v| v.kind == ViolationKind::ProbabilitySum).collect();
    assert_eq!(v.len(), 1);
    assert!(v[0].message.contains("q0"), "{}", v[0].message);
    assert!(v[0].message.contains("1.5"), "{}", v[0].message);
}

#[test]
fn generic_models_skip_normalization() {
    let mut def = fixture_ab();
    def.mode = Mode::Generic;
    def.automata[0].stop[0].cost = Cost::ZERO;
    assert!(validate_model(&def).is_valid());
}

#[test]
fn dead_state_is_a_warning() {
    let def = ModelDef::new(Mode::Generic)
        .relations(&["r"])
        .automaton(AutomatonDef::new("m", &["s0", "s1"]).left("s0", "r", "s1", 1.0).stop("s0", 0.0))
        .word("w", "m");
    let r = validate_model(&def);
    assert!(r.is_valid());
    assert!(r.warnings.iter().any(|w| w.kind == ViolationKind::DeadState));
}

#[test]
#[allow(clippy::approx_constant)]
fn accept_cost_examples() {
    let m = ab();
    let (c, path) = m.automaton_accept_cost("ab", "q0", &[], &[]).unwrap();
    assert!((c.value() - 0.6931).abs() < 1e-4, "{c:?}");
    assert_eq!(path.len(), 1);
    let (c, path) = m.automaton_accept_cost("ab", "q0", &["a", "a"], &["b", "b"]).unwrap();
    assert!(close(c.value(), 3.0 * LN2));
    assert!((c.value() - 2.0794).abs() < 1e-4);
    assert_eq!(path.len(), 5);
    let (c, _) = m.automaton_accept_cost("ab", "q0", &["a"], &["b", "b"]).unwrap();
    assert!(c.is_infinite());
}

#[test]
fn accept_cost_unknown_state() {
    assert!(matches!(ab().automaton_accept_cost("ab", "q9", &[], &[]), Err(Error::UnknownState { .. })));
}

#[test]
fn sequence_probability_examples() {
    let m = ab();
    assert!((m.sequence_pair_probability("ab", "q0", &["a"], &["b"]).unwrap() - 0.25).abs() < 1e-12);
    assert!((m.sequence_pair_probability("ab", "q0", &[], &[]).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(m.sequence_pair_probability("ab", "q0", &["b"], &[]).unwrap(), 0.0);
}

#[test]
fn sequence_probability_needs_probabilistic_mode() {
    let m = Model::compile(&fixture_en()).unwrap();
    assert_eq!(m.sequence_pair_probability("noun", "n0", &[], &[]), Err(Error::NotProbabilistic));
}

/// Every pair over {a, b} with total length at most 10 is tested against
/// a regular expression for the complement of the language.
#[test]
fn ab_language_is_exactly_anbn() {
    let m = ab();
    let outside = Regex::new(r"b.*\||\|.*a").unwrap();
    for n in 0..=10usize {
        for split in 0..=n {
            for bits in 0..(1u32 << n) {
                let sym = |i: usize| if bits >> i & 1 == 1 { "b" } else { "a" };
                let left: Vec<&str> = (0..split).map(sym).collect();
                let right: Vec<&str> = (split..n).map(sym).collect();
                let text = format!("{}|{}", left.concat(), right.concat());
                let member = !outside.is_match(&text) && left.len() == right.len();
                let (c, _) = m.automaton_accept_cost("ab", "q0", &left, &right).unwrap();
                assert_eq!(c.is_finite(), member, "{text}");
            }
        }
    }
}

#[test]
fn sequence_probability_matches_path_enumeration() {
    // A second a-loop at q0 makes paths ambiguous.
    let mut def = fixture_ab();
    def.automata[0] = def.automata[0].clone().left("q0", "a", "q0", (8.0f64).ln());
    def.automata[0].stop[0].cost = Cost::new((8.0f64 / 3.0).ln());
    assert!(validate_model(&def).is_valid());
    let m = Model::compile(&def).unwrap();
    let a = &def.automata[0];
    for l in 0..=4 {
        for r in 0..=4 {
            if l + r > 8 {
                continue;
            }
            let left = vec!["a"; l];
            let right = vec!["b"; r];
            let brute: f64 =
                oracle::accepting_paths(a, "q0", &left, &right).iter().map(|p| (-p.iter().sum::<f64>()).exp()).sum();
            let got = m.sequence_pair_probability("ab", "q0", &left, &right).unwrap();
            assert!((got - brute).abs() < 1e-12, "{l} {r}: {got} vs {brute}");
        }
    }
}

#[test]
fn single_node_cost() {
    let def = ModelDef::new(Mode::Generic)
        .relations(&["r"])
        .automaton(AutomatonDef::new("m", &["q"]).stop("q", 0.5))
        .word("w", "m")
        .root("w", "m", "q", 1.0);
    let m = Model::compile(&def).unwrap();
    assert!(close(m.derivation_cost(&OrderedDependencyTree::leaf("w", "m", "q")).value(), 1.5));
}

fn cheap_flights() -> OrderedDependencyTree {
    OrderedDependencyTree::leaf("flights", "noun", "n0").with_left("mod", OrderedDependencyTree::leaf("cheap", "leaf", "l0"))
}

fn cheap_flights_to_boston() -> OrderedDependencyTree {
    let to = OrderedDependencyTree::leaf("to", "prep", "p0").with_right("pobj", OrderedDependencyTree::leaf("boston", "leaf", "l0"));
    cheap_flights().with_right("mod", to)
}

#[test]
fn cheap_flights_cost_by_hand() {
    let m = Model::compile(&fixture_en()).unwrap();
    // root 1.0, left mod 0.7, stop 0.2, dependency 1.0, lexical 0.0, leaf stop 0.0
    let hand = 1.0 + 0.7 + 0.2 + 1.0 + 0.0 + 0.0;
    assert!(close(m.derivation_cost(&cheap_flights()).value(), hand));
    // adds right mod 0.4, to: dependency 1.5, lexical 0.2, pobj 0.1, stop 0,
    // boston: dependency 0.5, lexical 0.1
    let hand = hand + 0.4 + 1.5 + 0.2 + 0.1 + 0.5 + 0.1;
    assert!(close(m.derivation_cost(&cheap_flights_to_boston()).value(), hand));
    assert!(close(hand, 5.7));
}

#[test]
fn missing_dependency_is_infinite() {
    let m = Model::compile(&fixture_en()).unwrap();
    let t = OrderedDependencyTree::leaf("flights", "noun", "n0").with_left("obj", OrderedDependencyTree::leaf("cheap", "leaf", "l0"));
    assert!(m.derivation_cost(&t).is_infinite());
}

#[test]
fn trace_sums_to_cost() {
    let m = Model::compile(&fixture_en()).unwrap();
    let tr = m.derivation_trace(&cheap_flights_to_boston());
    let sum: f64 = tr.steps.iter().map(|s| s.cost.value()).sum();
    assert!(close(sum, tr.total.value()));
}

#[test]
fn unknown_word_is_penalized() {
    let def = fixture_en().penalty(7.0);
    let m = Model::compile(&def).unwrap();
    let t = OrderedDependencyTree::leaf("flights", "noun", "n0")
        .with_left("mod", OrderedDependencyTree::leaf("zzz", "__unknown__", "u0"));
    let c = m.derivation_cost(&t);
    assert!(c.is_finite());
    assert!(c.value() >= 7.0);
}

#[test]
fn linearize_examples() {
    assert_eq!(OrderedDependencyTree::leaf("flights", "noun", "n0").linearize(), ["flights"]);
    assert_eq!(cheap_flights_to_boston().linearize(), ["cheap", "flights", "to", "boston"]);
    let t = OrderedDependencyTree::leaf("h", "m", "q")
        .with_left("r", OrderedDependencyTree::leaf("x", "m", "q"))
        .with_left("r", OrderedDependencyTree::leaf("y", "m", "q"));
    assert_eq!(t.linearize(), ["x", "y", "h"]);
}

#[test]
fn en_ambig_probabilities() {
    let def = fixture_en_ambig();
    assert!(validate_model(&def).is_valid(), "{:?}", validate_model(&def).violations);
    let m = Model::compile(&def).unwrap();
    let t = cheap_flights();
    // P(root) 0.7, left mod 0.2, stop 0.5, dependency 0.6
    let p = m.derivation_probability(&t);
    assert!((p - 0.7 * 0.2 * 0.5 * 0.6).abs() < 1e-12, "{p}");
}

#[test]
fn sampling_is_deterministic() {
    let m = Model::compile(&fixture_en_ambig()).unwrap();
    for seed in 0..20 {
        assert_eq!(m.sample_derivation(seed).unwrap(), m.sample_derivation(seed).unwrap());
    }
}

#[test]
fn sampling_needs_probabilistic_mode() {
    let m = Model::compile(&fixture_en()).unwrap();
    assert_eq!(m.sample_derivation(1), Err(Error::NotProbabilistic));
}

#[test]
fn sampling_frequencies() {
    let m = ab();
    let mut rng = rng(11);
    let n = 100_000;
    let mut leaves = 0;
    let mut total = 0;
    for _ in 0..n {
        let s = m.sample_with(&mut rng, 64).unwrap();
        if s.tree.node_count() == 1 {
            leaves += 1;
        }
        total += s.tokens.len();
    }
    // P(leaf) = 0.5; E[len] = sum (2n+1) 0.5^(n+1) = 3
    assert!((leaves as f64 / n as f64 - 0.5).abs() < 0.01);
    assert!((total as f64 / n as f64 - 3.0).abs() < 0.05);
}

#[test]
fn sampling_depth_bound() {
    // Always recurses: the only dependent runs the same automaton.
    let def = ModelDef::new(Mode::Probabilistic)
        .relations(&["r"])
        .automaton(AutomatonDef::new("m", &["s0", "s1"]).left("s0", "r", "s1", 0.0).stop("s1", 0.0))
        .word("w", "m")
        .dep("w", "r", "w", 0.0)
        .lex_start("r", "w", "m", "s0", 0.0)
        .root("w", "m", "s0", 0.0);
    let m = Model::compile(&def).unwrap();
    assert!(matches!(m.sample_derivation(3), Err(Error::DepthExceeded(_))));
}

#[test]
fn sampled_trees_have_their_probability() {
    let def = fixture_en_ambig();
    let m = Model::compile(&def).unwrap();
    for seed in 0..50 {
        let s = m.sample_derivation(seed).unwrap();
        assert_eq!(s.tree.linearize(), s.tokens);
        let p = m.derivation_probability(&s.tree);
        assert!(p > 0.0);
        assert!((p - oracle::derivation_probability(&def, &s.tree)).abs() < 1e-12);
    }
}

#[test]
fn sibling_order_with_equal_paths() {
    let m = Model::compile(&fixture_en()).unwrap();
    let cheap = OrderedDependencyTree::leaf("cheap", "leaf", "l0");
    let to = OrderedDependencyTree::leaf("to", "prep", "p0").with_right("pobj", OrderedDependencyTree::leaf("boston", "leaf", "l0"));
    let head = || OrderedDependencyTree::leaf("flights", "noun", "n0");
    let a = head().with_left("mod", cheap.clone()).with_left("mod", to.clone());
    let b = head().with_left("mod", to).with_left("mod", cheap);
    assert!(m.derivation_cost(&a).is_finite());
    assert_eq!(m.derivation_cost(&a), m.derivation_cost(&b));
}

#[test]
fn dependency_table_bound() {
    let mut r = rng(3);
    for _ in 0..20 {
        let def = random_model(&mut r, ModelShape::default());
        let m = Model::compile(&def).unwrap();
        let v = m.vocabulary().len();
        assert!(m.dependency_parameter_count() <= v * v * m.relations().len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cost_matches_definition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let def = random_model(&mut r, ModelShape::default());
        let m = Model::compile(&def).unwrap();
        if let Some(t) = random_derivation(&def, &mut r, 8) {
            let c = m.derivation_cost(&t);
            prop_assert!(c.is_finite());
            prop_assert!((c.value() - oracle::derivation_cost(&def, &t)).abs() < 1e-9);
            let tr = m.derivation_trace(&t);
            let sum: f64 = tr.steps.iter().map(|s| s.cost.value()).sum();
            prop_assert!((sum - c.value()).abs() < 1e-9);
            prop_assert_eq!(t.linearize().len(), t.node_count());
        }
    }
}
