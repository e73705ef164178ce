use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::def::{AutomatonDef, Mode, ModelDef};
use super::UNKNOWN_AUTOMATON;
use crate::cost::Cost;

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    DanglingAutomaton,
    DanglingState,
    DanglingWord,
    DanglingRelation,
    DanglingLexiconEntry,
    Duplicate,
    ReservedName,
    EmptyVocabulary,
    EmptyRelations,
    ProbabilitySum,
    DeadState,
    UnreachableState,
}

impl ViolationKind {
    /// Structural problems make a model uncompilable; the rest only concern
    /// probabilistic soundness or reachability.
    pub fn is_structural(self) -> bool {
        !matches!(self, ViolationKind::ProbabilitySum | ViolationKind::DeadState | ViolationKind::UnreachableState)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }

    fn warning(&mut self, kind: ViolationKind, message: String) {
        self.warnings.push(Violation { kind, message });
    }
}

pub fn validate_model(def: &ModelDef) -> ValidationReport {
    use ViolationKind::*;
    let mut r = ValidationReport::default();

    let vocab: BTreeSet<&str> = def.lexicon.iter().map(|e| e.word.as_str()).collect();
    if vocab.is_empty() {
        r.violation(EmptyVocabulary, "empty vocabulary".into());
    }
    let mut rels = BTreeSet::new();
    for rel in &def.relations {
        if !rels.insert(rel.as_str()) {
            r.violation(Duplicate, format!("duplicate relation {rel}"));
        }
    }
    if rels.is_empty() {
        r.violation(EmptyRelations, "empty relation set".into());
    }

    let mut automata: BTreeMap<&str, &AutomatonDef> = BTreeMap::new();
    for a in &def.automata {
        if a.id == UNKNOWN_AUTOMATON {
            r.violation(ReservedName, format!("automaton id {} is reserved", a.id));
        }
        if automata.insert(a.id.as_str(), a).is_some() {
            r.violation(Duplicate, format!("duplicate automaton {}", a.id));
        }
        check_automaton(a, &rels, def.mode, &mut r);
    }

    let has_state = |m: &str, q: &str| automata.get(m).is_some_and(|a| a.states.iter().any(|s| s == q));
    let mut entries = BTreeSet::new();
    for e in &def.lexicon {
        if !automata.contains_key(e.automaton.as_str()) {
            r.violation(DanglingAutomaton, format!("dangling automaton {} in lexicon entry for {}", e.automaton, e.word));
        }
        if !entries.insert((e.word.as_str(), e.automaton.as_str())) {
            r.violation(Duplicate, format!("duplicate lexicon entry ({}, {})", e.word, e.automaton));
        }
    }
    let check_word = |r: &mut ValidationReport, w: &str, what: &str| {
        if !vocab.contains(w) {
            r.violation(DanglingWord, format!("dangling word {w} in {what}"));
        }
    };
    let check_rel = |r: &mut ValidationReport, rel: &str, what: &str| {
        if !rels.contains(rel) {
            r.violation(DanglingRelation, format!("dangling relation {rel} in {what}"));
        }
    };
    let check_start = |r: &mut ValidationReport, w: &str, m: &str, q: &str, what: &str| {
        if !automata.contains_key(m) {
            r.violation(DanglingAutomaton, format!("dangling automaton {m} in {what}"));
        } else if !has_state(m, q) {
            r.violation(DanglingState, format!("dangling state {q} of {m} in {what}"));
        } else if vocab.contains(w) && !entries.contains(&(w, m)) {
            r.violation(DanglingLexiconEntry, format!("{what} uses ({w}, {m}) which is not a lexicon entry"));
        }
    };

    let mut seen = BTreeSet::new();
    let mut dep_mass: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for d in &def.dependency {
        let what = "dependency parameter";
        check_word(&mut r, &d.head, what);
        check_word(&mut r, &d.dep, what);
        check_rel(&mut r, &d.rel, what);
        if !seen.insert((d.head.as_str(), d.rel.as_str(), d.dep.as_str())) {
            r.violation(Duplicate, format!("duplicate dependency parameter ({}, {}, {})", d.head, d.rel, d.dep));
        }
        *dep_mass.entry((&d.head, &d.rel)).or_default() += d.cost.probability();
    }
    let mut seen = BTreeSet::new();
    let mut lex_mass: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for l in &def.lexical_start {
        let what = "lexical parameter";
        check_word(&mut r, &l.word, what);
        check_rel(&mut r, &l.rel, what);
        check_start(&mut r, &l.word, &l.automaton, &l.state, what);
        if !seen.insert((l.rel.as_str(), l.word.as_str(), l.automaton.as_str(), l.state.as_str())) {
            r.violation(Duplicate, format!("duplicate lexical parameter ({}, {}, {}, {})", l.rel, l.word, l.automaton, l.state));
        }
        *lex_mass.entry((&l.rel, &l.word)).or_default() += l.cost.probability();
    }
    let mut seen = BTreeSet::new();
    let mut root_mass = 0.0;
    for s in &def.root_start {
        let what = "root parameter";
        check_word(&mut r, &s.word, what);
        check_start(&mut r, &s.word, &s.automaton, &s.state, what);
        if !seen.insert((s.word.as_str(), s.automaton.as_str(), s.state.as_str())) {
            r.violation(Duplicate, format!("duplicate root parameter ({}, {}, {})", s.word, s.automaton, s.state));
        }
        root_mass += s.cost.probability();
    }

    if def.mode == Mode::Probabilistic {
        for ((h, rel), p) in dep_mass {
            if (p - 1.0).abs() > SUM_TOLERANCE {
                r.violation(ProbabilitySum, format!("dependency parameters for ({h}, {rel}) sum to {p}"));
            }
        }
        for ((rel, w), p) in lex_mass {
            if (p - 1.0).abs() > SUM_TOLERANCE {
                r.violation(ProbabilitySum, format!("lexical parameters for ({rel}, {w}) sum to {p}"));
            }
        }
        if (root_mass - 1.0).abs() > SUM_TOLERANCE {
            r.violation(ProbabilitySum, format!("root parameters sum to {root_mass}"));
        }
    }

    let mut starts: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (m, q) in def
        .lexical_start
        .iter()
        .map(|l| (&l.automaton, &l.state))
        .chain(def.root_start.iter().map(|s| (&s.automaton, &s.state)))
    {
        starts.entry(m.as_str()).or_default().insert(q.as_str());
    }
    for a in automata.values() {
        reachability_warnings(a, starts.get(a.id.as_str()), &mut r);
    }
    r
}

fn check_automaton(a: &AutomatonDef, rels: &BTreeSet<&str>, mode: Mode, r: &mut ValidationReport) {
    use ViolationKind::*;
    let mut states = BTreeSet::new();
    for s in &a.states {
        if !states.insert(s.as_str()) {
            r.violation(Duplicate, format!("duplicate state {s} in automaton {}", a.id));
        }
    }
    if states.is_empty() {
        r.violation(DanglingState, format!("automaton {} has no states", a.id));
    }
    let mut mass: BTreeMap<&str, f64> = states.iter().map(|s| (*s, 0.0)).collect();
    for (side, ts) in [("left", &a.left), ("right", &a.right)] {
        let mut seen = BTreeSet::new();
        for t in ts.iter() {
            for s in [&t.from, &t.to] {
                if !states.contains(s.as_str()) {
                    r.violation(DanglingState, format!("dangling state {s} in {side} transition of {}", a.id));
                }
            }
            if !rels.contains(t.rel.as_str()) {
                r.violation(DanglingRelation, format!("dangling relation {} in {side} transition of {}", t.rel, a.id));
            }
            if !seen.insert((t.from.as_str(), t.rel.as_str(), t.to.as_str())) {
                r.violation(Duplicate, format!("duplicate {side} transition {} -{}-> {} in {}", t.from, t.rel, t.to, a.id));
            }
            if let Some(m) = mass.get_mut(t.from.as_str()) {
                *m += t.cost.probability();
            }
        }
    }
    let mut seen = BTreeSet::new();
    for s in &a.stop {
        if !states.contains(s.state.as_str()) {
            r.violation(DanglingState, format!("dangling state {} in stop of {}", s.state, a.id));
        }
        if !seen.insert(s.state.as_str()) {
            r.violation(Duplicate, format!("duplicate stop for state {} in {}", s.state, a.id));
        }
        if let Some(m) = mass.get_mut(s.state.as_str()) {
            *m += s.cost.probability();
        }
    }
    if mode == Mode::Probabilistic {
        for (s, p) in mass {
            if (p - 1.0).abs() > SUM_TOLERANCE {
                r.violation(ProbabilitySum, format!("actions of state {s} in automaton {} sum to {p}", a.id));
            }
        }
    }
}

fn reachability_warnings(a: &AutomatonDef, starts: Option<&BTreeSet<&str>>, r: &mut ValidationReport) {
    let finite = |c: Cost| c.is_finite();
    let edges: Vec<(&str, &str)> = a
        .left
        .iter()
        .chain(a.right.iter())
        .filter(|t| finite(t.cost))
        .map(|t| (t.from.as_str(), t.to.as_str()))
        .collect();

    // Live states reach a finite stop.
    let mut live: BTreeSet<&str> = a.stop.iter().filter(|s| finite(s.cost)).map(|s| s.state.as_str()).collect();
    loop {
        let before = live.len();
        for &(f, t) in &edges {
            if live.contains(t) {
                live.insert(f);
            }
        }
        if live.len() == before {
            break;
        }
    }
    for s in &a.states {
        if !live.contains(s.as_str()) {
            r.warning(ViolationKind::DeadState, format!("state {s} of automaton {} cannot reach a stop", a.id));
        }
    }

    let Some(starts) = starts else { return };
    let mut reached: BTreeSet<&str> = starts.clone();
    loop {
        let before = reached.len();
        for &(f, t) in &edges {
            if reached.contains(f) {
                reached.insert(t);
            }
        }
        if reached.len() == before {
            break;
        }
    }
    for s in &a.states {
        if !reached.contains(s.as_str()) {
            r.warning(ViolationKind::UnreachableState, format!("state {s} of automaton {} is unreachable", a.id));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fixture_ab;

    #[test]
    fn fixture_ab_is_valid() {
        let r = validate_model(&fixture_ab());
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }

    #[test]
    fn dangling_automaton_is_reported() {
        let r = validate_model(&fixture_ab().word("x", "missing"));
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::DanglingAutomaton
            && v.message.contains("dangling automaton")));
    }

    #[test]
    fn free_stop_breaks_normalization_at_q0() {
        let mut def = fixture_ab();
        def.automata[0].stop[0].cost = Cost::ZERO;
        let r = validate_model(&def);
        let sums: Vec<_> = r.violations.iter().filter(|v| v.kind == ViolationKind::ProbabilitySum).collect();
        assert_eq!(sums.len(), 1);
        assert!(sums[0].message.contains("state q0"));
    }

    #[test]
    fn generic_mode_skips_sums() {
        let mut def = fixture_ab();
        def.mode = Mode::Generic;
        def.automata[0].stop[0].cost = Cost::ZERO;
        assert!(validate_model(&def).is_valid());
    }

    #[test]
    fn dead_state_is_a_warning() {
        let mut def = fixture_ab();
        def.mode = Mode::Generic;
        def.automata[0].stop.clear();
        let r = validate_model(&def);
        assert!(r.is_valid());
        assert_eq!(r.warnings.iter().filter(|w| w.kind == ViolationKind::DeadState).count(), 2);
    }
}
