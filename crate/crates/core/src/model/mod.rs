//! Head-automaton language models: vocabularies, relations, automata and the
//! dependency, lexical-start and root-start parameter tables.

mod automaton;
mod def;
mod derivation;
mod sample;
mod validate;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cost::Cost;
use crate::error::Error;

pub use automaton::{Action, HeadAutomaton, Transition};
pub use def::{
    AutomatonDef, DependencyDef, LexicalStartDef, LexiconDef, Mode, ModelDef, RootStartDef,
    StopDef, TransitionDef, DEFAULT_UNKNOWN_WORD_PENALTY,
};
pub use derivation::DerivationTrace;
pub use sample::{SampledDerivation, DEFAULT_DEPTH_BOUND};
pub use validate::{validate_model, ValidationReport, Violation, ViolationKind};

/// Automaton synthesized for words outside the vocabulary: one state, free
/// stop, no transitions.
pub const UNKNOWN_AUTOMATON: &str = "__unknown__";
pub const UNKNOWN_STATE: &str = "u0";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordId(pub u32);
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelId(pub u32);
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AutId(pub u32);
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

/// A word as seen by the parameter tables: `None` is any out-of-vocabulary
/// token.
pub type Lex = Option<WordId>;

#[derive(Clone, Debug)]
struct StartEntry {
    automaton: AutId,
    state: StateId,
    cost: Cost,
}

/// A compiled, immutable model.
#[derive(Clone, Debug)]
pub struct Model {
    mode: Mode,
    unknown_penalty: Cost,
    words: Vec<String>,
    word_ids: BTreeMap<String, WordId>,
    relations: Vec<String>,
    rel_ids: BTreeMap<String, RelId>,
    automata: Vec<HeadAutomaton>,
    aut_ids: BTreeMap<String, AutId>,
    unknown_aut: AutId,
    lexicon: Vec<Vec<AutId>>,
    dependency: BTreeMap<(WordId, RelId, WordId), Cost>,
    lexical_start: BTreeMap<(RelId, WordId), Vec<StartEntry>>,
    root_start: BTreeMap<WordId, Vec<StartEntry>>,
    def: ModelDef,
}

impl Model {
    /// Interns a definition. Structural violations (dangling references,
    /// duplicate parameters, empty vocabulary) are errors; probability-sum
    /// problems are left to [`validate_model`].
    pub fn compile(def: &ModelDef) -> Result<Model, Error> {
        let report = validate_model(def);
        let structural: Vec<&Violation> =
            report.violations.iter().filter(|v| v.kind.is_structural()).collect();
        if let Some(first) = structural.first() {
            return Err(Error::InvalidModel(first.message.clone()));
        }

        let words = def.vocabulary();
        let word_ids: BTreeMap<String, WordId> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), WordId(i as u32))).collect();
        let mut relations = def.relations.clone();
        relations.sort();
        relations.dedup();
        let rel_ids: BTreeMap<String, RelId> =
            relations.iter().enumerate().map(|(i, r)| (r.clone(), RelId(i as u32))).collect();

        let mut aut_defs: Vec<&AutomatonDef> = def.automata.iter().collect();
        aut_defs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut automata = Vec::new();
        let mut aut_ids = BTreeMap::new();
        for (i, a) in aut_defs.iter().enumerate() {
            automata.push(HeadAutomaton::compile(a, &rel_ids)?);
            aut_ids.insert(a.id.clone(), AutId(i as u32));
        }
        let unknown_aut = AutId(automata.len() as u32);
        automata.push(HeadAutomaton::compile(
            &AutomatonDef::new(UNKNOWN_AUTOMATON, &[UNKNOWN_STATE]).stop(UNKNOWN_STATE, 0.0),
            &rel_ids,
        )?);

        let mut lexicon = alloc::vec![Vec::new(); words.len()];
        for e in &def.lexicon {
            lexicon[word_ids[&e.word].0 as usize].push(aut_ids[&e.automaton]);
        }
        for l in &mut lexicon {
            l.sort();
            l.dedup();
        }

        let state_of = |aut: AutId, s: &str| automata[aut.0 as usize].state_id(s).expect("validated");
        let mut dependency = BTreeMap::new();
        for d in &def.dependency {
            dependency.insert((word_ids[&d.head], rel_ids[&d.rel], word_ids[&d.dep]), d.cost);
        }
        let mut lexical_start: BTreeMap<(RelId, WordId), Vec<StartEntry>> = BTreeMap::new();
        for l in &def.lexical_start {
            let automaton = aut_ids[&l.automaton];
            lexical_start.entry((rel_ids[&l.rel], word_ids[&l.word])).or_default().push(StartEntry {
                automaton,
                state: state_of(automaton, &l.state),
                cost: l.cost,
            });
        }
        let mut root_start: BTreeMap<WordId, Vec<StartEntry>> = BTreeMap::new();
        for r in &def.root_start {
            let automaton = aut_ids[&r.automaton];
            root_start.entry(word_ids[&r.word]).or_default().push(StartEntry {
                automaton,
                state: state_of(automaton, &r.state),
                cost: r.cost,
            });
        }
        for v in lexical_start.values_mut().chain(root_start.values_mut()) {
            v.sort_by_key(|e| (e.automaton, e.state));
        }

        let mut def = def.clone();
        def.canonicalize();
        Ok(Model {
            mode: def.mode,
            unknown_penalty: def.unknown_word_penalty,
            words,
            word_ids,
            relations,
            rel_ids,
            automata,
            aut_ids,
            unknown_aut,
            lexicon,
            dependency,
            lexical_start,
            root_start,
            def,
        })
    }

    pub fn def(&self) -> &ModelDef {
        &self.def
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_probabilistic(&self) -> bool {
        self.mode == Mode::Probabilistic
    }

    pub fn unknown_word_penalty(&self) -> Cost {
        self.unknown_penalty
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.words
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn automata(&self) -> &[HeadAutomaton] {
        &self.automata
    }

    pub fn lex(&self, word: &str) -> Lex {
        self.word_ids.get(word).copied()
    }

    pub fn word_name(&self, id: WordId) -> &str {
        &self.words[id.0 as usize]
    }

    pub fn rel_id(&self, rel: &str) -> Option<RelId> {
        self.rel_ids.get(rel).copied()
    }

    pub fn rel_name(&self, id: RelId) -> &str {
        &self.relations[id.0 as usize]
    }

    pub fn automaton_id(&self, id: &str) -> Option<AutId> {
        self.aut_ids.get(id).copied().or_else(|| (id == UNKNOWN_AUTOMATON).then_some(self.unknown_aut))
    }

    pub fn automaton(&self, id: AutId) -> &HeadAutomaton {
        &self.automata[id.0 as usize]
    }

    pub fn unknown_automaton(&self) -> AutId {
        self.unknown_aut
    }

    /// Automata a word can head with. Unknown words get the synthetic leaf
    /// automaton.
    pub fn entries(&self, w: Lex) -> &[AutId] {
        match w {
            Some(w) => &self.lexicon[w.0 as usize],
            None => core::slice::from_ref(&self.unknown_aut),
        }
    }

    /// C(↓, dep | head, rel).
    pub fn dependency_cost(&self, head: Lex, rel: RelId, dep: Lex) -> Cost {
        match (head, dep) {
            (Some(h), Some(d)) => self.dependency.get(&(h, rel, d)).copied().unwrap_or(Cost::INFINITE),
            (Some(_), None) => self.unknown_penalty,
            (None, _) => Cost::INFINITE,
        }
    }

    /// C(m, q | rel, ↓, word).
    pub fn lexical_cost(&self, rel: RelId, word: Lex, m: AutId, q: StateId) -> Cost {
        match word {
            Some(w) => self
                .lexical_start
                .get(&(rel, w))
                .and_then(|v| v.iter().find(|e| e.automaton == m && e.state == q))
                .map(|e| e.cost)
                .unwrap_or(Cost::INFINITE),
            None if m == self.unknown_aut => self.unknown_penalty,
            None => Cost::INFINITE,
        }
    }

    /// C(word, m, q | ▷).
    pub fn root_cost(&self, word: Lex, m: AutId, q: StateId) -> Cost {
        match word {
            Some(w) => self
                .root_start
                .get(&w)
                .and_then(|v| v.iter().find(|e| e.automaton == m && e.state == q))
                .map(|e| e.cost)
                .unwrap_or(Cost::INFINITE),
            None if m == self.unknown_aut => self.unknown_penalty,
            None => Cost::INFINITE,
        }
    }

    /// Finite-cost (automaton, state, cost) starts for an r-dependent word.
    pub fn lexical_starts(&self, rel: RelId, word: Lex) -> Vec<(AutId, StateId, Cost)> {
        match word {
            Some(w) => self
                .lexical_start
                .get(&(rel, w))
                .map(|v| v.iter().filter(|e| e.cost.is_finite()).map(|e| (e.automaton, e.state, e.cost)).collect())
                .unwrap_or_default(),
            None => alloc::vec![(self.unknown_aut, StateId(0), self.unknown_penalty)],
        }
    }

    pub fn root_starts(&self, word: Lex) -> Vec<(AutId, StateId, Cost)> {
        match word {
            Some(w) => self
                .root_start
                .get(&w)
                .map(|v| v.iter().filter(|e| e.cost.is_finite()).map(|e| (e.automaton, e.state, e.cost)).collect())
                .unwrap_or_default(),
            None => alloc::vec![(self.unknown_aut, StateId(0), self.unknown_penalty)],
        }
    }

    /// Finite dependency parameters with the given head and relation.
    pub fn dependents_of(&self, head: WordId, rel: RelId) -> Vec<(WordId, Cost)> {
        self.dependency
            .range((head, rel, WordId(0))..=(head, rel, WordId(u32::MAX)))
            .filter(|(_, c)| c.is_finite())
            .map(|(&(_, _, d), &c)| (d, c))
            .collect()
    }

    /// Number of stored dependency parameters.
    pub fn dependency_parameter_count(&self) -> usize {
        self.dependency.len()
    }

    /// Total stored parameters of all kinds.
    pub fn parameter_count(&self) -> usize {
        let aut: usize = self.automata.iter().map(|a| a.action_count()).sum();
        self.dependency.len()
            + self.lexical_start.values().map(Vec::len).sum::<usize>()
            + self.root_start.values().map(Vec::len).sum::<usize>()
            + aut
    }

    pub(crate) fn resolve_start(&self, automaton: &str, state: &str) -> Result<(AutId, StateId), Error> {
        let m = self.automaton_id(automaton).ok_or_else(|| Error::UnknownAutomaton(automaton.to_string()))?;
        let q = self.automaton(m).state_id(state).ok_or_else(|| Error::UnknownState {
            automaton: automaton.to_string(),
            state: state.to_string(),
        })?;
        Ok((m, q))
    }

    /// Minimum-cost action path of `automaton` from `state` writing exactly
    /// the given left and right relation sequences (surface order).
    pub fn automaton_accept_cost(
        &self,
        automaton: &str,
        state: &str,
        left: &[&str],
        right: &[&str],
    ) -> Result<(Cost, Vec<Action>), Error> {
        let (m, q) = self.resolve_start(automaton, state)?;
        match (self.rel_seq(left), self.rel_seq(right)) {
            (Some(l), Some(r)) => Ok(self.automaton(m).accept_cost(q, &l, &r)),
            _ => Ok((Cost::INFINITE, Vec::new())),
        }
    }

    /// Sum over accepting paths of the product of action probabilities.
    pub fn sequence_pair_probability(
        &self,
        automaton: &str,
        state: &str,
        left: &[&str],
        right: &[&str],
    ) -> Result<f64, Error> {
        if !self.is_probabilistic() {
            return Err(Error::NotProbabilistic);
        }
        let (m, q) = self.resolve_start(automaton, state)?;
        match (self.rel_seq(left), self.rel_seq(right)) {
            (Some(l), Some(r)) => Ok(self.automaton(m).sequence_probability(q, &l, &r)),
            _ => Ok(0.0),
        }
    }

    pub(crate) fn rel_seq(&self, rels: &[&str]) -> Option<Vec<RelId>> {
        rels.iter().map(|r| self.rel_id(r)).collect()
    }

    pub fn describe_action(&self, m: AutId, a: &Action) -> String {
        let aut = self.automaton(m);
        match *a {
            Action::Left { from, rel, to } => {
                format!("{}: {} <-{}- {}", aut.id, aut.state_name(from), self.rel_name(rel), aut.state_name(to))
            }
            Action::Right { from, rel, to } => {
                format!("{}: {} -{}-> {}", aut.id, aut.state_name(from), self.rel_name(rel), aut.state_name(to))
            }
            Action::Stop { state } => format!("{}: stop {}", aut.id, aut.state_name(state)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fixture_ab() -> ModelDef {
        let ln2 = core::f64::consts::LN_2;
        ModelDef::new(Mode::Probabilistic)
            .relations(&["a", "b"])
            .automaton(AutomatonDef::new("ab", &["q0", "q1"]).left("q0", "a", "q1", ln2).right("q1", "b", "q0", 0.0).stop("q0", ln2))
            .automaton(AutomatonDef::new("leaf", &["s0"]).stop("s0", 0.0))
            .word("h", "ab")
            .word("a", "leaf")
            .word("b", "leaf")
            .dep("h", "a", "a", 0.0)
            .dep("h", "b", "b", 0.0)
            .lex_start("a", "a", "leaf", "s0", 0.0)
            .lex_start("b", "b", "leaf", "s0", 0.0)
            .root("h", "ab", "q0", 0.0)
    }

    #[test]
    fn compile_interns_sorted_vocabulary() {
        let m = Model::compile(&fixture_ab()).unwrap();
        assert_eq!(m.vocabulary(), &["a", "b", "h"]);
        assert_eq!(m.relations(), &["a", "b"]);
        assert_eq!(m.automaton(m.automaton_id("ab").unwrap()).states().len(), 2);
    }

    #[test]
    fn absent_parameters_are_infinite() {
        let m = Model::compile(&fixture_ab()).unwrap();
        let a = m.rel_id("a").unwrap();
        assert!(m.dependency_cost(m.lex("a"), a, m.lex("h")).is_infinite());
        assert_eq!(m.dependency_cost(m.lex("h"), a, m.lex("a")), Cost::ZERO);
    }

    #[test]
    fn unknown_words_get_penalty_surrogates() {
        let m = Model::compile(&fixture_ab()).unwrap();
        let a = m.rel_id("a").unwrap();
        assert_eq!(m.entries(None), &[m.unknown_automaton()]);
        assert_eq!(m.dependency_cost(m.lex("h"), a, None), Cost::new(20.0));
        assert_eq!(m.lexical_cost(a, None, m.unknown_automaton(), StateId(0)), Cost::new(20.0));
        assert!(m.dependency_cost(None, a, m.lex("h")).is_infinite());
    }

    #[test]
    fn dangling_automaton_is_a_compile_error() {
        let def = fixture_ab().word("x", "nope");
        assert!(matches!(Model::compile(&def), Err(Error::InvalidModel(_))));
    }
}
