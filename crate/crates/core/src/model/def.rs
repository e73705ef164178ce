//! Plain, string-keyed model description. This is what model files decode
//! into; [`Model::compile`](super::Model::compile) interns it for search.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::Cost;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Probabilistic,
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionDef {
    pub from: String,
    pub rel: String,
    pub to: String,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StopDef {
    pub state: String,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutomatonDef {
    pub id: String,
    pub states: Vec<String>,
    pub left: Vec<TransitionDef>,
    pub right: Vec<TransitionDef>,
    pub stop: Vec<StopDef>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LexiconDef {
    pub word: String,
    pub automaton: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DependencyDef {
    pub head: String,
    pub rel: String,
    pub dep: String,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LexicalStartDef {
    pub rel: String,
    pub word: String,
    pub automaton: String,
    pub state: String,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootStartDef {
    pub word: String,
    pub automaton: String,
    pub state: String,
    pub cost: Cost,
}

pub const DEFAULT_UNKNOWN_WORD_PENALTY: f64 = 20.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelDef {
    pub mode: Mode,
    pub unknown_word_penalty: Cost,
    pub relations: Vec<String>,
    pub automata: Vec<AutomatonDef>,
    pub lexicon: Vec<LexiconDef>,
    pub dependency: Vec<DependencyDef>,
    pub lexical_start: Vec<LexicalStartDef>,
    pub root_start: Vec<RootStartDef>,
}

impl ModelDef {
    pub fn new(mode: Mode) -> Self {
        ModelDef {
            mode,
            unknown_word_penalty: Cost::new(DEFAULT_UNKNOWN_WORD_PENALTY),
            relations: Vec::new(),
            automata: Vec::new(),
            lexicon: Vec::new(),
            dependency: Vec::new(),
            lexical_start: Vec::new(),
            root_start: Vec::new(),
        }
    }

    pub fn relations(mut self, rels: &[&str]) -> Self {
        self.relations.extend(rels.iter().map(|r| String::from(*r)));
        self
    }

    pub fn automaton(mut self, a: AutomatonDef) -> Self {
        self.automata.push(a);
        self
    }

    pub fn word(mut self, word: &str, automaton: &str) -> Self {
        self.lexicon.push(LexiconDef { word: word.into(), automaton: automaton.into() });
        self
    }

    pub fn dep(mut self, head: &str, rel: &str, dep: &str, cost: f64) -> Self {
        self.dependency.push(DependencyDef {
            head: head.into(),
            rel: rel.into(),
            dep: dep.into(),
            cost: Cost::new(cost),
        });
        self
    }

    pub fn lex_start(mut self, rel: &str, word: &str, automaton: &str, state: &str, cost: f64) -> Self {
        self.lexical_start.push(LexicalStartDef {
            rel: rel.into(),
            word: word.into(),
            automaton: automaton.into(),
            state: state.into(),
            cost: Cost::new(cost),
        });
        self
    }

    pub fn root(mut self, word: &str, automaton: &str, state: &str, cost: f64) -> Self {
        self.root_start.push(RootStartDef {
            word: word.into(),
            automaton: automaton.into(),
            state: state.into(),
            cost: Cost::new(cost),
        });
        self
    }

    pub fn penalty(mut self, cost: f64) -> Self {
        self.unknown_word_penalty = Cost::new(cost);
        self
    }

    /// Words of the lexicon, sorted and deduplicated.
    pub fn vocabulary(&self) -> Vec<String> {
        let mut v: Vec<String> = self.lexicon.iter().map(|e| e.word.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Sort every record list so that equal models serialize identically.
    pub fn canonicalize(&mut self) {
        self.relations.sort();
        self.relations.dedup();
        for a in &mut self.automata {
            a.canonicalize();
        }
        self.automata.sort_by(|a, b| a.id.cmp(&b.id));
        self.lexicon.sort_by(|a, b| (&a.word, &a.automaton).cmp(&(&b.word, &b.automaton)));
        self.dependency.sort_by(|a, b| (&a.head, &a.rel, &a.dep).cmp(&(&b.head, &b.rel, &b.dep)));
        self.lexical_start.sort_by(|a, b| {
            (&a.rel, &a.word, &a.automaton, &a.state).cmp(&(&b.rel, &b.word, &b.automaton, &b.state))
        });
        self.root_start
            .sort_by(|a, b| (&a.word, &a.automaton, &a.state).cmp(&(&b.word, &b.automaton, &b.state)));
    }
}

impl AutomatonDef {
    pub fn new(id: &str, states: &[&str]) -> Self {
        AutomatonDef {
            id: id.into(),
            states: states.iter().map(|s| String::from(*s)).collect(),
            left: Vec::new(),
            right: Vec::new(),
            stop: Vec::new(),
        }
    }

    pub fn left(mut self, from: &str, rel: &str, to: &str, cost: f64) -> Self {
        self.left.push(TransitionDef { from: from.into(), rel: rel.into(), to: to.into(), cost: Cost::new(cost) });
        self
    }

    pub fn right(mut self, from: &str, rel: &str, to: &str, cost: f64) -> Self {
        self.right.push(TransitionDef { from: from.into(), rel: rel.into(), to: to.into(), cost: Cost::new(cost) });
        self
    }

    pub fn stop(mut self, state: &str, cost: f64) -> Self {
        self.stop.push(StopDef { state: state.into(), cost: Cost::new(cost) });
        self
    }

    pub fn canonicalize(&mut self) {
        self.states.sort();
        let key = |t: &TransitionDef| (t.from.clone(), t.rel.clone(), t.to.clone());
        self.left.sort_by_key(key);
        self.right.sort_by_key(key);
        self.stop.sort_by(|a, b| a.state.cmp(&b.state));
    }
}
