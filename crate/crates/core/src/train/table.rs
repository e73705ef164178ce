//! Cost tables over choices, with backed-off lookup, and their exchange with
//! model definitions and bilingual lexicons.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::choice::{Choice, ChoiceFamily, TraceStep};
use crate::cost::Cost;
use crate::model::{Mode, ModelDef};
use crate::transfer::BilingualLexicon;

pub const DEFAULT_COST: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backoff {
    /// Average over coarser classes made by dropping context positions from
    /// the end, then over the whole table.
    ContextDrop,
    /// Missing keys get the default.
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostTable {
    pub backoff: Backoff,
    pub default: Cost,
    entries: BTreeMap<Choice, Cost>,
}

impl Default for CostTable {
    fn default() -> Self {
        CostTable::new(Backoff::ContextDrop, Cost::new(DEFAULT_COST))
    }
}

impl CostTable {
    pub fn new(backoff: Backoff, default: Cost) -> Self {
        CostTable { backoff, default, entries: BTreeMap::new() }
    }

    /// Every lookup returns `cost`.
    pub fn uniform(cost: f64) -> Self {
        CostTable::new(Backoff::ContextDrop, Cost::new(cost))
    }

    pub fn insert(&mut self, choice: Choice, cost: Cost) {
        self.entries.insert(choice, cost);
    }

    pub fn get(&self, choice: &Choice) -> Option<Cost> {
        self.entries.get(choice).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Choice, Cost)> + '_ {
        self.entries.iter().map(|(c, &v)| (c, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Later tables win on shared keys.
    pub fn extend(&mut self, other: &CostTable) {
        for (c, v) in other.entries() {
            self.entries.insert(c.clone(), v);
        }
    }

    /// Finite stored cost, else (with context backoff) the mean over the
    /// first non-empty coarser class, else the mean over the table, else the
    /// default.
    pub fn lookup(&self, choice: &Choice) -> Cost {
        if let Some(c) = self.get(choice).filter(|c| c.is_finite()) {
            return c;
        }
        if self.backoff == Backoff::None {
            return self.default;
        }
        for k in (0..choice.context.len()).rev() {
            let prefix = &choice.context[..k];
            let class = self.entries.iter().filter(|(c, v)| {
                v.is_finite()
                    && c.family == choice.family
                    && c.event == choice.event
                    && c.context.len() == choice.context.len()
                    && c.context[..k] == *prefix
            });
            if let Some(m) = mean(class.map(|(_, v)| *v)) {
                return m;
            }
        }
        mean(self.entries.values().copied().filter(|v| v.is_finite())).unwrap_or(self.default)
    }

    /// Σ lookup over a trace's choices.
    pub fn score(&self, choices: &[Choice]) -> Cost {
        choices.iter().map(|c| self.lookup(c)).sum()
    }

    /// The table holding exactly a model's finite parameters.
    pub fn from_model(def: &ModelDef) -> CostTable {
        let mut t = CostTable::default();
        for a in &def.automata {
            for x in &a.left {
                t.insert(Choice::left(&a.id, &x.from, &x.rel, &x.to), x.cost);
            }
            for x in &a.right {
                t.insert(Choice::right(&a.id, &x.from, &x.rel, &x.to), x.cost);
            }
            for s in &a.stop {
                t.insert(Choice::stop(&a.id, &s.state), s.cost);
            }
        }
        for d in &def.dependency {
            t.insert(Choice::dep(&d.head, &d.rel, &d.dep), d.cost);
        }
        for l in &def.lexical_start {
            t.insert(Choice::lex(&l.rel, &l.word, &l.automaton, &l.state), l.cost);
        }
        for r in &def.root_start {
            t.insert(Choice::root(&r.word, &r.automaton, &r.state), r.cost);
        }
        t.insert(Choice::unknown(), def.unknown_word_penalty);
        t.entries.retain(|_, v| v.is_finite());
        t
    }

    pub fn from_lexicon(lexicon: &BilingualLexicon) -> CostTable {
        let mut t = CostTable::default();
        for e in &lexicon.entries {
            t.insert(Choice::xfer(&e.id, &e.word, None), e.cost);
            for c in &e.context {
                t.insert(Choice::xfer(&e.id, &e.word, Some((&c.parent, &c.rel))), c.cost);
            }
        }
        for n in &lexicon.nulls {
            t.insert(Choice::null(&n.word), n.cost);
        }
        t.entries.retain(|_, v| v.is_finite());
        t
    }

    /// Re-costs every finite parameter of `def` by lookup. The result is a
    /// generic model: looked-up costs need not normalize.
    pub fn overlay_model(&self, def: &ModelDef) -> ModelDef {
        let mut d = def.clone();
        d.mode = Mode::Generic;
        let set = |c: &mut Cost, choice: Choice| {
            if c.is_finite() {
                *c = self.lookup(&choice);
            }
        };
        for a in &mut d.automata {
            let id = a.id.clone();
            for x in &mut a.left {
                set(&mut x.cost, Choice::left(&id, &x.from, &x.rel, &x.to));
            }
            for x in &mut a.right {
                set(&mut x.cost, Choice::right(&id, &x.from, &x.rel, &x.to));
            }
            for s in &mut a.stop {
                set(&mut s.cost, Choice::stop(&id, &s.state));
            }
        }
        for x in &mut d.dependency {
            set(&mut x.cost, Choice::dep(&x.head, &x.rel, &x.dep));
        }
        for x in &mut d.lexical_start {
            set(&mut x.cost, Choice::lex(&x.rel, &x.word, &x.automaton, &x.state));
        }
        for x in &mut d.root_start {
            set(&mut x.cost, Choice::root(&x.word, &x.automaton, &x.state));
        }
        if let Some(c) = self.get(&Choice::unknown()).filter(|c| c.is_finite()) {
            d.unknown_word_penalty = c;
        }
        d
    }

    pub fn overlay_lexicon(&self, lexicon: &BilingualLexicon) -> BilingualLexicon {
        let mut l = lexicon.clone();
        for e in &mut l.entries {
            if e.cost.is_finite() {
                e.cost = self.lookup(&Choice::xfer(&e.id, &e.word, None));
            }
            for c in &mut e.context {
                if c.cost.is_finite() {
                    c.cost = self.lookup(&Choice::xfer(&e.id, &e.word, Some((&c.parent, &c.rel))));
                }
            }
        }
        // Null entries are implicit at cost 0; a table can make them
        // explicit.
        for (c, v) in self.entries() {
            if c.family == ChoiceFamily::Null && v.is_finite() {
                let word = &c.context[0];
                match l.nulls.iter_mut().find(|n| &n.word == word) {
                    Some(n) => n.cost = v,
                    None => l.nulls.push(crate::transfer::NullEntry { word: word.clone(), cost: v }),
                }
            }
        }
        for n in &mut l.nulls {
            n.cost = self.lookup(&Choice::null(&n.word));
        }
        l
    }
}

fn mean(it: impl Iterator<Item = Cost>) -> Option<Cost> {
    let v: Vec<f64> = it.map(Cost::value).collect();
    (!v.is_empty()).then(|| Cost::new(v.iter().sum::<f64>() / v.len() as f64))
}

/// The choices of a trace, in order.
pub fn record_choices(steps: &[TraceStep]) -> Vec<Choice> {
    steps.iter().map(|s| s.choice.clone()).collect()
}
