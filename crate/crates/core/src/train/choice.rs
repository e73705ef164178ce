//! Choices (e|c): every model parameter or transfer entry used by a
//! derivation is one event in one context.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cost::Cost;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChoiceFamily {
    Root,
    Left,
    Right,
    Stop,
    Dep,
    Lex,
    Xfer,
    Null,
    Unk,
}

impl ChoiceFamily {
    pub const ALL: [ChoiceFamily; 9] = [
        ChoiceFamily::Root,
        ChoiceFamily::Left,
        ChoiceFamily::Right,
        ChoiceFamily::Stop,
        ChoiceFamily::Dep,
        ChoiceFamily::Lex,
        ChoiceFamily::Xfer,
        ChoiceFamily::Null,
        ChoiceFamily::Unk,
    ];

    /// Families whose events compete for the same probability mass. A
    /// state's left, right and stop actions share one distribution.
    pub fn normalization_group(self) -> ChoiceFamily {
        match self {
            ChoiceFamily::Right | ChoiceFamily::Stop => ChoiceFamily::Left,
            f => f,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChoiceFamily::Root => "root",
            ChoiceFamily::Left => "left",
            ChoiceFamily::Right => "right",
            ChoiceFamily::Stop => "stop",
            ChoiceFamily::Dep => "dep",
            ChoiceFamily::Lex => "lex",
            ChoiceFamily::Xfer => "xfer",
            ChoiceFamily::Null => "null",
            ChoiceFamily::Unk => "unk",
        }
    }
}

impl fmt::Display for ChoiceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChoiceFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ChoiceFamily::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| alloc::format!("unknown choice family {s:?}"))
    }
}

/// An event in a context. Context positions are ordered so that backoff
/// drops the last one first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Choice {
    pub family: ChoiceFamily,
    pub context: Vec<String>,
    pub event: Vec<String>,
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Choice {
    pub fn new(family: ChoiceFamily, context: &[&str], event: &[&str]) -> Choice {
        Choice { family, context: strs(context), event: strs(event) }
    }

    pub fn root(word: &str, automaton: &str, state: &str) -> Choice {
        Choice::new(ChoiceFamily::Root, &["root"], &[word, automaton, state])
    }

    pub fn left(automaton: &str, from: &str, rel: &str, to: &str) -> Choice {
        Choice::new(ChoiceFamily::Left, &[automaton, from], &[to, rel])
    }

    pub fn right(automaton: &str, from: &str, rel: &str, to: &str) -> Choice {
        Choice::new(ChoiceFamily::Right, &[automaton, from], &[to, rel])
    }

    pub fn stop(automaton: &str, state: &str) -> Choice {
        Choice::new(ChoiceFamily::Stop, &[automaton, state], &["stop"])
    }

    pub fn dep(head: &str, rel: &str, dep: &str) -> Choice {
        Choice::new(ChoiceFamily::Dep, &[head, rel], &[dep])
    }

    pub fn lex(rel: &str, word: &str, automaton: &str, state: &str) -> Choice {
        Choice::new(ChoiceFamily::Lex, &[word, rel], &[automaton, state])
    }

    /// A transfer entry chosen for `word`; `parent` is `(parent word,
    /// incoming relation)` when a context row applied.
    pub fn xfer(entry: &str, word: &str, parent: Option<(&str, &str)>) -> Choice {
        match parent {
            Some((p, rel)) => Choice::new(ChoiceFamily::Xfer, &[word, rel, p], &[entry]),
            None => Choice::new(ChoiceFamily::Xfer, &[word], &[entry]),
        }
    }

    pub fn null(word: &str) -> Choice {
        Choice::new(ChoiceFamily::Null, &[word], &["null"])
    }

    pub fn unknown() -> Choice {
        Choice::new(ChoiceFamily::Unk, &["penalty"], &["unknown"])
    }

    pub fn context_key(&self) -> String {
        self.context.join(" ")
    }

    pub fn event_key(&self) -> String {
        self.event.join(" ")
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}|{})", self.family, self.event_key(), self.context_key())
    }
}

/// A choice together with the cost it contributed.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub choice: Choice,
    pub cost: Cost,
}

impl TraceStep {
    pub fn new(choice: Choice, cost: Cost) -> TraceStep {
        TraceStep { choice, cost }
    }
}

pub fn total_cost(steps: &[TraceStep]) -> Cost {
    steps.iter().map(|s| s.cost).sum()
}

pub fn choices(steps: &[TraceStep]) -> Vec<Choice> {
    steps.iter().map(|s| s.choice.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn family_names_round_trip() {
        for f in ChoiceFamily::ALL {
            assert_eq!(f.name().parse::<ChoiceFamily>().unwrap(), f);
        }
        assert!("bogus".parse::<ChoiceFamily>().is_err());
    }

    #[test]
    fn dependency_context_keeps_head_longest() {
        let c = Choice::dep("flights", "mod", "cheap");
        assert_eq!(c.context, vec!["flights", "mod"]);
        assert_eq!(c.event, vec!["cheap"]);
    }

    #[test]
    fn lexical_context_drops_relation_first() {
        let c = Choice::lex("mod", "cheap", "leaf", "s0");
        assert_eq!(c.context.last().map(String::as_str), Some("mod"));
    }
}
