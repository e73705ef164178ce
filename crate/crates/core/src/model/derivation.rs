//! Costing of complete ordered derivations.

use alloc::vec::Vec;

use super::{Action, AutId, Lex, Model, StateId};
use crate::cost::Cost;
use crate::train::choice::{Choice, TraceStep};
use crate::tree::OrderedDependencyTree;

/// Every cost factor of a derivation, in a fixed order: root start, then per
/// node its automaton actions followed by, for each dependent in surface
/// order, the dependency factor, the lexical factor and the dependent's own
/// factors.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
    pub total: Cost,
}

impl Model {
    /// Summed cost of a derivation. Unknown automata or states, missing
    /// parameters and unwritable relation sequences make it INFINITE.
    pub fn derivation_cost(&self, tree: &OrderedDependencyTree) -> Cost {
        self.derivation_trace(tree).total
    }

    pub fn derivation_trace(&self, tree: &OrderedDependencyTree) -> DerivationTrace {
        self.derivation_trace_charging(tree, &mut |_, _| true)
    }

    /// Like [`derivation_trace`](Self::derivation_trace), but dependency
    /// factors are only charged when `charge(head, dependent)` holds, both
    /// given as surface positions.
    pub fn derivation_trace_charging(
        &self,
        tree: &OrderedDependencyTree,
        charge: &mut dyn FnMut(usize, usize) -> bool,
    ) -> DerivationTrace {
        let mut steps = Vec::new();
        let w = self.lex(&tree.word);
        let total = match self.resolve_start(&tree.automaton, &tree.state) {
            Ok((m, q)) => {
                let root = self.root_cost(w, m, q);
                steps.push(self.start_step(w, TraceStart::Root, m, q, root, tree));
                root + self.node_trace(tree, 0, w, m, q, &mut steps, charge)
            }
            Err(_) => Cost::INFINITE,
        };
        DerivationTrace { steps, total }
    }

    fn node_trace(
        &self,
        t: &OrderedDependencyTree,
        offset: usize,
        w: Lex,
        m: AutId,
        q: StateId,
        steps: &mut Vec<TraceStep>,
        charge: &mut dyn FnMut(usize, usize) -> bool,
    ) -> Cost {
        let left: Vec<&str> = t.left_relations();
        let right: Vec<&str> = t.right_relations();
        let (Some(l), Some(r)) = (self.rel_seq(&left), self.rel_seq(&right)) else {
            return Cost::INFINITE;
        };
        let aut = self.automaton(m);
        let (mut total, path) = aut.accept_cost(q, &l, &r);
        if total.is_infinite() {
            return total;
        }
        if m != self.unknown_automaton() {
            for a in &path {
                steps.push(TraceStep::new(self.action_choice(m, a), aut.action_cost(a)));
            }
        }
        let me = offset + t.left.iter().map(|d| d.tree.node_count()).sum::<usize>();
        let mut start = offset;
        for d in t.dependents() {
            if start == me {
                start += 1;
            }
            let span = d.tree.node_count();
            let rel = self.rel_id(&d.rel).expect("checked above");
            let dw = self.lex(&d.tree.word);
            let dpos = start + d.tree.left.iter().map(|x| x.tree.node_count()).sum::<usize>();
            let charged = charge(me, dpos);
            let dep = if charged { self.dependency_cost(w, rel, dw) } else { Cost::ZERO };
            if charged {
                steps.push(match dw {
                    Some(_) => TraceStep::new(Choice::dep(&t.word, &d.rel, &d.tree.word), dep),
                    None => TraceStep::new(Choice::unknown(), dep),
                });
            }
            let Ok((dm, dq)) = self.resolve_start(&d.tree.automaton, &d.tree.state) else {
                return Cost::INFINITE;
            };
            let lex = self.lexical_cost(rel, dw, dm, dq);
            steps.push(self.start_step(dw, TraceStart::Lexical(&d.rel), dm, dq, lex, &d.tree));
            total = total + dep + lex + self.node_trace(&d.tree, start, dw, dm, dq, steps, charge);
            start += span;
            if total.is_infinite() {
                return total;
            }
        }
        total
    }

    fn start_step(
        &self,
        w: Lex,
        kind: TraceStart<'_>,
        m: AutId,
        q: StateId,
        cost: Cost,
        t: &OrderedDependencyTree,
    ) -> TraceStep {
        let aut = self.automaton(m);
        let choice = match (w, kind) {
            (None, _) => Choice::unknown(),
            (Some(_), TraceStart::Root) => Choice::root(&t.word, &aut.id, aut.state_name(q)),
            (Some(_), TraceStart::Lexical(rel)) => Choice::lex(rel, &t.word, &aut.id, aut.state_name(q)),
        };
        TraceStep::new(choice, cost)
    }

    pub(crate) fn action_choice(&self, m: AutId, a: &Action) -> Choice {
        let aut = self.automaton(m);
        match *a {
            Action::Left { from, rel, to } => {
                Choice::left(&aut.id, aut.state_name(from), self.rel_name(rel), aut.state_name(to))
            }
            Action::Right { from, rel, to } => {
                Choice::right(&aut.id, aut.state_name(from), self.rel_name(rel), aut.state_name(to))
            }
            Action::Stop { state } => Choice::stop(&aut.id, aut.state_name(state)),
        }
    }

    /// P(D0) summed over automaton paths: the probability of the ordered
    /// tree itself. Zero outside probabilistic mode.
    pub fn derivation_probability(&self, tree: &OrderedDependencyTree) -> f64 {
        if !self.is_probabilistic() {
            return 0.0;
        }
        let w = self.lex(&tree.word);
        match self.resolve_start(&tree.automaton, &tree.state) {
            Ok((m, q)) => self.root_cost(w, m, q).probability() * self.node_probability(tree, w, m, q),
            Err(_) => 0.0,
        }
    }

    fn node_probability(&self, t: &OrderedDependencyTree, w: Lex, m: AutId, q: StateId) -> f64 {
        let (Some(l), Some(r)) = (self.rel_seq(&t.left_relations()), self.rel_seq(&t.right_relations())) else {
            return 0.0;
        };
        let mut p = self.automaton(m).sequence_probability(q, &l, &r);
        for d in t.dependents() {
            if p == 0.0 {
                return 0.0;
            }
            let rel = self.rel_id(&d.rel).expect("checked above");
            let dw = self.lex(&d.tree.word);
            let Ok((dm, dq)) = self.resolve_start(&d.tree.automaton, &d.tree.state) else {
                return 0.0;
            };
            p *= self.dependency_cost(w, rel, dw).probability()
                * self.lexical_cost(rel, dw, dm, dq).probability()
                * self.node_probability(&d.tree, dw, dm, dq);
        }
        p
    }
}

#[derive(Clone, Copy)]
enum TraceStart<'a> {
    Root,
    Lexical(&'a str),
}

#[cfg(test)]
mod tests {
    use crate::model::{AutomatonDef, Mode, Model, ModelDef};
    use crate::tree::OrderedDependencyTree;
    use crate::Cost;

    fn toy() -> Model {
        let def = ModelDef::new(Mode::Generic)
            .relations(&["mod"])
            .automaton(AutomatonDef::new("leaf", &["s0"]).stop("s0", 0.5))
            .automaton(AutomatonDef::new("noun", &["n0", "n1"]).left("n0", "mod", "n1", 0.25).stop("n1", 0.125))
            .word("w", "leaf")
            .word("cheap", "leaf")
            .word("flights", "noun")
            .root("w", "leaf", "s0", 1.0)
            .root("flights", "noun", "n0", 2.0)
            .dep("flights", "mod", "cheap", 3.0)
            .lex_start("mod", "cheap", "leaf", "s0", 4.0);
        Model::compile(&def).unwrap()
    }

    #[test]
    fn leaf_is_root_plus_stop() {
        let m = toy();
        assert_eq!(m.derivation_cost(&OrderedDependencyTree::leaf("w", "leaf", "s0")), Cost::new(1.5));
    }

    #[test]
    fn two_word_tree_sums_every_factor() {
        let m = toy();
        let t = OrderedDependencyTree::leaf("flights", "noun", "n0")
            .with_left("mod", OrderedDependencyTree::leaf("cheap", "leaf", "s0"));
        // root 2, left 0.25, stop 0.125, dep 3, lex 4, dependent stop 0.5
        assert_eq!(m.derivation_cost(&t), Cost::new(9.875));
        let trace = m.derivation_trace(&t);
        assert_eq!(trace.steps.len(), 6);
        assert_eq!(trace.steps.iter().map(|s| s.cost).sum::<Cost>(), trace.total);
    }

    #[test]
    fn missing_parameter_is_infinite() {
        let m = toy();
        let t = OrderedDependencyTree::leaf("flights", "noun", "n0")
            .with_left("mod", OrderedDependencyTree::leaf("w", "leaf", "s0"));
        assert!(m.derivation_cost(&t).is_infinite());
    }
}
