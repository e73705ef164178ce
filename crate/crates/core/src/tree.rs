use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::UnorderedDependencyGraph;

/// A derivation tree. `left` is stored outermost first and `right` innermost
/// first, so both lists read in surface order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedDependencyTree {
    pub word: String,
    pub automaton: String,
    /// Start state of `automaton` for this node.
    pub state: String,
    pub left: Vec<Dependent>,
    pub right: Vec<Dependent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dependent {
    pub rel: String,
    pub tree: OrderedDependencyTree,
}

impl OrderedDependencyTree {
    pub fn leaf(word: &str, automaton: &str, state: &str) -> Self {
        OrderedDependencyTree {
            word: word.into(),
            automaton: automaton.into(),
            state: state.into(),
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    pub fn with_left(mut self, rel: &str, tree: OrderedDependencyTree) -> Self {
        self.left.push(Dependent { rel: rel.into(), tree });
        self
    }

    pub fn with_right(mut self, rel: &str, tree: OrderedDependencyTree) -> Self {
        self.right.push(Dependent { rel: rel.into(), tree });
        self
    }

    pub fn left_relations(&self) -> Vec<&str> {
        self.left.iter().map(|d| d.rel.as_str()).collect()
    }

    pub fn right_relations(&self) -> Vec<&str> {
        self.right.iter().map(|d| d.rel.as_str()).collect()
    }

    pub fn dependents(&self) -> impl Iterator<Item = &Dependent> {
        self.left.iter().chain(self.right.iter())
    }

    /// Left-parent-right traversal.
    pub fn linearize(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.linearize_into(&mut out);
        out
    }

    fn linearize_into(&self, out: &mut Vec<String>) {
        for d in &self.left {
            d.tree.linearize_into(out);
        }
        out.push(self.word.clone());
        for d in &self.right {
            d.tree.linearize_into(out);
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.dependents().map(|d| d.tree.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.dependents().map(|d| d.tree.depth()).max().unwrap_or(0)
    }

    /// Forget surface order. Node ids are surface positions.
    pub fn unorder(&self) -> UnorderedDependencyGraph {
        let mut g = UnorderedDependencyGraph::new();
        let mut next = 0;
        self.unorder_into(&mut g, &mut next);
        g.nodes.sort();
        g.arcs.sort();
        g
    }

    fn unorder_into(&self, g: &mut UnorderedDependencyGraph, next: &mut u32) -> u32 {
        let left: Vec<(String, u32)> =
            self.left.iter().map(|d| (d.rel.clone(), d.tree.unorder_into(g, next))).collect();
        let me = *next;
        *next += 1;
        g.add_node(me, Some(&self.word));
        for (rel, child) in left {
            g.add_arc(me, &rel, child);
        }
        for d in &self.right {
            let child = d.tree.unorder_into(g, next);
            g.add_arc(me, &d.rel, child);
        }
        me
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cheap_flights_to_boston() -> OrderedDependencyTree {
        OrderedDependencyTree::leaf("flights", "noun", "n0")
            .with_left("mod", OrderedDependencyTree::leaf("cheap", "leaf", "s0"))
            .with_right(
                "mod",
                OrderedDependencyTree::leaf("to", "prep", "p0")
                    .with_right("pobj", OrderedDependencyTree::leaf("boston", "leaf", "s0")),
            )
    }

    #[test]
    fn linearize_single_node() {
        assert_eq!(OrderedDependencyTree::leaf("flights", "n", "q").linearize(), vec!["flights"]);
    }

    #[test]
    fn linearize_left_parent_right() {
        assert_eq!(
            cheap_flights_to_boston().linearize(),
            vec!["cheap", "flights", "to", "boston"]
        );
    }

    #[test]
    fn left_children_keep_outermost_first_order() {
        let t = OrderedDependencyTree::leaf("h", "m", "q")
            .with_left("r", OrderedDependencyTree::leaf("x", "m", "q"))
            .with_left("r", OrderedDependencyTree::leaf("y", "m", "q"));
        assert_eq!(t.linearize(), vec!["x", "y", "h"]);
    }

    #[test]
    fn unorder_uses_surface_positions() {
        let g = cheap_flights_to_boston().unorder();
        assert_eq!(g.word(crate::NodeId(1)), Some("flights"));
        assert_eq!(g.arcs.len(), 3);
        assert_eq!(g.tree_root().unwrap(), crate::NodeId(1));
    }
}
