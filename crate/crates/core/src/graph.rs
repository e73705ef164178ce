//! Unordered dependency graphs. Transfer fragments, source trees handed to
//! transfer, and target graphs handed to generation all use this type.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphNode {
    pub id: NodeId,
    pub word: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraphArc {
    pub from: NodeId,
    pub rel: String,
    pub to: NodeId,
}

impl GraphArc {
    pub fn new(from: u32, rel: &str, to: u32) -> GraphArc {
        GraphArc { from: NodeId(from), rel: rel.into(), to: NodeId(to) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnorderedDependencyGraph {
    pub nodes: Vec<GraphNode>,
    pub arcs: Vec<GraphArc>,
}

impl UnorderedDependencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: u32, word: Option<&str>) -> NodeId {
        let id = NodeId(id);
        self.nodes.push(GraphNode { id, word: word.map(String::from) });
        id
    }

    pub fn add_arc(&mut self, from: u32, rel: &str, to: u32) {
        self.arcs.push(GraphArc::new(from, rel, to));
    }

    pub fn node(&self, id: NodeId) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn word(&self, id: NodeId) -> Option<&str> {
        self.node(id).and_then(|n| n.word.as_deref())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn is_labeled(&self) -> bool {
        self.nodes.iter().all(|n| n.word.is_some())
    }

    pub fn parent_arc(&self, id: NodeId) -> Option<&GraphArc> {
        self.arcs.iter().find(|a| a.to == id)
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = &GraphArc> + '_ {
        self.arcs.iter().filter(move |a| a.from == id)
    }

    /// Node ids unique and every arc endpoint declared.
    pub fn check_well_formed(&self) -> Result<(), Error> {
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id) {
                return Err(Error::InvalidGraph(format!("duplicate node id {}", n.id.0)));
            }
        }
        for a in &self.arcs {
            if !seen.contains(&a.from) || !seen.contains(&a.to) {
                return Err(Error::InvalidGraph(format!(
                    "arc {} -{}-> {} references an undeclared node",
                    a.from.0, a.rel, a.to.0
                )));
            }
        }
        Ok(())
    }

    /// Weakly connected components, each sorted, in order of smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for n in &self.nodes {
            adj.entry(n.id).or_default();
        }
        for a in &self.arcs {
            adj.entry(a.from).or_default().push(a.to);
            adj.entry(a.to).or_default().push(a.from);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = alloc::vec![start];
            seen.insert(start);
            while let Some(n) = stack.pop() {
                comp.push(n);
                for &m in &adj[&n] {
                    if seen.insert(m) {
                        stack.push(m);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Root of a single-rooted tree, or an error describing why the graph is
    /// not one.
    pub fn tree_root(&self) -> Result<NodeId, Error> {
        self.check_well_formed()?;
        let roots = self.forest_roots()?;
        match roots.as_slice() {
            [r] => Ok(*r),
            [] => Err(Error::InvalidGraph("empty graph".into())),
            _ => Err(Error::InvalidGraph("graph has more than one component".into())),
        }
    }

    /// Roots of a forest: every node has at most one incoming arc and there
    /// are no cycles.
    pub fn forest_roots(&self) -> Result<Vec<NodeId>, Error> {
        let mut indeg: BTreeMap<NodeId, usize> = self.node_ids().map(|n| (n, 0)).collect();
        for a in &self.arcs {
            *indeg.get_mut(&a.to).ok_or_else(|| Error::InvalidGraph("dangling arc".into()))? += 1;
        }
        if let Some((n, _)) = indeg.iter().find(|(_, &d)| d > 1) {
            return Err(Error::InvalidGraph(format!("node {} has several heads", n.0)));
        }
        let roots: Vec<NodeId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        // With in-degree <= 1 everywhere, acyclic iff every node is reached
        // from some root.
        let mut reached = BTreeSet::new();
        let mut stack = roots.clone();
        while let Some(n) = stack.pop() {
            if reached.insert(n) {
                stack.extend(self.children(n).map(|a| a.to));
            }
        }
        if reached.len() != self.nodes.len() {
            return Err(Error::InvalidGraph("graph contains a cycle".into()));
        }
        Ok(roots)
    }

    /// Nodes dominated by `root` (including itself), in pre-order.
    pub fn descendants(&self, root: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![root];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            out.push(n);
            let mut kids: Vec<NodeId> = self.children(n).map(|a| a.to).collect();
            kids.reverse();
            stack.extend(kids);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> UnorderedDependencyGraph {
        let mut g = UnorderedDependencyGraph::new();
        g.add_node(0, Some("a"));
        g.add_node(1, Some("b"));
        g.add_node(2, Some("c"));
        g.add_arc(0, "r", 1);
        g.add_arc(1, "r", 2);
        g
    }

    #[test]
    fn tree_root_of_chain() {
        assert_eq!(chain().tree_root().unwrap(), NodeId(0));
        assert_eq!(chain().descendants(NodeId(1)), alloc::vec![NodeId(1), NodeId(2)]);
    }

    #[test]
    fn rejects_cycles_and_double_heads() {
        let mut g = chain();
        g.add_arc(2, "r", 0);
        assert!(g.forest_roots().is_err());
        let mut g = chain();
        g.add_arc(0, "s", 2);
        assert!(g.forest_roots().is_err());
    }

    #[test]
    fn components_split() {
        let mut g = chain();
        g.add_node(7, Some("z"));
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.forest_roots().unwrap(), alloc::vec![NodeId(0), NodeId(7)]);
    }
}
