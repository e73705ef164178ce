//! JSON forms of unordered graphs and ordered trees.

use serde::{Deserialize, Serialize};

use headmt_core::{Dependent, GraphArc, GraphNode, NodeId, OrderedDependencyTree, UnorderedDependencyGraph};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcFile {
    pub from: u32,
    pub rel: String,
    pub to: u32,
}

impl From<&GraphArc> for ArcFile {
    fn from(a: &GraphArc) -> Self {
        ArcFile { from: a.from.0, rel: a.rel.clone(), to: a.to.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub nodes: Vec<NodeFile>,
    #[serde(default)]
    pub arcs: Vec<ArcFile>,
}

impl From<GraphFile> for UnorderedDependencyGraph {
    fn from(f: GraphFile) -> Self {
        UnorderedDependencyGraph {
            nodes: f.nodes.into_iter().map(|n| GraphNode { id: NodeId(n.id), word: n.word }).collect(),
            arcs: f.arcs.into_iter().map(|a| GraphArc { from: NodeId(a.from), rel: a.rel, to: NodeId(a.to) }).collect(),
        }
    }
}

impl From<&UnorderedDependencyGraph> for GraphFile {
    fn from(g: &UnorderedDependencyGraph) -> Self {
        GraphFile {
            nodes: g.nodes.iter().map(|n| NodeFile { id: n.id.0, word: n.word.clone() }).collect(),
            arcs: g.arcs.iter().map(ArcFile::from).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependentFile {
    pub rel: String,
    pub tree: TreeFile,
}

/// `left` outermost first, `right` innermost first.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub word: String,
    pub automaton: String,
    pub state: String,
    #[serde(default)]
    pub left: Vec<DependentFile>,
    #[serde(default)]
    pub right: Vec<DependentFile>,
}

impl From<TreeFile> for OrderedDependencyTree {
    fn from(t: TreeFile) -> Self {
        let dep = |d: DependentFile| Dependent { rel: d.rel, tree: d.tree.into() };
        OrderedDependencyTree {
            word: t.word,
            automaton: t.automaton,
            state: t.state,
            left: t.left.into_iter().map(dep).collect(),
            right: t.right.into_iter().map(dep).collect(),
        }
    }
}

impl From<&OrderedDependencyTree> for TreeFile {
    fn from(t: &OrderedDependencyTree) -> Self {
        let dep = |d: &Dependent| DependentFile { rel: d.rel.clone(), tree: (&d.tree).into() };
        TreeFile {
            word: t.word.clone(),
            automaton: t.automaton.clone(),
            state: t.state.clone(),
            left: t.left.iter().map(dep).collect(),
            right: t.right.iter().map(dep).collect(),
        }
    }
}

pub fn parse_graph(text: &str) -> serde_json::Result<UnorderedDependencyGraph> {
    serde_json::from_str::<GraphFile>(text).map(Into::into)
}

pub fn graph_to_string(g: &UnorderedDependencyGraph) -> String {
    serde_json::to_string(&GraphFile::from(g)).expect("graph serializes")
}

pub fn parse_tree(text: &str) -> serde_json::Result<OrderedDependencyTree> {
    serde_json::from_str::<TreeFile>(text).map(Into::into)
}

pub fn tree_to_string(t: &OrderedDependencyTree) -> String {
    serde_json::to_string(&TreeFile::from(t)).expect("tree serializes")
}
