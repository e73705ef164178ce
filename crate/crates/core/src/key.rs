//! Canonical ordering used to break cost ties reproducibly. Trees compare by
//! their token yield, then by a bracketed serialization of words and
//! relations, then by a bracketed serialization of automaton start states.

use alloc::string::String;
use alloc::vec::Vec;

use crate::tree::OrderedDependencyTree;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KeyTok {
    Open,
    Close,
    Left,
    Right,
    Sym(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeKey {
    pub tokens: Vec<String>,
    pub relations: Vec<KeyTok>,
    pub states: Vec<KeyTok>,
}

pub fn tree_key(tree: &OrderedDependencyTree) -> TreeKey {
    let mut relations = Vec::new();
    let mut states = Vec::new();
    walk(tree, &mut relations, &mut states);
    TreeKey { tokens: tree.linearize(), relations, states }
}

fn walk(t: &OrderedDependencyTree, rels: &mut Vec<KeyTok>, states: &mut Vec<KeyTok>) {
    rels.push(KeyTok::Open);
    rels.push(KeyTok::Sym(t.word.clone()));
    states.push(KeyTok::Open);
    states.push(KeyTok::Sym(t.automaton.clone()));
    states.push(KeyTok::Sym(t.state.clone()));
    for (side, deps) in [(KeyTok::Left, &t.left), (KeyTok::Right, &t.right)] {
        for d in deps {
            rels.push(side.clone());
            rels.push(KeyTok::Sym(d.rel.clone()));
            walk(&d.tree, rels, states);
        }
    }
    rels.push(KeyTok::Close);
    states.push(KeyTok::Close);
}
