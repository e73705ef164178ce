//! Exhaustive enumeration of tilings straight from their definition. Used
//! to certify the search on small inputs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{match_entry_at, target_dep_cost, BilingualLexicon, EntryMatch};
use crate::cost::Cost;
use crate::graph::{NodeId, UnorderedDependencyGraph};
use crate::model::Model;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleTiling {
    /// One match per source node, None for a null entry, sorted by node.
    pub tiling: Vec<(NodeId, Option<EntryMatch>)>,
    pub graph: UnorderedDependencyGraph,
    pub mapping: Vec<(NodeId, NodeId)>,
    pub cost: Cost,
}

/// Every finite-cost tiling of `source` with its derived target graph.
pub fn brute_force_tilings(
    source: &UnorderedDependencyGraph,
    lexicon: &BilingualLexicon,
    target_model: &Model,
) -> Vec<OracleTiling> {
    let nodes: Vec<NodeId> = {
        let mut v: Vec<NodeId> = source.node_ids().collect();
        v.sort();
        v
    };
    let mut options: BTreeMap<NodeId, Vec<Option<EntryMatch>>> = nodes.iter().map(|&n| (n, alloc::vec![None])).collect();
    for i in 0..lexicon.entries.len() {
        for m in match_entry_at(lexicon, i, source) {
            let p = m.primary_image(&lexicon.entries[i]);
            options.get_mut(&p).unwrap().push(Some(m));
        }
    }
    let mut out = Vec::new();
    let mut pick = Vec::new();
    enumerate(&nodes, &options, &mut pick, &mut |tiling| {
        if !is_tiling(source, lexicon, tiling) {
            return;
        }
        if let Some((graph, mapping, cost)) = derive_target(source, lexicon, target_model, tiling) {
            if cost.is_finite() {
                out.push(OracleTiling { tiling: tiling.to_vec(), graph, mapping, cost });
            }
        }
    });
    out
}

fn enumerate(
    nodes: &[NodeId],
    options: &BTreeMap<NodeId, Vec<Option<EntryMatch>>>,
    pick: &mut Vec<(NodeId, Option<EntryMatch>)>,
    visit: &mut dyn FnMut(&[(NodeId, Option<EntryMatch>)]),
) {
    let Some(&n) = nodes.get(pick.len()) else {
        visit(pick);
        return;
    };
    for o in &options[&n] {
        pick.push((n, o.clone()));
        enumerate(nodes, options, pick, visit);
        pick.pop();
    }
}

/// Arc sets partition the arcs and labeled images partition the nodes.
pub fn is_tiling(
    source: &UnorderedDependencyGraph,
    lexicon: &BilingualLexicon,
    tiling: &[(NodeId, Option<EntryMatch>)],
) -> bool {
    let mut nodes = BTreeSet::new();
    let mut arcs = BTreeSet::new();
    let mut primaries = BTreeSet::new();
    for (n, m) in tiling {
        if !primaries.insert(*n) {
            return false;
        }
        let Some(m) = m else { continue };
        let e = &lexicon.entries[m.entry];
        if m.primary_image(e) != *n {
            return false;
        }
        for x in m.labeled_images(e) {
            if !nodes.insert(x) {
                return false;
            }
        }
        for a in &m.arcs {
            if !arcs.insert(a.clone()) {
                return false;
            }
        }
    }
    tiling.len() == source.nodes.len()
        && nodes.len() == source.nodes.len()
        && source.nodes.iter().all(|n| nodes.contains(&n.id))
        && arcs.len() == source.arcs.len()
        && source.arcs.iter().all(|a| arcs.contains(a))
}

/// Target graph of a tiling: the union of the target fragments with nodes
/// identified whenever two fragments map the same source node. None when
/// identified nodes carry different words or a node stays unlabeled.
pub fn derive_target(
    source: &UnorderedDependencyGraph,
    lexicon: &BilingualLexicon,
    target_model: &Model,
    tiling: &[(NodeId, Option<EntryMatch>)],
) -> Option<(UnorderedDependencyGraph, Vec<(NodeId, NodeId)>, Cost)> {
    // Target nodes are (tile index, fragment node).
    let mut all: Vec<(usize, NodeId)> = Vec::new();
    let mut cost = Cost::ZERO;
    for (k, (n, m)) in tiling.iter().enumerate() {
        match m {
            Some(m) => {
                cost += m.cost;
                all.extend(lexicon.entries[m.entry].target.node_ids().map(|t| (k, t)));
            }
            None => cost += lexicon.null_cost(source.word(*n)?),
        }
    }
    let index = |k: usize, t: NodeId| all.iter().position(|&x| x == (k, t)).unwrap();
    let mut class: Vec<usize> = (0..all.len()).collect();
    fn root(class: &mut [usize], mut x: usize) -> usize {
        while class[x] != x {
            x = class[x];
        }
        x
    }
    let mut images: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (k, (_, m)) in tiling.iter().enumerate() {
        let Some(m) = m else { continue };
        let e = &lexicon.entries[m.entry];
        for &(h, s) in &m.g {
            if let Some(t) = e.mapped(h) {
                images.entry(s).or_default().push(index(k, t));
            }
        }
    }
    for ims in images.values() {
        for w in ims.windows(2) {
            let (a, b) = (root(&mut class, w[0]), root(&mut class, w[1]));
            if a != b {
                class[a.max(b)] = a.min(b);
            }
        }
    }
    let word = |i: usize| {
        let (k, t) = all[i];
        let m = tiling[k].1.as_ref().unwrap();
        lexicon.entries[m.entry].target.word(t)
    };
    let mut reps: BTreeMap<usize, Option<&str>> = BTreeMap::new();
    for i in 0..all.len() {
        let r = root(&mut class, i);
        let w = word(i);
        let slot = reps.entry(r).or_insert(None);
        match (*slot, w) {
            (Some(a), Some(b)) if a != b => return None,
            (None, Some(b)) => *slot = Some(b),
            _ => {}
        }
    }
    let dense: BTreeMap<usize, u32> = reps.keys().enumerate().map(|(i, &r)| (r, i as u32)).collect();
    let mut g = UnorderedDependencyGraph::new();
    for (r, w) in &reps {
        g.add_node(dense[r], Some((*w)?));
    }
    for (k, (_, m)) in tiling.iter().enumerate() {
        let Some(m) = m else { continue };
        for a in &lexicon.entries[m.entry].target.arcs {
            let from = dense[&root(&mut class, index(k, a.from))];
            let to = dense[&root(&mut class, index(k, a.to))];
            g.add_arc(from, &a.rel, to);
        }
    }
    for a in &g.arcs {
        cost += target_dep_cost(target_model, g.word(a.from)?, &a.rel, g.word(a.to)?);
    }
    g.arcs.sort();
    let mapping = images.iter().map(|(&s, ims)| (s, NodeId(dense[&root(&mut class, ims[0])]))).collect();
    Some((g, mapping, cost))
}
