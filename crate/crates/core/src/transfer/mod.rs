//! Bilingual-lexicon transfer: entry matching against a source tree, tiling
//! search with decomposition-node pruning, and target graph composition.

mod oracle;
mod search;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cost::Cost;
use crate::error::Error;
use crate::graph::{GraphArc, NodeId, UnorderedDependencyGraph};
use crate::model::Model;
use crate::train::choice::{Choice, TraceStep};

pub use oracle::{brute_force_tilings, derive_target, is_tiling, OracleTiling};
pub use search::{
    decomposition_nodes, subtree_search, transfer, transfer_with, SubtreeSolution, TransferEvent, TransferOptions,
    TransferOutput, TransferStats,
};

/// A context-dependent cost row: applies when the primary node's source
/// parent has word `parent` and the arc into the primary node is `rel`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextCost {
    pub parent: String,
    pub rel: String,
    pub cost: Cost,
}

/// ⟨w, H, n, G, f⟩ plus its costs. Fragment nodes may be unlabeled.
#[derive(Clone, Debug, PartialEq)]
pub struct BilingualEntry {
    pub id: String,
    pub word: String,
    pub source: UnorderedDependencyGraph,
    pub primary: NodeId,
    pub target: UnorderedDependencyGraph,
    /// Partial map from source fragment nodes to target fragment nodes.
    pub map: Vec<(NodeId, NodeId)>,
    pub cost: Cost,
    pub context: Vec<ContextCost>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NullEntry {
    pub word: String,
    pub cost: Cost,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BilingualLexicon {
    pub entries: Vec<BilingualEntry>,
    pub nulls: Vec<NullEntry>,
}

impl BilingualEntry {
    pub fn new(id: &str, word: &str, source: UnorderedDependencyGraph, primary: u32, target: UnorderedDependencyGraph) -> Self {
        BilingualEntry {
            id: id.into(),
            word: word.into(),
            source,
            primary: NodeId(primary),
            target,
            map: Vec::new(),
            cost: Cost::ZERO,
            context: Vec::new(),
        }
    }

    pub fn map(mut self, h: u32, g: u32) -> Self {
        self.map.push((NodeId(h), NodeId(g)));
        self
    }

    pub fn cost(mut self, c: f64) -> Self {
        self.cost = Cost::new(c);
        self
    }

    pub fn context(mut self, parent: &str, rel: &str, c: f64) -> Self {
        self.context.push(ContextCost { parent: parent.into(), rel: rel.into(), cost: Cost::new(c) });
        self
    }

    pub fn mapped(&self, h: NodeId) -> Option<NodeId> {
        self.map.iter().find(|(a, _)| *a == h).map(|(_, b)| *b)
    }

    /// Labeled nodes of the source fragment (the set L).
    pub fn labeled(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.source.nodes.iter().filter(|n| n.word.is_some()).map(|n| n.id)
    }

    pub fn check(&self) -> Result<(), Error> {
        let bad = |reason: String| Err(Error::InvalidEntry { id: self.id.clone(), reason });
        if let Err(e) = self.source.check_well_formed() {
            return bad(format!("source fragment: {e}"));
        }
        if let Err(e) = self.target.check_well_formed() {
            return bad(format!("target fragment: {e}"));
        }
        if self.source.word(self.primary) != Some(self.word.as_str()) {
            return bad(format!("primary node {} is not labeled {}", self.primary.0, self.word));
        }
        if !self.source.is_weakly_connected() {
            return bad("source fragment is not connected".into());
        }
        if !self.target.is_weakly_connected() {
            return bad("target fragment is not connected".into());
        }
        for (kind, g) in [("source", &self.source), ("target", &self.target)] {
            let mut pairs = BTreeSet::new();
            for a in &g.arcs {
                if !pairs.insert((a.from, &a.rel, a.to)) {
                    return bad(format!("duplicate {kind} arc {} -{}-> {}", a.from.0, a.rel, a.to.0));
                }
            }
        }
        let mut dom = BTreeSet::new();
        for &(h, g) in &self.map {
            if !self.source.contains(h) || !self.target.contains(g) {
                return bad(format!("map pair ({}, {}) leaves the fragments", h.0, g.0));
            }
            if !dom.insert(h) {
                return bad(format!("source node {} is mapped twice", h.0));
            }
        }
        Ok(())
    }
}

impl BilingualLexicon {
    pub fn check(&self) -> Result<(), Error> {
        let mut ids = BTreeSet::new();
        for e in &self.entries {
            e.check()?;
            if !ids.insert(e.id.as_str()) {
                return Err(Error::InvalidEntry { id: e.id.clone(), reason: "duplicate id".into() });
            }
        }
        Ok(())
    }

    pub fn null_cost(&self, word: &str) -> Cost {
        self.nulls.iter().find(|n| n.word == word).map(|n| n.cost).unwrap_or(Cost::ZERO)
    }

    pub fn entry(&self, id: &str) -> Option<&BilingualEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// One way of applying an entry: the matching function g, the source arcs
/// it consumes, and its context-resolved cost.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EntryMatch {
    /// Index into the lexicon's entries.
    pub entry: usize,
    /// (fragment node, source node), sorted by fragment node.
    pub g: Vec<(NodeId, NodeId)>,
    pub arcs: Vec<GraphArc>,
    pub cost: Cost,
}

impl EntryMatch {
    pub fn image(&self, h: NodeId) -> NodeId {
        self.g.iter().find(|(a, _)| *a == h).map(|(_, b)| *b).expect("g is total")
    }

    /// Source nodes whose labels this match covers, g(L).
    pub fn labeled_images(&self, entry: &BilingualEntry) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = entry.labeled().map(|h| self.image(h)).collect();
        v.sort();
        v
    }

    pub fn primary_image(&self, entry: &BilingualEntry) -> NodeId {
        self.image(entry.primary)
    }
}

/// The context row that applies to a match, if any.
pub fn context_row<'e>(entry: &'e BilingualEntry, g: &[(NodeId, NodeId)], source: &UnorderedDependencyGraph) -> Option<&'e ContextCost> {
    let n = g.iter().find(|(h, _)| *h == entry.primary)?.1;
    let arc = source.parent_arc(n)?;
    let parent = source.word(arc.from)?;
    entry.context.iter().find(|c| c.parent == parent && c.rel == arc.rel)
}

pub fn resolve_context_cost(entry: &BilingualEntry, m: &EntryMatch, source: &UnorderedDependencyGraph) -> Cost {
    context_row(entry, &m.g, source).map(|c| c.cost).unwrap_or(entry.cost)
}

/// All matching functions of `lexicon.entries[index]` against `source`,
/// sorted by g.
pub fn match_entry_at(lexicon: &BilingualLexicon, index: usize, source: &UnorderedDependencyGraph) -> Vec<EntryMatch> {
    let entry = &lexicon.entries[index];
    // Visit fragment nodes outward from the primary so every node after the
    // first is tied to an already placed neighbour.
    let mut order = alloc::vec![entry.primary];
    while order.len() < entry.source.nodes.len() {
        let before = order.len();
        for a in &entry.source.arcs {
            for (x, y) in [(a.from, a.to), (a.to, a.from)] {
                if order.contains(&x) && !order.contains(&y) {
                    order.push(y);
                }
            }
        }
        if order.len() == before {
            // Disconnected fragment: the remaining nodes are unconstrained.
            for n in entry.source.node_ids() {
                if !order.contains(&n) {
                    order.push(n);
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut g: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    extend_match(entry, source, &order, &mut g, &mut out);
    let mut matches: Vec<EntryMatch> = out
        .into_iter()
        .map(|g| {
            let g: Vec<(NodeId, NodeId)> = g.into_iter().collect();
            let img = |h: NodeId| g.iter().find(|(a, _)| *a == h).unwrap().1;
            let mut arcs: Vec<GraphArc> =
                entry.source.arcs.iter().map(|a| GraphArc { from: img(a.from), rel: a.rel.clone(), to: img(a.to) }).collect();
            arcs.sort();
            let cost = context_row(entry, &g, source).map(|c| c.cost).unwrap_or(entry.cost);
            EntryMatch { entry: index, g, arcs, cost }
        })
        .collect();
    matches.sort();
    matches
}

pub fn match_entry(lexicon: &BilingualLexicon, id: &str, source: &UnorderedDependencyGraph) -> Vec<EntryMatch> {
    match lexicon.entries.iter().position(|e| e.id == id) {
        Some(i) => match_entry_at(lexicon, i, source),
        None => Vec::new(),
    }
}

fn extend_match(
    entry: &BilingualEntry,
    source: &UnorderedDependencyGraph,
    order: &[NodeId],
    g: &mut BTreeMap<NodeId, NodeId>,
    out: &mut Vec<BTreeMap<NodeId, NodeId>>,
) {
    let Some(&h) = order.get(g.len()) else {
        out.push(g.clone());
        return;
    };
    let used: BTreeSet<NodeId> = g.values().copied().collect();
    for s in source.node_ids() {
        if used.contains(&s) {
            continue;
        }
        if let Some(w) = entry.source.word(h) {
            if source.word(s) != Some(w) {
                continue;
            }
        }
        g.insert(h, s);
        let arcs_ok = entry.source.arcs.iter().all(|a| match (g.get(&a.from), g.get(&a.to)) {
            (Some(&x), Some(&y)) => source.arcs.iter().any(|b| b.from == x && b.to == y && b.rel == a.rel),
            _ => true,
        });
        if arcs_ok {
            extend_match(entry, source, order, g, out);
        }
        g.remove(&h);
    }
}

/// An arc of a target piece, between local node indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PieceArc {
    pub from: usize,
    pub rel: String,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RuntimeSource {
    Entry(EntryMatch),
    Null,
    /// A pruned subtree solution standing in for the entries below a
    /// decomposition node.
    Subtree,
}

/// A runtime entry ⟨H, φ, G, P, f, c, {i}⟩: the source material it consumes,
/// a target piece, and a map from source nodes into that piece.
#[derive(Clone, Debug, PartialEq)]
pub struct RuntimeEntry {
    pub node: NodeId,
    pub source: RuntimeSource,
    pub consumed_nodes: Vec<NodeId>,
    pub consumed_arcs: Vec<GraphArc>,
    pub labels: Vec<Option<String>>,
    /// Complete arcs (both ends labeled), already charged in `cost`.
    pub arcs: Vec<PieceArc>,
    /// Incomplete arcs.
    pub pending: Vec<PieceArc>,
    pub map: Vec<(NodeId, usize)>,
    pub cost: Cost,
    pub steps: Vec<TraceStep>,
    pub events: Vec<TransferEvent>,
    /// (source node, match) per node covered; None for null entries.
    pub tiling: Vec<(NodeId, Option<EntryMatch>)>,
}

impl RuntimeEntry {
    pub fn label(&self, lexicon: &BilingualLexicon) -> String {
        match &self.source {
            RuntimeSource::Entry(m) => lexicon.entries[m.entry].id.clone(),
            RuntimeSource::Null => "null".into(),
            RuntimeSource::Subtree => "subtree".into(),
        }
    }
}

pub(crate) fn target_dep_cost(model: &Model, from: &str, rel: &str, to: &str) -> Cost {
    match model.rel_id(rel) {
        Some(r) => model.dependency_cost(model.lex(from), r, model.lex(to)),
        None => Cost::INFINITE,
    }
}

pub(crate) fn dep_step(model: &Model, from: &str, rel: &str, to: &str) -> TraceStep {
    let c = target_dep_cost(model, from, rel, to);
    let choice = if model.lex(to).is_none() && model.lex(from).is_some() { Choice::unknown() } else { Choice::dep(from, rel, to) };
    TraceStep::new(choice, c)
}

fn runtime_from_match(
    m: EntryMatch,
    lexicon: &BilingualLexicon,
    source: &UnorderedDependencyGraph,
    target_model: &Model,
) -> RuntimeEntry {
    let entry = &lexicon.entries[m.entry];
    let locals: Vec<NodeId> = entry.target.node_ids().collect();
    let local = |g: NodeId| locals.iter().position(|&x| x == g).unwrap();
    let labels: Vec<Option<String>> = entry.target.nodes.iter().map(|n| n.word.clone()).collect();
    let row = context_row(entry, &m.g, source);
    let primary = m.primary_image(entry);
    let parent = row.map(|r| (r.parent.as_str(), r.rel.as_str()));
    let mut steps = alloc::vec![TraceStep::new(Choice::xfer(&entry.id, &entry.word, parent), m.cost)];
    let mut cost = m.cost;
    let mut arcs = Vec::new();
    let mut pending = Vec::new();
    for a in &entry.target.arcs {
        let pa = PieceArc { from: local(a.from), rel: a.rel.clone(), to: local(a.to) };
        match (&labels[pa.from], &labels[pa.to]) {
            (Some(f), Some(t)) => {
                let s = dep_step(target_model, f, &a.rel, t);
                cost += s.cost;
                steps.push(s);
                arcs.push(pa);
            }
            _ => pending.push(pa),
        }
    }
    let mut map: Vec<(NodeId, usize)> = entry.map.iter().map(|&(h, g)| (m.image(h), local(g))).collect();
    map.sort();
    let mut consumed_nodes = m.labeled_images(entry);
    consumed_nodes.sort();
    RuntimeEntry {
        node: primary,
        consumed_nodes,
        consumed_arcs: m.arcs.clone(),
        labels,
        arcs,
        pending,
        map,
        cost,
        steps,
        events: alloc::vec![TransferEvent::Apply { node: primary, entry: entry.id.clone(), cost }],
        tiling: alloc::vec![(primary, Some(m.clone()))],
        source: RuntimeSource::Entry(m),
    }
}

fn null_runtime(node: NodeId, word: &str, lexicon: &BilingualLexicon) -> RuntimeEntry {
    let cost = lexicon.null_cost(word);
    RuntimeEntry {
        node,
        source: RuntimeSource::Null,
        consumed_nodes: Vec::new(),
        consumed_arcs: Vec::new(),
        labels: Vec::new(),
        arcs: Vec::new(),
        pending: Vec::new(),
        map: Vec::new(),
        cost,
        steps: alloc::vec![TraceStep::new(Choice::null(word), cost)],
        events: alloc::vec![TransferEvent::Apply { node, entry: "null".into(), cost }],
        tiling: alloc::vec![(node, None)],
    }
}

/// Every source node's runtime entries: one per finite-cost match with its
/// primary node there, plus a null entry when another node's match covers
/// its label.
pub fn build_runtime_entries(
    source: &UnorderedDependencyGraph,
    lexicon: &BilingualLexicon,
    target_model: &Model,
) -> Result<BTreeMap<NodeId, Vec<RuntimeEntry>>, Error> {
    source.check_well_formed()?;
    if let Some(n) = source.nodes.iter().find(|n| n.word.is_none()) {
        return Err(Error::UnlabeledNode(n.id));
    }
    let mut out: BTreeMap<NodeId, Vec<RuntimeEntry>> = source.node_ids().map(|n| (n, Vec::new())).collect();
    let mut covered_by_other: BTreeSet<NodeId> = BTreeSet::new();
    for i in 0..lexicon.entries.len() {
        for m in match_entry_at(lexicon, i, source) {
            if m.cost.is_infinite() {
                continue;
            }
            let entry = &lexicon.entries[i];
            let primary = m.primary_image(entry);
            covered_by_other.extend(m.labeled_images(entry).into_iter().filter(|&n| n != primary));
            out.get_mut(&primary).unwrap().push(runtime_from_match(m, lexicon, source, target_model));
        }
    }
    let mut ids: Vec<NodeId> = source.node_ids().collect();
    ids.sort();
    for n in ids {
        let list = out.get_mut(&n).unwrap();
        list.retain(|e| e.cost.is_finite());
        if covered_by_other.contains(&n) {
            list.push(null_runtime(n, source.word(n).unwrap(), lexicon));
        }
        if list.is_empty() {
            return Err(Error::UntranslatableWord { node: n, word: source.word(n).unwrap().to_string() });
        }
    }
    Ok(out)
}
