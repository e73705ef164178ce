use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use super::{build_runtime_entries, dep_step, BilingualLexicon, EntryMatch, PieceArc, RuntimeEntry, RuntimeSource};
use crate::cost::Cost;
use crate::error::Error;
use crate::graph::{GraphArc, NodeId, UnorderedDependencyGraph};
use crate::model::Model;
use crate::train::choice::TraceStep;

#[derive(Clone, Debug, PartialEq)]
pub enum TransferEvent {
    Apply { node: NodeId, entry: String, cost: Cost },
    /// Two target nodes identified because both images of `source` exist.
    Merge { source: NodeId },
    Complete { from: String, rel: String, to: String, cost: Cost },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferOptions {
    /// Prune at decomposition nodes; off means one search over the tree.
    pub decompose: bool,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { decompose: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferStats {
    pub configurations: usize,
    pub merge_conflicts: usize,
    pub decomposition_nodes: Vec<NodeId>,
}

/// A complete tiling of a subtree, ⟨S′, φ, T′, P′, f′, c′, φ⟩ with target
/// nodes renumbered densely.
#[derive(Clone, Debug, PartialEq)]
pub struct SubtreeSolution {
    pub consumed_nodes: Vec<NodeId>,
    pub consumed_arcs: Vec<GraphArc>,
    pub labels: Vec<Option<String>>,
    pub arcs: Vec<PieceArc>,
    pub pending: Vec<PieceArc>,
    pub map: Vec<(NodeId, usize)>,
    pub cost: Cost,
    pub steps: Vec<TraceStep>,
    pub events: Vec<TransferEvent>,
    pub tiling: Vec<(NodeId, Option<EntryMatch>)>,
}

type Signature = Vec<(NodeId, String, Vec<(NodeId, NodeId)>)>;

impl SubtreeSolution {
    fn signature(&self, lexicon: &BilingualLexicon) -> Signature {
        let mut s: Signature = self
            .tiling
            .iter()
            .map(|(n, m)| match m {
                Some(m) => (*n, lexicon.entries[m.entry].id.clone(), m.g.clone()),
                None => (*n, String::new(), Vec::new()),
            })
            .collect();
        s.sort();
        s
    }

    fn label_of(&self, n: NodeId) -> Option<&str> {
        let t = self.map.iter().find(|(s, _)| *s == n)?.1;
        self.labels[t].as_deref()
    }

    /// Target graph with node ids equal to piece indices. Pending arcs are
    /// included.
    pub fn graph(&self) -> UnorderedDependencyGraph {
        let mut g = UnorderedDependencyGraph::new();
        for (i, l) in self.labels.iter().enumerate() {
            g.add_node(i as u32, l.as_deref());
        }
        for a in self.arcs.iter().chain(&self.pending) {
            g.add_arc(a.from as u32, &a.rel, a.to as u32);
        }
        g.arcs.sort();
        g
    }

    fn into_runtime(self, node: NodeId) -> RuntimeEntry {
        RuntimeEntry {
            node,
            source: RuntimeSource::Subtree,
            consumed_nodes: self.consumed_nodes,
            consumed_arcs: self.consumed_arcs,
            labels: self.labels,
            arcs: self.arcs,
            pending: self.pending,
            map: self.map,
            cost: self.cost,
            steps: self.steps,
            events: self.events,
            tiling: self.tiling,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferOutput {
    pub graph: UnorderedDependencyGraph,
    /// Source node to target node.
    pub mapping: Vec<(NodeId, NodeId)>,
    pub cost: Cost,
    pub steps: Vec<TraceStep>,
    pub events: Vec<TransferEvent>,
    pub tiling: Vec<(NodeId, Option<EntryMatch>)>,
    pub stats: TransferStats,
}

/// Source material a subtree search must consume.
struct Material {
    nodes: BTreeSet<NodeId>,
    arcs: BTreeSet<GraphArc>,
    /// The arc into the subtree root: entries may consume it, but need not.
    optional: Option<GraphArc>,
}

impl Material {
    fn subtree(source: &UnorderedDependencyGraph, root: NodeId) -> Material {
        let nodes: BTreeSet<NodeId> = source.descendants(root).into_iter().collect();
        let arcs = source.arcs.iter().filter(|a| nodes.contains(&a.from) && nodes.contains(&a.to)).cloned().collect();
        Material { nodes, arcs, optional: source.parent_arc(root).cloned() }
    }
}

#[derive(Clone)]
struct Config {
    s_nodes: BTreeSet<NodeId>,
    s_arcs: BTreeSet<GraphArc>,
    labels: Vec<Option<String>>,
    parent: Vec<usize>,
    /// (from, rel, to, complete)
    arcs: Vec<(usize, String, usize, bool)>,
    f: BTreeMap<NodeId, usize>,
    cost: Cost,
    pending_nodes: BTreeSet<NodeId>,
    steps: Vec<TraceStep>,
    events: Vec<TransferEvent>,
    tiling: Vec<(NodeId, Option<EntryMatch>)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

enum Step {
    Extended(Config),
    Conflict,
    Blocked,
}

impl Config {
    fn new(pending_nodes: BTreeSet<NodeId>) -> Config {
        Config {
            s_nodes: BTreeSet::new(),
            s_arcs: BTreeSet::new(),
            labels: Vec::new(),
            parent: Vec::new(),
            arcs: Vec::new(),
            f: BTreeMap::new(),
            cost: Cost::ZERO,
            pending_nodes,
            steps: Vec::new(),
            events: Vec::new(),
            tiling: Vec::new(),
        }
    }

    fn fits(&self, e: &RuntimeEntry, m: &Material) -> bool {
        e.consumed_nodes.iter().all(|n| m.nodes.contains(n) && !self.s_nodes.contains(n))
            && e.consumed_arcs
                .iter()
                .all(|a| (m.arcs.contains(a) || m.optional.as_ref() == Some(a)) && !self.s_arcs.contains(a))
    }

    fn label(&mut self, x: usize) -> Option<String> {
        let r = find(&mut self.parent, x);
        self.labels[r].clone()
    }

    fn extend(&self, e: &RuntimeEntry, m: &Material, model: &Model) -> Step {
        if !self.fits(e, m) {
            return Step::Blocked;
        }
        let mut c = self.clone();
        c.s_nodes.extend(e.consumed_nodes.iter().copied());
        c.s_arcs.extend(e.consumed_arcs.iter().cloned());
        c.pending_nodes.remove(&e.node);
        c.cost += e.cost;
        c.steps.extend(e.steps.iter().cloned());
        c.events.extend(e.events.iter().cloned());
        c.tiling.extend(e.tiling.iter().cloned());
        let base = c.labels.len();
        for (i, l) in e.labels.iter().enumerate() {
            c.labels.push(l.clone());
            c.parent.push(base + i);
        }
        for a in &e.arcs {
            c.arcs.push((base + a.from, a.rel.clone(), base + a.to, true));
        }
        for a in &e.pending {
            c.arcs.push((base + a.from, a.rel.clone(), base + a.to, false));
        }
        for &(s, local) in &e.map {
            let id = base + local;
            match c.f.get(&s).copied() {
                None => {
                    c.f.insert(s, id);
                }
                Some(t) => {
                    let (a, b) = (find(&mut c.parent, t), find(&mut c.parent, id));
                    if a == b {
                        continue;
                    }
                    let label = match (&c.labels[a], &c.labels[b]) {
                        (Some(x), Some(y)) if x != y => return Step::Conflict,
                        (Some(x), _) | (None, Some(x)) => Some(x.clone()),
                        (None, None) => None,
                    };
                    let (root, other) = if a < b { (a, b) } else { (b, a) };
                    c.parent[other] = root;
                    c.labels[root] = label;
                    c.events.push(TransferEvent::Merge { source: s });
                }
            }
        }
        for k in 0..c.arcs.len() {
            if c.arcs[k].3 {
                continue;
            }
            let (from, to) = (c.arcs[k].0, c.arcs[k].2);
            if let (Some(fl), Some(tl)) = (c.label(from), c.label(to)) {
                let step = dep_step(model, &fl, &c.arcs[k].1, &tl);
                if step.cost.is_infinite() {
                    return Step::Blocked;
                }
                c.cost += step.cost;
                c.events.push(TransferEvent::Complete { from: fl, rel: c.arcs[k].1.clone(), to: tl, cost: step.cost });
                c.steps.push(step);
                c.arcs[k].3 = true;
            }
        }
        if c.cost.is_infinite() {
            return Step::Blocked;
        }
        Step::Extended(c)
    }

    fn is_complete(&self, m: &Material) -> bool {
        self.pending_nodes.is_empty() && m.nodes.is_subset(&self.s_nodes) && m.arcs.is_subset(&self.s_arcs)
    }

    fn into_solution(mut self) -> SubtreeSolution {
        let n = self.labels.len();
        let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
        for x in 0..n {
            let r = find(&mut self.parent, x);
            let next = dense.len();
            dense.entry(r).or_insert(next);
        }
        let mut labels = alloc::vec![None; dense.len()];
        for (&r, &d) in &dense {
            labels[d] = self.labels[r].clone();
        }
        let mut arcs = Vec::new();
        let mut pending = Vec::new();
        for (from, rel, to, complete) in &self.arcs {
            let a = PieceArc { from: dense[&find(&mut self.parent, *from)], rel: rel.clone(), to: dense[&find(&mut self.parent, *to)] };
            if *complete {
                arcs.push(a);
            } else {
                pending.push(a);
            }
        }
        arcs.sort();
        pending.sort();
        let map: Vec<(NodeId, usize)> = self.f.iter().map(|(&s, &t)| (s, dense[&find(&mut self.parent, t)])).collect();
        let mut tiling = self.tiling;
        tiling.sort_by_key(|(n, _)| *n);
        SubtreeSolution {
            consumed_nodes: self.s_nodes.into_iter().collect(),
            consumed_arcs: self.s_arcs.into_iter().collect(),
            labels,
            arcs,
            pending,
            map,
            cost: self.cost,
            steps: self.steps,
            events: self.events,
            tiling,
        }
    }
}

struct Queued(Cost, usize, Config);

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        (self.0, self.1) == (o.0, o.1)
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.0, self.1).cmp(&(o.0, o.1))
    }
}

fn search(
    material: &Material,
    entries: &BTreeMap<NodeId, Vec<RuntimeEntry>>,
    model: &Model,
    stats: &mut TransferStats,
) -> Vec<SubtreeSolution> {
    let pending: BTreeSet<NodeId> = entries.keys().copied().filter(|n| material.nodes.contains(n)).collect();
    let mut queue = BinaryHeap::new();
    let mut seq = 0;
    queue.push(Reverse(Queued(Cost::ZERO, seq, Config::new(pending))));
    let mut out = Vec::new();
    while let Some(Reverse(Queued(_, _, c))) = queue.pop() {
        stats.configurations += 1;
        let Some(&i) = c.pending_nodes.iter().next() else {
            if c.is_complete(material) {
                out.push(c.into_solution());
            }
            continue;
        };
        for e in &entries[&i] {
            match c.extend(e, material, model) {
                Step::Extended(next) => {
                    seq += 1;
                    queue.push(Reverse(Queued(next.cost, seq, next)));
                }
                Step::Conflict => stats.merge_conflicts += 1,
                Step::Blocked => {}
            }
        }
    }
    out
}

/// Every complete tiling of the subtree under `root` using `entries` for
/// the nodes it contains.
pub fn subtree_search(
    source: &UnorderedDependencyGraph,
    root: NodeId,
    entries: &BTreeMap<NodeId, Vec<RuntimeEntry>>,
    target_model: &Model,
) -> Vec<SubtreeSolution> {
    search(&Material::subtree(source, root), entries, target_model, &mut TransferStats::default())
}

fn depth(source: &UnorderedDependencyGraph, mut n: NodeId) -> usize {
    let mut d = 0;
    while let Some(a) = source.parent_arc(n) {
        n = a.from;
        d += 1;
    }
    d
}

/// Nodes below which suboptimal subtree translations can be dropped,
/// dominated nodes first.
pub fn decomposition_nodes(
    source: &UnorderedDependencyGraph,
    entries: &BTreeMap<NodeId, Vec<RuntimeEntry>>,
) -> Vec<NodeId> {
    let all: Vec<&RuntimeEntry> = entries.values().flatten().collect();
    let mut out: Vec<NodeId> = source
        .node_ids()
        .filter(|&n| {
            let m = Material::subtree(source, n);
            all.iter().all(|e| {
                // Entries covering n's label must be rooted at n and must
                // not place f(n) under another target node.
                if matches!(e.source, RuntimeSource::Entry(_)) && e.consumed_nodes.contains(&n) {
                    if e.consumed_arcs.iter().any(|a| a.to == n) {
                        return false;
                    }
                    let Some(&(_, t)) = e.map.iter().find(|(s, _)| *s == n) else { return false };
                    if e.arcs.iter().chain(&e.pending).any(|a| a.to == t) {
                        return false;
                    }
                }
                // Each entry's material lies on one side of the cut.
                if m.nodes.contains(&e.node) {
                    e.consumed_nodes.iter().all(|x| m.nodes.contains(x))
                        && e.consumed_arcs.iter().all(|a| m.arcs.contains(a) || m.optional.as_ref() == Some(a))
                } else {
                    e.consumed_nodes.iter().all(|x| !m.nodes.contains(x))
                        && e.consumed_arcs.iter().all(|a| !m.arcs.contains(a))
                }
            })
        })
        .collect();
    out.sort_by_key(|&n| (Reverse(depth(source, n)), n));
    out
}

pub fn transfer(
    source: &UnorderedDependencyGraph,
    lexicon: &BilingualLexicon,
    target_model: &Model,
) -> Result<TransferOutput, Error> {
    transfer_with(source, lexicon, target_model, TransferOptions::default())
}

pub fn transfer_with(
    source: &UnorderedDependencyGraph,
    lexicon: &BilingualLexicon,
    target_model: &Model,
    options: TransferOptions,
) -> Result<TransferOutput, Error> {
    lexicon.check()?;
    let root = source.tree_root()?;
    let mut active = build_runtime_entries(source, lexicon, target_model)?;
    let mut stats = TransferStats::default();
    if options.decompose {
        stats.decomposition_nodes = decomposition_nodes(source, &active);
    }
    for n in stats.decomposition_nodes.clone() {
        if n == root {
            continue;
        }
        let material = Material::subtree(source, n);
        let solutions = search(&material, &active, target_model, &mut stats);
        if solutions.is_empty() {
            return Err(Error::NoTiling);
        }
        // Solutions that leave work for the outside (pending arcs, images of
        // outside nodes) are kept individually.
        let mut best: BTreeMap<(Option<String>, bool), (SubtreeSolution, Signature)> = BTreeMap::new();
        let mut kept = Vec::new();
        for s in solutions {
            let self_contained = s.pending.is_empty() && s.map.iter().all(|(x, _)| material.nodes.contains(x));
            let sig = s.signature(lexicon);
            if !self_contained {
                kept.push(s);
                continue;
            }
            let used_incoming = material.optional.as_ref().is_some_and(|a| s.consumed_arcs.contains(a));
            let key = (s.label_of(n).map(String::from), used_incoming);
            match best.get(&key) {
                Some((b, bs)) if (b.cost, bs) <= (s.cost, &sig) => {}
                _ => {
                    best.insert(key, (s, sig));
                }
            }
        }
        kept.extend(best.into_values().map(|(s, _)| s));
        active.retain(|x, _| !material.nodes.contains(x));
        active.insert(n, kept.into_iter().map(|s| s.into_runtime(n)).collect());
    }

    let material = Material::subtree(source, root);
    let solutions = search(&material, &active, target_model, &mut stats);
    let best = solutions
        .into_iter()
        .filter(|s| s.pending.is_empty() && s.labels.iter().all(Option::is_some) && s.cost.is_finite())
        .map(|s| {
            let sig = s.signature(lexicon);
            (s, sig)
        })
        .min_by(|(a, sa), (b, sb)| (a.cost, sa).cmp(&(b.cost, sb)))
        .map(|(s, _)| s)
        .ok_or(Error::NoTiling)?;
    let graph = best.graph();
    let mapping = best.map.iter().map(|&(s, t)| (s, NodeId(t as u32))).collect();
    Ok(TransferOutput {
        graph,
        mapping,
        cost: best.cost,
        steps: best.steps,
        events: best.events,
        tiling: best.tiling,
        stats,
    })
}
