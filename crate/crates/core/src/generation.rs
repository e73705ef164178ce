//! Lowest-cost surface ordering of unordered dependency graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::cost::Cost;
use crate::error::Error;
use crate::graph::{GraphArc, NodeId, UnorderedDependencyGraph};
use crate::key::{tree_key, TreeKey};
use crate::model::{AutId, Lex, Model, RelId, StateId};
use crate::train::choice::TraceStep;
use crate::tree::{Dependent, OrderedDependencyTree};

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingSolution {
    pub tree: OrderedDependencyTree,
    pub cost: Cost,
    /// Arcs introduced to join components; always charged.
    pub added_arcs: Vec<GraphArc>,
    /// Graph node of each output token, in surface order.
    pub positions: Vec<NodeId>,
    /// Whether dependency costs of the input's own arcs were charged.
    pub apply_dependency_costs: bool,
}

impl OrderingSolution {
    pub fn tokens(&self) -> Vec<alloc::string::String> {
        self.tree.linearize()
    }

    fn charges(&self, head: NodeId, dep: NodeId) -> bool {
        self.apply_dependency_costs || self.added_arcs.iter().any(|a| a.from == head && a.to == dep)
    }

    /// Factors of the chosen ordering: the derivation trace with uncharged
    /// dependency factors left out.
    pub fn trace(&self, model: &Model) -> Vec<TraceStep> {
        model
            .derivation_trace_charging(&self.tree, &mut |h, d| self.charges(self.positions[h], self.positions[d]))
            .steps
    }
}

#[derive(Clone)]
struct Ordered {
    cost: Cost,
    tree: OrderedDependencyTree,
    /// Node ids in surface order.
    positions: Vec<NodeId>,
    key: TreeKey,
}

impl Ordered {
    fn better_than(&self, other: &Ordered) -> bool {
        (self.cost, &self.key) < (other.cost, &other.key)
    }
}

fn keep_best(best: &mut Option<Ordered>, cand: Ordered) {
    if best.as_ref().is_none_or(|b| cand.better_than(b)) {
        *best = Some(cand);
    }
}

struct Orderer<'a> {
    model: &'a Model,
    graph: &'a UnorderedDependencyGraph,
    charge: &'a dyn Fn(&GraphArc) -> bool,
}

/// A direction and relation written by one transition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Left(usize),
    Right(usize),
}

impl Orderer<'_> {
    fn lex(&self, n: NodeId) -> Lex {
        self.model.lex(self.graph.word(n).unwrap_or_default())
    }

    /// Best ordering of the subtree under `n` started in (m, q), or None
    /// if no accepting path writes its arc multiset.
    fn order_at(&self, n: NodeId, m: AutId, q: StateId) -> Result<Option<Ordered>, Error> {
        let arcs: Vec<&GraphArc> = self.graph.children(n).collect();
        let mut rels: Vec<RelId> = Vec::new();
        let mut rel_of = Vec::new();
        for a in &arcs {
            let Some(r) = self.model.rel_id(&a.rel) else { return Ok(None) };
            rel_of.push(r);
            if !rels.contains(&r) {
                rels.push(r);
            }
        }
        rels.sort();
        // Per child: best ordering under its own arc, costs fixed regardless
        // of where it lands.
        let mut groups: Vec<Vec<Ordered>> = alloc::vec![Vec::new(); rels.len()];
        let mut children_cost = Cost::ZERO;
        for (a, r) in arcs.iter().zip(&rel_of) {
            let Some(c) = self.dependent(a, *r)? else { return Ok(None) };
            children_cost += c.cost;
            let g = rels.binary_search(r).unwrap();
            groups[g].push(c);
        }
        for g in &mut groups {
            g.sort_by(|a, b| (a.cost, &a.key).cmp(&(b.cost, &b.key)));
        }
        let counts: Vec<usize> = groups.iter().map(Vec::len).collect();
        let mut memo = BTreeMap::new();
        let path_cost = best_path(self.model, m, q, &rels, counts.clone(), &mut memo);
        if path_cost.is_infinite() {
            return Ok(None);
        }
        let mut best: Option<Ordered> = None;
        let mut paths = Vec::new();
        optimal_paths(self.model, m, q, &rels, counts, &mut memo, &mut Vec::new(), &mut paths);
        for path in paths {
            for assign in assignments(&path, &groups) {
                let cand = self.assemble(n, m, q, &path, &assign, &groups, path_cost + children_cost);
                keep_best(&mut best, cand);
            }
        }
        Ok(best)
    }

    fn dependent(&self, a: &GraphArc, r: RelId) -> Result<Option<Ordered>, Error> {
        let head = self.lex(a.from);
        let w = self.lex(a.to);
        let dep = if (self.charge)(a) { self.model.dependency_cost(head, r, w) } else { Cost::ZERO };
        if dep.is_infinite() {
            return Ok(None);
        }
        let mut best: Option<Ordered> = None;
        for (m, q, c) in self.model.lexical_starts(r, w) {
            if let Some(mut o) = self.order_at(a.to, m, q)? {
                o.cost = o.cost + c + dep;
                keep_best(&mut best, o);
            }
        }
        Ok(best)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &self,
        n: NodeId,
        m: AutId,
        q: StateId,
        path: &[Slot],
        assign: &[usize],
        groups: &[Vec<Ordered>],
        cost: Cost,
    ) -> Ordered {
        let aut = self.model.automaton(m);
        let mut tree = OrderedDependencyTree::leaf(self.graph.word(n).unwrap_or_default(), &aut.id, aut.state_name(q));
        let mut lefts = Vec::new();
        let mut rights = Vec::new();
        let mut next = 0;
        for s in path {
            let g = match *s {
                Slot::Left(g) | Slot::Right(g) => g,
            };
            let child = &groups[g][assign[next]];
            next += 1;
            match s {
                Slot::Left(_) => lefts.push(child),
                Slot::Right(_) => rights.push(child),
            }
        }
        // Right transitions emit outermost first; storage is innermost first.
        rights.reverse();
        let rel = |g: &Ordered| {
            let a = self.graph.parent_arc(g.positions[root_index(&g.tree)]).expect("dependent has a parent");
            a.rel.to_string()
        };
        let mut positions = Vec::new();
        for c in &lefts {
            tree.left.push(Dependent { rel: rel(c), tree: c.tree.clone() });
            positions.extend(c.positions.iter().copied());
        }
        positions.push(n);
        for c in &rights {
            tree.right.push(Dependent { rel: rel(c), tree: c.tree.clone() });
            positions.extend(c.positions.iter().copied());
        }
        let key = tree_key(&tree);
        Ordered { cost, tree, positions, key }
    }

    fn order_root(&self, root: NodeId) -> Result<Ordered, Error> {
        let w = self.lex(root);
        let mut best: Option<Ordered> = None;
        for (m, q, c) in self.model.root_starts(w) {
            if let Some(mut o) = self.order_at(root, m, q)? {
                o.cost += c;
                keep_best(&mut best, o);
            }
        }
        best.ok_or_else(|| self.first_unorderable(root))
    }

    /// The deepest node below `n` (preorder first) that has starts
    /// available but no finite ordering under any of them. A dependent with
    /// no start at all for its relation is blamed on its head.
    fn first_unorderable(&self, n: NodeId) -> Error {
        for a in self.graph.children(n) {
            let starts = self.model.rel_id(&a.rel).map(|r| self.model.lexical_starts(r, self.lex(a.to))).unwrap_or_default();
            if starts.is_empty() {
                break;
            }
            if !starts.into_iter().any(|(m, q, _)| matches!(self.order_at(a.to, m, q), Ok(Some(_)))) {
                return self.first_unorderable(a.to);
            }
        }
        Error::Unorderable { node: n, word: self.graph.word(n).unwrap_or_default().to_string() }
    }
}

fn root_index(t: &OrderedDependencyTree) -> usize {
    t.left.iter().map(|d| d.tree.node_count()).sum()
}

type Memo = BTreeMap<(StateId, Vec<usize>), Cost>;

/// Cheapest path from `q` writing exactly `counts[g]` copies of `rels[g]` on
/// either side, then stopping.
fn best_path(model: &Model, m: AutId, q: StateId, rels: &[RelId], counts: Vec<usize>, memo: &mut Memo) -> Cost {
    if let Some(&c) = memo.get(&(q, counts.clone())) {
        return c;
    }
    let aut = model.automaton(m);
    let mut best = if counts.iter().all(|&c| c == 0) { aut.stop_cost(q) } else { Cost::INFINITE };
    for t in aut.left_from(q).chain(aut.right_from(q)) {
        if let Ok(g) = rels.binary_search(&t.rel) {
            if counts[g] > 0 {
                let mut rest = counts.clone();
                rest[g] -= 1;
                let c = t.cost + best_path(model, m, t.to, rels, rest, memo);
                best = best.min(c);
            }
        }
    }
    memo.insert((q, counts), best);
    best
}

#[allow(clippy::too_many_arguments)]
fn optimal_paths(
    model: &Model,
    m: AutId,
    q: StateId,
    rels: &[RelId],
    counts: Vec<usize>,
    memo: &mut Memo,
    prefix: &mut Vec<Slot>,
    out: &mut Vec<Vec<Slot>>,
) {
    let aut = model.automaton(m);
    let target = best_path(model, m, q, rels, counts.clone(), memo);
    if counts.iter().all(|&c| c == 0) && aut.stop_cost(q) == target {
        out.push(prefix.clone());
    }
    let mut seen = BTreeSet::new();
    for (t, side) in aut.left_from(q).map(|t| (t, 0)).chain(aut.right_from(q).map(|t| (t, 1))) {
        let Ok(g) = rels.binary_search(&t.rel) else { continue };
        if counts[g] == 0 {
            continue;
        }
        let mut rest = counts.clone();
        rest[g] -= 1;
        if t.cost + best_path(model, m, t.to, rels, rest.clone(), memo) != target {
            continue;
        }
        let slot = if side == 0 { Slot::Left(g) } else { Slot::Right(g) };
        // Parallel transitions to the same state give the same ordering.
        if !seen.insert((slot, t.to)) {
            continue;
        }
        prefix.push(slot);
        optimal_paths(model, m, t.to, rels, rest, memo, prefix, out);
        prefix.pop();
    }
}

/// Ways to fill the slots of `path` with the members of each relation
/// group, as indices into the group in slot order.
fn assignments(path: &[Slot], groups: &[Vec<Ordered>]) -> Vec<Vec<usize>> {
    let group_of: Vec<usize> = path
        .iter()
        .map(|s| match *s {
            Slot::Left(g) | Slot::Right(g) => g,
        })
        .collect();
    let mut out = Vec::new();
    let mut taken: Vec<Vec<bool>> = groups.iter().map(|g| alloc::vec![false; g.len()]).collect();
    fill(&group_of, 0, &mut taken, &mut Vec::new(), &mut out);
    out
}

fn fill(group_of: &[usize], at: usize, taken: &mut [Vec<bool>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if at == group_of.len() {
        out.push(cur.clone());
        return;
    }
    let g = group_of[at];
    for i in 0..taken[g].len() {
        if !taken[g][i] {
            taken[g][i] = true;
            cur.push(i);
            fill(group_of, at + 1, taken, cur, out);
            cur.pop();
            taken[g][i] = false;
        }
    }
}

fn check_input(graph: &UnorderedDependencyGraph) -> Result<(), Error> {
    if graph.nodes.is_empty() {
        return Err(Error::InvalidGraph("empty graph".into()));
    }
    graph.check_well_formed()?;
    if let Some(n) = graph.nodes.iter().find(|n| n.word.is_none()) {
        return Err(Error::UnlabeledNode(n.id));
    }
    Ok(())
}

fn order_with(
    graph: &UnorderedDependencyGraph,
    model: &Model,
    apply_dependency_costs: bool,
    added: &[GraphArc],
) -> Result<OrderingSolution, Error> {
    let charge = |a: &GraphArc| apply_dependency_costs || added.contains(a);
    let root = graph.tree_root()?;
    let o = Orderer { model, graph, charge: &charge }.order_root(root)?;
    Ok(OrderingSolution {
        tree: o.tree,
        cost: o.cost,
        added_arcs: added.to_vec(),
        positions: o.positions,
        apply_dependency_costs,
    })
}

/// Lowest-cost ordering of a single-rooted tree.
pub fn order_tree(
    graph: &UnorderedDependencyGraph,
    model: &Model,
    apply_dependency_costs: bool,
) -> Result<OrderingSolution, Error> {
    check_input(graph)?;
    order_with(graph, model, apply_dependency_costs, &[])
}

/// A single-rooted tree built from the input plus the arcs added to get it.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub graph: UnorderedDependencyGraph,
    pub added_arcs: Vec<GraphArc>,
}

/// Every way of hanging all but one component root under a node of another
/// component, via a relation with finite dependency cost, that yields a
/// tree.
pub fn connect_components(graph: &UnorderedDependencyGraph, model: &Model) -> Result<Vec<Connection>, Error> {
    check_input(graph)?;
    let roots = graph.forest_roots()?;
    if roots.len() <= 1 {
        return Ok(alloc::vec![Connection { graph: graph.clone(), added_arcs: Vec::new() }]);
    }
    let lex = |n: NodeId| model.lex(graph.word(n).unwrap_or_default());
    // Candidate parent arcs for each component root.
    let options: Vec<Vec<GraphArc>> = roots
        .iter()
        .map(|&r| {
            let mut v = Vec::new();
            for p in graph.node_ids() {
                for rel in model.relations() {
                    let rid = model.rel_id(rel).unwrap();
                    if p != r && model.dependency_cost(lex(p), rid, lex(r)).is_finite() {
                        v.push(GraphArc { from: p, rel: rel.clone(), to: r });
                    }
                }
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    for keep in 0..roots.len() {
        let others: Vec<usize> = (0..roots.len()).filter(|&i| i != keep).collect();
        let mut choice = alloc::vec![0usize; others.len()];
        if others.iter().any(|&i| options[i].is_empty()) {
            continue;
        }
        loop {
            let added: Vec<GraphArc> = others.iter().zip(&choice).map(|(&i, &c)| options[i][c].clone()).collect();
            let mut g = graph.clone();
            g.arcs.extend(added.iter().cloned());
            g.arcs.sort();
            if g.tree_root().is_ok() {
                let mut added = added;
                added.sort();
                out.push(Connection { graph: g, added_arcs: added });
            }
            // Odometer over the option lists.
            let mut k = 0;
            while k < choice.len() {
                choice[k] += 1;
                if choice[k] < options[others[k]].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    if out.is_empty() {
        return Err(Error::DisconnectedOutput);
    }
    Ok(out)
}

/// The target string of the lowest-cost ordered tree covering every node.
pub fn generate(
    graph: &UnorderedDependencyGraph,
    model: &Model,
    apply_dependency_costs: bool,
) -> Result<(Vec<alloc::string::String>, OrderingSolution), Error> {
    let candidates = connect_components(graph, model)?;
    let single = candidates.len() == 1 && candidates[0].added_arcs.is_empty();
    let mut best: Option<(OrderingSolution, TreeKey)> = None;
    let mut first_err = None;
    for c in &candidates {
        match order_with(&c.graph, model, apply_dependency_costs, &c.added_arcs) {
            Ok(s) => {
                let key = tree_key(&s.tree);
                if best.as_ref().is_none_or(|(b, k)| (s.cost, &key) < (b.cost, k)) {
                    best = Some((s, key));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some((s, _)) => Ok((s.tokens(), s)),
        None if single => Err(first_err.unwrap_or(Error::DisconnectedOutput)),
        None => Err(Error::DisconnectedOutput),
    }
}
