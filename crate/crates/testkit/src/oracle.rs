//! Brute-force reference implementations. They read the model definition
//! directly and share no code with the core search routines.

use std::collections::{BTreeMap, HashMap};

use headmt_core::model::{AutomatonDef, ModelDef};
use headmt_core::{Cost, NodeId, OrderedDependencyTree, UnorderedDependencyGraph};

pub fn automaton<'a>(def: &'a ModelDef, id: &str) -> Option<&'a AutomatonDef> {
    def.automata.iter().find(|a| a.id == id)
}

fn dep_cost(def: &ModelDef, h: &str, r: &str, d: &str) -> f64 {
    def.dependency.iter().filter(|x| x.head == h && x.rel == r && x.dep == d).map(|x| x.cost.value()).fold(f64::INFINITY, f64::min)
}

fn lex_cost(def: &ModelDef, r: &str, w: &str, m: &str, q: &str) -> f64 {
    def.lexical_start
        .iter()
        .filter(|x| x.rel == r && x.word == w && x.automaton == m && x.state == q)
        .map(|x| x.cost.value())
        .fold(f64::INFINITY, f64::min)
}

fn root_cost(def: &ModelDef, w: &str, m: &str, q: &str) -> f64 {
    def.root_start
        .iter()
        .filter(|x| x.word == w && x.automaton == m && x.state == q)
        .map(|x| x.cost.value())
        .fold(f64::INFINITY, f64::min)
}

/// Every accepting path of `a` from `q` writing `left` and `right` (both
/// outermost first), as its list of action costs.
pub fn accepting_paths(a: &AutomatonDef, q: &str, left: &[&str], right: &[&str]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(a, q, left, right, &mut path, &mut out);
    out
}

fn walk(a: &AutomatonDef, q: &str, left: &[&str], right: &[&str], path: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
    if left.is_empty() && right.is_empty() {
        for s in a.stop.iter().filter(|s| s.state == q && s.cost.is_finite()) {
            path.push(s.cost.value());
            out.push(path.clone());
            path.pop();
        }
    }
    if let Some((&r, rest)) = left.split_first() {
        for t in a.left.iter().filter(|t| t.from == q && t.rel == r && t.cost.is_finite()) {
            path.push(t.cost.value());
            walk(a, &t.to, rest, right, path, out);
            path.pop();
        }
    }
    if let Some((&r, rest)) = right.split_first() {
        for t in a.right.iter().filter(|t| t.from == q && t.rel == r && t.cost.is_finite()) {
            path.push(t.cost.value());
            walk(a, &t.to, left, rest, path, out);
            path.pop();
        }
    }
}

fn automaton_cost(def: &ModelDef, t: &OrderedDependencyTree) -> (f64, f64) {
    let Some(a) = automaton(def, &t.automaton) else { return (f64::INFINITY, 0.0) };
    let left: Vec<&str> = t.left.iter().map(|d| d.rel.as_str()).collect();
    let right: Vec<&str> = t.right.iter().rev().map(|d| d.rel.as_str()).collect();
    let paths = accepting_paths(a, &t.state, &left, &right);
    let min = paths.iter().map(|p| p.iter().sum::<f64>()).fold(f64::INFINITY, f64::min);
    let prob = paths.iter().map(|p| (-p.iter().sum::<f64>()).exp()).sum();
    (min, prob)
}

fn node_cost(def: &ModelDef, t: &OrderedDependencyTree, charge: bool) -> f64 {
    let mut c = automaton_cost(def, t).0;
    for d in t.left.iter().chain(&t.right) {
        if charge {
            c += dep_cost(def, &t.word, &d.rel, &d.tree.word);
        }
        c += lex_cost(def, &d.rel, &d.tree.word, &d.tree.automaton, &d.tree.state);
        c += node_cost(def, &d.tree, charge);
    }
    c
}

/// The derivation cost written out from its definition, minimizing over
/// automaton paths. Known words only.
pub fn derivation_cost(def: &ModelDef, t: &OrderedDependencyTree) -> f64 {
    tree_cost(def, t, true)
}

/// As [`derivation_cost`], optionally without dependency factors.
pub fn tree_cost(def: &ModelDef, t: &OrderedDependencyTree, charge_dependencies: bool) -> f64 {
    root_cost(def, &t.word, &t.automaton, &t.state) + node_cost(def, t, charge_dependencies)
}

/// Probability of an ordered tree, summing over automaton paths.
pub fn derivation_probability(def: &ModelDef, t: &OrderedDependencyTree) -> f64 {
    (-root_cost(def, &t.word, &t.automaton, &t.state)).exp() * node_probability(def, t)
}

fn node_probability(def: &ModelDef, t: &OrderedDependencyTree) -> f64 {
    let mut p = automaton_cost(def, t).1;
    for d in t.left.iter().chain(&t.right) {
        p *= (-dep_cost(def, &t.word, &d.rel, &d.tree.word)).exp()
            * (-lex_cost(def, &d.rel, &d.tree.word, &d.tree.automaton, &d.tree.state)).exp()
            * node_probability(def, &d.tree);
    }
    p
}

fn starts(def: &ModelDef, word: &str, rel: Option<&str>) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = match rel {
        None => def.root_start.iter().filter(|x| x.word == word && x.cost.is_finite()).map(|x| (x.automaton.clone(), x.state.clone())).collect(),
        Some(r) => def
            .lexical_start
            .iter()
            .filter(|x| x.word == word && x.rel == r && x.cost.is_finite())
            .map(|x| (x.automaton.clone(), x.state.clone()))
            .collect(),
    };
    v.sort();
    v.dedup();
    v
}

/// Every finite-cost derivation of `tokens`, each with its cost. Trees are
/// built over all projective head assignments, relation labels and start
/// states.
pub fn enumerate_derivations(def: &ModelDef, tokens: &[&str]) -> Vec<(OrderedDependencyTree, f64)> {
    let mut memo = HashMap::new();
    let mut out = Vec::new();
    for h in 0..tokens.len() {
        for t in subtrees(def, tokens, 0, tokens.len(), h, None, &mut memo) {
            let c = derivation_cost(def, &t);
            if c.is_finite() {
                out.push((t, c));
            }
        }
    }
    out
}

type Memo = HashMap<(usize, usize, usize, Option<String>), Vec<OrderedDependencyTree>>;

/// Trees over tokens[i..j) headed at h whose automaton accepts their own
/// dependents; the caller checks the attachment.
fn subtrees(
    def: &ModelDef,
    tokens: &[&str],
    i: usize,
    j: usize,
    h: usize,
    rel: Option<&str>,
    memo: &mut Memo,
) -> Vec<OrderedDependencyTree> {
    let key = (i, j, h, rel.map(String::from));
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let word = tokens[h];
    let lefts = sides(def, tokens, i, h, word, memo);
    let rights = sides(def, tokens, h + 1, j, word, memo);
    let mut out = Vec::new();
    for (m, q) in starts(def, word, rel) {
        for l in &lefts {
            for r in &rights {
                let t = OrderedDependencyTree {
                    word: word.into(),
                    automaton: m.clone(),
                    state: q.clone(),
                    left: l.clone(),
                    right: r.clone(),
                };
                if automaton_cost(def, &t).0.is_finite() {
                    out.push(t);
                }
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

/// All sequences of dependents of `head` exactly covering tokens[i..j).
fn sides(def: &ModelDef, tokens: &[&str], i: usize, j: usize, head: &str, memo: &mut Memo) -> Vec<Vec<headmt_core::Dependent>> {
    if i == j {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in i + 1..=j {
        for h in i..k {
            for r in &def.relations {
                if dep_cost(def, head, r, tokens[h]).is_infinite() {
                    continue;
                }
                let firsts = subtrees(def, tokens, i, k, h, Some(r), memo);
                if firsts.is_empty() {
                    continue;
                }
                let rests = sides(def, tokens, k, j, head, memo);
                for f in &firsts {
                    for rest in &rests {
                        let mut v = vec![headmt_core::Dependent { rel: r.clone(), tree: f.clone() }];
                        v.extend(rest.iter().cloned());
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// Every ordered tree realizing an unordered tree: all left/right
/// arrangements of each node's dependents and all start states.
pub fn enumerate_orderings(def: &ModelDef, graph: &UnorderedDependencyGraph) -> Vec<OrderedDependencyTree> {
    let mut children: BTreeMap<NodeId, Vec<(String, NodeId)>> = BTreeMap::new();
    let mut has_parent = std::collections::BTreeSet::new();
    for a in &graph.arcs {
        children.entry(a.from).or_default().push((a.rel.clone(), a.to));
        has_parent.insert(a.to);
    }
    let Some(root) = graph.nodes.iter().map(|n| n.id).find(|n| !has_parent.contains(n)) else { return Vec::new() };
    orderings_at(def, graph, &children, root, None)
}

fn orderings_at(
    def: &ModelDef,
    graph: &UnorderedDependencyGraph,
    children: &BTreeMap<NodeId, Vec<(String, NodeId)>>,
    n: NodeId,
    rel: Option<&str>,
) -> Vec<OrderedDependencyTree> {
    let word = graph.word(n).unwrap_or_default().to_string();
    let kids = children.get(&n).cloned().unwrap_or_default();
    let sub: Vec<Vec<OrderedDependencyTree>> = kids.iter().map(|(r, c)| orderings_at(def, graph, children, *c, Some(r))).collect();
    // All choices of one realization per child.
    let mut picks: Vec<Vec<headmt_core::Dependent>> = vec![Vec::new()];
    for ((r, _), opts) in kids.iter().zip(&sub) {
        let mut next = Vec::new();
        for p in &picks {
            for o in opts {
                let mut p = p.clone();
                p.push(headmt_core::Dependent { rel: r.clone(), tree: o.clone() });
                next.push(p);
            }
        }
        picks = next;
    }
    let mut out = Vec::new();
    for (m, q) in starts(def, &word, rel) {
        for p in &picks {
            for perm in permutations(p.len()) {
                for split in 0..=p.len() {
                    let left: Vec<_> = perm[..split].iter().map(|&k| p[k].clone()).collect();
                    let right: Vec<_> = perm[split..].iter().map(|&k| p[k].clone()).collect();
                    out.push(OrderedDependencyTree { word: word.clone(), automaton: m.clone(), state: q.clone(), left, right });
                }
            }
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Lowest cost over [`enumerate_orderings`].
pub fn best_ordering_cost(def: &ModelDef, graph: &UnorderedDependencyGraph, charge_dependencies: bool) -> f64 {
    enumerate_orderings(def, graph).iter().map(|t| tree_cost(def, t, charge_dependencies)).fold(f64::INFINITY, f64::min)
}

/// Label- and relation-preserving isomorphism of two graphs, ignoring node
/// ids.
pub fn isomorphic(a: &UnorderedDependencyGraph, b: &UnorderedDependencyGraph) -> bool {
    if a.nodes.len() != b.nodes.len() || a.arcs.len() != b.arcs.len() {
        return false;
    }
    let an: Vec<NodeId> = a.nodes.iter().map(|n| n.id).collect();
    let bn: Vec<NodeId> = b.nodes.iter().map(|n| n.id).collect();
    let mut phi: Vec<Option<usize>> = vec![None; an.len()];
    let mut used = vec![false; bn.len()];
    extend(a, b, &an, &bn, 0, &mut phi, &mut used)
}

fn extend(
    a: &UnorderedDependencyGraph,
    b: &UnorderedDependencyGraph,
    an: &[NodeId],
    bn: &[NodeId],
    k: usize,
    phi: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if k == an.len() {
        let map = |x: NodeId| bn[phi[an.iter().position(|&y| y == x).unwrap()].unwrap()];
        let mut mapped: Vec<(NodeId, &str, NodeId)> = a.arcs.iter().map(|x| (map(x.from), x.rel.as_str(), map(x.to))).collect();
        let mut target: Vec<(NodeId, &str, NodeId)> = b.arcs.iter().map(|x| (x.from, x.rel.as_str(), x.to)).collect();
        mapped.sort();
        target.sort();
        return mapped == target;
    }
    for c in 0..bn.len() {
        if used[c] || a.word(an[k]) != b.word(bn[c]) {
            continue;
        }
        phi[k] = Some(c);
        used[c] = true;
        if extend(a, b, an, bn, k + 1, phi, used) {
            return true;
        }
        phi[k] = None;
        used[c] = false;
    }
    false
}

/// Lowest (cost, key) derivation of a derivation list.
pub fn best_derivation(ds: &[(OrderedDependencyTree, f64)]) -> Option<&(OrderedDependencyTree, f64)> {
    ds.iter().min_by(|x, y| {
        (Cost::new(x.1), headmt_core::key::tree_key(&x.0)).cmp(&(Cost::new(y.1), headmt_core::key::tree_key(&y.0)))
    })
}
