//! Bottom-up head-outward chart analysis. Automata run backwards: an edge in
//! state `q` has already accounted for every action from `q` to a stop, and
//! combining it with a neighbour follows a transition into `q`.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::Cost;
use crate::error::Error;
use crate::key::{tree_key, TreeKey};
use crate::model::{AutId, Lex, Model, RelId, StateId};
use crate::tree::{Dependent, OrderedDependencyTree};

#[derive(Debug)]
struct Node {
    pos: usize,
    automaton: AutId,
    state: StateId,
    /// Outermost first.
    left: Vec<(RelId, Rc<Node>)>,
    /// Innermost first.
    right: Vec<(RelId, Rc<Node>)>,
}

/// A partial or complete phrase ⟨w, t, i, j, m, q, c⟩ over `tokens[i..j]`.
#[derive(Clone, Debug)]
pub struct ChartEdge {
    /// Position of the head word.
    pub head: usize,
    pub i: usize,
    pub j: usize,
    pub automaton: AutId,
    pub state: StateId,
    pub cost: Cost,
    node: Rc<Node>,
    key: Rc<TreeKey>,
}

/// Edges sharing a signature compete for the same beam.
pub type Signature = (usize, AutId, StateId);

impl ChartEdge {
    pub fn signature(&self) -> Signature {
        (self.head, self.automaton, self.state)
    }

    pub fn key(&self) -> &TreeKey {
        &self.key
    }

    /// The edge's tree; `state` of the root is the edge state.
    pub fn tree(&self, chart: &Chart<'_>) -> OrderedDependencyTree {
        chart.build_tree(&self.node)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChartStats {
    /// Combinations whose three parameters were all finite.
    pub combinations: usize,
    /// Edges that survived pruning.
    pub edges: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub nbest: usize,
    /// When false every distinct tree is kept for every signature.
    pub prune: bool,
}

impl AnalysisOptions {
    pub fn nbest(nbest: usize) -> Self {
        AnalysisOptions { nbest, prune: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub tree: OrderedDependencyTree,
    pub cost: Cost,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub derivations: Vec<Derivation>,
    pub stats: ChartStats,
}

/// Per-span, per-signature storage indexed `[i][j - i - 1]`.
type Spans<T> = Vec<Vec<BTreeMap<Signature, T>>>;

pub struct Chart<'m> {
    model: &'m Model,
    words: Vec<String>,
    lex: Vec<Lex>,
    options: AnalysisOptions,
    /// spans[i][j - i - 1] maps each signature to its beam, sorted by
    /// (cost, key) when pruning.
    spans: Spans<Vec<ChartEdge>>,
    /// Without pruning beams are unsorted and this finds an edge's slot by
    /// tree.
    index: Spans<BTreeMap<Rc<TreeKey>, usize>>,
    pub stats: ChartStats,
}

impl<'m> Chart<'m> {
    pub fn new<S: AsRef<str>>(model: &'m Model, tokens: &[S], options: AnalysisOptions) -> Result<Self, Error> {
        if tokens.is_empty() {
            return Err(Error::EmptySentence);
        }
        let words: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        let lex = words.iter().map(|w| model.lex(w)).collect();
        let n = words.len();
        let spans = (0..n).map(|i| vec![BTreeMap::new(); n - i]).collect();
        let index = (0..n).map(|i| vec![BTreeMap::new(); n - i]).collect();
        let options = AnalysisOptions { nbest: options.nbest.max(1), ..options };
        Ok(Chart { model, words, lex, options, spans, index, stats: ChartStats::default() })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn build_tree(&self, n: &Node) -> OrderedDependencyTree {
        let aut = self.model.automaton(n.automaton);
        let dep = |(r, c): &(RelId, Rc<Node>)| Dependent { rel: self.model.rel_name(*r).to_string(), tree: self.build_tree(c) };
        OrderedDependencyTree {
            word: self.words[n.pos].clone(),
            automaton: aut.id.clone(),
            state: aut.state_name(n.state).to_string(),
            left: n.left.iter().map(dep).collect(),
            right: n.right.iter().map(dep).collect(),
        }
    }

    fn make_edge(&self, i: usize, j: usize, node: Node, cost: Cost) -> ChartEdge {
        let key = Rc::new(tree_key(&self.build_tree(&node)));
        ChartEdge { head: node.pos, i, j, automaton: node.automaton, state: node.state, cost, node: Rc::new(node), key }
    }

    /// One edge per lexicon entry and final state of the word at `pos`.
    pub fn initial_edges(&self, pos: usize) -> Vec<ChartEdge> {
        let mut out = Vec::new();
        for &m in self.model.entries(self.lex[pos]) {
            let aut = self.model.automaton(m);
            for s in 0..aut.states().len() {
                let q = StateId(s as u32);
                let c = aut.stop_cost(q);
                if c.is_finite() {
                    let node = Node { pos, automaton: m, state: q, left: Vec::new(), right: Vec::new() };
                    out.push(self.make_edge(pos, pos + 1, node, c));
                }
            }
        }
        out
    }

    /// `left_phrase` (over i..k) becomes the outermost left dependent of the
    /// head of `right_phrase` (over k..j), once per left transition entering
    /// the head's state with finite lexical and dependency costs.
    pub fn combine_left(&mut self, right_phrase: &ChartEdge, left_phrase: &ChartEdge) -> Vec<ChartEdge> {
        debug_assert_eq!(left_phrase.j, right_phrase.i);
        let model = self.model;
        let (head, dep) = (right_phrase, left_phrase);
        let mut out = Vec::new();
        for t in model.automaton(head.automaton).left_into(head.state) {
            let c4 = model.lexical_cost(t.rel, self.lex[dep.head], dep.automaton, dep.state);
            let c5 = model.dependency_cost(self.lex[head.head], t.rel, self.lex[dep.head]);
            let cost = dep.cost + head.cost + t.cost + c4 + c5;
            if cost.is_infinite() {
                continue;
            }
            self.stats.combinations += 1;
            let mut left = Vec::with_capacity(head.node.left.len() + 1);
            left.push((t.rel, dep.node.clone()));
            left.extend(head.node.left.iter().cloned());
            let node = Node { pos: head.head, automaton: head.automaton, state: t.from, left, right: head.node.right.clone() };
            out.push(self.make_edge(dep.i, head.j, node, cost));
        }
        out
    }

    /// Mirror image of [`combine_left`](Self::combine_left): `right_phrase`
    /// becomes the outermost right dependent of the head of `left_phrase`.
    pub fn combine_right(&mut self, left_phrase: &ChartEdge, right_phrase: &ChartEdge) -> Vec<ChartEdge> {
        debug_assert_eq!(left_phrase.j, right_phrase.i);
        let model = self.model;
        let (head, dep) = (left_phrase, right_phrase);
        let mut out = Vec::new();
        for t in model.automaton(head.automaton).right_into(head.state) {
            let c4 = model.lexical_cost(t.rel, self.lex[dep.head], dep.automaton, dep.state);
            let c5 = model.dependency_cost(self.lex[head.head], t.rel, self.lex[dep.head]);
            let cost = dep.cost + head.cost + t.cost + c4 + c5;
            if cost.is_infinite() {
                continue;
            }
            self.stats.combinations += 1;
            let mut right = head.node.right.clone();
            right.push((t.rel, dep.node.clone()));
            let node = Node { pos: head.head, automaton: head.automaton, state: t.from, left: head.node.left.clone(), right };
            out.push(self.make_edge(head.i, dep.j, node, cost));
        }
        out
    }

    /// Offers `candidate` to its signature's beam. Returns whether it was
    /// kept; edges pushed out of the beam are evicted.
    pub fn prune(&mut self, candidate: ChartEdge) -> bool {
        let (i, j) = (candidate.i, candidate.j);
        if !self.options.prune {
            return self.keep(candidate);
        }
        let cap = self.options.nbest;
        let beam = self.spans[i][j - i - 1].entry(candidate.signature()).or_default();
        if let Some(pos) = beam.iter().position(|e| e.key == candidate.key) {
            // Same tree reached by a different automaton path.
            if beam[pos].cost <= candidate.cost {
                return false;
            }
            beam.remove(pos);
        }
        let at = beam.partition_point(|e| (e.cost, &*e.key) <= (candidate.cost, &*candidate.key));
        if at >= cap {
            return false;
        }
        beam.insert(at, candidate);
        beam.truncate(cap);
        true
    }

    /// Keeps the cheapest edge per tree, with no cap.
    fn keep(&mut self, candidate: ChartEdge) -> bool {
        let (i, j) = (candidate.i, candidate.j);
        let sig = candidate.signature();
        let beam = self.spans[i][j - i - 1].entry(sig).or_default();
        let slots = self.index[i][j - i - 1].entry(sig).or_default();
        match slots.get(&candidate.key) {
            Some(&at) if beam[at].cost <= candidate.cost => false,
            Some(&at) => {
                beam[at] = candidate;
                true
            }
            None => {
                slots.insert(candidate.key.clone(), beam.len());
                beam.push(candidate);
                true
            }
        }
    }

    pub fn edges(&self, i: usize, j: usize) -> impl Iterator<Item = &ChartEdge> + '_ {
        self.spans[i][j - i - 1].values().flatten()
    }

    /// Fills every span in order of increasing width.
    pub fn fill(&mut self) {
        let n = self.len();
        for pos in 0..n {
            for e in self.initial_edges(pos) {
                self.prune(e);
            }
        }
        for width in 2..=n {
            for i in 0..=n - width {
                let j = i + width;
                for k in i + 1..j {
                    let lefts: Vec<ChartEdge> = self.edges(i, k).cloned().collect();
                    let rights: Vec<ChartEdge> = self.edges(k, j).cloned().collect();
                    for l in &lefts {
                        for r in &rights {
                            for e in self.combine_left(r, l) {
                                self.prune(e);
                            }
                            for e in self.combine_right(l, r) {
                                self.prune(e);
                            }
                        }
                    }
                }
            }
        }
        self.stats.edges = self.spans.iter().flatten().flat_map(|m| m.values()).map(Vec::len).sum();
    }

    /// Complete derivations: full-span edges plus their root costs, sorted
    /// by (cost, key) and cut to `nbest`.
    pub fn complete(&self) -> Vec<Derivation> {
        let n = self.len();
        let mut done: Vec<(Cost, &TreeKey, &ChartEdge)> = self
            .edges(0, n)
            .filter_map(|e| {
                let c = e.cost + self.model.root_cost(self.lex[e.head], e.automaton, e.state);
                c.is_finite().then_some((c, &*e.key, e))
            })
            .collect();
        done.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        done.truncate(self.options.nbest);
        done.into_iter().map(|(cost, _, e)| Derivation { tree: e.tree(self), cost }).collect()
    }
}

/// The `nbest` lowest-cost derivations of `tokens`, ties broken by tree key.
pub fn analyze<S: AsRef<str>>(model: &Model, tokens: &[S], nbest: usize) -> Result<Vec<Derivation>, Error> {
    Ok(analyze_with(model, tokens, AnalysisOptions::nbest(nbest))?.derivations)
}

pub fn analyze_with<S: AsRef<str>>(model: &Model, tokens: &[S], options: AnalysisOptions) -> Result<Analysis, Error> {
    let mut chart = Chart::new(model, tokens, options)?;
    chart.fill();
    Ok(Analysis { derivations: chart.complete(), stats: chart.stats })
}

/// Sum of P(D) over every derivation yielding `tokens`.
pub fn inside_probability<S: AsRef<str>>(model: &Model, tokens: &[S]) -> Result<f64, Error> {
    if !model.is_probabilistic() {
        return Err(Error::NotProbabilistic);
    }
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    let lex: Vec<Lex> = tokens.iter().map(|t| model.lex(t.as_ref())).collect();
    let n = lex.len();
    let mut spans: Vec<Vec<BTreeMap<Signature, f64>>> = (0..n).map(|i| vec![BTreeMap::new(); n - i]).collect();
    for (pos, &w) in lex.iter().enumerate() {
        for &m in model.entries(w) {
            let aut = model.automaton(m);
            for s in 0..aut.states().len() {
                let q = StateId(s as u32);
                let p = aut.stop_cost(q).probability();
                if p > 0.0 {
                    *spans[pos][0].entry((pos, m, q)).or_default() += p;
                }
            }
        }
    }
    for width in 2..=n {
        for i in 0..=n - width {
            let j = i + width;
            let mut acc: BTreeMap<Signature, f64> = BTreeMap::new();
            for k in i + 1..j {
                for (&(p1, m1, q1), &v1) in &spans[i][k - i - 1] {
                    for (&(p2, m2, q2), &v2) in &spans[k][j - k - 1] {
                        for t in model.automaton(m2).left_into(q2) {
                            let p = t.cost.probability()
                                * model.lexical_cost(t.rel, lex[p1], m1, q1).probability()
                                * model.dependency_cost(lex[p2], t.rel, lex[p1]).probability();
                            if p > 0.0 {
                                *acc.entry((p2, m2, t.from)).or_default() += v1 * v2 * p;
                            }
                        }
                        for t in model.automaton(m1).right_into(q1) {
                            let p = t.cost.probability()
                                * model.lexical_cost(t.rel, lex[p2], m2, q2).probability()
                                * model.dependency_cost(lex[p1], t.rel, lex[p2]).probability();
                            if p > 0.0 {
                                *acc.entry((p1, m1, t.from)).or_default() += v1 * v2 * p;
                            }
                        }
                    }
                }
            }
            spans[i][width - 1] = acc;
        }
    }
    Ok(spans[0][n - 1].iter().map(|(&(p, m, q), &v)| v * model.root_cost(lex[p], m, q).probability()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AutomatonDef, Mode, ModelDef};

    fn np_model() -> Model {
        let def = ModelDef::new(Mode::Generic)
            .relations(&["mod"])
            .automaton(AutomatonDef::new("leaf", &["s0"]).stop("s0", 0.5))
            .automaton(AutomatonDef::new("noun", &["n0", "n1"]).left("n0", "mod", "n1", 0.25).stop("n0", 1.0).stop("n1", 0.125))
            .word("cheap", "leaf")
            .word("flights", "noun")
            .root("flights", "noun", "n0", 2.0)
            .dep("flights", "mod", "cheap", 3.0)
            .lex_start("mod", "cheap", "leaf", "s0", 4.0);
        Model::compile(&def).unwrap()
    }

    #[test]
    fn empty_sentence_is_an_error() {
        let toks: [&str; 0] = [];
        assert_eq!(analyze(&np_model(), &toks, 1).unwrap_err(), Error::EmptySentence);
    }

    #[test]
    fn left_combination_builds_two_word_phrase() {
        let m = np_model();
        let mut chart = Chart::new(&m, &["cheap", "flights"], AnalysisOptions::nbest(1)).unwrap();
        let cheap = chart.initial_edges(0).pop().unwrap();
        let flights_final = chart.initial_edges(1).into_iter().find(|e| m.automaton(e.automaton).state_name(e.state) == "n1").unwrap();
        let out = chart.combine_left(&flights_final, &cheap);
        assert_eq!(out.len(), 1);
        assert_eq!((out[0].i, out[0].j), (0, 2));
        // 0.5 + 0.125 + 0.25 + 4 + 3
        assert_eq!(out[0].cost, Cost::new(7.875));
    }

    #[test]
    fn single_word_parse() {
        let m = np_model();
        let d = analyze(&m, &["flights"], 3).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].cost, Cost::new(3.0));
    }

    #[test]
    fn prune_drops_dearer_edge_of_same_signature() {
        let m = np_model();
        let mut chart = Chart::new(&m, &["cheap", "flights"], AnalysisOptions::nbest(1)).unwrap();
        let mut a = chart.initial_edges(0).pop().unwrap();
        a.cost = Cost::new(3.0);
        let mut b = a.clone();
        b.cost = Cost::new(4.0);
        b.key = Rc::new(TreeKey { tokens: vec!["zz".into()], ..(*a.key).clone() });
        assert!(chart.prune(a));
        assert!(!chart.prune(b));
    }

    #[test]
    fn unparseable_has_zero_inside_probability() {
        let def = ModelDef::new(Mode::Probabilistic)
            .relations(&["r"])
            .automaton(AutomatonDef::new("leaf", &["s0"]).stop("s0", 0.0))
            .word("x", "leaf")
            .root("x", "leaf", "s0", 0.0);
        let m = Model::compile(&def).unwrap();
        assert_eq!(inside_probability(&m, &["x", "x"]).unwrap(), 0.0);
        assert!((inside_probability(&m, &["x"]).unwrap() - 1.0).abs() < 1e-15);
    }
}
