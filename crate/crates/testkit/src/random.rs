//! Seeded generators for random models, trees and transfer instances. All
//! costs are multiples of 1/8 so sums are exact and ties are real.

use rand::seq::SliceRandom;
use rand::Rng;

use headmt_core::model::{AutomatonDef, Mode, ModelDef};
use headmt_core::transfer::{BilingualEntry, BilingualLexicon, NullEntry};
use headmt_core::{Dependent, OrderedDependencyTree, UnorderedDependencyGraph};

use crate::fixtures::fragment;

pub fn dyadic<R: Rng>(rng: &mut R, max_eighths: u32) -> f64 {
    rng.gen_range(0..=max_eighths) as f64 / 8.0
}

#[derive(Clone, Copy, Debug)]
pub struct ModelShape {
    pub max_words: usize,
    pub max_relations: usize,
    pub max_automata: usize,
    pub max_states: usize,
    pub transition_density: f64,
    pub dependency_density: f64,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_words: 8,
            max_relations: 3,
            max_automata: 3,
            max_states: 3,
            transition_density: 0.25,
            dependency_density: 0.3,
        }
    }
}

/// A generic model with sparse random parameters.
pub fn random_model<R: Rng>(rng: &mut R, shape: ModelShape) -> ModelDef {
    let nw = rng.gen_range(2..=shape.max_words);
    let nr = rng.gen_range(1..=shape.max_relations);
    let na = rng.gen_range(1..=shape.max_automata);
    let words: Vec<String> = (0..nw).map(|i| format!("w{i}")).collect();
    let rels: Vec<String> = (0..nr).map(|i| format!("r{i}")).collect();
    let rel_refs: Vec<&str> = rels.iter().map(String::as_str).collect();
    let mut def = ModelDef::new(Mode::Generic).relations(&rel_refs);
    let mut automata = Vec::new();
    for a in 0..na {
        let ns = rng.gen_range(1..=shape.max_states);
        let states: Vec<String> = (0..ns).map(|i| format!("s{i}")).collect();
        let st: Vec<&str> = states.iter().map(String::as_str).collect();
        let id = format!("m{a}");
        let mut aut = AutomatonDef::new(&id, &st);
        for f in &st {
            for r in &rel_refs {
                for t in &st {
                    if rng.gen_bool(shape.transition_density) {
                        aut = aut.left(f, r, t, dyadic(rng, 16));
                    }
                    if rng.gen_bool(shape.transition_density) {
                        aut = aut.right(f, r, t, dyadic(rng, 16));
                    }
                }
            }
            if rng.gen_bool(0.6) {
                aut = aut.stop(f, dyadic(rng, 8));
            }
        }
        automata.push((id, states));
        def = def.automaton(aut);
    }
    let mut word_automata = Vec::new();
    for w in &words {
        let k = rng.gen_range(1..=2.min(na));
        let mut ms: Vec<usize> = (0..na).collect();
        ms.shuffle(rng);
        ms.truncate(k);
        for &m in &ms {
            def = def.word(w, &automata[m].0);
        }
        word_automata.push(ms);
    }
    for h in &words {
        for r in &rel_refs {
            for d in &words {
                if rng.gen_bool(shape.dependency_density) {
                    def = def.dep(h, r, d, dyadic(rng, 16));
                }
            }
        }
    }
    for (w, ms) in words.iter().zip(&word_automata) {
        for &m in ms {
            let (id, states) = &automata[m];
            for r in &rel_refs {
                for q in states {
                    if rng.gen_bool(0.35) {
                        def = def.lex_start(r, w, id, q, dyadic(rng, 8));
                    }
                }
            }
            if rng.gen_bool(0.6) {
                let q = states.choose(rng).unwrap();
                def = def.root(w, id, q, dyadic(rng, 8));
            }
        }
    }
    def
}

/// A random finite-cost derivation of at most `max_nodes` nodes, made by
/// walking the model's parameters without regard to their costs.
pub fn random_derivation<R: Rng>(def: &ModelDef, rng: &mut R, max_nodes: usize) -> Option<OrderedDependencyTree> {
    let roots: Vec<_> = def.root_start.iter().filter(|r| r.cost.is_finite()).collect();
    let r = roots.choose(rng)?;
    let mut budget = max_nodes;
    expand(def, rng, &r.word, &r.automaton, &r.state, &mut budget)
}

fn expand<R: Rng>(def: &ModelDef, rng: &mut R, word: &str, aut: &str, state: &str, budget: &mut usize) -> Option<OrderedDependencyTree> {
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let a = def.automata.iter().find(|a| a.id == aut)?;
    let mut t = OrderedDependencyTree::leaf(word, aut, state);
    let mut q = state.to_string();
    loop {
        // (kind, rel, next state); kind 0 = stop, 1 = left, 2 = right.
        let mut opts: Vec<(u8, String, String)> = Vec::new();
        if a.stop.iter().any(|s| s.state == q && s.cost.is_finite()) {
            opts.push((0, String::new(), String::new()));
        }
        if *budget > 0 {
            for x in a.left.iter().filter(|x| x.from == q && x.cost.is_finite()) {
                opts.push((1, x.rel.clone(), x.to.clone()));
            }
            for x in a.right.iter().filter(|x| x.from == q && x.cost.is_finite()) {
                opts.push((2, x.rel.clone(), x.to.clone()));
            }
        }
        let (kind, rel, to) = opts.choose(rng)?.clone();
        if kind == 0 {
            return Some(t);
        }
        let deps: Vec<_> = def
            .dependency
            .iter()
            .filter(|d| d.head == word && d.rel == rel && d.cost.is_finite())
            .flat_map(|d| {
                let rel = &rel;
                def.lexical_start
                    .iter()
                    .filter(move |l| &l.rel == rel && l.word == d.dep && l.cost.is_finite())
                    .map(|l| (l.word.clone(), l.automaton.clone(), l.state.clone()))
            })
            .collect();
        let (dw, dm, dq) = deps.choose(rng)?.clone();
        let child = expand(def, rng, &dw, &dm, &dq, budget)?;
        let d = Dependent { rel: rel.clone(), tree: child };
        if kind == 1 {
            t.left.push(d);
        } else {
            t.right.insert(0, d);
        }
        q = to;
    }
}

/// A random unordered tree with node ids 0..n, each node under an earlier
/// one, at most `max_children` dependents per node.
pub fn random_tree<R: Rng>(rng: &mut R, words: &[&str], rels: &[&str], n: usize, max_children: usize) -> UnorderedDependencyGraph {
    let mut g = UnorderedDependencyGraph::new();
    let mut kids = vec![0usize; n];
    for i in 0..n {
        g.add_node(i as u32, Some(words.choose(rng).unwrap()));
        if i > 0 {
            let open: Vec<usize> = (0..i).filter(|&p| kids[p] < max_children).collect();
            let p = *open.choose(rng).unwrap_or(&0);
            kids[p] += 1;
            g.add_arc(p as u32, rels.choose(rng).unwrap(), i as u32);
        }
    }
    g
}

#[derive(Clone, Debug)]
pub struct TransferInstance {
    pub source: UnorderedDependencyGraph,
    pub lexicon: BilingualLexicon,
    pub target: ModelDef,
}

const SRC_WORDS: [&str; 5] = ["a", "b", "c", "d", "e"];
const SRC_RELS: [&str; 2] = ["r", "s"];
const TGT_WORDS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
const TGT_RELS: [&str; 3] = ["x", "y", "z"];

/// A source tree of at most `max_nodes` nodes, a lexicon of at most three
/// entries per word with fragments of at most three nodes, and a target
/// model pricing target arcs.
pub fn random_transfer_instance<R: Rng>(rng: &mut R, max_nodes: usize) -> TransferInstance {
    let n = rng.gen_range(1..=max_nodes);
    let source = random_tree(rng, &SRC_WORDS, &SRC_RELS, n, 3);
    let mut used: Vec<&str> = source.nodes.iter().filter_map(|x| x.word.as_deref()).collect();
    used.sort();
    used.dedup();
    // Something that can tile every occurrence: a lone-node entry where a
    // word is the root, and per arc either an entry of the child consuming
    // it or a lone child entry plus a parent entry with a hole for it.
    let mut required: std::collections::BTreeMap<String, Vec<BilingualEntry>> = Default::default();
    let push = |w: &str, e: BilingualEntry, req: &mut std::collections::BTreeMap<String, Vec<BilingualEntry>>| {
        let list = req.entry(w.to_string()).or_default();
        if !list.iter().any(|x| x.source == e.source) {
            list.push(e);
        }
    };
    let root = source.tree_root().unwrap();
    push(source.word(root).unwrap(), lone(rng, source.word(root).unwrap()), &mut required);
    for a in &source.arcs {
        let (p, c) = (source.word(a.from).unwrap(), source.word(a.to).unwrap());
        if rng.gen_bool(0.5) {
            let e = incoming(rng, c, &a.rel);
            push(c, e, &mut required);
        } else {
            let e = lone(rng, c);
            push(c, e, &mut required);
            let e = hole(rng, p, &a.rel);
            push(p, e, &mut required);
        }
    }
    let mut entries = Vec::new();
    for w in &used {
        let mut list: Vec<BilingualEntry> = required.remove(*w).unwrap_or_default();
        while list.len() < 3 && rng.gen_bool(0.6) {
            let e = match rng.gen_range(0..4) {
                0 => lone(rng, w),
                1 => {
                    let rel = *SRC_RELS.choose(rng).unwrap();
                    incoming(rng, w, rel)
                }
                2 => with_child(rng, w, &source),
                _ => with_hole(rng, w),
            };
            list.push(e);
        }
        list.truncate(3);
        for (k, mut e) in list.into_iter().enumerate() {
            e.id = format!("{w}#{k}");
            entries.push(e);
        }
    }
    let mut nulls = Vec::new();
    for w in &used {
        if rng.gen_bool(0.3) {
            nulls.push(NullEntry { word: w.to_string(), cost: dyadic(rng, 4).into() });
        }
    }
    let mut target = ModelDef::new(Mode::Generic)
        .relations(&TGT_RELS)
        .automaton(AutomatonDef::new("any", &["t0"]).stop("t0", 0.0));
    for w in TGT_WORDS {
        target = target.word(w, "any");
    }
    for h in TGT_WORDS {
        for r in TGT_RELS {
            for d in TGT_WORDS {
                if rng.gen_bool(0.8) {
                    target = target.dep(h, r, d, dyadic(rng, 12));
                }
            }
        }
    }
    TransferInstance { source, lexicon: BilingualLexicon { entries, nulls }, target }
}

fn tword<R: Rng>(rng: &mut R) -> &'static str {
    TGT_WORDS.choose(rng).unwrap()
}

fn trel<R: Rng>(rng: &mut R) -> &'static str {
    TGT_RELS.choose(rng).unwrap()
}

fn lone<R: Rng>(rng: &mut R, w: &str) -> BilingualEntry {
    let t = tword(rng);
    BilingualEntry::new("", w, fragment(&[(0, w)], &[]), 0, fragment(&[(0, t)], &[])).map(0, 0).cost(dyadic(rng, 16))
}

fn incoming<R: Rng>(rng: &mut R, w: &str, rel: &str) -> BilingualEntry {
    let (t, r) = (tword(rng), trel(rng));
    // Sometimes the target arc points the other way: a head switch.
    let arcs: &[(u32, &str, u32)] = if rng.gen_bool(0.2) { &[(1, r, 0)] } else { &[(0, r, 1)] };
    let mut e = BilingualEntry::new("", w, fragment(&[(0, ""), (1, w)], &[(0, rel, 1)]), 1, fragment(&[(0, ""), (1, t)], arcs))
        .map(0, 0)
        .map(1, 1)
        .cost(dyadic(rng, 16));
    if rng.gen_bool(0.3) {
        let parent = SRC_WORDS.choose(rng).unwrap();
        e = e.context(parent, rel, dyadic(rng, 16));
    }
    e
}

fn with_child<R: Rng>(rng: &mut R, w: &str, source: &UnorderedDependencyGraph) -> BilingualEntry {
    let arcs: Vec<_> = source.arcs.iter().filter(|a| source.word(a.from) == Some(w)).collect();
    let Some(a) = arcs.choose(rng) else { return with_hole(rng, w) };
    let c = source.word(a.to).unwrap().to_string();
    let h = fragment(&[(0, w), (1, &c)], &[(0, &a.rel, 1)]);
    let e = if rng.gen_bool(0.5) {
        BilingualEntry::new("", w, h, 0, fragment(&[(0, tword(rng))], &[])).map(0, 0).map(1, 0)
    } else {
        let (t, u, r) = (tword(rng), tword(rng), trel(rng));
        BilingualEntry::new("", w, h, 0, fragment(&[(0, t), (1, u)], &[(0, r, 1)])).map(0, 0).map(1, 1)
    };
    e.cost(dyadic(rng, 16))
}

fn with_hole<R: Rng>(rng: &mut R, w: &str) -> BilingualEntry {
    let rel = *SRC_RELS.choose(rng).unwrap();
    hole(rng, w, rel)
}

fn hole<R: Rng>(rng: &mut R, w: &str, rel: &str) -> BilingualEntry {
    let (t, r) = (tword(rng), trel(rng));
    BilingualEntry::new("", w, fragment(&[(0, w), (1, "")], &[(0, rel, 1)]), 0, fragment(&[(0, t), (1, "")], &[(0, r, 1)]))
        .map(0, 0)
        .map(1, 1)
        .cost(dyadic(rng, 16))
}
