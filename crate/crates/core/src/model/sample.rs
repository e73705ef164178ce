//! Monte-Carlo generation: draw a derivation with probability P(D0).

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Action, AutId, Model, StateId, WordId};
use crate::cost::Cost;
use crate::error::Error;
use crate::tree::{Dependent, OrderedDependencyTree};

pub const DEFAULT_DEPTH_BOUND: usize = 64;
/// Actions taken by one automaton before the run is declared nonterminating.
const MAX_ACTIONS_PER_NODE: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledDerivation {
    pub tree: OrderedDependencyTree,
    pub tokens: Vec<alloc::string::String>,
}

/// Index drawn from the (unnormalized) distribution exp(-cost).
fn draw<R: Rng>(rng: &mut R, costs: &[Cost]) -> Option<usize> {
    let total: f64 = costs.iter().map(|c| c.probability()).sum();
    if total <= 0.0 {
        return None;
    }
    let mut u = rng.gen::<f64>() * total;
    let mut last = None;
    for (i, c) in costs.iter().enumerate() {
        let p = c.probability();
        if p > 0.0 {
            last = Some(i);
            if u < p {
                return Some(i);
            }
            u -= p;
        }
    }
    last
}

impl Model {
    pub fn sample_derivation(&self, seed: u64) -> Result<SampledDerivation, Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, DEFAULT_DEPTH_BOUND)
    }

    /// Draws one derivation using `rng`. Trees deeper than `depth_bound`
    /// nodes abort with [`Error::DepthExceeded`].
    pub fn sample_with<R: Rng>(&self, rng: &mut R, depth_bound: usize) -> Result<SampledDerivation, Error> {
        if !self.is_probabilistic() {
            return Err(Error::NotProbabilistic);
        }
        let starts: Vec<(WordId, AutId, StateId, Cost)> = self
            .root_start
            .iter()
            .flat_map(|(&w, v)| v.iter().map(move |e| (w, e.automaton, e.state, e.cost)))
            .collect();
        let costs: Vec<Cost> = starts.iter().map(|s| s.3).collect();
        let i = draw(rng, &costs).ok_or_else(|| Error::InvalidModel("no root probability mass".to_string()))?;
        let (w, m, q, _) = starts[i];
        let tree = self.sample_node(rng, w, m, q, 1, depth_bound)?;
        let tokens = tree.linearize();
        Ok(SampledDerivation { tree, tokens })
    }

    fn sample_node<R: Rng>(
        &self,
        rng: &mut R,
        w: WordId,
        m: AutId,
        q: StateId,
        depth: usize,
        bound: usize,
    ) -> Result<OrderedDependencyTree, Error> {
        if depth > bound {
            return Err(Error::DepthExceeded(bound));
        }
        let aut = self.automaton(m);
        let mut node = OrderedDependencyTree::leaf(self.word_name(w), &aut.id, aut.state_name(q));
        let mut state = q;
        for _ in 0..MAX_ACTIONS_PER_NODE {
            let mut actions = Vec::new();
            let mut costs = Vec::new();
            if aut.stop_cost(state).is_finite() {
                actions.push(Action::Stop { state });
                costs.push(aut.stop_cost(state));
            }
            for t in aut.left_from(state) {
                actions.push(Action::Left { from: state, rel: t.rel, to: t.to });
                costs.push(t.cost);
            }
            for t in aut.right_from(state) {
                actions.push(Action::Right { from: state, rel: t.rel, to: t.to });
                costs.push(t.cost);
            }
            let Some(k) = draw(rng, &costs) else {
                return Err(Error::InvalidModel(alloc::format!(
                    "state {} of automaton {} has no probability mass",
                    aut.state_name(state),
                    aut.id
                )));
            };
            let (rel, to, left) = match actions[k] {
                Action::Stop { .. } => return Ok(node),
                Action::Left { rel, to, .. } => (rel, to, true),
                Action::Right { rel, to, .. } => (rel, to, false),
            };
            let deps = self.dependents_of(w, rel);
            let dcosts: Vec<Cost> = deps.iter().map(|d| d.1).collect();
            let d = draw(rng, &dcosts).ok_or_else(|| {
                Error::InvalidModel(alloc::format!(
                    "no dependency mass for ({}, {})",
                    self.word_name(w),
                    self.rel_name(rel)
                ))
            })?;
            let dw = deps[d].0;
            let lex = self.lexical_starts(rel, Some(dw));
            let lcosts: Vec<Cost> = lex.iter().map(|l| l.2).collect();
            let l = draw(rng, &lcosts).ok_or_else(|| {
                Error::InvalidModel(alloc::format!(
                    "no lexical mass for ({}, {})",
                    self.rel_name(rel),
                    self.word_name(dw)
                ))
            })?;
            let child = self.sample_node(rng, dw, lex[l].0, lex[l].1, depth + 1, bound)?;
            let dep = Dependent { rel: self.rel_name(rel).to_string(), tree: child };
            if left {
                node.left.push(dep);
            } else {
                node.right.insert(0, dep);
            }
            state = to;
        }
        Err(Error::DepthExceeded(bound))
    }
}
