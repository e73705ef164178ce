use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::def::AutomatonDef;
use super::{RelId, StateId};
use crate::cost::Cost;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub rel: RelId,
    pub to: StateId,
    pub cost: Cost,
}

/// One step of a forward run. Left transitions write onto the right end of
/// the left sequence and right transitions onto the left end of the right
/// sequence, so a forward run emits both sides outermost first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Action {
    Left { from: StateId, rel: RelId, to: StateId },
    Right { from: StateId, rel: RelId, to: StateId },
    Stop { state: StateId },
}

#[derive(Clone, Debug)]
pub struct HeadAutomaton {
    pub id: String,
    states: Vec<String>,
    state_ids: BTreeMap<String, StateId>,
    left: Vec<Transition>,
    right: Vec<Transition>,
    stop: Vec<Cost>,
    left_from: Vec<Vec<usize>>,
    right_from: Vec<Vec<usize>>,
    left_into: Vec<Vec<usize>>,
    right_into: Vec<Vec<usize>>,
}

impl HeadAutomaton {
    pub(crate) fn compile(def: &AutomatonDef, rels: &BTreeMap<String, RelId>) -> Result<Self, Error> {
        let mut states = def.states.clone();
        states.sort();
        let state_ids: BTreeMap<String, StateId> =
            states.iter().enumerate().map(|(i, s)| (s.clone(), StateId(i as u32))).collect();
        let n = states.len();
        let lookup_state = |s: &str| {
            state_ids.get(s).copied().ok_or_else(|| Error::UnknownState { automaton: def.id.clone(), state: s.into() })
        };
        let side = |tds: &[super::def::TransitionDef]| -> Result<Vec<Transition>, Error> {
            let mut out = Vec::new();
            for t in tds {
                let rel = *rels
                    .get(&t.rel)
                    .ok_or_else(|| Error::InvalidModel(alloc::format!("unknown relation {}", t.rel)))?;
                out.push(Transition { from: lookup_state(&t.from)?, rel, to: lookup_state(&t.to)?, cost: t.cost });
            }
            out.sort_by_key(|t| (t.from, t.rel, t.to));
            Ok(out)
        };
        let left = side(&def.left)?;
        let right = side(&def.right)?;
        let mut stop = vec![Cost::INFINITE; n];
        for s in &def.stop {
            stop[lookup_state(&s.state)?.0 as usize] = s.cost;
        }
        let index = |ts: &[Transition], key: fn(&Transition) -> StateId| {
            let mut idx = vec![Vec::new(); n];
            for (i, t) in ts.iter().enumerate() {
                if t.cost.is_finite() {
                    idx[key(t).0 as usize].push(i);
                }
            }
            idx
        };
        Ok(HeadAutomaton {
            id: def.id.clone(),
            left_from: index(&left, |t| t.from),
            right_from: index(&right, |t| t.from),
            left_into: index(&left, |t| t.to),
            right_into: index(&right, |t| t.to),
            states,
            state_ids,
            left,
            right,
            stop,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_ids.get(name).copied()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0 as usize]
    }

    pub fn stop_cost(&self, q: StateId) -> Cost {
        self.stop[q.0 as usize]
    }

    pub fn left_transitions(&self) -> &[Transition] {
        &self.left
    }

    pub fn right_transitions(&self) -> &[Transition] {
        &self.right
    }

    /// Finite left transitions leaving `q`.
    pub fn left_from(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.left_from[q.0 as usize].iter().map(move |&i| &self.left[i])
    }

    pub fn right_from(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.right_from[q.0 as usize].iter().map(move |&i| &self.right[i])
    }

    /// Finite left transitions entering `q`; the parser follows these
    /// backwards.
    pub fn left_into(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.left_into[q.0 as usize].iter().map(move |&i| &self.left[i])
    }

    pub fn right_into(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.right_into[q.0 as usize].iter().map(move |&i| &self.right[i])
    }

    pub fn action_count(&self) -> usize {
        self.left.len() + self.right.len() + self.stop.iter().filter(|c| c.is_finite()).count()
    }

    pub fn action_cost(&self, a: &Action) -> Cost {
        let find = |ts: &[Transition], from: StateId, rel: RelId, to: StateId| {
            ts.iter().find(|t| t.from == from && t.rel == rel && t.to == to).map(|t| t.cost).unwrap_or(Cost::INFINITE)
        };
        match *a {
            Action::Left { from, rel, to } => find(&self.left, from, rel, to),
            Action::Right { from, rel, to } => find(&self.right, from, rel, to),
            Action::Stop { state } => self.stop_cost(state),
        }
    }

    /// Cheapest action path from `q` writing exactly `left` (outermost first)
    /// and `right` (innermost first), or INFINITE with an empty path.
    pub fn accept_cost(&self, q: StateId, left: &[RelId], right: &[RelId]) -> (Cost, Vec<Action>) {
        let (nl, nr) = (left.len(), right.len());
        let n = self.states.len();
        let idx = |q: usize, i: usize, j: usize| (q * (nl + 1) + i) * (nr + 1) + j;
        let mut best = vec![Cost::INFINITE; n * (nl + 1) * (nr + 1)];
        let mut choice: Vec<Option<Action>> = vec![None; best.len()];
        // Every transition consumes a symbol, so filling in decreasing i + j
        // order sees successors first.
        for total in (0..=nl + nr).rev() {
            for i in total.saturating_sub(nr)..=total.min(nl) {
                let j = total - i;
                for s in 0..n {
                    let st = StateId(s as u32);
                    let mut b = Cost::INFINITE;
                    let mut a = None;
                    if i == nl && j == nr && self.stop[s].is_finite() {
                        b = self.stop[s];
                        a = Some(Action::Stop { state: st });
                    }
                    if i < nl {
                        for t in self.left_from(st).filter(|t| t.rel == left[i]) {
                            let c = t.cost + best[idx(t.to.0 as usize, i + 1, j)];
                            if c < b {
                                b = c;
                                a = Some(Action::Left { from: st, rel: t.rel, to: t.to });
                            }
                        }
                    }
                    if j < nr {
                        for t in self.right_from(st).filter(|t| t.rel == right[nr - 1 - j]) {
                            let c = t.cost + best[idx(t.to.0 as usize, i, j + 1)];
                            if c < b {
                                b = c;
                                a = Some(Action::Right { from: st, rel: t.rel, to: t.to });
                            }
                        }
                    }
                    best[idx(s, i, j)] = b;
                    choice[idx(s, i, j)] = a;
                }
            }
        }
        let total = best[idx(q.0 as usize, 0, 0)];
        if total.is_infinite() {
            return (total, Vec::new());
        }
        let mut path = Vec::new();
        let (mut s, mut i, mut j) = (q.0 as usize, 0, 0);
        while let Some(a) = choice[idx(s, i, j)] {
            path.push(a);
            match a {
                Action::Left { to, .. } => {
                    s = to.0 as usize;
                    i += 1;
                }
                Action::Right { to, .. } => {
                    s = to.0 as usize;
                    j += 1;
                }
                Action::Stop { .. } => break,
            }
        }
        (total, path)
    }

    /// Sum over all accepting paths of the product of action probabilities.
    pub fn sequence_probability(&self, q: StateId, left: &[RelId], right: &[RelId]) -> f64 {
        let (nl, nr) = (left.len(), right.len());
        let n = self.states.len();
        let idx = |q: usize, i: usize, j: usize| (q * (nl + 1) + i) * (nr + 1) + j;
        let mut p = vec![0.0f64; n * (nl + 1) * (nr + 1)];
        for total in (0..=nl + nr).rev() {
            for i in total.saturating_sub(nr)..=total.min(nl) {
                let j = total - i;
                for s in 0..n {
                    let st = StateId(s as u32);
                    let mut v = 0.0;
                    if i == nl && j == nr {
                        v += self.stop[s].probability();
                    }
                    if i < nl {
                        for t in self.left_from(st).filter(|t| t.rel == left[i]) {
                            v += t.cost.probability() * p[idx(t.to.0 as usize, i + 1, j)];
                        }
                    }
                    if j < nr {
                        for t in self.right_from(st).filter(|t| t.rel == right[nr - 1 - j]) {
                            v += t.cost.probability() * p[idx(t.to.0 as usize, i, j + 1)];
                        }
                    }
                    p[idx(s, i, j)] = v;
                }
            }
        }
        p[idx(q.0 as usize, 0, 0)]
    }
}
