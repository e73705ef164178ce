//! Training from translation traces: supervised counts against reference
//! translations, and reflexive training from round-trip distances.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::choice::Choice;
use super::distance::string_distance;
use super::estimate::{
    estimate_discriminative, estimate_mean_distance, estimate_normalized_distance, estimate_probabilistic,
    ChoiceCounts, DistanceAccumulator, Method,
};
use super::table::CostTable;
use crate::error::Error;
use crate::pipeline::{Component, Pipeline, StageTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

pub type Scope = (Direction, Component);

pub fn scope_name(s: Scope) -> String {
    alloc::format!("{}.{}", s.0.name(), s.1.name())
}

fn choices_by_component(stages: &[StageTrace]) -> BTreeMap<Component, Vec<Choice>> {
    let mut m: BTreeMap<Component, Vec<Choice>> = BTreeMap::new();
    for s in stages {
        for (c, ch) in s.components() {
            m.entry(c).or_default().push(ch.clone());
        }
    }
    m
}

/// Tables per component, any of them possibly absent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComponentTables {
    pub tables: BTreeMap<Component, CostTable>,
}

impl ComponentTables {
    pub fn get(&self, c: Component) -> Option<&CostTable> {
        self.tables.get(&c)
    }

    pub fn apply(&self, p: &Pipeline) -> Result<Pipeline, Error> {
        p.overlay(self.get(Component::Source), self.get(Component::Lexicon), self.get(Component::Target))
    }
}

/// Counts harvested from candidate translations of a reference corpus:
/// candidates whose output equals the reference count positively, the rest
/// negatively.
pub fn supervised_counts<S: AsRef<str>>(
    pipeline: &Pipeline,
    corpus: &[(Vec<S>, Vec<S>)],
    candidate_limit: usize,
) -> Result<BTreeMap<Component, ChoiceCounts>, Error> {
    let mut out: BTreeMap<Component, ChoiceCounts> = BTreeMap::new();
    for (src, reference) in corpus {
        let cands = match pipeline.candidates(src, candidate_limit) {
            Ok(c) => c,
            Err(Error::NoParse) => continue,
            Err(e) => return Err(e),
        };
        for t in cands {
            let good = t.tokens.len() == reference.len() && t.tokens.iter().zip(reference).all(|(a, b)| a == b.as_ref());
            for (c, chs) in choices_by_component(&t.stages) {
                let counts = out.entry(c).or_default();
                if good {
                    counts.add_positive(&chs);
                } else {
                    counts.add_negative(&chs);
                }
            }
        }
    }
    Ok(out)
}

pub fn estimate_from_counts(method: Method, counts: &BTreeMap<Component, ChoiceCounts>) -> ComponentTables {
    let tables = counts
        .iter()
        .map(|(&c, n)| {
            let t = match method {
                Method::Discriminative => estimate_discriminative(n),
                _ => estimate_probabilistic(n),
            };
            (c, t)
        })
        .collect();
    ComponentTables { tables }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrip {
    pub source: Vec<String>,
    pub forward: Option<Vec<String>>,
    pub back: Option<Vec<String>>,
    pub distance: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReflexiveResult {
    pub forward: ComponentTables,
    pub backward: ComponentTables,
    pub accumulators: BTreeMap<Scope, DistanceAccumulator>,
    /// Round trips of the last iteration.
    pub round_trips: Vec<RoundTrip>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReflexiveOptions {
    pub method: Method,
    pub iterations: usize,
}

impl Default for ReflexiveOptions {
    fn default() -> Self {
        ReflexiveOptions { method: Method::MeanDistance, iterations: 1 }
    }
}

/// One pass over the corpus: forward then backward translation, with the
/// round-trip distance attributed to every choice of both traces. A failed
/// stage scores distance 1 and attributes it to whatever traces exist.
pub fn collect_distances<S: AsRef<str>>(
    forward: &Pipeline,
    backward: &Pipeline,
    corpus: &[Vec<S>],
) -> (BTreeMap<Scope, DistanceAccumulator>, Vec<RoundTrip>) {
    let mut acc: BTreeMap<Scope, DistanceAccumulator> = BTreeMap::new();
    let mut trips = Vec::new();
    for s in corpus {
        let src: Vec<String> = s.iter().map(|w| String::from(w.as_ref())).collect();
        let (fwd_stages, fwd) = match forward.translate(&src) {
            Ok(t) => (t.stages, Some(t.tokens)),
            Err(f) => (f.partial, None),
        };
        let (bwd_stages, back) = match &fwd {
            Some(t) => match backward.translate(t) {
                Ok(b) => (b.stages, Some(b.tokens)),
                Err(f) => (f.partial, None),
            },
            None => (Vec::new(), None),
        };
        let distance = back.as_ref().map_or(1.0, |b| string_distance(&src, b));
        for (dir, stages) in [(Direction::Forward, &fwd_stages), (Direction::Backward, &bwd_stages)] {
            for (c, chs) in choices_by_component(stages) {
                acc.entry((dir, c)).or_default().attribute(&chs, distance);
            }
        }
        trips.push(RoundTrip { source: src, forward: fwd, back, distance });
    }
    (acc, trips)
}

fn estimate_distances(method: Method, acc: &BTreeMap<Scope, DistanceAccumulator>, dir: Direction) -> ComponentTables {
    let tables = acc
        .iter()
        .filter(|((d, _), _)| *d == dir)
        .map(|(&(_, c), a)| {
            let t = match method {
                Method::NormalizedDistance => estimate_normalized_distance(a),
                _ => estimate_mean_distance(a),
            };
            (c, t)
        })
        .collect();
    ComponentTables { tables }
}

/// Reflexive training over a source-language corpus. After each iteration
/// but the last, both pipelines are re-costed with the fresh tables.
pub fn reflexive_train<S: AsRef<str>>(
    forward: &Pipeline,
    backward: &Pipeline,
    corpus: &[Vec<S>],
    options: ReflexiveOptions,
) -> Result<ReflexiveResult, Error> {
    let mut fwd = forward.clone();
    let mut bwd = backward.clone();
    let mut result = ReflexiveResult::default();
    for it in 0..options.iterations.max(1) {
        let (acc, trips) = collect_distances(&fwd, &bwd, corpus);
        result.forward = estimate_distances(options.method, &acc, Direction::Forward);
        result.backward = estimate_distances(options.method, &acc, Direction::Backward);
        result.accumulators = acc;
        result.round_trips = trips;
        if it + 1 < options.iterations {
            fwd = result.forward.apply(forward)?;
            bwd = result.backward.apply(backward)?;
        }
    }
    Ok(result)
}
