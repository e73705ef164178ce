//! Estimators that turn harvested counts or distances into cost tables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::choice::{Choice, ChoiceFamily};
use super::table::CostTable;
use crate::cost::Cost;

/// Positive and negative occurrence counts per choice.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChoiceCounts {
    counts: BTreeMap<Choice, (f64, f64)>,
}

impl ChoiceCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, choice: &Choice, positive: f64, negative: f64) {
        let c = self.counts.entry(choice.clone()).or_insert((0.0, 0.0));
        c.0 += positive;
        c.1 += negative;
    }

    pub fn add_positive(&mut self, choices: &[Choice]) {
        for c in choices {
            self.add(c, 1.0, 0.0);
        }
    }

    pub fn add_negative(&mut self, choices: &[Choice]) {
        for c in choices {
            self.add(c, 0.0, 1.0);
        }
    }

    pub fn merge(&mut self, other: &ChoiceCounts) {
        for (c, &(p, n)) in &other.counts {
            self.add(c, p, n);
        }
    }

    pub fn get(&self, choice: &Choice) -> (f64, f64) {
        self.counts.get(choice).copied().unwrap_or((0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Choice, f64, f64)> + '_ {
        self.counts.iter().map(|(c, &(p, n))| (c, p, n))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    fn positive_context_totals(&self) -> BTreeMap<(ChoiceFamily, &[String]), f64> {
        let mut t = BTreeMap::new();
        for (c, &(p, _)) in &self.counts {
            *t.entry((c.family.normalization_group(), c.context.as_slice())).or_insert(0.0) += p;
        }
        t
    }
}

/// ln n⁺(c) − ln n⁺(e|c). Events never seen positively are infinite and so
/// fall to backoff at lookup.
pub fn estimate_probabilistic(counts: &ChoiceCounts) -> CostTable {
    let totals = counts.positive_context_totals();
    let mut t = CostTable::default();
    for (c, p, _) in counts.iter() {
        let cost = if p > 0.0 {
            Cost::new(libm::log(totals[&(c.family.normalization_group(), c.context.as_slice())]) - libm::log(p))
        } else {
            Cost::INFINITE
        };
        t.insert(c.clone(), cost);
    }
    t
}

/// ln((n⁻ + ½) / (n⁺ + ½)).
pub fn estimate_discriminative(counts: &ChoiceCounts) -> CostTable {
    let mut t = CostTable::default();
    for (c, p, n) in counts.iter() {
        t.insert(c.clone(), Cost::new(libm::log((n + 0.5) / (p + 0.5))));
    }
    t
}

/// Sum and count of distances attributed to each choice.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DistanceAccumulator {
    cells: BTreeMap<Choice, (f64, u64)>,
}

impl DistanceAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, choice: &Choice, distance: f64) {
        self.add_sum(choice, distance, 1);
    }

    pub fn add_sum(&mut self, choice: &Choice, sum: f64, count: u64) {
        let c = self.cells.entry(choice.clone()).or_insert((0.0, 0));
        c.0 += sum;
        c.1 += count;
    }

    /// Every choice of one trace gets the same distance.
    pub fn attribute(&mut self, choices: &[Choice], distance: f64) {
        for c in choices {
            self.add(c, distance);
        }
    }

    pub fn merge(&mut self, other: &DistanceAccumulator) {
        for (c, &(s, n)) in &other.cells {
            self.add_sum(c, s, n);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Choice, f64, u64)> + '_ {
        self.cells.iter().map(|(c, &(s, n))| (c, s, n))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// E(distance | e, c).
pub fn estimate_mean_distance(acc: &DistanceAccumulator) -> CostTable {
    let mut t = CostTable::default();
    for (c, s, n) in acc.iter() {
        if n > 0 {
            t.insert(c.clone(), Cost::new(s / n as f64));
        }
    }
    t
}

/// E(distance | e, c) / E(distance | c), or 1 where the context's mean is 0.
pub fn estimate_normalized_distance(acc: &DistanceAccumulator) -> CostTable {
    let mut ctx: BTreeMap<(ChoiceFamily, &[String]), (f64, u64)> = BTreeMap::new();
    for (c, s, n) in acc.iter() {
        let x = ctx.entry((c.family.normalization_group(), c.context.as_slice())).or_insert((0.0, 0));
        x.0 += s;
        x.1 += n;
    }
    let mut t = CostTable::default();
    for (c, s, n) in acc.iter() {
        if n == 0 {
            continue;
        }
        let (cs, cn) = ctx[&(c.family.normalization_group(), c.context.as_slice())];
        let ec = cs / cn as f64;
        let v = if ec == 0.0 { 1.0 } else { (s / n as f64) / ec };
        t.insert(c.clone(), Cost::new(v));
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Probabilistic,
    Discriminative,
    MeanDistance,
    NormalizedDistance,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Probabilistic, Method::Discriminative, Method::MeanDistance, Method::NormalizedDistance];

    pub fn name(self) -> &'static str {
        match self {
            Method::Probabilistic => "prob",
            Method::Discriminative => "disc",
            Method::MeanDistance => "meandist",
            Method::NormalizedDistance => "normdist",
        }
    }

    pub fn uses_counts(self) -> bool {
        matches!(self, Method::Probabilistic | Method::Discriminative)
    }
}

impl core::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL.iter().copied().find(|m| m.name() == s).ok_or_else(|| alloc::format!("unknown method {s:?}"))
    }
}

/// Pairs a choice list with every context total, for tests and reports.
pub fn context_totals(counts: &ChoiceCounts) -> Vec<(ChoiceFamily, Vec<String>, f64)> {
    counts.positive_context_totals().into_iter().map(|((f, c), n)| (f, c.to_vec(), n)).collect()
}
