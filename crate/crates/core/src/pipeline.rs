//! Analysis, transfer and generation chained into one translation step.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::{analyze_with, AnalysisOptions, Derivation};
use crate::cost::Cost;
use crate::error::Error;
use crate::generation::{generate, OrderingSolution};
use crate::graph::UnorderedDependencyGraph;
use crate::model::{Model, ModelDef};
use crate::train::choice::{Choice, ChoiceFamily, TraceStep};
use crate::train::table::CostTable;
use crate::transfer::{
    brute_force_tilings, context_row, dep_step, transfer_with, BilingualLexicon, TransferOptions, TransferOutput,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Source analyses tried, lowest cost first.
    pub nbest: usize,
    pub prune: bool,
    pub decompose: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { nbest: 1, prune: true, decompose: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Analyze,
    Transfer,
    Generate,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Analyze => "analyze",
            Stage::Transfer => "transfer",
            Stage::Generate => "generate",
        }
    }
}

/// Which cost function a choice belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Source,
    Lexicon,
    Target,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Source, Component::Lexicon, Component::Target];

    pub fn name(self) -> &'static str {
        match self {
            Component::Source => "source",
            Component::Lexicon => "bilex",
            Component::Target => "target",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageTrace {
    pub stage: Stage,
    pub steps: Vec<TraceStep>,
    pub cost: Cost,
    /// Wall time in milliseconds, when a clock was supplied.
    pub ms: f64,
}

impl StageTrace {
    fn new(stage: Stage, steps: Vec<TraceStep>) -> Self {
        let cost = steps.iter().map(|s| s.cost).sum();
        StageTrace { stage, steps, cost, ms: 0.0 }
    }

    fn timed(mut self, ms: f64) -> Self {
        self.ms = ms;
        self
    }

    /// Each step's choice with the component it prices.
    pub fn components(&self) -> impl Iterator<Item = (Component, &Choice)> + '_ {
        self.steps.iter().map(move |s| {
            let c = match (self.stage, s.choice.family) {
                (Stage::Analyze, _) => Component::Source,
                (Stage::Transfer, ChoiceFamily::Xfer | ChoiceFamily::Null) => Component::Lexicon,
                _ => Component::Target,
            };
            (c, &s.choice)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    pub tokens: Vec<String>,
    pub cost: Cost,
    pub analysis: Derivation,
    pub target_graph: UnorderedDependencyGraph,
    pub transfer: Option<TransferOutput>,
    pub ordering: OrderingSolution,
    pub stages: Vec<StageTrace>,
}

/// A failed translation with the traces of the stages that succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationFailure {
    pub error: Error,
    pub partial: Vec<StageTrace>,
}

impl From<Error> for TranslationFailure {
    fn from(error: Error) -> Self {
        TranslationFailure { error, partial: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    source_def: ModelDef,
    target_def: ModelDef,
    source: Model,
    target: Model,
    lexicon: BilingualLexicon,
    pub options: PipelineOptions,
}

impl Pipeline {
    pub fn new(source: &ModelDef, target: &ModelDef, lexicon: BilingualLexicon) -> Result<Self, Error> {
        Self::with_options(source, target, lexicon, PipelineOptions::default())
    }

    pub fn with_options(
        source: &ModelDef,
        target: &ModelDef,
        lexicon: BilingualLexicon,
        options: PipelineOptions,
    ) -> Result<Self, Error> {
        lexicon.check()?;
        Ok(Pipeline {
            source: Model::compile(source)?,
            target: Model::compile(target)?,
            source_def: source.clone(),
            target_def: target.clone(),
            lexicon,
            options,
        })
    }

    pub fn source(&self) -> &Model {
        &self.source
    }

    pub fn target(&self) -> &Model {
        &self.target
    }

    pub fn lexicon(&self) -> &BilingualLexicon {
        &self.lexicon
    }

    pub fn source_def(&self) -> &ModelDef {
        &self.source_def
    }

    pub fn target_def(&self) -> &ModelDef {
        &self.target_def
    }

    /// The same pipeline with each component re-costed by its table.
    pub fn overlay(&self, source: Option<&CostTable>, lexicon: Option<&CostTable>, target: Option<&CostTable>) -> Result<Self, Error> {
        let s = source.map_or_else(|| self.source_def.clone(), |t| t.overlay_model(&self.source_def));
        let t = target.map_or_else(|| self.target_def.clone(), |t| t.overlay_model(&self.target_def));
        let l = lexicon.map_or_else(|| self.lexicon.clone(), |t| t.overlay_lexicon(&self.lexicon));
        Self::with_options(&s, &t, l, self.options)
    }

    fn analyses<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<Derivation>, Error> {
        let opts = AnalysisOptions { nbest: self.options.nbest.max(1), prune: self.options.prune };
        Ok(analyze_with(&self.source, tokens, opts)?.derivations)
    }

    fn analysis_stage(&self, d: &Derivation) -> StageTrace {
        StageTrace::new(Stage::Analyze, self.source.derivation_trace(&d.tree).steps)
    }

    /// Lowest total-cost translation over the n best analyses. Target
    /// dependencies are charged once, by transfer; generation pays only for
    /// arcs it adds.
    pub fn translate<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Translation, TranslationFailure> {
        self.translate_clocked(tokens, &|| 0.0)
    }

    /// [`translate`](Self::translate) with stage timings read from `now`,
    /// a millisecond clock.
    pub fn translate_clocked<S: AsRef<str>>(
        &self,
        tokens: &[S],
        now: &dyn Fn() -> f64,
    ) -> Result<Translation, TranslationFailure> {
        let t0 = now();
        let analyses = self.analyses(tokens)?;
        let analysis_ms = now() - t0;
        let mut best: Option<Translation> = None;
        let mut failure: Option<TranslationFailure> = None;
        for d in analyses {
            let astage = self.analysis_stage(&d).timed(analysis_ms);
            let opts = TransferOptions { decompose: self.options.decompose };
            let t1 = now();
            let out = match transfer_with(&d.tree.unorder(), &self.lexicon, &self.target, opts) {
                Ok(o) => o,
                Err(error) => {
                    failure.get_or_insert(TranslationFailure { error, partial: alloc::vec![astage] });
                    continue;
                }
            };
            let t2 = now();
            let tstage = StageTrace::new(Stage::Transfer, out.steps.clone()).timed(t2 - t1);
            let (tokens, ordering) = match generate(&out.graph, &self.target, false) {
                Ok(x) => x,
                Err(error) => {
                    failure.get_or_insert(TranslationFailure { error, partial: alloc::vec![astage, tstage] });
                    continue;
                }
            };
            let gstage = StageTrace::new(Stage::Generate, ordering.trace(&self.target)).timed(now() - t2);
            let cost = d.cost + out.cost + ordering.cost;
            if best.as_ref().is_none_or(|b| cost < b.cost) {
                best = Some(Translation {
                    tokens,
                    cost,
                    analysis: d,
                    target_graph: out.graph.clone(),
                    transfer: Some(out),
                    ordering,
                    stages: alloc::vec![astage, tstage, gstage],
                });
            }
        }
        best.ok_or_else(|| failure.unwrap_or(TranslationFailure { error: Error::NoParse, partial: Vec::new() }))
    }

    /// Every translation reachable through any tiling of any of the n best
    /// analyses, at most `limit` of them. Exhaustive in the tiling, so only
    /// for small sentences.
    pub fn candidates<S: AsRef<str>>(&self, tokens: &[S], limit: usize) -> Result<Vec<Translation>, Error> {
        let mut out = Vec::new();
        for d in self.analyses(tokens)? {
            let astage = self.analysis_stage(&d);
            let source = d.tree.unorder();
            for t in brute_force_tilings(&source, &self.lexicon, &self.target) {
                if out.len() >= limit {
                    return Ok(out);
                }
                let Ok((tokens, ordering)) = generate(&t.graph, &self.target, false) else { continue };
                let mut steps = Vec::new();
                for (n, m) in &t.tiling {
                    match m {
                        Some(m) => {
                            let e = &self.lexicon.entries[m.entry];
                            let parent = context_row(e, &m.g, &source).map(|r| (r.parent.as_str(), r.rel.as_str()));
                            steps.push(TraceStep::new(Choice::xfer(&e.id, &e.word, parent), m.cost));
                        }
                        None => {
                            let w = source.word(*n).unwrap_or_default();
                            steps.push(TraceStep::new(Choice::null(w), self.lexicon.null_cost(w)));
                        }
                    }
                }
                for a in &t.graph.arcs {
                    let (f, to) = (t.graph.word(a.from).unwrap_or_default(), t.graph.word(a.to).unwrap_or_default());
                    steps.push(dep_step(&self.target, f, &a.rel, to));
                }
                let tstage = StageTrace::new(Stage::Transfer, steps);
                let gstage = StageTrace::new(Stage::Generate, ordering.trace(&self.target));
                out.push(Translation {
                    tokens,
                    cost: d.cost + t.cost + ordering.cost,
                    analysis: d.clone(),
                    target_graph: t.graph,
                    transfer: None,
                    ordering,
                    stages: alloc::vec![astage.clone(), tstage, gstage],
                });
            }
        }
        Ok(out)
    }
}
