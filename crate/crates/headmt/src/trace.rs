//! Trace records: the choices each stage applied, with their costs.

use serde::Serialize;

use headmt_core::pipeline::StageTrace;
use headmt_core::train::TraceStep;
use headmt_core::Cost;

#[derive(Clone, Debug, Serialize)]
pub struct ChoiceRecord {
    pub family: String,
    pub context: String,
    pub event: String,
    #[serde(with = "crate::format::cost")]
    pub cost: Cost,
}

impl From<&TraceStep> for ChoiceRecord {
    fn from(s: &TraceStep) -> Self {
        ChoiceRecord {
            family: s.choice.family.name().into(),
            context: s.choice.context_key(),
            event: s.choice.event_key(),
            cost: s.cost,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub stage: String,
    #[serde(with = "crate::format::cost")]
    pub cost: Cost,
    pub choices: Vec<ChoiceRecord>,
    pub ms: f64,
}

impl TraceRecord {
    pub fn new(stage: &str, steps: &[TraceStep], ms: f64) -> Self {
        TraceRecord {
            stage: stage.into(),
            cost: steps.iter().map(|s| s.cost).sum(),
            choices: steps.iter().map(ChoiceRecord::from).collect(),
            ms,
        }
    }
}

impl From<&StageTrace> for TraceRecord {
    fn from(s: &StageTrace) -> Self {
        TraceRecord::new(s.stage.name(), &s.steps, s.ms)
    }
}
