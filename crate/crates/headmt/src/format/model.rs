//! Model files: one pretty-printed JSON document per model.

use serde::{Deserialize, Serialize};

use headmt_core::model::{
    AutomatonDef, DependencyDef, LexicalStartDef, LexiconDef, Mode, ModelDef, RootStartDef, StopDef, TransitionDef,
    DEFAULT_UNKNOWN_WORD_PENALTY,
};
use headmt_core::Cost;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeFile {
    Probabilistic,
    Generic,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionFile {
    from: String,
    rel: String,
    to: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StopFile {
    state: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonFile {
    id: String,
    states: Vec<String>,
    #[serde(default)]
    left: Vec<TransitionFile>,
    #[serde(default)]
    right: Vec<TransitionFile>,
    #[serde(default)]
    stop: Vec<StopFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    word: String,
    automaton: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DependencyFile {
    head: String,
    rel: String,
    dep: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexicalStartFile {
    rel: String,
    word: String,
    automaton: String,
    state: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootStartFile {
    word: String,
    automaton: String,
    state: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

fn default_penalty() -> Cost {
    Cost::new(DEFAULT_UNKNOWN_WORD_PENALTY)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    relations: Vec<String>,
    automata: Vec<AutomatonFile>,
    lexicon: Vec<LexiconFile>,
    #[serde(default)]
    dependency: Vec<DependencyFile>,
    #[serde(default)]
    lexical_start: Vec<LexicalStartFile>,
    #[serde(default)]
    root_start: Vec<RootStartFile>,
    mode: ModeFile,
    #[serde(with = "super::cost", default = "default_penalty")]
    unknown_word_penalty: Cost,
}

fn transition(t: TransitionFile) -> TransitionDef {
    TransitionDef { from: t.from, rel: t.rel, to: t.to, cost: t.cost }
}

fn transition_file(t: &TransitionDef) -> TransitionFile {
    TransitionFile { from: t.from.clone(), rel: t.rel.clone(), to: t.to.clone(), cost: t.cost }
}

impl From<ModelFile> for ModelDef {
    fn from(f: ModelFile) -> Self {
        ModelDef {
            mode: match f.mode {
                ModeFile::Probabilistic => Mode::Probabilistic,
                ModeFile::Generic => Mode::Generic,
            },
            unknown_word_penalty: f.unknown_word_penalty,
            relations: f.relations,
            automata: f
                .automata
                .into_iter()
                .map(|a| AutomatonDef {
                    id: a.id,
                    states: a.states,
                    left: a.left.into_iter().map(transition).collect(),
                    right: a.right.into_iter().map(transition).collect(),
                    stop: a.stop.into_iter().map(|s| StopDef { state: s.state, cost: s.cost }).collect(),
                })
                .collect(),
            lexicon: f.lexicon.into_iter().map(|l| LexiconDef { word: l.word, automaton: l.automaton }).collect(),
            dependency: f
                .dependency
                .into_iter()
                .map(|d| DependencyDef { head: d.head, rel: d.rel, dep: d.dep, cost: d.cost })
                .collect(),
            lexical_start: f
                .lexical_start
                .into_iter()
                .map(|l| LexicalStartDef { rel: l.rel, word: l.word, automaton: l.automaton, state: l.state, cost: l.cost })
                .collect(),
            root_start: f
                .root_start
                .into_iter()
                .map(|r| RootStartDef { word: r.word, automaton: r.automaton, state: r.state, cost: r.cost })
                .collect(),
        }
    }
}

impl From<&ModelDef> for ModelFile {
    fn from(d: &ModelDef) -> Self {
        ModelFile {
            relations: d.relations.clone(),
            automata: d
                .automata
                .iter()
                .map(|a| AutomatonFile {
                    id: a.id.clone(),
                    states: a.states.clone(),
                    left: a.left.iter().map(transition_file).collect(),
                    right: a.right.iter().map(transition_file).collect(),
                    stop: a.stop.iter().map(|s| StopFile { state: s.state.clone(), cost: s.cost }).collect(),
                })
                .collect(),
            lexicon: d.lexicon.iter().map(|l| LexiconFile { word: l.word.clone(), automaton: l.automaton.clone() }).collect(),
            dependency: d
                .dependency
                .iter()
                .map(|x| DependencyFile { head: x.head.clone(), rel: x.rel.clone(), dep: x.dep.clone(), cost: x.cost })
                .collect(),
            lexical_start: d
                .lexical_start
                .iter()
                .map(|x| LexicalStartFile {
                    rel: x.rel.clone(),
                    word: x.word.clone(),
                    automaton: x.automaton.clone(),
                    state: x.state.clone(),
                    cost: x.cost,
                })
                .collect(),
            root_start: d
                .root_start
                .iter()
                .map(|x| RootStartFile { word: x.word.clone(), automaton: x.automaton.clone(), state: x.state.clone(), cost: x.cost })
                .collect(),
            mode: match d.mode {
                Mode::Probabilistic => ModeFile::Probabilistic,
                Mode::Generic => ModeFile::Generic,
            },
            unknown_word_penalty: d.unknown_word_penalty,
        }
    }
}

/// Parses a model document without validating it.
pub fn parse_model(text: &str) -> serde_json::Result<ModelDef> {
    serde_json::from_str::<ModelFile>(text).map(ModelDef::from)
}

/// Pretty JSON of the canonicalized model, newline terminated.
pub fn model_to_string(def: &ModelDef) -> String {
    let mut d = def.clone();
    d.canonicalize();
    let mut s = serde_json::to_string_pretty(&ModelFile::from(&d)).expect("model serializes");
    s.push('\n');
    s
}
