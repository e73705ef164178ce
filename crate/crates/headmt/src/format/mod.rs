//! File formats and their loaders.

pub mod bilex;
pub mod cost;
pub mod graph;
pub mod model;
pub mod table;
pub mod tsv;

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use log::warn;

use headmt_core::model::validate_model;
use headmt_core::train::{ChoiceCounts, CostTable, DistanceAccumulator};
use headmt_core::transfer::BilingualLexicon;
use headmt_core::{Model, ModelDef};

pub use bilex::{bilex_to_string, parse_bilex};
pub use graph::{graph_to_string, parse_graph, parse_tree, tree_to_string, GraphFile, TreeFile};
pub use model::{model_to_string, parse_model};
pub use table::{parse_table, table_to_string};
pub use tsv::{counts_to_string, distances_to_string, parse_counts, parse_distances};

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Parses without validating.
pub fn read_model_def(path: &Path) -> anyhow::Result<ModelDef> {
    parse_model(&read(path)?).with_context(|| format!("{}", path.display()))
}

/// Parses, validates and compiles. Structural violations are errors;
/// probability and reachability problems are logged.
pub fn load_model(path: &Path) -> anyhow::Result<(ModelDef, Model)> {
    let def = read_model_def(path)?;
    let report = validate_model(&def);
    let (hard, soft): (Vec<_>, Vec<_>) = report.violations.iter().partition(|v| v.kind.is_structural());
    for v in soft.into_iter().chain(&report.warnings) {
        warn!("{}: {}", path.display(), v.message);
    }
    if !hard.is_empty() {
        let msgs: Vec<&str> = hard.iter().map(|v| v.message.as_str()).collect();
        bail!("{}: invalid model: {}", path.display(), msgs.join("; "));
    }
    let model = Model::compile(&def).with_context(|| format!("{}", path.display()))?;
    Ok((def, model))
}

pub fn save_model(path: &Path, def: &ModelDef) -> anyhow::Result<()> {
    write(path, &model_to_string(def))
}

pub fn load_bilex(path: &Path) -> anyhow::Result<BilingualLexicon> {
    let l = parse_bilex(&read(path)?).with_context(|| format!("{}", path.display()))?;
    l.check().with_context(|| format!("{}", path.display()))?;
    Ok(l)
}

pub fn save_bilex(path: &Path, l: &BilingualLexicon) -> anyhow::Result<()> {
    write(path, &bilex_to_string(l))
}

pub fn load_table(path: &Path) -> anyhow::Result<CostTable> {
    parse_table(&read(path)?).with_context(|| format!("{}", path.display()))
}

pub fn save_table(path: &Path, t: &CostTable) -> anyhow::Result<()> {
    write(path, &table_to_string(t))
}

pub fn load_counts(path: &Path) -> anyhow::Result<ChoiceCounts> {
    parse_counts(&read(path)?).with_context(|| format!("{}", path.display()))
}

pub fn load_distances(path: &Path) -> anyhow::Result<DistanceAccumulator> {
    parse_distances(&read(path)?).with_context(|| format!("{}", path.display()))
}
