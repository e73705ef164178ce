//! Pipeline configuration files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use headmt_core::pipeline::{Component, Pipeline, PipelineOptions};
use headmt_core::train::{ChoiceFamily, CostTable};

use crate::format;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub component: String,
    pub path: PathBuf,
}

/// Paths are relative to the configuration file's directory.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub source: PathBuf,
    pub target: PathBuf,
    pub bilex: PathBuf,
    #[serde(default)]
    pub overlays: Vec<Overlay>,
    #[serde(default = "one")]
    pub nbest: usize,
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

pub fn component(name: &str) -> anyhow::Result<Component> {
    Component::ALL.into_iter().find(|c| c.name() == name).with_context(|| {
        let names: Vec<&str> = Component::ALL.iter().map(|c| c.name()).collect();
        format!("unknown component {name:?}, expected one of {}", names.join(", "))
    })
}

/// Families a component's table may price.
pub fn families(c: Component) -> &'static [ChoiceFamily] {
    use ChoiceFamily::*;
    match c {
        Component::Lexicon => &[Xfer, Null],
        Component::Source | Component::Target => &[Root, Left, Right, Stop, Dep, Lex, Unk],
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut c: PipelineConfig = serde_json::from_str(&text).with_context(|| format!("{}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        c.source = dir.join(&c.source);
        c.target = dir.join(&c.target);
        c.bilex = dir.join(&c.bilex);
        for o in &mut c.overlays {
            o.path = dir.join(&o.path);
        }
        Ok(c)
    }

    pub fn pipeline(&self) -> anyhow::Result<Pipeline> {
        let (src, _) = format::load_model(&self.source)?;
        let (tgt, _) = format::load_model(&self.target)?;
        let lex = format::load_bilex(&self.bilex)?;
        let options = PipelineOptions { nbest: self.nbest.max(1), ..PipelineOptions::default() };
        let p = Pipeline::with_options(&src, &tgt, lex, options)?;
        let mut tables: [Option<CostTable>; 3] = [None, None, None];
        for o in &self.overlays {
            let c = component(&o.component)?;
            let t = format::load_table(&o.path)?;
            let allowed = families(c);
            if let Some((choice, _)) = t.entries().find(|(ch, _)| !allowed.contains(&ch.family)) {
                bail!("{}: {} choice {} cannot price the {} component", o.path.display(), choice.family, choice, c.name());
            }
            let slot = &mut tables[c as usize];
            match slot {
                Some(acc) => {
                    acc.extend(&t);
                    acc.backoff = t.backoff;
                    acc.default = t.default;
                }
                None => *slot = Some(t),
            }
        }
        if tables.iter().all(Option::is_none) {
            return Ok(p);
        }
        let [s, l, t] = &tables;
        Ok(p.overlay(s.as_ref(), l.as_ref(), t.as_ref())?)
    }
}
