//! Bilingual lexicon files.

use serde::{Deserialize, Serialize};

use headmt_core::transfer::{BilingualEntry, BilingualLexicon, ContextCost, NullEntry};
use headmt_core::{Cost, NodeId};

use super::graph::GraphFile;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextFile {
    parent: String,
    rel: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    id: String,
    word: String,
    source: GraphFile,
    primary: u32,
    target: GraphFile,
    #[serde(default)]
    map: Vec<(u32, u32)>,
    #[serde(with = "super::cost")]
    cost: Cost,
    #[serde(default)]
    context: Vec<ContextFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NullFile {
    word: String,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BilexFile {
    entries: Vec<EntryFile>,
    #[serde(default)]
    nulls: Vec<NullFile>,
}

impl From<BilexFile> for BilingualLexicon {
    fn from(f: BilexFile) -> Self {
        BilingualLexicon {
            entries: f
                .entries
                .into_iter()
                .map(|e| BilingualEntry {
                    id: e.id,
                    word: e.word,
                    source: e.source.into(),
                    primary: NodeId(e.primary),
                    target: e.target.into(),
                    map: e.map.into_iter().map(|(h, g)| (NodeId(h), NodeId(g))).collect(),
                    cost: e.cost,
                    context: e.context.into_iter().map(|c| ContextCost { parent: c.parent, rel: c.rel, cost: c.cost }).collect(),
                })
                .collect(),
            nulls: f.nulls.into_iter().map(|n| NullEntry { word: n.word, cost: n.cost }).collect(),
        }
    }
}

impl From<&BilingualLexicon> for BilexFile {
    fn from(l: &BilingualLexicon) -> Self {
        BilexFile {
            entries: l
                .entries
                .iter()
                .map(|e| EntryFile {
                    id: e.id.clone(),
                    word: e.word.clone(),
                    source: (&e.source).into(),
                    primary: e.primary.0,
                    target: (&e.target).into(),
                    map: e.map.iter().map(|(h, g)| (h.0, g.0)).collect(),
                    cost: e.cost,
                    context: e.context.iter().map(|c| ContextFile { parent: c.parent.clone(), rel: c.rel.clone(), cost: c.cost }).collect(),
                })
                .collect(),
            nulls: l.nulls.iter().map(|n| NullFile { word: n.word.clone(), cost: n.cost }).collect(),
        }
    }
}

pub fn parse_bilex(text: &str) -> serde_json::Result<BilingualLexicon> {
    serde_json::from_str::<BilexFile>(text).map(Into::into)
}

/// Pretty JSON with entries sorted by id, fragments and maps sorted, and
/// nulls sorted by word.
pub fn bilex_to_string(lexicon: &BilingualLexicon) -> String {
    let mut l = lexicon.clone();
    l.entries.sort_by(|a, b| a.id.cmp(&b.id));
    for e in &mut l.entries {
        for g in [&mut e.source, &mut e.target] {
            g.nodes.sort();
            g.arcs.sort();
        }
        e.map.sort();
        e.context.sort_by(|a, b| (&a.parent, &a.rel).cmp(&(&b.parent, &b.rel)));
    }
    l.nulls.sort_by(|a, b| a.word.cmp(&b.word));
    let mut s = serde_json::to_string_pretty(&BilexFile::from(&l)).expect("lexicon serializes");
    s.push('\n');
    s
}
