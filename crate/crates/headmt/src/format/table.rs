//! Cost tables as JSON.

use serde::{Deserialize, Serialize};

use headmt_core::train::{Backoff, Choice, ChoiceFamily, CostTable};
use headmt_core::Cost;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum BackoffFile {
    ContextDrop,
    None,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    family: String,
    context: Vec<String>,
    event: Vec<String>,
    #[serde(with = "super::cost")]
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    backoff: BackoffFile,
    #[serde(with = "super::cost")]
    default: Cost,
    entries: Vec<EntryFile>,
}

pub fn parse_table(text: &str) -> anyhow::Result<CostTable> {
    let f: TableFile = serde_json::from_str(text)?;
    let backoff = match f.backoff {
        BackoffFile::ContextDrop => Backoff::ContextDrop,
        BackoffFile::None => Backoff::None,
    };
    let mut t = CostTable::new(backoff, f.default);
    for e in f.entries {
        let family: ChoiceFamily = e.family.parse().map_err(anyhow::Error::msg)?;
        t.insert(Choice { family, context: e.context, event: e.event }, e.cost);
    }
    Ok(t)
}

pub fn table_to_string(t: &CostTable) -> String {
    let f = TableFile {
        backoff: match t.backoff {
            Backoff::ContextDrop => BackoffFile::ContextDrop,
            Backoff::None => BackoffFile::None,
        },
        default: t.default,
        entries: t
            .entries()
            .map(|(c, cost)| EntryFile {
                family: c.family.name().into(),
                context: c.context.clone(),
                event: c.event.clone(),
                cost,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&f).expect("table serializes");
    s.push('\n');
    s
}
