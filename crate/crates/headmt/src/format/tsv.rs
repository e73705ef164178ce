//! Tab-separated choice statistics. Context and event keys are the choice's
//! fields joined by single spaces.

use anyhow::{anyhow, bail, Context};

use headmt_core::train::{Choice, ChoiceCounts, ChoiceFamily, DistanceAccumulator};

fn split_key(key: &str) -> Vec<String> {
    if key.is_empty() {
        Vec::new()
    } else {
        key.split(' ').map(String::from).collect()
    }
}

fn choice(family: &str, ctx: &str, event: &str) -> anyhow::Result<Choice> {
    let family: ChoiceFamily = family.parse().map_err(anyhow::Error::msg)?;
    Ok(Choice { family, context: split_key(ctx), event: split_key(event) })
}

fn number(field: &str, name: &str) -> anyhow::Result<f64> {
    let v: f64 = field.parse().with_context(|| format!("bad {name} {field:?}"))?;
    if !v.is_finite() || v < 0.0 {
        bail!("{name} must be a finite non-negative number, got {field:?}");
    }
    Ok(v)
}

/// Lines that are blank or start with `#` are skipped.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.split('\t').collect()))
}

/// `family  context  event  n_pos  n_neg`
pub fn parse_counts(text: &str) -> anyhow::Result<ChoiceCounts> {
    let mut counts = ChoiceCounts::new();
    for (n, f) in records(text) {
        let mut go = || -> anyhow::Result<()> {
            let [fam, ctx, ev, pos, neg] = f[..] else {
                return Err(anyhow!("expected 5 tab-separated fields, found {}", f.len()));
            };
            counts.add(&choice(fam, ctx, ev)?, number(pos, "n_pos")?, number(neg, "n_neg")?);
            Ok(())
        };
        go().with_context(|| format!("line {n}"))?;
    }
    Ok(counts)
}

pub fn counts_to_string(counts: &ChoiceCounts) -> String {
    let mut s = String::new();
    for (c, p, n) in counts.iter() {
        s.push_str(&format!("{}\t{}\t{}\t{p}\t{n}\n", c.family, c.context_key(), c.event_key()));
    }
    s
}

/// `family  context  event  d`, one line per sample. An optional fifth
/// field gives the number of samples `d` is the mean of.
pub fn parse_distances(text: &str) -> anyhow::Result<DistanceAccumulator> {
    let mut acc = DistanceAccumulator::new();
    for (n, f) in records(text) {
        let mut go = || -> anyhow::Result<()> {
            let (fam, ctx, ev, d, k) = match f[..] {
                [fam, ctx, ev, d] => (fam, ctx, ev, d, 1),
                [fam, ctx, ev, d, k] => (fam, ctx, ev, d, k.parse::<u64>().with_context(|| format!("bad count {k:?}"))?),
                _ => return Err(anyhow!("expected 4 or 5 tab-separated fields, found {}", f.len())),
            };
            let d = number(d, "distance")?;
            acc.add_sum(&choice(fam, ctx, ev)?, d * k as f64, k);
            Ok(())
        };
        go().with_context(|| format!("line {n}"))?;
    }
    Ok(acc)
}

/// One line per choice with its mean distance and sample count.
pub fn distances_to_string(acc: &DistanceAccumulator) -> String {
    let mut s = String::new();
    for (c, sum, n) in acc.iter() {
        if n > 0 {
            let d = sum / n as f64;
            s.push_str(&format!("{}\t{}\t{}\t{d}\t{n}\n", c.family, c.context_key(), c.event_key()));
        }
    }
    s
}
