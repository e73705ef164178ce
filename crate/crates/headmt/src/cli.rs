//! The `headmt` command line.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use headmt_core::analysis::{analyze_with, AnalysisOptions};
use headmt_core::generation::generate;
use headmt_core::model::{validate_model, DEFAULT_DEPTH_BOUND};
use headmt_core::pipeline::Translation;
use headmt_core::train::{
    estimate_discriminative, estimate_mean_distance, estimate_normalized_distance, estimate_probabilistic,
    reflexive_train, scope_name, Backoff, Method, ReflexiveOptions,
};
use headmt_core::Cost;

use crate::config::PipelineConfig;
use crate::format::{self, GraphFile, TreeFile};
use crate::lines::{process, tokens};
use crate::trace::TraceRecord;

#[derive(Parser, Debug)]
#[command(name = "headmt", version, about = "Head-automaton translation: analysis, transfer, generation and training")]
pub struct Cli {
    /// Worker threads for line-oriented commands; output keeps input order.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model or bilingual lexicon; exit 1 on violations.
    Validate {
        #[arg(long)]
        model: Vec<PathBuf>,
        #[arg(long)]
        bilex: Vec<PathBuf>,
    },
    /// Parse sentences from stdin, one per line.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        nbest: usize,
        /// Keep every edge instead of the cheapest per signature.
        #[arg(long)]
        no_prune: bool,
    },
    /// Order unordered dependency graphs from stdin, one JSON per line.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        trace: bool,
    },
    /// Translate source sentences from stdin.
    Translate {
        #[command(flatten)]
        setup: PipelineArgs,
        #[arg(long)]
        nbest: Option<usize>,
        #[arg(long)]
        trace: bool,
    },
    /// Draw derivations from a probabilistic model.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print each sampled tree as JSON instead of its string.
        #[arg(long)]
        tree: bool,
    },
    /// Estimate a cost table from a counts or distance file.
    Train {
        #[arg(long)]
        method: Method,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Unseen choices get the default cost instead of a backed-off mean.
        #[arg(long)]
        no_backoff: bool,
    },
    /// Train forward and backward cost tables from round trips of a corpus.
    ReflexiveTrain {
        #[arg(long)]
        fwd: PathBuf,
        #[arg(long)]
        bwd: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "meandist")]
        method: Method,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
    },
    /// Print the derivation cost of an ordered tree.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        tree: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long, conflicts_with_all = ["src_model", "tgt_model", "bilex"])]
    config: Option<PathBuf>,
    #[arg(long, requires_all = ["tgt_model", "bilex"])]
    src_model: Option<PathBuf>,
    #[arg(long)]
    tgt_model: Option<PathBuf>,
    #[arg(long)]
    bilex: Option<PathBuf>,
}

impl PipelineArgs {
    fn config(&self) -> anyhow::Result<PipelineConfig> {
        match (&self.config, &self.src_model, &self.tgt_model, &self.bilex) {
            (Some(c), ..) => PipelineConfig::load(c),
            (None, Some(s), Some(t), Some(b)) => Ok(PipelineConfig {
                source: s.clone(),
                target: t.clone(),
                bilex: b.clone(),
                overlays: Vec::new(),
                nbest: 1,
                trace: false,
                seed: 0,
            }),
            _ => bail!("give --config, or all of --src-model, --tgt-model and --bilex"),
        }
    }
}

fn cost_json(c: Cost) -> serde_json::Value {
    if c.is_finite() {
        json!(c.value())
    } else {
        json!("inf")
    }
}

fn to_line<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string(v)?)
}

fn translation_record(t: &Translation) -> serde_json::Value {
    let stages: Vec<TraceRecord> = t.stages.iter().map(TraceRecord::from).collect();
    json!({
        "tokens": t.tokens,
        "cost": cost_json(t.cost),
        "source_tree": TreeFile::from(&t.analysis.tree),
        "target_graph": GraphFile::from(&t.target_graph),
        "target_tree": TreeFile::from(&t.ordering.tree),
        "stages": stages,
    })
}

/// Runs one parsed command. Ok(false) means some input lines failed.
pub fn execute(cli: Cli, input: impl BufRead, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<bool> {
    let par = cli.parallel;
    match cli.command {
        Command::Validate { model, bilex } => validate(&model, &bilex, out),
        Command::Analyze { model, nbest, no_prune } => {
            let (_, m) = format::load_model(&model)?;
            let opts = AnalysisOptions { nbest: nbest.max(1), prune: !no_prune };
            let failed = process(input, out, err, par, |line| {
                let toks = tokens(line);
                let a = analyze_with(&m, &toks, opts)?;
                let ds: Vec<_> = a
                    .derivations
                    .iter()
                    .map(|d| json!({"cost": cost_json(d.cost), "tree": TreeFile::from(&d.tree)}))
                    .collect();
                to_line(&json!({"tokens": toks, "derivations": ds}))
            })?;
            Ok(failed == 0)
        }
        Command::Generate { model, trace } => {
            let (_, m) = format::load_model(&model)?;
            let failed = process(input, out, err, par, |line| {
                let g = format::parse_graph(line)?;
                let (toks, sol) = generate(&g, &m, true)?;
                if !trace {
                    return Ok(toks.join(" "));
                }
                let steps = sol.trace(&m);
                let added: Vec<_> = sol.added_arcs.iter().map(format::graph::ArcFile::from).collect();
                to_line(&json!({
                    "tokens": toks,
                    "cost": cost_json(sol.cost),
                    "tree": TreeFile::from(&sol.tree),
                    "added_arcs": added,
                    "positions": sol.positions.iter().map(|n| n.0).collect::<Vec<_>>(),
                    "apply_dependency_costs": sol.apply_dependency_costs,
                    "stages": [TraceRecord::new("generate", &steps, 0.0)],
                }))
            })?;
            Ok(failed == 0)
        }
        Command::Translate { setup, nbest, trace } => {
            let mut cfg = setup.config()?;
            if let Some(n) = nbest {
                cfg.nbest = n;
            }
            let trace = trace || cfg.trace;
            let p = cfg.pipeline()?;
            let failed = process(input, out, err, par, |line| {
                let toks = tokens(line);
                let start = Instant::now();
                let clock = || start.elapsed().as_secs_f64() * 1000.0;
                let t = p.translate_clocked(&toks, &clock).map_err(|f| f.error)?;
                if trace {
                    to_line(&translation_record(&t))
                } else {
                    Ok(t.tokens.join(" "))
                }
            })?;
            Ok(failed == 0)
        }
        Command::Sample { model, count, seed, tree } => {
            let (_, m) = format::load_model(&model)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ok = true;
            for i in 0..count {
                match m.sample_with(&mut rng, DEFAULT_DEPTH_BOUND) {
                    Ok(s) if tree => writeln!(out, "{}", format::tree_to_string(&s.tree))?,
                    Ok(s) => writeln!(out, "{}", s.tokens.join(" "))?,
                    Err(e @ headmt_core::Error::NotProbabilistic) => return Err(e.into()),
                    Err(e) => {
                        writeln!(err, "sample {}: {e}", i + 1)?;
                        writeln!(out)?;
                        ok = false;
                    }
                }
            }
            Ok(ok)
        }
        Command::Train { method, input: path, out: dest, no_backoff } => {
            let mut t = if method.uses_counts() {
                let counts = format::load_counts(&path)?;
                match method {
                    Method::Probabilistic => estimate_probabilistic(&counts),
                    _ => estimate_discriminative(&counts),
                }
            } else {
                let acc = format::load_distances(&path)?;
                match method {
                    Method::MeanDistance => estimate_mean_distance(&acc),
                    _ => estimate_normalized_distance(&acc),
                }
            };
            if no_backoff {
                t.backoff = Backoff::None;
            }
            format::save_table(&dest, &t)?;
            writeln!(out, "{} entries", t.len())?;
            Ok(true)
        }
        Command::ReflexiveTrain { fwd, bwd, corpus, method, out: dir, iterations } => {
            if method.uses_counts() {
                bail!("reflexive training needs a distance method (meandist or normdist), got {}", method.name());
            }
            let f = PipelineConfig::load(&fwd)?.pipeline()?;
            let b = PipelineConfig::load(&bwd)?.pipeline()?;
            let text = std::fs::read_to_string(&corpus).with_context(|| format!("cannot read {}", corpus.display()))?;
            let sentences: Vec<Vec<&str>> = text.lines().map(tokens).filter(|t| !t.is_empty()).collect();
            let r = reflexive_train(&f, &b, &sentences, ReflexiveOptions { method, iterations })?;
            std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for (&scope, acc) in &r.accumulators {
                let name = scope_name(scope);
                format::write(&dir.join(format!("{name}.tsv")), &format::distances_to_string(acc))?;
            }
            let tables = |prefix: &str, ct: &headmt_core::train::ComponentTables| -> anyhow::Result<()> {
                for (c, t) in &ct.tables {
                    format::save_table(&dir.join(format!("{prefix}.{}.json", c.name())), t)?;
                }
                Ok(())
            };
            tables("fwd", &r.forward)?;
            tables("bwd", &r.backward)?;
            let mut trips = String::new();
            let mean = r.round_trips.iter().map(|t| t.distance).sum::<f64>() / r.round_trips.len().max(1) as f64;
            for t in &r.round_trips {
                trips.push_str(&to_line(&json!({
                    "source": t.source, "forward": t.forward, "back": t.back, "distance": t.distance,
                }))?);
                trips.push('\n');
            }
            format::write(&dir.join("round_trips.jsonl"), &trips)?;
            writeln!(out, "{} sentences, mean round-trip distance {mean:.6}", r.round_trips.len())?;
            Ok(true)
        }
        Command::Score { model, tree } => {
            let (_, m) = format::load_model(&model)?;
            let text = std::fs::read_to_string(&tree).with_context(|| format!("cannot read {}", tree.display()))?;
            let t = format::parse_tree(&text).with_context(|| format!("{}", tree.display()))?;
            let c = m.derivation_cost(&t);
            if c.is_finite() {
                writeln!(out, "{}", c.value())?;
            } else {
                writeln!(out, "inf")?;
            }
            Ok(true)
        }
    }
}

fn validate(models: &[PathBuf], bilexes: &[PathBuf], out: &mut dyn Write) -> anyhow::Result<bool> {
    if models.is_empty() && bilexes.is_empty() {
        bail!("nothing to validate: give --model or --bilex");
    }
    let mut ok = true;
    for path in models {
        let def = format::read_model_def(path)?;
        let report = validate_model(&def);
        for v in &report.violations {
            writeln!(out, "{}: error: {}", path.display(), v.message)?;
        }
        for v in &report.warnings {
            writeln!(out, "{}: warning: {}", path.display(), v.message)?;
        }
        ok &= report.is_valid();
    }
    for path in bilexes {
        if let Err(e) = format::load_bilex(path) {
            writeln!(out, "{}: error: {e:#}", path.display())?;
            ok = false;
        }
    }
    if ok {
        writeln!(out, "ok")?;
    }
    Ok(ok)
}

/// Exit status: 0 on success, 1 on a hard error or a failed validation, 2
/// on a usage error. Per-line failures are reported but do not change it.
pub fn run<I, T>(argv: I, input: impl BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let is_validate = matches!(cli.command, Command::Validate { .. });
    match execute(cli, input, out, err) {
        Ok(true) => 0,
        Ok(false) if is_validate => 1,
        Ok(false) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
