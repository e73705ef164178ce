//! Line-at-a-time processing with per-line error reporting.

use std::io::{BufRead, Write};

use rayon::prelude::*;

/// Applies `f` to every input line, writing one output line each. A failed
/// line is reported on `err` with its 1-based number and yields an empty
/// output line. Returns the number of failed lines.
pub fn process<F>(input: impl BufRead, out: &mut dyn Write, err: &mut dyn Write, parallel: usize, f: F) -> anyhow::Result<usize>
where
    F: Fn(&str) -> anyhow::Result<String> + Sync,
{
    let mut failed = 0;
    let mut emit = |n: usize, r: anyhow::Result<String>, out: &mut dyn Write| -> std::io::Result<()> {
        match r {
            Ok(s) => writeln!(out, "{s}"),
            Err(e) => {
                failed += 1;
                writeln!(err, "line {n}: {e:#}")?;
                writeln!(out)
            }
        }
    };
    if parallel > 1 {
        let lines: Vec<String> = input.lines().collect::<Result<_, _>>()?;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(parallel).build()?;
        let results: Vec<anyhow::Result<String>> = pool.install(|| lines.par_iter().map(|l| f(l)).collect());
        for (i, r) in results.into_iter().enumerate() {
            emit(i + 1, r, out)?;
        }
    } else {
        for (i, line) in input.lines().enumerate() {
            emit(i + 1, f(&line?), out)?;
            out.flush()?;
        }
    }
    Ok(failed)
}

/// Splits on ASCII whitespace only.
pub fn tokens(line: &str) -> Vec<&str> {
    line.split_ascii_whitespace().collect()
}
