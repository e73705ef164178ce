//! The files under data/ are the testkit fixtures in file form. Run with
//! HEADMT_REGEN=1 to rewrite them.

use std::path::PathBuf;

use headmt::format::{bilex_to_string, model_to_string};
use headmt_testkit::fixtures::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn check(name: &str, text: String) {
    let path = data(name);
    if std::env::var_os("HEADMT_REGEN").is_some() {
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(on_disk, text, "{} is stale; rerun with HEADMT_REGEN=1", path.display());
}

#[test]
fn data_files_match_fixtures() {
    let p = planted();
    check("ab.json", model_to_string(&fixture_ab()));
    check("en.json", model_to_string(&fixture_en()));
    check("en-ambig.json", model_to_string(&fixture_en_ambig()));
    check("fr.json", model_to_string(&fixture_fr_target()));
    check("en-fr.bilex.json", bilex_to_string(&fixture_fr_lexicon()));
    check("planted/english.json", model_to_string(&p.english));
    check("planted/french.json", model_to_string(&p.french));
    check("planted/fwd.bilex.json", bilex_to_string(&p.forward));
    check("planted/bwd.bilex.json", bilex_to_string(&p.backward));
    check("planted/corpus.txt", p.corpus.iter().map(|s| format!("{s}\n")).collect());
    check("en.txt", format!("{FR_SENTENCE}\n"));
}
