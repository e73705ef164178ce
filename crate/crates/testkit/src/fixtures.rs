//! Hand-built models, lexicons and corpora.

use headmt_core::model::{AutomatonDef, Mode, ModelDef};
use headmt_core::transfer::{BilingualEntry, BilingualLexicon};
use headmt_core::UnorderedDependencyGraph;

/// Builds a fragment from `(id, word)` nodes (empty word = unlabeled) and
/// `(from, rel, to)` arcs.
pub fn fragment(nodes: &[(u32, &str)], arcs: &[(u32, &str, u32)]) -> UnorderedDependencyGraph {
    let mut g = UnorderedDependencyGraph::new();
    for &(id, w) in nodes {
        g.add_node(id, (!w.is_empty()).then_some(w));
    }
    for &(f, r, t) in arcs {
        g.add_arc(f, r, t);
    }
    g
}

/// One-to-one entry consuming the arc from the parent: `_ -rel-> word`
/// becomes `_ -trel-> tword`.
pub fn arc_entry(id: &str, word: &str, rel: &str, tword: &str, trel: &str, cost: f64) -> BilingualEntry {
    BilingualEntry::new(id, word, fragment(&[(0, ""), (1, word)], &[(0, rel, 1)]), 1, fragment(&[(0, ""), (1, tword)], &[(0, trel, 1)]))
        .map(0, 0)
        .map(1, 1)
        .cost(cost)
}

/// One-to-one entry on a lone node.
pub fn word_entry(id: &str, word: &str, tword: &str, cost: f64) -> BilingualEntry {
    BilingualEntry::new(id, word, fragment(&[(0, word)], &[]), 0, fragment(&[(0, tword)], &[])).map(0, 0).cost(cost)
}

/// Two states; accepts (aⁿ, bⁿ) with probability 0.5ⁿ⁺¹.
pub fn ab_automaton() -> AutomatonDef {
    let ln2 = std::f64::consts::LN_2;
    AutomatonDef::new("ab", &["q0", "q1"]).left("q0", "a", "q1", ln2).right("q1", "b", "q0", 0.0).stop("q0", ln2)
}

/// A one-word head `h` running [`ab_automaton`], with leaf words `a` and
/// `b` as its a- and b-dependents. Probabilistic.
pub fn fixture_ab() -> ModelDef {
    ModelDef::new(Mode::Probabilistic)
        .relations(&["a", "b"])
        .automaton(ab_automaton())
        .automaton(AutomatonDef::new("leaf", &["s0"]).stop("s0", 0.0))
        .word("h", "ab")
        .word("a", "leaf")
        .word("b", "leaf")
        .dep("h", "a", "a", 0.0)
        .dep("h", "b", "b", 0.0)
        .lex_start("a", "a", "leaf", "s0", 0.0)
        .lex_start("b", "b", "leaf", "s0", 0.0)
        .root("h", "ab", "q0", 0.0)
}

/// Accepts exactly the pairs (x, reverse x) over {x, y, z}: the left
/// sequence, read outward from the head, mirrors the right one.
pub fn palindrome_automaton() -> AutomatonDef {
    let mut a = AutomatonDef::new("pal", &["p0", "px", "py", "pz"]).stop("p0", 0.0);
    for (s, q) in [("x", "px"), ("y", "py"), ("z", "pz")] {
        a = a.left("p0", s, q, 0.0).right(q, s, "p0", 0.0);
    }
    a
}

fn en_defs(def: ModelDef) -> ModelDef {
    def.relations(&["mod", "obj", "pobj"])
        .automaton(AutomatonDef::new("leaf", &["l0"]).stop("l0", 0.0))
        .automaton(AutomatonDef::new("noun", &["n0"]).left("n0", "mod", "n0", 0.7).right("n0", "mod", "n0", 0.4).stop("n0", 0.2))
        .automaton(AutomatonDef::new("prep", &["p0", "p1"]).right("p0", "pobj", "p1", 0.1).stop("p1", 0.0))
        .automaton(
            AutomatonDef::new("verb", &["v0", "v1"]).right("v0", "mod", "v0", 0.9).right("v0", "obj", "v1", 0.2).stop("v1", 0.1),
        )
        .word("cheap", "leaf")
        .word("boston", "leaf")
        .word("flights", "noun")
        .word("to", "prep")
        .word("show", "verb")
        .dep("flights", "mod", "cheap", 1.0)
        .dep("flights", "mod", "to", 1.5)
        .dep("to", "pobj", "boston", 0.5)
        .dep("show", "obj", "flights", 0.8)
        .dep("show", "mod", "to", 1.2)
        .lex_start("mod", "cheap", "leaf", "l0", 0.0)
        .lex_start("mod", "to", "prep", "p0", 0.2)
        .lex_start("pobj", "boston", "leaf", "l0", 0.1)
        .lex_start("obj", "flights", "noun", "n0", 0.3)
        .root("flights", "noun", "n0", 1.0)
        .root("show", "verb", "v0", 0.5)
}

/// Small English model. "cheap flights to boston" has one tree, costing
/// 5.7 in total.
pub fn fixture_en() -> ModelDef {
    en_defs(ModelDef::new(Mode::Generic))
}

/// "show flights to boston": "to" may attach to the verb or the noun.
pub const EN_AMBIG_SENTENCE: &str = "show flights to boston";

/// [`fixture_en`] in probabilistic form, with both attachments of "to"
/// possible. Every distribution sums to one.
pub fn fixture_en_ambig() -> ModelDef {
    let ln = |p: f64| -p.ln();
    ModelDef::new(Mode::Probabilistic)
        .relations(&["mod", "obj", "pobj"])
        .automaton(AutomatonDef::new("leaf", &["l0"]).stop("l0", 0.0))
        .automaton(
            AutomatonDef::new("noun", &["n0"]).left("n0", "mod", "n0", ln(0.2)).right("n0", "mod", "n0", ln(0.3)).stop("n0", ln(0.5)),
        )
        .automaton(AutomatonDef::new("prep", &["p0", "p1"]).right("p0", "pobj", "p1", 0.0).stop("p1", 0.0))
        .automaton(
            AutomatonDef::new("verb", &["v0", "v1"])
                .right("v0", "mod", "v0", ln(0.4))
                .right("v0", "obj", "v1", ln(0.6))
                .right("v1", "mod", "v1", ln(0.1))
                .stop("v1", ln(0.9)),
        )
        .word("cheap", "leaf")
        .word("boston", "leaf")
        .word("flights", "noun")
        .word("to", "prep")
        .word("show", "verb")
        .dep("flights", "mod", "cheap", ln(0.6))
        .dep("flights", "mod", "to", ln(0.4))
        .dep("to", "pobj", "boston", 0.0)
        .dep("show", "obj", "flights", 0.0)
        .dep("show", "mod", "to", 0.0)
        .lex_start("mod", "cheap", "leaf", "l0", 0.0)
        .lex_start("mod", "to", "prep", "p0", 0.0)
        .lex_start("pobj", "boston", "leaf", "l0", 0.0)
        .lex_start("obj", "flights", "noun", "n0", 0.0)
        .root("flights", "noun", "n0", ln(0.7))
        .root("show", "verb", "v0", ln(0.3))
}

/// French target model: adjectives follow the noun, closer to it than
/// prepositional modifiers.
pub fn fixture_fr_target() -> ModelDef {
    ModelDef::new(Mode::Generic)
        .relations(&["adj", "mod", "pobj"])
        .automaton(AutomatonDef::new("leaf", &["l0"]).stop("l0", 0.0))
        .automaton(
            AutomatonDef::new("nom", &["f0", "f1"])
                .right("f0", "mod", "f0", 0.2)
                .right("f0", "adj", "f1", 0.1)
                .stop("f0", 0.1)
                .stop("f1", 0.1),
        )
        .automaton(AutomatonDef::new("prep", &["p0", "p1"]).right("p0", "pobj", "p1", 0.1).stop("p1", 0.0))
        .word("vols", "nom")
        .word("pas-chers", "leaf")
        .word("à", "prep")
        .word("boston", "leaf")
        .word("bostonward", "leaf")
        .dep("vols", "adj", "pas-chers", 0.3)
        .dep("vols", "mod", "à", 0.4)
        .dep("à", "pobj", "boston", 0.2)
        .dep("vols", "mod", "bostonward", 0.5)
        .lex_start("adj", "pas-chers", "leaf", "l0", 0.0)
        .lex_start("mod", "à", "prep", "p0", 0.0)
        .lex_start("pobj", "boston", "leaf", "l0", 0.0)
        .lex_start("mod", "bostonward", "leaf", "l0", 0.0)
        .root("vols", "nom", "f0", 0.0)
}

/// English to French, with an idiom entry for "to boston" competing with
/// the compositional entries.
pub fn fixture_fr_lexicon() -> BilingualLexicon {
    let idiom = BilingualEntry::new(
        "to+boston",
        "to",
        fragment(&[(0, ""), (1, "to"), (2, "boston")], &[(0, "mod", 1), (1, "pobj", 2)]),
        1,
        fragment(&[(0, ""), (1, "bostonward")], &[(0, "mod", 1)]),
    )
    .map(0, 0)
    .map(1, 1)
    .map(2, 1)
    .cost(0.9);
    BilingualLexicon {
        entries: vec![
            word_entry("flights", "flights", "vols", 0.1),
            arc_entry("cheap", "cheap", "mod", "pas-chers", "adj", 0.2),
            arc_entry("to", "to", "mod", "à", "mod", 0.2),
            arc_entry("boston", "boston", "pobj", "boston", "pobj", 0.1),
            idiom,
        ],
        nulls: Vec::new(),
    }
}

pub const FR_SENTENCE: &str = "cheap flights to boston";
pub const FR_EXPECTED: &str = "vols pas-chers à boston";

/// A translation phenomenon: models, lexicon, one sentence and its expected
/// translation.
#[derive(Clone, Debug)]
pub struct Phenomenon {
    pub name: &'static str,
    pub source: ModelDef,
    pub target: ModelDef,
    pub lexicon: BilingualLexicon,
    pub sentence: &'static str,
    pub expected: &'static str,
}

fn leafy(mut def: ModelDef, words: &[&str]) -> ModelDef {
    def = def.automaton(AutomatonDef::new("leaf", &["l0"]).stop("l0", 0.0));
    for w in words {
        def = def.word(w, "leaf");
    }
    def
}

/// "flights take off" → "vols décollent": two source words, one target word.
pub fn phenomenon_idiom() -> Phenomenon {
    let source = leafy(ModelDef::new(Mode::Generic).relations(&["subj", "prt"]), &["flights", "off"])
        .automaton(AutomatonDef::new("verb", &["v0", "v1"]).left("v0", "subj", "v1", 0.1).right("v0", "prt", "v0", 0.1).stop("v1", 0.0))
        .word("take", "verb")
        .dep("take", "subj", "flights", 0.2)
        .dep("take", "prt", "off", 0.2)
        .lex_start("subj", "flights", "leaf", "l0", 0.0)
        .lex_start("prt", "off", "leaf", "l0", 0.0)
        .root("take", "verb", "v0", 0.0);
    let target = leafy(ModelDef::new(Mode::Generic).relations(&["subj"]), &["vols"])
        .automaton(AutomatonDef::new("verb", &["v0", "v1"]).left("v0", "subj", "v1", 0.1).stop("v1", 0.0))
        .word("décollent", "verb")
        .dep("décollent", "subj", "vols", 0.1)
        .lex_start("subj", "vols", "leaf", "l0", 0.0)
        .root("décollent", "verb", "v0", 0.0);
    let take_off = BilingualEntry::new(
        "take+off",
        "take",
        fragment(&[(0, "take"), (1, "off")], &[(0, "prt", 1)]),
        0,
        fragment(&[(0, "décollent")], &[]),
    )
    .map(0, 0)
    .map(1, 0)
    .cost(0.3);
    let lexicon = BilingualLexicon {
        entries: vec![take_off, arc_entry("flights", "flights", "subj", "vols", "subj", 0.1)],
        nulls: Vec::new(),
    };
    Phenomenon { name: "many-to-one", source, target, lexicon, sentence: "flights take off", expected: "vols décollent" }
}

/// "nonstop flights" → "vols sans escale": one source word, two target
/// words.
pub fn phenomenon_one_to_many() -> Phenomenon {
    let source = leafy(ModelDef::new(Mode::Generic).relations(&["mod"]), &["nonstop"])
        .automaton(AutomatonDef::new("noun", &["n0"]).left("n0", "mod", "n0", 0.1).stop("n0", 0.0))
        .word("flights", "noun")
        .dep("flights", "mod", "nonstop", 0.1)
        .lex_start("mod", "nonstop", "leaf", "l0", 0.0)
        .root("flights", "noun", "n0", 0.0);
    let target = leafy(ModelDef::new(Mode::Generic).relations(&["mod", "pobj"]), &["escale"])
        .automaton(AutomatonDef::new("nom", &["n0"]).right("n0", "mod", "n0", 0.1).stop("n0", 0.0))
        .automaton(AutomatonDef::new("prep", &["p0", "p1"]).right("p0", "pobj", "p1", 0.0).stop("p1", 0.0))
        .word("vols", "nom")
        .word("sans", "prep")
        .dep("vols", "mod", "sans", 0.2)
        .dep("sans", "pobj", "escale", 0.1)
        .lex_start("mod", "sans", "prep", "p0", 0.0)
        .lex_start("pobj", "escale", "leaf", "l0", 0.0)
        .root("vols", "nom", "n0", 0.0);
    let nonstop = BilingualEntry::new(
        "nonstop",
        "nonstop",
        fragment(&[(0, ""), (1, "nonstop")], &[(0, "mod", 1)]),
        1,
        fragment(&[(0, ""), (1, "sans"), (2, "escale")], &[(0, "mod", 1), (1, "pobj", 2)]),
    )
    .map(0, 0)
    .map(1, 1)
    .cost(0.2);
    let lexicon = BilingualLexicon { entries: vec![word_entry("flights", "flights", "vols", 0.1), nonstop], nulls: Vec::new() };
    Phenomenon { name: "one-to-many", source, target, lexicon, sentence: "nonstop flights", expected: "vols sans escale" }
}

/// "mary likes films" → "films plaît à marie": subject and object trade
/// places.
pub fn phenomenon_argument_switch() -> Phenomenon {
    let source = leafy(ModelDef::new(Mode::Generic).relations(&["subj", "obj"]), &["mary", "films"])
        .automaton(AutomatonDef::new("verb", &["v0", "v1"]).right("v0", "obj", "v1", 0.1).left("v1", "subj", "v1", 0.1).stop("v1", 0.0))
        .word("likes", "verb")
        .dep("likes", "subj", "mary", 0.1)
        .dep("likes", "obj", "films", 0.1)
        .lex_start("subj", "mary", "leaf", "l0", 0.0)
        .lex_start("obj", "films", "leaf", "l0", 0.0)
        .root("likes", "verb", "v0", 0.0);
    let target = leafy(ModelDef::new(Mode::Generic).relations(&["subj", "iobj", "pobj"]), &["marie", "films"])
        .automaton(
            AutomatonDef::new("verb", &["v0", "v1"]).right("v0", "iobj", "v1", 0.1).left("v1", "subj", "v1", 0.1).stop("v1", 0.0),
        )
        .automaton(AutomatonDef::new("prep", &["p0", "p1"]).right("p0", "pobj", "p1", 0.0).stop("p1", 0.0))
        .word("plaît", "verb")
        .word("à", "prep")
        .dep("plaît", "subj", "films", 0.1)
        .dep("plaît", "iobj", "à", 0.1)
        .dep("à", "pobj", "marie", 0.1)
        .lex_start("subj", "films", "leaf", "l0", 0.0)
        .lex_start("iobj", "à", "prep", "p0", 0.0)
        .lex_start("pobj", "marie", "leaf", "l0", 0.0)
        .root("plaît", "verb", "v0", 0.0);
    let likes = BilingualEntry::new(
        "likes",
        "likes",
        fragment(&[(0, "likes"), (1, ""), (2, "")], &[(0, "subj", 1), (0, "obj", 2)]),
        0,
        fragment(&[(0, "plaît"), (1, ""), (2, ""), (3, "à")], &[(0, "subj", 2), (0, "iobj", 3), (3, "pobj", 1)]),
    )
    .map(0, 0)
    .map(1, 1)
    .map(2, 2)
    .cost(0.2);
    let lexicon = BilingualLexicon {
        entries: vec![likes, word_entry("mary", "mary", "marie", 0.1), word_entry("films", "films", "films", 0.1)],
        nulls: Vec::new(),
    };
    Phenomenon { name: "argument-switching", source, target, lexicon, sentence: "mary likes films", expected: "films plaît à marie" }
}

/// "john just left" → "jean vient-de partir": the adverb becomes the head.
pub fn phenomenon_head_switch() -> Phenomenon {
    let source = leafy(ModelDef::new(Mode::Generic).relations(&["subj", "mod"]), &["john", "just"])
        .automaton(AutomatonDef::new("verb", &["v0", "v1"]).left("v0", "subj", "v1", 0.1).left("v1", "mod", "v1", 0.1).stop("v1", 0.0))
        .word("left", "verb")
        .dep("left", "subj", "john", 0.1)
        .dep("left", "mod", "just", 0.1)
        .lex_start("subj", "john", "leaf", "l0", 0.0)
        .lex_start("mod", "just", "leaf", "l0", 0.0)
        .root("left", "verb", "v0", 0.0);
    let target = leafy(ModelDef::new(Mode::Generic).relations(&["subj", "xcomp"]), &["jean", "partir"])
        .automaton(
            AutomatonDef::new("verb", &["v0", "v1"]).right("v0", "xcomp", "v1", 0.1).left("v1", "subj", "v1", 0.1).stop("v1", 0.0),
        )
        .word("vient-de", "verb")
        .dep("vient-de", "subj", "jean", 0.1)
        .dep("vient-de", "xcomp", "partir", 0.1)
        .lex_start("subj", "jean", "leaf", "l0", 0.0)
        .lex_start("xcomp", "partir", "leaf", "l0", 0.0)
        .root("vient-de", "verb", "v0", 0.0);
    let just = BilingualEntry::new(
        "just",
        "just",
        fragment(&[(0, ""), (1, "just"), (2, "")], &[(0, "mod", 1), (0, "subj", 2)]),
        1,
        fragment(&[(0, ""), (1, "vient-de"), (2, "")], &[(1, "xcomp", 0), (1, "subj", 2)]),
    )
    .map(0, 0)
    .map(1, 1)
    .map(2, 2)
    .cost(0.2);
    let lexicon = BilingualLexicon {
        entries: vec![just, word_entry("left", "left", "partir", 0.1), word_entry("john", "john", "jean", 0.1)],
        nulls: Vec::new(),
    };
    Phenomenon { name: "head-switching", source, target, lexicon, sentence: "john just left", expected: "jean vient-de partir" }
}

pub fn phenomena() -> Vec<Phenomenon> {
    vec![phenomenon_idiom(), phenomenon_one_to_many(), phenomenon_argument_switch(), phenomenon_head_switch()]
}

/// Two competing translations of "big": `big#1` (gros) reads back as "fat",
/// `big#2` (grand) reads back as "big". Before training `big#1` wins where
/// both fit, i.e. under "house"; "homme" only takes "grand".
#[derive(Clone, Debug)]
pub struct Planted {
    pub english: ModelDef,
    pub french: ModelDef,
    pub forward: BilingualLexicon,
    pub backward: BilingualLexicon,
    /// Source sentences for reflexive training.
    pub corpus: Vec<&'static str>,
    /// Source sentences with reference translations.
    pub references: Vec<(&'static str, &'static str)>,
    /// The sentence whose translation shows which entry won.
    pub probe: &'static str,
    pub correct: &'static str,
    pub wrong: &'static str,
}

pub fn planted() -> Planted {
    let english = leafy(ModelDef::new(Mode::Generic).relations(&["mod"]), &["big", "fat"])
        .automaton(AutomatonDef::new("noun", &["n0"]).left("n0", "mod", "n0", 0.1).stop("n0", 0.1))
        .word("house", "noun")
        .word("man", "noun")
        .dep("house", "mod", "big", 0.2)
        .dep("house", "mod", "fat", 0.2)
        .dep("man", "mod", "big", 0.2)
        .dep("man", "mod", "fat", 0.2)
        .lex_start("mod", "big", "leaf", "l0", 0.0)
        .lex_start("mod", "fat", "leaf", "l0", 0.0)
        .root("house", "noun", "n0", 0.1)
        .root("man", "noun", "n0", 0.1);
    let french = leafy(ModelDef::new(Mode::Generic).relations(&["mod"]), &["gros", "grand"])
        .automaton(AutomatonDef::new("nom", &["n0"]).left("n0", "mod", "n0", 0.1).stop("n0", 0.1))
        .word("maison", "nom")
        .word("demeure", "nom")
        .word("homme", "nom")
        .dep("maison", "mod", "gros", 0.2)
        .dep("maison", "mod", "grand", 0.2)
        .dep("demeure", "mod", "gros", 0.2)
        .dep("demeure", "mod", "grand", 0.2)
        .dep("homme", "mod", "grand", 0.2)
        .lex_start("mod", "gros", "leaf", "l0", 0.0)
        .lex_start("mod", "grand", "leaf", "l0", 0.0)
        .root("maison", "nom", "n0", 0.1)
        .root("demeure", "nom", "n0", 0.1)
        .root("homme", "nom", "n0", 0.1);
    let forward = BilingualLexicon {
        entries: vec![
            arc_entry("big#1", "big", "mod", "gros", "mod", 0.5),
            arc_entry("big#2", "big", "mod", "grand", "mod", 0.6),
            word_entry("house#1", "house", "maison", 0.1),
            word_entry("house#2", "house", "demeure", 0.5),
            word_entry("man", "man", "homme", 0.1),
            arc_entry("fat", "fat", "mod", "gros", "mod", 0.5),
        ],
        nulls: Vec::new(),
    };
    let backward = BilingualLexicon {
        entries: vec![
            arc_entry("gros", "gros", "mod", "fat", "mod", 0.1),
            arc_entry("grand", "grand", "mod", "big", "mod", 0.1),
            word_entry("maison", "maison", "house", 0.1),
            word_entry("demeure", "demeure", "house", 0.1),
            word_entry("homme", "homme", "man", 0.1),
        ],
        nulls: Vec::new(),
    };
    Planted {
        english,
        french,
        forward,
        backward,
        corpus: vec!["big house", "big man"],
        references: vec![
            ("big house", "grand maison"),
            ("big house", "grand maison"),
            ("big house", "grand demeure"),
            ("big man", "grand homme"),
        ],
        probe: "big house",
        correct: "grand maison",
        wrong: "gros maison",
    }
}

pub fn tokens(s: &str) -> Vec<&str> {
    s.split_ascii_whitespace().collect()
}
