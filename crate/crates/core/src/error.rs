use alloc::string::String;
use core::fmt;

use crate::graph::NodeId;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    EmptySentence,
    UnknownAutomaton(String),
    UnknownState { automaton: String, state: String },
    NotProbabilistic,
    /// Structural problems that prevent compiling a model definition.
    InvalidModel(String),
    DepthExceeded(usize),
    /// Analysis found no finite-cost derivation.
    NoParse,
    Unorderable { node: NodeId, word: String },
    DisconnectedOutput,
    UnlabeledNode(NodeId),
    InvalidGraph(String),
    InvalidEntry { id: String, reason: String },
    UntranslatableWord { node: NodeId, word: String },
    NoTiling,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySentence => f.write_str("empty sentence"),
            Error::UnknownAutomaton(a) => write!(f, "unknown automaton `{a}`"),
            Error::UnknownState { automaton, state } => {
                write!(f, "unknown state `{state}` of automaton `{automaton}`")
            }
            Error::NotProbabilistic => f.write_str("operation requires a probabilistic model"),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::DepthExceeded(d) => write!(f, "sampling exceeded depth bound {d}"),
            Error::NoParse => f.write_str("no finite-cost derivation"),
            Error::Unorderable { node, word } => {
                write!(f, "unorderable node {} ({word})", node.0)
            }
            Error::DisconnectedOutput => f.write_str("disconnected output"),
            Error::UnlabeledNode(n) => write!(f, "unlabeled node {}", n.0),
            Error::InvalidGraph(msg) => write!(f, "invalid graph: {msg}"),
            Error::InvalidEntry { id, reason } => {
                write!(f, "invalid bilingual entry `{id}`: {reason}")
            }
            Error::UntranslatableWord { node, word } => {
                write!(f, "untranslatable word `{word}` at node {}", node.0)
            }
            Error::NoTiling => f.write_str("no tiling"),
        }
    }
}

impl core::error::Error for Error {}
