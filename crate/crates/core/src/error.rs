use thiserror::Error;

/// Errors raised by parsers, builders and the synthesis pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("unknown position `{0}`")]
    UnknownPosition(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("invalid arena: {0}")]
    InvalidArena(String),

    #[error("partial strategy: no choice for memory `{memory}` at position `{position}`")]
    PartialStrategy { memory: String, position: String },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("{0} is not a successor of {1}")]
    NotASuccessor(String, String),

    #[error("not a play: {0}")]
    NotAPlay(String),

    #[error("name collision: atom `{0}` already occurs in the formula")]
    NameCollision(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("formula has R-depth {0}; an LTL formula is required here")]
    NotLtl(usize),

    #[error("state-space cap exceeded: {what} reached {reached} (cap {cap}){}", stage_suffix(.stage))]
    CapExceeded {
        what: &'static str,
        reached: usize,
        cap: usize,
        stage: Option<String>,
    },

    #[error("label set {{{0}}} is outside the automaton alphabet")]
    UnlabeledLetter(String),

    #[error(
        "strictly-uniform strategy synthesis is not supported: its decidability is an open problem; \
         use `check --mode strict` on a candidate strategy instead"
    )]
    StrictSynthesisUnsupported,

    #[error("encoder: {0}")]
    Encoder(String),
}

fn stage_suffix(stage: &Option<String>) -> String {
    match stage {
        Some(s) => format!(" during {s}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attaches a pipeline-stage description to a cap error; other errors pass through.
    pub fn at_stage(self, stage: impl Into<String>) -> Self {
        match self {
            Error::CapExceeded {
                what,
                reached,
                cap,
                stage: None,
            } => Error::CapExceeded {
                what,
                reached,
                cap,
                stage: Some(stage.into()),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
