use std::fmt;

/// Category of a validation finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticKind {
    NoPlayers,
    DuplicateVertex,
    DuplicateEdge,
    MissingOwner,
    TerminalOwned,
    OwnerOutOfRange,
    UnknownPlayer,
    InvalidPlay,
    DuplicatePlay,
    // one-target game axioms
    TargetCount,
    StatesPerPlayer,
    InvalidPermitted,
    ForbiddenAbovePermitted,
    ForbiddenPlateau,
    TieNextHop,
    SuffixClosure,
}

impl DiagnosticKind {
    pub fn code(self) -> &'static str {
        use DiagnosticKind::*;
        match self {
            NoPlayers => "no-players",
            DuplicateVertex => "duplicate-vertex",
            DuplicateEdge => "duplicate-edge",
            MissingOwner => "missing-owner",
            TerminalOwned => "terminal-owned",
            OwnerOutOfRange => "owner-out-of-range",
            UnknownPlayer => "unknown-player",
            InvalidPlay => "invalid-play",
            DuplicatePlay => "duplicate-play",
            TargetCount => "target-count",
            StatesPerPlayer => "states-per-player",
            InvalidPermitted => "invalid-permitted",
            ForbiddenAbovePermitted => "forbidden-above-permitted",
            ForbiddenPlateau => "forbidden-plateau",
            TieNextHop => "tie-next-hop",
            SuffixClosure => "suffix-closure",
        }
    }
}

/// One violated invariant together with a readable witness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.kind.code(), self.message)
    }
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// Why a vertex cannot be removed by a minor step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotDeletable {
    MultipleSuccessors,
    PredecessorConflict,
    TerminalWithPredecessors,
    SelfLoop,
}

impl fmt::Display for NotDeletable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotDeletable::MultipleSuccessors => "vertex has more than one successor",
            NotDeletable::PredecessorConflict => "a predecessor already has an edge to the unique successor",
            NotDeletable::TerminalWithPredecessors => "terminal vertex still has predecessors",
            NotDeletable::SelfLoop => "vertex has a self-loop",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown vertex `{name}` in {context}")]
    UnknownVertex { name: String, context: String },
    #[error("invalid player `{key}` in {context}")]
    UnknownPlayer { key: String, context: String },
    #[error("invalid game: {}", join(.0))]
    InvalidGame(Vec<Diagnostic>),
    #[error("not a one-target game: {}", join(.0))]
    InvalidOtg(Vec<Diagnostic>),
    #[error("finite play ends in non-terminal vertex `{0}`")]
    NotMaximal(String),
    #[error("play is not a path of the arena: {0}")]
    NotAPlay(String),
    #[error("state space too large: {count} states exceed the guard of {guard} (use --force to override)")]
    StateSpaceTooLarge { count: u128, guard: u64 },
    #[error("history-based dynamics require an acyclic arena")]
    CyclicArena,
    #[error("no edge `{0}` -> `{1}`")]
    UnknownEdge(String, String),
    #[error("cannot delete vertex `{vertex}`: {reason}")]
    NotDeletable { vertex: String, reason: NotDeletable },
    #[error("script step {index}: {source}")]
    ScriptStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("edges `{0}` and `{1}` leave different vertices")]
    SourceMismatch(String, String),
    #[error("search budget of {0} expansions exceeded")]
    SearchBudgetExceeded(u64),
    #[error("player {player} has several best replies in belief state `{node}`")]
    NonDeterministicBestReply { node: String, player: u32 },
    #[error("invalid strong dispute wheel: {0}")]
    InvalidSdw(String),
    #[error("preferences are not suffix-closed; missing: {}", .0.join(", "))]
    SuffixClosureRepairNeeded(Vec<String>),
    #[error("structural and exact verdicts disagree: {0}")]
    InconsistentVerdict(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn from_json(err: serde_json::Error) -> Error {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
