use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} is not regular (in-degree {in_degree}, out-degree {out_degree}, expected {expected})")]
    NotRegular {
        vertex: usize,
        in_degree: usize,
        out_degree: usize,
        expected: usize,
    },

    #[error("graph is not strongly connected: vertex {unreachable} is unreachable from {source_vertex}")]
    Disconnected {
        source_vertex: usize,
        unreachable: usize,
    },

    #[error("factor index {index} out of range for {d} factors")]
    BadFactorIndex { index: usize, d: usize },

    #[error("perfect matching failed in round {round}; regular input should always admit one")]
    MatchingFailed { round: usize },

    #[error("factor F_{factor} is not a fixed-point-free permutation: {detail}")]
    FactorNotPermutation { factor: usize, detail: String },

    #[error("factorization does not cover the graph edges: {0}")]
    FactorizationMismatch(String),

    #[error("invalid word list: {0}")]
    InvalidWordList(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("word {word} has length {len}; diameter-2 scheduling needs words of length at most 2")]
    WordsTooLong { word: usize, len: usize },

    #[error("schedule search budget of {budget} nodes exhausted at makespan {makespan}")]
    SearchBudgetExceeded { budget: u64, makespan: u32 },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("no injection from F_{factor} occurrences into F_d occurrences at tree node {node}")]
    InjectionInfeasible { factor: usize, node: usize },

    #[error("field order {q} rejected: {reason}")]
    BadOrder { q: u64, reason: String },

    #[error("polynomial {0:?} is not irreducible")]
    NotIrreducible(Vec<u64>),

    #[error("no primitive root found in GF({0})")]
    NoPrimitiveRoot(u64),

    #[error("group closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("invalid permutation: {0}")]
    InvalidPerm(String),

    #[error("generator {0} is the identity")]
    IdentityGenerator(String),

    #[error("coset condition ({which}) violated: {witness}")]
    ConditionViolated { which: &'static str, witness: String },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// True for failures that mean a construction claimed to be valid came
    /// out invalid at runtime.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::MatchingFailed { .. }
                | Error::FactorNotPermutation { .. }
                | Error::InjectionInfeasible { .. }
                | Error::NoPrimitiveRoot(_)
                | Error::InternalInconsistency(_)
        )
    }
}
