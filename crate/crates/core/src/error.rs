use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid loop: {0}")]
    Validation(#[from] ValidationError),
    #[error("loop is not splittable")]
    NotSplittable,
    #[error("winding number is constant on all faces")]
    DegenerateWinding,
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("guard: {0}")]
    Guard(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

/// First violated invariant found while validating a combinatorial loop.
/// Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("loop has no edges")]
    Empty,
    #[error("array lengths differ: {0}")]
    Shape(String),
    #[error("{what} index {index} out of range on edge {edge}")]
    IndexRange { what: &'static str, edge: usize, index: usize },
    #[error("{what} {index} is never used")]
    Unused { what: &'static str, index: usize },
    #[error("word uses edge {edge} {count} times (each edge exactly once)")]
    EdgeUsage { edge: usize, count: usize },
    #[error("word does not concatenate between positions {position} and {next}")]
    Concatenation { position: usize, next: usize },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    Degree { vertex: usize, degree: usize, expected: usize },
    #[error("Euler relation fails: q - m + p = {q} - {m} + {p} != 2")]
    Euler { q: usize, m: usize, p: usize },
    #[error("no transverse rotation at vertex {vertex} is consistent with the face data")]
    Transversality { vertex: usize },
    #[error("rotation at vertex {vertex} is ambiguous")]
    AmbiguousRotation { vertex: usize },
    #[error("face {face} is traced by {cycles} boundary cycles, expected 1")]
    FaceCoherence { face: usize, cycles: usize },
    #[error("face cycle mixes faces {first} and {second}")]
    FaceMismatch { first: usize, second: usize },
}
