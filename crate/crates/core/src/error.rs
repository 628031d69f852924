use thiserror::Error;

use crate::novikov::ExponentQ;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("scalar modes differ (exact vs float)")]
    ModeMismatch,
    #[error("exponential of a nonzero constant term needs a transcendental scalar; supply exp(b0) directly")]
    NeedsTranscendental,
    #[error("division by zero series")]
    DivisionByZero,
    #[error("series is not in the Novikov ring (negative exponent {0})")]
    NotInLambda0(ExponentQ),
    #[error("result is an infinite series; give the operand a finite truncation")]
    UnboundedTruncation,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Kahler parameters outside the admissible cone: {0}")]
    BadKahlerParams(String),
    #[error("unknown example polytope `{0}`")]
    UnknownExample(String),
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("monomial has negative polytope valuation {0}")]
    NotInLambda0P(String),
    #[error("point is not in the interior of the polytope")]
    NotInterior,
    #[error("bad gapped term: {0}")]
    BadGappedTerm(String),
    #[error("coordinate {0} is not a unit of the Novikov ring")]
    NonUnitEvaluation(usize),
    #[error("polytope is not flagged Fano; the closed-form bulk potential does not apply")]
    NotFano,
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("vector {0:?} is not in the lattice spanned by the flag basis")]
    NotInLattice(Vec<i64>),
    #[error("flag basis construction failed: {0}")]
    BasisConstructionFailed(String),
    #[error("potential is not in leading form at level {level}: coefficient valuation below the level")]
    NotLeadingForm { level: usize },
    #[error("residual at order {order} is outside the span of the available normals")]
    SpanViolation { order: ExponentQ },
    #[error("the flag of normal spans never reaches the full space")]
    NoFullFlag,
    #[error("degenerate critical point: the Hessian vanishes at leading order")]
    DegenerateCritical,
    #[error("exponent set exceeds {0} terms below the truncation")]
    MonoidOverflow(usize),
    #[error("monoid generator must be positive, got {0}")]
    BadGenerator(ExponentQ),
    #[error("grid step must be positive, got {0}")]
    BadStep(ExponentQ),
    #[error("Newton lift did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}
