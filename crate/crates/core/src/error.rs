//! Error type shared by every module of the crate.

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::IntPoly;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("minimal polynomial must be monic (degree {degree} with leading coefficient {leading})")]
    NotMonic { degree: usize, leading: BigInt },

    #[error("polynomial is reducible, witness factor {witness}")]
    Reducible { witness: IntPoly },

    #[error("irreducibility undetermined within the configured budget")]
    IrreducibilityUndetermined,

    #[error("division by zero")]
    DivisionByZero,

    #[error("operands belong to different number fields")]
    FieldMismatch,

    #[error("precision ladder exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("place is not expanding, |beta| <= 1 there")]
    NotExpandingPlace,

    #[error("no admissible digit from state {state}")]
    NoAdmissibleDigit { state: String },

    #[error("iteration cap of {cap} exceeded before a cycle was found")]
    IterationCapExceeded { cap: u64 },

    #[error("memory budget exceeded: {0}")]
    MemoryBudgetExceeded(String),

    #[error("rational denominator cap {cap} exceeded while rounding an approximation")]
    DenominatorCapExceeded { cap: BigInt },

    #[error("base has a conjugate on the unit circle; the operation requires none")]
    UnitCirclePlacePresent,

    #[error("the selected root is not expanding; a base must satisfy |beta| > 1")]
    BaseNotExpanding,

    #[error("root index {index} out of range, the polynomial has {count} roots")]
    RootIndexOutOfRange { index: usize, count: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
