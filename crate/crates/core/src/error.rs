use alloc::string::String;
use core::fmt;

/// Errors raised by construction and by the exact-arithmetic operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// A vector or matrix argument has the wrong length for the ambient
    /// variable count.
    DimensionMismatch { expected: usize, got: usize },
    /// A form or multiplier fails a homogeneity / degree constraint.
    DegreeMismatch { expected: u32, got: u32 },
    /// Invalid data at construction time; the message names the offending
    /// field.
    Invalid(String),
    /// The requested degree carries no forms in this system.
    DegreeAbsent(u32),
    /// A finite-field scan would exceed the configured point budget.
    BudgetExceeded { needed: u128, budget: u128 },
    /// `n <= B_k` for some degree `k`, so the `s`-values are undefined.
    VariableDeficit { degree: u32, n: u32, b: u32 },
    /// The degree-`d` Jacobian is rank-deficient everywhere (`B_d = n`),
    /// which the admissibility theory excludes outright.
    ExcludedSystem { degree: u32 },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} coordinates, got {got}")
            }
            CoreError::DegreeMismatch { expected, got } => {
                write!(f, "degree mismatch: expected {expected}, got {got}")
            }
            CoreError::Invalid(msg) => write!(f, "invalid input: {msg}"),
            CoreError::DegreeAbsent(d) => write!(f, "no forms of degree {d} in the system"),
            CoreError::BudgetExceeded { needed, budget } => {
                write!(f, "scan of {needed} points exceeds budget {budget}; provide an override")
            }
            CoreError::VariableDeficit { degree, n, b } => {
                write!(f, "n = {n} <= B_{degree} = {b}: s-values undefined")
            }
            CoreError::ExcludedSystem { degree } => {
                write!(f, "excluded system: B_{degree} = n (degree-{degree} forms are everywhere rank-deficient)")
            }
        }
    }
}
