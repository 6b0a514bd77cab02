use thiserror::Error;

/// Errors raised by the algebraic constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("characteristic 2 is not supported (p = {0})")]
    EvenCharacteristic(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime power")]
    NotPrimePower(u64),
    #[error("field of order {0} exceeds the table size limit")]
    FieldTooLarge(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale exponents {0} and {1} have different parity; compare numerically")]
    ParityMismatch(i32, i32),
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("the given subspace is not the radical of the form restricted to U")]
    NotCoisotropicPair,
    #[error("vector does not lie in the subspace")]
    NotInSubspace,
    #[error("coordinate block [a b] has rank {0} < m")]
    NotCoprime(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("subspace is not lagrangian")]
    NotLagrangian,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("gram matrix is not alternating and nondegenerate")]
    InvalidForm,
    #[error("coordinates require the standard symplectic gram matrix")]
    NotStandardSpace,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("rho(g) rho(h) is not a scalar multiple of rho(gh)")]
    NotProportional,
    #[error("singular values cluster at the rank tolerance (nearest {0:e})")]
    RankUnstable(f64),
    #[error("determinant is not 1")]
    NotUnimodular,
    #[error("linear system with {0} unknowns is too large for the dense solver")]
    TooLarge(usize),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
