use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("degenerate lattice: the Gram matrix has determinant 0")]
    DegenerateLattice,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rows are linearly dependent")]
    DependentRows,
    #[error("the zero vector has no divisibility")]
    ZeroVector,
    #[error("lattice is indefinite")]
    IndefiniteLattice,
    #[error("lattice is definite")]
    DefiniteLattice,
    #[error("lattice is odd; the discriminant quadratic form is only defined mod 2Z for even lattices")]
    OddLattice,
    #[error("lattice is not unimodular")]
    NotUnimodular,
    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: u64 },
    #[error("ranks differ ({left} vs {right})")]
    RankMismatch { left: usize, right: usize },
    #[error("discriminant group is not 2-elementary")]
    NotTwoElementary,
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("matrix does not preserve the Gram matrix")]
    NotAnIsometry,
    #[error("isometry has no finite order up to {cap}")]
    OrderCapExceeded { cap: u32 },
    #[error("reflection in a vector of square {square} is not integral on this lattice")]
    NonIntegralReflection { square: BigInt },
    #[error("isometry acts non-trivially on the discriminant group")]
    DiscActionNontrivial,
    #[error("square {0} is odd")]
    OddSquare(BigInt),
    #[error("expected square {expected}, found {found}")]
    WrongSquare { expected: BigInt, found: BigInt },
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("lattice does not present two orthogonal hyperbolic planes")]
    MissingU2,
    #[error("Mukai vectors live over different Neron-Severi lattices")]
    GramMismatch,
    #[error("unsupported deformation type: {0}")]
    UnsupportedType(String),
    #[error("unknown lattice name: {0}")]
    UnknownName(String),
    #[error("E6 dual rescaled by {scale} is not an even integral lattice")]
    NonIntegralDual { scale: BigInt },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
