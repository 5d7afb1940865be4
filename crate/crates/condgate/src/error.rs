//! Crate-wide error type.
//!
//! Validation failures (bad input, malformed documents, mismatched
//! dimensions) are distinguished from cost-guard failures (requests that
//! would exceed the desk-scale resource ceilings) so the CLI can map them
//! to different exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "matrix is not hermitian: |M[{i}][{j}] - conj(M[{j}][{i}])| = {deviation:.3e} \
         exceeds {tol:.0e}"
    )]
    NotHermitian { i: usize, j: usize, deviation: f64, tol: f64 },

    #[error(
        "matrix is not unitary: max |(S^dag S - I)[{i}][{j}]| = {deviation:.3e} \
         exceeds {tol:.0e}"
    )]
    NotUnitary { i: usize, j: usize, deviation: f64, tol: f64 },

    #[error("matrix is not square: {rows} rows x {cols} cols")]
    NotSquare { rows: usize, cols: usize },

    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndexOutOfRange { index: usize, modes: usize },

    #[error("beam splitter modes must be distinct (both are {0})")]
    DegenerateModes(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mode partition requires at least one signal mode")]
    EmptyPartition,

    #[error("signal mode count {signal} exceeds total mode count {modes}")]
    PartitionTooLarge { signal: usize, modes: usize },

    #[error("cannot compose an empty element sequence")]
    EmptyComposition,

    #[error("circuit syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unknown element type `{kind}` at elements[{index}]")]
    UnknownElementType { kind: String, index: usize },

    #[error("element at elements[{index}] is missing required field `{field}`")]
    MissingField { index: usize, field: &'static str },

    #[error("ancilla pattern has length {got}, but the partition has {expected} ancilla mode(s)")]
    PatternLength { expected: usize, got: usize },

    #[error("operands are defined over different Fock bases")]
    BasisMismatch,

    #[error("operator sector shifts differ: {0} vs {1}")]
    SectorShiftMismatch(i64, i64),

    #[error(
        "polynomial mixes sector shifts ({0} and {1}); it does not map to a single \
         sector-shift operator"
    )]
    MixedSectorShift(i64, i64),

    #[error("entry ({row}, {col}) violates the sector structure for shift {shift}")]
    SectorStructure { row: usize, col: usize, shift: i64 },

    #[error("exponential of a polynomial with a nonzero constant term does not terminate")]
    NonzeroConstantTerm,

    #[error("state is not normalized: |norm - 1| = {deviation:.3e} exceeds {tol:.0e}")]
    NotNormalized { deviation: f64, tol: f64 },

    #[error("occupation {occ:?} lies outside the basis (modes = {modes}, max_total = {max_total})")]
    OccupationOutOfBasis { occ: Vec<u8>, modes: usize, max_total: usize },

    #[error(
        "state occupies photon-number sector {sector}, beyond the {max} supported by \
         nmax = {n_max} with this preparation"
    )]
    SectorBeyondTruncation { sector: usize, max: usize, n_max: usize },

    #[error("factored form is singular: |s22| = {magnitude:.3e} <= {tol:.0e}")]
    SingularFactorization { magnitude: f64, tol: f64 },

    #[error("factored-form reconstruction deviates from the network symbol by {deviation:.3e}")]
    FactorizationValidation { deviation: f64 },

    #[error(
        "history decomposition requires exactly one ancilla with a single photon \
         prepared and counted (got K = {ancillas}, prepare = {prepare:?}, count = {count:?})"
    )]
    UnsupportedPattern { ancillas: usize, prepare: Vec<u8>, count: Vec<u8> },

    #[error("operator file does not list the canonical basis for its modes and max total")]
    NonCanonicalBasis,

    #[error("entry index {index} out of range for a basis of {len} states")]
    EntryOutOfRange { index: usize, len: usize },

    #[error(
        "operation requires exactly two signal modes and one ancilla \
         (got {signal} signal, {ancillas} ancilla)"
    )]
    UnsupportedPartition { signal: usize, ancillas: usize },

    #[error("unknown method `{0}` (expected `qsymbol` or `oracle`)")]
    UnknownMethod(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    // --- cost guards ---
    #[error("permanent dimension {dim} exceeds the limit of {limit}")]
    PermanentTooLarge { dim: usize, limit: usize },

    #[error(
        "basis of {states} states exceeds the cap of {cap} \
         (set CONDGATE_MAX_BASIS to raise it)"
    )]
    BasisTooLarge { states: usize, cap: usize },

    #[error("factorial {n}! exceeds double-precision range (limit 170!)")]
    FactorialOverflow { n: usize },
}

impl Error {
    /// True for errors raised by a resource ceiling rather than invalid input.
    pub fn is_cost_guard(&self) -> bool {
        matches!(
            self,
            Error::PermanentTooLarge { .. }
                | Error::BasisTooLarge { .. }
                | Error::FactorialOverflow { .. }
        )
    }

    /// Short machine-readable tag for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NotSquare { .. } => "not_square",
            Error::ModeIndexOutOfRange { .. } => "mode_index_out_of_range",
            Error::DegenerateModes(..) => "degenerate_modes",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyPartition => "empty_partition",
            Error::PartitionTooLarge { .. } => "partition_too_large",
            Error::EmptyComposition => "empty_composition",
            Error::Syntax { .. } => "syntax",
            Error::UnknownElementType { .. } => "unknown_element_type",
            Error::MissingField { .. } => "missing_field",
            Error::PatternLength { .. } => "pattern_length",
            Error::BasisMismatch => "basis_mismatch",
            Error::SectorShiftMismatch(..) => "sector_shift_mismatch",
            Error::MixedSectorShift(..) => "mixed_sector_shift",
            Error::SectorStructure { .. } => "sector_structure",
            Error::NonzeroConstantTerm => "nonzero_constant_term",
            Error::NotNormalized { .. } => "not_normalized",
            Error::OccupationOutOfBasis { .. } => "occupation_out_of_basis",
            Error::SectorBeyondTruncation { .. } => "sector_beyond_truncation",
            Error::SingularFactorization { .. } => "singular_factorization",
            Error::FactorizationValidation { .. } => "factorization_validation",
            Error::UnsupportedPattern { .. } => "unsupported_pattern",
            Error::NonCanonicalBasis => "non_canonical_basis",
            Error::EntryOutOfRange { .. } => "entry_out_of_range",
            Error::UnsupportedPartition { .. } => "unsupported_partition",
            Error::UnknownMethod(..) => "unknown_method",
            Error::Io { .. } => "io",
            Error::PermanentTooLarge { .. } => "permanent_too_large",
            Error::BasisTooLarge { .. } => "basis_too_large",
            Error::FactorialOverflow { .. } => "factorial_overflow",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
