//! Conditional measurement operators for photon-counted linear optical
//! networks.
//!
//! A photon-number-conserving network on `N + K` modes, with `K` ancilla
//! modes prepared in number states and photon-counted behind the network,
//! induces a non-unitary conditional operator on the `N` signal modes for
//! every count outcome. This crate computes those operators two independent
//! ways — a truncated symbol expansion with coefficient extraction
//! ([`qsymbol`]) and a permanent-based evaluation over the Fock basis
//! ([`oracle`]) — and layers gate-level operations on top ([`gates`]):
//! applying an operator to a state, outcome distributions, completeness
//! checks, a disentangled factorization, and a single-photon history
//! decomposition.

pub mod diagram;
pub mod error;
pub mod fock;
pub mod gates;
pub mod io;
pub mod network;
pub mod oracle;
pub mod qsymbol;

pub use error::{Error, Result};
pub use fock::{AncillaPattern, FockBasis, FockOperator, FockStateVector, Occupation};
pub use gates::{
    apply_gate, completeness_residual, conditional_operator, disentangled_form, histories_terms,
    outcome_distribution, two_mode_catalog, ApplyOutcome, DisentangledParams, HistoryTerm, Method,
    TwoModeCatalog,
};
pub use network::{
    beam_splitter, compose, parse_and_compile, phase_shifter, unitary_from_hamiltonian,
    CircuitDoc, CircuitElement, CircuitSpec, HermitianGenerator, ModePartition, NetworkUnitary,
};
pub use oracle::{matrix_element, oracle_conditional_operator, permanent};
pub use qsymbol::{
    expand_network_symbol, extract_conditional_symbol, symbol_to_operator, Monomial, QPolynomial,
};
