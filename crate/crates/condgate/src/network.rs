//! Construction and validation of the network unitary `S` acting on mode
//! amplitudes, plus the JSON circuit format that describes a device as a
//! sequence of optical elements.
//!
//! A photon-number-conserving linear network is fully characterized by a
//! unitary matrix on the mode amplitudes. Elements compose left to right:
//! the first element of a sequence acts first, so the compiled matrix is
//! the reverse-order product.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

/// Split of the network modes into signal and ancilla blocks. Signal modes
/// are indices `0..n_signal`, ancillas are `n_signal..n_signal + n_ancilla`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ModePartition {
    n_signal: usize,
    n_ancilla: usize,
}

impl ModePartition {
    pub fn new(n_signal: usize, n_ancilla: usize) -> Result<Self> {
        if n_signal == 0 {
            return Err(Error::EmptyPartition);
        }
        Ok(Self { n_signal, n_ancilla })
    }

    pub fn n_signal(&self) -> usize {
        self.n_signal
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn total(&self) -> usize {
        self.n_signal + self.n_ancilla
    }

    /// Absolute mode index of ancilla `k`.
    pub fn ancilla_index(&self, k: usize) -> usize {
        self.n_signal + k
    }

    pub fn is_signal(&self, mode: usize) -> bool {
        mode < self.n_signal
    }
}

/// A Hermitian generator for the network Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianGenerator {
    entries: DMatrix<C64>,
}

impl HermitianGenerator {
    /// Validates hermiticity within 1e-12, reporting the worst entry pair on
    /// failure.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare { rows: entries.nrows(), cols: entries.ncols() });
        }
        let mut worst = (0, 0, 0.0_f64);
        for i in 0..entries.nrows() {
            for j in i..entries.ncols() {
                let deviation = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if deviation > worst.2 {
                    worst = (i, j, deviation);
                }
            }
        }
        if worst.2 > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                i: worst.0,
                j: worst.1,
                deviation: worst.2,
                tol: HERMITIAN_TOL,
            });
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }
}

/// The unitary matrix `S` induced on the mode amplitudes. Construction
/// rejects matrices whose unitarity residual exceeds 1e-10; nothing is
/// re-orthogonalized behind the caller's back.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkUnitary {
    entries: DMatrix<C64>,
}

impl NetworkUnitary {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare { rows: entries.nrows(), cols: entries.ncols() });
        }
        let (i, j, deviation) = unitarity_residual(&entries);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { i, j, deviation, tol: UNITARY_TOL });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    /// Max elementwise magnitude of `S^dag S - I`.
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.entries).2
    }
}

fn unitarity_residual(m: &DMatrix<C64>) -> (usize, usize, f64) {
    let gram = m.adjoint() * m;
    let mut worst = (0, 0, 0.0_f64);
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            let deviation = (gram[(i, j)] - expect).norm();
            if deviation > worst.2 {
                worst = (i, j, deviation);
            }
        }
    }
    worst
}

/// `S = exp(-i H)` through the eigendecomposition of the Hermitian generator.
pub fn unitary_from_hamiltonian(h: &HermitianGenerator) -> Result<NetworkUnitary> {
    let eig = h.entries().clone().symmetric_eigen();
    let dim = h.dim();
    let mut phases = DMatrix::zeros(dim, dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        phases[(k, k)] = C64::new(0.0, -lambda).exp();
    }
    let s = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    NetworkUnitary::new(s)
}

/// Real beam-splitter rotation between modes `i` and `j`:
/// `S[i][i] = S[j][j] = cos(theta)`, `S[i][j] = -sin(theta)`,
/// `S[j][i] = sin(theta)`, identity elsewhere.
pub fn beam_splitter(theta: f64, i: usize, j: usize, dim: usize) -> Result<NetworkUnitary> {
    if i == j {
        return Err(Error::DegenerateModes(i));
    }
    for &index in &[i, j] {
        if index >= dim {
            return Err(Error::ModeIndexOutOfRange { index, modes: dim });
        }
    }
    let mut m = DMatrix::identity(dim, dim);
    let (c, s) = (theta.cos(), theta.sin());
    m[(i, i)] = C64::new(c, 0.0);
    m[(j, j)] = C64::new(c, 0.0);
    m[(i, j)] = C64::new(-s, 0.0);
    m[(j, i)] = C64::new(s, 0.0);
    NetworkUnitary::new(m)
}

/// Diagonal phase element: `e^{-i phi}` on mode `i`, identity elsewhere.
pub fn phase_shifter(phi: f64, i: usize, dim: usize) -> Result<NetworkUnitary> {
    if i >= dim {
        return Err(Error::ModeIndexOutOfRange { index: i, modes: dim });
    }
    let mut m = DMatrix::identity(dim, dim);
    m[(i, i)] = C64::new(0.0, -phi).exp();
    NetworkUnitary::new(m)
}

/// Sequential composition. The first element of the slice acts first on the
/// mode amplitudes, so it sits rightmost in the matrix product.
pub fn compose(elements: &[NetworkUnitary]) -> Result<NetworkUnitary> {
    let first = elements.first().ok_or(Error::EmptyComposition)?;
    let dim = first.dim();
    let mut product = DMatrix::<C64>::identity(dim, dim);
    for element in elements {
        if element.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: element.dim() });
        }
        product = element.entries() * product;
    }
    NetworkUnitary::new(product)
}

/// One optical element of a circuit description.
#[derive(Clone, Debug, PartialEq)]
pub enum CircuitElement {
    BeamSplitter { theta: f64, modes: (usize, usize) },
    PhaseShifter { phi: f64, mode: usize },
    RawUnitary { matrix: DMatrix<C64> },
}

/// A validated circuit: a mode count and an ordered element sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    pub modes: usize,
    pub elements: Vec<CircuitElement>,
}

impl CircuitSpec {
    /// Compile to the network unitary. An empty element list yields the
    /// identity.
    pub fn compile(&self) -> Result<NetworkUnitary> {
        let mut compiled = vec![NetworkUnitary::identity(self.modes)];
        for element in &self.elements {
            let s = match element {
                CircuitElement::BeamSplitter { theta, modes: (i, j) } => {
                    beam_splitter(*theta, *i, *j, self.modes)?
                }
                CircuitElement::PhaseShifter { phi, mode } => {
                    phase_shifter(*phi, *mode, self.modes)?
                }
                CircuitElement::RawUnitary { matrix } => {
                    if matrix.nrows() != self.modes {
                        return Err(Error::DimensionMismatch {
                            expected: self.modes,
                            got: matrix.nrows(),
                        });
                    }
                    NetworkUnitary::new(matrix.clone())?
                }
            };
            compiled.push(s);
        }
        compose(&compiled)
    }
}

// --- the JSON circuit document ---

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<&ComplexJson> for C64 {
    fn from(z: &ComplexJson) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawElement {
    #[serde(rename = "type")]
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<ComplexJson>>>,
}

/// On-disk circuit document: `modes`, `signal_modes`, and an `elements`
/// array of typed entries (`bs`, `ps`, or `unitary`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitDoc {
    modes: usize,
    signal_modes: usize,
    elements: Vec<RawElement>,
}

impl CircuitDoc {
    /// Wrap an already-compiled unitary as a single-element document, the
    /// output format of the `compile` subcommand.
    pub fn from_unitary(partition: ModePartition, s: &NetworkUnitary) -> Self {
        let matrix = (0..s.dim())
            .map(|i| (0..s.dim()).map(|j| ComplexJson::from(s.entry(i, j))).collect())
            .collect();
        Self {
            modes: partition.total(),
            signal_modes: partition.n_signal(),
            elements: vec![RawElement {
                kind: "unitary".to_string(),
                theta: None,
                phi: None,
                mode: None,
                modes: None,
                matrix: Some(matrix),
            }],
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }

    fn partition(&self) -> Result<ModePartition> {
        if self.signal_modes > self.modes {
            return Err(Error::PartitionTooLarge {
                signal: self.signal_modes,
                modes: self.modes,
            });
        }
        ModePartition::new(self.signal_modes, self.modes - self.signal_modes)
    }

    fn spec(&self) -> Result<CircuitSpec> {
        let mut elements = Vec::with_capacity(self.elements.len());
        for (index, raw) in self.elements.iter().enumerate() {
            let element = match raw.kind.as_str() {
                "bs" => {
                    let theta =
                        raw.theta.ok_or(Error::MissingField { index, field: "theta" })?;
                    let modes =
                        raw.modes.as_ref().ok_or(Error::MissingField { index, field: "modes" })?;
                    if modes.len() != 2 {
                        return Err(Error::MissingField { index, field: "modes" });
                    }
                    CircuitElement::BeamSplitter { theta, modes: (modes[0], modes[1]) }
                }
                "ps" => {
                    let phi = raw.phi.ok_or(Error::MissingField { index, field: "phi" })?;
                    let mode = raw.mode.ok_or(Error::MissingField { index, field: "mode" })?;
                    CircuitElement::PhaseShifter { phi, mode }
                }
                "unitary" => {
                    let rows =
                        raw.matrix.as_ref().ok_or(Error::MissingField { index, field: "matrix" })?;
                    let n = rows.len();
                    if rows.iter().any(|row| row.len() != n) {
                        return Err(Error::NotSquare {
                            rows: n,
                            cols: rows.iter().map(Vec::len).max().unwrap_or(0),
                        });
                    }
                    let matrix = DMatrix::from_fn(n, n, |i, j| C64::from(&rows[i][j]));
                    CircuitElement::RawUnitary { matrix }
                }
                other => {
                    return Err(Error::UnknownElementType { kind: other.to_string(), index })
                }
            };
            elements.push(element);
        }
        Ok(CircuitSpec { modes: self.modes, elements })
    }
}

/// Parse a circuit document and compile it to the partition and unitary.
pub fn parse_and_compile(text: &str) -> Result<(ModePartition, NetworkUnitary)> {
    let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let partition = doc.partition()?;
    let spec = doc.spec()?;
    let unitary = spec.compile()?;
    Ok((partition, unitary))
}
