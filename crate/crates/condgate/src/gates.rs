//! User-facing operations on conditional measurement operators: building
//! them by either method, applying them to states, outcome distributions,
//! completeness checks, the two-mode operator catalog, the disentangled
//! factorization, and the single-photon history decomposition.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{AncillaPattern, FockBasis, FockOperator, FockStateVector, Occupation};
use crate::network::{beam_splitter, ModePartition, NetworkUnitary};
use crate::oracle::oracle_conditional_operator;
use crate::qsymbol::{
    expand_network_symbol, extract_conditional_symbol, symbol_to_operator, Monomial, QPolynomial,
};

/// Probabilities below this are treated as failed heralding: the
/// conditional state is undefined rather than a normalized zero vector.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

const SINGULAR_TOL: f64 = 1e-12;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const RECONSTRUCTION_DEGREE: usize = 6;

/// Which of the two independent computations to run.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// Truncated symbol expansion with coefficient extraction.
    QSymbol,
    /// Per-element permanents over the Fock basis.
    Oracle,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "qsymbol" => Ok(Method::QSymbol),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::QSymbol => write!(f, "qsymbol"),
            Method::Oracle => write!(f, "oracle"),
        }
    }
}

/// The conditional operator for one preparation/count pattern on the signal
/// basis truncated at `n_max` total photons.
///
/// The symbol path expands to total degree `2 (n_max + max(sum n, sum m))`,
/// which reaches every matrix element of the truncated basis exactly; the
/// oracle path evaluates each element as a permanent. Both return operators
/// on the identical basis with sector shift `sum n - sum m`.
pub fn conditional_operator(
    s: &NetworkUnitary,
    partition: ModePartition,
    pattern: &AncillaPattern,
    n_max: usize,
    method: Method,
) -> Result<FockOperator> {
    match method {
        Method::Oracle => oracle_conditional_operator(s, partition, pattern, n_max),
        Method::QSymbol => {
            let extra = pattern.prepare.total().max(pattern.count.total());
            let u = expand_network_symbol(s, partition, 2 * (n_max + extra))?;
            conditional_from_expansion(&u, partition, pattern, n_max)
        }
    }
}

/// Extract one pattern's operator from an already-expanded network symbol.
/// Sweeps over many patterns reuse a single expansion this way; the shared
/// expansion must cover total degree `2 (n_max + sum n)`, which suffices for
/// every count pattern (in-basis elements cap the reachable degree at
/// `2 (n_max + min(sum n, sum m))`).
pub fn conditional_from_expansion(
    u: &QPolynomial,
    partition: ModePartition,
    pattern: &AncillaPattern,
    n_max: usize,
) -> Result<FockOperator> {
    let e = extract_conditional_symbol(u, partition, pattern)?;
    let op = symbol_to_operator(&e, n_max)?;
    if op.num_entries() == 0 && op.sector_shift() != pattern.sector_shift() {
        // an all-zero operator carries no shift information of its own
        return Ok(FockOperator::zero(op.basis().clone(), pattern.sector_shift()));
    }
    Ok(op)
}

/// Result of conditioning a state on one ancilla outcome.
#[derive(Clone, Debug)]
pub struct ApplyOutcome {
    /// `E |psi>` before renormalization.
    pub unnormalized: FockStateVector,
    /// Heralding probability `|| E |psi> ||^2`.
    pub probability: f64,
    /// The conditional state, or `None` when the probability is below
    /// [`PROBABILITY_FLOOR`] and no conditional state exists.
    pub normalized: Option<FockStateVector>,
}

/// Condition a normalized state on the outcome represented by `e`.
pub fn apply_gate(e: &FockOperator, psi: &FockStateVector) -> Result<ApplyOutcome> {
    psi.check_normalized()?;
    if let Some(top) = psi.max_occupied_sector() {
        let headroom = e.basis().max_total() as i64 - e.sector_shift().max(0);
        if (top as i64) > headroom {
            return Err(Error::SectorBeyondTruncation {
                sector: top,
                max: headroom.max(0) as usize,
                n_max: e.basis().max_total(),
            });
        }
    }
    let unnormalized = e.apply(psi)?;
    let probability = unnormalized.norm_sq();
    let normalized = (probability > PROBABILITY_FLOOR)
        .then(|| unnormalized.scaled(1.0 / probability.sqrt()));
    Ok(ApplyOutcome { unnormalized, probability, normalized })
}

/// Heralding probability of every count outcome for a fixed preparation,
/// listed in (total, lexicographic) order over count vectors with at most
/// `sum prepare` plus the state's photon total. The probabilities sum to 1
/// whenever no sector is truncated, which the entry guard enforces.
pub fn outcome_distribution(
    s: &NetworkUnitary,
    partition: ModePartition,
    prepare: &Occupation,
    psi: &FockStateVector,
    n_max: usize,
    method: Method,
) -> Result<Vec<(Occupation, f64)>> {
    psi.check_normalized()?;
    if prepare.len() != partition.n_ancilla() {
        return Err(Error::PatternLength {
            expected: partition.n_ancilla(),
            got: prepare.len(),
        });
    }
    let top = psi.max_occupied_sector().unwrap_or(0);
    let injected = prepare.total();
    if top + injected > n_max {
        return Err(Error::SectorBeyondTruncation {
            sector: top,
            max: n_max.saturating_sub(injected),
            n_max,
        });
    }
    let budget = top + injected;
    let counts = FockBasis::new(partition.n_ancilla(), budget)?;
    let expansion = match method {
        Method::QSymbol => Some(expand_network_symbol(s, partition, 2 * (n_max + injected))?),
        Method::Oracle => None,
    };
    let mut distribution = Vec::with_capacity(counts.len());
    for count in counts.states() {
        let pattern = AncillaPattern::new(prepare.clone(), count.clone());
        let e = match &expansion {
            Some(u) => conditional_from_expansion(u, partition, &pattern, n_max)?,
            None => oracle_conditional_operator(s, partition, &pattern, n_max)?,
        };
        let outcome = apply_gate(&e, psi)?;
        distribution.push((count.clone(), outcome.probability));
    }
    Ok(distribution)
}

/// Largest deviation of `sum_m E(n|m)^dag E(n|m)` from the identity over
/// the untruncated sectors, i.e. input totals `T` with `T + sum n <= n_max`.
/// Unitarity of the network makes this zero in exact arithmetic.
pub fn completeness_residual(
    s: &NetworkUnitary,
    partition: ModePartition,
    prepare: &Occupation,
    n_max: usize,
    method: Method,
) -> Result<f64> {
    if prepare.len() != partition.n_ancilla() {
        return Err(Error::PatternLength {
            expected: partition.n_ancilla(),
            got: prepare.len(),
        });
    }
    let injected = prepare.total();
    if injected > n_max {
        return Err(Error::SectorBeyondTruncation { sector: injected, max: n_max, n_max });
    }
    let basis = FockBasis::new(partition.n_signal(), n_max)?;
    let counts = FockBasis::new(partition.n_ancilla(), n_max)?;
    let expansion = match method {
        Method::QSymbol => Some(expand_network_symbol(s, partition, 2 * (n_max + injected))?),
        Method::Oracle => None,
    };
    let mut sum = FockOperator::zero(basis.clone(), 0);
    for count in counts.states() {
        let pattern = AncillaPattern::new(prepare.clone(), count.clone());
        let e = match &expansion {
            Some(u) => conditional_from_expansion(u, partition, &pattern, n_max)?,
            None => oracle_conditional_operator(s, partition, &pattern, n_max)?,
        };
        sum = sum.add(&e.adjoint().matmul(&e)?)?;
    }
    let checked = basis.sector(n_max - injected).end;
    Ok(sum.max_abs_diff_identity_on(0..checked))
}

/// Parameters of the factored form of the vacuum-heralded operator on two
/// signal modes: a cross-mode creation factor, a diagonal attenuation, and
/// a cross-mode annihilation factor, with strengths `lambda1`, `mu1`,
/// `mu2`, `lambda2` determined by the signal block of the mode matrix.
#[derive(Clone, Debug)]
pub struct DisentangledParams {
    pub lambda1: C64,
    pub lambda2: C64,
    pub mu1: C64,
    pub mu2: C64,
    pub exp_mu1: C64,
    pub exp_mu2: C64,
}

/// Factor the vacuum-ancilla conditional operator of a three-mode network
/// (two signal modes, one ancilla). The parameters depend only on the
/// 2x2 signal block `[[s11, s12], [s21, s22]]`:
///
/// ```text
/// e^{mu2} = s22        lambda1 = s12 / s22
/// e^{mu1} = s11 - s12 s21 / s22        lambda2 = s21 / s22
/// ```
///
/// The factorization does not exist when `s22` vanishes. Before returning,
/// the factored form's symbol is re-expanded to degree 6 and compared
/// coefficientwise against the directly extracted operator symbol.
pub fn disentangled_form(
    s: &NetworkUnitary,
    partition: ModePartition,
) -> Result<DisentangledParams> {
    if s.dim() != partition.total() {
        return Err(Error::DimensionMismatch { expected: partition.total(), got: s.dim() });
    }
    if partition.n_signal() != 2 || partition.n_ancilla() != 1 {
        return Err(Error::UnsupportedPartition {
            signal: partition.n_signal(),
            ancillas: partition.n_ancilla(),
        });
    }
    let s11 = s.entry(0, 0);
    let s12 = s.entry(0, 1);
    let s21 = s.entry(1, 0);
    let s22 = s.entry(1, 1);
    if s22.norm() <= SINGULAR_TOL {
        return Err(Error::SingularFactorization { magnitude: s22.norm(), tol: SINGULAR_TOL });
    }
    let lambda1 = s12 / s22;
    let lambda2 = s21 / s22;
    let exp_mu2 = s22;
    let exp_mu1 = s11 - s12 * s21 / s22;
    if exp_mu1.norm() <= SINGULAR_TOL {
        return Err(Error::SingularFactorization { magnitude: exp_mu1.norm(), tol: SINGULAR_TOL });
    }
    let params = DisentangledParams {
        lambda1,
        lambda2,
        mu1: exp_mu1.ln(),
        mu2: exp_mu2.ln(),
        exp_mu1,
        exp_mu2,
    };

    // reconstruct the vacuum-heralded symbol from the factored form and
    // compare against the direct extraction
    let one = C64::new(1.0, 0.0);
    let mut exponent = QPolynomial::new(2, RECONSTRUCTION_DEGREE);
    exponent.add_term(
        Monomial::new(vec![1, 0], vec![1, 0]),
        -(one - exp_mu1 - lambda1 * lambda2 * exp_mu2),
    );
    exponent.add_term(Monomial::new(vec![0, 1], vec![0, 1]), -(one - exp_mu2));
    exponent.add_term(Monomial::new(vec![1, 0], vec![0, 1]), lambda1 * exp_mu2);
    exponent.add_term(Monomial::new(vec![0, 1], vec![1, 0]), lambda2 * exp_mu2);
    let reconstructed = exponent.exp_truncate()?;

    let u = expand_network_symbol(s, partition, RECONSTRUCTION_DEGREE)?;
    let direct = extract_conditional_symbol(&u, partition, &AncillaPattern::vacuum(1))?;

    let mut deviation = 0.0_f64;
    for (monomial, coeff) in reconstructed.terms() {
        deviation = deviation.max((direct.coefficient(monomial) - coeff).norm());
    }
    for (monomial, coeff) in direct.terms() {
        deviation = deviation.max((reconstructed.coefficient(monomial) - coeff).norm());
    }
    if deviation > RECONSTRUCTION_TOL {
        return Err(Error::FactorizationValidation { deviation });
    }
    Ok(params)
}

/// One term of the single-photon history decomposition: either the
/// pass-through (no mode indices) or a creation/annihilation sandwich.
#[derive(Clone, Debug)]
pub struct HistoryTerm {
    /// Signal mode receiving the injected ancilla photon, if any.
    pub creation_mode: Option<usize>,
    /// Signal mode supplying the counted photon, if any.
    pub annihilation_mode: Option<usize>,
    /// Product of the mode-matrix entries along the history.
    pub amplitude: C64,
    /// Human-readable form, e.g. `adag[0] s[0][2] A s[2][1] a[1]`.
    pub label: String,
}

/// Decompose the one-prepared/one-counted conditional operator into its
/// `1 + N^2` single-photon histories: the injected photon either passes
/// straight through the ancilla mode `a` (amplitude `s[a][a]`), or lands in
/// signal mode `j` while the counted photon is taken from signal mode `k`
/// (amplitude `s[j][a] s[a][k]`), with the vacuum-heralded operator acting
/// in between. Terms with zero amplitude are kept so the count is always
/// `1 + N^2`.
pub fn histories_terms(
    s: &NetworkUnitary,
    partition: ModePartition,
    pattern: &AncillaPattern,
) -> Result<Vec<HistoryTerm>> {
    if s.dim() != partition.total() {
        return Err(Error::DimensionMismatch { expected: partition.total(), got: s.dim() });
    }
    let single = Occupation::new(vec![1]);
    if partition.n_ancilla() != 1 || pattern.prepare != single || pattern.count != single {
        return Err(Error::UnsupportedPattern {
            ancillas: partition.n_ancilla(),
            prepare: pattern.prepare.counts().to_vec(),
            count: pattern.count.counts().to_vec(),
        });
    }
    let a = partition.ancilla_index(0);
    let n = partition.n_signal();
    let mut terms = Vec::with_capacity(1 + n * n);
    terms.push(HistoryTerm {
        creation_mode: None,
        annihilation_mode: None,
        amplitude: s.entry(a, a),
        label: format!("s[{a}][{a}] A"),
    });
    for j in 0..n {
        for k in 0..n {
            terms.push(HistoryTerm {
                creation_mode: Some(j),
                annihilation_mode: Some(k),
                amplitude: s.entry(j, a) * s.entry(a, k),
                label: format!("adag[{j}] s[{j}][{a}] A s[{a}][{k}] a[{k}]"),
            });
        }
    }
    Ok(terms)
}

/// Reassemble the history terms into the conditional operator they
/// decompose, sandwiching the vacuum-heralded operator between truncated
/// ladder operators. Agrees with
/// [`conditional_operator`] for the one-prepared/one-counted pattern.
pub fn histories_operator(
    s: &NetworkUnitary,
    partition: ModePartition,
    n_max: usize,
    method: Method,
) -> Result<FockOperator> {
    let single = Occupation::new(vec![1]);
    let pattern = AncillaPattern::new(single.clone(), single);
    let terms = histories_terms(s, partition, &pattern)?;
    let vacuum = conditional_operator(s, partition, &AncillaPattern::vacuum(1), n_max, method)?;
    let basis = vacuum.basis().clone();
    let mut sum = FockOperator::zero(basis.clone(), 0);
    for term in &terms {
        let contribution = match (term.creation_mode, term.annihilation_mode) {
            (None, None) => vacuum.scale(term.amplitude),
            (Some(j), Some(k)) => {
                let create = FockOperator::creation(basis.clone(), j)?;
                let destroy = FockOperator::annihilation(basis.clone(), k)?;
                create
                    .matmul(&vacuum)?
                    .matmul(&destroy)?
                    .scale(term.amplitude)
            }
            _ => unreachable!("terms carry both indices or neither"),
        };
        sum = sum.add(&contribution)?;
    }
    Ok(sum)
}

/// The four conditional operators of a single beam splitter with one signal
/// and one ancilla mode, for ancilla photon numbers up to one.
#[derive(Clone, Debug)]
pub struct TwoModeCatalog {
    /// Nothing prepared, nothing counted.
    pub e00: FockOperator,
    /// Nothing prepared, one photon counted.
    pub e01: FockOperator,
    /// One photon prepared, nothing counted.
    pub e10: FockOperator,
    /// One photon prepared, one counted.
    pub e11: FockOperator,
}

/// Compute the catalog for a beam splitter of angle `theta` via the symbol
/// method, all four patterns extracted from one shared expansion.
pub fn two_mode_catalog(theta: f64, n_max: usize) -> Result<TwoModeCatalog> {
    let partition = ModePartition::new(1, 1)?;
    let s = beam_splitter(theta, 0, 1, 2)?;
    let u = expand_network_symbol(&s, partition, 2 * (n_max + 1))?;
    let pattern = |prepare: u8, count: u8| {
        AncillaPattern::new(Occupation::new(vec![prepare]), Occupation::new(vec![count]))
    };
    Ok(TwoModeCatalog {
        e00: conditional_from_expansion(&u, partition, &pattern(0, 0), n_max)?,
        e01: conditional_from_expansion(&u, partition, &pattern(0, 1), n_max)?,
        e10: conditional_from_expansion(&u, partition, &pattern(1, 0), n_max)?,
        e11: conditional_from_expansion(&u, partition, &pattern(1, 1), n_max)?,
    })
}
