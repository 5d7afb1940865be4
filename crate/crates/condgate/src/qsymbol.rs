//! Truncated polynomial expansion of the network symbol.
//!
//! The whole pipeline runs on one object: a polynomial in the coherent-state
//! variables `conj(a_i)` ("star") and `a_i` ("plain"), one pair per mode,
//! truncated at a fixed total degree. The network unitary's symbol is the
//! exponential of the bilinear form `conj(a)^T M a` with `M = S - I_sig`,
//! where `I_sig` is the identity on the signal block and zero on the ancilla
//! block. Subtracting `I_sig` folds the signal-mode Gaussian into the
//! series, so the coefficients that come out of [`extract_conditional_symbol`]
//! are already the normally-ordered coefficients of the conditional operator
//! and [`symbol_to_operator`] can map monomials straight onto ladder
//! products.
//!
//! Because each factor of the bilinear form carries exactly one star and one
//! plain variable, every monomial of the expanded symbol is balanced (equal
//! star and plain total degree) and a monomial of total degree `2k` is
//! produced only by the `k`-th series term. Truncation at total degree `D`
//! therefore reproduces every coefficient of degree at most `D` exactly; the
//! error of the method is confined to matrix elements the chosen degree
//! cannot reach.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{factorial, AncillaPattern, FockBasis, FockOperator, Occupation};
use crate::network::{ModePartition, NetworkUnitary};

/// Coefficients below this magnitude are dropped on insertion.
const PURGE_TOL: f64 = 1e-15;

/// A single product of star and plain variables: `star[i]` and `plain[i]`
/// are the exponents of `conj(a_i)` and `a_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    star: Vec<u8>,
    plain: Vec<u8>,
}

impl Monomial {
    pub fn new(star: Vec<u8>, plain: Vec<u8>) -> Self {
        debug_assert_eq!(star.len(), plain.len());
        Self { star, plain }
    }

    /// The constant monomial over `modes` variables.
    pub fn unit(modes: usize) -> Self {
        Self { star: vec![0; modes], plain: vec![0; modes] }
    }

    pub fn star(&self) -> &[u8] {
        &self.star
    }

    pub fn plain(&self) -> &[u8] {
        &self.plain
    }

    pub fn star_total(&self) -> usize {
        self.star.iter().map(|&e| e as usize).sum()
    }

    pub fn plain_total(&self) -> usize {
        self.plain.iter().map(|&e| e as usize).sum()
    }

    pub fn total_degree(&self) -> usize {
        self.star_total() + self.plain_total()
    }

    /// Equal star and plain degree; every monomial of a number-conserving
    /// network symbol has this property.
    pub fn is_balanced(&self) -> bool {
        self.star_total() == self.plain_total()
    }

    fn product(&self, other: &Monomial) -> Monomial {
        let star = self.star.iter().zip(&other.star).map(|(a, b)| a + b).collect();
        let plain = self.plain.iter().zip(&other.plain).map(|(a, b)| a + b).collect();
        Monomial { star, plain }
    }
}

/// A polynomial over the star/plain variables of a fixed set of modes,
/// truncated at `max_total_degree`. Inserting a term beyond the cap drops
/// it silently: the type models the quotient ring, not an error condition.
#[derive(Clone, Debug, PartialEq)]
pub struct QPolynomial {
    modes: usize,
    max_total_degree: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl QPolynomial {
    pub fn new(modes: usize, max_total_degree: usize) -> Self {
        Self { modes, max_total_degree, terms: BTreeMap::new() }
    }

    /// The constant polynomial `1`.
    pub fn one(modes: usize, max_total_degree: usize) -> Self {
        let mut p = Self::new(modes, max_total_degree);
        p.add_term(Monomial::unit(modes), C64::new(1.0, 0.0));
        p
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn max_total_degree(&self) -> usize {
        self.max_total_degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    /// Accumulate `coeff` onto a monomial, truncating by degree and purging
    /// coefficients that cancel to below 1e-15.
    pub fn add_term(&mut self, monomial: Monomial, coeff: C64) {
        debug_assert_eq!(monomial.star.len(), self.modes);
        if monomial.total_degree() > self.max_total_degree {
            return;
        }
        let updated = self.coefficient(&monomial) + coeff;
        if updated.norm() < PURGE_TOL {
            self.terms.remove(&monomial);
        } else {
            self.terms.insert(monomial, updated);
        }
    }

    /// The coefficient of a monomial, zero when absent.
    pub fn coefficient(&self, monomial: &Monomial) -> C64 {
        self.terms.get(monomial).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn scale(&mut self, factor: C64) {
        for coeff in self.terms.values_mut() {
            *coeff *= factor;
        }
        self.terms.retain(|_, v| v.norm() >= PURGE_TOL);
    }

    /// Product truncated to the smaller of the two degree caps.
    pub fn mul_truncate(&self, other: &QPolynomial) -> Result<QPolynomial> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, got: other.modes });
        }
        let cap = self.max_total_degree.min(other.max_total_degree);
        let mut out = QPolynomial::new(self.modes, cap);
        for (m1, c1) in &self.terms {
            let d1 = m1.total_degree();
            if d1 > cap {
                continue;
            }
            for (m2, c2) in &other.terms {
                if d1 + m2.total_degree() > cap {
                    continue;
                }
                out.add_term(m1.product(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// `exp(self)` as the truncated Taylor series. Requires a vanishing
    /// constant term so that the series terminates: the `k`-th power's
    /// minimum degree grows with `k` and eventually clears the cap.
    pub fn exp_truncate(&self) -> Result<QPolynomial> {
        let unit = Monomial::unit(self.modes);
        if self.coefficient(&unit).norm() >= PURGE_TOL {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut sum = QPolynomial::one(self.modes, self.max_total_degree);
        let mut power = QPolynomial::one(self.modes, self.max_total_degree);
        for k in 1..=(self.max_total_degree.max(1)) {
            power = power.mul_truncate(self)?;
            power.scale(C64::new(1.0 / k as f64, 0.0));
            if power.is_empty() {
                break;
            }
            for (monomial, coeff) in &power.terms {
                sum.add_term(monomial.clone(), *coeff);
            }
        }
        Ok(sum)
    }

    /// Numerical value at a point, with `star` exponents applied to the
    /// conjugated coordinates.
    pub fn evaluate(&self, alpha: &[C64]) -> Result<C64> {
        if alpha.len() != self.modes {
            return Err(Error::DimensionMismatch { expected: self.modes, got: alpha.len() });
        }
        let mut total = C64::new(0.0, 0.0);
        for (monomial, coeff) in &self.terms {
            let mut value = *coeff;
            for (i, &a) in alpha.iter().enumerate() {
                value *= a.conj().powu(monomial.star[i] as u32);
                value *= a.powu(monomial.plain[i] as u32);
            }
            total += value;
        }
        Ok(total)
    }
}

/// Expand the symbol of the network unitary as the truncated exponential of
/// `conj(a)^T (S - I_sig) a` over all modes of the partition.
pub fn expand_network_symbol(
    s: &NetworkUnitary,
    partition: ModePartition,
    max_total_degree: usize,
) -> Result<QPolynomial> {
    let modes = partition.total();
    if s.dim() != modes {
        return Err(Error::DimensionMismatch { expected: modes, got: s.dim() });
    }
    let mut bilinear = QPolynomial::new(modes, max_total_degree);
    for i in 0..modes {
        for j in 0..modes {
            let mut value = s.entry(i, j);
            if i == j && partition.is_signal(i) {
                value -= C64::new(1.0, 0.0);
            }
            let mut star = vec![0u8; modes];
            let mut plain = vec![0u8; modes];
            star[i] = 1;
            plain[j] = 1;
            bilinear.add_term(Monomial::new(star, plain), value);
        }
    }
    bilinear.exp_truncate()
}

/// Select the terms of an expanded network symbol compatible with an
/// ancilla preparation/count pattern and strip the ancilla variables,
/// leaving the conditional operator's coefficient polynomial over the
/// signal modes. The star exponents of the ancilla block must match the
/// counted occupation, the plain exponents the prepared one; the square
/// root of the pattern's factorials converts symbol coefficients to
/// matrix-element normalization.
pub fn extract_conditional_symbol(
    u: &QPolynomial,
    partition: ModePartition,
    pattern: &AncillaPattern,
) -> Result<QPolynomial> {
    if u.modes() != partition.total() {
        return Err(Error::DimensionMismatch { expected: partition.total(), got: u.modes() });
    }
    if pattern.ancillas() != partition.n_ancilla() {
        return Err(Error::PatternLength {
            expected: partition.n_ancilla(),
            got: pattern.ancillas(),
        });
    }
    let n_signal = partition.n_signal();
    let mut norm = 1.0_f64;
    for &m in pattern.count.counts() {
        norm *= factorial(m as usize)?;
    }
    for &n in pattern.prepare.counts() {
        norm *= factorial(n as usize)?;
    }
    let norm = C64::new(norm.sqrt(), 0.0);

    let mut out = QPolynomial::new(n_signal, u.max_total_degree());
    for (monomial, coeff) in u.terms() {
        if monomial.star()[n_signal..] != *pattern.count.counts()
            || monomial.plain()[n_signal..] != *pattern.prepare.counts()
        {
            continue;
        }
        let signal = Monomial::new(
            monomial.star()[..n_signal].to_vec(),
            monomial.plain()[..n_signal].to_vec(),
        );
        out.add_term(signal, coeff * norm);
    }
    Ok(out)
}

/// Map a coefficient polynomial onto the conditional operator in a Fock
/// basis truncated at `n_max` total photons: each monomial becomes the
/// normally-ordered ladder product with the same exponents. All monomials
/// must shift photon-number sectors by the same amount, which is automatic
/// for polynomials produced by [`extract_conditional_symbol`].
pub fn symbol_to_operator(e: &QPolynomial, n_max: usize) -> Result<FockOperator> {
    let basis = FockBasis::new(e.modes(), n_max)?;
    let mut shift: Option<i64> = None;
    for (monomial, _) in e.terms() {
        let this = monomial.star_total() as i64 - monomial.plain_total() as i64;
        match shift {
            None => shift = Some(this),
            Some(prev) if prev != this => return Err(Error::MixedSectorShift(prev, this)),
            Some(_) => {}
        }
    }
    let mut op = FockOperator::zero(basis.clone(), shift.unwrap_or(0));
    for (monomial, &coeff) in e.terms() {
        let p = monomial.star();
        let q = monomial.plain();
        'state: for (col, t) in basis.states().iter().enumerate() {
            let mut row_occ = Vec::with_capacity(e.modes());
            let mut factor = 1.0_f64;
            for i in 0..e.modes() {
                let ti = t.counts()[i];
                if ti < q[i] {
                    continue 'state;
                }
                let ri = ti - q[i] + p[i];
                row_occ.push(ri);
                // <r| adag^p a^q |t> = sqrt(t! r!) / (t - q)!
                factor *= (factorial(ti as usize)? * factorial(ri as usize)?).sqrt()
                    / factorial((ti - q[i]) as usize)?;
            }
            let row = match basis.index_of(&Occupation::new(row_occ)) {
                Some(row) => row,
                None => continue,
            };
            op.add_entry(row, col, coeff * C64::new(factor, 0.0))?;
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{beam_splitter, phase_shifter, unitary_from_hamiltonian, HermitianGenerator};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_3;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> NetworkUnitary {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..dim {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        unitary_from_hamiltonian(&HermitianGenerator::new(m).unwrap()).unwrap()
    }

    #[test]
    fn mul_and_exp_on_single_variable() {
        // p = x*x (balanced degree-2 term), exp(p) has x*^k x^k / k!
        let mut p = QPolynomial::new(1, 8);
        p.add_term(Monomial::new(vec![1], vec![1]), c(1.0, 0.0));
        let e = p.exp_truncate().unwrap();
        for k in 0..=4u8 {
            let coeff = e.coefficient(&Monomial::new(vec![k], vec![k]));
            let expect = 1.0 / factorial(k as usize).unwrap();
            assert!((coeff - c(expect, 0.0)).norm() < 1e-15, "k = {k}");
        }
        // degree cap respected
        assert_eq!(e.coefficient(&Monomial::new(vec![5], vec![5])), c(0.0, 0.0));
    }

    #[test]
    fn exp_rejects_constant_term() {
        let p = QPolynomial::one(1, 4);
        assert!(matches!(p.exp_truncate(), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn mul_rejects_mode_mismatch() {
        let a = QPolynomial::one(1, 4);
        let b = QPolynomial::one(2, 4);
        assert!(matches!(a.mul_truncate(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cancellation_purges_terms() {
        let mut p = QPolynomial::new(1, 4);
        let m = Monomial::new(vec![1], vec![1]);
        p.add_term(m.clone(), c(0.5, 0.0));
        p.add_term(m.clone(), c(-0.5, 0.0));
        assert!(p.is_empty());
        assert_eq!(p.coefficient(&m), c(0.0, 0.0));
    }

    #[test]
    fn identity_network_symbol_is_one() {
        let partition = ModePartition::new(1, 0).unwrap();
        let s = NetworkUnitary::identity(1);
        let u = expand_network_symbol(&s, partition, 8).unwrap();
        assert_eq!(u.len(), 1);
        assert!((u.coefficient(&Monomial::unit(1)) - c(1.0, 0.0)).norm() < 1e-15);
        let op = symbol_to_operator(&u, 4).unwrap();
        assert!(op.max_abs_diff_identity_on(0..op.basis().len()) < 1e-15);
    }

    #[test]
    fn phase_shifter_symbol_reproduces_phases() {
        // no-ancilla network: E is U itself, diagonal with e^{-i phi t}
        let phi = 0.7;
        let partition = ModePartition::new(1, 0).unwrap();
        let s = phase_shifter(phi, 0, 1).unwrap();
        let n_max = 5;
        let u = expand_network_symbol(&s, partition, 2 * n_max).unwrap();
        let pattern = AncillaPattern::vacuum(0);
        let e = extract_conditional_symbol(&u, partition, &pattern).unwrap();
        let op = symbol_to_operator(&e, n_max).unwrap();
        let basis = op.basis().clone();
        for t in 0..=n_max {
            let idx = basis.index_of(&Occupation::new(vec![t as u8])).unwrap();
            let expect = c(0.0, -phi * t as f64).exp();
            assert!((op.entry(idx, idx) - expect).norm() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn vacuum_ancilla_beam_splitter_attenuates() {
        // one signal, one vacuum ancilla: E(0|0) = diag(cos^k theta)
        let theta = FRAC_PI_3;
        let partition = ModePartition::new(1, 1).unwrap();
        let s = beam_splitter(theta, 0, 1, 2).unwrap();
        let n_max = 6;
        let u = expand_network_symbol(&s, partition, 2 * n_max).unwrap();
        let e = extract_conditional_symbol(&u, partition, &AncillaPattern::vacuum(1)).unwrap();
        let op = symbol_to_operator(&e, n_max).unwrap();
        let basis = op.basis().clone();
        for k in 0..=n_max {
            let idx = basis.index_of(&Occupation::new(vec![k as u8])).unwrap();
            let expect = theta.cos().powi(k as i32);
            assert!((op.entry(idx, idx) - c(expect, 0.0)).norm() < 1e-12, "k = {k}");
        }
        assert_eq!(op.sector_shift(), 0);
    }

    #[test]
    fn expansion_monomials_are_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let dim = rng.random_range(2..=5);
            let s = random_unitary(&mut rng, dim);
            let partition = ModePartition::new(1, dim - 1).unwrap();
            let u = expand_network_symbol(&s, partition, 8).unwrap();
            assert!(u.len() > 1);
            for (monomial, _) in u.terms() {
                assert!(monomial.is_balanced(), "unbalanced monomial {monomial:?}");
            }
        }
    }

    #[test]
    fn extraction_shifts_sectors_by_pattern_imbalance() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let patterns: [(&[u8], &[u8]); 4] = [
            (&[0], &[0]),
            (&[1], &[0]),
            (&[0], &[2]),
            (&[2], &[1]),
        ];
        for _ in 0..6 {
            let s = random_unitary(&mut rng, 3);
            let partition = ModePartition::new(2, 1).unwrap();
            let u = expand_network_symbol(&s, partition, 10).unwrap();
            for (prepare, count) in patterns {
                let pattern = AncillaPattern::new(
                    Occupation::new(prepare.to_vec()),
                    Occupation::new(count.to_vec()),
                );
                let e = extract_conditional_symbol(&u, partition, &pattern).unwrap();
                assert!(!e.is_empty());
                for (monomial, _) in e.terms() {
                    let shift = monomial.star_total() as i64 - monomial.plain_total() as i64;
                    assert_eq!(shift, pattern.sector_shift());
                }
            }
        }
    }

    #[test]
    fn truncation_is_exact_below_the_cap() {
        // raising the cap must not change coefficients the lower cap reached
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = random_unitary(&mut rng, 3);
        let partition = ModePartition::new(2, 1).unwrap();
        let low = expand_network_symbol(&s, partition, 6).unwrap();
        let high = expand_network_symbol(&s, partition, 10).unwrap();
        assert!(high.len() > low.len());
        for (monomial, coeff) in low.terms() {
            assert!((high.coefficient(monomial) - coeff).norm() < 1e-14);
        }
    }

    #[test]
    fn evaluate_matches_scalar_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..10 {
            let s = random_unitary(&mut rng, 2);
            let partition = ModePartition::new(1, 1).unwrap();
            let u = expand_network_symbol(&s, partition, 20).unwrap();
            let alpha: Vec<C64> = (0..2)
                .map(|_| c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)))
                .collect();
            // direct scalar: exp(sum conj(a_i) M_ij a_j)
            let mut arg = c(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    let mut m = s.entry(i, j);
                    if i == j && partition.is_signal(i) {
                        m -= c(1.0, 0.0);
                    }
                    arg += alpha[i].conj() * m * alpha[j];
                }
            }
            let expect = arg.exp();
            let got = u.evaluate(&alpha).unwrap();
            assert!((got - expect).norm() < 1e-9, "got {got}, expect {expect}");
        }
    }

    #[test]
    fn pattern_length_is_checked() {
        let partition = ModePartition::new(1, 1).unwrap();
        let s = NetworkUnitary::identity(2);
        let u = expand_network_symbol(&s, partition, 4).unwrap();
        let bad = AncillaPattern::vacuum(2);
        assert!(matches!(
            extract_conditional_symbol(&u, partition, &bad),
            Err(Error::PatternLength { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn mixed_shift_is_rejected() {
        let mut p = QPolynomial::new(1, 4);
        p.add_term(Monomial::new(vec![1], vec![0]), c(1.0, 0.0));
        p.add_term(Monomial::new(vec![0], vec![1]), c(1.0, 0.0));
        assert!(matches!(symbol_to_operator(&p, 3), Err(Error::MixedSectorShift(-1, 1))));
    }

    #[test]
    fn ladder_monomial_matrix_elements() {
        // single monomial adag^2 a on one mode: <t+1| . |t> = t sqrt(t + 1)
        let mut p = QPolynomial::new(1, 4);
        p.add_term(Monomial::new(vec![2], vec![1]), c(1.0, 0.0));
        let op = symbol_to_operator(&p, 4).unwrap();
        assert_eq!(op.sector_shift(), 1);
        let basis = op.basis().clone();
        for t in 1..=3u8 {
            let col = basis.index_of(&Occupation::new(vec![t])).unwrap();
            let row = basis.index_of(&Occupation::new(vec![t + 1])).unwrap();
            let tf = t as f64;
            let expect = tf * (tf + 1.0).sqrt();
            assert!((op.entry(row, col) - c(expect, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn coherent_expectation_recovers_the_symbol() {
        // rebuild an operator from an extracted symbol, then compare its
        // normalized-coherent expectation against the symbol's value; both
        // sides share the same degree truncation, so the only discrepancy
        // is the coherent tail beyond the 16-photon basis, which at
        // |alpha| <= 1 sits around 1e-15 in probability weight
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let partition = ModePartition::new(2, 1).unwrap();
        let n_max = 16;
        let patterns = [
            AncillaPattern::new(Occupation::new(vec![0]), Occupation::new(vec![0])),
            AncillaPattern::new(Occupation::new(vec![1]), Occupation::new(vec![1])),
            AncillaPattern::new(Occupation::new(vec![1]), Occupation::new(vec![0])),
        ];
        for trial in 0..3 {
            let s = random_unitary(&mut rng, 3);
            let u = expand_network_symbol(&s, partition, 10).unwrap();
            for pattern in &patterns {
                let e = extract_conditional_symbol(&u, partition, pattern).unwrap();
                let a = symbol_to_operator(&e, n_max).unwrap();
                let basis = a.basis().clone();
                for _ in 0..10 {
                    let raw: Vec<C64> = (0..2)
                        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect();
                    let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    let scale = rng.random_range(0.2..1.0) / norm.max(1e-9);
                    let alpha: Vec<C64> = raw.iter().map(|z| z * scale).collect();

                    let weight: f64 = alpha.iter().map(|z| z.norm_sqr()).sum();
                    let gauss = (-0.5 * weight).exp();
                    let coherent: Vec<C64> = basis
                        .states()
                        .iter()
                        .map(|occ| {
                            let mut amp = c(gauss, 0.0);
                            for (i, &t) in occ.counts().iter().enumerate() {
                                amp *= alpha[i].powu(t as u32)
                                    / factorial(t as usize).unwrap().sqrt();
                            }
                            amp
                        })
                        .collect();
                    let mut expectation = c(0.0, 0.0);
                    for (row, col, value) in a.entries() {
                        expectation += coherent[row].conj() * value * coherent[col];
                    }
                    let direct = e.evaluate(&alpha).unwrap();
                    assert!(
                        (expectation - direct).norm() < 1e-6,
                        "trial {trial}: {expectation} vs {direct}"
                    );
                }
            }
        }
    }
}
