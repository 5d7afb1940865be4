//! Truncated Fock space over the signal modes: occupation vectors, the
//! canonical basis ordering, sparse sector-structured operators, and state
//! vectors.
//!
//! All operators built anywhere in this crate live on a [`FockBasis`] that
//! enumerates every occupation vector with total photon number up to
//! `max_total`, sorted by (total, lexicographic). Photon-number conservation
//! of the underlying network makes every operator block-structured: an
//! operator with sector shift *d* only connects occupations whose totals
//! differ by exactly *d*. [`FockOperator`] enforces that structure on
//! insertion.

use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Default cap on the number of basis states, overridable through the
/// `CONDGATE_MAX_BASIS` environment variable.
pub const DEFAULT_MAX_BASIS: usize = 20_000;

static FACTORIAL: LazyLock<[f64; 171]> = LazyLock::new(|| {
    let mut table = [1.0_f64; 171];
    for n in 1..=170 {
        table[n] = table[n - 1] * n as f64;
    }
    table
});

/// `n!` as a double, for `n <= 170`.
pub fn factorial(n: usize) -> Result<f64> {
    FACTORIAL
        .get(n)
        .copied()
        .ok_or(Error::FactorialOverflow { n })
}

/// Photon counts per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation {
    counts: Vec<u8>,
}

impl Occupation {
    pub fn new(counts: Vec<u8>) -> Self {
        Self { counts }
    }

    /// All modes empty.
    pub fn vacuum(modes: usize) -> Self {
        Self { counts: vec![0; modes] }
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total photon number.
    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    /// Concatenate signal and ancilla occupations into a full-network one.
    pub fn concat(&self, ancilla: &Occupation) -> Occupation {
        let mut counts = self.counts.clone();
        counts.extend_from_slice(&ancilla.counts);
        Occupation { counts }
    }
}

impl From<&[u8]> for Occupation {
    fn from(counts: &[u8]) -> Self {
        Self { counts: counts.to_vec() }
    }
}

impl<const N: usize> From<[u8; N]> for Occupation {
    fn from(counts: [u8; N]) -> Self {
        Self { counts: counts.to_vec() }
    }
}

/// An ancilla preparation/count pair: `prepare` photons are injected on the
/// ancilla modes before the network and `count` photons are detected after
/// it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncillaPattern {
    pub prepare: Occupation,
    pub count: Occupation,
}

impl AncillaPattern {
    pub fn new(prepare: Occupation, count: Occupation) -> Self {
        Self { prepare, count }
    }

    /// The all-vacuum pattern on `k` ancilla modes.
    pub fn vacuum(k: usize) -> Self {
        Self { prepare: Occupation::vacuum(k), count: Occupation::vacuum(k) }
    }

    pub fn ancillas(&self) -> usize {
        self.prepare.len()
    }

    /// Sector shift of the induced operator: total prepared minus total
    /// counted.
    pub fn sector_shift(&self) -> i64 {
        self.prepare.total() as i64 - self.count.total() as i64
    }
}

/// Number of occupation vectors of `modes` modes with total `<= max_total`,
/// i.e. C(max_total + modes, modes). Saturates at `usize::MAX` on overflow.
pub fn basis_size(modes: usize, max_total: usize) -> usize {
    let mut size: u128 = 1;
    for i in 1..=modes as u128 {
        size = size * (max_total as u128 + i) / i;
        if size > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    size as usize
}

fn basis_cap() -> usize {
    std::env::var("CONDGATE_MAX_BASIS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_BASIS)
}

/// The canonical truncated Fock basis: every [`Occupation`] of `modes` modes
/// with total photon number at most `max_total`, sorted by (total,
/// lexicographic). States of equal total are therefore contiguous.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: usize,
    max_total: usize,
    states: Vec<Occupation>,
    index: HashMap<Vec<u8>, usize>,
    sector_start: Vec<usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.max_total == other.max_total
    }
}

impl Eq for FockBasis {}

impl FockBasis {
    pub fn new(modes: usize, max_total: usize) -> Result<Self> {
        let cap = basis_cap();
        let states_needed = basis_size(modes, max_total);
        if states_needed > cap {
            return Err(Error::BasisTooLarge { states: states_needed, cap });
        }
        let mut states = Vec::with_capacity(states_needed);
        let mut sector_start = Vec::with_capacity(max_total + 2);
        for total in 0..=max_total {
            sector_start.push(states.len());
            push_compositions(total, modes, &mut Vec::with_capacity(modes), &mut states);
        }
        sector_start.push(states.len());
        let index = states
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.counts.clone(), i))
            .collect();
        Ok(Self { modes, max_total, states, index, sector_start })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &Occupation {
        &self.states[index]
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.index.get(occ.counts()).copied()
    }

    /// Index range of the fixed-total sector `total`.
    pub fn sector(&self, total: usize) -> std::ops::Range<usize> {
        if total > self.max_total {
            return self.states.len()..self.states.len();
        }
        self.sector_start[total]..self.sector_start[total + 1]
    }
}

fn push_compositions(
    total: usize,
    modes: usize,
    prefix: &mut Vec<u8>,
    out: &mut Vec<Occupation>,
) {
    if modes == 0 {
        if total == 0 {
            out.push(Occupation::new(prefix.clone()));
        }
        return;
    }
    if modes == 1 {
        prefix.push(total as u8);
        out.push(Occupation::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for c in 0..=total {
        prefix.push(c as u8);
        push_compositions(total - c, modes - 1, prefix, out);
        prefix.pop();
    }
}

/// A linear operator on the truncated signal Fock space, stored sparsely.
///
/// Every entry `(row, col)` satisfies `total(row) = total(col) +
/// sector_shift`; [`FockOperator::add_entry`] rejects anything else.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    basis: FockBasis,
    sector_shift: i64,
    entries: BTreeMap<(usize, usize), C64>,
}

impl FockOperator {
    pub fn zero(basis: FockBasis, sector_shift: i64) -> Self {
        Self { basis, sector_shift, entries: BTreeMap::new() }
    }

    pub fn identity(basis: FockBasis) -> Self {
        let entries = (0..basis.len()).map(|i| ((i, i), C64::new(1.0, 0.0))).collect();
        Self { basis, sector_shift: 0, entries }
    }

    /// Truncated annihilation operator for one mode: `|t> -> sqrt(t_m) |t - e_m>`.
    pub fn annihilation(basis: FockBasis, mode: usize) -> Result<Self> {
        if mode >= basis.modes() {
            return Err(Error::ModeIndexOutOfRange { index: mode, modes: basis.modes() });
        }
        let mut op = Self::zero(basis, -1);
        for (col, occ) in op.basis.states().iter().enumerate() {
            let c = occ.counts()[mode];
            if c == 0 {
                continue;
            }
            let mut counts = occ.counts().to_vec();
            counts[mode] -= 1;
            let row = op.basis.index_of(&Occupation::new(counts)).expect("in basis");
            op.entries.insert((row, col), C64::new((c as f64).sqrt(), 0.0));
        }
        Ok(op)
    }

    /// Truncated creation operator for one mode: `|t> -> sqrt(t_m + 1) |t + e_m>`,
    /// dropping targets beyond `max_total`.
    pub fn creation(basis: FockBasis, mode: usize) -> Result<Self> {
        if mode >= basis.modes() {
            return Err(Error::ModeIndexOutOfRange { index: mode, modes: basis.modes() });
        }
        let mut op = Self::zero(basis, 1);
        for (col, occ) in op.basis.states().iter().enumerate() {
            if occ.total() + 1 > op.basis.max_total() {
                continue;
            }
            let mut counts = occ.counts().to_vec();
            counts[mode] += 1;
            let row = op.basis.index_of(&Occupation::new(counts)).expect("in basis");
            let c = occ.counts()[mode] as f64;
            op.entries.insert((row, col), C64::new((c + 1.0).sqrt(), 0.0));
        }
        Ok(op)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn sector_shift(&self) -> i64 {
        self.sector_shift
    }

    /// Accumulate a coefficient, enforcing the sector structure. Entries that
    /// cancel to below 1e-15 in magnitude are dropped.
    pub fn add_entry(&mut self, row: usize, col: usize, value: C64) -> Result<()> {
        let shift = self.basis.state(row).total() as i64 - self.basis.state(col).total() as i64;
        if shift != self.sector_shift {
            return Err(Error::SectorStructure { row, col, shift: self.sector_shift });
        }
        let entry = self.entries.entry((row, col)).or_insert(C64::new(0.0, 0.0));
        *entry += value;
        if entry.norm() < 1e-15 {
            self.entries.remove(&(row, col));
        }
        Ok(())
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries.get(&(row, col)).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, state: &FockStateVector) -> Result<FockStateVector> {
        if self.basis != state.basis {
            return Err(Error::BasisMismatch);
        }
        let mut out = FockStateVector::zero(self.basis.clone());
        for (&(row, col), &v) in &self.entries {
            if let Some(&a) = state.amplitudes.get(&col) {
                let entry = out.amplitudes.entry(row).or_insert(C64::new(0.0, 0.0));
                *entry += v * a;
            }
        }
        out.amplitudes.retain(|_, a| a.norm() > 0.0);
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&(r, c), &v)| ((c, r), v.conj()))
            .collect();
        Self { basis: self.basis.clone(), sector_shift: -self.sector_shift, entries }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.basis != rhs.basis {
            return Err(Error::BasisMismatch);
        }
        // group rhs entries by row for the inner contraction
        let mut rhs_by_row: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
        for (&(r, c), &v) in &rhs.entries {
            rhs_by_row.entry(r).or_default().push((c, v));
        }
        let mut out = Self::zero(self.basis.clone(), self.sector_shift + rhs.sector_shift);
        for (&(r, k), &a) in &self.entries {
            if let Some(row) = rhs_by_row.get(&k) {
                for &(c, b) in row {
                    let entry = out.entries.entry((r, c)).or_insert(C64::new(0.0, 0.0));
                    *entry += a * b;
                }
            }
        }
        out.entries.retain(|_, v| v.norm() >= 1e-15);
        Ok(out)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&k, &v)| (k, v * factor))
            .filter(|(_, v)| v.norm() >= 1e-15)
            .collect();
        Self { basis: self.basis.clone(), sector_shift: self.sector_shift, entries }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.basis != rhs.basis {
            return Err(Error::BasisMismatch);
        }
        if self.sector_shift != rhs.sector_shift {
            return Err(Error::SectorShiftMismatch(self.sector_shift, rhs.sector_shift));
        }
        let mut out = self.clone();
        for (&(r, c), &v) in &rhs.entries {
            let entry = out.entries.entry((r, c)).or_insert(C64::new(0.0, 0.0));
            *entry += v;
        }
        out.entries.retain(|_, v| v.norm() >= 1e-15);
        Ok(out)
    }

    /// Largest elementwise magnitude of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        if self.basis != rhs.basis {
            return Err(Error::BasisMismatch);
        }
        let mut max = 0.0_f64;
        for (&k, &v) in &self.entries {
            max = max.max((v - rhs.entries.get(&k).copied().unwrap_or(C64::new(0.0, 0.0))).norm());
        }
        for (&k, &v) in &rhs.entries {
            if !self.entries.contains_key(&k) {
                max = max.max(v.norm());
            }
        }
        Ok(max)
    }

    /// Largest elementwise deviation from the identity, restricted to the
    /// index range `rows` on both axes.
    pub fn max_abs_diff_identity_on(&self, rows: std::ops::Range<usize>) -> f64 {
        let mut max = 0.0_f64;
        for i in rows.clone() {
            for j in rows.clone() {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                max = max.max((self.entry(i, j) - expect).norm());
            }
        }
        max
    }
}

/// A (generally unnormalized) state over the truncated signal Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockStateVector {
    basis: FockBasis,
    amplitudes: BTreeMap<usize, C64>,
}

impl FockStateVector {
    pub fn zero(basis: FockBasis) -> Self {
        Self { basis, amplitudes: BTreeMap::new() }
    }

    /// The basis state `|occ>`.
    pub fn basis_state(basis: FockBasis, occ: &Occupation) -> Result<Self> {
        let index = basis.index_of(occ).ok_or_else(|| Error::OccupationOutOfBasis {
            occ: occ.counts().to_vec(),
            modes: basis.modes(),
            max_total: basis.max_total(),
        })?;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(index, C64::new(1.0, 0.0));
        Ok(Self { basis, amplitudes })
    }

    pub fn from_amplitudes(
        basis: FockBasis,
        amplitudes: impl IntoIterator<Item = (Occupation, C64)>,
    ) -> Result<Self> {
        let mut state = Self::zero(basis);
        for (occ, a) in amplitudes {
            let index = state.basis.index_of(&occ).ok_or_else(|| Error::OccupationOutOfBasis {
                occ: occ.counts().to_vec(),
                modes: state.basis.modes(),
                max_total: state.basis.max_total(),
            })?;
            let entry = state.amplitudes.entry(index).or_insert(C64::new(0.0, 0.0));
            *entry += a;
        }
        state.amplitudes.retain(|_, a| a.norm() > 0.0);
        Ok(state)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.basis
            .index_of(occ)
            .and_then(|i| self.amplitudes.get(&i).copied())
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn amplitude_at(&self, index: usize) -> C64 {
        self.amplitudes.get(&index).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, C64)> + '_ {
        self.amplitudes.iter().map(|(&i, &a)| (self.basis.state(i), a))
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Highest occupied photon-number sector, or `None` for the zero state.
    pub fn max_occupied_sector(&self) -> Option<usize> {
        self.amplitudes.keys().map(|&i| self.basis.state(i).total()).max()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let amplitudes = self.amplitudes.iter().map(|(&i, &a)| (i, a * factor)).collect();
        Self { basis: self.basis.clone(), amplitudes }
    }

    /// Error if the norm is not 1 within 1e-10.
    pub fn check_normalized(&self) -> Result<()> {
        let deviation = (self.norm() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation, tol: NORM_TOL });
        }
        Ok(())
    }
}
