//! Direct Fock-space evaluation of network matrix elements through matrix
//! permanents.
//!
//! This path shares no machinery with the symbol expansion in [`qsymbol`]:
//! a transition amplitude between occupation vectors is a permanent of the
//! mode matrix with rows and columns repeated according to the occupations.
//! Exponential in photon number, but exact per sector and therefore the
//! reference the series method is checked against.
//!
//! [`qsymbol`]: crate::qsymbol

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{factorial, AncillaPattern, FockBasis, FockOperator, Occupation};
use crate::network::{ModePartition, NetworkUnitary};

/// Largest matrix dimension accepted by [`permanent`]; the run time doubles
/// with every row beyond it.
pub const PERMANENT_LIMIT: usize = 20;

/// Permanent of a square matrix by Ryser's formula with Gray-code subset
/// ordering, O(2^n n). The empty matrix has permanent 1.
pub fn permanent(m: &DMatrix<C64>) -> Result<C64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if n > PERMANENT_LIMIT {
        return Err(Error::PermanentTooLarge { dim: n, limit: PERMANENT_LIMIT });
    }
    // per(M) = sum over column subsets S of (-1)^(n - |S|) prod_i sum_{j in S} M[i][j];
    // consecutive Gray codes differ by one column, so each subset costs O(n).
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1..(1u64 << n) {
        let next = k ^ (k >> 1);
        let toggled = (gray ^ next).trailing_zeros() as usize;
        if next & (1 << toggled) != 0 {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += m[(i, toggled)];
            }
        } else {
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= m[(i, toggled)];
            }
        }
        gray = next;
        let product: C64 = row_sums.iter().product();
        if (n as u32 - next.count_ones()).is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    Ok(total)
}

/// Transition amplitude `<out| U |in>` between occupation vectors of the
/// full network: the permanent of the mode matrix with row `i` repeated
/// `out[i]` times and column `j` repeated `in[j]` times, divided by the
/// square root of all occupation factorials. Zero whenever the totals
/// differ, since the network conserves photon number.
pub fn matrix_element(s: &NetworkUnitary, out: &Occupation, input: &Occupation) -> Result<C64> {
    if out.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: out.len() });
    }
    if input.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: input.len() });
    }
    if out.total() != input.total() {
        return Ok(C64::new(0.0, 0.0));
    }
    let t = out.total();
    if t > PERMANENT_LIMIT {
        return Err(Error::PermanentTooLarge { dim: t, limit: PERMANENT_LIMIT });
    }
    let rows: Vec<usize> = out
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
        .collect();
    let cols: Vec<usize> = input
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
        .collect();
    let repeated = DMatrix::from_fn(t, t, |r, c| s.entry(rows[r], cols[c]));
    let mut norm = 1.0_f64;
    for &c in out.counts() {
        norm *= factorial(c as usize)?;
    }
    for &c in input.counts() {
        norm *= factorial(c as usize)?;
    }
    Ok(permanent(&repeated)? / norm.sqrt())
}

/// The conditional operator on the signal modes, assembled element by
/// element from full-network transition amplitudes: row `k`, column `j` is
/// `<k ++ count| U |j ++ prepare>`.
pub fn oracle_conditional_operator(
    s: &NetworkUnitary,
    partition: ModePartition,
    pattern: &AncillaPattern,
    n_max: usize,
) -> Result<FockOperator> {
    if s.dim() != partition.total() {
        return Err(Error::DimensionMismatch { expected: partition.total(), got: s.dim() });
    }
    if pattern.ancillas() != partition.n_ancilla() {
        return Err(Error::PatternLength {
            expected: partition.n_ancilla(),
            got: pattern.ancillas(),
        });
    }
    let basis = FockBasis::new(partition.n_signal(), n_max)?;
    let shift = pattern.sector_shift();
    let mut op = FockOperator::zero(basis.clone(), shift);
    for (col, input) in basis.states().iter().enumerate() {
        let row_total = input.total() as i64 + shift;
        if row_total < 0 || row_total as usize > n_max {
            continue;
        }
        let full_input = input.concat(&pattern.prepare);
        for row in basis.sector(row_total as usize) {
            let full_out = basis.state(row).concat(&pattern.count);
            let value = matrix_element(s, &full_out, &full_input)?;
            if value.norm() >= 1e-15 {
                op.add_entry(row, col, value)?;
            }
        }
    }
    Ok(op)
}
