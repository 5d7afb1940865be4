//! Shared fixtures for the integration suites: the balanced three-mode
//! network, seeded random-network generation, and an independent permanent
//! implementation.

#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use condgate::{
    beam_splitter, compose, phase_shifter, AncillaPattern, FockBasis, ModePartition,
    NetworkUnitary,
};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Balanced three-mode interferometer written as a single real orthogonal
/// mode matrix: rows/columns 0 and 1 are the signal modes, 2 is the
/// photon-counted ancilla. Heralding one photon in and one photon out of
/// the ancilla turns a |1,1> input into the benchmark 5/16 event.
pub fn balanced_three_mode() -> NetworkUnitary {
    let f = 1.0 / (2.0 * SQRT_2);
    let entries = [
        f * (SQRT_2 + 1.0),
        f * (SQRT_2 - 1.0),
        f * SQRT_2,
        f * (SQRT_2 - 1.0),
        f * (SQRT_2 + 1.0),
        -f * SQRT_2,
        f * SQRT_2,
        -f * SQRT_2,
        -2.0 * f,
    ];
    let m = DMatrix::from_row_slice(3, 3, &entries.map(|x| c(x, 0.0)));
    NetworkUnitary::new(m).unwrap()
}

/// Random circuit of 1..=6 elements (60% beam splitters, 40% phase
/// shifters) on a fixed mode count.
pub fn random_network_sized(
    rng: &mut ChaCha8Rng,
    modes: usize,
    n_signal: usize,
) -> (ModePartition, NetworkUnitary) {
    let partition = ModePartition::new(n_signal, modes - n_signal).unwrap();
    let count = rng.random_range(1..=6);
    let mut elements = Vec::with_capacity(count);
    for _ in 0..count {
        if rng.random_bool(0.6) {
            let i = rng.random_range(0..modes);
            let mut j = rng.random_range(0..modes - 1);
            if j >= i {
                j += 1;
            }
            let theta = rng.random_range(-PI..PI);
            elements.push(beam_splitter(theta, i, j, modes).unwrap());
        } else {
            let mode = rng.random_range(0..modes);
            let phi = rng.random_range(-PI..PI);
            elements.push(phase_shifter(phi, mode, modes).unwrap());
        }
    }
    (partition, compose(&elements).unwrap())
}

/// Random network with 2 to 4 modes and at least one ancilla.
pub fn random_network(rng: &mut ChaCha8Rng) -> (ModePartition, NetworkUnitary) {
    let modes = rng.random_range(2..=4);
    let n_signal = rng.random_range(1..modes);
    random_network_sized(rng, modes, n_signal)
}

/// Every (prepare, count) pair over `k` ancilla modes with both totals at
/// most `cap`, in canonical order.
pub fn patterns_up_to(k: usize, cap: usize) -> Vec<AncillaPattern> {
    let counts = FockBasis::new(k, cap).unwrap();
    let mut out = Vec::with_capacity(counts.len() * counts.len());
    for prepare in counts.states() {
        for count in counts.states() {
            out.push(AncillaPattern::new(prepare.clone(), count.clone()));
        }
    }
    out
}

/// Dense complex matrix with entries uniform in the unit square.
pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Permanent by explicit sum over all permutations.
pub fn naive_permanent(m: &DMatrix<C64>) -> C64 {
    fn go(m: &DMatrix<C64>, row: usize, used: &mut [bool], acc: C64, total: &mut C64) {
        if row == m.nrows() {
            *total += acc;
            return;
        }
        for col in 0..m.ncols() {
            if !used[col] {
                used[col] = true;
                go(m, row + 1, used, acc * m[(row, col)], total);
                used[col] = false;
            }
        }
    }
    let mut total = c(0.0, 0.0);
    let mut used = vec![false; m.ncols()];
    go(m, 0, &mut used, c(1.0, 0.0), &mut total);
    total
}
