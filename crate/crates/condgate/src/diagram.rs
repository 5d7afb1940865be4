//! Graphviz rendering of the single-photon history decomposition.
//!
//! Each history term becomes one `subgraph cluster`, drawn as horizontal
//! mode rails running left (inputs) to right (outputs). The pass-through
//! term carries its amplitude on the ancilla rail; sandwich terms replace
//! the ancilla rail with two crossing edges — the prepared photon entering
//! a signal mode and the counted photon leaving one — each labeled with
//! the mode-matrix entry it contributes.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::{AncillaPattern, Occupation};
use crate::gates::histories_terms;
use crate::network::{ModePartition, NetworkUnitary};

/// Shortest round-trip decimal; the imaginary part is dropped when zero.
fn format_amplitude(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Render the history decomposition of the one-prepared/one-counted
/// pattern as a DOT digraph. Output is deterministic: terms appear in
/// their canonical order and floats use shortest round-trip formatting.
pub fn histories_dot(s: &NetworkUnitary, partition: ModePartition) -> Result<String> {
    let single = Occupation::new(vec![1]);
    let pattern = AncillaPattern::new(single.clone(), single);
    let terms = histories_terms(s, partition, &pattern)?;
    let n = partition.n_signal();
    let a = partition.ancilla_index(0);

    let mut dot = String::new();
    dot.push_str("digraph histories {\n");
    dot.push_str("  rankdir=LR;\n");
    dot.push_str("  labelloc=\"t\";\n");
    dot.push_str("  label=\"single-photon histories: prepare (1), count (1)\";\n");
    dot.push_str("  node [shape=point, width=0.06];\n");
    for (t, term) in terms.iter().enumerate() {
        dot.push('\n');
        writeln!(dot, "  subgraph cluster_term{t} {{").unwrap();
        writeln!(dot, "    label=\"{}\";", term.label).unwrap();
        for i in 0..n {
            writeln!(dot, "    t{t}_in_{i} -> t{t}_out_{i};").unwrap();
        }
        match (term.creation_mode, term.annihilation_mode) {
            (None, None) => {
                writeln!(
                    dot,
                    "    t{t}_in_{a} -> t{t}_out_{a} [label=\"{}\"];",
                    format_amplitude(term.amplitude)
                )
                .unwrap();
            }
            (Some(j), Some(k)) => {
                writeln!(
                    dot,
                    "    t{t}_in_{a} -> t{t}_out_{j} [label=\"s[{j}][{a}] = {}\"];",
                    format_amplitude(s.entry(j, a))
                )
                .unwrap();
                writeln!(
                    dot,
                    "    t{t}_in_{k} -> t{t}_out_{a} [label=\"s[{a}][{k}] = {}\"];",
                    format_amplitude(s.entry(a, k))
                )
                .unwrap();
            }
            _ => unreachable!("terms carry both indices or neither"),
        }
        dot.push_str("  }\n");
    }
    dot.push_str("}\n");
    Ok(dot)
}
