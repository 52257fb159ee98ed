//! Per-source characteristic graphs, greedy coloring, and entropy metrics.
//!
//! For a source `s`, two of its symbols must be told apart exactly when some
//! assignment of the remaining sources makes the target function produce
//! different output levels for them. Those pairs form the edges of the
//! characteristic graph; a proper coloring of it is the minimum structure the
//! encoder has to transmit. Colors, not symbols, go on the wire.
//!
//! Adjacency is stored as packed bitsets per vertex so the greedy pass does
//! O(1) edge tests even at 8-bit alphabets (256 vertices).

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantize::Alphabet;
use crate::target::OutcomeTable;

/// Conflict graph of one source: vertices are that source's symbols, edges
/// join symbols that can change the function output.
#[derive(Debug, Clone)]
pub struct CharacteristicGraph {
    source_index: usize,
    num_vertices: usize,
    words_per_row: usize,
    /// Row-major packed adjacency matrix; bit (u, v) set iff u ~ v.
    bits: Vec<u64>,
}

impl CharacteristicGraph {
    fn empty(source_index: usize, num_vertices: usize) -> Self {
        let words_per_row = num_vertices.div_ceil(64);
        Self {
            source_index,
            num_vertices,
            words_per_row,
            bits: vec![0u64; words_per_row * num_vertices.max(1)],
        }
    }

    fn set_edge(&mut self, u: usize, v: usize) {
        debug_assert_ne!(u, v);
        self.bits[u * self.words_per_row + v / 64] |= 1u64 << (v % 64);
        self.bits[v * self.words_per_row + u / 64] |= 1u64 << (u % 64);
    }

    pub fn source_index(&self) -> usize {
        self.source_index
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    /// Edges as (u, v) pairs with u < v, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.num_vertices {
            for v in (u + 1)..self.num_vertices {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        let set: usize = self.bits.iter().map(|w| w.count_ones() as usize).sum();
        set / 2
    }

    /// Build the characteristic graph of `source` from an outcome table.
    ///
    /// Two symbols are adjacent iff their output rows over the complement
    /// product differ anywhere, so the pass groups identical rows and joins
    /// vertices of different row classes. Under the uniform source model
    /// every complement assignment has positive probability, which makes
    /// this the exact edge set.
    pub fn build(table: &OutcomeTable, source: usize) -> Result<Self> {
        let sizes = table.sizes();
        if source >= sizes.len() {
            return Err(Error::IndexOutOfRange {
                index: source,
                len: sizes.len(),
            });
        }
        let n = sizes[source];
        let inner: usize = sizes[source + 1..].iter().product();
        let outer: usize = sizes[..source].iter().product();
        let outputs = table.outputs();

        // Row class per vertex: identical rows share a class id.
        let mut classes = vec![0usize; n];
        let mut seen: HashMap<Vec<u16>, usize> = HashMap::new();
        let mut row = Vec::with_capacity(outer * inner);
        for (u, class) in classes.iter_mut().enumerate() {
            row.clear();
            for o in 0..outer {
                let base = (o * n + u) * inner;
                row.extend_from_slice(&outputs[base..base + inner]);
            }
            let next = seen.len();
            *class = *seen.entry(row.clone()).or_insert(next);
        }

        let mut g = Self::empty(source, n);
        for u in 0..n {
            for v in (u + 1)..n {
                if classes[u] != classes[v] {
                    g.set_edge(u, v);
                }
            }
        }
        Ok(g)
    }
}

/// A proper vertex coloring with contiguous color ids `0..num_colors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    color_of: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    /// Wrap an explicit color assignment. Color ids must be exactly
    /// `{0, ..., max}` with every id used.
    pub fn from_colors(color_of: Vec<usize>) -> Result<Self> {
        let num_colors = color_of.iter().max().map(|&m| m + 1).unwrap_or(0);
        let mut used = vec![false; num_colors];
        for &c in &color_of {
            used[c] = true;
        }
        if let Some(missing) = used.iter().position(|&u| !u) {
            return Err(Error::IndexOutOfRange {
                index: missing,
                len: num_colors,
            });
        }
        Ok(Self {
            color_of,
            num_colors,
        })
    }

    pub fn color_of(&self) -> &[usize] {
        &self.color_of
    }

    pub fn color(&self, vertex: usize) -> usize {
        self.color_of[vertex]
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    /// Check properness against a graph.
    pub fn is_proper(&self, g: &CharacteristicGraph) -> bool {
        if self.color_of.len() != g.num_vertices() {
            return false;
        }
        for (u, v) in g.edges() {
            if self.color_of[u] == self.color_of[v] {
                return false;
            }
        }
        true
    }
}

/// Greedy coloring: vertices in ascending index order, each taking the
/// smallest color absent from its already-colored neighbors. Deterministic
/// by construction.
pub fn greedy_color(g: &CharacteristicGraph) -> Coloring {
    let n = g.num_vertices();
    let mut color_of = vec![0usize; n];
    let mut num_colors = if n == 0 { 0 } else { 1 };
    let mut used = vec![false; n.max(1)];
    for v in 0..n {
        for item in used.iter_mut().take(num_colors) {
            *item = false;
        }
        for u in 0..v {
            if g.has_edge(u, v) {
                used[color_of[u]] = true;
            }
        }
        let mut c = 0;
        while used[c] {
            c += 1;
        }
        color_of[v] = c;
        num_colors = num_colors.max(c + 1);
    }
    Coloring {
        color_of,
        num_colors,
    }
}

/// Shannon entropy (bits) of the color distribution induced by the symbol
/// probabilities: `H = sum_c p(c) * log2(1/p(c))` with
/// `p(c) = sum of probabilities of symbols colored c`.
///
/// At graph power 1 this is the rate the encoder reports; higher powers are
/// out of scope for per-sample control traffic.
pub fn chromatic_entropy(coloring: &Coloring, alphabet: &Alphabet) -> Result<f64> {
    if coloring.color_of().len() != alphabet.len() {
        return Err(Error::ArityMismatch {
            expected: coloring.color_of().len(),
            got: alphabet.len(),
        });
    }
    let mut mass = vec![0.0f64; coloring.num_colors()];
    for (v, &c) in coloring.color_of().iter().enumerate() {
        mass[c] += alphabet.probabilities()[v];
    }
    let h = mass
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>();
    // -0.0 from a deterministic color distribution normalizes to 0.0.
    Ok(h.max(0.0))
}

/// Percentage of raw source bits saved: `100 - entropy * 100 / source_bits`.
/// Negative values (entropy above the raw width) are returned as-is so the
/// caller can flag them.
pub fn compression_rate(entropy_bits: f64, source_bits: u32) -> f64 {
    100.0 - entropy_bits * 100.0 / source_bits as f64
}

/// JSON report for one colored source graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphReport {
    pub source: usize,
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub colors: Vec<usize>,
    pub num_colors: usize,
    pub entropy_bits: f64,
    pub compression_pct: f64,
}

impl GraphReport {
    pub fn new(
        g: &CharacteristicGraph,
        coloring: &Coloring,
        alphabet: &Alphabet,
        source_bits: u32,
    ) -> Result<Self> {
        let entropy_bits = chromatic_entropy(coloring, alphabet)?;
        Ok(Self {
            source: g.source_index(),
            num_vertices: g.num_vertices(),
            edges: g.edges(),
            colors: coloring.color_of().to_vec(),
            num_colors: coloring.num_colors(),
            entropy_bits,
            compression_pct: compression_rate(entropy_bits, source_bits),
        })
    }
}

/// DOT rendering of a colored graph, one node per symbol, color ids as
/// labels and a small fill palette for readability.
pub fn to_dot(name: &str, g: &CharacteristicGraph, coloring: &Coloring) -> String {
    const PALETTE: [&str; 8] = [
        "lightblue",
        "lightcoral",
        "palegreen",
        "gold",
        "plum",
        "lightsalmon",
        "aquamarine",
        "khaki",
    ];
    let mut s = String::new();
    let _ = writeln!(s, "graph {name} {{");
    let _ = writeln!(s, "  node [style=filled];");
    for v in 0..g.num_vertices() {
        let c = coloring.color(v);
        let _ = writeln!(
            s,
            "  v{v} [label=\"{v}/c{c}\" fillcolor={}];",
            PALETTE[c % PALETTE.len()]
        );
    }
    for (u, v) in g.edges() {
        let _ = writeln!(s, "  v{u} -- v{v};");
    }
    s.push_str("}\n");
    s
}
