//! The dihedral group `D_{2n}`, its Cayley graph for the generating set
//! `S = {a, a⁻¹, b}`, and the equivalent two-block semi-Cayley graph on `Z_n`.
//!
//! Elements are kept in the canonical form `b^s a^r` with `s ∈ {0, 1}` and
//! `r ∈ [0, n)`. The presentation `⟨a, b | aⁿ = b² = e, bab = a⁻¹⟩` gives
//!
//! ```text
//! (b^s a^r)(b^s' a^r') = b^(s+s') a^((-1)^s' r + r')
//! ```
//!
//! Vertex indices `0..2n` follow the semi-Cayley block ordering: block 0
//! holds rotations, block 1 holds reflections, and within a block the index
//! is the `Z_n` residue.

use std::fmt;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{check_order, QwalkError, Result};

/// Element `b^s a^r` of `D_{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DihedralElement {
    r: usize,
    s: u8,
    n: usize,
}

impl DihedralElement {
    pub fn new(n: usize, r: usize, s: u8) -> Result<Self> {
        check_order(n)?;
        if r >= n {
            return Err(QwalkError::IndexOutOfRange {
                name: "r",
                value: r,
                bound: n,
            });
        }
        if s > 1 {
            return Err(QwalkError::IndexOutOfRange {
                name: "s",
                value: s as usize,
                bound: 2,
            });
        }
        Ok(Self { r, s, n })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0)
    }

    /// The rotation generator `a`.
    pub fn rotation(n: usize) -> Result<Self> {
        Self::new(n, 1, 0)
    }

    /// The reflection generator `b`.
    pub fn reflection(n: usize) -> Result<Self> {
        Self::new(n, 0, 1)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> u8 {
        self.s
    }

    pub fn order_parameter(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.r == 0 && self.s == 0
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(QwalkError::MismatchedOrder {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let r = if other.s == 0 {
            (self.r + other.r) % n
        } else {
            (n - self.r + other.r) % n
        };
        Ok(Self {
            r,
            s: (self.s + other.s) % 2,
            n,
        })
    }

    pub fn inverse(&self) -> Self {
        // Reflections are involutions; rotations invert their exponent.
        let r = if self.s == 1 {
            self.r
        } else {
            (self.n - self.r) % self.n
        };
        Self {
            r,
            s: self.s,
            n: self.n,
        }
    }

    /// Position in the element enumeration `e, a, …, a^{n-1}, b, ba, …, ba^{n-1}`.
    pub fn element_index(&self) -> usize {
        self.s as usize * self.n + self.r
    }

    pub fn from_element_index(n: usize, index: usize) -> Result<Self> {
        check_order(n)?;
        if index >= 2 * n {
            return Err(QwalkError::IndexOutOfRange {
                name: "element index",
                value: index,
                bound: 2 * n,
            });
        }
        Ok(Self {
            r: index % n,
            s: (index / n) as u8,
            n,
        })
    }

    /// All `2n` elements in enumeration order.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        check_order(n)?;
        Ok((0..2 * n)
            .map(|i| Self {
                r: i % n,
                s: (i / n) as u8,
                n,
            })
            .collect())
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.s, self.r) {
            (0, 0) => write!(f, "e"),
            (0, 1) => write!(f, "a"),
            (0, r) => write!(f, "a^{r}"),
            (_, 0) => write!(f, "b"),
            (_, 1) => write!(f, "ba"),
            (_, r) => write!(f, "ba^{r}"),
        }
    }
}

/// A vertex of the semi-Cayley graph, `0 ≤ i < 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexIndex {
    index: usize,
    n: usize,
}

impl VertexIndex {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        check_order(n)?;
        if index >= 2 * n {
            return Err(QwalkError::IndexOutOfRange {
                name: "vertex",
                value: index,
                bound: 2 * n,
            });
        }
        Ok(Self { index, n })
    }

    /// Converts a 1-based user label `p ∈ [1, 2n]` into an index.
    pub fn from_label(n: usize, label: usize) -> Result<Self> {
        if label == 0 {
            return Err(QwalkError::IndexOutOfRange {
                name: "vertex label",
                value: 0,
                bound: 2 * n + 1,
            });
        }
        Self::new(n, label - 1)
    }

    pub fn label(&self) -> usize {
        self.index + 1
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Block `β(i) = ⌊i / n⌋`.
    pub fn block(&self) -> usize {
        self.index / self.n
    }

    /// Residue `ρ(i) = i mod n`.
    pub fn residue(&self) -> usize {
        self.index % self.n
    }

    pub fn order_parameter(&self) -> usize {
        self.n
    }
}

/// Offset and block parity of a vertex pair.
///
/// Every block-circulant quantity on the graph depends on `(i, j)` only
/// through `Δ = (ρ_j − ρ_i) mod n` and `ε = (−1)^{β_i + β_j}`.
pub fn pair_class(n: usize, i: usize, j: usize) -> (usize, i8) {
    let delta = (j % n + n - i % n) % n;
    let eps = if (i / n) == (j / n) { 1 } else { -1 };
    (delta, eps)
}

/// The isomorphism from group elements onto semi-Cayley vertices.
///
/// Rotations map to block 0 (`a^r ↦ r`) and reflections to block 1
/// (`ba^r ↦ n + r`). With the product above and the right-quotient edge rule
/// the cross edges join `a^r` and `ba^r`, so the reflection with exponent `r`
/// lands on residue `r`.
pub fn phi(x: &DihedralElement) -> VertexIndex {
    VertexIndex {
        index: x.s as usize * x.n + x.r,
        n: x.n,
    }
}

/// Inverse of [`phi`].
pub fn phi_inverse(v: &VertexIndex) -> DihedralElement {
    DihedralElement {
        r: v.residue(),
        s: v.block() as u8,
        n: v.n,
    }
}

/// `Γ(D_{2n}, {a, a⁻¹, b})` over element indices (see
/// [`DihedralElement::element_index`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CayleyGraph {
    n: usize,
    neighbors: Vec<Vec<usize>>,
}

impl CayleyGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn neighbors(&self, vertex: usize) -> &[usize] {
        &self.neighbors[vertex]
    }

    pub fn has_edge(&self, g: usize, h: usize) -> bool {
        self.neighbors[g].contains(&h)
    }

    /// Undirected edges `(g, h)` with `g < h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(3 * self.n);
        for (g, nbrs) in self.neighbors.iter().enumerate() {
            for &h in nbrs {
                if g < h {
                    out.push((g, h));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Builds the Cayley graph: `g ~ h` iff `g h⁻¹ ∈ S`.
///
/// `S` is treated as a set, so the neighbours of `h` are the distinct
/// elements of `{a h, a⁻¹ h, b h}`.
pub fn cayley_graph(n: usize) -> Result<CayleyGraph> {
    let elements = DihedralElement::all(n)?;
    let a = DihedralElement::rotation(n)?;
    let generators = [a, a.inverse(), DihedralElement::reflection(n)?];
    let mut neighbors = Vec::with_capacity(2 * n);
    for h in &elements {
        let mut nbrs = Vec::with_capacity(3);
        for s in &generators {
            let g = s.mul(h)?;
            debug_assert!(g.mul(&h.inverse())? == *s);
            let gi = g.element_index();
            if !nbrs.contains(&gi) {
                nbrs.push(gi);
            }
        }
        nbrs.sort_unstable();
        neighbors.push(nbrs);
    }
    Ok(CayleyGraph { n, neighbors })
}

/// Adjacency of `SC(Z_n; {1, n−1}, {1, n−1}, {0})` in block form
/// `[[W + W^{n−1}, I], [I, W + W^{n−1}]]`.
pub fn semi_cayley_adjacency(n: usize) -> Result<Array2<u8>> {
    check_order(n)?;
    let size = 2 * n;
    Ok(Array2::from_shape_fn((size, size), |(i, j)| {
        let (delta, eps) = pair_class(n, i, j);
        let adjacent = if eps == 1 {
            delta == 1 || delta == n - 1
        } else {
            delta == 0
        };
        adjacent as u8
    }))
}

/// Normalized adjacency `Ā = A / 3`.
pub fn normalized_adjacency(n: usize) -> Result<Array2<f64>> {
    Ok(semi_cayley_adjacency(n)?.mapv(|x| x as f64 / 3.0))
}
