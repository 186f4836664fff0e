//! Analytic spectrum of the normalized adjacency `Ā = A / 3`.
//!
//! Both diagonal blocks of `A` are the circulant `W + W^{n-1}`, diagonalized
//! by the Fourier vectors `v_m(k) = ω^{mk} / √n` with eigenvalue
//! `2 cos(2πm/n)`. Stacking `[v_m; ±v_m] / √2` gives the `2n` unit
//! eigenvectors of `Ā`:
//!
//! ```text
//! λ⁺_m = (1 + 2 cos(2πm/n)) / 3      x_m = [v_m;  v_m] / √2
//! λ⁻_m = (2 cos(2πm/n) − 1) / 3      y_m = [v_m; −v_m] / √2
//! ```
//!
//! The flat index used for listings is `j = m` on the `+` branch and
//! `j = m + n` on the `−` branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_order, invalid, QwalkError, Result};

/// Width of the band in which a cross-branch eigenvalue gap is treated as
/// undecidable.
pub const GAP_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// Symmetric combination `[v; v]`.
    Plus,
    /// Antisymmetric combination `[v; −v]`.
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// Fourier mode and branch of one eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EigenIndex {
    pub m: usize,
    pub branch: Branch,
}

impl EigenIndex {
    pub fn from_flat(n: usize, j: usize) -> Result<Self> {
        if j >= 2 * n {
            return Err(QwalkError::IndexOutOfRange {
                name: "j",
                value: j,
                bound: 2 * n,
            });
        }
        Ok(if j < n {
            Self {
                m: j,
                branch: Branch::Plus,
            }
        } else {
            Self {
                m: j - n,
                branch: Branch::Minus,
            }
        })
    }

    pub fn flat(&self, n: usize) -> usize {
        match self.branch {
            Branch::Plus => self.m,
            Branch::Minus => self.m + n,
        }
    }
}

/// `min(m, n − m)`: modes `m` and `n − m` share a cosine.
#[inline]
pub fn fold_mode(n: usize, m: usize) -> usize {
    m.min(n - m)
}

#[inline]
fn mode_cosine(n: usize, m: usize) -> f64 {
    // Folding first makes λ_m and λ_{n−m} bitwise identical.
    (2.0 * PI * fold_mode(n, m % n) as f64 / n as f64).cos()
}

#[inline]
fn branch_eigenvalue(cosine: f64, branch: Branch) -> f64 {
    (2.0 * cosine + branch.sign()) / 3.0
}

pub fn eigenvalue(n: usize, m: usize, branch: Branch) -> Result<f64> {
    check_order(n)?;
    if m >= n {
        return Err(QwalkError::IndexOutOfRange {
            name: "m",
            value: m,
            bound: n,
        });
    }
    Ok(branch_eigenvalue(mode_cosine(n, m), branch))
}

/// Component `i` of the unit eigenvector `(m, branch)`:
/// `ω^{ρ(i) m} σ / √(2n)` with `σ = −1` only on block 1 of the `−` branch.
pub fn eigenvector_component(n: usize, m: usize, branch: Branch, i: usize) -> Result<Complex64> {
    check_order(n)?;
    if m >= n {
        return Err(QwalkError::IndexOutOfRange {
            name: "m",
            value: m,
            bound: n,
        });
    }
    if i >= 2 * n {
        return Err(QwalkError::IndexOutOfRange {
            name: "vertex",
            value: i,
            bound: 2 * n,
        });
    }
    Ok(component(n, m, branch, i))
}

fn component(n: usize, m: usize, branch: Branch, i: usize) -> Complex64 {
    let sigma = if branch == Branch::Minus && i >= n {
        -1.0
    } else {
        1.0
    };
    let phase = 2.0 * PI * (((i % n) * m) % n) as f64 / n as f64;
    Complex64::from_polar(sigma / ((2 * n) as f64).sqrt(), phase)
}

/// Second largest eigenvalue of `Ā`, counted without the simple top
/// eigenvalue 1.
///
/// For `n ≥ 5` this is `λ⁺_1 = (1 + 2 cos(2π/n)) / 3`. At `n = 3` that value
/// is 0 and the largest remaining eigenvalue is `λ⁻_0 = 1/3`.
pub fn second_largest_eigenvalue(n: usize) -> Result<f64> {
    check_order(n)?;
    let plus = branch_eigenvalue(mode_cosine(n, 1), Branch::Plus);
    Ok(plus.max(1.0 / 3.0))
}

/// Lower bound on the classical threshold mixing time from the spectral gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalLowerBound {
    pub n: usize,
    pub epsilon: f64,
    pub lambda2: f64,
    /// `max(0, (1/(1 − λ₂) − 1) ln(1/2ε))` with the exact `λ₂`.
    pub exact: f64,
    /// `max(0, (3n²/4π² − 1) ln(1/2ε))`, the cosine-relaxed form.
    pub relaxed: f64,
}

pub fn classical_lower_bound(n: usize, epsilon: f64) -> Result<ClassicalLowerBound> {
    check_order(n)?;
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid("epsilon", format!("{epsilon} not in (0, 1/2)")));
    }
    let lambda2 = second_largest_eigenvalue(n)?;
    let log_term = (1.0 / (2.0 * epsilon)).ln();
    let exact = ((1.0 / (1.0 - lambda2) - 1.0) * log_term).max(0.0);
    let nf = n as f64;
    let relaxed = ((3.0 * nf * nf / (4.0 * PI * PI) - 1.0) * log_term).max(0.0);
    Ok(ClassicalLowerBound {
        n,
        epsilon,
        lambda2,
        exact,
        relaxed,
    })
}

/// Eigenvalues of `Ā` in flat-index order, with the symbolic equality test
/// used by every gap sum.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    n: usize,
    values: Vec<f64>,
    cosines: Vec<f64>,
}

impl Spectrum {
    pub fn new(n: usize) -> Result<Self> {
        check_order(n)?;
        let cosines: Vec<f64> = (0..n).map(|m| mode_cosine(n, m)).collect();
        let values = [Branch::Plus, Branch::Minus]
            .iter()
            .flat_map(|&b| cosines.iter().map(move |&c| branch_eigenvalue(c, b)))
            .collect();
        Ok(Self { n, values, cosines })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `e^{2πi/n}`.
    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / self.n as f64)
    }

    /// `cos(2πm/n)` for `m ∈ [0, n)`.
    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    /// All `2n` eigenvalues, `+` branch first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: EigenIndex) -> f64 {
        self.values[idx.flat(self.n)]
    }

    pub fn value_flat(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn component(&self, idx: EigenIndex, i: usize) -> Complex64 {
        component(self.n, idx.m, idx.branch, i)
    }

    /// Unit eigenvector for `idx` as a dense vector.
    pub fn eigenvector(&self, idx: EigenIndex) -> Vec<Complex64> {
        (0..2 * self.n).map(|i| self.component(idx, i)).collect()
    }

    pub fn indices(&self) -> impl Iterator<Item = EigenIndex> + '_ {
        (0..2 * self.n).map(move |j| EigenIndex::from_flat(self.n, j).expect("in range"))
    }

    /// `|λ_j − λ_k|` for flat indices, or `None` when the eigenvalues coincide.
    ///
    /// Within a branch the eigenvalues coincide exactly when the folded modes
    /// agree. Across branches `λ⁺_m = λ⁻_{m'}` would need
    /// `cos(2πm'/n) − cos(2πm/n) = 1`; no odd `n` realises it, and a gap
    /// inside [`GAP_GUARD`] is reported as an error rather than guessed.
    pub fn gap(&self, j: usize, k: usize) -> Result<Option<f64>> {
        let n = self.n;
        let (bj, mj) = (j / n, j % n);
        let (bk, mk) = (k / n, k % n);
        if bj == bk && fold_mode(n, mj) == fold_mode(n, mk) {
            return Ok(None);
        }
        let gap = (self.values[j] - self.values[k]).abs();
        if gap < GAP_GUARD {
            return Err(QwalkError::AmbiguousGap { n, j, k, gap });
        }
        Ok(Some(gap))
    }

    /// Whether `λ_j = λ_k` under the symbolic rule of [`Spectrum::gap`].
    pub fn coincide(&self, j: usize, k: usize) -> Result<bool> {
        Ok(self.gap(j, k)?.is_none())
    }

    /// Smallest nonzero gap over all eigenvalue pairs.
    pub fn min_gap(&self) -> Result<f64> {
        let mut best = f64::INFINITY;
        for j in 0..self.len() {
            for k in (j + 1)..self.len() {
                if let Some(g) = self.gap(j, k)? {
                    best = best.min(g);
                }
            }
        }
        Ok(best)
    }
}
