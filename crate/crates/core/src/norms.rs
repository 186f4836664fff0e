//! Matrix distances used by the mixing criteria.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, QwalkError, Result};
use crate::summation::compensated_sum;

/// Which matrix 1-norm a distance is measured in.
///
/// `Induced` is the maximum absolute column sum and is the default
/// everywhere. `Entrywise` sums all absolute entries; it is kept for
/// sensitivity comparisons only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    #[default]
    Induced,
    Entrywise,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Induced => f.write_str("induced"),
            NormKind::Entrywise => f.write_str("entrywise"),
        }
    }
}

impl FromStr for NormKind {
    type Err = QwalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(NormKind::Induced),
            "entrywise" => Ok(NormKind::Entrywise),
            other => Err(invalid("norm", format!("unknown norm kind {other:?}"))),
        }
    }
}

fn check_same_shape(m: &Array2<f64>, other: &Array2<f64>) -> Result<()> {
    if m.dim() != other.dim() {
        return Err(QwalkError::ShapeMismatch {
            left: m.dim(),
            right: other.dim(),
        });
    }
    Ok(())
}

/// `‖M − N‖₁` as the maximum over columns of `Σ_rows |M − N|`.
pub fn induced_one_norm_distance(m: &Array2<f64>, other: &Array2<f64>) -> Result<f64> {
    check_same_shape(m, other)?;
    Ok((0..m.ncols())
        .map(|c| {
            compensated_sum(
                m.column(c)
                    .iter()
                    .zip(other.column(c))
                    .map(|(a, b)| (a - b).abs()),
            )
        })
        .fold(0.0, f64::max))
}

pub fn entrywise_one_norm_distance(m: &Array2<f64>, other: &Array2<f64>) -> Result<f64> {
    check_same_shape(m, other)?;
    Ok(compensated_sum(
        m.iter().zip(other.iter()).map(|(a, b)| (a - b).abs()),
    ))
}

pub fn norm_distance(m: &Array2<f64>, other: &Array2<f64>, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Induced => induced_one_norm_distance(m, other),
        NormKind::Entrywise => entrywise_one_norm_distance(m, other),
    }
}

/// The rank-one matrix `π 1†` with uniform `π`.
pub fn uniform_projector(size: usize) -> Array2<f64> {
    Array2::from_elem((size, size), 1.0 / size as f64)
}

/// `d(M) = max_{j, j'} ½ ‖M(·, j) − M(·, j')‖₁`.
pub fn max_pairwise_column_distance(m: &Array2<f64>) -> f64 {
    let cols = m.ncols();
    (0..cols)
        .into_par_iter()
        .map(|j| {
            let cj = m.column(j);
            ((j + 1)..cols)
                .map(|k| {
                    0.5 * compensated_sum(cj.iter().zip(m.column(k)).map(|(a, b)| (a - b).abs()))
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `M^k` by repeated squaring.
pub fn matrix_power(m: &Array2<f64>, mut k: u64) -> Array2<f64> {
    let size = m.nrows();
    let mut result = Array2::<f64>::eye(size);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.dot(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.dot(&base);
        }
    }
    result
}
