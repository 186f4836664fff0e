//! Discrete-time simple random walk `Ā^t` and its threshold mixing time.
//!
//! The graph is vertex transitive and `Ā^t` is symmetric, so every column of
//! `Ā^t` is a permutation of column 0. Distances to stationarity are
//! therefore read off a single column, either from the spectral closed form
//!
//! ```text
//! Ā^t(i, 0) = (1/2n) Σ_m cos(2π m ρ_i / n) (λ⁺_m^t + ε λ⁻_m^t)
//! ```
//!
//! or by stepping that column with the sparse adjacency.

use std::f64::consts::PI;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{check_order, invalid, QwalkError, Result};
use crate::group::{normalized_adjacency, pair_class};
use crate::norms::{
    induced_one_norm_distance, matrix_power, max_pairwise_column_distance, uniform_projector,
    NormKind,
};
use crate::spectral::Spectrum;
use crate::summation::{compensated_sum, NeumaierSum};

/// `Ā^t` as a dense matrix.
#[derive(Debug, Clone)]
pub struct ClassicalWalkState {
    pub n: usize,
    pub t: u64,
    pub matrix: Array2<f64>,
}

pub fn classical_power(n: usize, t: u64) -> Result<ClassicalWalkState> {
    let a = normalized_adjacency(n)?;
    Ok(ClassicalWalkState {
        n,
        t,
        matrix: matrix_power(&a, t),
    })
}

/// Result of a threshold search.
#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub n: usize,
    pub epsilon: f64,
    pub norm_kind: NormKind,
    /// What is compared against `epsilon`, e.g. `half_induced`.
    pub criterion: String,
    pub threshold_time: f64,
    pub distance_at_threshold: f64,
    /// The last grid point before the threshold that failed the criterion.
    pub previous_time: Option<f64>,
    pub previous_distance: Option<f64>,
    /// Every `(t, distance)` evaluated by the search, in evaluation order.
    pub distance_series: Vec<(f64, f64)>,
    /// Upper end of the window over which the criterion was re-checked.
    pub horizon_checked_until: Option<f64>,
}

/// Options for [`classical_mixing_time_with`].
#[derive(Debug, Clone, Copy)]
pub struct ClassicalMixingOptions {
    /// The criterion must keep holding on `[T, multiplier · T]`.
    pub horizon_multiplier: u64,
    pub step_cap: u64,
}

impl Default for ClassicalMixingOptions {
    fn default() -> Self {
        Self {
            horizon_multiplier: 4,
            step_cap: 1 << 40,
        }
    }
}

/// Column-0 view of the simple random walk on `Γ(D_{2n})`.
#[derive(Debug, Clone)]
pub struct ClassicalWalk {
    n: usize,
    spectrum: Spectrum,
    /// `cos(2πk/n)`.
    cos_table: Vec<f64>,
}

impl ClassicalWalk {
    pub fn new(n: usize) -> Result<Self> {
        check_order(n)?;
        Ok(Self {
            n,
            spectrum: Spectrum::new(n)?,
            cos_table: (0..n)
                .map(|k| (2.0 * PI * k as f64 / n as f64).cos())
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Values of `Ā^t` per class `(Δ, ε)`: `[same block, cross block]`.
    pub fn class_values(&self, t: u64) -> [Vec<f64>; 2] {
        let n = self.n;
        let vals = self.spectrum.values();
        let pow = |x: f64| {
            if t <= i32::MAX as u64 {
                x.powi(t as i32)
            } else {
                x.powf(t as f64)
            }
        };
        let plus: Vec<f64> = (0..n).map(|m| pow(vals[m])).collect();
        let minus: Vec<f64> = (0..n).map(|m| pow(vals[m + n])).collect();
        let mut same = Vec::with_capacity(n);
        let mut cross = Vec::with_capacity(n);
        for delta in 0..n {
            let mut s = NeumaierSum::new();
            let mut c = NeumaierSum::new();
            for m in 0..n {
                let w = self.cos_table[(m * delta) % n];
                s.add(w * (plus[m] + minus[m]));
                c.add(w * (plus[m] - minus[m]));
            }
            same.push(s.value() / (2 * n) as f64);
            cross.push(c.value() / (2 * n) as f64);
        }
        [same, cross]
    }

    /// Column 0 of `Ā^t` from the spectral closed form.
    pub fn column(&self, t: u64) -> Vec<f64> {
        let classes = self.class_values(t);
        self.expand_column(&classes)
    }

    fn expand_column(&self, classes: &[Vec<f64>; 2]) -> Vec<f64> {
        (0..2 * self.n)
            .map(|i| {
                let (delta, eps) = pair_class(self.n, 0, i);
                classes[(eps != 1) as usize][delta]
            })
            .collect()
    }

    /// One application of `Ā` to a column vector.
    pub fn step(&self, col: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..2 * n)
            .map(|i| {
                let (b, r) = (i / n, i % n);
                let left = b * n + (r + n - 1) % n;
                let right = b * n + (r + 1) % n;
                let other = (1 - b) * n + r;
                (col[left] + col[right] + col[other]) / 3.0
            })
            .collect()
    }

    /// `‖Ā^t − π1†‖` from column 0.
    pub fn distance_from_column(&self, col: &[f64], kind: NormKind) -> f64 {
        let size = 2 * self.n;
        let pi = 1.0 / size as f64;
        let colsum = compensated_sum(col.iter().map(|x| (x - pi).abs()));
        match kind {
            NormKind::Induced => colsum,
            NormKind::Entrywise => colsum * size as f64,
        }
    }

    pub fn distance(&self, t: u64, kind: NormKind) -> f64 {
        self.distance_from_column(&self.column(t), kind)
    }

    /// `d(Ā^t)` from column 0, comparing it against every other column.
    pub fn pairwise_column_distance(&self, col: &[f64]) -> f64 {
        let n = self.n;
        // Class values are recoverable from column 0 since Δ(0, i) = ρ_i.
        let value = |delta: usize, eps: i8| if eps == 1 { col[delta] } else { col[n + delta] };
        (1..2 * n)
            .map(|j| {
                0.5 * compensated_sum((0..2 * n).map(|i| {
                    let (d, e) = pair_class(n, j, i);
                    (col[i] - value(d, e)).abs()
                }))
            })
            .fold(0.0, f64::max)
    }
}

/// Smallest `t` with `½‖Ā^t − π1†‖ ≤ ε` that keeps holding on `[t, 4t]`.
pub fn classical_mixing_time(n: usize, epsilon: f64, kind: NormKind) -> Result<MixingReport> {
    classical_mixing_time_with(n, epsilon, kind, ClassicalMixingOptions::default())
}

pub fn classical_mixing_time_with(
    n: usize,
    epsilon: f64,
    kind: NormKind,
    opts: ClassicalMixingOptions,
) -> Result<MixingReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid("epsilon", format!("{epsilon} not in (0, 1/2)")));
    }
    if opts.horizon_multiplier < 1 {
        return Err(invalid("horizon_multiplier", "must be at least 1"));
    }
    let walk = ClassicalWalk::new(n)?;
    let mut series = Vec::new();
    let eval = |t: u64, series: &mut Vec<(f64, f64)>| {
        let d = 0.5 * walk.distance(t, kind);
        series.push((t as f64, d));
        d
    };

    // Doubling then bisection; `lo` always fails, `hi` always passes.
    let mut lo = 0u64;
    let mut lo_dist = eval(0, &mut series);
    if lo_dist <= epsilon {
        return Err(invalid("epsilon", "criterion already holds at t = 0"));
    }
    loop {
        let mut hi = lo.max(1);
        let mut hi_dist = eval(hi, &mut series);
        while hi_dist > epsilon {
            lo = hi;
            lo_dist = hi_dist;
            hi = hi.checked_mul(2).filter(|&h| h <= opts.step_cap).ok_or(
                QwalkError::NoConvergence {
                    cap: opts.step_cap as f64,
                },
            )?;
            hi_dist = eval(hi, &mut series);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let d = eval(mid, &mut series);
            if d <= epsilon {
                hi = mid;
                hi_dist = d;
            } else {
                lo = mid;
                lo_dist = d;
            }
        }

        // Re-check the window by stepping the column forward.
        let until = hi
            .saturating_mul(opts.horizon_multiplier)
            .min(opts.step_cap);
        let mut col = walk.column(hi);
        let mut violation = None;
        for t in (hi + 1)..=until {
            col = walk.step(&col);
            let d = 0.5 * walk.distance_from_column(&col, kind);
            if d > epsilon {
                violation = Some((t, d));
                break;
            }
        }
        match violation {
            None => {
                return Ok(MixingReport {
                    n,
                    epsilon,
                    norm_kind: kind,
                    criterion: format!("half_{kind}"),
                    threshold_time: hi as f64,
                    distance_at_threshold: hi_dist,
                    previous_time: Some(lo as f64),
                    previous_distance: Some(lo_dist),
                    distance_series: series,
                    horizon_checked_until: Some(until as f64),
                });
            }
            Some((t, d)) => {
                series.push((t as f64, d));
                lo = t;
                lo_dist = d;
            }
        }
    }
}

/// `d(Ā^{a+b}) ≤ d(Ā^a) d(Ā^b)` up to `1e-10`.
pub fn submultiplicativity_check(n: usize, a: u64, b: u64) -> Result<bool> {
    let base = normalized_adjacency(n)?;
    let da = max_pairwise_column_distance(&matrix_power(&base, a));
    let db = max_pairwise_column_distance(&matrix_power(&base, b));
    let dab = max_pairwise_column_distance(&matrix_power(&base, a + b));
    Ok(dab <= da * db + 1e-10)
}

/// If `d(M) ≤ 1/2e`, checks `‖M^{T'} − π1†‖₁ ≤ ε` at `T' = ⌈ln(1/ε)⌉`.
///
/// Returns `None` when the premise does not hold.
pub fn repeated_walk_check(m: &Array2<f64>, epsilon: f64) -> Result<Option<bool>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("{epsilon} not in (0, 1)")));
    }
    if max_pairwise_column_distance(m) > 1.0 / (2.0 * std::f64::consts::E) {
        return Ok(None);
    }
    let reps = (1.0 / epsilon).ln().ceil().max(1.0) as u64;
    let power = matrix_power(m, reps);
    let dist = induced_one_norm_distance(&power, &uniform_projector(m.nrows()))?;
    Ok(Some(dist <= epsilon))
}
