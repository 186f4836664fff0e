//! Datasets behind the figures and the speedup table.

use anyhow::{bail, ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qwalk::bounds::{
    conjecture_envelope, mixing_horizon_bound, quantum_mixing_threshold_with, QuantumMixingOptions,
};
use qwalk::classical::ClassicalWalk;
use qwalk::ctqw::QuantumWalk;
use qwalk::group::{pair_class, VertexIndex};
use qwalk::{classical_lower_bound, classical_mixing_time, conjecture_f, NormKind};

/// Vertex labels (1-based) of the plotted transition probability.
pub const FIGURE_PAIR: (usize, usize) = (1, 15);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1bRow {
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    #[serde(rename = "quantum_avg_P(1,15)")]
    pub quantum: Option<f64>,
    pub t: Option<u64>,
    #[serde(rename = "classical_P(1,15)")]
    pub classical: Option<f64>,
    pub reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1b {
    pub n: usize,
    pub rows: Vec<Figure1bRow>,
    /// `|P̄_T(1,15) − 1/2n|` at the largest `T`.
    pub quantum_endpoint_deviation: f64,
    /// `max − min` of the classical curve over `t ≤ 200`.
    pub classical_early_swing: f64,
}

/// `count` points per decade from `10^lo` to `10^hi`.
pub fn log_grid(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let steps = (hi - lo) as usize * per_decade;
    (0..=steps)
        .map(|k| 10f64.powf(lo as f64 + k as f64 / per_decade as f64))
        .collect()
}

pub fn default_horizon_grid() -> Vec<f64> {
    log_grid(0, 6, 25)
}

pub fn default_step_grid() -> Vec<u64> {
    (0..=400).collect()
}

pub fn run_figure_1b(n: usize, t_grid: &[u64], horizon_grid: &[f64]) -> Result<Figure1b> {
    let (p, q) = FIGURE_PAIR;
    let (i, j) = (
        VertexIndex::from_label(n, p)?.index(),
        VertexIndex::from_label(n, q)?.index(),
    );
    ensure!(!horizon_grid.is_empty() && !t_grid.is_empty(), "empty grid");
    if let Some(bad) = horizon_grid.iter().find(|&&h| !(h.is_finite() && h > 0.0)) {
        bail!("invalid horizon {bad} in grid");
    }
    ensure!(
        t_grid.windows(2).all(|w| w[0] < w[1]),
        "step grid must be strictly increasing"
    );

    let walk = QuantumWalk::new(n)?;
    let (delta, eps) = pair_class(n, i, j);
    let quantum: Vec<f64> = horizon_grid
        .par_iter()
        .map(|&h| walk.averaged_entry(delta, eps, h))
        .collect::<qwalk::Result<_>>()?;

    // Ā^t(i, j) depends only on the pair class, so read it off column 0.
    let classical_walk = ClassicalWalk::new(n)?;
    let offset = if eps == 1 { delta } else { delta + n };
    let mut col = classical_walk.column(0);
    let mut at = 0u64;
    let mut classical = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        while at < t {
            col = classical_walk.step(&col);
            at += 1;
        }
        classical.push(col[offset]);
    }

    let reference = 1.0 / (2 * n) as f64;
    let rows = (0..horizon_grid.len().max(t_grid.len()))
        .map(|k| Figure1bRow {
            horizon: horizon_grid.get(k).copied(),
            quantum: quantum.get(k).copied(),
            t: t_grid.get(k).copied(),
            classical: classical.get(k).copied(),
            reference,
        })
        .collect();
    let last = horizon_grid
        .iter()
        .zip(&quantum)
        .max_by(|a, b| a.0.total_cmp(b.0))
        .map(|(_, &v)| v)
        .unwrap_or(f64::NAN);
    let early: Vec<f64> = t_grid
        .iter()
        .zip(&classical)
        .filter(|(&t, _)| t <= 200)
        .map(|(_, &v)| v)
        .collect();
    let swing = early.iter().cloned().fold(f64::MIN, f64::max)
        - early.iter().cloned().fold(f64::MAX, f64::min);
    Ok(Figure1b {
        n,
        rows,
        quantum_endpoint_deviation: (last - reference).abs(),
        classical_early_swing: swing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub n: usize,
    pub p: usize,
    pub residue: usize,
    pub f_n: f64,
    #[serde(rename = "100n2ln5")]
    pub envelope_ln5: f64,
    #[serde(rename = "100n2ln")]
    pub envelope_ln: f64,
}

/// `f(n)` for every `n = 4p + residue ≤ n_max` with `n ≥ 5`; both residue
/// classes when `residue` is `None`.
pub fn run_conjecture_figures(n_max: usize, residue: Option<usize>) -> Result<Vec<ConjectureRow>> {
    let classes: Vec<usize> = match residue {
        None => vec![1, 3],
        Some(r @ (1 | 3)) => vec![r],
        Some(r) => bail!("residue must be 1 or 3, got {r}"),
    };
    let mut ns: Vec<usize> = classes
        .iter()
        .flat_map(|&r| (1..).map(move |p| 4 * p + r).take_while(|&n| n <= n_max))
        .collect();
    ns.sort_unstable();
    ns.into_par_iter()
        .map(|n| {
            let eval = conjecture_f(n)?;
            Ok(ConjectureRow {
                n,
                p: eval.p,
                residue: eval.residue,
                f_n: eval.total,
                envelope_ln5: conjecture_envelope(n, 5),
                envelope_ln: conjecture_envelope(n, 1),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub n: usize,
    pub classical_measured: f64,
    pub classical_lower_bound: f64,
    pub quantum_measured: f64,
    pub quantum_cap: f64,
    pub ratio: f64,
}

/// Classical `τ_mix(ε)` against the quantum threshold `T*(ε)` for each `n`.
pub fn run_speedup_table(n_list: &[usize], epsilon: f64) -> Result<Vec<SpeedupRow>> {
    n_list
        .iter()
        .map(|&n| {
            let classical = classical_mixing_time(n, epsilon, NormKind::Induced)?;
            let lower = classical_lower_bound(n, epsilon)?;
            let quantum = quantum_mixing_threshold_with(
                n,
                QuantumMixingOptions {
                    target: epsilon,
                    ..Default::default()
                },
            )?;
            let c = classical.threshold_time;
            let qt = quantum.report.threshold_time;
            Ok(SpeedupRow {
                n,
                classical_measured: c,
                classical_lower_bound: lower.exact,
                quantum_measured: qt,
                quantum_cap: mixing_horizon_bound(n),
                ratio: c / qt,
            })
        })
        .collect()
}
