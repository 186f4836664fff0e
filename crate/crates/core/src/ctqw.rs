//! Continuous-time quantum walk `U(t) = e^{iĀt}`.
//!
//! Every quantity here is block circulant: the amplitude from `i` to `j`
//! only depends on `Δ = (ρ_j − ρ_i) mod n` and `ε = (−1)^{β_i + β_j}`,
//!
//! ```text
//! ⟨j|U(t)|i⟩ = (1/2n) Σ_m ω^{mΔ} (e^{iλ⁺_m t} + ε e^{iλ⁻_m t}).
//! ```
//!
//! Time averages over `[0, T]` are taken in closed form with the kernel
//! `Φ_T(x) = (e^{ixT} − 1)/(ixT)`, so no quadrature error enters the
//! mixing-threshold measurements.

use ndarray::Array2;
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_order, invalid, QwalkError, Result};
use crate::group::pair_class;
use crate::norms::NormKind;
use crate::spectral::{fold_mode, Spectrum, GAP_GUARD};
use crate::summation::{compensated_sum, ComplexSum};

/// Largest `n` for which [`propagator_oracle`] builds the dense `U(t)`.
pub const DEFAULT_ORACLE_CAP: usize = 512;

/// Closed-form walk on `Γ(D_{2n}, {a, a⁻¹, b})`.
#[derive(Debug, Clone)]
pub struct QuantumWalk {
    n: usize,
    spectrum: Spectrum,
    /// `ω^k` for `k ∈ [0, n)`.
    roots: Vec<Complex64>,
}

impl QuantumWalk {
    pub fn new(n: usize) -> Result<Self> {
        let spectrum = Spectrum::new(n)?;
        let roots = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        Ok(Self { n, spectrum, roots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= 2 * self.n {
            return Err(QwalkError::IndexOutOfRange {
                name: "vertex",
                value: v,
                bound: 2 * self.n,
            });
        }
        Ok(())
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid(
                "t",
                format!("{t} is not a finite nonnegative time"),
            ));
        }
        Ok(())
    }

    /// Per-mode factors `e^{iλ⁺_m t} + ε e^{iλ⁻_m t}` for both signs of `ε`.
    fn mode_factors(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let values = self.spectrum.values();
        let mut same = Vec::with_capacity(n);
        let mut cross = Vec::with_capacity(n);
        for m in 0..n {
            let p = Complex64::from_polar(1.0, values[m] * t);
            let q = Complex64::from_polar(1.0, values[m + n] * t);
            same.push(p + q);
            cross.push(p - q);
        }
        (same, cross)
    }

    fn class_amplitude(&self, factors: &[Complex64], delta: usize) -> Complex64 {
        let n = self.n;
        let mut acc = ComplexSum::new();
        for (m, f) in factors.iter().enumerate() {
            acc.add(self.roots[(m * delta) % n] * f);
        }
        acc.value() / (2 * n) as f64
    }

    /// `⟨j|U(t)|i⟩`.
    pub fn amplitude(&self, i: usize, j: usize, t: f64) -> Result<Complex64> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Self::check_time(t)?;
        let (same, cross) = self.mode_factors(t);
        let (delta, eps) = pair_class(self.n, i, j);
        let factors = if eps == 1 { &same } else { &cross };
        Ok(self.class_amplitude(factors, delta))
    }

    /// `P_t(i, j) = |⟨j|U(t)|i⟩|²`.
    pub fn probability(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        Ok(self.amplitude(i, j, t)?.norm_sqr())
    }

    /// Probabilities for every `(Δ, ε)` class at time `t`, indexed
    /// `[same-block Δ values, cross-block Δ values]`.
    pub fn class_probabilities(&self, t: f64) -> Result<[Vec<f64>; 2]> {
        Self::check_time(t)?;
        let (same, cross) = self.mode_factors(t);
        let same_p = (0..self.n)
            .map(|d| self.class_amplitude(&same, d).norm_sqr())
            .collect();
        let cross_p = (0..self.n)
            .map(|d| self.class_amplitude(&cross, d).norm_sqr())
            .collect();
        Ok([same_p, cross_p])
    }

    /// The outcome distribution `P_t(i, ·)` of measuring after time `t`.
    pub fn transition_row(&self, i: usize, t: f64) -> Result<Vec<f64>> {
        self.check_vertex(i)?;
        let classes = self.class_probabilities(t)?;
        Ok((0..2 * self.n)
            .map(|j| {
                let (delta, eps) = pair_class(self.n, i, j);
                classes[(eps != 1) as usize][delta]
            })
            .collect())
    }

    /// Dense `P_t`.
    pub fn probability_matrix(&self, t: f64) -> Result<Array2<f64>> {
        let classes = self.class_probabilities(t)?;
        let n = self.n;
        Ok(Array2::from_shape_fn((2 * n, 2 * n), |(i, j)| {
            let (delta, eps) = pair_class(n, i, j);
            classes[(eps != 1) as usize][delta]
        }))
    }

    /// Signed difference `λ_a − λ_b`, or `None` when the eigenvalues coincide.
    fn difference(&self, a: usize, b: usize) -> Result<Option<f64>> {
        Ok(self
            .spectrum
            .gap(a, b)?
            .map(|_| self.spectrum.value_flat(a) - self.spectrum.value_flat(b)))
    }

    /// `P̄_T` value for class `(Δ, ε)` by the direct double sum over
    /// eigenpairs, returned before the imaginary part is dropped.
    pub fn averaged_entry_complex(&self, delta: usize, eps: i8, horizon: f64) -> Result<Complex64> {
        check_horizon(horizon)?;
        if delta >= self.n {
            return Err(QwalkError::IndexOutOfRange {
                name: "delta",
                value: delta,
                bound: self.n,
            });
        }
        if eps != 1 && eps != -1 {
            return Err(invalid("eps", format!("{eps} is not ±1")));
        }
        let n = self.n;
        let mut acc = ComplexSum::new();
        for a in 0..2 * n {
            let sa = if a >= n { eps as f64 } else { 1.0 };
            for b in 0..2 * n {
                let sb = if b >= n { eps as f64 } else { 1.0 };
                let kernel = match self.difference(a, b)? {
                    None => Complex64::new(1.0, 0.0),
                    Some(x) => averaging_kernel(x, horizon),
                };
                let phase = self.roots[((a % n) * delta + (n - b % n) * delta) % n];
                acc.add(phase * kernel * (sa * sb));
            }
        }
        Ok(acc.value() / (4 * n * n) as f64)
    }

    /// `P̄_T` value for class `(Δ, ε)` by the direct `O(n²)` double sum.
    pub fn averaged_entry(&self, delta: usize, eps: i8, horizon: f64) -> Result<f64> {
        Ok(self.averaged_entry_complex(delta, eps, horizon)?.re)
    }

    /// All `2n` values of `P̄_T` in `O(n²)`.
    ///
    /// Grouping the eigenpair double sum by the mode offset
    /// `d = m − m' (mod n)` reduces it to two length-`n` offset profiles and
    /// a discrete Fourier sum over `Δ`. Within a branch
    /// `λ_m − λ_{m'} = (2/3)(c_m − c_{m'})`; across branches the difference
    /// shifts by `±2/3`.
    pub fn averaged_matrix(&self, horizon: f64) -> Result<AveragedWalkMatrix> {
        check_horizon(horizon)?;
        let n = self.n;
        let cos = self.spectrum.cosines();
        let profiles: Vec<Result<(Complex64, Complex64)>> = (0..n)
            .into_par_iter()
            .map(|d| {
                let mut within = ComplexSum::new();
                let mut across = ComplexSum::new();
                for m in 0..n {
                    let mp = (m + n - d) % n;
                    let base = 2.0 * (cos[m] - cos[mp]) / 3.0;
                    if fold_mode(n, m) == fold_mode(n, mp) {
                        within.add(Complex64::new(2.0, 0.0));
                    } else {
                        within.add(averaging_kernel(base, horizon) * 2.0);
                    }
                    for (x, (a, b)) in [
                        (base + 2.0 / 3.0, (m, mp + n)),
                        (base - 2.0 / 3.0, (m + n, mp)),
                    ] {
                        if x.abs() < GAP_GUARD {
                            return Err(QwalkError::AmbiguousGap {
                                n,
                                j: a,
                                k: b,
                                gap: x.abs(),
                            });
                        }
                        across.add(averaging_kernel(x, horizon));
                    }
                }
                Ok((within.value(), across.value()))
            })
            .collect();
        let profiles = profiles.into_iter().collect::<Result<Vec<_>>>()?;
        let norm = (4 * n * n) as f64;
        let mut same_block = Vec::with_capacity(n);
        let mut cross_block = Vec::with_capacity(n);
        let mut max_imag = 0.0f64;
        for delta in 0..n {
            let mut same = ComplexSum::new();
            let mut cross = ComplexSum::new();
            for (d, (within, across)) in profiles.iter().enumerate() {
                let w = self.roots[(d * delta) % n];
                same.add(w * (within + across));
                cross.add(w * (within - across));
            }
            let (s, c) = (same.value() / norm, cross.value() / norm);
            max_imag = max_imag.max(s.im.abs()).max(c.im.abs());
            same_block.push(s.re);
            cross_block.push(c.re);
        }
        Ok(AveragedWalkMatrix {
            n,
            horizon,
            same_block,
            cross_block,
            max_discarded_imag: max_imag,
        })
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(invalid(
            "T",
            format!("{horizon} is not a positive finite horizon"),
        ));
    }
    Ok(())
}

/// `(1/T) ∫₀^T e^{ixt} dt = e^{ixT/2} sinc(xT/2)`, equal to 1 at `x = 0`.
pub fn averaging_kernel(x: f64, horizon: f64) -> Complex64 {
    let half = 0.5 * x * horizon;
    let sinc = if half.abs() < 1e-4 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    Complex64::from_polar(sinc, half)
}

/// `⟨j|e^{iĀt}|i⟩` on `Γ(D_{2n})`.
pub fn amplitude(n: usize, i: usize, j: usize, t: f64) -> Result<Complex64> {
    QuantumWalk::new(n)?.amplitude(i, j, t)
}

/// `P_t(i, j)`.
pub fn probability(n: usize, i: usize, j: usize, t: f64) -> Result<f64> {
    QuantumWalk::new(n)?.probability(i, j, t)
}

/// `P̄_T` entry for class `(Δ, ε)` by the direct eigenpair double sum.
pub fn averaged_entry(n: usize, delta: usize, eps: i8, horizon: f64) -> Result<f64> {
    QuantumWalk::new(n)?.averaged_entry(delta, eps, horizon)
}

/// `P̄_T` for all classes.
pub fn averaged_matrix(n: usize, horizon: f64) -> Result<AveragedWalkMatrix> {
    QuantumWalk::new(n)?.averaged_matrix(horizon)
}

/// Dense `U(t) = Σ e^{iλt} |v⟩⟨v|` from the unit eigenpairs, as an
/// independent check on the closed-form amplitudes.
pub fn propagator_oracle(n: usize, t: f64) -> Result<Array2<Complex64>> {
    propagator_oracle_with_cap(n, t, DEFAULT_ORACLE_CAP)
}

pub fn propagator_oracle_with_cap(n: usize, t: f64, cap: usize) -> Result<Array2<Complex64>> {
    check_order(n)?;
    if n > cap {
        return Err(QwalkError::CapExceeded { n, cap });
    }
    QuantumWalk::check_time(t)?;
    let spec = Spectrum::new(n)?;
    let size = 2 * n;
    let mut u = Array2::<Complex64>::zeros((size, size));
    for idx in spec.indices() {
        let v = spec.eigenvector(idx);
        let phase = Complex64::from_polar(1.0, spec.value(idx) * t);
        for r in 0..size {
            let vr = v[r] * phase;
            for c in 0..size {
                u[[r, c]] += vr * v[c].conj();
            }
        }
    }
    Ok(u)
}

/// Time-averaged transition matrix `P̄_T`, stored as its `2n` distinct values.
#[derive(Debug, Clone, Serialize)]
pub struct AveragedWalkMatrix {
    n: usize,
    horizon: f64,
    same_block: Vec<f64>,
    cross_block: Vec<f64>,
    max_discarded_imag: f64,
}

impl AveragedWalkMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `g(Δ, ε)`.
    pub fn value(&self, delta: usize, eps: i8) -> f64 {
        if eps == 1 {
            self.same_block[delta]
        } else {
            self.cross_block[delta]
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (delta, eps) = pair_class(self.n, i, j);
        self.value(delta, eps)
    }

    /// Largest imaginary residue dropped when assembling the values.
    pub fn max_discarded_imag(&self) -> f64 {
        self.max_discarded_imag
    }

    /// `(Δ, ε, g)` triples, same-block classes first.
    pub fn classes(&self) -> impl Iterator<Item = (usize, i8, f64)> + '_ {
        let same = self
            .same_block
            .iter()
            .enumerate()
            .map(|(d, &g)| (d, 1i8, g));
        let cross = self
            .cross_block
            .iter()
            .enumerate()
            .map(|(d, &g)| (d, -1i8, g));
        same.chain(cross)
    }

    /// Common row (and column) sum.
    pub fn row_sum(&self) -> f64 {
        compensated_sum(self.same_block.iter().chain(&self.cross_block).copied())
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let size = 2 * self.n;
        Array2::from_shape_fn((size, size), |(i, j)| self.entry(i, j))
    }

    /// `‖P̄_T − Π‖` under the chosen matrix norm.
    ///
    /// Each column holds every class exactly once, so the induced 1-norm is
    /// a single class sum.
    pub fn distance_to_limit(&self, limit: &LimitingDistribution, kind: NormKind) -> f64 {
        let col = compensated_sum(
            self.classes()
                .map(|(d, eps, g)| (g - limit.class_value(d, eps)).abs()),
        );
        match kind {
            NormKind::Induced => col,
            NormKind::Entrywise => col * (2 * self.n) as f64,
        }
    }
}

/// `Π = lim_{T→∞} P̄_T`, with entries
/// `1/2n + (n−1)/2n²` when `Δ = 0` and `1/2n − 1/2n²` otherwise.
///
/// `Δ = 0` covers both `i = j` and `|i − j| = n`, which keeps `Π` symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitingDistribution {
    n: usize,
    diagonal: Ratio<i128>,
    offdiagonal: Ratio<i128>,
}

impl LimitingDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> Ratio<i128> {
        self.diagonal
    }

    pub fn offdiagonal(&self) -> Ratio<i128> {
        self.offdiagonal
    }

    pub fn diagonal_value(&self) -> f64 {
        ratio_f64(self.diagonal)
    }

    pub fn offdiagonal_value(&self) -> f64 {
        ratio_f64(self.offdiagonal)
    }

    pub fn class_value(&self, delta: usize, _eps: i8) -> f64 {
        if delta == 0 {
            self.diagonal_value()
        } else {
            self.offdiagonal_value()
        }
    }

    pub fn entry_exact(&self, i: usize, j: usize) -> Ratio<i128> {
        if pair_class(self.n, i, j).0 == 0 {
            self.diagonal
        } else {
            self.offdiagonal
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        ratio_f64(self.entry_exact(i, j))
    }

    /// Row sum in rational arithmetic: two `Δ = 0` entries and `2n − 2` others.
    pub fn row_sum_exact(&self) -> Ratio<i128> {
        self.diagonal * 2 + self.offdiagonal * (2 * self.n as i128 - 2)
    }

    pub fn min_entry_exact(&self) -> Ratio<i128> {
        self.diagonal.min(self.offdiagonal)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let size = 2 * self.n;
        Array2::from_shape_fn((size, size), |(i, j)| self.entry(i, j))
    }
}

fn ratio_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn limiting_distribution(n: usize) -> Result<LimitingDistribution> {
    check_order(n)?;
    let n128 = n as i128;
    let half_inv = Ratio::new(1, 2 * n128);
    let sq = 2 * n128 * n128;
    Ok(LimitingDistribution {
        n,
        diagonal: half_inv + Ratio::new(n128 - 1, sq),
        offdiagonal: half_inv - Ratio::new(1, sq),
    })
}

/// `(T, ‖P̄_T − Π‖₁)` over an increasing list of horizons.
pub fn convergence_to_limit(n: usize, horizons: &[f64]) -> Result<Vec<(f64, f64)>> {
    if horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("T_list", "horizons must be strictly increasing"));
    }
    let walk = QuantumWalk::new(n)?;
    let limit = limiting_distribution(n)?;
    horizons
        .iter()
        .map(|&t| {
            let avg = walk.averaged_matrix(t)?;
            Ok((t, avg.distance_to_limit(&limit, NormKind::Induced)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_time_zero() {
        let w = QuantumWalk::new(5).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let a = w.amplitude(i, j, 0.0).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn same_block_amplitude_factorizes() {
        // ε = +1: e^{iλ⁺t} + e^{iλ⁻t} = e^{i2ct/3} · 2cos(t/3).
        let n = 7;
        let w = QuantumWalk::new(n).unwrap();
        let t = 2.3;
        for delta in 0..n {
            let direct = w.amplitude(0, delta, t).unwrap();
            let mut f = Complex64::new(0.0, 0.0);
            for m in 0..n {
                let c = w.spectrum().cosines()[m];
                f += Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * (m * delta) as f64 / n as f64,
                ) * Complex64::from_polar(1.0, 2.0 * c * t / 3.0);
            }
            let factored = f * (2.0 * (t / 3.0).cos()) / (2 * n) as f64;
            assert!((direct - factored).norm() < 1e-13);
        }
    }

    #[test]
    fn rows_sum_to_one_and_symmetric() {
        for n in [3, 7, 11] {
            let w = QuantumWalk::new(n).unwrap();
            for t in [0.3, 2.5, 17.0] {
                let p = w.probability_matrix(t).unwrap();
                for i in 0..2 * n {
                    assert!((p.row(i).sum() - 1.0).abs() < 1e-10);
                    for j in 0..2 * n {
                        assert!((p[[i, j]] - p[[j, i]]).abs() < 1e-12);
                        assert!(p[[i, j]] >= -1e-12 && p[[i, j]] <= 1.0 + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let w = QuantumWalk::new(5).unwrap();
        assert!(w.amplitude(0, 10, 1.0).is_err());
        assert!(w.amplitude(0, 1, -1.0).is_err());
        assert!(w.averaged_matrix(0.0).is_err());
        assert!(w.averaged_entry(5, 1, 1.0).is_err());
        assert!(w.averaged_entry(0, 0, 1.0).is_err());
        assert!(averaged_entry(5, 0, 1, -2.0).is_err());
        assert_eq!(
            propagator_oracle_with_cap(7, 1.0, 5).unwrap_err(),
            QwalkError::CapExceeded { n: 7, cap: 5 }
        );
        assert!(convergence_to_limit(5, &[10.0, 5.0]).is_err());
    }

    #[test]
    fn kernel_limits() {
        assert_eq!(averaging_kernel(0.0, 10.0), Complex64::new(1.0, 0.0));
        let x = 0.37;
        let t = 12.0;
        let exact = (Complex64::new(0.0, x * t).exp() - 1.0) / Complex64::new(0.0, x * t);
        assert!((averaging_kernel(x, t) - exact).norm() < 1e-15);
        let small = averaging_kernel(1e-9, 1.0);
        assert!((small - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn fast_path_matches_direct_sum() {
        for n in [3, 5, 9] {
            let w = QuantumWalk::new(n).unwrap();
            for horizon in [0.5, 20.0, 1e4] {
                let avg = w.averaged_matrix(horizon).unwrap();
                for (d, eps, g) in avg.classes() {
                    let z = w.averaged_entry_complex(d, eps, horizon).unwrap();
                    assert!(z.im.abs() <= 1e-9);
                    assert!(
                        (z.re - g).abs() < 1e-12,
                        "n={n} T={horizon} d={d} eps={eps}"
                    );
                }
                assert!(avg.max_discarded_imag() <= 1e-9);
            }
        }
    }

    #[test]
    fn averaged_values_reflect_and_stochastic() {
        for n in [5, 11, 21] {
            let avg = averaged_matrix(n, 37.5).unwrap();
            assert!((avg.row_sum() - 1.0).abs() < 1e-9);
            for eps in [1, -1] {
                for d in 1..n {
                    assert!((avg.value(d, eps) - avg.value(n - d, eps)).abs() < 1e-12);
                }
            }
            let dense = avg.to_dense();
            for i in 0..2 * n {
                assert!((dense.column(i).sum() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn limiting_distribution_values() {
        let lim = limiting_distribution(3).unwrap();
        assert_eq!(lim.diagonal(), Ratio::new(5, 18));
        assert_eq!(lim.offdiagonal(), Ratio::new(1, 9));
        for n in (3..=301).step_by(2) {
            let lim = limiting_distribution(n).unwrap();
            assert_eq!(lim.row_sum_exact(), Ratio::from_integer(1));
            let floor = Ratio::new(1, 4 * (n as i128) * (n as i128));
            assert!(lim.min_entry_exact() >= floor);
        }
        let lim = limiting_distribution(5).unwrap();
        assert_eq!(lim.entry_exact(2, 7), lim.diagonal());
        assert_eq!(lim.entry_exact(7, 2), lim.diagonal());
        assert_eq!(lim.entry_exact(2, 3), lim.offdiagonal());
    }

    #[test]
    fn long_horizon_approaches_limit() {
        let z = averaged_entry(3, 0, 1, 1e6).unwrap();
        assert!((z - 5.0 / 18.0).abs() < 1e-4);
        let series = convergence_to_limit(11, &[1e2, 1e3, 1e4, 1e5, 1e6]).unwrap();
        assert!(series.last().unwrap().1 <= 0.01);
    }
}
