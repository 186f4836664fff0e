//! Continuous-time quantum walks on the Cayley graph of the dihedral group
//! `D_{2n}` (odd `n`) with generators `{a, a⁻¹, b}`.
//!
//! Everything is closed form: the spectrum of the normalized adjacency is
//! known explicitly, so amplitudes, time-averaged transition probabilities,
//! the limiting distribution and the eigengap sums that bound mixing are all
//! evaluated without diagonalizing anything. Dense linear algebra appears
//! only in oracles and cross-checks.

pub mod bounds;
pub mod classical;
pub mod ctqw;
pub mod error;
pub mod group;
pub mod norms;
pub mod sampler;
pub mod spectral;
pub mod summation;

pub use bounds::{
    bounds_report, conjecture_f, decomposed_sum, eigengap_inverse_sum_bruteforce,
    horizon_budget_check, quantum_bound_rhs, quantum_mixing_threshold, su_sums, BoundsReport,
    MIXING_THRESHOLD,
};
pub use classical::{classical_mixing_time, classical_power, ClassicalWalk, MixingReport};
pub use ctqw::{limiting_distribution, AveragedWalkMatrix, LimitingDistribution, QuantumWalk};
pub use error::{QwalkError, Result};
pub use group::{cayley_graph, phi, semi_cayley_adjacency, DihedralElement, VertexIndex};
pub use norms::NormKind;
pub use sampler::{empirical_check, sample_vertex, SampleHistogram, SamplerConfig};
pub use spectral::{classical_lower_bound, Spectrum};
