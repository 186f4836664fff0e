use ndarray::Array2;
use num_complex::Complex64;

use qwalk::ctqw::{propagator_oracle, QuantumWalk};
use qwalk::group::{pair_class, phi, DihedralElement};
use qwalk::spectral::Spectrum;
use qwalk::{classical_power, limiting_distribution, semi_cayley_adjacency};

/// Adjacency straight from the block rule: same block and `Δ ≡ ±1`, or
/// different blocks and `Δ = 0`.
fn block_rule_adjacency(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((2 * n, 2 * n), |(i, j)| {
        let delta = (j % n + n - i % n) % n;
        let same = i / n == j / n;
        if (same && (delta == 1 || delta == n - 1)) || (!same && delta == 0) {
            1.0 / 3.0
        } else {
            0.0
        }
    })
}

/// `e^{iAt}` by scaling and squaring a truncated Taylor series.
fn expm_i(a: &Array2<f64>, t: f64) -> Array2<Complex64> {
    let size = a.nrows();
    let mut squarings = 0;
    let mut scale = t.abs();
    while scale > 0.25 {
        scale /= 2.0;
        squarings += 1;
    }
    let x = a.mapv(|v| Complex64::new(0.0, v * t / f64::powi(2.0, squarings)));
    let mut result = Array2::<Complex64>::eye(size);
    let mut term = Array2::<Complex64>::eye(size);
    for k in 1..=30 {
        term = term.dot(&x).mapv(|v| v / k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

#[test]
fn adjacency_matches_block_rule() {
    for n in [3, 5, 7, 13] {
        let a = semi_cayley_adjacency(n).unwrap().mapv(|v| v as f64 / 3.0);
        assert_eq!(a, block_rule_adjacency(n));
    }
}

#[test]
fn closed_form_matches_taylor_exponential() {
    for n in [3, 5, 7, 11] {
        let walk = QuantumWalk::new(n).unwrap();
        let a = block_rule_adjacency(n);
        for t in [0.1, 1.0, 3.7, 10.0] {
            let u = expm_i(&a, t);
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let z = walk.amplitude(i, j, t).unwrap();
                    assert!((z - u[[j, i]]).norm() < 1e-10, "n={n} t={t} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn eigenpair_oracle_matches_taylor_exponential() {
    for n in [5, 9] {
        let a = block_rule_adjacency(n);
        let u = propagator_oracle(n, 2.5).unwrap();
        let v = expm_i(&a, 2.5);
        let err = (&u - &v).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}

#[test]
fn propagator_is_a_group_in_time() {
    let n = 7;
    let (t, s) = (1.3, 4.2);
    let ut = propagator_oracle(n, t).unwrap();
    let us = propagator_oracle(n, s).unwrap();
    let uts = propagator_oracle(n, t + s).unwrap();
    let err = (&ut.dot(&us) - &uts)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-12);
}

#[test]
fn eigenpairs_satisfy_eigen_equation_on_block_rule() {
    for n in [3, 5, 15] {
        let a = block_rule_adjacency(n).mapv(|v| Complex64::new(v, 0.0));
        let spec = Spectrum::new(n).unwrap();
        for idx in spec.indices() {
            let v = ndarray::Array1::from(spec.eigenvector(idx));
            let r = a.dot(&v) - v.mapv(|x| x * spec.value(idx));
            assert!(r.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        }
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // Split first so the oscillating integrand is resolved from the start.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            step(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

#[test]
fn averaged_entries_match_quadrature() {
    let n = 5;
    let horizon = 50.0;
    let walk = QuantumWalk::new(n).unwrap();
    let avg = walk.averaged_matrix(horizon).unwrap();
    for j in 0..2 * n {
        let f = |t: f64| walk.probability(0, j, t).unwrap();
        let q = adaptive_simpson(&f, 0.0, horizon, 1e-10) / horizon;
        assert!((avg.entry(0, j) - q).abs() < 1e-6, "j={j}");
        let (d, e) = pair_class(n, 0, j);
        assert!((walk.averaged_entry(d, e, horizon).unwrap() - q).abs() < 1e-6);
    }
}

#[test]
fn full_averaged_matrix_matches_quadrature() {
    let n = 7;
    let horizon = 20.0;
    let walk = QuantumWalk::new(n).unwrap();
    let avg = walk.averaged_matrix(horizon).unwrap().to_dense();
    for i in 0..2 * n {
        for j in 0..2 * n {
            let f = |t: f64| walk.probability(i, j, t).unwrap();
            let q = adaptive_simpson(&f, 0.0, horizon, 1e-10) / horizon;
            assert!((avg[[i, j]] - q).abs() < 1e-6);
        }
    }
}

#[test]
fn limit_is_infinite_time_average() {
    // Π keeps only the coincident-eigenvalue terms; the direct sum at a
    // huge horizon must agree to O(1/T).
    for n in [3, 7, 13] {
        let walk = QuantumWalk::new(n).unwrap();
        let limit = limiting_distribution(n).unwrap();
        let avg = walk.averaged_matrix(1e9).unwrap();
        for i in 0..2 * n {
            assert!((avg.entry(0, i) - limit.entry(0, i)).abs() < 1e-7);
        }
    }
}

/// `b^s a^r` acting on the polygon `Z_n` as `x ↦ (−1)^s (x + r)`.
fn permutation(g: &DihedralElement) -> Vec<usize> {
    let n = g.order_parameter();
    (0..n)
        .map(|x| {
            let y = (x + g.r()) % n;
            if g.s() == 1 {
                (n - y) % n
            } else {
                y
            }
        })
        .collect()
}

#[test]
fn multiplication_matches_permutation_representation() {
    for n in [3, 5, 7, 9] {
        let all = DihedralElement::all(n).unwrap();
        let perms: Vec<_> = all.iter().map(permutation).collect();
        // Faithful: distinct elements give distinct permutations.
        for a in 0..perms.len() {
            for b in (a + 1)..perms.len() {
                assert_ne!(perms[a], perms[b]);
            }
        }
        for g in &all {
            for h in &all {
                let gh = permutation(&g.mul(h).unwrap());
                let composed: Vec<usize> =
                    (0..n).map(|x| permutation(g)[permutation(h)[x]]).collect();
                assert_eq!(gh, composed);
            }
        }
    }
}

#[test]
fn phi_carries_cayley_edges_to_block_rule_edges() {
    for n in [3, 5, 7, 9, 11] {
        let a = block_rule_adjacency(n);
        let gens = [
            DihedralElement::rotation(n).unwrap(),
            DihedralElement::rotation(n).unwrap().inverse(),
            DihedralElement::reflection(n).unwrap(),
        ];
        let all = DihedralElement::all(n).unwrap();
        for g in &all {
            for h in &all {
                let quotient = g.mul(&h.inverse()).unwrap();
                let edge = gens.contains(&quotient);
                assert_eq!(
                    edge,
                    a[[phi(g).index(), phi(h).index()]] > 0.0,
                    "n={n} {g} {h}"
                );
            }
        }
    }
}

#[test]
fn classical_power_matches_dense_power() {
    let n = 9;
    let a = block_rule_adjacency(n);
    let mut dense = Array2::<f64>::eye(2 * n);
    for t in 0..40u64 {
        let m = classical_power(n, t).unwrap().matrix;
        let err = (&m - &dense).iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(err < 1e-13, "t={t}");
        dense = dense.dot(&a);
    }
}
