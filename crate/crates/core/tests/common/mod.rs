//! Shared oracles for the integration suites. Everything here is an
//! independent route: the matrix exponential is scaling-and-squaring with a
//! Taylor core, eigenvalue cross-checks go through nalgebra's Schur-based
//! solver, never through the crate's own Jacobi/closed-form paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swingnet::Topology;

/// Matrix exponential by scaling and squaring with a Taylor-series core.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|v| v.abs()).fold(0.0f64, f64::max) * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);

    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=40 {
        term = (&term * &scaled) / k as f64;
        result += &term;
        if term.iter().map(|v| v.abs()).fold(0.0f64, f64::max) < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigenvalues of a general real matrix via nalgebra's Schur decomposition.
pub fn general_eigenvalues(a: &DMatrix<f64>) -> Vec<Complex64> {
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect()
}

/// Greedy minimum-distance matching between two complex multisets. Returns
/// the largest matched distance, or `None` on length mismatch. Greedy
/// pairing is reliable here because the tolerance is far below the mode
/// separation.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut taken = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let mut best: Option<(usize, f64)> = None;
        for (j, &y) in b.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best?;
        taken[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// Random connected topology on `n` nodes: a random spanning tree plus a few
/// extra edges, unit coefficients.
pub fn random_connected_topology(n: usize, rng: &mut ChaCha8Rng) -> Topology {
    assert!(n >= 1);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        pairs.push((u, v));
    }
    let extra = rng.gen_range(0..=n / 2);
    let mut attempts = 0;
    while pairs.len() < (n - 1) + extra && attempts < 10 * n {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let (a, b) = (u.min(v), u.max(v));
        if !pairs.iter().any(|&(x, y)| (x, y) == (a, b)) {
            pairs.push((a, b));
        }
    }
    Topology::unit_from_pairs(n, &pairs).expect("generated topology is valid")
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Oracle route for the loop transfer function: G = C^T (sI - A)^{-1} B via
/// a generic complex LU solve, never the closed form.
pub fn transfer_g_by_linear_solve(p: &swingnet::GridParams, s: Complex64) -> DMatrix<Complex64> {
    let a = p.a_matrix();
    let mut si_minus_a = DMatrix::<Complex64>::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            si_minus_a[(i, j)] = Complex64::new(-a[i][j], 0.0);
        }
        si_minus_a[(i, i)] += s;
    }
    let b = [[1.0, 0.0], [0.0, p.t]];
    let lu = si_minus_a.lu();
    let mut g = DMatrix::<Complex64>::zeros(2, 2);
    for col in 0..2 {
        let rhs =
            nalgebra::DVector::from_iterator(2, (0..2).map(|r| Complex64::new(b[r][col], 0.0)));
        let x = lu.solve(&rhs).expect("sI - A invertible away from poles");
        for row in 0..2 {
            g[(row, col)] = x[row];
        }
    }
    // C = I, so C^T X = X.
    g
}
