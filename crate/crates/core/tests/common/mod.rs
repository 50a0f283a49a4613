#![allow(dead_code)]

use degroot_core::kernel::MATCH_TOL;
use degroot_core::{weights_from_memories, KernelParams, MemoryProfile, WeightMatrix};
use nalgebra::DMatrix;
use rand::Rng;

/// Random row-stochastic matrix whose support contains a directed ring and a
/// self-loop, so it is strongly connected and aperiodic.
pub fn random_primitive<R: Rng>(rng: &mut R, n: usize, density: f64) -> WeightMatrix {
    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        w[(i, (i + 1) % n)] = rng.random_range(0.05..1.0);
        for j in 0..n {
            if rng.random_bool(density) {
                w[(i, j)] += rng.random_range(0.0..1.0);
            }
        }
    }
    w[(0, 0)] += rng.random_range(0.05..1.0);
    normalize(w)
}

pub fn normalize(mut w: DMatrix<f64>) -> WeightMatrix {
    for i in 0..w.nrows() {
        let s: f64 = w.row(i).sum();
        w.row_mut(i).iter_mut().for_each(|x| *x /= s);
    }
    WeightMatrix::from_matrix(w).unwrap()
}

/// Left power iteration from the uniform vector.
pub fn power_oracle(w: &WeightMatrix) -> Vec<f64> {
    let n = w.n();
    let m = w.as_matrix();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let next: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| pi[i] * m[(i, j)]).sum())
            .collect();
        let diff = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    let s: f64 = pi.iter().sum();
    pi.iter().map(|x| x / s).collect()
}

/// Primitive iff some boolean power `A^k`, `k ≤ (n−1)² + 1`, is all positive.
pub fn boolean_power_primitive(w: &WeightMatrix) -> bool {
    let n = w.n();
    let a: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| w.get(i, j) > 0.0).collect())
        .collect();
    let mut p = a.clone();
    for _ in 0..(n - 1) * (n - 1) + 1 {
        if p.iter().all(|r| r.iter().all(|&x| x)) {
            return true;
        }
        p = (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && a[k][j])).collect())
            .collect();
    }
    false
}

/// Posterior over all memory profiles by brute force: builds every
/// candidate's network and compares entrywise.
pub fn brute_posterior(
    observed: &WeightMatrix,
    agent: usize,
    own: &[usize],
    m: usize,
    params: &KernelParams,
) -> (Vec<MemoryProfile>, Vec<f64>) {
    let n = observed.n();
    let t = own.len();
    let cells = n * t;
    let total = m.pow(cells as u32);
    let mut found = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut hist = vec![vec![0; t]; n];
        for cell in 0..cells {
            hist[cell / t][cell % t] = c % m + 1;
            c /= m;
        }
        if hist[agent] != own {
            continue;
        }
        let mem = MemoryProfile::new(hist, m).unwrap();
        let w = weights_from_memories(&mem, params).unwrap();
        if w.max_abs_diff(observed).unwrap() <= MATCH_TOL {
            found.push(mem);
        }
    }
    let k = found.len() as f64;
    let expected = (0..n)
        .map(|j| {
            found
                .iter()
                .map(|p| p.history(j)[t - 1] as f64)
                .sum::<f64>()
                / k
        })
        .collect();
    (found, expected)
}
