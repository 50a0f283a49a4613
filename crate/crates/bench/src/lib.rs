//! Fixtures shared by the benchmarks.

use degroot_core::{build_complete_self_weight, WeightMatrix};

/// Dense primitive matrix with uneven self-weights.
pub fn uneven_complete(n: usize) -> WeightMatrix {
    let x: Vec<f64> = (0..n).map(|i| 0.05 + 0.9 * i as f64 / n as f64).collect();
    build_complete_self_weight(&x).expect("self-weights lie in (0, 1)")
}

/// Choice profile cycling through `1..=m`.
pub fn cycling_choices(n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|i| i % m + 1).collect()
}
