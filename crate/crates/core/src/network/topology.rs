//! Benchmark topologies and their closed-form stationary distributions.
//!
//! The hub of the core-periphery and star networks is always the last agent.

use nalgebra::DMatrix;

use super::{InfluenceVector, WeightMatrix};
use crate::error::{Error, Result};

fn require(what: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidSize { what, got: n, min });
    }
    Ok(())
}

/// Every agent weights everyone, including itself, by `1/n`.
pub fn build_complete_equal(n: usize) -> Result<WeightMatrix> {
    require("complete network", n, 2)?;
    WeightMatrix::from_matrix(DMatrix::from_element(n, n, 1.0 / n as f64))
}

fn check_self_weights(x: &[f64]) -> Result<()> {
    require("complete network", x.len(), 2)?;
    if let Some((i, xi)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && **v < 1.0))
    {
        return Err(Error::domain(format!(
            "self-weight of agent {} is {xi}; must lie in (0, 1)",
            i + 1
        )));
    }
    Ok(())
}

/// Agent `i` keeps `x[i]` on itself and splits the rest evenly.
pub fn build_complete_self_weight(x: &[f64]) -> Result<WeightMatrix> {
    check_self_weights(x)?;
    let n = x.len();
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            x[i]
        } else {
            (1.0 - x[i]) / (n - 1) as f64
        }
    });
    WeightMatrix::from_matrix(w)
}

/// Ring of `n − 1` periphery agents around one core agent (index `n − 1`).
///
/// Periphery agents put `1/4` on themselves, both ring neighbours and the
/// core; the core weights everyone by `1/n`. The ring needs at least three
/// agents for the two neighbours to be distinct.
pub fn build_core_periphery(n: usize) -> Result<WeightMatrix> {
    require("core-periphery network", n, 4)?;
    let ring = n - 1;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..ring {
        w[(i, i)] = 0.25;
        w[(i, (i + 1) % ring)] = 0.25;
        w[(i, (i + ring - 1) % ring)] = 0.25;
        w[(i, n - 1)] = 0.25;
    }
    for j in 0..n {
        w[(n - 1, j)] = 1.0 / n as f64;
    }
    WeightMatrix::from_matrix(w)
}

/// Leaves split weight evenly between themselves and the center (index `n − 1`).
pub fn build_star(n: usize) -> Result<WeightMatrix> {
    require("star network", n, 3)?;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        w[(i, i)] = 0.5;
        w[(i, n - 1)] = 0.5;
    }
    for j in 0..n {
        w[(n - 1, j)] = 1.0 / n as f64;
    }
    WeightMatrix::from_matrix(w)
}

/// `πⱼ ∝ 1/(1 − xⱼ)`.
pub fn stationary_complete_self_weight(x: &[f64]) -> Result<InfluenceVector> {
    check_self_weights(x)?;
    let inv: Vec<f64> = x.iter().map(|xi| 1.0 / (1.0 - xi)).collect();
    let total: f64 = inv.iter().sum();
    Ok(InfluenceVector(
        inv.into_iter().map(|v| v / total).collect(),
    ))
}

/// Periphery `4/(5n − 4)`, core `n/(5n − 4)`.
pub fn stationary_core_periphery(n: usize) -> Result<InfluenceVector> {
    require("core-periphery network", n, 4)?;
    let denom = 5.0 * n as f64 - 4.0;
    let mut pi = vec![4.0 / denom; n];
    pi[n - 1] = n as f64 / denom;
    Ok(InfluenceVector(pi))
}

/// Leaves `2/(3n − 2)`, center `n/(3n − 2)`.
pub fn stationary_star(n: usize) -> Result<InfluenceVector> {
    require("star network", n, 3)?;
    let denom = 3.0 * n as f64 - 2.0;
    let mut pi = vec![2.0 / denom; n];
    pi[n - 1] = n as f64 / denom;
    Ok(InfluenceVector(pi))
}
