//! Posterior over memory profiles after observing a kernel network.
//!
//! An agent knows its own history and sees the whole weight matrix. Every
//! memory profile that reproduces the matrix keeps its prior weight, every
//! other profile drops out, and the expected next choice of agent `j` is the
//! posterior mean of its latest choice.

use super::{kernel_from_distance, memory_distance, KernelParams, MemoryProfile};
use crate::error::{Error, Result};
use crate::network::WeightMatrix;

/// Entrywise tolerance when matching a candidate's weights to the observation.
pub const MATCH_TOL: f64 = 1e-6;
/// Largest candidate space `m^(t·n)` that will be enumerated.
pub const MAX_CANDIDATES: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    /// Consistent memory profiles with normalised posterior weights.
    pub posterior: Vec<(MemoryProfile, f64)>,
    /// `E[dⱼᵗ⁺¹] = Σₖ k·Pr(dⱼᵗ = k | Wᵗ)`; the observer's own entry is its
    /// known latest choice.
    pub expected_choices: Vec<f64>,
}

pub fn uniform_prior(_: &MemoryProfile) -> f64 {
    1.0
}

/// Filters all memory profiles compatible with `observed` given that agent
/// `agent` remembers `own`.
pub fn consistent_memories<P>(
    observed: &WeightMatrix,
    agent: usize,
    own: &[usize],
    m: usize,
    params: &KernelParams,
    prior: P,
) -> Result<BeliefState>
where
    P: Fn(&MemoryProfile) -> f64,
{
    params.validate()?;
    let n = observed.n();
    let t = own.len();
    if agent >= n {
        return Err(Error::IndexOutOfRange {
            index: agent,
            len: n,
        });
    }
    if t == 0 {
        return Err(Error::InvalidSize {
            what: "memory length",
            got: 0,
            min: 1,
        });
    }
    if m == 0 || own.iter().any(|d| !(1..=m).contains(d)) {
        return Err(Error::domain(format!(
            "own history {own:?} not within 1..={m}"
        )));
    }
    let count = (m as u128).checked_pow((t * n) as u32).unwrap_or(u128::MAX);
    if count > MAX_CANDIDATES {
        return Err(Error::TooLarge {
            count,
            limit: MAX_CANDIDATES,
        });
    }

    let histories = all_histories(m, t);
    let own_idx = histories
        .iter()
        .position(|h| h == own)
        .expect("own history is in range");
    let h = histories.len();
    let mut kernel = vec![0.0; h * h];
    for a in 0..h {
        for b in 0..h {
            let dist = memory_distance(&histories[a], &histories[b], params.gamma)?;
            kernel[a * h + b] = kernel_from_distance(dist, params.alpha);
        }
    }
    let target = observed.as_matrix();

    let mut assignment = vec![0usize; n];
    assignment[agent] = own_idx;
    let free: Vec<usize> = (0..n).filter(|&j| j != agent).collect();
    let mut consistent = Vec::new();
    let mut row = vec![0.0; n];
    'outer: loop {
        let matches = (0..n).all(|r| {
            let hr = assignment[r];
            let mut sum = 0.0;
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = kernel[hr * h + assignment[c]];
                sum += *slot;
            }
            row.iter()
                .enumerate()
                .all(|(c, k)| (k / sum - target[(r, c)]).abs() <= MATCH_TOL)
        });
        if matches {
            let profile = MemoryProfile {
                histories: assignment.iter().map(|&a| histories[a].clone()).collect(),
                m,
            };
            let weight = prior(&profile);
            if weight.is_nan() || weight < 0.0 {
                return Err(Error::domain("prior weights must be nonnegative"));
            }
            if weight > 0.0 {
                consistent.push((profile, weight));
            }
        }
        // Odometer over the free agents.
        for &j in &free {
            assignment[j] += 1;
            if assignment[j] < h {
                continue 'outer;
            }
            assignment[j] = 0;
        }
        break;
    }

    let total: f64 = consistent.iter().map(|(_, w)| w).sum();
    if consistent.is_empty() || total <= 0.0 {
        return Err(Error::Inconsistent);
    }
    let mut expected_choices = vec![0.0; n];
    for (profile, w) in &mut consistent {
        *w /= total;
        for (j, e) in expected_choices.iter_mut().enumerate() {
            *e += *w * profile.history(j)[t - 1] as f64;
        }
    }
    Ok(BeliefState {
        posterior: consistent,
        expected_choices,
    })
}

/// All `m^t` histories in lexicographic order.
fn all_histories(m: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=m).map(move |d| {
                    let mut h = prefix.clone();
                    h.push(d);
                    h
                })
            })
            .collect();
    }
    out
}
