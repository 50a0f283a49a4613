//! Networks formed from what agents choose to learn about.
//!
//! Agent `i` weights agent `j` in proportion to `exp(−α (dᵢ − dⱼ)²)`, so
//! agents sharing a dimension listen to each other most. With memories the
//! squared gap is replaced by a discounted sum over past periods. Each agent
//! picks the dimension that minimises `Σₖ πₖ²` of the network its choice
//! induces.

mod beliefs;
mod dynamics;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{stationary_distribution, InfluenceVector, WeightMatrix};

pub use beliefs::{consistent_memories, uniform_prior, BeliefState, MATCH_TOL, MAX_CANDIDATES};
pub use dynamics::{
    run_iterative_dynamics, BeliefMode, DynamicsConfig, InitialChoices, NetworkBasis, PeriodRecord,
    TieOverride, Trajectory,
};

/// Objectives closer than this are treated as tied.
pub const OBJECTIVE_TIE_TOL: f64 = 1e-12;

/// One dimension label in `1..=m` per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceProfile {
    d: Vec<usize>,
    m: usize,
}

impl ChoiceProfile {
    pub fn new(d: Vec<usize>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSize {
                what: "dimensions",
                got: 0,
                min: 1,
            });
        }
        if let Some((i, di)) = d.iter().enumerate().find(|(_, di)| !(1..=m).contains(*di)) {
            return Err(Error::domain(format!(
                "agent {} chose dimension {di}, outside 1..={m}",
                i + 1
            )));
        }
        Ok(Self { d, m })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.d
    }

    /// Choices as points on the real line.
    pub fn positions(&self) -> Vec<f64> {
        self.d.iter().map(|&d| d as f64).collect()
    }
}

/// Every agent's history of chosen dimensions, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemoryProfile {
    histories: Vec<Vec<usize>>,
    m: usize,
}

impl MemoryProfile {
    pub fn new(histories: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let t = histories.first().map_or(0, Vec::len);
        if t == 0 {
            return Err(Error::InvalidSize {
                what: "memory length",
                got: 0,
                min: 1,
            });
        }
        for h in &histories {
            if h.len() != t {
                return Err(Error::LengthMismatch {
                    expected: t,
                    got: h.len(),
                });
            }
            ChoiceProfile::new(h.clone(), m)?;
        }
        Ok(Self { histories, m })
    }

    /// Single-period memories.
    pub fn from_choices(d: &ChoiceProfile) -> Self {
        Self {
            histories: d.as_slice().iter().map(|&x| vec![x]).collect(),
            m: d.m(),
        }
    }

    pub fn n(&self) -> usize {
        self.histories.len()
    }

    pub fn t(&self) -> usize {
        self.histories[0].len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn history(&self, i: usize) -> &[usize] {
        &self.histories[i]
    }

    pub fn latest(&self) -> ChoiceProfile {
        ChoiceProfile {
            d: self.histories.iter().map(|h| h[h.len() - 1]).collect(),
            m: self.m,
        }
    }

    pub fn push(&mut self, d: &ChoiceProfile) -> Result<()> {
        if d.n() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: d.n(),
            });
        }
        for (h, &x) in self.histories.iter_mut().zip(d.as_slice()) {
            h.push(x);
        }
        Ok(())
    }
}

/// Kernel spread `α` and memory discount `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    /// `0` gives uniform weights; `+∞` keeps only agents with identical
    /// choices (or memories).
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.0
}

impl KernelParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha < 0.0 {
            return Err(Error::domain(format!(
                "alpha = {} must be >= 0",
                self.alpha
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::domain(format!(
                "gamma = {} must lie in (0, 1]",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// `exp(−α·dist)` with the `dist = 0` and `α = ∞` limits made exact.
fn kernel_from_distance(dist: f64, alpha: f64) -> f64 {
    if dist == 0.0 {
        1.0
    } else if alpha.is_infinite() {
        0.0
    } else {
        (-alpha * dist).exp()
    }
}

/// `K(a, b) = exp(−α (a − b)²)`; accepts fractional positions.
pub fn kernel_scalar(a: f64, b: f64, alpha: f64) -> f64 {
    kernel_from_distance((a - b) * (a - b), alpha)
}

fn normalize_rows(k: DMatrix<f64>) -> Result<WeightMatrix> {
    let n = k.nrows();
    let mut w = k;
    for i in 0..n {
        let s: f64 = w.row(i).sum();
        w.row_mut(i).iter_mut().for_each(|x| *x /= s);
    }
    WeightMatrix::from_matrix(w)
}

/// Row-normalised kernel over arbitrary real positions.
pub fn weights_from_positions(positions: &[f64], alpha: f64) -> Result<WeightMatrix> {
    let n = positions.len();
    if n < 2 {
        return Err(Error::InvalidSize {
            what: "kernel network",
            got: n,
            min: 2,
        });
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::domain(format!("alpha = {alpha} must be >= 0")));
    }
    normalize_rows(DMatrix::from_fn(n, n, |i, j| {
        kernel_scalar(positions[i], positions[j], alpha)
    }))
}

/// `Wᵢⱼ = K(dᵢ, dⱼ) / Σₖ K(dᵢ, dₖ)`
pub fn weights_from_choices(d: &ChoiceProfile, alpha: f64) -> Result<WeightMatrix> {
    weights_from_positions(&d.positions(), alpha)
}

/// `Σ_τ γ^(t−τ) (aᵗ − bᵗ)²`; the latest period has weight 1.
pub fn memory_distance(a: &[usize], b: &[usize], gamma: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut total = 0.0;
    let mut weight = 1.0;
    for (x, y) in a.iter().zip(b).rev() {
        let gap = *x as f64 - *y as f64;
        total += weight * gap * gap;
        weight *= gamma;
    }
    Ok(total)
}

/// Row-normalised `exp(−α D(Mᵢ, Mⱼ))`.
pub fn weights_from_memories(
    memories: &MemoryProfile,
    params: &KernelParams,
) -> Result<WeightMatrix> {
    params.validate()?;
    let n = memories.n();
    if n < 2 {
        return Err(Error::InvalidSize {
            what: "kernel network",
            got: n,
            min: 2,
        });
    }
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let dist = memory_distance(memories.history(i), memories.history(j), params.gamma)?;
            k[(i, j)] = kernel_from_distance(dist, params.alpha);
        }
    }
    normalize_rows(k)
}

/// `Σₖ πₖ²` of the network induced by a choice profile.
pub fn profile_objective(d: &ChoiceProfile, alpha: f64) -> Result<f64> {
    objective_at(&d.positions(), alpha)
}

/// `Σₖ πₖ²` for real-valued positions.
pub fn objective_at(positions: &[f64], alpha: f64) -> Result<f64> {
    influence_at(positions, alpha).map(|pi| pi.concentration())
}

pub fn influence_at(positions: &[f64], alpha: f64) -> Result<InfluenceVector> {
    stationary_distribution(&weights_from_positions(positions, alpha)?)
}

/// Which member of a tied argmin set to pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    Lowest,
    Highest,
}

/// Agent `i`'s evaluation of every candidate dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub agent: usize,
    pub choice: usize,
    /// All dimensions attaining the minimum, ascending.
    pub argmin: Vec<usize>,
    /// `objectives[d − 1]` is `Σπ²` when the agent picks `d`.
    pub objectives: Vec<f64>,
}

/// Best dimension for agent `i` given everyone else's (possibly expected,
/// hence fractional) positions. `others[i]` is ignored.
pub fn best_dimension(
    i: usize,
    others: &[f64],
    m: usize,
    alpha: f64,
    tie: TieRule,
) -> Result<BestResponse> {
    if i >= others.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: others.len(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidSize {
            what: "dimensions",
            got: 0,
            min: 1,
        });
    }
    let mut positions = others.to_vec();
    let objectives = (1..=m)
        .map(|d| {
            positions[i] = d as f64;
            objective_at(&positions, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin: Vec<usize> = (1..=m)
        .filter(|d| objectives[d - 1] - best <= OBJECTIVE_TIE_TOL)
        .collect();
    let choice = match tie {
        TieRule::Lowest => argmin[0],
        TieRule::Highest => argmin[argmin.len() - 1],
    };
    Ok(BestResponse {
        agent: i,
        choice,
        argmin,
        objectives,
    })
}
