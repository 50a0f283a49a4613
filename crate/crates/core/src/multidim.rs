//! Multi-dimensional states: per-dimension consensus, multiplex dimension
//! choice and the specialist/generalist comparison.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ChoiceProfile;
use crate::network::{stationary_distribution, InfluenceVector, WeightMatrix};
use crate::rng;

/// Precision at or above which a signal is drawn without noise.
pub const NOISELESS_PRECISION: f64 = 1e12;
/// Two influences closer than this are treated as tied.
pub const INFLUENCE_TIE_TOL: f64 = 1e-12;

/// Per-agent opinion vectors, one row per agent, one column per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate(DMatrix<f64>);

impl StateEstimate {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::InvalidSize {
                what: "state estimate",
                got: n.min(m),
                min: 1,
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::LengthMismatch {
                expected: m,
                got: bad.len(),
            });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("estimates must be finite"));
        }
        Ok(Self(DMatrix::from_row_slice(n, m, &data)))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn m(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, agent: usize, dim: usize) -> f64 {
        self.0[(agent, dim)]
    }

    /// All agents' estimates of dimension `dim` (0-based column).
    pub fn column(&self, dim: usize) -> Vec<f64> {
        self.0.column(dim).iter().copied().collect()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Signal precisions and the true state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    /// Precision on the chosen dimension.
    pub tau_strong: f64,
    /// Baseline precision on every other dimension.
    pub tau_weak: f64,
    pub theta: Vec<f64>,
}

impl SignalModel {
    pub fn new(tau_strong: f64, tau_weak: f64, theta: Vec<f64>) -> Result<Self> {
        let model = Self {
            tau_strong,
            tau_weak,
            theta,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_weak > 0.0 && self.tau_weak < self.tau_strong) {
            return Err(Error::domain(format!(
                "need 0 < tau_weak ({}) < tau_strong ({})",
                self.tau_weak, self.tau_strong
            )));
        }
        if self.theta.is_empty() || self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("theta must be a nonempty finite vector"));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.theta.len()
    }
}

fn std_dev(tau: f64) -> f64 {
    if tau >= NOISELESS_PRECISION {
        0.0
    } else {
        1.0 / tau
    }
}

/// Draws every agent's opinion vector: the chosen dimension with standard
/// deviation `1/tau_strong`, the rest with `1/tau_weak`.
pub fn sample_estimates(
    model: &SignalModel,
    choices: &ChoiceProfile,
    seed: u64,
) -> Result<StateEstimate> {
    model.validate()?;
    let m = model.m();
    if choices.m() != m {
        return Err(Error::domain(format!(
            "choices range over {} dimensions but the state has {m}",
            choices.m()
        )));
    }
    let stds: Vec<Vec<f64>> = choices
        .as_slice()
        .iter()
        .map(|&d| {
            (1..=m)
                .map(|j| {
                    std_dev(if j == d {
                        model.tau_strong
                    } else {
                        model.tau_weak
                    })
                })
                .collect()
        })
        .collect();
    Ok(draw(&model.theta, &stds, seed))
}

/// Draws `θⱼ + σᵢⱼ·z` row by row from the signal stream.
fn draw(theta: &[f64], stds: &[Vec<f64>], seed: u64) -> StateEstimate {
    let mut rng = rng::stream(seed, rng::STREAM_SIGNALS);
    let n = stds.len();
    let m = theta.len();
    let mut e = DMatrix::zeros(n, m);
    for (i, row) in stds.iter().enumerate() {
        for (j, sd) in row.iter().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            e[(i, j)] = theta[j] + sd * z;
        }
    }
    StateEstimate(e)
}

/// Per-dimension consensus `Σᵢ πᵢ eᵢⱼ` under a common weight matrix.
pub fn multidim_consensus(w: &WeightMatrix, e: &StateEstimate) -> Result<Vec<f64>> {
    if w.n() != e.n() {
        return Err(Error::LengthMismatch {
            expected: w.n(),
            got: e.n(),
        });
    }
    let pi = stationary_distribution(w)?;
    consensus_with_influence(&pi, e)
}

/// Per-dimension consensus for a known stationary distribution.
pub fn consensus_with_influence(pi: &InfluenceVector, e: &StateEstimate) -> Result<Vec<f64>> {
    if pi.len() != e.n() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            got: e.n(),
        });
    }
    Ok((0..e.m())
        .map(|j| {
            pi.as_slice()
                .iter()
                .enumerate()
                .map(|(i, p)| p * e.get(i, j))
                .sum()
        })
        .collect())
}

/// Total consensus variance `Σⱼ Σᵢ πᵢ² σᵢⱼ²` of a dimension choice profile
/// on a single-layer network.
pub fn profile_consensus_variance(
    pi: &InfluenceVector,
    choices: &ChoiceProfile,
    model: &SignalModel,
) -> Result<f64> {
    model.validate()?;
    if pi.len() != choices.n() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            got: choices.n(),
        });
    }
    let (strong, weak) = (model.tau_strong.powi(-2), model.tau_weak.powi(-2));
    let mut total = 0.0;
    for j in 1..=model.m() {
        for (p, &d) in pi.as_slice().iter().zip(choices.as_slice()) {
            total += p * p * if d == j { strong } else { weak };
        }
    }
    Ok(total)
}

/// One stationary distribution per state dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexInfluence {
    layers: Vec<InfluenceVector>,
}

impl MultiplexInfluence {
    pub fn new(layers: Vec<InfluenceVector>) -> Result<Self> {
        let n = layers
            .first()
            .map(InfluenceVector::len)
            .ok_or(Error::InvalidSize {
                what: "multiplex",
                got: 0,
                min: 1,
            })?;
        if let Some(bad) = layers.iter().find(|l| l.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Self { layers })
    }

    /// Builds layers by solving each weight matrix.
    pub fn from_matrices(layers: &[WeightMatrix]) -> Result<Self> {
        Self::new(
            layers
                .iter()
                .map(stationary_distribution)
                .collect::<Result<_>>()?,
        )
    }

    pub fn n(&self) -> usize {
        self.layers[0].len()
    }

    pub fn m(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, dim: usize) -> &InfluenceVector {
        &self.layers[dim - 1]
    }

    /// Dimensions (1-based) on which agent `i`'s influence is maximal.
    pub fn argmax_set(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        let best = self
            .layers
            .iter()
            .map(|l| l[i])
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((1..=self.m())
            .filter(|&d| best - self.layer(d)[i] <= INFLUENCE_TIE_TOL)
            .collect())
    }
}

/// The dimension on which agent `i` is most influential; ties go to the
/// lowest dimension.
pub fn multiplex_choice(influences: &MultiplexInfluence, i: usize) -> Result<usize> {
    Ok(influences.argmax_set(i)?[0])
}

/// Share of specialists in a population of `n` agents learning an
/// `m`-dimensional state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationMix {
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
}

impl PopulationMix {
    pub fn new(alpha: f64, n: usize, m: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!(
                "specialist share {alpha} outside [0, 1]"
            )));
        }
        if n == 0 || m == 0 {
            return Err(Error::InvalidSize {
                what: "population",
                got: n.min(m),
                min: 1,
            });
        }
        Ok(Self { alpha, n, m })
    }

    pub fn specialists(&self) -> usize {
        (self.alpha * self.n as f64).round() as usize
    }
}

/// Consensus variance on one dimension when `αn` specialists spread evenly
/// over dimensions and the remaining generalists split their budget `τᵢ`:
///
/// `πᵢ²(αn/m·1/τᵢ² + αn(m−1)/m·1/τ̲² + (1−α)n·1/(τ̲+τᵢ/m)²)`
pub fn mixed_population_variance(pi_i: f64, mix: &PopulationMix, tau_weak: f64, tau_i: f64) -> f64 {
    let (n, m, a) = (mix.n as f64, mix.m as f64, mix.alpha);
    let generalist = tau_weak + tau_i / m;
    pi_i * pi_i
        * (a * n / m / (tau_i * tau_i)
            + a * n * (m - 1.0) / m / (tau_weak * tau_weak)
            + (1.0 - a) * n / (generalist * generalist))
}

/// Sign of the variance slope in `α` and the corner it selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialistShare {
    /// `1/(mτᵢ²) + (m−1)/(mτ̲²) − 1/(τ̲+τᵢ/m)²`
    pub g: f64,
    /// `0` (all generalists) when `g > 0`, `1` (all specialists) when `g < 0`.
    pub alpha_star: f64,
    /// `|g| < 1e-12`: every share gives the same variance.
    pub degenerate: bool,
}

pub fn optimal_specialist_share(m: usize, tau_i: f64, tau_weak: f64) -> Result<SpecialistShare> {
    if m == 0 {
        return Err(Error::InvalidSize {
            what: "dimensions",
            got: 0,
            min: 1,
        });
    }
    if !(tau_i > 0.0 && tau_weak > 0.0) {
        return Err(Error::domain("precisions must be positive"));
    }
    let mf = m as f64;
    let generalist = tau_weak + tau_i / mf;
    let g = 1.0 / (mf * tau_i * tau_i) + (mf - 1.0) / (mf * tau_weak * tau_weak)
        - 1.0 / (generalist * generalist);
    Ok(SpecialistShare {
        g,
        alpha_star: if g > 0.0 { 0.0 } else { 1.0 },
        degenerate: g.abs() < 1e-12,
    })
}

/// How specialists are spread over dimensions when sampling a population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assignment {
    /// Each specialist picks a dimension uniformly at random.
    #[default]
    Random,
    /// Specialist `k` takes dimension `k mod m + 1`.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Specialist(usize),
    Generalist,
}

/// The first `round(αn)` agents are specialists.
pub fn assign_population(mix: &PopulationMix, assignment: Assignment, seed: u64) -> Vec<Role> {
    let k = mix.specialists();
    let dims: Vec<usize> = (1..=mix.m).collect();
    let mut rng = rng::stream(seed, rng::STREAM_POPULATION);
    (0..mix.n)
        .map(|i| {
            if i >= k {
                Role::Generalist
            } else {
                Role::Specialist(match assignment {
                    Assignment::Random => *dims.choose(&mut rng).unwrap(),
                    Assignment::RoundRobin => i % mix.m + 1,
                })
            }
        })
        .collect()
}

/// Signals for a mixed population with budget `τᵢ`: specialists get `τᵢ`
/// on their dimension and `τ̲` elsewhere, generalists `τ̲ + τᵢ/m` everywhere.
pub fn sample_population(
    roles: &[Role],
    theta: &[f64],
    tau_i: f64,
    tau_weak: f64,
    seed: u64,
) -> Result<StateEstimate> {
    let m = theta.len();
    if m == 0 || roles.is_empty() {
        return Err(Error::InvalidSize {
            what: "population",
            got: 0,
            min: 1,
        });
    }
    let stds: Vec<Vec<f64>> = roles
        .iter()
        .map(|role| {
            (1..=m)
                .map(|j| match role {
                    Role::Specialist(d) if *d == j => std_dev(tau_i),
                    Role::Specialist(_) => std_dev(tau_weak),
                    Role::Generalist => std_dev(tau_weak + tau_i / m as f64),
                })
                .collect()
        })
        .collect();
    Ok(draw(theta, &stds, seed))
}
