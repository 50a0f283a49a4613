//! Multi-period choice dynamics.
//!
//! Each period the realised choices form a network. Before the next period
//! every agent forms an expectation of the others' choices from that network
//! and best-responds to it; all agents move simultaneously.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    best_dimension, consistent_memories, uniform_prior, weights_from_choices,
    weights_from_memories, BestResponse, ChoiceProfile, KernelParams, MemoryProfile, TieRule,
};
use crate::error::{Error, Result};
use crate::network::{stationary_distribution, InfluenceVector, WeightMatrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialChoices {
    Given(ChoiceProfile),
    /// Each agent picks uniformly from `1..=m`.
    Random {
        seed: u64,
    },
}

/// How agents turn the observed network into expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeliefMode {
    /// Posterior over every memory profile consistent with the network,
    /// under a uniform prior.
    #[default]
    Posterior,
    /// Agents back out the previous period's choices exactly.
    Observed,
}

/// What the realised network of a period is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkBasis {
    /// Discounted distance between full choice histories.
    #[default]
    Memory,
    /// The current period's choices only.
    Latest,
}

/// Forces agent `agent` (0-based) to pick `dimension` in `period` (1-based),
/// provided it is among that agent's best responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieOverride {
    pub period: usize,
    pub agent: usize,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub n: usize,
    pub m: usize,
    pub periods: usize,
    pub params: KernelParams,
    pub initial: InitialChoices,
    pub tie: TieRule,
    pub overrides: Vec<TieOverride>,
    pub beliefs: BeliefMode,
    pub network: NetworkBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    /// 1-based.
    pub period: usize,
    pub choices: ChoiceProfile,
    pub weights: WeightMatrix,
    pub influence: InfluenceVector,
    /// `Σ πₖ²`
    pub concentration: f64,
    /// Expected choices each agent best-responded to (empty in period 1).
    pub expectations: Vec<Vec<f64>>,
    /// Best-response evaluations leading to this period (empty in period 1).
    pub responses: Vec<BestResponse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub periods: Vec<PeriodRecord>,
}

impl Trajectory {
    pub fn last(&self) -> &PeriodRecord {
        self.periods
            .last()
            .expect("trajectory has at least one period")
    }
}

impl DynamicsConfig {
    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n < 2 {
            return Err(Error::InvalidSize {
                what: "agents",
                got: self.n,
                min: 2,
            });
        }
        if self.m == 0 {
            return Err(Error::InvalidSize {
                what: "dimensions",
                got: 0,
                min: 1,
            });
        }
        if self.periods == 0 {
            return Err(Error::InvalidSize {
                what: "periods",
                got: 0,
                min: 1,
            });
        }
        if let InitialChoices::Given(d) = &self.initial {
            if d.n() != self.n || d.m() != self.m {
                return Err(Error::domain(format!(
                    "initial profile has {} agents over {} dimensions; expected {} over {}",
                    d.n(),
                    d.m(),
                    self.n,
                    self.m
                )));
            }
        }
        for o in &self.overrides {
            if o.agent >= self.n || !(1..=self.m).contains(&o.dimension) || o.period < 2 {
                return Err(Error::domain(format!(
                    "tie override {o:?} refers to an invalid period, agent or dimension"
                )));
            }
        }
        Ok(())
    }

    fn network(&self, memory: &MemoryProfile) -> Result<WeightMatrix> {
        match self.network {
            NetworkBasis::Memory => weights_from_memories(memory, &self.params),
            NetworkBasis::Latest => weights_from_choices(&memory.latest(), self.params.alpha),
        }
    }
}

fn record(
    period: usize,
    memory: &MemoryProfile,
    weights: WeightMatrix,
    expectations: Vec<Vec<f64>>,
    responses: Vec<BestResponse>,
) -> Result<PeriodRecord> {
    let influence = stationary_distribution(&weights)?;
    Ok(PeriodRecord {
        period,
        choices: memory.latest(),
        concentration: influence.concentration(),
        weights,
        influence,
        expectations,
        responses,
    })
}

pub fn run_iterative_dynamics(config: &DynamicsConfig) -> Result<Trajectory> {
    config.validate()?;
    let (n, m) = (config.n, config.m);
    let first = match &config.initial {
        InitialChoices::Given(d) => d.clone(),
        InitialChoices::Random { seed } => {
            let mut rng = rng::stream(*seed, rng::STREAM_INITIAL_CHOICES);
            ChoiceProfile::new((0..n).map(|_| rng.random_range(1..=m)).collect(), m)?
        }
    };
    let mut memory = MemoryProfile::from_choices(&first);
    let weights = config.network(&memory)?;
    let mut periods = vec![record(1, &memory, weights, Vec::new(), Vec::new())?];

    for period in 2..=config.periods {
        let observed = &periods[periods.len() - 1].weights;
        let observed_memory = match config.network {
            NetworkBasis::Memory => memory.clone(),
            NetworkBasis::Latest => MemoryProfile::from_choices(&memory.latest()),
        };
        let mut expectations = Vec::with_capacity(n);
        let mut responses = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let expected = match config.beliefs {
                BeliefMode::Observed => memory.latest().positions(),
                BeliefMode::Posterior => {
                    consistent_memories(
                        observed,
                        i,
                        observed_memory.history(i),
                        m,
                        &config.params,
                        uniform_prior,
                    )?
                    .expected_choices
                }
            };
            let response = best_dimension(i, &expected, m, config.params.alpha, config.tie)?;
            let choice = match config
                .overrides
                .iter()
                .find(|o| o.period == period && o.agent == i)
            {
                Some(o) if response.argmin.contains(&o.dimension) => o.dimension,
                Some(o) => {
                    return Err(Error::domain(format!(
                        "tie override for agent {} in period {period} picks dimension {}, \
                         but the best responses are {:?}",
                        i + 1,
                        o.dimension,
                        response.argmin
                    )))
                }
                None => response.choice,
            };
            next.push(choice);
            expectations.push(expected);
            responses.push(response);
        }
        memory.push(&ChoiceProfile::new(next, m)?)?;
        let weights = config.network(&memory)?;
        periods.push(record(period, &memory, weights, expectations, responses)?);
    }
    Ok(Trajectory { periods })
}
