//! Social learning under DeGroot updating when agents choose how precisely
//! and about what they learn.
//!
//! The crate is organised around four layers:
//!
//! * [`network`]: row-stochastic weight matrices, benchmark topologies,
//!   stationary influence and consensus.
//! * [`precision`]: individually and socially optimal signal precision
//!   for a fixed network.
//! * [`multidim`]: multi-dimensional states, multiplex dimension choice and
//!   the specialist/generalist allocation comparison.
//! * [`kernel`]: networks formed from dimension choices through an RBF
//!   kernel, best-response dimension choice and the multi-period dynamics.
//!
//! Agents are 0-based in the API. Dimensions are labels `1..=m` because the
//! kernel treats them as points on the integer line.

pub mod error;
pub mod kernel;
pub mod multidim;
pub mod network;
pub mod precision;
pub mod rng;

pub use error::{Error, Result};
pub use kernel::{
    best_dimension, consistent_memories, kernel_scalar, memory_distance, profile_objective,
    run_iterative_dynamics, weights_from_choices, weights_from_memories, BeliefMode, BeliefState,
    BestResponse, ChoiceProfile, DynamicsConfig, InitialChoices, KernelParams, MemoryProfile,
    NetworkBasis, PeriodRecord, TieOverride, TieRule, Trajectory,
};
pub use multidim::{
    mixed_population_variance, multidim_consensus, multiplex_choice, optimal_specialist_share,
    sample_estimates, MultiplexInfluence, PopulationMix, SignalModel, SpecialistShare,
    StateEstimate,
};
pub use network::{
    build_complete_equal, build_complete_self_weight, build_core_periphery, build_star,
    degroot_consensus, degroot_iterate, stationary_complete_self_weight, stationary_core_periphery,
    stationary_distribution, stationary_star, InfluenceVector, OpinionVector, WeightMatrix,
};
pub use precision::{
    agent_objective, best_response_precision_check, consensus_variance, deviation_check,
    optimal_precision, planner_objective, social_precision, CostSpec, DeviationReport,
    PrecisionProfile,
};
