//! Scenario files: TOML with one table per concern.

use std::path::{Path, PathBuf};

use degroot_core::kernel::{BeliefMode, NetworkBasis, TieRule};
use degroot_core::multidim::Assignment;
use degroot_core::{
    build_complete_equal, build_complete_self_weight, build_core_periphery, build_star, CostSpec,
    WeightMatrix,
};
use serde::Deserialize;

use crate::error::{at, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Topology,
    Precision,
    Multiplex,
    Population,
    KernelStatic,
    KernelDynamic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub topology: Option<TopologySpec>,
    /// Cost shared by every agent unless `costs` lists one per agent.
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub costs: Vec<CostSpec>,
    pub multiplex: Option<MultiplexSpec>,
    pub population: Option<PopulationSpec>,
    pub kernel: Option<KernelSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Center {
    First,
    #[default]
    Last,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TopologySpec {
    CompleteEqual {
        n: usize,
    },
    CompleteSelfWeight {
        x: Vec<f64>,
    },
    CorePeriphery {
        n: usize,
    },
    Star {
        n: usize,
        #[serde(default)]
        center: Center,
    },
    Matrix {
        rows: Vec<Vec<f64>>,
    },
    /// Matrix in the plain-text format written by `weights.txt`.
    File {
        path: PathBuf,
    },
}

impl TopologySpec {
    pub fn build(&self, field: &str, base: &Path) -> Result<WeightMatrix> {
        let err = at(field);
        match self {
            TopologySpec::CompleteEqual { n } => build_complete_equal(*n).map_err(err),
            TopologySpec::CompleteSelfWeight { x } => build_complete_self_weight(x).map_err(err),
            TopologySpec::CorePeriphery { n } => build_core_periphery(*n).map_err(err),
            TopologySpec::Star { n, center } => {
                let w = build_star(*n).map_err(&err)?;
                match center {
                    Center::Last => Ok(w),
                    Center::First => {
                        let perm: Vec<usize> = (0..*n).map(|i| (i + 1) % n).collect();
                        w.relabel(&perm).map_err(err)
                    }
                }
            }
            TopologySpec::Matrix { rows } => WeightMatrix::from_rows(rows.clone()).map_err(err),
            TopologySpec::File { path } => {
                let path = base.join(path);
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                WeightMatrix::from_text(&text).map_err(err)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplexSpec {
    pub layers: Vec<TopologySpec>,
}

fn default_alphas() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub n: usize,
    pub m: usize,
    pub tau_i: f64,
    pub tau_weak: f64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Monte Carlo replications per share; 0 skips sampling.
    #[serde(default)]
    pub reps: u64,
    #[serde(default)]
    pub assignment: Assignment,
}

fn default_gamma() -> f64 {
    1.0
}

fn default_periods() -> usize {
    1
}

/// Agents are 1-based here, as in every emitted table.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub period: usize,
    pub agent: usize,
    pub dimension: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    /// `inf` selects the exact-match limit.
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub m: usize,
    /// Initial choices; drawn from `seed` when absent.
    pub choices: Option<Vec<usize>>,
    pub n: Option<usize>,
    #[serde(default = "default_periods")]
    pub periods: usize,
    #[serde(default)]
    pub tie: TieRule,
    #[serde(default)]
    pub beliefs: BeliefMode,
    #[serde(default)]
    pub network: NetworkBasis,
    #[serde(default)]
    pub overrides: Vec<OverrideSpec>,
}

/// Sets `key` (dotted path) to `raw`, read as a TOML value when it parses
/// as one and as a string otherwise.
pub fn apply_set(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(format!("--set: bad key `{key}`")));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry.as_table_mut().ok_or_else(|| {
            CliError::config(format!("--set: `{part}` in `{key}` is not a table"))
        })?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

pub fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| CliError::config(e.to_string().trim_end().to_string()))
}

pub fn from_table(table: toml::Table) -> Result<Scenario> {
    toml::Value::Table(table)
        .try_into::<Scenario>()
        .map_err(|e| CliError::config(e.to_string().trim_end().to_string()))
}

impl Scenario {
    pub fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| {
            CliError::config(format!("mode `{:?}` requires a [{name}] table", self.mode))
        })
    }

    /// One cost per agent.
    pub fn agent_costs(&self, n: usize) -> Result<Vec<CostSpec>> {
        let costs = match (&self.cost, self.costs.is_empty()) {
            (Some(c), true) => vec![c.clone(); n],
            (None, false) if self.costs.len() == n => self.costs.clone(),
            (None, false) => {
                return Err(CliError::config(format!(
                    "costs: expected {n} entries, got {}",
                    self.costs.len()
                )))
            }
            (Some(_), false) => {
                return Err(CliError::config("cost and costs are mutually exclusive"))
            }
            (None, true) => return Err(CliError::config("precision mode requires cost or costs")),
        };
        for (i, c) in costs.iter().enumerate() {
            c.validate()
                .map_err(at(&format!("cost for agent {}", i + 1)))?;
        }
        Ok(costs)
    }
}
