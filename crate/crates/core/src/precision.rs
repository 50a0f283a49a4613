//! Precision choice on a fixed network.
//!
//! An agent drawing a signal with precision `τ` sees variance `1/τ²`. With
//! stationary influence `π`, the consensus variance is `Σ πₖ²/τₖ²`; agent
//! `i` adds its own cost `cᵢ(τᵢ)` and the planner scales the variance term by
//! `n` and adds every agent's cost. The first-order conditions are
//! `τ³ c'(τ) = 2πᵢ²` (individual) and `τ³ c'(τ) = 2nπᵢ²` (planner).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::InfluenceVector;

/// Residual bound on the first-order condition.
pub const FOC_TOL: f64 = 1e-10;
/// Search bracket for the first-order condition root.
pub const ROOT_BRACKET: (f64, f64) = (1e-12, 1e12);
const MAX_BISECTIONS: usize = 200;

/// Strictly increasing precision cost with `c(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CostSpec {
    /// `κ·τ`
    Linear { kappa: f64 },
    /// `a·τ^p`, `p ≥ 1`
    Power { a: f64, p: f64 },
    /// Monotone cubic (PCHIP) through `(0, 0)` and the given knots, extended
    /// linearly past the last knot.
    Tabulated { tau: Vec<f64>, cost: Vec<f64> },
}

impl CostSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            CostSpec::Linear { kappa } => {
                if !(kappa.is_finite() && *kappa > 0.0) {
                    return Err(Error::domain(format!(
                        "linear cost kappa = {kappa} must be > 0"
                    )));
                }
            }
            CostSpec::Power { a, p } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::domain(format!("power cost a = {a} must be > 0")));
                }
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::domain(format!("power cost p = {p} must be >= 1")));
                }
            }
            CostSpec::Tabulated { tau, cost } => {
                if tau.is_empty() || tau.len() != cost.len() {
                    return Err(Error::domain(
                        "tabulated cost needs equally many (nonzero) tau and cost knots",
                    ));
                }
                let strictly_up = |v: &[f64]| {
                    v.iter().all(|x| x.is_finite())
                        && std::iter::once(&0.0).chain(v).zip(v).all(|(a, b)| b > a)
                };
                if !strictly_up(tau) {
                    return Err(Error::domain(
                        "tabulated tau knots must be positive and strictly increasing",
                    ));
                }
                if !strictly_up(cost) {
                    return Err(Error::domain(
                        "tabulated cost must be positive and strictly increasing",
                    ));
                }
                let last = tau[tau.len() - 1];
                for k in 1..=1000 {
                    let t = last * 1.1 * k as f64 / 1000.0;
                    if self.derivative(t) <= 0.0 {
                        return Err(Error::domain(format!(
                            "tabulated cost is not strictly increasing near tau = {t}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            CostSpec::Linear { kappa } => kappa * tau,
            CostSpec::Power { a, p } => a * tau.powf(*p),
            CostSpec::Tabulated { tau: xs, cost } => Pchip::new(xs, cost).eval(tau).0,
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        match self {
            CostSpec::Linear { kappa } => *kappa,
            CostSpec::Power { a, p } => a * p * tau.powf(p - 1.0),
            CostSpec::Tabulated { tau: xs, cost } => Pchip::new(xs, cost).eval(tau).1,
        }
    }
}

/// Fritsch–Butland monotone Hermite interpolant through `(0,0)` and the knots.
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let x: Vec<f64> = std::iter::once(0.0).chain(xs.iter().copied()).collect();
        let y: Vec<f64> = std::iter::once(0.0).chain(ys.iter().copied()).collect();
        let k = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..k - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; k];
        d[0] = delta[0];
        d[k - 1] = delta[k - 2];
        for i in 1..k - 1 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        Self { x, y, d }
    }

    /// Value and derivative at `t ≥ 0`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let k = self.x.len();
        if t >= self.x[k - 1] {
            let slope = self.d[k - 1];
            return (self.y[k - 1] + slope * (t - self.x[k - 1]), slope);
        }
        let i = self.x.partition_point(|&xi| xi <= t).saturating_sub(1);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
        let h10 = s.powi(3) - 2.0 * s * s + s;
        let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
        let h11 = s.powi(3) - s * s;
        let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = 6.0 * s * s - 6.0 * s;
        let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
        let dh01 = -6.0 * s * s + 6.0 * s;
        let dh11 = 3.0 * s * s - 2.0 * s;
        let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
        (value, slope)
    }
}

/// Per-agent signal precisions, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionProfile(Vec<f64>);

impl PrecisionProfile {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        if let Some((i, t)) = tau
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(Error::domain(format!(
                "precision of agent {} is {t}; must be > 0",
                i + 1
            )));
        }
        Ok(Self(tau))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with agent `i`'s precision replaced.
    pub fn with(&self, i: usize, tau: f64) -> Result<Self> {
        let mut v = self.0.clone();
        *v.get_mut(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.0.len(),
        })? = tau;
        Self::new(v)
    }
}

/// `Σ πₖ²/τₖ²`
pub fn consensus_variance(pi: &InfluenceVector, tau: &PrecisionProfile) -> Result<f64> {
    if pi.len() != tau.len() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            got: tau.len(),
        });
    }
    Ok(pi
        .as_slice()
        .iter()
        .zip(tau.as_slice())
        .map(|(p, t)| p * p / (t * t))
        .sum())
}

/// Individually optimal precision: root of `τ³ c'(τ) = 2πᵢ²`.
pub fn optimal_precision(pi_i: f64, cost: &CostSpec) -> Result<f64> {
    solve_foc(pi_i, cost, 1)
}

/// Planner's precision for agent `i`: root of `τ³ c'(τ) = 2nπᵢ²`.
pub fn social_precision(pi_i: f64, cost: &CostSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSize {
            what: "population",
            got: 0,
            min: 1,
        });
    }
    solve_foc(pi_i, cost, n)
}

fn solve_foc(pi_i: f64, cost: &CostSpec, n: usize) -> Result<f64> {
    if !(pi_i > 0.0 && pi_i <= 1.0) {
        return Err(Error::domain(format!(
            "influence {pi_i} must lie in (0, 1]"
        )));
    }
    cost.validate()?;
    let target = 2.0 * n as f64 * pi_i * pi_i;
    if let CostSpec::Linear { kappa } = cost {
        return Ok((target / kappa).cbrt());
    }

    let g = |t: f64| t.powi(3) * cost.derivative(t) - target;
    let (mut lo, mut hi) = ROOT_BRACKET;
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return Err(Error::Solver(format!(
            "first-order condition not bracketed in [{lo:e}, {hi:e}]"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        // Geometric midpoint keeps relative precision across the wide bracket.
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (glo, ghi) = (g(lo), g(hi));
    let tau = if glo.abs() <= ghi.abs() { lo } else { hi };
    let residual = glo.abs().min(ghi.abs());
    if residual >= FOC_TOL {
        return Err(Error::Solver(format!(
            "first-order residual {residual:e} at tau = {tau} exceeds {FOC_TOL:e}"
        )));
    }
    Ok(tau)
}

/// Agent `i`'s loss: consensus variance plus its own cost.
pub fn agent_objective(
    pi: &InfluenceVector,
    tau: &PrecisionProfile,
    i: usize,
    cost: &CostSpec,
) -> Result<f64> {
    let t = *tau.as_slice().get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: tau.len(),
    })?;
    Ok(consensus_variance(pi, tau)? + cost.eval(t))
}

/// `n · Σ πₖ²/τₖ² + Σ cᵢ(τᵢ)`
pub fn planner_objective(
    pi: &InfluenceVector,
    tau: &PrecisionProfile,
    costs: &[CostSpec],
) -> Result<f64> {
    if costs.len() != tau.len() {
        return Err(Error::LengthMismatch {
            expected: tau.len(),
            got: costs.len(),
        });
    }
    let n = pi.len() as f64;
    let cost: f64 = costs
        .iter()
        .zip(tau.as_slice())
        .map(|(c, t)| c.eval(*t))
        .sum();
    Ok(n * consensus_variance(pi, tau)? + cost)
}

/// Theorem-style profile: every agent at its individual optimum.
pub fn individual_profile(pi: &InfluenceVector, costs: &[CostSpec]) -> Result<PrecisionProfile> {
    check_costs(pi, costs)?;
    let tau = pi
        .as_slice()
        .iter()
        .zip(costs)
        .map(|(p, c)| optimal_precision(*p, c))
        .collect::<Result<Vec<_>>>()?;
    PrecisionProfile::new(tau)
}

/// Every agent at the planner's precision.
pub fn social_profile(pi: &InfluenceVector, costs: &[CostSpec]) -> Result<PrecisionProfile> {
    check_costs(pi, costs)?;
    let n = pi.len();
    let tau = pi
        .as_slice()
        .iter()
        .zip(costs)
        .map(|(p, c)| social_precision(*p, c, n))
        .collect::<Result<Vec<_>>>()?;
    PrecisionProfile::new(tau)
}

fn check_costs(pi: &InfluenceVector, costs: &[CostSpec]) -> Result<()> {
    if costs.len() != pi.len() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            got: costs.len(),
        });
    }
    Ok(())
}

/// Improvement slack below which a grid deviation is not a violation.
pub const DEVIATION_TOL: f64 = 1e-8;
/// Number of log-spaced deviation candidates in `[1e-3, 1e3]`.
pub const DEVIATION_GRID: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentDeviation {
    pub agent: usize,
    pub tau: f64,
    pub objective: f64,
    pub best_tau: f64,
    pub best_objective: f64,
}

impl AgentDeviation {
    pub fn gain(&self) -> f64 {
        self.objective - self.best_objective
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub agents: Vec<AgentDeviation>,
    /// Agents with a grid deviation improving their objective by more than
    /// [`DEVIATION_TOL`].
    pub violations: Vec<usize>,
}

impl DeviationReport {
    pub fn is_equilibrium(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Searches each agent's unilateral deviations over a log grid.
pub fn deviation_check(
    pi: &InfluenceVector,
    tau: &PrecisionProfile,
    costs: &[CostSpec],
) -> Result<DeviationReport> {
    check_costs(pi, costs)?;
    if tau.len() != pi.len() {
        return Err(Error::LengthMismatch {
            expected: pi.len(),
            got: tau.len(),
        });
    }
    let grid: Vec<f64> = (0..DEVIATION_GRID)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (DEVIATION_GRID - 1) as f64))
        .collect();
    let mut agents = Vec::with_capacity(pi.len());
    let mut violations = Vec::new();
    for (i, cost) in costs.iter().enumerate() {
        let objective = agent_objective(pi, tau, i, cost)?;
        let mut best = (tau.as_slice()[i], objective);
        for &t in &grid {
            let v = agent_objective(pi, &tau.with(i, t)?, i, cost)?;
            if v < best.1 {
                best = (t, v);
            }
        }
        let dev = AgentDeviation {
            agent: i,
            tau: tau.as_slice()[i],
            objective,
            best_tau: best.0,
            best_objective: best.1,
        };
        if dev.gain() > DEVIATION_TOL {
            violations.push(i);
        }
        agents.push(dev);
    }
    Ok(DeviationReport { agents, violations })
}

/// Checks that the individually optimal profile is a mutual best response.
pub fn best_response_precision_check(
    pi: &InfluenceVector,
    costs: &[CostSpec],
) -> Result<DeviationReport> {
    let tau = individual_profile(pi, costs)?;
    deviation_check(pi, &tau, costs)
}
