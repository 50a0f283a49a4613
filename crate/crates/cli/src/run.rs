//! Executes a scenario into an in-memory report.

use std::fmt::Write as _;
use std::path::Path;

use degroot_core::kernel::{weights_from_choices, DynamicsConfig, InitialChoices, TieOverride};
use degroot_core::multidim::{
    assign_population, consensus_with_influence, mixed_population_variance, sample_population,
    PopulationMix,
};
use degroot_core::precision::{individual_profile, planner_objective, social_profile};
use degroot_core::{
    agent_objective, best_dimension, best_response_precision_check, optimal_specialist_share,
    run_iterative_dynamics, stationary_complete_self_weight, stationary_core_periphery,
    stationary_distribution, stationary_star, ChoiceProfile, InfluenceVector, KernelParams,
    MultiplexInfluence, WeightMatrix,
};

use crate::error::{at, CliError, Result};
use crate::output::Table;
use crate::scenario::{Center, Mode, Scenario, TopologySpec};

/// Summary lines and named output files, in emission order.
#[derive(Debug, Default, PartialEq)]
pub struct Report {
    pub summary: Vec<(String, String)>,
    pub files: Vec<(String, String)>,
}

impl Report {
    fn say(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }
}

/// `base` resolves relative paths inside the scenario.
pub fn run_scenario(s: &Scenario, base: &Path) -> Result<Report> {
    match s.mode {
        Mode::Topology => topology(s, base),
        Mode::Precision => precision(s, base),
        Mode::Multiplex => multiplex(s, base),
        Mode::Population => population(s),
        Mode::KernelStatic => kernel_static(s),
        Mode::KernelDynamic => kernel_dynamic(s),
    }
}

fn influence(w: &WeightMatrix, field: &str) -> Result<InfluenceVector> {
    stationary_distribution(w).map_err(at(field))
}

fn closed_form(spec: &TopologySpec) -> Option<InfluenceVector> {
    match spec {
        TopologySpec::CompleteEqual { n } => Some(InfluenceVector::uniform(*n)),
        TopologySpec::CompleteSelfWeight { x } => stationary_complete_self_weight(x).ok(),
        TopologySpec::CorePeriphery { n } => stationary_core_periphery(*n).ok(),
        TopologySpec::Star {
            n,
            center: Center::Last,
        } => stationary_star(*n).ok(),
        _ => None,
    }
}

fn topology(s: &Scenario, base: &Path) -> Result<Report> {
    let spec = s.require(&s.topology, "topology")?;
    let w = spec.build("topology", base)?;
    let pi = influence(&w, "topology")?;
    let closed = closed_form(spec);
    let mut table = Table::new(if closed.is_some() {
        &["agent", "influence", "closed_form"][..]
    } else {
        &["agent", "influence"][..]
    });
    for i in 0..w.n() {
        let mut row = vec![(i + 1).to_string(), num(pi[i])];
        if let Some(c) = &closed {
            row.push(num(c[i]));
        }
        table.push(row);
    }
    let mut r = Report::default();
    r.say("agents", w.n());
    r.say("concentration", num(pi.concentration()));
    r.say("fixed_point_residual", format!("{:e}", pi.residual(&w)));
    if let Some(c) = &closed {
        let gap = pi
            .as_slice()
            .iter()
            .zip(c.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        r.say("closed_form_gap", format!("{gap:e}"));
    }
    r.file("weights.txt", w.to_text());
    r.file("influence.csv", table.to_csv());
    Ok(r)
}

fn precision(s: &Scenario, base: &Path) -> Result<Report> {
    let w = s
        .require(&s.topology, "topology")?
        .build("topology", base)?;
    let pi = influence(&w, "topology")?;
    let n = pi.len();
    let costs = s.agent_costs(n)?;
    let ind = individual_profile(&pi, &costs).map_err(at("cost"))?;
    let soc = social_profile(&pi, &costs).map_err(at("cost"))?;
    let mut table = Table::new(&[
        "agent",
        "influence",
        "tau_individual",
        "tau_social",
        "ratio",
        "objective_individual",
        "objective_social",
        "objective_deviation",
    ]);
    let mut r = Report::default();
    for i in 0..n {
        let t = ind.as_slice()[i];
        let so = soc.as_slice()[i];
        let deviated = soc.with(i, t).map_err(at("cost"))?;
        let objective = |tau| agent_objective(&pi, tau, i, &costs[i]).map_err(at("cost"));
        let row = [
            pi[i],
            t,
            so,
            so / t,
            objective(&ind)?,
            objective(&soc)?,
            objective(&deviated)?,
        ];
        let mut cells = vec![(i + 1).to_string()];
        cells.extend(row.iter().map(|x| num(*x)));
        table.push(cells);
        if n <= 12 {
            r.say(
                format!("agent {}", i + 1),
                format!(
                    "tau = {}, tau_social = {}, objectives individual / social / deviation = {} / {} / {}",
                    short(row[1]),
                    short(row[2]),
                    short(row[4]),
                    short(row[5]),
                    short(row[6])
                ),
            );
        }
    }
    let check = best_response_precision_check(&pi, &costs).map_err(at("cost"))?;
    r.say("individual_profile_is_equilibrium", check.is_equilibrium());
    r.say(
        "planner_objective_individual",
        num(planner_objective(&pi, &ind, &costs).map_err(at("cost"))?),
    );
    r.say(
        "planner_objective_social",
        num(planner_objective(&pi, &soc, &costs).map_err(at("cost"))?),
    );
    r.file("weights.txt", w.to_text());
    r.file("precision.csv", table.to_csv());
    Ok(r)
}

fn multiplex(s: &Scenario, base: &Path) -> Result<Report> {
    let spec = s.require(&s.multiplex, "multiplex")?;
    let layers = spec
        .layers
        .iter()
        .enumerate()
        .map(|(k, l)| l.build(&format!("multiplex.layers[{k}]"), base))
        .collect::<Result<Vec<_>>>()?;
    let mi = MultiplexInfluence::from_matrices(&layers).map_err(at("multiplex.layers"))?;
    let m = mi.m();
    let mut header = vec!["agent".to_string()];
    header.extend((1..=m).map(|d| format!("influence_{d}")));
    header.extend(["argmax".to_string(), "choice".to_string()]);
    let mut table = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut choices = Vec::with_capacity(mi.n());
    for i in 0..mi.n() {
        let mut row = vec![(i + 1).to_string()];
        row.extend((1..=m).map(|d| num(mi.layer(d)[i])));
        let set = mi.argmax_set(i).map_err(at("multiplex"))?;
        row.push(join(&set));
        row.push(set[0].to_string());
        choices.push(set[0]);
        table.push(row);
    }
    let mut r = Report::default();
    r.say("agents", mi.n());
    r.say("dimensions", m);
    r.say("choices", join(&choices));
    for (k, w) in layers.iter().enumerate() {
        r.file(format!("layer-{}.txt", k + 1), w.to_text());
    }
    r.file("multiplex.csv", table.to_csv());
    Ok(r)
}

fn population(s: &Scenario) -> Result<Report> {
    let p = s.require(&s.population, "population")?;
    let share = optimal_specialist_share(p.m, p.tau_i, p.tau_weak).map_err(at("population"))?;
    let pi = 1.0 / p.n as f64;
    let mut header = vec!["alpha", "specialists", "variance"];
    if p.reps > 0 {
        header.push("empirical_variance");
    }
    let mut table = Table::new(&header);
    let uniform = InfluenceVector::uniform(p.n);
    let theta = vec![0.0; p.m];
    for &alpha in &p.alphas {
        let mix = PopulationMix::new(alpha, p.n, p.m).map_err(at("population.alphas"))?;
        let mut row = vec![
            num(alpha),
            mix.specialists().to_string(),
            num(mixed_population_variance(pi, &mix, p.tau_weak, p.tau_i)),
        ];
        if p.reps > 0 {
            let roles = assign_population(&mix, p.assignment, s.seed);
            let mut sq = 0.0;
            for rep in 0..p.reps {
                let e = sample_population(
                    &roles,
                    &theta,
                    p.tau_i,
                    p.tau_weak,
                    s.seed.wrapping_add(rep + 1),
                )
                .map_err(at("population"))?;
                let c = consensus_with_influence(&uniform, &e).map_err(at("population"))?;
                sq += c[0] * c[0];
            }
            row.push(num(sq / p.reps as f64));
        }
        table.push(row);
    }
    let mut r = Report::default();
    r.say("g", num(share.g));
    r.say("alpha_star", num(share.alpha_star));
    r.say("degenerate", share.degenerate);
    r.file("population.csv", table.to_csv());
    Ok(r)
}

fn kernel_params(s: &Scenario) -> Result<(&crate::scenario::KernelSpec, KernelParams)> {
    let k = s.require(&s.kernel, "kernel")?;
    let params = KernelParams::new(k.alpha, k.gamma).map_err(at("kernel"))?;
    Ok((k, params))
}

fn kernel_static(s: &Scenario) -> Result<Report> {
    let (k, params) = kernel_params(s)?;
    let choices = k
        .choices
        .clone()
        .ok_or_else(|| CliError::config("kernel-static mode requires kernel.choices"))?;
    let d = ChoiceProfile::new(choices, k.m).map_err(at("kernel.choices"))?;
    let w = weights_from_choices(&d, params.alpha).map_err(at("kernel"))?;
    let pi = influence(&w, "kernel")?;
    let positions = d.positions();
    let mut header = vec![
        "agent".to_string(),
        "choice".to_string(),
        "influence".to_string(),
    ];
    header.extend((1..=k.m).map(|c| format!("objective_{c}")));
    header.extend(["argmin".to_string(), "best".to_string()]);
    let mut table = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut best = Vec::with_capacity(d.n());
    for i in 0..d.n() {
        let resp = best_dimension(i, &positions, k.m, params.alpha, k.tie).map_err(at("kernel"))?;
        let mut row = vec![(i + 1).to_string(), d.as_slice()[i].to_string(), num(pi[i])];
        row.extend(resp.objectives.iter().map(|x| num(*x)));
        row.push(join(&resp.argmin));
        row.push(resp.choice.to_string());
        best.push(resp.choice);
        table.push(row);
    }
    let mut r = Report::default();
    r.say("influence", join_f(pi.as_slice()));
    r.say("concentration", num(pi.concentration()));
    r.say("best_responses", join(&best));
    r.file("weights.txt", w.to_text());
    r.file("best_response.csv", table.to_csv());
    Ok(r)
}

fn kernel_dynamic(s: &Scenario) -> Result<Report> {
    let (k, params) = kernel_params(s)?;
    let (n, initial) = match (&k.choices, k.n) {
        (Some(d), n) => {
            if n.is_some_and(|n| n != d.len()) {
                return Err(CliError::config(
                    "kernel.n disagrees with the length of kernel.choices",
                ));
            }
            let d = ChoiceProfile::new(d.clone(), k.m).map_err(at("kernel.choices"))?;
            (d.n(), InitialChoices::Given(d))
        }
        (None, Some(n)) => (n, InitialChoices::Random { seed: s.seed }),
        (None, None) => {
            return Err(CliError::config(
                "kernel-dynamic mode requires kernel.choices or kernel.n",
            ))
        }
    };
    let overrides = k
        .overrides
        .iter()
        .map(|o| {
            if o.agent == 0 {
                return Err(CliError::config(
                    "kernel.overrides: agents are numbered from 1",
                ));
            }
            Ok(TieOverride {
                period: o.period,
                agent: o.agent - 1,
                dimension: o.dimension,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let config = DynamicsConfig {
        n,
        m: k.m,
        periods: k.periods,
        params,
        initial,
        tie: k.tie,
        overrides,
        beliefs: k.beliefs,
        network: k.network,
    };
    let traj = run_iterative_dynamics(&config).map_err(at("kernel"))?;
    let mut agents = Table::new(&[
        "period",
        "agent",
        "choice",
        "influence",
        "expected",
        "argmin",
    ]);
    let mut periods = Table::new(&["period", "concentration"]);
    let mut r = Report::default();
    for p in &traj.periods {
        for i in 0..n {
            let (expected, argmin) = match (p.expectations.get(i), p.responses.get(i)) {
                (Some(e), Some(resp)) => (join_f(e), join(&resp.argmin)),
                _ => (String::new(), String::new()),
            };
            agents.push(vec![
                p.period.to_string(),
                (i + 1).to_string(),
                p.choices.as_slice()[i].to_string(),
                num(p.influence[i]),
                expected,
                argmin,
            ]);
        }
        periods.push(vec![p.period.to_string(), num(p.concentration)]);
        r.say(
            format!("period {}", p.period),
            format!(
                "choices = {}, influence = {}, concentration = {}",
                join(p.choices.as_slice()),
                join_f(p.influence.as_slice()),
                short(p.concentration)
            ),
        );
        r.file(
            format!("weights-period-{}.txt", p.period),
            p.weights.to_text(),
        );
    }
    r.file("trajectory.csv", agents.to_csv());
    r.file("periods.csv", periods.to_csv());
    Ok(r)
}

/// Lossless shortest representation.
fn num(x: f64) -> String {
    format!("{x}")
}

fn short(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x:.6}").unwrap();
    s
}

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn join_f(xs: &[f64]) -> String {
    xs.iter().map(|x| short(*x)).collect::<Vec<_>>().join(";")
}
