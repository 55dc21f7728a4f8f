//! The `simulate` subcommand: builds the transformed generator, checks
//! detailed balance against the exact stationary weights before trusting
//! any trajectory, then runs one seeded trajectory per requested
//! (q0, sector) pair and compares time-weighted occupation to the exact
//! measure in total variation.

use std::collections::BTreeMap;

use serde::Serialize;

use qexch_core::simulate::{
    empirical_distribution, gillespie, tv_distance, CtmcGenerator, RNG_ALGORITHM,
};
use qexch_core::statespace::SectorLabel;
use qexch_core::transforms::{
    assert_constant_row_sums, ground_state_conjugate, stationary_and_reversibility, to_ctmc,
};
use qexch_core::weights::{build_w_l, global_hamiltonian, w_coefficient};

use crate::config::ModelConfig;
use crate::report::{TOOL_NAME, TOOL_VERSION};
use crate::suites::{local_hamiltonian, weight_spec, SuiteError};

/// Detailed balance of the numeric generator must hold this tightly
/// against the exact measure before a trajectory is run.
pub const TRUST_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SimCmdError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    /// construction succeeded syntactically but the checks refuse the run;
    /// maps to exit code 1
    #[error("{0}")]
    Check(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub config: BTreeMap<String, String>,
    pub runs: Vec<SimRun>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimRun {
    pub sector: Vec<u32>,
    pub q0: f64,
    pub seed: u64,
    pub events: u64,
    pub burn_in_events: u64,
    pub x0: usize,
    pub absorbed: bool,
    pub empirical: Vec<f64>,
    pub exact: Vec<f64>,
    pub tv_distance: f64,
}

fn exact_measure(
    gen: &CtmcGenerator,
    spec: &qexch_core::weights::WeightSpec,
    q0: f64,
) -> Vec<f64> {
    let raw: Vec<f64> = gen
        .states
        .iter()
        .map(|s| w_coefficient(spec, s.sites()).eval(q0).expect("q0 > 0"))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

pub fn cmd_simulate(cfg: &ModelConfig) -> Result<SimReport, SimCmdError> {
    let spec = weight_spec(cfg);
    let h = local_hamiltonian(cfg)?;
    let h_global = global_hamiltonian(&h, cfg.l)
        .map_err(|e| SimCmdError::Check(format!("chain Hamiltonian: {e}")))?;
    let w = build_w_l(&spec, cfg.l);
    let m = ground_state_conjugate(&h_global, &w)
        .map_err(|e| SimCmdError::Check(format!("conjugation: {e}")))?;
    let shift = assert_constant_row_sums(&m)
        .map_err(|e| SimCmdError::Check(format!("row sums: {e}")))?;

    let mut runs = Vec::new();
    for &q0 in &cfg.q0 {
        let generators = to_ctmc(&m, &shift, q0, cfg.n, cfg.j, cfg.l)
            .map_err(|e| SimCmdError::Check(format!("generator at q0 = {q0}: {e}")))?;
        for gen in &generators {
            if let Some(wanted) = &cfg.sector {
                if gen.sector != SectorLabel(wanted.clone()) {
                    continue;
                }
            } else if gen.len() < 2 {
                // singleton sectors carry no dynamics; skip unless asked for
                continue;
            }
            let exact = exact_measure(gen, &spec, q0);
            let rr = stationary_and_reversibility(gen, &exact);
            if rr.max_detailed_balance_violation > TRUST_TOL
                || rr.max_stationary_violation > TRUST_TOL
            {
                return Err(SimCmdError::Check(format!(
                    "generator at q0 = {q0}, sector {:?} fails detailed balance \
                     against the exact measure (violations {:e}, {:e})",
                    gen.sector.0,
                    rr.max_detailed_balance_violation,
                    rr.max_stationary_violation
                )));
            }
            let x0 = cfg.x0.unwrap_or(0);
            let trajectory = gillespie(gen, x0, cfg.events as usize, cfg.seed)
                .map_err(|e| SimCmdError::Check(e.to_string()))?;
            let burn = ((trajectory.steps.len() as f64) * cfg.burn_in) as usize;
            let kept = &trajectory.steps[burn..];
            let empirical = empirical_distribution(kept, gen.len())
                .map_err(|e| SimCmdError::Check(e.to_string()))?;
            let tv = tv_distance(&empirical, &exact).map_err(|e| SimCmdError::Check(e.to_string()))?;
            runs.push(SimRun {
                sector: gen.sector.0.clone(),
                q0,
                seed: cfg.seed,
                events: cfg.events,
                burn_in_events: burn as u64,
                x0,
                absorbed: trajectory.absorbed,
                empirical,
                exact,
                tv_distance: tv,
            });
        }
    }
    if runs.is_empty() {
        return Err(SimCmdError::Check(
            "no sector matched the requested configuration".into(),
        ));
    }
    Ok(SimReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        rng: RNG_ALGORITHM,
        config: cfg.echo(),
        runs,
    })
}

impl SimReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
