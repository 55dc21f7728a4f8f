//! Seeded continuous-time Markov simulation on one conservation sector.
//!
//! The generator convention is the standard Q-matrix one: `rate(x -> y)` is
//! the off-diagonal entry at `(x, y)`, rows sum to zero, and holding times
//! are exponential with the state's exit rate. Occupation statistics are
//! time-weighted, matching the stationary measure of the continuous-time
//! chain rather than the embedded jump chain.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::statespace::{MultiConfig, SectorLabel};

/// Identifier of the trajectory RNG, recorded in reports for
/// reproducibility across runs and platforms.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Numerical tolerance for generator row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("initial state {0} out of range {1}")]
    StateOutOfRange(usize, usize),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("total holding time is zero")]
    ZeroTotalTime,
    #[error("distribution supports differ: {0} vs {1}")]
    SupportMismatch(usize, usize),
}

/// A numeric-rate transition matrix on one conservation sector.
#[derive(Debug, Clone)]
pub struct CtmcGenerator {
    pub sector: SectorLabel,
    pub states: Vec<MultiConfig>,
    /// off-diagonal jump rates, keyed `(from, to)`, all positive
    pub rates: BTreeMap<(usize, usize), f64>,
    pub exit_rates: Vec<f64>,
}

impl CtmcGenerator {
    pub fn new(sector: SectorLabel, states: Vec<MultiConfig>, rates: BTreeMap<(usize, usize), f64>) -> Self {
        let mut exit_rates = vec![0.0; states.len()];
        for (&(from, _), rate) in &rates {
            exit_rates[from] += rate;
        }
        Self {
            sector,
            states,
            rates,
            exit_rates,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Outgoing `(to, rate)` pairs of a state, in ascending target order.
    pub fn out_edges(&self, from: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rates
            .range((from, 0)..(from, usize::MAX))
            .map(|(&(_, to), &r)| (to, r))
    }
}

/// One visited state and the time spent in it.
pub type Step = (usize, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// set when the chain hit a state with zero exit rate before the
    /// requested number of events
    pub absorbed: bool,
}

/// Kinetic Monte Carlo: reproducible trajectory of `events` jumps from
/// state `x0` under the given seed.
pub fn gillespie(
    generator: &CtmcGenerator,
    x0: usize,
    events: usize,
    seed: u64,
) -> Result<Trajectory, SimError> {
    if x0 >= generator.len() {
        return Err(SimError::StateOutOfRange(x0, generator.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(events);
    let mut state = x0;
    for _ in 0..events {
        let exit = generator.exit_rates[state];
        if exit <= 0.0 {
            return Ok(Trajectory {
                steps,
                absorbed: true,
            });
        }
        let u: f64 = rng.random();
        // u in [0,1); 1-u in (0,1] keeps the log finite
        let holding = -libm::log(1.0 - u) / exit;
        steps.push((state, holding));
        let mut threshold = rng.random::<f64>() * exit;
        let mut next = state;
        for (to, rate) in generator.out_edges(state) {
            next = to;
            threshold -= rate;
            if threshold <= 0.0 {
                break;
            }
        }
        state = next;
    }
    Ok(Trajectory {
        steps,
        absorbed: false,
    })
}

/// Time-weighted occupation frequencies over `n_states` states.
pub fn empirical_distribution(steps: &[Step], n_states: usize) -> Result<Vec<f64>, SimError> {
    if steps.is_empty() {
        return Err(SimError::EmptyTrajectory);
    }
    let mut occupation = vec![0.0; n_states];
    let mut total = 0.0;
    for &(state, holding) in steps {
        occupation[state] += holding;
        total += holding;
    }
    if total <= 0.0 {
        return Err(SimError::ZeroTotalTime);
    }
    for o in &mut occupation {
        *o /= total;
    }
    Ok(occupation)
}

/// Total-variation distance `(1/2) * sum |p_i - r_i|`.
pub fn tv_distance(p: &[f64], r: &[f64]) -> Result<f64, SimError> {
    if p.len() != r.len() {
        return Err(SimError::SupportMismatch(p.len(), r.len()));
    }
    let mut acc = 0.0;
    for (a, b) in p.iter().zip(r) {
        let d = a - b;
        acc += if d < 0.0 { -d } else { d };
    }
    Ok(acc / 2.0)
}
