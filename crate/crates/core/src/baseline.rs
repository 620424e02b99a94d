//! Random-deactivation baseline.
//!
//! Each step puts a uniformly chosen active BS to sleep and re-homes its UEs
//! on randomly drawn active BSs, undoing the step if any UE is left without
//! a qualifying BS that has room.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{
    link_qualifies, BsState, NetworkState, PowerConfig, RadioConfig, ThresholdRule,
};
use crate::scalar::Scalar;
use crate::sleeping::{IterationEvent, IterationRecord, OutcomeKind, SleepOutcome};

/// Stream id the baseline draws from; placement uses streams 1 and 2.
pub const BASELINE_STREAM: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    pub max_attempts: usize,
    /// Random BS draws per displaced UE before the step is abandoned.
    pub retries_per_ue: usize,
    /// Consecutive rejections that end a run. `None` means the BS count.
    pub stall_window: Option<usize>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            max_attempts: 1000,
            retries_per_ue: 10,
            stall_window: None,
        }
    }
}

/// Seeded generator for a baseline run.
pub fn baseline_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BASELINE_STREAM);
    rng
}

/// One random sleep attempt. The state is unchanged unless the outcome is accepted.
pub fn random_sleep_step<T: Scalar, R: Rng + ?Sized>(
    state: &mut NetworkState<T>,
    rng: &mut R,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    bcfg: &BaselineConfig,
) -> (usize, SleepOutcome) {
    let active = state.active_ids();
    let victim = *active.choose(rng).expect("at least one active BS");
    let mut ues = state.connections.ues_of(victim);
    if ues.is_empty() {
        state.base_stations[victim].state = BsState::Sleep;
        return (
            victim,
            SleepOutcome {
                kind: OutcomeKind::Accepted,
                slept_bs: Some(victim),
                reassignments: Vec::new(),
            },
        );
    }
    let others: Vec<usize> = active.into_iter().filter(|&b| b != victim).collect();
    if others.is_empty() {
        return (
            victim,
            SleepOutcome::rejected(OutcomeKind::RejectedNoNeighbors),
        );
    }

    let snapshot = state.clone();
    state.base_stations[victim].state = BsState::Sleep;
    for &j in &ues {
        state.connections.set(victim, j, false);
    }
    ues.shuffle(rng);

    let mut moves = Vec::with_capacity(ues.len());
    let mut saw_full = false;
    for &j in &ues {
        let mut placed = None;
        for _ in 0..bcfg.retries_per_ue {
            let b = *others.choose(rng).expect("non-empty");
            if !link_qualifies(
                state,
                b,
                j,
                |k| state.is_active(k),
                ThresholdRule::AtLeast,
                cfg,
                pcfg,
            ) {
                continue;
            }
            if state.connections.row_count(b) >= pcfg.max_load {
                saw_full = true;
                continue;
            }
            placed = Some(b);
            break;
        }
        match placed {
            Some(b) => {
                state.connections.set(b, j, true);
                moves.push((j, b));
            }
            None => {
                *state = snapshot;
                let kind = if saw_full {
                    OutcomeKind::RejectedOverload
                } else {
                    OutcomeKind::RejectedSinr
                };
                return (victim, SleepOutcome::rejected(kind));
            }
        }
    }
    moves.sort_unstable();
    (
        victim,
        SleepOutcome {
            kind: OutcomeKind::Accepted,
            slept_bs: Some(victim),
            reassignments: moves,
        },
    )
}

/// Repeats [`random_sleep_step`] until the stall window of consecutive
/// rejections is hit, `max_attempts` steps were made, or no BS is left active.
/// The first record is the starting state, followed by one per attempt.
pub fn run_baseline<T: Scalar>(
    state: &mut NetworkState<T>,
    seed: u64,
    max_attempts: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    bcfg: &BaselineConfig,
) -> Vec<IterationRecord<T>> {
    run_baseline_observed(state, seed, max_attempts, cfg, pcfg, bcfg, |_, _| {})
}

/// [`run_baseline`] with a callback after every appended record.
#[allow(clippy::too_many_arguments)]
pub fn run_baseline_observed<T: Scalar>(
    state: &mut NetworkState<T>,
    seed: u64,
    max_attempts: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    bcfg: &BaselineConfig,
    mut observe: impl FnMut(&NetworkState<T>, &IterationRecord<T>),
) -> Vec<IterationRecord<T>> {
    if max_attempts == 0 {
        return Vec::new();
    }
    let mut rng = baseline_rng(seed);
    let window = bcfg.stall_window.unwrap_or(state.n_bs()).max(1);
    let mut records = vec![IterationRecord::capture(
        state,
        0,
        IterationEvent::Initial,
        cfg,
        pcfg,
    )];
    observe(state, &records[0]);
    let mut stalled = 0;
    for attempt in 1..=max_attempts {
        if state.active_count() == 0 {
            break;
        }
        let (bs, outcome) = random_sleep_step(state, &mut rng, cfg, pcfg, bcfg);
        let record = IterationRecord::capture(
            state,
            attempt,
            IterationEvent::Attempt {
                kind: outcome.kind,
                bs,
            },
            cfg,
            pcfg,
        );
        observe(state, &record);
        records.push(record);
        if outcome.is_accepted() {
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= window {
                break;
            }
        }
    }
    records
}
