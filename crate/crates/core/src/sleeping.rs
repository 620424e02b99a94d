//! Load-sharing base-station sleeping.
//!
//! Each sweep ranks active BSs by their sleep index, localizes a lightly
//! loaded candidate next to the top-ranked BS, and tries to hand its UEs to
//! the two least-loaded BSs around it in proportion to their spare capacity.
//! A rejected attempt falls back to the next candidate in load order; a sweep
//! in which every active BS has been tried without success ends the run.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    energy_efficiency, link_qualifies, load_degree, sinr_with, total_power, BsState, ModelError,
    NetworkState, PowerConfig, RadioConfig, ThresholdRule,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SleepingConfig<T> {
    /// Neighbor search reach as a multiple of the BS radius. `2` finds every
    /// BS whose coverage disc overlaps this one.
    pub neighbor_radius_scale: T,
}

impl<T: Scalar> Default for SleepingConfig<T> {
    fn default() -> Self {
        Self {
            neighbor_radius_scale: T::lit(2.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SleepIndex {
    pub bs_id: usize,
    /// 1 when every served UE has at least one backup BS.
    pub k: u8,
    /// Total backup BSs over the served UEs.
    pub l: usize,
    pub beta: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Accepted,
    RejectedOverload,
    RejectedSinr,
    RejectedNoNeighbors,
    RejectedNoPair,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Accepted => "accepted",
            OutcomeKind::RejectedOverload => "rejected_overload",
            OutcomeKind::RejectedSinr => "rejected_sinr",
            OutcomeKind::RejectedNoNeighbors => "rejected_no_neighbors",
            OutcomeKind::RejectedNoPair => "rejected_no_pair",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SleepOutcome {
    pub kind: OutcomeKind,
    pub slept_bs: Option<usize>,
    /// `(ue, new bs)` for every UE the slept BS used to serve.
    pub reassignments: Vec<(usize, usize)>,
}

impl SleepOutcome {
    pub fn rejected(kind: OutcomeKind) -> Self {
        Self {
            kind,
            slept_bs: None,
            reassignments: Vec::new(),
        }
    }

    pub fn is_accepted(&self) -> bool {
        self.kind == OutcomeKind::Accepted
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationEvent {
    Initial,
    Attempt { kind: OutcomeKind, bs: usize },
}

impl IterationEvent {
    pub fn is_accepted(&self) -> bool {
        matches!(
            self,
            IterationEvent::Attempt {
                kind: OutcomeKind::Accepted,
                ..
            }
        )
    }
}

impl fmt::Display for IterationEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IterationEvent::Initial => f.write_str("initial"),
            IterationEvent::Attempt { kind, bs } => write!(f, "{}:{}", kind.as_str(), bs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub active_count: usize,
    pub ee: T,
    pub total_power_w: T,
    pub event: IterationEvent,
}

impl<T: Scalar> IterationRecord<T> {
    pub fn capture(
        state: &NetworkState<T>,
        iteration: usize,
        event: IterationEvent,
        cfg: &RadioConfig<T>,
        pcfg: &PowerConfig<T>,
    ) -> Self {
        Self {
            iteration,
            active_count: state.active_count(),
            ee: energy_efficiency(state, cfg, pcfg),
            total_power_w: total_power(state, pcfg),
            event,
        }
    }
}

/// Index of the last accepted sleep in a run history, or 0 when none was accepted.
pub fn convergence_iteration<T>(records: &[IterationRecord<T>]) -> usize {
    records
        .iter()
        .rev()
        .find(|r| r.event.is_accepted())
        .map_or(0, |r| r.iteration)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("takeover pair has {available} free slots for {needed} UEs")]
    InsufficientCapacity { needed: usize, available: usize },
}

/// Activity pattern with `asleep` switched off.
fn without<T: Scalar>(state: &NetworkState<T>, asleep: usize) -> impl Fn(usize) -> bool + '_ {
    move |k| k != asleep && state.is_active(k)
}

/// Sleep index of an active BS. Backups are evaluated as if `bs` were
/// already asleep, since that is the interference its UEs would then see.
pub fn sleep_index<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Result<SleepIndex, ModelError> {
    if !state.is_active(bs) {
        return Err(ModelError::BsAsleep(bs));
    }
    let mut transferable = true;
    let mut backups = 0;
    for j in state.connections.ues_of(bs) {
        let count = (0..state.n_bs())
            .filter(|&b| {
                b != bs
                    && state.is_active(b)
                    && link_qualifies(
                        state,
                        b,
                        j,
                        without(state, bs),
                        ThresholdRule::AtLeast,
                        cfg,
                        pcfg,
                    )
            })
            .count();
        if count == 0 {
            transferable = false;
        }
        backups += count;
    }
    let k = u8::from(transferable);
    Ok(SleepIndex {
        bs_id: bs,
        k,
        l: backups,
        beta: usize::from(k) * backups,
    })
}

/// Active BSs other than `bs` within its neighbor reach, ascending by id.
pub fn find_neighbors<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    scfg: &SleepingConfig<T>,
) -> Vec<usize> {
    let reach = state.base_stations[bs].radius * scfg.neighbor_radius_scale;
    (0..state.n_bs())
        .filter(|&b| b != bs && state.is_active(b) && state.bs_distance(bs, b) <= reach)
        .collect()
}

/// Traffic shares of the takeover pair. The less loaded BS takes the larger share.
pub fn sharing_ratios<T: Scalar>(load_a: T, load_b: T, load_min: T) -> (T, T) {
    let total = load_a + load_b;
    if total == T::zero() {
        let half = load_min / T::lit(2.0);
        return (half, half);
    }
    (load_b / total * load_min, load_a / total * load_min)
}

/// Splits the UEs of `bs_least` between `pair_a` and `pair_b`.
///
/// `pair_a` receives `round(n * L_a / (L_a + L_b))` UEs (half rounds up),
/// clipped to both BSs' spare capacity. UEs are ranked by how much better
/// `pair_a` serves them than `pair_b` in the post-sleep state and the top of
/// the ranking goes to `pair_a`.
#[allow(clippy::too_many_arguments)]
pub fn plan_reassignment<T: Scalar>(
    state: &NetworkState<T>,
    bs_least: usize,
    pair_a: usize,
    pair_b: usize,
    share_a: T,
    share_b: T,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Result<Vec<(usize, usize)>, PlanError> {
    let ues = state.connections.ues_of(bs_least);
    let n = ues.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let s_max = pcfg.max_load;
    let free_a = s_max.saturating_sub(state.connections.row_count(pair_a));
    let free_b = s_max.saturating_sub(state.connections.row_count(pair_b));
    if free_a + free_b < n {
        return Err(PlanError::InsufficientCapacity {
            needed: n,
            available: free_a + free_b,
        });
    }

    let shares = share_a + share_b;
    let mut quota_a = if shares > T::zero() {
        let exact = T::from_count(n) * share_a / shares;
        (exact + T::lit(0.5)).floor().to_usize().unwrap_or(0).min(n)
    } else {
        // unreachable when n > 0 since the candidate's own load is then positive
        n - n / 2
    };
    let mut quota_b = n - quota_a;
    if quota_a > free_a {
        quota_a = free_a;
        quota_b = n - quota_a;
    }
    if quota_b > free_b {
        quota_b = free_b;
        quota_a = n - quota_b;
    }
    debug_assert!(quota_a <= free_a && quota_b <= free_b);

    let post = without(state, bs_least);
    let mut ranked: Vec<(usize, T)> = ues
        .into_iter()
        .map(|j| {
            let adv = sinr_with(state, pair_a, j, &post, cfg, pcfg)
                - sinr_with(state, pair_b, j, &post, cfg, pcfg);
            (j, adv)
        })
        .collect();
    ranked.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .unwrap_or(Ordering::Equal)
            .then(x.0.cmp(&y.0))
    });

    Ok(ranked
        .into_iter()
        .enumerate()
        .map(|(rank, (j, _))| (j, if rank < quota_a { pair_a } else { pair_b }))
        .collect())
}

/// Attempts to put `bs_least` to sleep with its UEs handed to the pair.
/// Either every change is applied or the state is left untouched.
pub fn try_sleep<T: Scalar>(
    state: &mut NetworkState<T>,
    bs_least: usize,
    pair_a: usize,
    pair_b: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> SleepOutcome {
    let (share_a, share_b) = sharing_ratios(
        load_degree(state, pair_a, pcfg),
        load_degree(state, pair_b, pcfg),
        load_degree(state, bs_least, pcfg),
    );
    let plan = match plan_reassignment(state, bs_least, pair_a, pair_b, share_a, share_b, cfg, pcfg)
    {
        Ok(plan) => plan,
        Err(PlanError::InsufficientCapacity { .. }) => {
            return SleepOutcome::rejected(OutcomeKind::RejectedOverload)
        }
    };

    let all_qualify = {
        let post = without(state, bs_least);
        plan.iter().all(|&(j, target)| {
            link_qualifies(state, target, j, &post, ThresholdRule::AtLeast, cfg, pcfg)
        })
    };
    if !all_qualify {
        return SleepOutcome::rejected(OutcomeKind::RejectedSinr);
    }

    for &(j, target) in &plan {
        state.connections.set(bs_least, j, false);
        state.connections.set(target, j, true);
    }
    state.base_stations[bs_least].state = BsState::Sleep;
    SleepOutcome {
        kind: OutcomeKind::Accepted,
        slept_bs: Some(bs_least),
        reassignments: plan,
    }
}

/// Ascending by load, then by id.
fn load_order<T: Scalar>(state: &NetworkState<T>, ids: &mut [usize]) {
    ids.sort_by_key(|&i| (state.connections.row_count(i), i));
}

/// Tries `candidate` against its two least-loaded surrounding BSs.
fn attempt<T: Scalar>(
    state: &mut NetworkState<T>,
    candidate: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    scfg: &SleepingConfig<T>,
) -> SleepOutcome {
    let mut surrounding = find_neighbors(state, candidate, scfg);
    if surrounding.len() < 2 {
        return SleepOutcome::rejected(OutcomeKind::RejectedNoPair);
    }
    load_order(state, &mut surrounding);
    try_sleep(state, candidate, surrounding[0], surrounding[1], cfg, pcfg)
}

/// Runs the sleeping loop to convergence. The first record is the starting
/// state; every attempt afterwards, accepted or not, appends one record.
pub fn run_sleeping<T: Scalar>(
    state: &mut NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    scfg: &SleepingConfig<T>,
) -> Vec<IterationRecord<T>> {
    run_sleeping_observed(state, cfg, pcfg, scfg, |_, _| {})
}

/// [`run_sleeping`] that also hands the state and record to `observe`
/// after every appended record.
pub fn run_sleeping_observed<T: Scalar>(
    state: &mut NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    scfg: &SleepingConfig<T>,
    mut observe: impl FnMut(&NetworkState<T>, &IterationRecord<T>),
) -> Vec<IterationRecord<T>> {
    let mut records = vec![IterationRecord::capture(
        state,
        0,
        IterationEvent::Initial,
        cfg,
        pcfg,
    )];
    observe(state, &records[0]);
    let mut push = |state: &NetworkState<T>, records: &mut Vec<IterationRecord<T>>, kind, bs| {
        let iteration = records.len();
        let record = IterationRecord::capture(
            state,
            iteration,
            IterationEvent::Attempt { kind, bs },
            cfg,
            pcfg,
        );
        observe(state, &record);
        records.push(record);
    };

    'sweep: loop {
        let active = state.active_ids();
        if active.len() < 2 {
            break;
        }
        let mut best: Option<SleepIndex> = None;
        for &i in &active {
            let idx = sleep_index(state, i, cfg, pcfg).expect("active BS");
            if best.is_none_or(|b| idx.beta > b.beta) {
                best = Some(idx);
            }
        }
        let top = best.expect("non-empty active set");
        if top.beta == 0 {
            break;
        }

        let mut first = None;
        let mut neighbors = find_neighbors(state, top.bs_id, scfg);
        if neighbors.is_empty() {
            push(
                state,
                &mut records,
                OutcomeKind::RejectedNoNeighbors,
                top.bs_id,
            );
        } else {
            load_order(state, &mut neighbors);
            first = Some(neighbors[0]);
        }

        let mut fallback = active.clone();
        load_order(state, &mut fallback);
        let mut tried = BTreeSet::new();
        for candidate in first.into_iter().chain(fallback) {
            if !tried.insert(candidate) {
                continue;
            }
            let outcome = attempt(state, candidate, cfg, pcfg, scfg);
            push(state, &mut records, outcome.kind, candidate);
            if outcome.is_accepted() {
                continue 'sweep;
            }
        }
        break;
    }
    records
}
