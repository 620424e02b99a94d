//! Initial UE-BS association: SINR screening, redundant-link pruning and
//! overload redistribution, applied to a fresh all-active network.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{
    link_qualifies, sinr_with, ConnectionMatrix, NetworkState, PowerConfig, RadioConfig,
    ThresholdRule,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionReport {
    /// UEs with exactly one link.
    pub served: usize,
    /// UEs left without a feasible BS, ascending.
    pub unserved: Vec<usize>,
    /// UEs moved off an overloaded BS to another one.
    pub reassigned: usize,
    /// `(bs, connection count)` for every BS.
    pub per_bs_load: Vec<(usize, usize)>,
}

fn all_active_sinr<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    ue: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> T {
    sinr_with(state, bs, ue, |k| state.is_active(k), cfg, pcfg)
}

fn qualifies<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    ue: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> bool {
    state.is_active(bs)
        && link_qualifies(
            state,
            bs,
            ue,
            |k| state.is_active(k),
            ThresholdRule::Strict,
            cfg,
            pcfg,
        )
}

/// Candidate links: every pair whose SINR strictly exceeds the threshold
/// (and, with radius gating, lies within the BS radius).
pub fn feasibility_screen<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> ConnectionMatrix {
    let mut candidates = ConnectionMatrix::new(state.n_bs(), state.n_ue());
    for i in 0..state.n_bs() {
        for j in 0..state.n_ue() {
            if qualifies(state, i, j, cfg, pcfg) {
                candidates.set(i, j, true);
            }
        }
    }
    candidates
}

/// Keeps only the highest-SINR candidate link of each UE; ties go to the lowest BS id.
pub fn prune_redundant<T: Scalar>(
    candidates: &ConnectionMatrix,
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> ConnectionMatrix {
    let mut pruned = candidates.clone();
    for j in 0..candidates.n_ue() {
        if candidates.col_count(j) <= 1 {
            continue;
        }
        let mut best: Option<(usize, T)> = None;
        for i in candidates.bss_of(j) {
            let s = all_active_sinr(state, i, j, cfg, pcfg);
            match best {
                Some((_, b)) if !(s > b) => {}
                _ => best = Some((i, s)),
            }
        }
        let keep = best.map(|(i, _)| i);
        for i in candidates.bss_of(j) {
            if Some(i) != keep {
                pruned.set(i, j, false);
            }
        }
    }
    pruned
}

/// Descending by value, ascending by index on ties.
fn by_value_desc<T: Scalar>(a: &(usize, T), b: &(usize, T)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.cmp(&b.0))
}

/// Trims every BS above `S_max` to its strongest `S_max` UEs and moves the
/// evicted UEs to their best qualifying BS with spare capacity.
pub fn redistribute_overload<T: Scalar>(
    conn: &ConnectionMatrix,
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> (ConnectionMatrix, ConnectionReport) {
    let s_max = pcfg.max_load;
    let mut out = conn.clone();
    let mut reassigned = 0;

    for i in 0..state.n_bs() {
        if out.row_count(i) <= s_max {
            continue;
        }
        let mut ues: Vec<(usize, T)> = out
            .ues_of(i)
            .into_iter()
            .map(|j| (j, all_active_sinr(state, i, j, cfg, pcfg)))
            .collect();
        ues.sort_by(by_value_desc);
        let evicted: Vec<usize> = ues[s_max..].iter().map(|&(j, _)| j).collect();
        for &j in &evicted {
            out.set(i, j, false);
        }

        // order evicted UEs by the SINR of their best alternative
        let mut queue: Vec<(usize, T)> = evicted
            .iter()
            .map(|&j| {
                let best = (0..state.n_bs())
                    .filter(|&b| b != i && qualifies(state, b, j, cfg, pcfg))
                    .map(|b| all_active_sinr(state, b, j, cfg, pcfg))
                    .fold(T::neg_infinity(), T::max);
                (j, best)
            })
            .collect();
        queue.sort_by(by_value_desc);

        for (j, _) in queue {
            let mut target: Option<(usize, T)> = None;
            for b in 0..state.n_bs() {
                if b == i || out.row_count(b) >= s_max || !qualifies(state, b, j, cfg, pcfg) {
                    continue;
                }
                let s = all_active_sinr(state, b, j, cfg, pcfg);
                match target {
                    Some((_, t)) if !(s > t) => {}
                    _ => target = Some((b, s)),
                }
            }
            if let Some((b, _)) = target {
                out.set(b, j, true);
                reassigned += 1;
            }
        }
    }

    let report = report_for(&out, reassigned);
    (out, report)
}

fn report_for(conn: &ConnectionMatrix, reassigned: usize) -> ConnectionReport {
    let unserved: Vec<usize> = (0..conn.n_ue())
        .filter(|&j| conn.col_count(j) == 0)
        .collect();
    ConnectionReport {
        served: (0..conn.n_ue()).filter(|&j| conn.col_count(j) == 1).count(),
        unserved,
        reassigned,
        per_bs_load: (0..conn.n_bs()).map(|i| (i, conn.row_count(i))).collect(),
    }
}

/// Runs screen, prune and redistribute on `state` and installs the result.
pub fn initial_connect<T: Scalar>(
    state: &mut NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> ConnectionReport {
    let candidates = feasibility_screen(state, cfg, pcfg);
    let pruned = prune_redundant(&candidates, state, cfg, pcfg);
    let (conn, report) = redistribute_overload(&pruned, state, cfg, pcfg);
    state.connections = conn;
    report
}
