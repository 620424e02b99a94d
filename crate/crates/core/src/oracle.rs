//! Exact solvers for small instances, used as ground truth in tests.
//!
//! Feasibility of an activity pattern is decided by a capacitated bipartite
//! matching (UE side capacity 1, BS side capacity `S_max`) grown with
//! augmenting paths, so the answer never depends on a greedy order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{link_qualifies, NetworkState, PowerConfig, RadioConfig, ThresholdRule};
use crate::scalar::Scalar;

pub const MAX_BS: usize = 12;
pub const MAX_UE: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {n_bs} BSs / {n_ue} UEs (limit {MAX_BS} / {MAX_UE})")]
    TooLarge { n_bs: usize, n_ue: usize },
    #[error("no activity pattern serves every UE, even with all BSs active")]
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinActive {
    pub active_count: usize,
    pub active: Vec<usize>,
    /// `(ue, bs)` pairs, ascending by UE.
    pub assignment: Vec<(usize, usize)>,
}

/// Maximum capacitated matching. `adj[u]` lists the BSs UE `u` may use.
/// Returns the matched BS per UE.
pub fn b_matching(adj: &[Vec<usize>], n_bs: usize, capacity: usize) -> Vec<Option<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; adj.len()];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); n_bs];

    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        capacity: usize,
        owner: &mut [Option<usize>],
        held: &mut [Vec<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &b in &adj[u] {
            if seen[b] {
                continue;
            }
            seen[b] = true;
            if held[b].len() < capacity {
                held[b].push(u);
                owner[u] = Some(b);
                return true;
            }
            for slot in 0..held[b].len() {
                let other = held[b][slot];
                if augment(other, adj, capacity, owner, held, seen) {
                    held[b][slot] = u;
                    owner[u] = Some(b);
                    return true;
                }
            }
        }
        false
    }

    for u in 0..adj.len() {
        let mut seen = vec![false; n_bs];
        augment(u, adj, capacity, &mut owner, &mut held, &mut seen);
    }
    owner
}

fn guard<T: Scalar>(state: &NetworkState<T>, ues: &[usize]) -> Result<(), OracleError> {
    if state.n_bs() > MAX_BS || ues.len() > MAX_UE {
        return Err(OracleError::TooLarge {
            n_bs: state.n_bs(),
            n_ue: ues.len(),
        });
    }
    Ok(())
}

fn adjacency<T: Scalar>(
    state: &NetworkState<T>,
    ues: &[usize],
    mask: u32,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Vec<Vec<usize>> {
    let on = |k: usize| mask & (1 << k) != 0;
    ues.iter()
        .map(|&j| {
            (0..state.n_bs())
                .filter(|&b| {
                    on(b) && link_qualifies(state, b, j, on, ThresholdRule::AtLeast, cfg, pcfg)
                })
                .collect()
        })
        .collect()
}

/// Fewest active BSs that can serve every UE in `ues`, with a witness.
/// BS sleep states in `state` are ignored; every pattern is enumerated.
pub fn exhaustive_min_active_for<T: Scalar>(
    state: &NetworkState<T>,
    ues: &[usize],
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Result<MinActive, OracleError> {
    guard(state, ues)?;
    let n = state.n_bs();
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let adj = adjacency(state, ues, mask, cfg, pcfg);
        let matched = b_matching(&adj, n, pcfg.max_load);
        if matched.iter().all(Option::is_some) {
            let mut assignment: Vec<(usize, usize)> = ues
                .iter()
                .zip(&matched)
                .map(|(&j, b)| (j, b.expect("matched")))
                .collect();
            assignment.sort_unstable();
            return Ok(MinActive {
                active_count: mask.count_ones() as usize,
                active: (0..n).filter(|&b| mask & (1 << b) != 0).collect(),
                assignment,
            });
        }
    }
    Err(OracleError::Infeasible)
}

pub fn exhaustive_min_active<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Result<MinActive, OracleError> {
    let ues: Vec<usize> = (0..state.n_ue()).collect();
    exhaustive_min_active_for(state, &ues, cfg, pcfg)
}

/// Most UEs servable at once with every BS active.
pub fn exhaustive_max_served<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Result<usize, OracleError> {
    let ues: Vec<usize> = (0..state.n_ue()).collect();
    guard(state, &ues)?;
    let all = if state.n_bs() == 0 {
        0
    } else {
        u32::MAX >> (32 - state.n_bs())
    };
    let adj = adjacency(state, &ues, all, cfg, pcfg);
    Ok(b_matching(&adj, state.n_bs(), pcfg.max_load)
        .iter()
        .flatten()
        .count())
}
