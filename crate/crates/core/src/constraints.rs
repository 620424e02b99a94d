//! Feasibility checks on a network state and the two objectives.

use serde::{Deserialize, Serialize};

use crate::model::{
    energy_efficiency, link_qualifies, load_degree, NetworkState, PowerConfig, RadioConfig,
    ThresholdRule,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    C1,
    C2,
    C3,
    C4,
    C5,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    /// BS id for C4, UE id for C3, unused (0) for C5.
    pub subject: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport<T> {
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub c3_ok: bool,
    pub c4_ok: bool,
    /// `None` when no load threshold is configured.
    pub c5_ok: Option<bool>,
    pub violations: Vec<Violation>,
    pub o1_ee: T,
    pub o2_active: usize,
    pub t_load: Option<T>,
}

impl<T> ConstraintReport<T> {
    /// C1 through C4 hold.
    pub fn core_ok(&self) -> bool {
        self.c1_ok && self.c2_ok && self.c3_ok && self.c4_ok
    }

    pub fn all_ok(&self) -> bool {
        self.core_ok() && self.c5_ok != Some(false)
    }
}

/// Checks the assignment constraints and computes both objectives. Read-only.
pub fn validate<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
    t_load: Option<T>,
) -> ConstraintReport<T> {
    let mut violations = Vec::new();

    for j in 0..state.n_ue() {
        let count = state.connections.col_count(j);
        if count != 1 {
            violations.push(Violation {
                constraint: Constraint::C3,
                subject: j,
                detail: format!("UE {j} has {count} serving BSs"),
            });
        }
    }
    for i in 0..state.n_bs() {
        let load = state.connections.row_count(i);
        let cap = if state.is_active(i) { pcfg.max_load } else { 0 };
        if load > cap {
            violations.push(Violation {
                constraint: Constraint::C4,
                subject: i,
                detail: format!("BS {i} carries {load} UEs, capacity {cap}"),
            });
        }
    }
    let c5_ok = t_load.map(|limit| {
        let total: T = (0..state.n_bs()).map(|i| load_degree(state, i, pcfg)).sum();
        let ok = total < limit;
        if !ok {
            violations.push(Violation {
                constraint: Constraint::C5,
                subject: 0,
                detail: format!("total load degree {total} is not below {limit}"),
            });
        }
        ok
    });

    let flagged = |c: Constraint| violations.iter().any(|v| v.constraint == c);
    ConstraintReport {
        // binary by construction
        c1_ok: true,
        c2_ok: true,
        c3_ok: !flagged(Constraint::C3),
        c4_ok: !flagged(Constraint::C4),
        c5_ok,
        o1_ee: energy_efficiency(state, cfg, pcfg),
        o2_active: state.active_count(),
        t_load,
        violations,
    }
}

/// Links whose SINR misses the handover threshold, as `(bs, ue)`.
pub fn weak_links<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Vec<(usize, usize)> {
    state
        .connections
        .links()
        .filter(|&(i, j)| {
            !state.is_active(i)
                || !link_qualifies(
                    state,
                    i,
                    j,
                    |k| state.is_active(k),
                    ThresholdRule::AtLeast,
                    cfg,
                    pcfg,
                )
        })
        .collect()
}
