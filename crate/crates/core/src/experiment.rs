//! End-to-end runs: scenario generation, association, one of the sleeping
//! algorithms, and validation. Shared by the CLI and the test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::run_baseline_observed;
use crate::constraints::{validate, ConstraintReport};
use crate::initial_connection::{initial_connect, ConnectionReport};
use crate::model::{energy_efficiency, NetworkState};
use crate::oracle::{exhaustive_min_active_for, OracleError};
use crate::scalar::Scalar;
use crate::scenario::{generate, BsLayout, ScenarioConfig};
use crate::sleeping::{convergence_iteration, run_sleeping_observed, IterationRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Proposed,
    Baseline,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::Baseline => "baseline",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub initial: NetworkState<T>,
    pub connected: NetworkState<T>,
    pub final_state: NetworkState<T>,
    pub connection: ConnectionReport,
    pub records: Vec<IterationRecord<T>>,
    pub report: ConstraintReport<T>,
}

/// Runs one algorithm on the scenario given by `cfg` (seed included).
pub fn run_scenario<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    algorithm: Algorithm,
    t_load: Option<T>,
) -> RunOutput<T> {
    run_scenario_observed(cfg, algorithm, t_load, |_, _| {})
}

/// [`run_scenario`] with a callback after every iteration record.
pub fn run_scenario_observed<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    algorithm: Algorithm,
    t_load: Option<T>,
    observe: impl FnMut(&NetworkState<T>, &IterationRecord<T>),
) -> RunOutput<T> {
    let pcfg = cfg.power_config();
    let initial = generate(cfg);
    let mut state = initial.clone();
    let connection = initial_connect(&mut state, &cfg.radio, &pcfg);
    let connected = state.clone();
    let records = match algorithm {
        Algorithm::Proposed => {
            run_sleeping_observed(&mut state, &cfg.radio, &pcfg, &cfg.sleeping, observe)
        }
        Algorithm::Baseline => run_baseline_observed(
            &mut state,
            cfg.seed,
            cfg.baseline.max_attempts,
            &cfg.radio,
            &pcfg,
            &cfg.baseline,
            observe,
        ),
    };
    let report = validate(&state, &cfg.radio, &pcfg, t_load);
    RunOutput {
        initial,
        connected,
        final_state: state,
        connection,
        records,
        report,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub final_active: usize,
    pub convergence_iteration: usize,
    pub initial_ee: f64,
    pub final_ee: f64,
    pub unserved: usize,
    pub core_constraints_ok: bool,
}

impl BatchRow {
    pub fn from_run<T: Scalar>(
        seed: u64,
        algorithm: Algorithm,
        out: &RunOutput<T>,
        cfg: &ScenarioConfig<T>,
    ) -> Self {
        let pcfg = cfg.power_config();
        Self {
            seed,
            algorithm,
            final_active: out.final_state.active_count(),
            convergence_iteration: convergence_iteration(&out.records),
            initial_ee: energy_efficiency(&out.connected, &cfg.radio, &pcfg)
                .to_f64()
                .unwrap_or(f64::NAN),
            final_ee: out.report.o1_ee.to_f64().unwrap_or(f64::NAN),
            unserved: out.connection.unserved.len(),
            core_constraints_ok: out.report.core_ok(),
        }
    }
}

/// Both algorithms over seeds `1..=k`, in parallel. Rows are ordered by
/// seed, proposed before baseline.
pub fn run_batch<T: Scalar>(cfg: &ScenarioConfig<T>, k: u64, t_load: Option<T>) -> Vec<BatchRow> {
    (1..=k)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let seeded = ScenarioConfig {
                seed,
                ..cfg.clone()
            };
            [Algorithm::Proposed, Algorithm::Baseline].map(|alg| {
                let out = run_scenario(&seeded, alg, t_load);
                BatchRow::from_run(seed, alg, &out, &seeded)
            })
        })
        .collect()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub runs: usize,
    pub median_final_active: f64,
    pub median_convergence_iteration: f64,
    pub median_final_ee: f64,
    pub median_initial_ee: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub proposed: AlgorithmSummary,
    pub baseline: AlgorithmSummary,
}

pub fn summarize(rows: &[BatchRow]) -> BatchSummary {
    let of = |alg: Algorithm| {
        let mine: Vec<&BatchRow> = rows.iter().filter(|r| r.algorithm == alg).collect();
        let col = |f: fn(&BatchRow) -> f64| median(&mine.iter().map(|r| f(r)).collect::<Vec<_>>());
        AlgorithmSummary {
            runs: mine.len(),
            median_final_active: col(|r| r.final_active as f64),
            median_convergence_iteration: col(|r| r.convergence_iteration as f64),
            median_final_ee: col(|r| r.final_ee),
            median_initial_ee: col(|r| r.initial_ee),
        }
    };
    BatchSummary {
        proposed: of(Algorithm::Proposed),
        baseline: of(Algorithm::Baseline),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub instance: u64,
    pub served: usize,
    pub heuristic: usize,
    pub optimum: usize,
    pub gap: i64,
}

/// Small random instance for the oracle comparison: uniform BSs and UEs.
pub fn oracle_instance_config<T: Scalar>(
    base: &ScenarioConfig<T>,
    n_bs: usize,
    n_ue: usize,
    seed: u64,
) -> ScenarioConfig<T> {
    // shrink the area so BS density matches the full scenario
    let scale = T::from_count(n_bs) / T::from_count(base.n_bs);
    let side = |x: T| x * scale.sqrt();
    ScenarioConfig {
        area: (side(base.area.0), side(base.area.1)),
        n_bs,
        n_ue,
        bs_layout: BsLayout::UniformRandom,
        seed,
        ..base.clone()
    }
}

/// Runs the proposed heuristic against the exhaustive optimum. The optimum
/// is taken over the UEs the initial association managed to serve.
pub fn oracle_compare<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    instance: u64,
) -> Result<OracleRow, OracleError> {
    let pcfg = cfg.power_config();
    let out = run_scenario(cfg, Algorithm::Proposed, None);
    let served: Vec<usize> = (0..out.connected.n_ue())
        .filter(|&j| out.connected.connections.col_count(j) == 1)
        .collect();
    let optimum = exhaustive_min_active_for(&out.initial, &served, &cfg.radio, &pcfg)?;
    let heuristic = out.final_state.active_count();
    Ok(OracleRow {
        instance,
        served: served.len(),
        heuristic,
        optimum: optimum.active_count,
        gap: heuristic as i64 - optimum.active_count as i64,
    })
}

/// `count` random instances with seeds drawn from `seed`.
pub fn oracle_battery<T: Scalar>(
    base: &ScenarioConfig<T>,
    n_bs: usize,
    n_ue: usize,
    count: u64,
    seed: u64,
) -> Result<Vec<OracleRow>, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| rng.gen()).collect();
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| oracle_compare(&oracle_instance_config(base, n_bs, n_ue, s), i as u64))
        .collect()
}
