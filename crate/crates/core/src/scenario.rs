//! Seeded topology generation and scenario configuration.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::BaselineConfig;
use crate::model::{
    BaseStation, BsState, ModelError, NetworkState, Point, PowerConfig, RadioConfig, UserEquipment,
};
use crate::scalar::Scalar;
use crate::sleeping::SleepingConfig;

/// Recorded in run metadata so results can be matched across implementations.
pub const GENERATOR_IDENTITY: &str =
    "ChaCha8 (rand_chacha 0.3), seed_from_u64, stream 1 = BS, 2 = UE, 3 = baseline";

pub const BS_STREAM: u64 = 1;
pub const UE_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsLayout {
    Grid,
    UniformRandom,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound = "T: Scalar")]
pub struct ScenarioConfig<T> {
    /// Width and height in metres.
    pub area: (T, T),
    pub n_bs: usize,
    /// 250 by default, roughly 14 active BSs at 15 to 22 UEs each.
    pub n_ue: usize,
    pub bs_layout: BsLayout,
    pub bs_radius_m: T,
    /// Per-BS UE capacity. Overrides `power.max_load`.
    pub s_max: usize,
    pub radio: RadioConfig<T>,
    pub power: PowerConfig<T>,
    pub sleeping: SleepingConfig<T>,
    pub baseline: BaselineConfig,
    pub seed: u64,
}

impl<T: Scalar> Default for ScenarioConfig<T> {
    fn default() -> Self {
        Self {
            area: (T::lit(1000.0), T::lit(1000.0)),
            n_bs: 20,
            n_ue: 250,
            bs_layout: BsLayout::Grid,
            bs_radius_m: T::lit(120.0),
            s_max: 30,
            radio: RadioConfig::default(),
            power: PowerConfig::default(),
            sleeping: SleepingConfig::default(),
            baseline: BaselineConfig::default(),
            seed: 1,
        }
    }
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.n_bs < 1 {
            return Err(ScenarioError::Invalid("n_bs must be >= 1".into()));
        }
        if !(self.area.0 > T::zero() && self.area.1 > T::zero())
            || !self.area.0.is_finite()
            || !self.area.1.is_finite()
        {
            return Err(ScenarioError::Invalid("area must be positive".into()));
        }
        if !(self.bs_radius_m > T::zero()) {
            return Err(ScenarioError::Invalid(
                "bs_radius_m must be positive".into(),
            ));
        }
        if self.s_max < 1 {
            return Err(ScenarioError::Invalid("s_max must be >= 1".into()));
        }
        if !(self.sleeping.neighbor_radius_scale >= T::zero()) {
            return Err(ScenarioError::Invalid(
                "neighbor_radius_scale must be >= 0".into(),
            ));
        }
        self.radio.validate()?;
        self.power_config().validate()?;
        Ok(())
    }

    /// Power parameters with `S_max` applied.
    pub fn power_config(&self) -> PowerConfig<T> {
        PowerConfig {
            max_load: self.s_max,
            ..self.power.clone()
        }
    }

    /// Rows and columns of the grid layout: the most square `r x c >= n_bs`.
    pub fn grid_shape(&self) -> (usize, usize) {
        let mut cols = 1;
        while cols * cols < self.n_bs {
            cols += 1;
        }
        let rows = self.n_bs.div_ceil(cols);
        (rows, cols)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn uniform_point<T: Scalar>(rng: &mut ChaCha8Rng, area: (T, T)) -> Point<T> {
    let w = area.0.to_f64().expect("finite");
    let h = area.1.to_f64().expect("finite");
    let x: f64 = rng.gen_range(0.0..w);
    let y: f64 = rng.gen_range(0.0..h);
    Point::new(T::lit(x), T::lit(y))
}

/// Builds the all-active, unconnected network for `cfg` and its seed.
pub fn generate<T: Scalar>(cfg: &ScenarioConfig<T>) -> NetworkState<T> {
    let positions: Vec<Point<T>> = match cfg.bs_layout {
        BsLayout::Grid => {
            let (rows, cols) = cfg.grid_shape();
            let dx = cfg.area.0 / T::from_count(cols);
            let dy = cfg.area.1 / T::from_count(rows);
            let half = T::lit(0.5);
            (0..cfg.n_bs)
                .map(|i| {
                    let (r, c) = (i / cols, i % cols);
                    Point::new(
                        (T::from_count(c) + half) * dx,
                        (T::from_count(r) + half) * dy,
                    )
                })
                .collect()
        }
        BsLayout::UniformRandom => {
            let mut rng = stream(cfg.seed, BS_STREAM);
            (0..cfg.n_bs)
                .map(|_| uniform_point(&mut rng, cfg.area))
                .collect()
        }
    };
    let base_stations = positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| BaseStation {
            id,
            position,
            radius: cfg.bs_radius_m,
            max_tx_power: cfg.power.max_tx_power_w,
            state: BsState::Active,
        })
        .collect();
    let mut rng = stream(cfg.seed, UE_STREAM);
    let user_equipments = (0..cfg.n_ue)
        .map(|id| UserEquipment {
            id,
            position: uniform_point(&mut rng, cfg.area),
        })
        .collect();
    NetworkState::new(base_stations, user_equipments)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageAudit<T> {
    /// Largest distance from a sampled point of the area to its nearest BS.
    pub worst_gap_m: T,
    pub radius_m: T,
    pub fully_covered: bool,
}

/// Samples the area on a `resolution x resolution` lattice (edges included)
/// and reports the worst distance to the nearest BS.
pub fn coverage_audit<T: Scalar>(
    state: &NetworkState<T>,
    area: (T, T),
    resolution: usize,
) -> CoverageAudit<T> {
    let steps = resolution.max(2) - 1;
    let mut worst = T::zero();
    for a in 0..=steps {
        for b in 0..=steps {
            let p = Point::new(
                area.0 * T::from_count(a) / T::from_count(steps),
                area.1 * T::from_count(b) / T::from_count(steps),
            );
            let nearest = state
                .base_stations
                .iter()
                .map(|bs| bs.position.distance(&p))
                .fold(T::infinity(), T::min);
            worst = worst.max(nearest);
        }
    }
    let radius = state
        .base_stations
        .iter()
        .map(|bs| bs.radius)
        .fold(T::infinity(), T::min);
    CoverageAudit {
        worst_gap_m: worst,
        radius_m: radius,
        fully_covered: worst <= radius,
    }
}
