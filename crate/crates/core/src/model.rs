//! Network state and the closed-form radio, power and efficiency model.
//!
//! Everything here is a pure function of its inputs. Algorithms mutate a
//! [`NetworkState`] and call back into these functions to evaluate links.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{db_to_linear, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("base station {0} is asleep and cannot serve a link")]
    BsAsleep(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsState {
    Active,
    Sleep,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseStation<T> {
    pub id: usize,
    pub position: Point<T>,
    /// Transmission/communication radius in meters.
    pub radius: T,
    /// Maximum transmit power in watts.
    pub max_tx_power: T,
    pub state: BsState,
}

impl<T: Scalar> BaseStation<T> {
    pub fn is_active(&self) -> bool {
        self.state == BsState::Active
    }

    pub fn covers(&self, ue: &UserEquipment<T>) -> bool {
        self.position.distance(&ue.position) <= self.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserEquipment<T> {
    pub id: usize,
    pub position: Point<T>,
}

/// Dense 0/1 association matrix between `n_bs` base stations and `n_ue` UEs,
/// with cached row and column degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    n_bs: usize,
    n_ue: usize,
    cells: Vec<bool>,
    row_counts: Vec<usize>,
    col_counts: Vec<usize>,
}

impl ConnectionMatrix {
    pub fn new(n_bs: usize, n_ue: usize) -> Self {
        Self {
            n_bs,
            n_ue,
            cells: vec![false; n_bs * n_ue],
            row_counts: vec![0; n_bs],
            col_counts: vec![0; n_ue],
        }
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }

    pub fn n_ue(&self) -> usize {
        self.n_ue
    }

    pub fn get(&self, bs: usize, ue: usize) -> bool {
        self.cells[bs * self.n_ue + ue]
    }

    pub fn set(&mut self, bs: usize, ue: usize, linked: bool) {
        let cell = &mut self.cells[bs * self.n_ue + ue];
        if *cell == linked {
            return;
        }
        *cell = linked;
        if linked {
            self.row_counts[bs] += 1;
            self.col_counts[ue] += 1;
        } else {
            self.row_counts[bs] -= 1;
            self.col_counts[ue] -= 1;
        }
    }

    /// Number of UEs linked to `bs`.
    pub fn row_count(&self, bs: usize) -> usize {
        self.row_counts[bs]
    }

    /// Number of BSs linked to `ue`.
    pub fn col_count(&self, ue: usize) -> usize {
        self.col_counts[ue]
    }

    /// UEs linked to `bs`, ascending.
    pub fn ues_of(&self, bs: usize) -> Vec<usize> {
        (0..self.n_ue).filter(|&j| self.get(bs, j)).collect()
    }

    /// BSs linked to `ue`, ascending.
    pub fn bss_of(&self, ue: usize) -> Vec<usize> {
        (0..self.n_bs).filter(|&i| self.get(i, ue)).collect()
    }

    /// The single serving BS of `ue`, if it has exactly one link.
    pub fn serving(&self, ue: usize) -> Option<usize> {
        if self.col_counts[ue] == 1 {
            (0..self.n_bs).find(|&i| self.get(i, ue))
        } else {
            None
        }
    }

    /// All `(bs, ue)` links in row-major order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n_ue = self.n_ue;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(k, _)| (k / n_ue, k % n_ue))
    }

    pub fn link_count(&self) -> usize {
        self.row_counts.iter().sum()
    }

    pub fn clear(&mut self) {
        self.cells.iter_mut().for_each(|c| *c = false);
        self.row_counts.iter_mut().for_each(|c| *c = 0);
        self.col_counts.iter_mut().for_each(|c| *c = 0);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkState<T> {
    pub base_stations: Vec<BaseStation<T>>,
    pub user_equipments: Vec<UserEquipment<T>>,
    pub connections: ConnectionMatrix,
}

impl<T: Scalar> NetworkState<T> {
    /// Builds a state with every BS active and no links.
    pub fn new(base_stations: Vec<BaseStation<T>>, user_equipments: Vec<UserEquipment<T>>) -> Self {
        let connections = ConnectionMatrix::new(base_stations.len(), user_equipments.len());
        Self {
            base_stations,
            user_equipments,
            connections,
        }
    }

    pub fn n_bs(&self) -> usize {
        self.base_stations.len()
    }

    pub fn n_ue(&self) -> usize {
        self.user_equipments.len()
    }

    pub fn is_active(&self, bs: usize) -> bool {
        self.base_stations[bs].is_active()
    }

    pub fn active_ids(&self) -> Vec<usize> {
        (0..self.n_bs()).filter(|&i| self.is_active(i)).collect()
    }

    pub fn active_count(&self) -> usize {
        self.base_stations.iter().filter(|b| b.is_active()).count()
    }

    pub fn distance(&self, bs: usize, ue: usize) -> T {
        self.base_stations[bs]
            .position
            .distance(&self.user_equipments[ue].position)
    }

    pub fn bs_distance(&self, a: usize, b: usize) -> T {
        self.base_stations[a]
            .position
            .distance(&self.base_stations[b].position)
    }

    /// Number of UEs with exactly one link.
    pub fn served_count(&self) -> usize {
        (0..self.n_ue())
            .filter(|&j| self.connections.col_count(j) == 1)
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainModel {
    UnitGain,
    PowerLaw,
}

/// Transmit power attributed to each interfering BS in the SINR denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceModel {
    /// Every other active BS interferes at its full `max_tx_power`.
    FullPower,
    /// Every other active BS interferes at its per-link power `max_tx_power / S_max`,
    /// the same level as the serving link, scaled by the interferer activity.
    PerLinkPower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig<T> {
    pub sinr_threshold_db: T,
    pub pathloss_exponent: T,
    pub gain_model: GainModel,
    pub noise_density_dbm_per_hz: T,
    pub bandwidth_hz: T,
    pub min_distance_m: T,
    pub interference: InterferenceModel,
    /// Fraction of its per-link power an interferer emits on average under
    /// [`InterferenceModel::PerLinkPower`]. `None` uses the offered load of the
    /// network, `min(1, M / (N * S_max))`.
    pub interferer_activity: Option<T>,
    /// When set, a link also requires the UE to lie within the BS radius.
    pub radius_gated_links: bool,
}

impl<T: Scalar> Default for RadioConfig<T> {
    fn default() -> Self {
        Self {
            sinr_threshold_db: T::lit(-5.0),
            pathloss_exponent: T::lit(2.0),
            gain_model: GainModel::PowerLaw,
            noise_density_dbm_per_hz: T::lit(-174.0),
            bandwidth_hz: T::lit(10.0e6),
            min_distance_m: T::lit(1.0),
            interference: InterferenceModel::PerLinkPower,
            interferer_activity: None,
            radius_gated_links: false,
        }
    }
}

impl<T: Scalar> RadioConfig<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.pathloss_exponent >= T::zero()) {
            return Err(ModelError::InvalidConfig(
                "pathloss_exponent must be >= 0".into(),
            ));
        }
        if !(self.bandwidth_hz > T::zero()) {
            return Err(ModelError::InvalidConfig("bandwidth_hz must be > 0".into()));
        }
        if !(self.min_distance_m > T::zero()) {
            return Err(ModelError::InvalidConfig(
                "min_distance_m must be > 0".into(),
            ));
        }
        if let Some(a) = self.interferer_activity {
            if !(a >= T::zero() && a <= T::one()) {
                return Err(ModelError::InvalidConfig(
                    "interferer_activity must lie in [0, 1]".into(),
                ));
            }
        }
        if !self.sinr_threshold_db.is_finite() || !self.noise_density_dbm_per_hz.is_finite() {
            return Err(ModelError::InvalidConfig(
                "threshold and noise must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn threshold_linear(&self) -> T {
        db_to_linear(self.sinr_threshold_db)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerConfig<T> {
    pub active_circuit_power_w: T,
    pub sleep_power_w: T,
    pub max_tx_power_w: T,
    /// Maximum number of UEs a BS serves (`S_max`).
    pub max_load: usize,
}

impl<T: Scalar> Default for PowerConfig<T> {
    fn default() -> Self {
        Self {
            active_circuit_power_w: T::lit(25.0),
            sleep_power_w: T::lit(8.0),
            max_tx_power_w: T::lit(1.0),
            max_load: 30,
        }
    }
}

impl<T: Scalar> PowerConfig<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.sleep_power_w >= T::zero()) || !(self.active_circuit_power_w > self.sleep_power_w)
        {
            return Err(ModelError::InvalidConfig(
                "need active_circuit_power_w > sleep_power_w >= 0".into(),
            ));
        }
        if !(self.max_tx_power_w > T::zero()) {
            return Err(ModelError::InvalidConfig(
                "max_tx_power_w must be > 0".into(),
            ));
        }
        if self.max_load < 1 {
            return Err(ModelError::InvalidConfig("max_load must be >= 1".into()));
        }
        Ok(())
    }
}

/// How a SINR value is compared against the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdRule {
    /// `sinr > threshold` (initial association).
    Strict,
    /// `sinr >= threshold` (handover and backup checks).
    AtLeast,
}

impl ThresholdRule {
    pub fn passes<T: Scalar>(self, sinr: T, threshold: T) -> bool {
        match self {
            ThresholdRule::Strict => sinr > threshold,
            ThresholdRule::AtLeast => sinr >= threshold,
        }
    }
}

pub fn channel_gain<T: Scalar>(
    bs: &BaseStation<T>,
    ue: &UserEquipment<T>,
    cfg: &RadioConfig<T>,
) -> T {
    match cfg.gain_model {
        GainModel::UnitGain => T::one(),
        GainModel::PowerLaw => {
            let d = bs.position.distance(&ue.position).max(cfg.min_distance_m);
            d.powf(-cfg.pathloss_exponent)
        }
    }
}

/// Noise power in watts: density (dBm/Hz) times bandwidth.
pub fn noise_power<T: Scalar>(cfg: &RadioConfig<T>) -> T {
    db_to_linear(cfg.noise_density_dbm_per_hz - T::lit(30.0)) * cfg.bandwidth_hz
}

/// Load-proportional transmit power of `bs`.
pub fn tx_power<T: Scalar>(state: &NetworkState<T>, bs: usize, pcfg: &PowerConfig<T>) -> T {
    state.base_stations[bs].max_tx_power * T::from_count(state.connections.row_count(bs))
        / T::from_count(pcfg.max_load)
}

/// SINR of the link `bs -> ue` for an arbitrary activity pattern.
///
/// `is_active` decides which other BSs contribute interference; the serving BS
/// itself is assumed to transmit. This is the single SINR kernel every
/// algorithm and the oracle evaluate through.
pub fn sinr_with<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    ue: usize,
    is_active: impl Fn(usize) -> bool,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> T {
    let s_max = T::from_count(pcfg.max_load);
    let user = &state.user_equipments[ue];
    let serving = &state.base_stations[bs];
    let signal = serving.max_tx_power / s_max * channel_gain(serving, user, cfg);
    let activity = interferer_activity(state, cfg, pcfg);
    let mut interference = T::zero();
    for (k, other) in state.base_stations.iter().enumerate() {
        if k == bs || !is_active(k) {
            continue;
        }
        let p = match cfg.interference {
            InterferenceModel::FullPower => other.max_tx_power,
            InterferenceModel::PerLinkPower => activity * other.max_tx_power / s_max,
        };
        interference = interference + p * channel_gain(other, user, cfg);
    }
    signal / (interference + noise_power(cfg))
}

/// Activity factor applied to per-link interference.
pub fn interferer_activity<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> T {
    match cfg.interferer_activity {
        Some(a) => a,
        None => {
            let capacity = state.n_bs() * pcfg.max_load;
            if capacity == 0 {
                T::one()
            } else {
                (T::from_count(state.n_ue()) / T::from_count(capacity)).min(T::one())
            }
        }
    }
}

/// SINR of `bs -> ue` in the current state. Fails if `bs` is asleep.
pub fn sinr<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    ue: usize,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> Result<T, ModelError> {
    if !state.is_active(bs) {
        return Err(ModelError::BsAsleep(bs));
    }
    Ok(sinr_with(state, bs, ue, |k| state.is_active(k), cfg, pcfg))
}

/// Whether `bs` may carry `ue` under the given activity pattern: SINR passes
/// `rule` and, when radius gating is on, the UE is inside the BS radius.
pub fn link_qualifies<T: Scalar>(
    state: &NetworkState<T>,
    bs: usize,
    ue: usize,
    is_active: impl Fn(usize) -> bool,
    rule: ThresholdRule,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> bool {
    if cfg.radius_gated_links && !state.base_stations[bs].covers(&state.user_equipments[ue]) {
        return false;
    }
    let value = sinr_with(state, bs, ue, is_active, cfg, pcfg);
    rule.passes(value, cfg.threshold_linear())
}

pub fn shannon_rate<T: Scalar>(sinr: T) -> T {
    (T::one() + sinr).log2()
}

/// Sum of Shannon rates over links whose BS is active.
pub fn total_rate<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> T {
    state
        .connections
        .links()
        .filter(|&(i, _)| state.is_active(i))
        .map(|(i, j)| shannon_rate(sinr_with(state, i, j, |k| state.is_active(k), cfg, pcfg)))
        .sum()
}

pub fn total_power<T: Scalar>(state: &NetworkState<T>, pcfg: &PowerConfig<T>) -> T {
    (0..state.n_bs())
        .map(|i| {
            if state.is_active(i) {
                tx_power(state, i, pcfg) + pcfg.active_circuit_power_w
            } else {
                pcfg.sleep_power_w
            }
        })
        .sum()
}

/// Network energy efficiency in bits/s/Hz per watt.
pub fn energy_efficiency<T: Scalar>(
    state: &NetworkState<T>,
    cfg: &RadioConfig<T>,
    pcfg: &PowerConfig<T>,
) -> T {
    total_rate(state, cfg, pcfg) / total_power(state, pcfg)
}

pub fn load_degree<T: Scalar>(state: &NetworkState<T>, bs: usize, pcfg: &PowerConfig<T>) -> T {
    T::from_count(state.connections.row_count(bs)) / T::from_count(pcfg.max_load)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(id: usize, x: f64, y: f64) -> BaseStation<f64> {
        BaseStation {
            id,
            position: Point::new(x, y),
            radius: 120.0,
            max_tx_power: 1.0,
            state: BsState::Active,
        }
    }

    fn ue(id: usize, x: f64, y: f64) -> UserEquipment<f64> {
        UserEquipment {
            id,
            position: Point::new(x, y),
        }
    }

    fn unit_radio(noise_w: f64) -> RadioConfig<f64> {
        // noise density chosen so that density * 1 Hz == noise_w
        RadioConfig {
            gain_model: GainModel::UnitGain,
            noise_density_dbm_per_hz: 10.0 * (noise_w * 1000.0).log10(),
            bandwidth_hz: 1.0,
            ..full_activity()
        }
    }

    fn full_activity() -> RadioConfig<f64> {
        RadioConfig {
            interferer_activity: Some(1.0),
            ..RadioConfig::default()
        }
    }

    #[test]
    fn gain_models() {
        let b = bs(0, 0.0, 0.0);
        let unit = RadioConfig {
            gain_model: GainModel::UnitGain,
            ..RadioConfig::default()
        };
        assert_eq!(channel_gain(&b, &ue(0, 400.0, 3.0), &unit), 1.0);
        let law = RadioConfig::<f64>::default();
        assert_eq!(channel_gain(&b, &ue(0, 1.0, 0.0), &law), 1.0);
        assert!((channel_gain(&b, &ue(0, 10.0, 0.0), &law) - 0.01).abs() < 1e-18);
        // clamped at the reference distance
        assert_eq!(channel_gain(&b, &ue(0, 0.0, 0.0), &law), 1.0);
    }

    #[test]
    fn noise_conversions() {
        let mut cfg = RadioConfig::<f64> {
            bandwidth_hz: 1.0,
            ..RadioConfig::default()
        };
        let n = noise_power(&cfg);
        assert!((n / 10f64.powf(-20.4) - 1.0).abs() < 1e-12);
        assert!((n - 3.981e-21).abs() < 1e-24);
        cfg.bandwidth_hz = 1e7;
        let n = noise_power(&cfg);
        // -104 dBm
        assert!((10.0 * (n * 1000.0).log10() + 104.0).abs() < 1e-9);
        assert!((n - 3.981e-14).abs() < 1e-17);
        cfg.noise_density_dbm_per_hz = 0.0;
        cfg.bandwidth_hz = 1.0;
        assert!((noise_power(&cfg) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn tx_power_tracks_load() {
        let mut state = NetworkState::new(
            vec![bs(0, 0.0, 0.0)],
            (0..30).map(|j| ue(j, 1.0, 1.0)).collect(),
        );
        let p = PowerConfig::<f64>::default();
        assert_eq!(tx_power(&state, 0, &p), 0.0);
        for j in 0..15 {
            state.connections.set(0, j, true);
        }
        assert_eq!(tx_power(&state, 0, &p), 0.5);
        assert_eq!(load_degree(&state, 0, &p), 0.5);
        for j in 15..30 {
            state.connections.set(0, j, true);
        }
        assert_eq!(tx_power(&state, 0, &p), 1.0);
        assert_eq!(load_degree(&state, 0, &p), 1.0);
    }

    #[test]
    fn sinr_single_and_symmetric() {
        // p/S_max = 1 W, sigma^2 = 1 W
        let p = PowerConfig {
            max_tx_power_w: 30.0,
            ..PowerConfig::default()
        };
        let mut b = bs(0, 0.0, 0.0);
        b.max_tx_power = 30.0;
        let state = NetworkState::new(vec![b], vec![ue(0, 5.0, 5.0)]);
        let radio = unit_radio(1.0);
        let s = sinr(&state, 0, 0, &radio, &p).unwrap();
        assert!((s - 1.0).abs() < 1e-12);

        // two equidistant BSs, per-link interference at P, noise sigma^2
        let two = NetworkState::new(
            vec![bs(0, 0.0, 0.0), bs(1, 10.0, 0.0)],
            vec![ue(0, 5.0, 0.0)],
        );
        let radio = unit_radio(0.25);
        let pc = PowerConfig::<f64>::default();
        let per = 1.0 / 30.0;
        let s = sinr(&two, 0, 0, &radio, &pc).unwrap();
        assert!((s - per / (per + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn sinr_three_bs_hand_sum() {
        let state = NetworkState::new(
            vec![bs(0, 0.0, 0.0), bs(1, 30.0, 0.0), bs(2, 0.0, 40.0)],
            vec![ue(0, 3.0, 4.0)],
        );
        let radio = full_activity();
        let p = PowerConfig::<f64>::default();
        // distances: 5, sqrt(27^2+4^2)=sqrt(745), sqrt(9+36^2)=sqrt(1305)
        let n = 3.981_071_705_534_972e-14;
        let per = 1.0 / 30.0;
        let expected = per / 25.0 / (per / 745.0 + per / 1305.0 + n);
        let got = sinr(&state, 0, 0, &radio, &p).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12, "{got} vs {expected}");

        let full = RadioConfig {
            interference: InterferenceModel::FullPower,
            ..radio
        };
        let expected = per / 25.0 / (1.0 / 745.0 + 1.0 / 1305.0 + n);
        let got = sinr(&state, 0, 0, &full, &p).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn offered_load_activity() {
        // 2 BSs, 1 UE, S_max 30 -> activity 1/60
        let state = NetworkState::new(
            vec![bs(0, 0.0, 0.0), bs(1, 20.0, 0.0)],
            vec![ue(0, 10.0, 0.0)],
        );
        let radio = RadioConfig::<f64>::default();
        let p = PowerConfig::<f64>::default();
        assert_eq!(interferer_activity(&state, &radio, &p), 1.0 / 60.0);
        let s = sinr(&state, 0, 0, &radio, &p).unwrap();
        let full = sinr(&state, 0, 0, &full_activity(), &p).unwrap();
        assert!((s / full - 60.0).abs() < 1e-6);
    }

    #[test]
    fn sinr_rejects_sleeping_server() {
        let mut state = NetworkState::new(vec![bs(0, 0.0, 0.0)], vec![ue(0, 1.0, 1.0)]);
        state.base_stations[0].state = BsState::Sleep;
        let err = sinr(
            &state,
            0,
            0,
            &RadioConfig::default(),
            &PowerConfig::default(),
        );
        assert_eq!(err, Err(ModelError::BsAsleep(0)));
    }

    #[test]
    fn sinr_monotonicity() {
        let state = NetworkState::new(
            vec![bs(0, 0.0, 0.0), bs(1, 50.0, 0.0)],
            vec![ue(0, 10.0, 0.0)],
        );
        let radio = full_activity();
        let p = PowerConfig::<f64>::default();
        let base = sinr(&state, 0, 0, &radio, &p).unwrap();

        let mut noisier = radio.clone();
        noisier.noise_density_dbm_per_hz = -60.0;
        assert!(sinr(&state, 0, 0, &noisier, &p).unwrap() < base);

        let mut closer_intf = state.clone();
        closer_intf.base_stations[1].position.x = 30.0;
        assert!(sinr(&closer_intf, 0, 0, &radio, &p).unwrap() < base);

        let mut closer_srv = state.clone();
        closer_srv.base_stations[0].position.x = 5.0;
        assert!(sinr(&closer_srv, 0, 0, &radio, &p).unwrap() > base);
    }

    #[test]
    fn rates() {
        assert_eq!(shannon_rate(0.0_f64), 0.0);
        assert_eq!(shannon_rate(1.0_f64), 1.0);
        assert_eq!(shannon_rate(3.0_f64), 2.0);
        assert!(shannon_rate(2.0_f64) > shannon_rate(1.5_f64));
    }

    #[test]
    fn power_totals() {
        let p = PowerConfig::<f64>::default();
        let mut state = NetworkState::new((0..20).map(|i| bs(i, i as f64, 0.0)).collect(), vec![]);
        for b in state.base_stations.iter_mut() {
            b.state = BsState::Sleep;
        }
        assert_eq!(total_power(&state, &p), 160.0);
        state.base_stations[3].state = BsState::Active;
        assert_eq!(total_power(&state, &p), 177.0);
        let radio = RadioConfig::<f64>::default();
        assert_eq!(total_rate(&state, &radio, &p), 0.0);
        assert_eq!(energy_efficiency(&state, &radio, &p), 0.0);
    }

    #[test]
    fn total_rate_matches_link_sum() {
        let mut state = NetworkState::new(
            vec![bs(0, 0.0, 0.0), bs(1, 100.0, 0.0), bs(2, 50.0, 80.0)],
            vec![
                ue(0, 10.0, 5.0),
                ue(1, 90.0, 0.0),
                ue(2, 55.0, 70.0),
                ue(3, 60.0, 0.0),
            ],
        );
        for (i, j) in [(0, 0), (1, 1), (2, 2), (1, 3)] {
            state.connections.set(i, j, true);
        }
        let radio = RadioConfig::<f64>::default();
        let p = PowerConfig::<f64>::default();
        let mut by_hand = 0.0;
        for (i, j) in [(0, 0), (1, 1), (2, 2), (1, 3)] {
            by_hand += (1.0 + sinr(&state, i, j, &radio, &p).unwrap()).log2();
        }
        let rate = total_rate(&state, &radio, &p);
        assert!((rate - by_hand).abs() < 1e-12);
        let power = 3.0 * 25.0 + 1.0 / 30.0 + 2.0 / 30.0 + 1.0 / 30.0;
        assert!((total_power(&state, &p) - power).abs() < 1e-12);
        assert_eq!(
            energy_efficiency(&state, &radio, &p),
            rate / total_power(&state, &p)
        );
    }

    #[test]
    fn matrix_bookkeeping() {
        let mut m = ConnectionMatrix::new(3, 4);
        m.set(1, 2, true);
        m.set(1, 2, true);
        m.set(0, 2, true);
        assert_eq!(m.col_count(2), 2);
        assert_eq!(m.row_count(1), 1);
        assert_eq!(m.serving(2), None);
        m.set(0, 2, false);
        assert_eq!(m.serving(2), Some(1));
        assert_eq!(m.links().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(m.ues_of(1), vec![2]);
        assert_eq!(m.bss_of(2), vec![1]);
    }

    #[test]
    fn works_in_f32() {
        let state = NetworkState::new(
            vec![bs32(0.0), bs32(50.0)],
            vec![UserEquipment {
                id: 0,
                position: Point::new(10.0f32, 0.0),
            }],
        );
        let s = sinr(
            &state,
            0,
            0,
            &RadioConfig::<f32> {
                interferer_activity: Some(1.0),
                ..RadioConfig::default()
            },
            &PowerConfig::<f32>::default(),
        )
        .unwrap();
        // (1/100) / (1/1600) = 16
        assert!((s - 16.0).abs() < 1e-3);
    }

    fn bs32(x: f32) -> BaseStation<f32> {
        BaseStation {
            id: 0,
            position: Point::new(x, 0.0),
            radius: 120.0,
            max_tx_power: 1.0,
            state: BsState::Active,
        }
    }
}
