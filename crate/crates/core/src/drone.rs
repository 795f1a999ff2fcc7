//! Homogeneous drone model: payload-dependent consumption, linear charging,
//! and FIFO charging on a limited number of pads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DroneError {
    #[error("payload {payload} kg outside [0, {max}] kg")]
    PayloadOutOfRange { payload: f64, max: f64 },
    #[error("distance {0} m must be non-negative")]
    NegativeDistance(f64),
    #[error("battery deficit {deficit} mAh outside [0, {capacity}] mAh")]
    DeficitOutOfRange { deficit: f64, capacity: f64 },
    #[error("at least one recharging pad is required, got {0}")]
    NoPads(i64),
    #[error("invalid drone spec: {0}")]
    InvalidSpec(String),
    #[error("battery level {level} mAh outside [0, {capacity}] mAh")]
    BatteryOutOfRange { level: f64, capacity: f64 },
}

/// Shared parameters of every drone in the provider's fleet.
///
/// Defaults follow a DJI Phantom 3 class airframe: 4480 mAh battery,
/// 15.6 m/s cruise, 30 minutes for a full charge. The unloaded draw is
/// derived from a nominal 23 minute endurance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DroneSpec {
    pub battery_capacity: f64,
    pub max_payload: f64,
    pub speed: f64,
    pub full_charge_time: f64,
    pub base_consumption_rate: f64,
    pub payload_consumption_factor: f64,
}

pub const DEFAULT_BATTERY_MAH: f64 = 4480.0;
pub const DEFAULT_SPEED_MPS: f64 = 15.6;
pub const DEFAULT_FULL_CHARGE_S: f64 = 1800.0;
pub const DEFAULT_ENDURANCE_S: f64 = 23.0 * 60.0;

impl Default for DroneSpec {
    fn default() -> Self {
        DroneSpec {
            battery_capacity: DEFAULT_BATTERY_MAH,
            max_payload: 1.5,
            speed: DEFAULT_SPEED_MPS,
            full_charge_time: DEFAULT_FULL_CHARGE_S,
            base_consumption_rate: DEFAULT_BATTERY_MAH / DEFAULT_ENDURANCE_S,
            payload_consumption_factor: 0.5,
        }
    }
}

/// Time a swarm spends at a node: the longest single charge plus the extra
/// delay caused by queueing for pads.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NodeTime {
    pub charge_time: f64,
    pub wait_time: f64,
}

impl NodeTime {
    /// Completion time of the last drone.
    pub fn total(&self) -> f64 {
        self.charge_time + self.wait_time
    }
}

impl DroneSpec {
    pub fn validate(&self) -> Result<(), DroneError> {
        let positive = [
            ("battery_capacity", self.battery_capacity),
            ("max_payload", self.max_payload),
            ("speed", self.speed),
            ("full_charge_time", self.full_charge_time),
            ("base_consumption_rate", self.base_consumption_rate),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(DroneError::InvalidSpec(format!("{name} must be positive, got {v}")));
            }
        }
        let g = self.payload_consumption_factor;
        if !(g.is_finite() && g >= 0.0) {
            return Err(DroneError::InvalidSpec(format!(
                "payload_consumption_factor must be non-negative, got {g}"
            )));
        }
        Ok(())
    }

    fn check_payload(&self, payload: f64) -> Result<(), DroneError> {
        if (0.0..=self.max_payload).contains(&payload) {
            Ok(())
        } else {
            Err(DroneError::PayloadOutOfRange { payload, max: self.max_payload })
        }
    }

    /// Draw in mAh/s: `base * (1 + factor * payload / max_payload)`.
    pub fn consumption_rate(&self, payload: f64) -> Result<f64, DroneError> {
        self.check_payload(payload)?;
        Ok(self.base_consumption_rate
            * (1.0 + self.payload_consumption_factor * payload / self.max_payload))
    }

    /// Battery spent flying `distance` meters at cruise speed.
    pub fn energy_for(&self, distance: f64, payload: f64) -> Result<f64, DroneError> {
        if distance < 0.0 || distance.is_nan() {
            return Err(DroneError::NegativeDistance(distance));
        }
        Ok(distance / self.speed * self.consumption_rate(payload)?)
    }

    pub fn travel_time(&self, distance: f64) -> f64 {
        distance / self.speed
    }

    /// Seconds to restore `deficit` mAh; charging is linear in the deficit.
    pub fn charge_time(&self, deficit: f64) -> Result<f64, DroneError> {
        // tolerate rounding from repeated subtraction
        let slack = 1e-9 * self.battery_capacity;
        if !(deficit >= -slack && deficit <= self.battery_capacity + slack) {
            return Err(DroneError::DeficitOutOfRange { deficit, capacity: self.battery_capacity });
        }
        let deficit = deficit.clamp(0.0, self.battery_capacity);
        Ok(self.full_charge_time * deficit / self.battery_capacity)
    }

    /// Charges drones in input order, each taking the pad that frees up
    /// first (lowest pad index on ties).
    pub fn node_service_time(&self, deficits: &[f64], available_pads: i64) -> Result<NodeTime, DroneError> {
        if available_pads < 1 {
            return Err(DroneError::NoPads(available_pads));
        }
        let pads = (available_pads as usize).min(deficits.len().max(1));
        let mut free_at = vec![0.0_f64; pads];
        let mut makespan = 0.0_f64;
        let mut longest = 0.0_f64;
        for &d in deficits {
            let ct = self.charge_time(d)?;
            longest = longest.max(ct);
            let (slot, _) = free_at
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
                .expect("at least one pad");
            free_at[slot] += ct;
            makespan = makespan.max(free_at[slot]);
        }
        Ok(NodeTime { charge_time: longest, wait_time: (makespan - longest).max(0.0) })
    }
}

/// Battery level and payload of one drone in a swarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    pub battery_level: f64,
    pub payload: f64,
}

impl DroneState {
    pub fn new(spec: &DroneSpec, battery_level: f64, payload: f64) -> Result<Self, DroneError> {
        if !(0.0..=spec.battery_capacity).contains(&battery_level) {
            return Err(DroneError::BatteryOutOfRange {
                level: battery_level,
                capacity: spec.battery_capacity,
            });
        }
        spec.check_payload(payload)?;
        Ok(DroneState { battery_level, payload })
    }

    pub fn fully_charged(spec: &DroneSpec, payload: f64) -> Result<Self, DroneError> {
        Self::new(spec, spec.battery_capacity, payload)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn consumption_at_bounds() {
        let s = DroneSpec::default();
        assert_eq!(s.consumption_rate(0.0).unwrap(), s.base_consumption_rate);
        assert!(close(s.consumption_rate(1.5).unwrap(), 1.5 * s.base_consumption_rate, 1e-12));
        assert!(s.consumption_rate(1.6).is_err());
        assert!(s.consumption_rate(-0.1).is_err());
    }

    #[test]
    fn consumption_default_loaded() {
        // 4480/1380 * (1 + 0.5 * 0.7/1.5)
        let s = DroneSpec::default();
        let expected = 4480.0 / 1380.0 * (1.0 + 0.5 * 0.7 / 1.5);
        assert!(close(s.consumption_rate(0.7).unwrap(), expected, 1e-12));
        assert!(close(s.consumption_rate(0.7).unwrap(), 4.004, 5e-4));
    }

    #[test]
    fn energy_examples() {
        let s = DroneSpec::default();
        assert_eq!(s.energy_for(0.0, 1.0).unwrap(), 0.0);
        assert!(close(s.energy_for(s.speed, 0.0).unwrap(), s.base_consumption_rate, 1e-12));
        let s = DroneSpec { base_consumption_rate: 3.246, ..DroneSpec::default() };
        assert!(close(s.energy_for(1000.0, 0.0).unwrap(), 1000.0 / 15.6 * 3.246, 1e-9));
        assert!(close(s.energy_for(1000.0, 0.0).unwrap(), 208.1, 0.05));
        assert!(s.energy_for(-1.0, 0.0).is_err());
    }

    #[test]
    fn charge_examples() {
        let s = DroneSpec::default();
        assert_eq!(s.charge_time(0.0).unwrap(), 0.0);
        assert_eq!(s.charge_time(4480.0).unwrap(), 1800.0);
        assert_eq!(s.charge_time(2240.0).unwrap(), 900.0);
        assert!(s.charge_time(4481.0).is_err());
        assert!(s.charge_time(-1.0).is_err());
    }

    #[test]
    fn node_time_concurrent() {
        let s = DroneSpec::default();
        let nt = s.node_service_time(&[4480.0, 2240.0, 1120.0], 3).unwrap();
        assert_eq!(nt, NodeTime { charge_time: 1800.0, wait_time: 0.0 });
    }

    #[test]
    fn node_time_sequential() {
        let s = DroneSpec::default();
        let nt = s.node_service_time(&[4480.0, 4480.0], 1).unwrap();
        assert_eq!(nt, NodeTime { charge_time: 1800.0, wait_time: 1800.0 });
        assert_eq!(nt.total(), 3600.0);
    }

    #[test]
    fn node_time_five_on_two() {
        let s = DroneSpec::default();
        let d = 1000.0;
        let nt = s.node_service_time(&[d; 5], 2).unwrap();
        assert!(close(nt.total(), 3.0 * s.charge_time(d).unwrap(), 1e-9));
    }

    #[test]
    fn node_time_needs_a_pad() {
        let s = DroneSpec::default();
        assert_eq!(s.node_service_time(&[1.0], 0), Err(DroneError::NoPads(0)));
        assert_eq!(s.node_service_time(&[1.0], -3), Err(DroneError::NoPads(-3)));
    }

    #[test]
    fn spec_validation() {
        assert!(DroneSpec::default().validate().is_ok());
        assert!(DroneSpec { speed: 0.0, ..DroneSpec::default() }.validate().is_err());
        assert!(DroneSpec { payload_consumption_factor: -1.0, ..DroneSpec::default() }
            .validate()
            .is_err());
    }

    #[test]
    fn state_bounds() {
        let s = DroneSpec::default();
        assert!(DroneState::new(&s, 4480.0, 1.5).is_ok());
        assert!(DroneState::new(&s, 4481.0, 0.0).is_err());
        assert!(DroneState::new(&s, 10.0, 2.0).is_err());
    }
}
