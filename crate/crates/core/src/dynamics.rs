//! Longitudinal motion along a path.
//!
//! Two regimes share one integrator: the ideal constant-acceleration model the
//! safety layer plans with, and a plant whose realized acceleration follows
//! the command through a first-order lag. With a zero time constant the two
//! are the same computation.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    /// Arclength along the bound path (m).
    pub s: f64,
    /// Speed along the path (m/s), never negative.
    pub v: f64,
    /// Acceleration the plant is currently realizing (m/s²).
    pub a_applied: f64,
    pub t: f64,
}

impl AgentState {
    pub fn at_rest(s: f64) -> Self {
        AgentState {
            s,
            ..Default::default()
        }
    }

    pub fn new(s: f64, v: f64) -> Self {
        AgentState {
            s,
            v,
            ..Default::default()
        }
    }
}

/// Parameters of the constant-acceleration planning model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub a_max: f64,
    pub a_brake_peak: f64,
    /// Fraction of the peak deceleration the model assumes is available.
    pub brake_fraction: f64,
}

impl ModelParams {
    pub fn decel(&self) -> f64 {
        self.brake_fraction * self.a_brake_peak
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantParams {
    /// First-order lag time constant on commanded acceleration (s).
    pub actuation_lag_tau: f64,
    pub a_brake_peak: f64,
}

/// Distance covered while braking from `v` to rest at constant `decel_mag`.
pub fn stopping_distance(v: f64, decel_mag: f64) -> Result<f64, DomainError> {
    if !(decel_mag.is_finite() && decel_mag > 0.0) {
        return Err(DomainError::NonPositiveDecel(decel_mag));
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(DomainError::InvalidSpeed(v));
    }
    Ok(v * v / (2.0 * decel_mag))
}

/// Advance `(s, v)` by `dt` under constant `a`. A braking step that would
/// cross zero speed ends exactly at the stop and rests for the remainder.
fn integrate(s: f64, v: f64, a: f64, dt: f64) -> (f64, f64) {
    if a < 0.0 && v + a * dt <= 0.0 {
        (s + v * v / (2.0 * -a), 0.0)
    } else {
        (s + v * dt + 0.5 * a * dt * dt, (v + a * dt).max(0.0))
    }
}

/// One tick of the ideal constant-acceleration model.
pub fn predict_model(state: &AgentState, a: f64, dt: f64) -> AgentState {
    let (s, v) = integrate(state.s, state.v, a, dt);
    AgentState {
        s,
        v,
        a_applied: a,
        t: state.t + dt,
    }
}

/// Realized acceleration after one tick of the first-order actuation lag.
pub fn lagged_acceleration(a_applied: f64, a_cmd: f64, dt: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        a_cmd
    } else {
        a_applied + (a_cmd - a_applied) * (1.0 - (-dt / tau).exp())
    }
}

/// One tick of the lagged plant: the lag is advanced with its exact
/// exponential solution, then kinematics integrate the new realized
/// acceleration held constant over the tick.
pub fn step_plant(state: &AgentState, a_cmd: f64, dt: f64, plant: &PlantParams) -> AgentState {
    let a = lagged_acceleration(state.a_applied, a_cmd, dt, plant.actuation_lag_tau);
    let (s, v) = integrate(state.s, state.v, a, dt);
    AgentState {
        s,
        v,
        a_applied: a,
        t: state.t + dt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANT_LAGGED: PlantParams = PlantParams {
        actuation_lag_tau: 0.3,
        a_brake_peak: 8.0,
    };

    #[test]
    fn stopping_distance_examples() {
        assert_eq!(stopping_distance(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(stopping_distance(20.0, 8.0).unwrap(), 25.0);
        let d = stopping_distance(20.0, 0.9 * 8.0).unwrap();
        assert!((d - 250.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn stopping_distance_rejects_bad_decel() {
        assert_eq!(stopping_distance(5.0, 0.0), Err(DomainError::NonPositiveDecel(0.0)));
        assert!(stopping_distance(5.0, -1.0).is_err());
        assert!(stopping_distance(-1.0, 1.0).is_err());
    }

    #[test]
    fn predict_model_examples() {
        let s = predict_model(&AgentState::new(0.0, 10.0), 0.0, 0.1);
        assert!((s.s - 1.0).abs() < 1e-12);
        assert_eq!(s.v, 10.0);

        let s = predict_model(&AgentState::new(0.0, 1.0), -8.0, 1.0);
        assert_eq!(s.v, 0.0);
        assert_eq!(s.s, 1.0 / 16.0);

        let s = predict_model(&AgentState::new(0.0, 5.0), 2.0, 0.5);
        assert_eq!(s.v, 6.0);
        assert_eq!(s.s, 2.75);
    }

    #[test]
    fn braking_at_rest_stays_put() {
        let s = predict_model(&AgentState::new(4.0, 0.0), -7.2, 0.05);
        assert_eq!((s.s, s.v), (4.0, 0.0));
    }

    #[test]
    fn lag_formula() {
        let s = step_plant(&AgentState::new(0.0, 20.0), -7.2, 0.05, &PLANT_LAGGED);
        let expected = -7.2 * (1.0 - (-1.0f64 / 6.0).exp());
        assert!((s.a_applied - expected).abs() < 1e-15);
        assert!((s.a_applied - -1.106).abs() < 1e-3);
    }

    #[test]
    fn zero_lag_matches_model() {
        let plant = PlantParams {
            actuation_lag_tau: 0.0,
            a_brake_peak: 8.0,
        };
        let mut a = AgentState::new(3.0, 12.0);
        let mut b = a;
        for k in 0..200 {
            let cmd = if k % 7 < 3 { 3.5 } else { -7.2 };
            a = predict_model(&a, cmd, 0.05);
            b = step_plant(&b, cmd, 0.05, &plant);
            assert_eq!(a, b);
        }
    }
}
