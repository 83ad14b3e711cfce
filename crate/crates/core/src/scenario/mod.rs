//! Longitudinal behaviour at an occluded pedestrian crossing: stopping
//! envelopes, the adequate approach speed, the boundary between reaching
//! the safety goal and falling back to a standstill, and hazard checks on
//! behaviour traces.
//!
//! Coordinates: the ego vehicle drives along `x` and starts at `x = 0`;
//! the crossing line is at `x = d_crossing`. Lateral offsets are measured
//! from the ego path towards the kerb.

mod boundary;
mod hazards;
mod kinematics;
mod occlusion;
mod simulate;

use thiserror::Error;

use crate::model::{Scenario, ScenarioKey};

pub use boundary::{conflict_distance, rms_boundary, uniform_grid, v_boundary, BoundaryPoint};
pub use hazards::{check_hazards, HazardFinding, HazardId, BOUNDARY_TOLERANCE};
pub use kinematics::{adequate_speed, effective_deceleration, mph_to_mps, stopping_distance, KinematicsError, MPH};
pub use occlusion::{occlusion_range, OcclusionGeometry, Sightline};
pub use simulate::{simulate, BehaviorTrace, Policy, TraceError, TraceSample, SIM_DT};

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("missing scenario key `{0}`")]
    Missing(ScenarioKey),
    #[error("scenario key `{key}` = {value}: {reason}")]
    Invalid {
        key: ScenarioKey,
        value: f64,
        reason: &'static str,
    },
    #[error("occlusion geometry needs all of van_offset_lat, van_length and ped_lat")]
    PartialOcclusion,
    #[error(transparent)]
    Geometry(#[from] KinematicsError),
}

/// Checked kinematic and geometric parameters of one crossing scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioProfile {
    pub v_init: f64,
    pub d_crossing: f64,
    pub a_max: f64,
    pub mu: f64,
    pub t_react: f64,
    pub d_detect: f64,
    pub g: f64,
    pub occlusion: Option<OcclusionGeometry>,
    /// Extra distance added to every stopping distance. Stands in for an
    /// accepted-risk allowance; zero unless set by the caller.
    pub margin: f64,
}

impl ScenarioProfile {
    pub fn from_scenario(scenario: &Scenario) -> Result<Self, ProfileError> {
        let get = |key| scenario.params.get(&key).copied();
        let need = |key| get(key).ok_or(ProfileError::Missing(key));
        let occlusion = match (
            get(ScenarioKey::VanOffsetLat),
            get(ScenarioKey::VanLength),
            get(ScenarioKey::PedLat),
        ) {
            (None, None, None) => None,
            (Some(off), Some(len), Some(ped)) => Some(OcclusionGeometry::new(off, len, ped)?),
            _ => return Err(ProfileError::PartialOcclusion),
        };
        let profile = Self {
            v_init: need(ScenarioKey::VInit)?,
            d_crossing: need(ScenarioKey::DCrossing)?,
            a_max: need(ScenarioKey::AMax)?,
            mu: need(ScenarioKey::Mu)?,
            t_react: need(ScenarioKey::TReact)?,
            d_detect: need(ScenarioKey::DDetect)?,
            g: get(ScenarioKey::G).unwrap_or(STANDARD_GRAVITY),
            occlusion,
            margin: 0.0,
        };
        profile.check()?;
        Ok(profile)
    }

    /// Re-checks the value invariants; useful after mutating fields.
    pub fn check(&self) -> Result<(), ProfileError> {
        let invalid = |key, value, reason| Err(ProfileError::Invalid { key, value, reason });
        let finite_nonneg = [
            (ScenarioKey::VInit, self.v_init),
            (ScenarioKey::DCrossing, self.d_crossing),
            (ScenarioKey::TReact, self.t_react),
        ];
        for (key, value) in finite_nonneg {
            if !(value.is_finite() && value >= 0.0) {
                return invalid(key, value, "must be finite and non-negative");
            }
        }
        if !(self.d_detect >= 0.0) {
            return invalid(ScenarioKey::DDetect, self.d_detect, "must be non-negative");
        }
        if !(self.a_max > 0.0 && self.a_max.is_finite()) {
            return invalid(ScenarioKey::AMax, self.a_max, "must be positive");
        }
        if !(self.mu > 0.0 && self.mu <= 1.5) {
            return invalid(ScenarioKey::Mu, self.mu, "must lie in (0, 1.5]");
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return invalid(ScenarioKey::G, self.g, "must be positive");
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(KinematicsError::Domain(format!("margin must be non-negative, got {}", self.margin)).into());
        }
        Ok(())
    }

    pub fn effective_deceleration(&self) -> f64 {
        effective_deceleration(self.a_max, self.mu, self.g)
    }

    /// Same profile seen from `d` metres before the crossing at speed `v`.
    pub fn with_start(&self, d: f64, v: f64) -> Self {
        Self {
            d_crossing: d,
            v_init: v,
            ..self.clone()
        }
    }
}
