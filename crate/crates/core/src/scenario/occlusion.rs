//! Sight lines past a van parked before the crossing.
//!
//! The van's kerb-side body occupies the strip from `d_crossing -
//! van_length` up to the crossing line at lateral offset `van_offset_lat`.
//! A pedestrian waits on the line `y = ped_lat`. From the sensor at
//! `(x_ego, 0)` the ray through the van's near corner meets the pedestrian
//! line at
//!
//! ```text
//! x_ego + (x_corner - x_ego) * ped_lat / van_offset_lat
//! ```
//!
//! Points on that line beyond the intersection are hidden. The worst-case
//! pedestrian steps out at the edge of this hidden interval.

use super::{KinematicsError, ScenarioProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcclusionGeometry {
    van_offset_lat: f64,
    van_length: f64,
    ped_lat: f64,
}

impl OcclusionGeometry {
    pub fn new(van_offset_lat: f64, van_length: f64, ped_lat: f64) -> Result<Self, KinematicsError> {
        for (name, v) in [
            ("van_offset_lat", van_offset_lat),
            ("van_length", van_length),
            ("ped_lat", ped_lat),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(KinematicsError::Domain(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if van_offset_lat == 0.0 && ped_lat > 0.0 {
            return Err(KinematicsError::Domain("van_offset_lat = 0 puts the van on the ego path".into()));
        }
        Ok(Self {
            van_offset_lat,
            van_length,
            ped_lat,
        })
    }

    pub fn van_offset_lat(&self) -> f64 {
        self.van_offset_lat
    }

    pub fn van_length(&self) -> f64 {
        self.van_length
    }

    pub fn ped_lat(&self) -> f64 {
        self.ped_lat
    }

    /// The van only hides the pedestrian line if it stands between that
    /// line and the ego path.
    pub fn occludes(&self) -> bool {
        self.van_offset_lat < self.ped_lat
    }

    /// Distance ahead of the sensor to the edge of the hidden interval,
    /// given the longitudinal distance still to go to the van's corner.
    pub fn emergence_distance(&self, corner_ahead: f64) -> Sightline {
        if !self.occludes() {
            return Sightline::Unoccluded;
        }
        if corner_ahead <= 0.0 {
            // Alongside the van: its flank hides everything from here on.
            return Sightline::Emergence(0.0);
        }
        Sightline::Emergence(corner_ahead * self.ped_lat / self.van_offset_lat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sightline {
    Unoccluded,
    /// A hidden pedestrian may appear this far ahead (metres).
    Emergence(f64),
}

impl Sightline {
    /// `+inf` when nothing is hidden.
    pub fn distance(&self) -> f64 {
        match self {
            Sightline::Unoccluded => f64::INFINITY,
            Sightline::Emergence(d) => *d,
        }
    }

    pub fn is_occluded(&self) -> bool {
        matches!(self, Sightline::Emergence(_))
    }
}

/// Sight line for an ego sensor at station `x_ego`.
pub fn occlusion_range(profile: &ScenarioProfile, x_ego: f64) -> Sightline {
    match &profile.occlusion {
        None => Sightline::Unoccluded,
        Some(geom) => {
            let corner = profile.d_crossing - geom.van_length;
            geom.emergence_distance(corner - x_ego)
        }
    }
}
