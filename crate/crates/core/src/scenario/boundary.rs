use super::{adequate_speed, occlusion_range, ScenarioProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub d: f64,
    pub v_boundary: f64,
}

/// Distance to the nearest point where a conflict can appear under
/// worst-case assumptions, for an ego vehicle `d` metres before the
/// crossing: the crossing itself, the detection horizon, or a pedestrian
/// emerging from behind the van.
pub fn conflict_distance(profile: &ScenarioProfile, d: f64) -> f64 {
    let d = d.max(0.0);
    let x_ego = profile.d_crossing - d;
    d.min(profile.d_detect)
        .min(occlusion_range(profile, x_ego).distance())
}

/// Highest speed at distance `d` from which the vehicle can still stop
/// before the worst-case conflict point. Above it only the standstill
/// fallback remains.
pub fn v_boundary(profile: &ScenarioProfile, d: f64) -> f64 {
    let reach = (conflict_distance(profile, d) - profile.margin).max(0.0);
    adequate_speed(
        reach,
        profile.effective_deceleration(),
        profile.t_react,
        f64::INFINITY,
    )
}

pub fn rms_boundary(profile: &ScenarioProfile, d_grid: &[f64]) -> Vec<BoundaryPoint> {
    d_grid
        .iter()
        .map(|&d| BoundaryPoint {
            d,
            v_boundary: v_boundary(profile, d),
        })
        .collect()
}

/// `n` evenly spaced distances from 0 to `d_max` inclusive.
pub fn uniform_grid(d_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| d_max * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
