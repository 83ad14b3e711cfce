use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KinematicsError {
    #[error("domain error: {0}")]
    Domain(String),
}

/// Metres per second in one mile per hour (exact).
pub const MPH: f64 = 0.44704;

pub fn mph_to_mps(mph: f64) -> f64 {
    mph * MPH
}

/// Braking is limited by the actuator and by tyre-road friction.
pub fn effective_deceleration(a_max: f64, mu: f64, g: f64) -> f64 {
    a_max.min(mu * g)
}

/// Distance covered while reacting and then braking at `a_eff` to rest.
pub fn stopping_distance(v: f64, a_eff: f64, t_react: f64) -> Result<f64, KinematicsError> {
    if !(a_eff > 0.0) {
        return Err(KinematicsError::Domain(format!("deceleration must be positive, got {a_eff}")));
    }
    if !(v >= 0.0) || !(t_react >= 0.0) {
        return Err(KinematicsError::Domain(format!(
            "speed and reaction time must be non-negative, got v = {v}, t_react = {t_react}"
        )));
    }
    Ok(v * t_react + v * v / (2.0 * a_eff))
}

/// Largest speed whose stopping distance fits within both the remaining
/// distance and the detection range.
///
/// Uses `2·a·s / (a·t + sqrt(a²t² + 2·a·s))`, which equals the usual
/// root of the stopping-distance quadratic without cancellation at small
/// `s`. Without braking capability only standstill is adequate.
pub fn adequate_speed(d: f64, a_eff: f64, t_react: f64, d_detect: f64) -> f64 {
    let reach = d.min(d_detect);
    if !(reach > 0.0) || !(a_eff > 0.0) {
        return 0.0;
    }
    if reach.is_infinite() {
        return f64::INFINITY;
    }
    let at = a_eff * t_react.max(0.0);
    2.0 * a_eff * reach / (at + (at * at + 2.0 * a_eff * reach).sqrt())
}
