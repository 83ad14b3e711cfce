use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{v_boundary, ScenarioProfile};

/// Fixed integration step (seconds).
pub const SIM_DT: f64 = 1e-3;
/// Below this target speed the tracking controller brakes to standstill.
const STANDSTILL_SPEED: f64 = 1e-2;
const MAX_DURATION: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// React, then brake at full effective deceleration to standstill.
    ConservativeStop,
    /// Keep the speed at or below the boundary speed for the remaining
    /// distance, braking no harder than the effective deceleration.
    AdequateSpeedTracking,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::ConservativeStop => "conservative_stop",
            Policy::AdequateSpeedTracking => "adequate_speed_tracking",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conservative_stop" => Ok(Policy::ConservativeStop),
            "adequate_speed_tracking" => Ok(Policy::AdequateSpeedTracking),
            other => Err(format!(
                "unknown policy `{other}` (expected conservative_stop or adequate_speed_tracking)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    /// Command applied from this sample until the next one.
    pub a_cmd: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("sample {index}: time {t} does not increase")]
    NonIncreasingTime { index: usize, t: f64 },
    #[error("sample {index}: negative speed {v}")]
    NegativeSpeed { index: usize, v: f64 },
    #[error("sample {index}: non-finite value")]
    NonFinite { index: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BehaviorTrace {
    samples: Vec<TraceSample>,
}

impl BehaviorTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self, TraceError> {
        for (index, s) in samples.iter().enumerate() {
            if ![s.t, s.x, s.v, s.a_cmd].iter().all(|v| v.is_finite()) {
                return Err(TraceError::NonFinite { index });
            }
            if s.v < 0.0 {
                return Err(TraceError::NegativeSpeed { index, v: s.v });
            }
            if index > 0 && s.t <= samples[index - 1].t {
                return Err(TraceError::NonIncreasingTime { index, t: s.t });
            }
        }
        Ok(Self { samples })
    }

    /// Trace at constant speed `v` from `x = 0` until just past `x_end`.
    pub fn constant_speed(v: f64, x_end: f64, dt: f64) -> Self {
        let mut samples = Vec::new();
        let mut k = 0usize;
        loop {
            let t = k as f64 * dt;
            let x = v * t;
            samples.push(TraceSample { t, x, v, a_cmd: 0.0 });
            if x > x_end || v == 0.0 {
                break;
            }
            k += 1;
        }
        Self { samples }
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Ended at rest no further than `limit` (with 1 nm slack).
    pub fn stops_within(&self, limit: f64) -> bool {
        self.last().is_some_and(|s| s.v == 0.0 && s.x <= limit + 1e-9)
    }
}

/// Advances `(x, v)` under constant acceleration `a` for `h` seconds,
/// holding at rest if braking would reverse the motion. Velocity moves
/// first; position advances with the mean of old and new velocity.
fn advance(x: f64, v: f64, a: f64, h: f64) -> (f64, f64) {
    if h <= 0.0 {
        return (x, v);
    }
    let v_new = v + a * h;
    if v_new < 0.0 {
        let tau = v / -a;
        (x + 0.5 * v * tau, 0.0)
    } else {
        (x + 0.5 * (v + v_new) * h, v_new)
    }
}

pub fn simulate(profile: &ScenarioProfile, policy: Policy) -> BehaviorTrace {
    let a_eff = profile.effective_deceleration();
    let mut samples = Vec::new();
    let (mut x, mut v) = (0.0_f64, profile.v_init);
    let envelope = match policy {
        Policy::AdequateSpeedTracking => Some(ViableSpeed::new(profile, a_eff)),
        Policy::ConservativeStop => None,
    };
    let mut k = 0usize;
    loop {
        let t = k as f64 * SIM_DT;
        let ended = v == 0.0 || x > profile.d_crossing || t >= MAX_DURATION;
        if ended {
            samples.push(TraceSample { t, x, v, a_cmd: 0.0 });
            break;
        }
        let (a_cmd, next) = match &envelope {
            None => conservative_step(profile, a_eff, t, x, v),
            Some(envelope) => tracking_step(envelope, x, v),
        };
        samples.push(TraceSample { t, x, v, a_cmd });
        (x, v) = next;
        k += 1;
    }
    BehaviorTrace { samples }
}

fn conservative_step(profile: &ScenarioProfile, a_eff: f64, t: f64, x: f64, v: f64) -> (f64, (f64, f64)) {
    let t_end = t + SIM_DT;
    if t_end <= profile.t_react {
        (0.0, advance(x, v, 0.0, SIM_DT))
    } else if t >= profile.t_react {
        (-a_eff, advance(x, v, -a_eff, SIM_DT))
    } else {
        // reaction time ends inside this step
        let coast = profile.t_react - t;
        let (x, v) = advance(x, v, 0.0, coast);
        (0.0, advance(x, v, -a_eff, SIM_DT - coast))
    }
}

/// Speeds from which the vehicle can stay at or below the boundary
/// speed all the way to the line while braking no harder than `a_eff`.
/// Where the boundary falls faster than the vehicle can slow down, this
/// lies strictly below it.
///
/// On each grid cell `[d_k, d_k+1)` the boundary is held at its value at
/// `d_k` (it is non-decreasing in `d`), which keeps the envelope below the
/// boundary and exactly reachable by braking.
struct ViableSpeed<'a> {
    profile: &'a ScenarioProfile,
    a_eff: f64,
    /// Envelope at `k * ENVELOPE_STEP`.
    grid: Vec<f64>,
}

const ENVELOPE_STEP: f64 = 1e-2;

impl<'a> ViableSpeed<'a> {
    fn new(profile: &'a ScenarioProfile, a_eff: f64) -> Self {
        let n = (profile.d_crossing / ENVELOPE_STEP).ceil() as usize + 1;
        let mut grid = vec![v_boundary(profile, 0.0)];
        for k in 1..n {
            let below = (k - 1) as f64 * ENVELOPE_STEP;
            let v = Self::reach(grid[k - 1], a_eff, ENVELOPE_STEP).min(v_boundary(profile, below));
            grid.push(v);
        }
        Self { profile, a_eff, grid }
    }

    /// Speed from which braking over `dist` ends at `v_end`.
    fn reach(v_end: f64, a_eff: f64, dist: f64) -> f64 {
        (v_end * v_end + 2.0 * a_eff * dist).sqrt()
    }

    fn at(&self, d: f64) -> f64 {
        let d = d.max(0.0);
        let k = ((d / ENVELOPE_STEP).floor() as usize).min(self.grid.len() - 1);
        let below = k as f64 * ENVELOPE_STEP;
        Self::reach(self.grid[k], self.a_eff, d - below).min(v_boundary(self.profile, below))
    }
}

fn tracking_step(envelope: &ViableSpeed<'_>, x: f64, v: f64) -> (f64, (f64, f64)) {
    let (profile, a_eff) = (envelope.profile, envelope.a_eff);
    let remaining = |v_next: f64| profile.d_crossing - (x + 0.5 * (v + v_next) * SIM_DT);
    let admissible = |v_next: f64| v_next <= envelope.at(remaining(v_next));
    let floor = (v - a_eff * SIM_DT).max(0.0);

    let v_next = if admissible(v) {
        v
    } else if v > v_boundary(profile, profile.d_crossing - x) || !admissible(floor) {
        // already too fast, or cannot get back under the envelope this step
        return (-a_eff, advance(x, v, -a_eff, SIM_DT));
    } else {
        let (mut lo, mut hi) = (floor, v);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if admissible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let v_next = if v_next < STANDSTILL_SPEED && floor == 0.0 { 0.0 } else { v_next };
    let a_cmd = ((v_next - v) / SIM_DT).clamp(-a_eff, 0.0);
    (a_cmd, (x + 0.5 * (v + v_next) * SIM_DT, v_next))
}
