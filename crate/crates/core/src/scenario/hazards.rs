use std::fmt;
use std::str::FromStr;

use super::{v_boundary, BehaviorTrace, ScenarioProfile};

/// Slack on the boundary comparison for the too-fast check.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;
const TIME_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HazardId {
    /// No braking response once a reaction is required.
    H1,
    /// Approach faster than the boundary speed.
    H2,
    /// Entering the crossing while moving.
    H3,
}

impl HazardId {
    pub fn as_str(self) -> &'static str {
        match self {
            HazardId::H1 => "H1",
            HazardId::H2 => "H2",
            HazardId::H3 => "H3",
        }
    }
}

impl fmt::Display for HazardId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HazardId {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H1" => Ok(HazardId::H1),
            "H2" => Ok(HazardId::H2),
            "H3" => Ok(HazardId::H3),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HazardFinding {
    pub hazard: HazardId,
    pub timestamp: f64,
    pub detail: String,
}

/// Each hazard is reported at most once, at its first occurrence; the
/// result is ordered by hazard id.
///
/// * H2: first sample before the line with `v > v_boundary(d) + 1e-6`.
/// * H1: no braking command in `[t_H2, t_H2 + t_react]`.
/// * H3: first sample past the line with `v > 0`; the worst case assumes
///   pedestrians are always present.
pub fn check_hazards(trace: &BehaviorTrace, profile: &ScenarioProfile) -> Vec<HazardFinding> {
    let samples = trace.samples();
    let mut findings = Vec::new();

    let too_fast = samples.iter().find(|s| {
        let d = profile.d_crossing - s.x;
        d >= 0.0 && s.v > v_boundary(profile, d) + BOUNDARY_TOLERANCE
    });
    if let Some(s) = too_fast {
        let d = profile.d_crossing - s.x;
        let window_end = s.t + profile.t_react + TIME_SLACK;
        let reacted = samples
            .iter()
            .filter(|r| r.t >= s.t && r.t <= window_end)
            .any(|r| r.a_cmd < 0.0);
        if !reacted {
            findings.push(HazardFinding {
                hazard: HazardId::H1,
                timestamp: s.t,
                detail: format!("no braking within {} s of exceeding the boundary", profile.t_react),
            });
        }
        findings.push(HazardFinding {
            hazard: HazardId::H2,
            timestamp: s.t,
            detail: format!(
                "v = {:.3} m/s exceeds boundary {:.3} m/s at d = {:.3} m",
                s.v,
                v_boundary(profile, d),
                d
            ),
        });
    }

    if let Some(s) = samples.iter().find(|s| s.x > profile.d_crossing && s.v > 0.0) {
        findings.push(HazardFinding {
            hazard: HazardId::H3,
            timestamp: s.t,
            detail: format!("crossing entered at v = {:.3} m/s", s.v),
        });
    }
    findings
}
