//! Runtime half of the capability viewpoint.
//!
//! Metric records are normalised to performance values on `[0, 1]`
//! (1 = nominal, 0 = unavailable), combined per skill with `min`, pushed
//! up the requires-DAG with `min`, and finally classified against the root
//! skill's thresholds.

mod replay;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{GraphError, MetricBinding, MetricKind, Skill, SkillGraph, Thresholds};

pub use replay::{replay, replay_until};

const TIME_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error("unknown skill `{0}`")]
    UnknownSkill(String),
    #[error("record {index}: timestamp {timestamp} precedes {previous}")]
    UnsortedStream {
        index: usize,
        timestamp: f64,
        previous: f64,
    },
    #[error("invalid metric record: {0}")]
    InvalidRecord(String),
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub timestamp: f64,
    pub source: String,
    pub metric: String,
    pub value: f64,
}

impl MetricRecord {
    pub fn new(
        timestamp: f64,
        source: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
    ) -> Result<Self, MonitorError> {
        let rec = Self {
            timestamp,
            source: source.into(),
            metric: metric.into(),
            value,
        };
        if !(rec.timestamp.is_finite() && rec.timestamp >= 0.0) {
            return Err(MonitorError::InvalidRecord(format!("timestamp {timestamp} must be finite and non-negative")));
        }
        if rec.source.is_empty() || rec.metric.is_empty() {
            return Err(MonitorError::InvalidRecord("source and metric must be non-empty".into()));
        }
        Ok(rec)
    }

    /// Heartbeat records carry value 1.0.
    pub fn heartbeat(timestamp: f64, source: impl Into<String>, metric: impl Into<String>) -> Result<Self, MonitorError> {
        Self::new(timestamp, source, metric, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SkillStatus {
    Nominal,
    Degraded,
    Unavailable,
}

impl SkillStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SkillStatus::Nominal => "NOMINAL",
            SkillStatus::Degraded => "DEGRADED",
            SkillStatus::Unavailable => "UNAVAILABLE",
        }
    }
}

impl fmt::Display for SkillStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecisionState {
    Nominal,
    Degraded,
    /// Fall back to the risk-minimal state.
    Rms,
}

impl DecisionState {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionState::Nominal => "NOMINAL",
            DecisionState::Degraded => "DEGRADED",
            DecisionState::Rms => "RMS",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "NOMINAL" => Some(DecisionState::Nominal),
            "DEGRADED" => Some(DecisionState::Degraded),
            "RMS" => Some(DecisionState::Rms),
            _ => None,
        }
    }
}

impl fmt::Display for DecisionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkillState {
    pub skill: String,
    pub own_performance: f64,
    pub aggregated_performance: f64,
    pub status: SkillStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub timestamp: f64,
    pub root: String,
    pub state: DecisionState,
    pub aggregated: f64,
    pub cause: Vec<(String, SkillStatus)>,
}

/// Maps one reading onto `[0, 1]` with a piecewise-linear membership:
/// 1 inside the nominal interval, 0 inside the unavailable interval, and a
/// linear ramp across the gap between them. Readings outside both
/// intervals and not in the gap count as unavailable, as do stale
/// liveness signals.
pub fn normalize(binding: &MetricBinding, value: f64, age: f64) -> f64 {
    if binding.kind.is_liveness() {
        if let Some(timeout) = binding.timeout {
            if age > timeout + TIME_SLACK {
                return 0.0;
            }
        }
    }
    if value.is_nan() {
        return 0.0;
    }
    let (nom, un) = (binding.nominal, binding.unavailable);
    if nom.contains(value) {
        1.0
    } else if un.contains(value) {
        0.0
    } else if nom.hi < value && value < un.lo {
        (1.0 - (value - nom.hi) / (un.lo - nom.hi)).clamp(0.0, 1.0)
    } else if un.hi < value && value < nom.lo {
        ((value - un.hi) / (nom.lo - un.hi)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub value: f64,
    pub timestamp: f64,
    /// When the value last strictly increased; the first record counts.
    pub last_increase: f64,
}

/// Latest record per `(source, metric)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricTable {
    latest: BTreeMap<(String, String), Observation>,
}

impl MetricTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ingest(&mut self, record: &MetricRecord) {
        let key = (record.source.clone(), record.metric.clone());
        let last_increase = match self.latest.get(&key) {
            Some(prev) if !(record.value > prev.value) => prev.last_increase,
            _ => record.timestamp,
        };
        self.latest.insert(
            key,
            Observation {
                value: record.value,
                timestamp: record.timestamp,
                last_increase,
            },
        );
    }

    pub fn get(&self, source: &str, metric: &str) -> Option<&Observation> {
        self.latest.get(&(source.to_string(), metric.to_string()))
    }
}

fn binding_performance(binding: &MetricBinding, table: &MetricTable, now: f64) -> f64 {
    let Some(obs) = table.get(&binding.source, &binding.metric) else {
        return 0.0;
    };
    let since = match binding.kind {
        MetricKind::Counter => obs.last_increase,
        _ => obs.timestamp,
    };
    normalize(binding, obs.value, now - since)
}

/// Minimum over the skill's bindings; a binding never observed counts 0.
pub fn evaluate_leaf(skill: &Skill, table: &MetricTable, now: f64) -> f64 {
    skill
        .metric_bindings
        .iter()
        .map(|b| binding_performance(b, table, now))
        .fold(1.0, f64::min)
}

/// Own performance of any skill: bound skills as for leaves, unbound
/// skills 1.0.
pub fn own_performance(skill: &Skill, table: &MetricTable, now: f64) -> f64 {
    if skill.metric_bindings.is_empty() {
        1.0
    } else {
        evaluate_leaf(skill, table, now)
    }
}

/// `aggregated(s) = min(own(s), aggregated(c) for every child c)`.
/// Skills missing from `own` contribute 1.0.
pub fn propagate(graph: &SkillGraph, own: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let mut aggregated: BTreeMap<String, f64> = BTreeMap::new();
    for id in graph.evaluation_order() {
        let mut value = own.get(id).copied().unwrap_or(1.0).clamp(0.0, 1.0);
        for child in graph.children(id) {
            value = value.min(aggregated[child]);
        }
        aggregated.insert(id.clone(), value);
    }
    aggregated
}

pub fn classify(aggregated: f64, thresholds: Thresholds) -> DecisionState {
    if aggregated >= thresholds.degraded {
        DecisionState::Nominal
    } else if aggregated >= thresholds.unavailable {
        DecisionState::Degraded
    } else {
        DecisionState::Rms
    }
}

pub fn skill_status(aggregated: f64, thresholds: Thresholds) -> SkillStatus {
    match classify(aggregated, thresholds) {
        DecisionState::Nominal => SkillStatus::Nominal,
        DecisionState::Degraded => SkillStatus::Degraded,
        DecisionState::Rms => SkillStatus::Unavailable,
    }
}

/// Per-skill states at time `now`.
pub fn evaluate(graph: &SkillGraph, table: &MetricTable, now: f64) -> BTreeMap<String, SkillState> {
    let own: BTreeMap<String, f64> = graph
        .skills()
        .map(|s| (s.id.clone(), own_performance(s, table, now)))
        .collect();
    let aggregated = propagate(graph, &own);
    graph
        .skills()
        .map(|s| {
            let agg = aggregated[&s.id];
            let state = SkillState {
                skill: s.id.clone(),
                own_performance: own[&s.id],
                aggregated_performance: agg,
                status: skill_status(agg, s.effective_thresholds()),
            };
            (s.id.clone(), state)
        })
        .collect()
}

/// Classifies the root and names the skills responsible: those in the
/// root's closure whose value is below the violated threshold and not
/// explained by an equally low or lower required skill.
pub fn decide(
    graph: &SkillGraph,
    root: &str,
    states: &BTreeMap<String, SkillState>,
    timestamp: f64,
) -> Result<Decision, MonitorError> {
    let skill = graph
        .skill(root)
        .ok_or_else(|| MonitorError::UnknownSkill(root.to_string()))?;
    let root_state = states
        .get(root)
        .ok_or_else(|| MonitorError::UnknownSkill(root.to_string()))?;
    let thresholds = skill.effective_thresholds();
    let aggregated = root_state.aggregated_performance;
    let state = classify(aggregated, thresholds);
    let limit = match state {
        DecisionState::Nominal => None,
        DecisionState::Degraded => Some(thresholds.degraded),
        DecisionState::Rms => Some(thresholds.unavailable),
    };

    let mut cause = Vec::new();
    if let Some(limit) = limit {
        let value = |id: &str| states.get(id).map_or(0.0, |s| s.aggregated_performance);
        let mut closure = graph.descendants(root);
        closure.insert(root.to_string());
        for id in &closure {
            let v = value(id);
            if v >= limit {
                continue;
            }
            let explained = graph.descendants(id).iter().any(|d| value(d) <= v);
            if !explained {
                let status = states.get(id.as_str()).map_or(SkillStatus::Unavailable, |s| s.status);
                cause.push((id.clone(), status));
            }
        }
    }
    Ok(Decision {
        timestamp,
        root: root.to_string(),
        state,
        aggregated,
        cause,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interval;

    fn scalar(nominal: (f64, f64), unavailable: (f64, f64)) -> MetricBinding {
        MetricBinding {
            source: "ctl".into(),
            metric: "dev".into(),
            kind: MetricKind::Scalar,
            nominal: Interval::new(nominal.0, nominal.1),
            unavailable: Interval::new(unavailable.0, unavailable.1),
            timeout: None,
        }
    }

    fn heartbeat(source: &str, timeout: f64) -> MetricBinding {
        MetricBinding {
            source: source.into(),
            metric: "hb".into(),
            kind: MetricKind::Heartbeat,
            nominal: Interval::new(1.0, 1.0),
            unavailable: Interval::new(0.0, 0.0),
            timeout: Some(timeout),
        }
    }

    #[test]
    fn normalize_scalar_bands() {
        let b = scalar((0.0, 0.1), (0.5, f64::INFINITY));
        assert_eq!(normalize(&b, 0.05, 0.0), 1.0);
        assert!((normalize(&b, 0.3, 0.0) - 0.5).abs() < 1e-12);
        assert_eq!(normalize(&b, 0.7, 0.0), 0.0);
        assert_eq!(normalize(&b, 0.5, 0.0), 0.0);
        assert_eq!(normalize(&b, 0.1, 0.0), 1.0);
        // scalar readings never go stale
        assert_eq!(normalize(&b, 0.05, 1e6), 1.0);
        assert_eq!(normalize(&b, f64::NAN, 0.0), 0.0);
        assert_eq!(normalize(&b, -1.0, 0.0), 0.0);
    }

    #[test]
    fn normalize_unavailable_below_nominal() {
        let b = scalar((0.6, 1.5), (0.0, 0.2));
        assert!((normalize(&b, 0.4, 0.0) - 0.5).abs() < 1e-12);
        assert_eq!(normalize(&b, 0.1, 0.0), 0.0);
        assert_eq!(normalize(&b, 0.9, 0.0), 1.0);
    }

    #[test]
    fn stale_heartbeat() {
        let b = heartbeat("cam", 0.5);
        assert_eq!(normalize(&b, 1.0, 0.6), 0.0);
        assert_eq!(normalize(&b, 1.0, 0.5), 1.0);
        assert_eq!(normalize(&b, 1.0, 0.1), 1.0);
    }

    #[test]
    fn leaf_is_min_over_bindings_and_missing_is_zero() {
        let mut table = MetricTable::new();
        table.ingest(&MetricRecord::heartbeat(0.0, "cam", "hb").unwrap());
        table.ingest(&MetricRecord::new(0.0, "ctl", "dev", 0.34).unwrap());
        let one = Skill::new("S").with_binding(heartbeat("cam", 0.5));
        assert_eq!(evaluate_leaf(&one, &table, 0.1), 1.0);

        let two = one.clone().with_binding(scalar((0.0, 0.1), (0.5, f64::INFINITY)));
        assert!((evaluate_leaf(&two, &table, 0.1) - 0.4).abs() < 1e-12);

        let unseen = Skill::new("U").with_binding(heartbeat("lidar", 0.5));
        assert_eq!(evaluate_leaf(&unseen, &table, 0.1), 0.0);
    }

    #[test]
    fn counter_must_keep_increasing() {
        let mut b = heartbeat("bus", 0.5);
        b.kind = MetricKind::Counter;
        b.metric = "seq".into();
        b.nominal = Interval::new(1.0, f64::INFINITY);
        b.unavailable = Interval::new(f64::NEG_INFINITY, 0.0);
        let skill = Skill::new("C").with_binding(b);
        let mut table = MetricTable::new();
        for (t, v) in [(0.0, 1.0), (0.2, 2.0), (0.4, 3.0), (0.6, 3.0), (0.8, 3.0), (1.0, 3.0)] {
            table.ingest(&MetricRecord::new(t, "bus", "seq", v).unwrap());
            let perf = evaluate_leaf(&skill, &table, t);
            // last increase at 0.4; stale once more than 0.5 s passes
            assert_eq!(perf, if t > 0.9 { 0.0 } else { 1.0 }, "t = {t}");
        }
    }

    #[test]
    fn propagate_chain_and_diamond() {
        let chain = SkillGraph::new([Skill::new("A").requiring(["B"]), Skill::new("B")]).unwrap();
        let own = BTreeMap::from([("A".to_string(), 1.0), ("B".to_string(), 0.3)]);
        assert_eq!(propagate(&chain, &own)["A"], 0.3);

        let diamond = SkillGraph::new([
            Skill::new("A").requiring(["B", "C"]),
            Skill::new("B").requiring(["D"]),
            Skill::new("C").requiring(["D"]),
            Skill::new("D"),
        ])
        .unwrap();
        let own = BTreeMap::from([("D".to_string(), 0.7)]);
        let agg = propagate(&diamond, &own);
        assert_eq!(agg["A"], 0.7);
        assert_eq!(agg["B"], 0.7);
    }

    #[test]
    fn classify_bands() {
        let t = Thresholds::new(0.8, 0.3);
        assert_eq!(classify(1.0, t), DecisionState::Nominal);
        assert_eq!(classify(0.8, t), DecisionState::Nominal);
        assert_eq!(classify(0.5, t), DecisionState::Degraded);
        assert_eq!(classify(0.3, t), DecisionState::Degraded);
        assert_eq!(classify(0.2, t), DecisionState::Rms);
    }

    fn graph() -> SkillGraph {
        SkillGraph::new([
            Skill::new("Approach")
                .requiring(["Perceive", "Brake"])
                .with_thresholds(Thresholds::new(0.8, 0.3)),
            Skill::new("Perceive").requiring(["PerceivePedestrians", "Range"]),
            Skill::new("PerceivePedestrians").with_binding(heartbeat("ped", 0.5)),
            Skill::new("Range").with_binding(scalar((40.0, f64::INFINITY), (0.0, 10.0))),
            Skill::new("Brake").with_binding(heartbeat("brake", 0.5)),
        ])
        .unwrap()
    }

    #[test]
    fn decision_names_the_stale_leaf() {
        let g = graph();
        let mut table = MetricTable::new();
        table.ingest(&MetricRecord::heartbeat(0.0, "ped", "hb").unwrap());
        table.ingest(&MetricRecord::heartbeat(1.0, "brake", "hb").unwrap());
        table.ingest(&MetricRecord::new(1.0, "ctl", "dev", 0.0).unwrap());
        // Range binding reads ctl.dev = 0.0 -> unavailable too; rebind
        let mut range_table = table.clone();
        range_table.ingest(&MetricRecord::new(1.0, "ctl", "dev", 80.0).unwrap());

        let states = evaluate(&g, &range_table, 1.0);
        let d = decide(&g, "Approach", &states, 1.0).unwrap();
        assert_eq!(d.state, DecisionState::Rms);
        assert_eq!(d.aggregated, 0.0);
        assert_eq!(d.cause, vec![("PerceivePedestrians".to_string(), SkillStatus::Unavailable)]);
    }

    #[test]
    fn degraded_cause_lists_each_minimal_skill() {
        let g = graph();
        let mut table = MetricTable::new();
        table.ingest(&MetricRecord::heartbeat(0.9, "ped", "hb").unwrap());
        table.ingest(&MetricRecord::heartbeat(0.9, "brake", "hb").unwrap());
        table.ingest(&MetricRecord::new(0.9, "ctl", "dev", 25.0).unwrap());
        let states = evaluate(&g, &table, 1.0);
        let d = decide(&g, "Approach", &states, 1.0).unwrap();
        assert_eq!(d.state, DecisionState::Degraded);
        assert!((d.aggregated - 0.5).abs() < 1e-12);
        assert_eq!(d.cause, vec![("Range".to_string(), SkillStatus::Degraded)]);
    }

    #[test]
    fn nominal_decision_has_no_cause() {
        let g = SkillGraph::new([Skill::new("S").with_binding(heartbeat("x", 0.5))]).unwrap();
        let mut table = MetricTable::new();
        table.ingest(&MetricRecord::heartbeat(0.0, "x", "hb").unwrap());
        let d = decide(&g, "S", &evaluate(&g, &table, 0.2), 0.2).unwrap();
        assert_eq!(d.state, DecisionState::Nominal);
        assert!(d.cause.is_empty());
    }

    #[test]
    fn unknown_root() {
        let g = graph();
        let states = evaluate(&g, &MetricTable::new(), 0.0);
        assert_eq!(decide(&g, "Fly", &states, 0.0), Err(MonitorError::UnknownSkill("Fly".into())));
    }

    #[test]
    fn record_invariants() {
        assert!(MetricRecord::new(f64::NAN, "a", "b", 1.0).is_err());
        assert!(MetricRecord::new(-1.0, "a", "b", 1.0).is_err());
        assert!(MetricRecord::new(0.0, "", "b", 1.0).is_err());
    }
}
