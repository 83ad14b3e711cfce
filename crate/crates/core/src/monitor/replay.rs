use crate::model::{ArchitectureModel, SkillGraph};

use super::{decide, evaluate, Decision, MetricRecord, MetricTable, MonitorError};

const BOUNDARY_SLACK: f64 = 1e-9;

/// Replays `stream` through the monitor, deciding at every multiple of
/// `step` up to the last record's timestamp.
pub fn replay(
    model: &ArchitectureModel,
    root: &str,
    stream: &[MetricRecord],
    step: f64,
) -> Result<Vec<Decision>, MonitorError> {
    let horizon = stream.last().map_or(0.0, |r| r.timestamp);
    replay_until(model, root, stream, step, horizon)
}

/// As [`replay`], deciding at `step, 2*step, ...` while `<= horizon`.
/// Records stamped at or before a boundary are visible at it; among
/// records with equal timestamps the later one wins.
pub fn replay_until(
    model: &ArchitectureModel,
    root: &str,
    stream: &[MetricRecord],
    step: f64,
    horizon: f64,
) -> Result<Vec<Decision>, MonitorError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(MonitorError::InvalidStep(step));
    }
    for (index, pair) in stream.windows(2).enumerate() {
        if pair[1].timestamp < pair[0].timestamp {
            return Err(MonitorError::UnsortedStream {
                index: index + 1,
                timestamp: pair[1].timestamp,
                previous: pair[0].timestamp,
            });
        }
    }
    let viewpoint = model
        .capability_viewpoint_of(root)
        .ok_or_else(|| MonitorError::UnknownSkill(root.to_string()))?;
    let graph = SkillGraph::from_viewpoint(viewpoint)?;

    let boundaries = ((horizon / step) + BOUNDARY_SLACK).floor().max(0.0) as usize;
    let mut table = MetricTable::new();
    let mut pending = stream.iter().peekable();
    let mut decisions = Vec::with_capacity(boundaries);
    for k in 1..=boundaries {
        let now = k as f64 * step;
        while let Some(record) = pending.next_if(|r| r.timestamp <= now + BOUNDARY_SLACK) {
            table.ingest(record);
        }
        let states = evaluate(&graph, &table, now);
        decisions.push(decide(&graph, root, &states, now)?);
    }
    Ok(decisions)
}
