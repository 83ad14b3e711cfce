//! Structural validation. Violations are data: the report lists every
//! broken invariant with a stable code and a human-readable location.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{ArchitectureModel, MetricBinding, Skill, Viewpoint, ViewpointKind};
use crate::scenario::ScenarioProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    Cycle,
    DanglingEdge,
    DuplicateId,
    BadThresholds,
    UnanchoredRequirement,
    UnboundLeaf,
    BadBinding,
    MisplacedSkill,
    DanglingCorrespondence,
    BadScenario,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::Cycle => "E_CYCLE",
            ViolationCode::DanglingEdge => "E_DANGLING_EDGE",
            ViolationCode::DuplicateId => "E_DUP_ID",
            ViolationCode::BadThresholds => "E_BAD_THRESHOLDS",
            ViolationCode::UnanchoredRequirement => "E_UNANCHORED_REQ",
            ViolationCode::UnboundLeaf => "E_UNBOUND_LEAF",
            ViolationCode::BadBinding => "E_BAD_BINDING",
            ViolationCode::MisplacedSkill => "E_MISPLACED_SKILL",
            ViolationCode::DanglingCorrespondence => "E_DANGLING_CORRESPONDENCE",
            ViolationCode::BadScenario => "E_BAD_SCENARIO",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub code: ViolationCode,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn codes(&self) -> BTreeSet<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        let n = self.violations.len();
        write!(f, "{n} violation{}", if n == 1 { "" } else { "s" })
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, code: ViolationCode, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            code,
            location: location.into(),
            message: message.into(),
        });
    }
}

fn duplicates<'a>(ids: impl Iterator<Item = &'a str>) -> BTreeSet<&'a str> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for id in ids {
        *counts.entry(id).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(id, _)| id)
        .collect()
}

pub fn validate(model: &ArchitectureModel) -> ValidationReport {
    let mut out = Collector(Vec::new());

    for id in duplicates(model.viewpoints.iter().map(|v| v.id.as_str())) {
        out.push(ViolationCode::DuplicateId, format!("viewpoint {id}"), "viewpoint id declared more than once");
    }
    for id in duplicates(model.correspondences.iter().map(|c| c.id.as_str())) {
        out.push(ViolationCode::DuplicateId, format!("correspondence {id}"), "correspondence id declared more than once");
    }
    for id in duplicates(model.requirements.iter().map(|r| r.id.as_str())) {
        out.push(ViolationCode::DuplicateId, format!("requirement {id}"), "requirement id declared more than once");
    }
    for id in duplicates(model.scenarios.iter().map(|s| s.id.as_str())) {
        out.push(ViolationCode::DuplicateId, format!("scenario {id}"), "scenario id declared more than once");
    }

    for vp in &model.viewpoints {
        check_viewpoint(vp, &mut out);
    }

    for corr in &model.correspondences {
        let loc = format!("correspondence {}", corr.id);
        let from = model.viewpoint(&corr.from_viewpoint);
        let to = model.viewpoint(&corr.to_viewpoint);
        if from.is_none() {
            out.push(ViolationCode::DanglingCorrespondence, &loc, format!("unknown viewpoint `{}`", corr.from_viewpoint));
        }
        if to.is_none() {
            out.push(ViolationCode::DanglingCorrespondence, &loc, format!("unknown viewpoint `{}`", corr.to_viewpoint));
        }
        for (a, b) in &corr.pairs {
            if let Some(vp) = from {
                if !vp.has_element(a) {
                    out.push(ViolationCode::DanglingCorrespondence, &loc, format!("`{a}` is not an element of `{}`", vp.id));
                }
            }
            if let Some(vp) = to {
                if !vp.has_element(b) {
                    out.push(ViolationCode::DanglingCorrespondence, &loc, format!("`{b}` is not an element of `{}`", vp.id));
                }
            }
        }
    }

    for req in &model.requirements {
        let loc = format!("requirement {}", req.id);
        if req.anchors.is_empty() {
            out.push(ViolationCode::UnanchoredRequirement, &loc, "requirement has no anchors");
        }
        for anchor in &req.anchors {
            if !model.resolves(anchor) {
                out.push(ViolationCode::UnanchoredRequirement, &loc, format!("anchor `{anchor}` does not resolve"));
            }
        }
    }

    for scenario in &model.scenarios {
        if let Err(e) = ScenarioProfile::from_scenario(scenario) {
            out.push(ViolationCode::BadScenario, format!("scenario {}", scenario.id), e.to_string());
        }
    }

    let mut violations = out.0;
    violations.sort();
    violations.dedup();
    ValidationReport { violations }
}

fn check_viewpoint(vp: &Viewpoint, out: &mut Collector) {
    let loc = format!("viewpoint {}", vp.id);
    for id in duplicates(vp.element_ids()) {
        out.push(ViolationCode::DuplicateId, &loc, format!("element `{id}` declared more than once"));
    }
    for edge in &vp.edges {
        for end in [&edge.source, &edge.target] {
            if !vp.has_element(end) {
                out.push(
                    ViolationCode::DanglingEdge,
                    &loc,
                    format!("edge {} -> {} names unknown element `{end}`", edge.source, edge.target),
                );
            }
        }
    }
    if vp.kind != ViewpointKind::Capability {
        for skill in &vp.skills {
            out.push(
                ViolationCode::MisplacedSkill,
                format!("{loc}, skill {}", skill.id),
                format!("skills belong in capability viewpoints, not {}", vp.kind),
            );
        }
    }
    let skill_ids: BTreeSet<&str> = vp.skills.iter().map(|s| s.id.as_str()).collect();
    for skill in &vp.skills {
        check_skill(&loc, skill, &skill_ids, out);
    }
    check_cycles(&loc, vp, out);
}

fn check_skill(loc: &str, skill: &Skill, skill_ids: &BTreeSet<&str>, out: &mut Collector) {
    let loc = format!("{loc}, skill {}", skill.id);
    for child in &skill.requires {
        if !skill_ids.contains(child.as_str()) {
            out.push(ViolationCode::DanglingEdge, &loc, format!("requires unknown skill `{child}`"));
        }
    }
    if let Some(t) = skill.thresholds {
        if !t.is_well_formed() {
            out.push(
                ViolationCode::BadThresholds,
                &loc,
                format!(
                    "need 0 <= unavailable < degraded <= 1, degraded > 0; got degraded {} unavailable {}",
                    t.degraded, t.unavailable
                ),
            );
        }
    }
    if skill.is_leaf() && skill.metric_bindings.is_empty() {
        out.push(ViolationCode::UnboundLeaf, &loc, "leaf skill has no metric binding");
    }
    for binding in &skill.metric_bindings {
        if let Some(problem) = binding_problem(binding) {
            out.push(
                ViolationCode::BadBinding,
                &loc,
                format!("metric {}.{}: {problem}", binding.source, binding.metric),
            );
        }
    }
}

fn binding_problem(b: &MetricBinding) -> Option<String> {
    if b.source.is_empty() || b.metric.is_empty() {
        return Some("source and metric must be non-empty".into());
    }
    if !b.nominal.is_well_formed() || !b.unavailable.is_well_formed() {
        return Some("interval bounds must be ordered".into());
    }
    if b.nominal.intersects(&b.unavailable) {
        return Some("nominal and unavailable intervals overlap".into());
    }
    match (b.kind.is_liveness(), b.timeout) {
        (true, None) => Some(format!("{} binding needs a timeout", b.kind.keyword())),
        (true, Some(t)) if !(t > 0.0 && t.is_finite()) => Some(format!("timeout must be positive, got {t}")),
        (false, Some(_)) => Some("scalar bindings take no timeout".into()),
        _ => None,
    }
}

fn check_cycles(loc: &str, vp: &Viewpoint, out: &mut Collector) {
    let mut graph = DiGraph::<&str, ()>::new();
    let mut index = BTreeMap::new();
    for skill in &vp.skills {
        index.entry(skill.id.as_str()).or_insert_with(|| graph.add_node(skill.id.as_str()));
    }
    for skill in &vp.skills {
        let from = index[skill.id.as_str()];
        for child in &skill.requires {
            if let Some(&to) = index.get(child.as_str()) {
                graph.update_edge(from, to, ());
            }
        }
    }
    for component in tarjan_scc(&graph) {
        let cyclic = component.len() > 1
            || graph.contains_edge(component[0], component[0]);
        if cyclic {
            let mut members: Vec<&str> = component.iter().map(|&n| graph[n]).collect();
            members.sort_unstable();
            out.push(
                ViolationCode::Cycle,
                loc,
                format!("requires cycle through {}", members.join(", ")),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;

    fn hb(source: &str) -> MetricBinding {
        MetricBinding {
            source: source.into(),
            metric: "hb".into(),
            kind: MetricKind::Heartbeat,
            nominal: Interval::new(1.0, 1.0),
            unavailable: Interval::new(0.0, 0.0),
            timeout: Some(0.5),
        }
    }

    fn three_node_model() -> ArchitectureModel {
        ArchitectureModel {
            viewpoints: vec![Viewpoint::new(ViewpointKind::Functional, "f")
                .with_node("A")
                .with_node("B")
                .with_node("C")
                .with_edge(Edge::new("A", "B"))
                .with_edge(Edge::new("B", "C"))],
            ..Default::default()
        }
    }

    #[test]
    fn empty_model_is_clean() {
        assert!(validate(&ArchitectureModel::new()).is_clean());
    }

    #[test]
    fn two_skill_cycle() {
        let model = ArchitectureModel {
            viewpoints: vec![Viewpoint::new(ViewpointKind::Capability, "cap")
                .with_skill(Skill::new("A").requiring(["B"]).with_binding(hb("a")))
                .with_skill(Skill::new("B").requiring(["A"]).with_binding(hb("b")))],
            ..Default::default()
        };
        let report = validate(&model);
        assert!(report.has(ViolationCode::Cycle), "{report}");
        assert_eq!(report.len(), 1);
    }

    #[test]
    fn self_requirement_is_a_cycle() {
        let model = ArchitectureModel {
            viewpoints: vec![Viewpoint::new(ViewpointKind::Capability, "cap")
                .with_skill(Skill::new("A").requiring(["A"]).with_binding(hb("a")))],
            ..Default::default()
        };
        assert!(validate(&model).has(ViolationCode::Cycle));
    }

    #[test]
    fn deleting_a_node_leaves_a_dangling_edge() {
        let model = three_node_model();
        assert!(validate(&model).is_clean());
        let mut broken = model.clone();
        broken.viewpoints[0].nodes.retain(|n| n.id != "C");
        let report = validate(&broken);
        assert_eq!(report.codes(), BTreeSet::from([ViolationCode::DanglingEdge]));
        assert_eq!(report.len(), 1);
    }

    #[test]
    fn duplicate_element_across_nodes_and_skills() {
        let model = ArchitectureModel {
            viewpoints: vec![Viewpoint::new(ViewpointKind::Capability, "cap")
                .with_node("X")
                .with_skill(Skill::new("X").with_binding(hb("x")))],
            ..Default::default()
        };
        assert!(validate(&model).has(ViolationCode::DuplicateId));
    }

    #[test]
    fn threshold_rules() {
        for (t, ok) in [
            (Thresholds::new(0.8, 0.3), true),
            (Thresholds::new(1.0, 0.0), true),
            (Thresholds::new(0.3, 0.3), false),
            (Thresholds::new(0.0, 0.0), false),
            (Thresholds::new(1.2, 0.3), false),
            (Thresholds::new(0.8, -0.1), false),
        ] {
            let model = ArchitectureModel {
                viewpoints: vec![Viewpoint::new(ViewpointKind::Capability, "cap")
                    .with_skill(Skill::new("A").with_thresholds(t).with_binding(hb("a")))],
                ..Default::default()
            };
            assert_eq!(!validate(&model).has(ViolationCode::BadThresholds), ok, "{t:?}");
        }
    }

    #[test]
    fn leaf_without_binding_and_bad_bindings() {
        let mut overlapping = hb("a");
        overlapping.unavailable = Interval::new(0.5, 2.0);
        let mut no_timeout = hb("b");
        no_timeout.timeout = None;
        let model = ArchitectureModel {
            viewpoints: vec![Viewpoint::new(ViewpointKind::Capability, "cap")
                .with_skill(Skill::new("Root").requiring(["L1", "L2", "L3"]))
                .with_skill(Skill::new("L1"))
                .with_skill(Skill::new("L2").with_binding(overlapping))
                .with_skill(Skill::new("L3").with_binding(no_timeout))],
            ..Default::default()
        };
        let report = validate(&model);
        let unbound: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.code == ViolationCode::UnboundLeaf)
            .collect();
        assert_eq!(unbound.len(), 1);
        assert!(unbound[0].location.ends_with("skill L1"));
        assert_eq!(
            report.violations.iter().filter(|v| v.code == ViolationCode::BadBinding).count(),
            2
        );
    }

    #[test]
    fn requirement_anchors_must_resolve() {
        let mut model = three_node_model();
        model.requirements.push(
            Requirement::new("R", RequirementKind::Functional, "x")
                .anchored("f", "A")
                .anchored("f", "Missing"),
        );
        model.requirements.push(Requirement::new("Empty", RequirementKind::Hazard, "y"));
        let report = validate(&model);
        assert_eq!(
            report.violations.iter().filter(|v| v.code == ViolationCode::UnanchoredRequirement).count(),
            2
        );
    }

    #[test]
    fn correspondence_endpoints_must_resolve() {
        let mut model = three_node_model();
        model.viewpoints.push(Viewpoint::new(ViewpointKind::Software, "s").with_node("S1"));
        model.correspondences.push(
            Correspondence::new("m", "f", "s")
                .with_pair("A", "S1")
                .with_pair("B", "S1")
                .with_pair("Q", "S1"),
        );
        model.correspondences.push(Correspondence::new("n", "f", "nowhere"));
        let report = validate(&model);
        let msgs: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.code == ViolationCode::DanglingCorrespondence)
            .map(|v| v.message.as_str())
            .collect();
        assert_eq!(msgs.len(), 2, "{report}");
    }

    #[test]
    fn skills_outside_capability_viewpoint() {
        let model = ArchitectureModel {
            viewpoints: vec![Viewpoint::new(ViewpointKind::Software, "s")
                .with_skill(Skill::new("A").with_binding(hb("a")))],
            ..Default::default()
        };
        assert!(validate(&model).has(ViolationCode::MisplacedSkill));
    }

    #[test]
    fn validation_is_deterministic() {
        let model = ArchitectureModel {
            viewpoints: vec![
                Viewpoint::new(ViewpointKind::Capability, "cap")
                    .with_skill(Skill::new("B").requiring(["A", "Z"]))
                    .with_skill(Skill::new("A").requiring(["B"])),
                Viewpoint::new(ViewpointKind::Functional, "cap"),
            ],
            ..Default::default()
        };
        let a = validate(&model);
        let b = validate(&model.clone());
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
        assert!(a.has(ViolationCode::Cycle) && a.has(ViolationCode::DanglingEdge) && a.has(ViolationCode::DuplicateId));
    }
}
