//! In-memory architecture model: viewpoints, skills, requirements,
//! correspondences and scenario parameter blocks.
//!
//! Models are plain data. The parser keeps whatever it reads (including
//! duplicate ids and dangling references); [`validate`] reports the
//! structural problems afterwards.

mod graph;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use graph::{topological_order, CycleError, GraphError, SkillGraph};
pub use validate::{validate, ValidationReport, Violation, ViolationCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViewpointKind {
    Functional,
    Capability,
    Software,
    Hardware,
}

impl ViewpointKind {
    pub const ALL: [ViewpointKind; 4] = [
        ViewpointKind::Functional,
        ViewpointKind::Capability,
        ViewpointKind::Software,
        ViewpointKind::Hardware,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ViewpointKind::Functional => "functional",
            ViewpointKind::Capability => "capability",
            ViewpointKind::Software => "software",
            ViewpointKind::Hardware => "hardware",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for ViewpointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A plain (non-skill) element of a viewpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Element {
    pub id: String,
}

impl Element {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub label: Option<String>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKind {
    Heartbeat,
    Counter,
    Scalar,
}

impl MetricKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MetricKind::Heartbeat => "heartbeat",
            MetricKind::Counter => "counter",
            MetricKind::Scalar => "scalar",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "heartbeat" => Some(MetricKind::Heartbeat),
            "counter" => Some(MetricKind::Counter),
            "scalar" => Some(MetricKind::Scalar),
            _ => None,
        }
    }

    /// Heartbeats and counters are liveness signals and go stale.
    pub fn is_liveness(self) -> bool {
        matches!(self, MetricKind::Heartbeat | MetricKind::Counter)
    }
}

/// Closed real interval `[lo, hi]`; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }

    pub fn is_well_formed(&self) -> bool {
        !self.lo.is_nan() && !self.hi.is_nan() && self.lo <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Binds a skill to one quality measure published by a component.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBinding {
    pub source: String,
    pub metric: String,
    pub kind: MetricKind,
    pub nominal: Interval,
    pub unavailable: Interval,
    /// Staleness limit in seconds; heartbeat and counter bindings only.
    pub timeout: Option<f64>,
}

impl MetricBinding {
    pub fn key(&self) -> (&str, &str) {
        (&self.source, &self.metric)
    }
}

/// Performance thresholds on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub degraded: f64,
    pub unavailable: f64,
}

impl Thresholds {
    pub fn new(degraded: f64, unavailable: f64) -> Self {
        Self {
            degraded,
            unavailable,
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.degraded > 0.0
            && self.degraded <= 1.0
            && self.unavailable >= 0.0
            && self.unavailable < 1.0
            && self.unavailable < self.degraded
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::new(0.8, 0.3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skill {
    pub id: String,
    pub description: String,
    /// Children this skill requires (edges point abstract -> concrete).
    pub requires: BTreeSet<String>,
    pub thresholds: Option<Thresholds>,
    pub metric_bindings: Vec<MetricBinding>,
}

impl Skill {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            description: String::new(),
            requires: BTreeSet::new(),
            thresholds: None,
            metric_bindings: Vec::new(),
        }
    }

    pub fn requiring<I, S>(mut self, children: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.requires.extend(children.into_iter().map(Into::into));
        self
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = Some(thresholds);
        self
    }

    pub fn with_binding(mut self, binding: MetricBinding) -> Self {
        self.metric_bindings.push(binding);
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.requires.is_empty()
    }

    pub fn effective_thresholds(&self) -> Thresholds {
        self.thresholds.unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Viewpoint {
    pub id: String,
    pub kind: ViewpointKind,
    pub nodes: Vec<Element>,
    pub skills: Vec<Skill>,
    pub edges: BTreeSet<Edge>,
}

impl Viewpoint {
    pub fn new(kind: ViewpointKind, id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind,
            nodes: Vec::new(),
            skills: Vec::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn with_node(mut self, id: impl Into<String>) -> Self {
        self.nodes.push(Element::new(id));
        self
    }

    pub fn with_skill(mut self, skill: Skill) -> Self {
        self.skills.push(skill);
        self
    }

    pub fn with_edge(mut self, edge: Edge) -> Self {
        self.edges.insert(edge);
        self
    }

    /// Ids of all elements: plain nodes followed by skills, in declaration
    /// order.
    pub fn element_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .map(|n| n.id.as_str())
            .chain(self.skills.iter().map(|s| s.id.as_str()))
    }

    pub fn has_element(&self, id: &str) -> bool {
        self.element_ids().any(|e| e == id)
    }

    pub fn skill(&self, id: &str) -> Option<&Skill> {
        self.skills.iter().find(|s| s.id == id)
    }
}

/// `(viewpoint id, element id)`, ordered viewpoint first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementRef {
    pub viewpoint: String,
    pub element: String,
}

impl ElementRef {
    pub fn new(viewpoint: impl Into<String>, element: impl Into<String>) -> Self {
        Self {
            viewpoint: viewpoint.into(),
            element: element.into(),
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.viewpoint, self.element)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RequirementKind {
    SafetyGoal,
    Hazard,
    RiskMinimalState,
    Functional,
}

impl RequirementKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RequirementKind::SafetyGoal => "safety_goal",
            RequirementKind::Hazard => "hazard",
            RequirementKind::RiskMinimalState => "rms",
            RequirementKind::Functional => "functional",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "safety_goal" => Some(RequirementKind::SafetyGoal),
            "hazard" => Some(RequirementKind::Hazard),
            "rms" => Some(RequirementKind::RiskMinimalState),
            "functional" => Some(RequirementKind::Functional),
            _ => None,
        }
    }
}

impl fmt::Display for RequirementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Requirement {
    pub id: String,
    pub kind: RequirementKind,
    pub text: String,
    pub anchors: BTreeSet<ElementRef>,
}

impl Requirement {
    pub fn new(id: impl Into<String>, kind: RequirementKind, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind,
            text: text.into(),
            anchors: BTreeSet::new(),
        }
    }

    pub fn anchored(mut self, viewpoint: &str, element: &str) -> Self {
        self.anchors.insert(ElementRef::new(viewpoint, element));
        self
    }
}

/// Named n:m mapping between the elements of two viewpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    pub id: String,
    pub from_viewpoint: String,
    pub to_viewpoint: String,
    pub pairs: BTreeSet<(String, String)>,
}

impl Correspondence {
    pub fn new(id: impl Into<String>, from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            from_viewpoint: from.into(),
            to_viewpoint: to.into(),
            pairs: BTreeSet::new(),
        }
    }

    pub fn with_pair(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.pairs.insert((from.into(), to.into()));
        self
    }
}

/// Keys accepted inside a `scenario` block, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKey {
    VInit,
    DCrossing,
    AMax,
    Mu,
    TReact,
    DDetect,
    VanOffsetLat,
    VanLength,
    PedLat,
    G,
}

impl ScenarioKey {
    pub const ALL: [ScenarioKey; 10] = [
        ScenarioKey::VInit,
        ScenarioKey::DCrossing,
        ScenarioKey::AMax,
        ScenarioKey::Mu,
        ScenarioKey::TReact,
        ScenarioKey::DDetect,
        ScenarioKey::VanOffsetLat,
        ScenarioKey::VanLength,
        ScenarioKey::PedLat,
        ScenarioKey::G,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKey::VInit => "v_init",
            ScenarioKey::DCrossing => "d_crossing",
            ScenarioKey::AMax => "a_max",
            ScenarioKey::Mu => "mu",
            ScenarioKey::TReact => "t_react",
            ScenarioKey::DDetect => "d_detect",
            ScenarioKey::VanOffsetLat => "van_offset_lat",
            ScenarioKey::VanLength => "van_length",
            ScenarioKey::PedLat => "ped_lat",
            ScenarioKey::G => "g",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ScenarioKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw scenario block as declared; see [`crate::scenario::ScenarioProfile`]
/// for the checked, typed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub params: BTreeMap<ScenarioKey, f64>,
}

impl Scenario {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: ScenarioKey, value: f64) -> Self {
        self.params.insert(key, value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArchitectureModel {
    pub viewpoints: Vec<Viewpoint>,
    pub correspondences: Vec<Correspondence>,
    pub requirements: Vec<Requirement>,
    pub scenarios: Vec<Scenario>,
}

impl ArchitectureModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn viewpoint(&self, id: &str) -> Option<&Viewpoint> {
        self.viewpoints.iter().find(|v| v.id == id)
    }

    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        self.requirements.iter().find(|r| r.id == id)
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn resolves(&self, element: &ElementRef) -> bool {
        self.viewpoint(&element.viewpoint)
            .is_some_and(|vp| vp.has_element(&element.element))
    }

    /// The capability viewpoint declaring `skill`, if any.
    pub fn capability_viewpoint_of(&self, skill: &str) -> Option<&Viewpoint> {
        self.viewpoints
            .iter()
            .filter(|v| v.kind == ViewpointKind::Capability)
            .find(|v| v.skill(skill).is_some())
    }

    pub fn capability_viewpoints(&self) -> impl Iterator<Item = &Viewpoint> {
        self.viewpoints
            .iter()
            .filter(|v| v.kind == ViewpointKind::Capability)
    }

    /// Canonical form: blocks sorted by (block kind, id), and elements
    /// within a viewpoint sorted by id. Sorting is stable, so duplicates
    /// survive in declaration order.
    pub fn canonical(&self) -> ArchitectureModel {
        let mut model = self.clone();
        model
            .viewpoints
            .sort_by(|a, b| a.id.cmp(&b.id).then(a.kind.cmp(&b.kind)));
        for vp in &mut model.viewpoints {
            vp.nodes.sort_by(|a, b| a.id.cmp(&b.id));
            vp.skills.sort_by(|a, b| a.id.cmp(&b.id));
        }
        model.correspondences.sort_by(|a, b| a.id.cmp(&b.id));
        model.requirements.sort_by(|a, b| a.id.cmp(&b.id));
        model.scenarios.sort_by(|a, b| a.id.cmp(&b.id));
        model
    }

    pub fn element_count(&self) -> usize {
        self.viewpoints
            .iter()
            .map(|v| v.nodes.len() + v.skills.len())
            .sum()
    }
}
