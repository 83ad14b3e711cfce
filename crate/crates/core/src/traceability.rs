//! Coverage and impact queries over viewpoint correspondences.
//!
//! Impact follows correspondence pairs in both directions and requires
//! edges upwards only (a failing concrete skill drags down every skill
//! that requires it, never the other way round). Plain viewpoint edges
//! are not followed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{ArchitectureModel, ElementRef, RequirementKind, ViewpointKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("unknown element `{0}`")]
    UnknownElement(ElementRef),
    #[error("unknown requirement `{0}`")]
    UnknownRequirement(String),
}

/// How an element was reached from its predecessor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Link {
    /// A pair of the named correspondence.
    Correspondence(String),
    /// The predecessor is required by this element.
    RequiredBy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactSet {
    pub origin: ElementRef,
    /// Includes the origin.
    pub affected: BTreeSet<ElementRef>,
    /// Breadth-first predecessor of every affected element except the
    /// origin.
    parents: BTreeMap<ElementRef, (ElementRef, Link)>,
}

impl ImpactSet {
    pub fn contains(&self, element: &ElementRef) -> bool {
        self.affected.contains(element)
    }

    pub fn len(&self) -> usize {
        self.affected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.affected.is_empty()
    }

    /// A shortest chain from the origin to `target`, inclusive of both.
    pub fn path_to(&self, target: &ElementRef) -> Option<Vec<(ElementRef, Option<Link>)>> {
        if !self.affected.contains(target) {
            return None;
        }
        // each entry carries the link that led to it
        let mut chain = Vec::new();
        let mut cur = target.clone();
        while let Some((prev, link)) = self.parents.get(&cur) {
            chain.push((cur, Some(link.clone())));
            cur = prev.clone();
        }
        chain.push((cur, None));
        chain.reverse();
        Some(chain)
    }
}

/// Neighbour lists for the impact traversal.
struct ImpactGraph {
    next: BTreeMap<ElementRef, Vec<(ElementRef, Link)>>,
}

impl ImpactGraph {
    fn build(model: &ArchitectureModel) -> Self {
        let mut next: BTreeMap<ElementRef, Vec<(ElementRef, Link)>> = BTreeMap::new();
        for corr in &model.correspondences {
            for (a, b) in &corr.pairs {
                let from = ElementRef::new(&corr.from_viewpoint, a);
                let to = ElementRef::new(&corr.to_viewpoint, b);
                let link = Link::Correspondence(corr.id.clone());
                next.entry(from.clone()).or_default().push((to.clone(), link.clone()));
                next.entry(to).or_default().push((from, link));
            }
        }
        for vp in model.viewpoints.iter().filter(|v| v.kind == ViewpointKind::Capability) {
            for parent in &vp.skills {
                for child in &parent.requires {
                    next.entry(ElementRef::new(&vp.id, child))
                        .or_default()
                        .push((ElementRef::new(&vp.id, &parent.id), Link::RequiredBy));
                }
            }
        }
        for list in next.values_mut() {
            list.sort();
            list.dedup();
        }
        Self { next }
    }

    fn closure(&self, origin: &ElementRef) -> ImpactSet {
        let mut affected = BTreeSet::from([origin.clone()]);
        let mut parents = BTreeMap::new();
        let mut queue = VecDeque::from([origin.clone()]);
        while let Some(cur) = queue.pop_front() {
            for (n, link) in self.next.get(&cur).into_iter().flatten() {
                if affected.insert(n.clone()) {
                    parents.insert(n.clone(), (cur.clone(), link.clone()));
                    queue.push_back(n.clone());
                }
            }
        }
        ImpactSet {
            origin: origin.clone(),
            affected,
            parents,
        }
    }
}

pub fn impact(model: &ArchitectureModel, origin: &ElementRef) -> Result<ImpactSet, TraceError> {
    if !model.resolves(origin) {
        return Err(TraceError::UnknownElement(origin.clone()));
    }
    Ok(ImpactGraph::build(model).closure(origin))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGap {
    pub correspondence: String,
    pub from_viewpoint: String,
    pub to_viewpoint: String,
    /// Source-viewpoint elements that appear in no pair, sorted.
    pub unmapped: Vec<String>,
}

/// One entry per correspondence, in declaration order.
pub fn check_coverage(model: &ArchitectureModel) -> Vec<CoverageGap> {
    model
        .correspondences
        .iter()
        .map(|corr| {
            let mapped: BTreeSet<&str> = corr.pairs.iter().map(|(a, _)| a.as_str()).collect();
            let unmapped: BTreeSet<String> = model
                .viewpoint(&corr.from_viewpoint)
                .into_iter()
                .flat_map(|vp| vp.element_ids())
                .filter(|e| !mapped.contains(e))
                .map(str::to_string)
                .collect();
            CoverageGap {
                correspondence: corr.id.clone(),
                from_viewpoint: corr.from_viewpoint.clone(),
                to_viewpoint: corr.to_viewpoint.clone(),
                unmapped: unmapped.into_iter().collect(),
            }
        })
        .collect()
}

pub fn is_fully_covered(gaps: &[CoverageGap]) -> bool {
    gaps.iter().all(|g| g.unmapped.is_empty())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequirementTrace {
    pub requirement: String,
    pub kind: RequirementKind,
    pub anchors: Vec<ElementRef>,
    pub impacts: Vec<ImpactSet>,
    /// Union of all anchor impacts.
    pub affected: BTreeSet<ElementRef>,
}

pub fn trace_requirement(model: &ArchitectureModel, id: &str) -> Result<RequirementTrace, TraceError> {
    let req = model
        .requirement(id)
        .ok_or_else(|| TraceError::UnknownRequirement(id.to_string()))?;
    let graph = ImpactGraph::build(model);
    let mut impacts = Vec::new();
    for anchor in &req.anchors {
        if !model.resolves(anchor) {
            return Err(TraceError::UnknownElement(anchor.clone()));
        }
        impacts.push(graph.closure(anchor));
    }
    let affected = impacts.iter().flat_map(|i| i.affected.iter().cloned()).collect();
    Ok(RequirementTrace {
        requirement: req.id.clone(),
        kind: req.kind,
        anchors: req.anchors.iter().cloned().collect(),
        impacts,
        affected,
    })
}
