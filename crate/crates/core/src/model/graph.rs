use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use super::{Skill, Viewpoint, ViewpointKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("requires cycle among skills: {}", skills.join(", "))]
pub struct CycleError {
    /// Skills that could not be ordered, sorted by id.
    pub skills: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("viewpoint `{0}` is not a capability viewpoint")]
    NotCapability(String),
    #[error("skill `{0}` declared more than once")]
    DuplicateSkill(String),
    #[error("skill `{skill}` requires undeclared skill `{child}`")]
    UnknownChild { skill: String, child: String },
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

/// The requires-DAG of one capability viewpoint.
///
/// Construction checks that every requires target is a declared skill and
/// that the graph is acyclic, so every `SkillGraph` value can be ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillGraph {
    skills: BTreeMap<String, Skill>,
    parents: BTreeMap<String, BTreeSet<String>>,
    order: Vec<String>,
}

impl SkillGraph {
    pub fn new(skills: impl IntoIterator<Item = Skill>) -> Result<Self, GraphError> {
        let mut by_id = BTreeMap::new();
        for skill in skills {
            if by_id.contains_key(&skill.id) {
                return Err(GraphError::DuplicateSkill(skill.id));
            }
            by_id.insert(skill.id.clone(), skill);
        }
        let mut parents: BTreeMap<String, BTreeSet<String>> =
            by_id.keys().map(|id| (id.clone(), BTreeSet::new())).collect();
        for skill in by_id.values() {
            for child in &skill.requires {
                match parents.get_mut(child) {
                    Some(p) => {
                        p.insert(skill.id.clone());
                    }
                    None => {
                        return Err(GraphError::UnknownChild {
                            skill: skill.id.clone(),
                            child: child.clone(),
                        })
                    }
                }
            }
        }
        let order = order_children_first(&by_id)?;
        Ok(Self {
            skills: by_id,
            parents,
            order,
        })
    }

    pub fn from_viewpoint(viewpoint: &Viewpoint) -> Result<Self, GraphError> {
        if viewpoint.kind != ViewpointKind::Capability {
            return Err(GraphError::NotCapability(viewpoint.id.clone()));
        }
        Self::new(viewpoint.skills.iter().cloned())
    }

    pub fn skill(&self, id: &str) -> Option<&Skill> {
        self.skills.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.skills.contains_key(id)
    }

    pub fn skills(&self) -> impl Iterator<Item = &Skill> {
        self.skills.values()
    }

    pub fn len(&self) -> usize {
        self.skills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skills.is_empty()
    }

    pub fn children(&self, id: &str) -> impl Iterator<Item = &str> {
        self.skills
            .get(id)
            .into_iter()
            .flat_map(|s| s.requires.iter().map(String::as_str))
    }

    /// Skills that directly require `id`.
    pub fn parents(&self, id: &str) -> impl Iterator<Item = &str> {
        self.parents
            .get(id)
            .into_iter()
            .flat_map(|p| p.iter().map(String::as_str))
    }

    /// Evaluation order: children before parents, ties by id.
    pub fn evaluation_order(&self) -> &[String] {
        &self.order
    }

    /// All skills transitively required by `id`, excluding `id` itself.
    pub fn descendants(&self, id: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = self.children(id).collect();
        while let Some(next) = stack.pop() {
            if seen.insert(next.to_string()) {
                stack.extend(self.children(next));
            }
        }
        seen
    }
}

/// Orders skills so that every child precedes the skills requiring it.
/// Ready skills are released in lexicographic order.
pub fn topological_order(graph: &SkillGraph) -> Result<Vec<String>, CycleError> {
    let skills: BTreeMap<String, Skill> = graph
        .skills()
        .map(|s| (s.id.clone(), s.clone()))
        .collect();
    order_children_first(&skills)
}

fn order_children_first(skills: &BTreeMap<String, Skill>) -> Result<Vec<String>, CycleError> {
    // Pending child counts; unknown children are ignored here.
    let mut pending: BTreeMap<&str, usize> = skills
        .values()
        .map(|s| {
            let known = s.requires.iter().filter(|c| skills.contains_key(*c)).count();
            (s.id.as_str(), known)
        })
        .collect();
    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for skill in skills.values() {
        for child in skill.requires.iter().filter(|c| skills.contains_key(*c)) {
            parents.entry(child.as_str()).or_default().push(&skill.id);
        }
    }

    let mut ready: BinaryHeap<Reverse<&str>> = pending
        .iter()
        .filter(|(_, &n)| n == 0)
        .map(|(&id, _)| Reverse(id))
        .collect();
    let mut order = Vec::with_capacity(skills.len());
    while let Some(Reverse(id)) = ready.pop() {
        order.push(id.to_string());
        for &parent in parents.get(id).into_iter().flatten() {
            let n = pending.get_mut(parent).expect("parent is a declared skill");
            *n -= 1;
            if *n == 0 {
                ready.push(Reverse(parent));
            }
        }
    }

    if order.len() == skills.len() {
        Ok(order)
    } else {
        let done: BTreeSet<&str> = order.iter().map(String::as_str).collect();
        Err(CycleError {
            skills: skills
                .keys()
                .filter(|id| !done.contains(id.as_str()))
                .cloned()
                .collect(),
        })
    }
}
