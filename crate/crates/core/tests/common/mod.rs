//! Generators and brute-force oracles shared by the integration tests and
//! the acceptance runner.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use capcheck::model::*;
use capcheck::scenario::{OcclusionGeometry, ScenarioProfile};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str) -> ArchitectureModel {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    capcheck::adl::parse_named(&text, name).unwrap()
}

// ---------------------------------------------------------------- models

const HEAD: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ_";
const TAIL: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.";

/// Identifier starting upper-case, so it never collides with a keyword.
pub fn ident(rng: &mut impl Rng, dots: bool) -> String {
    let mut s = String::new();
    s.push(*HEAD.choose(rng).unwrap() as char);
    for _ in 0..rng.gen_range(0..6) {
        let c = *TAIL.choose(rng).unwrap() as char;
        if c == '.' && !dots {
            continue;
        }
        s.push(c);
    }
    s
}

fn unique_ident(rng: &mut impl Rng, taken: &mut BTreeSet<String>, dots: bool) -> String {
    loop {
        let id = ident(rng, dots);
        if taken.insert(id.clone()) {
            return id;
        }
    }
}

pub fn real(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..8) {
        0 => 0.0,
        1 => rng.gen_range(-1.0..1.0),
        2 => rng.gen_range(-1e6..1e6),
        3 => rng.gen::<f64>() * 10f64.powi(rng.gen_range(-300..300)),
        4 => -(rng.gen_range(0..1000) as f64),
        5 => 0.1 + 0.2,
        _ => rng.gen_range(0.0..100.0),
    }
}

fn bound(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..6) {
        0 => f64::INFINITY,
        1 => f64::NEG_INFINITY,
        _ => real(rng),
    }
}

fn text(rng: &mut impl Rng) -> String {
    const CHARS: &[char] = &['a', 'Z', ' ', '"', '\\', '#', ';', '{', 'é', '→', '0', ','];
    (0..rng.gen_range(0..12)).map(|_| *CHARS.choose(rng).unwrap()).collect()
}

fn binding(rng: &mut impl Rng) -> MetricBinding {
    let kind = *[MetricKind::Heartbeat, MetricKind::Counter, MetricKind::Scalar]
        .choose(rng)
        .unwrap();
    MetricBinding {
        source: ident(rng, false),
        metric: ident(rng, true),
        kind,
        nominal: Interval::new(bound(rng), bound(rng)),
        unavailable: Interval::new(bound(rng), bound(rng)),
        timeout: rng.gen_bool(0.5).then(|| real(rng)),
    }
}

fn element_of(rng: &mut impl Rng, vps: &[Viewpoint]) -> Option<ElementRef> {
    let vp = vps.choose(rng)?;
    let ids: Vec<&str> = vp.element_ids().collect();
    ids.choose(rng).map(|e| ElementRef::new(&vp.id, *e))
}

/// Arbitrary model with up to `max_elements` elements. Structure is
/// random, so it is usually not valid; it is always expressible.
pub fn random_model(rng: &mut impl Rng, max_elements: usize) -> ArchitectureModel {
    let mut vp_ids = BTreeSet::new();
    let mut viewpoints = Vec::new();
    let mut budget = rng.gen_range(0..=max_elements);
    for _ in 0..rng.gen_range(0..=4) {
        let kind = *ViewpointKind::ALL.choose(rng).unwrap();
        let mut vp = Viewpoint::new(kind, unique_ident(rng, &mut vp_ids, false));
        let mut taken = BTreeSet::new();
        let n = rng.gen_range(0..=budget.min(15));
        budget -= n;
        for _ in 0..n {
            let id = unique_ident(rng, &mut taken, true);
            if rng.gen_bool(0.5) {
                vp.nodes.push(Element::new(id));
            } else {
                let mut sk = Skill::new(id);
                if rng.gen_bool(0.3) {
                    sk.thresholds = Some(Thresholds::new(real(rng), real(rng)));
                }
                if rng.gen_bool(0.3) {
                    sk.description = text(rng);
                }
                for _ in 0..rng.gen_range(0..3) {
                    sk.metric_bindings.push(binding(rng));
                }
                vp.skills.push(sk);
            }
        }
        let ids: Vec<String> = vp.element_ids().map(str::to_string).collect();
        if !ids.is_empty() {
            for sk in vp.skills.iter_mut() {
                for _ in 0..rng.gen_range(0..3) {
                    sk.requires.insert(ids.choose(rng).unwrap().clone());
                }
            }
            for _ in 0..rng.gen_range(0..4) {
                let mut e = Edge::new(ids.choose(rng).unwrap(), ids.choose(rng).unwrap());
                if rng.gen_bool(0.5) {
                    e.label = Some(ident(rng, true));
                }
                vp.edges.insert(e);
            }
        }
        viewpoints.push(vp);
    }

    let mut taken = BTreeSet::new();
    let mut correspondences = Vec::new();
    if !viewpoints.is_empty() {
        for _ in 0..rng.gen_range(0..3) {
            let a = viewpoints.choose(rng).unwrap();
            let b = viewpoints.choose(rng).unwrap();
            let mut c = Correspondence::new(unique_ident(rng, &mut taken, true), &a.id, &b.id);
            let (xa, xb): (Vec<&str>, Vec<&str>) = (a.element_ids().collect(), b.element_ids().collect());
            if !xa.is_empty() && !xb.is_empty() {
                for _ in 0..rng.gen_range(0..5) {
                    c.pairs.insert((xa.choose(rng).unwrap().to_string(), xb.choose(rng).unwrap().to_string()));
                }
            }
            correspondences.push(c);
        }
    }

    let mut requirements = Vec::new();
    let mut taken = BTreeSet::new();
    for _ in 0..rng.gen_range(0..3) {
        let kind = *[
            RequirementKind::SafetyGoal,
            RequirementKind::Hazard,
            RequirementKind::RiskMinimalState,
            RequirementKind::Functional,
        ]
        .choose(rng)
        .unwrap();
        let mut req = Requirement::new(unique_ident(rng, &mut taken, true), kind, text(rng));
        for _ in 0..rng.gen_range(1..3) {
            let anchor = element_of(rng, &viewpoints)
                .unwrap_or_else(|| ElementRef::new(ident(rng, false), ident(rng, true)));
            req.anchors.insert(anchor);
        }
        requirements.push(req);
    }

    let mut scenarios = Vec::new();
    let mut taken = BTreeSet::new();
    for _ in 0..rng.gen_range(0..2) {
        let mut sc = Scenario::new(unique_ident(rng, &mut taken, true));
        for key in ScenarioKey::ALL {
            if rng.gen_bool(0.6) {
                sc.params.insert(key, real(rng));
            }
        }
        scenarios.push(sc);
    }

    let mut model = ArchitectureModel {
        viewpoints,
        correspondences,
        requirements,
        scenarios,
    };
    // declaration order should not matter
    model.viewpoints.shuffle(rng);
    model.requirements.shuffle(rng);
    model
}

// ---------------------------------------------------------------- DAGs

pub struct RandomDag {
    pub graph: SkillGraph,
    pub own: BTreeMap<String, f64>,
    pub leaves: Vec<String>,
}

/// Random requires-DAG on `n` skills with random own performance values.
pub fn random_dag(rng: &mut impl Rng, n: usize) -> RandomDag {
    let mut names: Vec<String> = (0..n).map(|i| format!("S{i}")).collect();
    names.shuffle(rng);
    let density = rng.gen_range(0.1..0.7);
    let mut skills: Vec<Skill> = names.iter().map(Skill::new).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                skills[i].requires.insert(names[j].clone());
            }
        }
    }
    let mut own = BTreeMap::new();
    for s in &names {
        if rng.gen_bool(0.85) {
            let v = match rng.gen_range(0..4) {
                0 => 1.0,
                1 => 0.0,
                _ => rng.gen_range(0.0..=1.0),
            };
            own.insert(s.clone(), v);
        }
    }
    let leaves = skills.iter().filter(|s| s.is_leaf()).map(|s| s.id.clone()).collect();
    RandomDag {
        graph: SkillGraph::new(skills).unwrap(),
        own,
        leaves,
    }
}

/// `min` of own values over everything reachable through requires,
/// computed by plain depth-first search from every skill.
pub fn brute_force_aggregate(graph: &SkillGraph, own: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for s in graph.skills() {
        let mut seen = BTreeSet::new();
        let mut stack = vec![s.id.clone()];
        let mut value: f64 = 1.0;
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            value = value.min(own.get(&cur).copied().unwrap_or(1.0));
            stack.extend(graph.skill(&cur).unwrap().requires.iter().cloned());
        }
        out.insert(s.id.clone(), value);
    }
    out
}

// ---------------------------------------------------------------- impact

/// Small model whose references all resolve, for impact queries.
pub fn random_trace_model(rng: &mut impl Rng, max_elements: usize) -> ArchitectureModel {
    let total = rng.gen_range(1..=max_elements);
    let n_vp = rng.gen_range(1..=4usize.min(total));
    let mut viewpoints: Vec<Viewpoint> = (0..n_vp)
        .map(|i| Viewpoint::new(*ViewpointKind::ALL.choose(rng).unwrap(), format!("v{i}")))
        .collect();
    for k in 0..total {
        let vp = &mut viewpoints[if k < n_vp { k } else { rng.gen_range(0..n_vp) }];
        let id = format!("E{k}");
        if vp.kind == ViewpointKind::Capability && rng.gen_bool(0.8) {
            vp.skills.push(Skill::new(id));
        } else {
            vp.nodes.push(Element::new(id));
        }
    }
    for vp in viewpoints.iter_mut() {
        // requires only towards later skills, so the graph stays acyclic
        let ids: Vec<String> = vp.skills.iter().map(|s| s.id.clone()).collect();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if rng.gen_bool(0.3) {
                    vp.skills[i].requires.insert(ids[j].clone());
                }
            }
        }
        let el: Vec<String> = vp.element_ids().map(str::to_string).collect();
        for _ in 0..rng.gen_range(0..3) {
            vp.edges.insert(Edge::new(el.choose(rng).unwrap(), el.choose(rng).unwrap()));
        }
    }
    let mut correspondences = Vec::new();
    for c in 0..rng.gen_range(0..4) {
        let a = viewpoints.choose(rng).unwrap();
        let b = viewpoints.choose(rng).unwrap();
        let mut corr = Correspondence::new(format!("c{c}"), &a.id, &b.id);
        let (xa, xb): (Vec<&str>, Vec<&str>) = (a.element_ids().collect(), b.element_ids().collect());
        for _ in 0..rng.gen_range(0..6) {
            corr.pairs.insert((xa.choose(rng).unwrap().to_string(), xb.choose(rng).unwrap().to_string()));
        }
        correspondences.push(corr);
    }
    ArchitectureModel {
        viewpoints,
        correspondences,
        ..Default::default()
    }
}

pub fn all_elements(model: &ArchitectureModel) -> Vec<ElementRef> {
    model
        .viewpoints
        .iter()
        .flat_map(|vp| vp.element_ids().map(|e| ElementRef::new(&vp.id, e)))
        .collect()
}

/// Iterate-until-stable closure: keep sweeping over every pair and every
/// requires edge until nothing new is added.
pub fn naive_impact(model: &ArchitectureModel, origin: &ElementRef) -> BTreeSet<ElementRef> {
    let mut set = BTreeSet::from([origin.clone()]);
    loop {
        let before = set.len();
        for c in &model.correspondences {
            for (a, b) in &c.pairs {
                let ra = ElementRef::new(&c.from_viewpoint, a);
                let rb = ElementRef::new(&c.to_viewpoint, b);
                if set.contains(&ra) || set.contains(&rb) {
                    set.insert(ra);
                    set.insert(rb);
                }
            }
        }
        for vp in model.viewpoints.iter().filter(|v| v.kind == ViewpointKind::Capability) {
            for p in &vp.skills {
                if p.requires.iter().any(|c| set.contains(&ElementRef::new(&vp.id, c))) {
                    set.insert(ElementRef::new(&vp.id, &p.id));
                }
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

// ---------------------------------------------------------------- kinematics

/// Forward-Euler stopping distance: coast for `t_react`, then brake with
/// `x += v*dt; v -= a*dt`. The coast and the final braking step are
/// shortened so they end exactly at `t_react` and at rest.
pub fn euler_stopping_distance(v0: f64, a_eff: f64, t_react: f64, dt: f64) -> f64 {
    let mut x = 0.0;
    let mut t = 0.0;
    while t < t_react {
        let h = dt.min(t_react - t);
        x += v0 * h;
        t += h;
    }
    let mut v = v0;
    while v > 0.0 {
        let h = dt.min(v / a_eff);
        x += v * h;
        v = (v - a_eff * h).max(0.0);
        if h < dt {
            break;
        }
    }
    x
}

/// Profiles near the crossing fixture with random variation.
pub fn random_profile(rng: &mut impl Rng) -> ScenarioProfile {
    let occlusion = rng
        .gen_bool(0.7)
        .then(|| OcclusionGeometry::new(rng.gen_range(0.5..3.0), rng.gen_range(0.0..12.0), rng.gen_range(3.0..6.0)).unwrap());
    ScenarioProfile {
        v_init: rng.gen_range(0.0..20.0),
        d_crossing: rng.gen_range(5.0..80.0),
        a_max: rng.gen_range(2.0..10.0),
        mu: rng.gen_range(0.1..1.2),
        t_react: rng.gen_range(0.0..2.0),
        d_detect: if rng.gen_bool(0.2) { f64::INFINITY } else { rng.gen_range(5.0..100.0) },
        g: 9.81,
        occlusion,
        margin: 0.0,
    }
}
