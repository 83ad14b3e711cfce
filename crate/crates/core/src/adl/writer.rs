use std::fmt::Write;

use crate::model::{ArchitectureModel, Correspondence, Interval, MetricBinding, Requirement, Scenario, Skill, Viewpoint};

pub const HEADER: &str = "# capcheck ADL v1";

/// Shortest representation that parses back to the same `f64`.
fn real(x: f64) -> String {
    format!("{x:?}")
}

fn string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn interval(i: &Interval) -> String {
    format!("[{}, {}]", real(i.lo), real(i.hi))
}

/// Canonical source text: a header comment, then blocks sorted by
/// (block kind, id).
pub fn serialize(model: &ArchitectureModel) -> String {
    let model = model.canonical();
    let mut blocks: Vec<String> = Vec::new();
    blocks.extend(model.viewpoints.iter().map(viewpoint));
    blocks.extend(model.correspondences.iter().map(correspondence));
    blocks.extend(model.requirements.iter().map(requirement));
    blocks.extend(model.scenarios.iter().map(scenario));

    let mut out = String::from(HEADER);
    out.push('\n');
    for block in blocks {
        out.push('\n');
        out.push_str(&block);
    }
    out
}

fn viewpoint(vp: &Viewpoint) -> String {
    let mut s = format!("viewpoint {} {} {{\n", vp.kind, vp.id);
    for node in &vp.nodes {
        writeln!(s, "  node {};", node.id).unwrap();
    }
    for sk in &vp.skills {
        s.push_str(&skill(sk));
    }
    for edge in &vp.edges {
        match &edge.label {
            Some(label) => writeln!(s, "  edge {} -> {} : {};", edge.source, edge.target, label),
            None => writeln!(s, "  edge {} -> {};", edge.source, edge.target),
        }
        .unwrap();
    }
    s.push_str("}\n");
    s
}

fn skill(sk: &Skill) -> String {
    let mut s = format!("  skill {}", sk.id);
    if !sk.requires.is_empty() {
        let children: Vec<&str> = sk.requires.iter().map(String::as_str).collect();
        write!(s, " requires {}", children.join(", ")).unwrap();
    }
    if let Some(t) = sk.thresholds {
        write!(s, " thresholds {} {}", real(t.degraded), real(t.unavailable)).unwrap();
    }
    if !sk.description.is_empty() {
        write!(s, " text {}", string(&sk.description)).unwrap();
    }
    for b in &sk.metric_bindings {
        write!(s, "\n    {}", metric(b)).unwrap();
    }
    s.push_str(";\n");
    s
}

fn metric(b: &MetricBinding) -> String {
    let mut s = format!(
        "metric {}.{} {} nominal {} unavailable {}",
        b.source,
        b.metric,
        b.kind.keyword(),
        interval(&b.nominal),
        interval(&b.unavailable)
    );
    if let Some(t) = b.timeout {
        write!(s, " timeout {}", real(t)).unwrap();
    }
    s
}

fn correspondence(c: &Correspondence) -> String {
    let mut s = format!("correspondence {} {} -> {} {{\n", c.id, c.from_viewpoint, c.to_viewpoint);
    let mut pairs = c.pairs.iter().peekable();
    while let Some((from, to)) = pairs.next() {
        let mut targets = vec![to.as_str()];
        while let Some((_, next)) = pairs.next_if(|(f, _)| f == from) {
            targets.push(next);
        }
        writeln!(s, "  {} => {};", from, targets.join(", ")).unwrap();
    }
    s.push_str("}\n");
    s
}

fn requirement(r: &Requirement) -> String {
    let anchors: Vec<String> = r.anchors.iter().map(ToString::to_string).collect();
    format!(
        "requirement {} {} on {} text {};\n",
        r.id,
        r.kind.keyword(),
        anchors.join(", "),
        string(&r.text)
    )
}

fn scenario(sc: &Scenario) -> String {
    let mut s = format!("scenario {} {{\n", sc.id);
    for (key, value) in &sc.params {
        writeln!(s, "  {} = {};", key, real(*value)).unwrap();
    }
    s.push_str("}\n");
    s
}
