//! Graphviz export. Nodes are emitted in index order so output is stable.

use std::fmt::Write;

use crate::dynamics::{BeliefGraph, DynamicsGraph};
use crate::game::Game;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The arena: player vertices are circles labelled with their owner,
/// terminals are boxes, named edges carry their label.
pub fn game_to_dot(g: &Game) -> String {
    let mut out = String::from("digraph game {\n");
    for v in g.vertices() {
        let attrs = match g.owner(v) {
            Some(p) => format!("label={} shape=circle", quote(&format!("{} ({p})", g.name(v)))),
            None => format!("label={} shape=box", quote(g.name(v))),
        };
        writeln!(out, "  n{} [{attrs}];", v.0).unwrap();
    }
    for (u, v) in g.edges() {
        match g.edge_label(u, v) {
            Some(l) => writeln!(out, "  n{} -> n{} [label={}];", u.0, v.0, quote(l)).unwrap(),
            None => writeln!(out, "  n{} -> n{};", u.0, v.0).unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

/// Profiles labelled by display name; edges carry the players that move.
pub fn dynamics_to_dot(dg: &DynamicsGraph) -> String {
    let mut out = format!("digraph {} {{\n", dg.kind().as_str());
    for u in 0..dg.node_count() {
        writeln!(out, "  n{u} [label={}];", quote(dg.name(u))).unwrap();
    }
    for (u, v, changed) in dg.edges() {
        writeln!(out, "  n{u} -> n{v} [label={}];", quote(&changed.to_string())).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Belief matrices labelled row by row; every edge carries its label.
pub fn belief_to_dot(bg: &BeliefGraph) -> String {
    let lg = bg.graph();
    let mut out = String::from("digraph belief {\n");
    for m in 0..bg.node_count() {
        writeln!(out, "  n{m} [label={}];", quote(bg.name(m))).unwrap();
    }
    for m in 0..bg.node_count() {
        for l in 0..lg.n_labels() {
            writeln!(out, "  n{m} -> n{} [label=\"{l}\"];", lg.step(m, l)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_dynamics, DynamicsKind};
    use crate::format::parse_game;
    use crate::Limits;

    #[test]
    fn disagreement_p1_dot() {
        let g = parse_game(
            r#"{"players":2,"vertices":["v1","v2","vbot"],
            "edges":[["v1","v2","c1"],["v1","vbot","s1"],["v2","v1","c2"],["v2","vbot","s2"]],
            "owner":{"v1":1,"v2":2},
            "preferences":{"1":[[{"path":["v1","v2","vbot"]}],[{"path":["v1","vbot"]}]],
                           "2":[[{"path":["v2","v1","vbot"]}],[{"path":["v2","vbot"]}]]}}"#,
        )
        .unwrap();
        let dot = dynamics_to_dot(&build_dynamics(&g, DynamicsKind::P1, &Limits::default()).unwrap());
        assert_eq!(dot.matches("[label=\"{").count(), 4);
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert!(dot.contains("label=\"c1c2\""));
        assert!(game_to_dot(&g).contains("n0 -> n1 [label=\"c1\"]"));
    }
}
