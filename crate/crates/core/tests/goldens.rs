//! Fixed expectations on the fixture games and a few hand-built ones.

mod support;

use std::collections::BTreeSet;

use gamedyn_core::analysis::{
    equilibria, find_cycle, find_fair_cycle, reachable_two_sinks, sinks, switching_players, terminates, FairClause,
};
use gamedyn_core::dynamics::{build_belief_graph, build_dynamics, DynamicsKind};
use gamedyn_core::format::parse_game;
use gamedyn_core::graph::Digraph;
use gamedyn_core::minors::{
    apply_script, apply_step, find_dis_minor, is_dominated, match_dis, parse_script, profile_embedding, DeletionStep,
};
use gamedyn_core::relations::{is_simulation, largest_simulation, transitive_closure, Relation};
use gamedyn_core::spp::{
    check_dw, extract_sdw_minor, find_dispute_wheel, find_sdw, is_notg, safety_verdict, Mode, OneTargetGame,
    SafetyStatus,
};
use gamedyn_core::strategy::ProfileSpace;
use gamedyn_core::{Limits, Player, PlayerSet};
use support::{fixture, fixture_text};

fn limits() -> Limits {
    Limits::sequential()
}

fn otg(name: &str) -> OneTargetGame {
    OneTargetGame::from_game(fixture(name)).unwrap()
}

#[test]
fn disagreement_equals_its_best_reply_variants() {
    let g = fixture("disagreement.json");
    for (plain, best) in [
        (DynamicsKind::P1, DynamicsKind::BP1),
        (DynamicsKind::PC, DynamicsKind::BPC),
    ] {
        let a = build_dynamics(&g, plain, &limits()).unwrap();
        let b = build_dynamics(&g, best, &limits()).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }
}

#[test]
fn disagreement_pc_cycle_is_fair_for_both_players() {
    let g = fixture("disagreement.json");
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits()).unwrap();
    let report = find_fair_cycle(&pc);
    assert!(report.fair && report.validate(&pc));
    let cycle: BTreeSet<&str> = report.witness.unwrap().cycle.iter().map(|&u| pc.name(u)).collect();
    assert_eq!(cycle, BTreeSet::from(["c1c2", "s1s2"]));
    let u = pc.node_of_name("c1c2").unwrap();
    let v = pc.node_of_name("s1s2").unwrap();
    assert_eq!(switching_players(&pc, &[u, v]), PlayerSet::all(2));
}

#[test]
fn hidden_disagreement_profiles_and_best_reply_termination() {
    let g = fixture("hidden_disagreement.json");
    assert_eq!(ProfileSpace::new(&g).count(), 6);
    let bpc = build_dynamics(&g, DynamicsKind::BPC, &limits()).unwrap();
    assert!(terminates(&bpc));
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits()).unwrap();
    assert!(find_cycle(&pc).is_some());
}

#[test]
fn hidden_disagreement_contains_it_by_a_two_step_script() {
    let g = fixture("hidden_disagreement.json");
    let script = vec![
        DeletionStep::Edge("v1".into(), "v3".into()),
        DeletionStep::Vertex("v3".into()),
    ];
    let minor = apply_script(&g, &script).unwrap();
    assert!(match_dis(&minor.game).is_some());
    // the minor's P1 graph is simulated by the original one, and so is
    // the relation pairing each minor profile with its lift
    let small = build_dynamics(&minor.game, DynamicsKind::P1, &limits()).unwrap();
    let big = build_dynamics(&g, DynamicsKind::P1, &limits()).unwrap();
    assert!(
        largest_simulation(small.graph(), big.graph(), &limits())
            .unwrap()
            .full_domain
    );
    let embed = profile_embedding(&minor, &script, &limits()).unwrap();
    let r = Relation::new(embed.iter().enumerate().map(|(a, &b)| (a, b)));
    assert!(is_simulation(small.graph(), big.graph(), &r));
}

#[test]
fn hidden_disagreement_as_routing_game() {
    let o = otg("hidden_disagreement.json");
    assert!(is_notg(&o));
    let dw = find_dispute_wheel(&o).expect("dispute wheel");
    check_dw(&o, &dw).unwrap();
    let pc = build_dynamics(o.game(), DynamicsKind::PC, &limits()).unwrap();
    let sdw = find_sdw(&o, limits().search_budget).unwrap().is_some();
    assert_eq!(sdw, find_fair_cycle(&pc).fair);
    let v = safety_verdict(&o, Mode::Both, &limits()).unwrap();
    assert_eq!(v.structural.unwrap().status, SafetyStatus::UnknownStructural);
    assert_eq!(v.exact.unwrap().status, SafetyStatus::Safe);
    assert_eq!(v.status, SafetyStatus::Safe);
}

#[test]
fn cycle_is_unfair_because_of_player_three() {
    let g = fixture("unfair_cycle.json");
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits()).unwrap();
    let cycle = find_cycle(&pc).expect("cycle");
    assert!(cycle.validate(pc.graph()));
    assert!(!switching_players(&pc, &cycle.cycle).contains(Player(3)));
    let report = find_fair_cycle(&pc);
    assert!(!report.fair);
    assert!(report.clauses.contains(&(Player(3), FairClause::EnabledNeverSwitches)));
}

#[test]
fn domination_examples() {
    let g = fixture("dominated_exit.json");
    let v = |n: &str| g.vertex(n).unwrap();
    assert!(is_dominated(&g, (v("v1"), v("vbot")), (v("v1"), v("v4")), &limits()).unwrap());
    assert!(!is_dominated(&g, (v("v1"), v("v4")), (v("v1"), v("vbot")), &limits()).unwrap());
    let d = fixture("disagreement.json");
    let w = |n: &str| d.vertex(n).unwrap();
    assert!(!is_dominated(&d, (w("v1"), w("vbot")), (w("v1"), w("v2")), &limits()).unwrap());
}

#[test]
fn pc_cycles_but_its_dominant_minor_does_not() {
    let g = fixture("dominated_exit.json");
    assert!(!terminates(&build_dynamics(&g, DynamicsKind::PC, &limits()).unwrap()));
    let script = parse_script(&fixture_text("dominated_exit.script.json")).unwrap();
    let minor = apply_script(&g, &script).unwrap().game;
    assert!(terminates(
        &build_dynamics(&minor, DynamicsKind::PC, &limits()).unwrap()
    ));
}

#[test]
fn vertex_deletion_order_matters() {
    let g = fixture("deletion_order.json");
    let script = parse_script(&fixture_text("deletion_order.script.json")).unwrap();
    let (g1, _) = apply_step(&g, &script[0]).unwrap();
    let (g2, _) = apply_step(&g1, &script[1]).unwrap();
    // v2's successor v5 is also a successor of v1 until (v1, v5) goes
    assert!(apply_step(&g2, &DeletionStep::Vertex("v2".into())).is_err());
    let (g3, _) = apply_step(&g2, &script[2]).unwrap();
    assert!(apply_step(&g3, &DeletionStep::Vertex("v2".into())).is_ok());
}

#[test]
fn disagreement_is_unsafe_both_ways() {
    let o = otg("disagreement.json");
    let v = safety_verdict(&o, Mode::Both, &limits()).unwrap();
    assert_eq!(v.structural.unwrap().status, SafetyStatus::UnsafeSDW);
    assert_eq!(v.exact.unwrap().status, SafetyStatus::UnsafeModelChecked);
}

#[test]
fn flipped_disagreement_is_safe() {
    let o = otg("disagreement_flipped.json");
    assert!(find_dispute_wheel(&o).is_none());
    assert!(find_sdw(&o, limits().search_budget).unwrap().is_none());
    assert!(find_dis_minor(o.game(), &limits()).unwrap().is_none());
    let pc = build_dynamics(o.game(), DynamicsKind::PC, &limits()).unwrap();
    assert!(!find_fair_cycle(&pc).fair);
    let v = safety_verdict(&o, Mode::Both, &limits()).unwrap();
    assert_eq!(v.structural.unwrap().status, SafetyStatus::SafeNoDW);
    assert_eq!(v.exact.unwrap().status, SafetyStatus::Safe);
    assert_eq!(v.status.is_safe(), Some(true));
}

#[test]
fn three_pivot_wheel_reduces_to_pivots_and_target() {
    let o = otg("three_pivot_wheel.json");
    let w = find_sdw(&o, limits().search_budget).unwrap().expect("strict wheel");
    assert_eq!(w.named(o.game()).pivots, ["a", "b", "c"]);
    let cert = extract_sdw_minor(&o, &w).unwrap();
    let names: BTreeSet<&str> = cert.minor.vertices().map(|v| cert.minor.name(v)).collect();
    assert_eq!(names, BTreeSet::from(["a", "b", "c", "d"]));
    let pc = build_dynamics(&cert.minor, DynamicsKind::PC, &limits()).unwrap();
    let (t, d) = (pc.node_of(&cert.towards).unwrap(), pc.node_of(&cert.direct).unwrap());
    assert!(pc.graph().has_edge(t, d) && pc.graph().has_edge(d, t));
}

#[test]
fn closure_matches_matrix_powers() {
    let g = fixture("disagreement.json");
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits()).unwrap();
    let n = pc.node_count();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| pc.graph().has_edge(u, v)).collect())
        .collect();
    let mut reach = adj.clone();
    let mut power = adj.clone();
    for _ in 1..n {
        power = (0..n)
            .map(|u| (0..n).map(|v| (0..n).any(|k| power[u][k] && adj[k][v])).collect())
            .collect();
        for (row, prow) in reach.iter_mut().zip(&power) {
            for (r, &p) in row.iter_mut().zip(prow) {
                *r |= p;
            }
        }
    }
    let c = transitive_closure(pc.graph(), false);
    for (u, row) in reach.iter().enumerate() {
        for (v, &r) in row.iter().enumerate() {
            assert_eq!(c.has_edge(u, v), r, "{u} -> {v}");
        }
    }
}

#[test]
fn two_edge_simulation_example() {
    let g = Digraph::from_edges(2, [(0, 1)]);
    let gp = Digraph::from_edges(3, [(0, 1), (0, 2)]);
    let big = largest_simulation(&gp, &g, &limits()).unwrap();
    // v2′ is terminal, so v simulates it vacuously and the domain is full
    assert!(big.full_domain);
    assert!(big.contains(2, 1) && big.contains(0, 0) && !big.contains(0, 1));
}

#[test]
fn unique_equilibrium_gives_one_sink() {
    let g = parse_game(
        r#"{"players":1,"vertices":["v","a","b"],"edges":[["v","a"],["v","b"]],
            "owner":{"v":1},"preferences":{"1":[[{"path":["v","a"]}]]}}"#,
    )
    .unwrap();
    let bg = build_belief_graph(&g, &limits()).unwrap();
    assert_eq!(sinks(bg.graph()).len(), 1);
    assert!(reachable_two_sinks(bg.graph()).is_none());
    let p1 = build_dynamics(&g, DynamicsKind::P1, &limits()).unwrap();
    assert_eq!(equilibria(&p1).len(), 1);
}
