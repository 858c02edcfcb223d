//! Small games on which a stated implication between minors, wheels and
//! fair termination does not hold under the definitions implemented here.
//! Each test pins the observed behaviour so a change in semantics shows up.

mod support;

use gamedyn_core::analysis::{find_fair_cycle, terminates};
use gamedyn_core::dynamics::{build_dynamics, DynamicsKind};
use gamedyn_core::minors::{apply_script, apply_step, find_dis_minor, is_dominated, parse_script, DeletionStep};
use gamedyn_core::relations::largest_simulation;
use gamedyn_core::spp::{check_sdw, find_sdw, is_notg, OneTargetGame};
use gamedyn_core::Limits;
use support::{fair_cycle_oracle, fixture, fixture_text};

/// Deleting the only edge out of a player vertex turns it into a terminal.
/// The new play ending there is unranked, hence worst, so the minor gains
/// an improving move that the original game does not have.
#[test]
fn last_edge_deletion_breaks_simulation() {
    let g = fixture("dead_end_deletion.json");
    let script = parse_script(&fixture_text("dead_end_deletion.script.json")).unwrap();
    let minor = apply_script(&g, &script).unwrap().game;
    let v2 = minor.vertex("v2").unwrap();
    assert!(minor.owner(v2).is_none());
    let limits = Limits::sequential();
    for kind in [DynamicsKind::P1, DynamicsKind::PC] {
        let big = build_dynamics(&g, kind, &limits).unwrap();
        let small = build_dynamics(&minor, kind, &limits).unwrap();
        assert_eq!(big.edge_count(), 0, "{kind}");
        assert_eq!(small.edge_count(), 1, "{kind}");
        assert!(
            !largest_simulation(small.graph(), big.graph(), &limits)
                .unwrap()
                .full_domain
        );
    }
}

/// One player owns every vertex. A bP1 cycle that keeps the dominated edge
/// `v1 -> t1` forever is still fair, because the player switches at the
/// other vertices. The dominant minor has a single profile.
#[test]
fn shared_owner_keeps_dominated_edge_on_fair_cycle() {
    let g = fixture("shared_owner_dominant_minor.json");
    let script = parse_script(&fixture_text("shared_owner_dominant_minor.script.json")).unwrap();
    let limits = Limits::sequential();
    let mut cur = g.clone();
    for step in &script {
        let DeletionStep::Edge(a, b) = step else { unreachable!() };
        let (u, w) = (cur.vertex(a).unwrap(), cur.vertex(b).unwrap());
        let dominated = cur
            .successors(u)
            .iter()
            .filter(|&&x| x != w)
            .any(|&x| is_dominated(&cur, (u, w), (u, x), &limits).unwrap());
        assert!(dominated, "{a} -> {b} is not dominated");
        cur = apply_step(&cur, step).unwrap().0;
    }
    let big = build_dynamics(&g, DynamicsKind::BP1, &limits).unwrap();
    let small = build_dynamics(&cur, DynamicsKind::BP1, &limits).unwrap();
    let report = find_fair_cycle(&big);
    assert!(report.fair && fair_cycle_oracle(&big));
    let witness = report.witness.unwrap();
    let v1 = g.vertex("v1").unwrap();
    let t1 = g.vertex("t1").unwrap();
    assert!(witness
        .cycle
        .iter()
        .all(|&u| big.profile(u).unwrap().get(v1) == Some(t1)));
    assert_eq!(small.node_count(), 1);
    assert!(!find_fair_cycle(&small).fair);
}

/// A neighbour game with a strict dispute wheel whose PC dynamics cycles
/// but has no fair cycle: on every cycle `v1` could improve from `v4` to
/// `d`, and doing so makes the route `v2 v3 v1 d` forbidden for `v2`, so
/// the wheel stops turning.
#[test]
fn strict_wheel_without_fair_cycle() {
    let otg = OneTargetGame::from_game(fixture("strict_wheel_no_fair_cycle.json")).unwrap();
    assert!(is_notg(&otg));
    let w = find_sdw(&otg, 100_000).unwrap().expect("strict wheel");
    check_sdw(&otg, &w).unwrap();
    let named = w.named(otg.game());
    assert_eq!(named.pivots, ["v2", "v3"]);
    let pc = build_dynamics(otg.game(), DynamicsKind::PC, &Limits::sequential()).unwrap();
    assert!(!terminates(&pc));
    assert!(!find_fair_cycle(&pc).fair);
    assert!(!fair_cycle_oracle(&pc));
}

/// Three pivots, each preferring the route through the next one. PC has
/// a fair cycle, but contracting the wheel to two pivots needs the route
/// `b y c z a d`, which `b` does not permit, so no disagreement-shaped
/// minor exists.
#[test]
fn three_pivot_wheel_has_no_disagreement_minor() {
    let otg = OneTargetGame::from_game(fixture("three_pivot_wheel.json")).unwrap();
    assert!(is_notg(&otg));
    let pc = build_dynamics(otg.game(), DynamicsKind::PC, &Limits::sequential()).unwrap();
    assert!(find_fair_cycle(&pc).fair && fair_cycle_oracle(&pc));
    assert!(find_sdw(&otg, 100_000).unwrap().is_some());
    assert!(find_dis_minor(otg.game(), &Limits::sequential()).unwrap().is_none());
}
