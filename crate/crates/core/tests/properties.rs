//! Invariants over seeded random games.

mod support;

use gamedyn_core::analysis::{
    check_diamond, equilibria, find_cycle, find_fair_cycle, find_lfair_cycle, reachable_two_sinks, terminates,
};
use gamedyn_core::dynamics::{build_belief_graph, build_dynamics, DynamicsGraph, DynamicsKind};
use gamedyn_core::format::{game_to_json, parse_game};
use gamedyn_core::gen::{self, GameShape};
use gamedyn_core::graph::Digraph;
use gamedyn_core::relations::{is_bisimulation, is_partial_simulation, largest_simulation, Relation};
use gamedyn_core::{Game, Limits};
use proptest::prelude::*;
use support::fair_cycle_oracle;

fn small_game(seed: u64) -> Game {
    gen::random_game(&mut gen::rng(seed), &GameShape::default())
}

fn build(g: &Game, kind: DynamicsKind) -> DynamicsGraph {
    build_dynamics(g, kind, &Limits::sequential()).unwrap()
}

fn edge_subset(a: &DynamicsGraph, b: &DynamicsGraph) -> bool {
    a.graph().edges().all(|(u, v)| b.graph().has_edge(u, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dynamics_edge_inclusions(seed in any::<u64>()) {
        let g = small_game(seed);
        let p1 = build(&g, DynamicsKind::P1);
        let bp1 = build(&g, DynamicsKind::BP1);
        let pc = build(&g, DynamicsKind::PC);
        let bpc = build(&g, DynamicsKind::BPC);
        prop_assert!(edge_subset(&bp1, &p1));
        prop_assert!(edge_subset(&bpc, &pc));
        prop_assert!(edge_subset(&p1, &pc));
        prop_assert!(edge_subset(&bp1, &bpc));
        // all four share their equilibria
        let eq = equilibria(&p1);
        for dg in [&bp1, &pc, &bpc] {
            prop_assert_eq!(&equilibria(dg), &eq);
        }
    }

    #[test]
    fn fairness_reports_are_sound(seed in any::<u64>()) {
        let g = small_game(seed);
        for kind in DynamicsKind::POSITIONAL {
            let dg = build(&g, kind);
            let report = find_fair_cycle(&dg);
            prop_assert!(report.validate(&dg));
            prop_assert_eq!(report.fair, fair_cycle_oracle(&dg));
            if terminates(&dg) {
                prop_assert!(!report.fair);
            }
            if let Some(c) = find_cycle(&dg) {
                prop_assert!(c.validate(dg.graph()));
            }
        }
    }

    #[test]
    fn largest_simulation_is_a_maximal_partial_simulation(a in any::<u64>(), b in any::<u64>()) {
        let (g1, g2) = (small_game(a), small_game(b));
        let gp = build(&g1, DynamicsKind::P1);
        let g = build(&g2, DynamicsKind::PC);
        let sim = largest_simulation(gp.graph(), g.graph(), &Limits::sequential()).unwrap();
        let r = sim.relation();
        prop_assert!(is_partial_simulation(gp.graph(), g.graph(), &r).is_ok());
        // adding any missing pair leaves some move unmatched
        let matched = |r: &Relation| {
            r.pairs().iter().all(|&(x, y)| {
                gp.graph().successors(x).iter().all(|&xs| g.graph().successors(y).iter().any(|&ys| r.contains(xs, ys)))
            })
        };
        prop_assert!(matched(&r));
        for x in 0..gp.node_count().min(6) {
            for y in 0..g.node_count().min(6) {
                if !r.contains(x, y) {
                    let mut bigger = r.clone();
                    bigger.insert(x, y);
                    prop_assert!(!matched(&bigger));
                }
            }
        }
        // a simulation carries termination over
        if sim.full_domain && terminates(&g) {
            prop_assert!(terminates(&gp));
        }
    }

    #[test]
    fn simulation_is_a_preorder(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let graphs: Vec<Digraph> = [a, b, c]
            .iter()
            .map(|&s| build(&small_game(s), DynamicsKind::P1).graph().clone())
            .collect();
        let l = Limits::sequential();
        let id = Relation::identity(graphs[0].node_count());
        prop_assert!(is_bisimulation(&graphs[0], &graphs[0], &id));
        prop_assert!(largest_simulation(&graphs[0], &graphs[0], &l).unwrap().full_domain);
        let s10 = largest_simulation(&graphs[0], &graphs[1], &l).unwrap();
        let s21 = largest_simulation(&graphs[1], &graphs[2], &l).unwrap();
        if s10.full_domain && s21.full_domain {
            prop_assert!(largest_simulation(&graphs[0], &graphs[2], &l).unwrap().full_domain);
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let g = small_game(seed);
        let text = game_to_json(&g);
        prop_assert_eq!(game_to_json(&parse_game(&text).unwrap()), text);
    }

    #[test]
    fn parallel_matches_sequential(seed in any::<u64>()) {
        let g = small_game(seed);
        for kind in DynamicsKind::POSITIONAL {
            let a = build_dynamics(&g, kind, &Limits::default()).unwrap();
            let b = build(&g, kind);
            prop_assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn diamond_and_two_sinks_give_lfair_cycle(seed in any::<u64>()) {
        let shape = GameShape { max_players: 2, max_vertices: 3, max_out_degree: 2, ..GameShape::default() };
        let g = gen::random_game(&mut gen::rng(seed), &shape);
        let Ok(bg) = build_belief_graph(&g, &Limits::sequential()) else {
            return Ok(());
        };
        let lg = bg.graph();
        if check_diamond(lg).holds && reachable_two_sinks(lg).is_some() {
            let c = find_lfair_cycle(lg);
            prop_assert!(c.is_some());
            let c = c.unwrap();
            prop_assert!(c.validate(lg) && !c.is_constant());
        }
    }
}
