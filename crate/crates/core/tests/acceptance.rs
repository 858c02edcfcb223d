//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion.

mod support;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gamedyn_core::analysis::{
    check_diamond, equilibria, find_cycle, find_fair_cycle, find_lfair_cycle, sinks, terminates, FairClause,
};
use gamedyn_core::dynamics::{build_belief_graph, build_dynamics, DynamicsGraph, DynamicsKind};
use gamedyn_core::gen::{self, GameShape};
use gamedyn_core::minors::{apply_script, find_dis_minor, is_dominated, match_dis, parse_script};
use gamedyn_core::spp::{
    check_sdw, find_dispute_wheel, find_sdw, is_notg, parse_spp, safety_verdict, validate_otg, Mode,
};
use gamedyn_core::strategy::ProfileSpace;
use gamedyn_core::theorems::{run_suite, Suite};
use gamedyn_core::{Game, Limits, Player};
use support::{fair_cycle_oracle, fixture, fixture_text};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn named_edges(dg: &DynamicsGraph) -> BTreeSet<(String, String)> {
    dg.edges()
        .map(|(u, v, _)| (dg.name(u).to_string(), dg.name(v).to_string()))
        .collect()
}

fn pairs(list: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    list.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect()
}

fn names(dg: &DynamicsGraph, nodes: &[usize]) -> BTreeSet<String> {
    nodes.iter().map(|&u| dg.name(u).to_string()).collect()
}

fn two_player_graphs() -> Check {
    let g = fixture("disagreement.json");
    let limits = Limits::default();
    let p1 = build_dynamics(&g, DynamicsKind::P1, &limits).map_err(err)?;
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits).map_err(err)?;
    let nodes: BTreeSet<String> = p1.names().iter().cloned().collect();
    let want_nodes: BTreeSet<String> = ["c1c2", "s1c2", "c1s2", "s1s2"].iter().map(|s| s.to_string()).collect();
    ensure(nodes == want_nodes, || format!("P1 nodes {nodes:?}"))?;
    let p1_edges = pairs(&[("c1c2", "s1c2"), ("c1c2", "c1s2"), ("s1s2", "s1c2"), ("s1s2", "c1s2")]);
    ensure(named_edges(&p1) == p1_edges, || {
        format!("P1 edges {:?}", named_edges(&p1))
    })?;
    let mut pc_edges = p1_edges;
    pc_edges.extend(pairs(&[("c1c2", "s1s2"), ("s1s2", "c1c2")]));
    ensure(named_edges(&pc) == pc_edges, || {
        format!("PC edges {:?}", named_edges(&pc))
    })
}

fn termination_table() -> Check {
    let g = fixture("disagreement.json");
    let limits = Limits::default();
    let p1 = build_dynamics(&g, DynamicsKind::P1, &limits).map_err(err)?;
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits).map_err(err)?;
    ensure(terminates(&p1), || "P1 should terminate".into())?;
    ensure(!terminates(&pc), || "PC should not terminate".into())?;
    let want: BTreeSet<String> = ["s1c2", "c1s2"].iter().map(|s| s.to_string()).collect();
    for dg in [&p1, &pc] {
        let eq = names(dg, &equilibria(dg));
        ensure(eq == want, || format!("{} equilibria {eq:?}", dg.kind()))?;
    }
    Ok(())
}

fn best_reply_counterexample() -> Check {
    let g = fixture("hidden_disagreement.json");
    let limits = Limits::default();
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits).map_err(err)?;
    let bpc = build_dynamics(&g, DynamicsKind::BPC, &limits).map_err(err)?;
    ensure(!terminates(&pc), || "PC should not terminate".into())?;
    ensure(terminates(&bpc), || {
        format!("bPC should terminate, found {:?}", find_cycle(&bpc))
    })?;
    let found = find_dis_minor(&g, &limits)
        .map_err(err)?
        .ok_or("no disagreement minor found")?;
    ensure(match_dis(&found.minor).is_some(), || {
        "minor lacks the disagreement shape".into()
    })?;
    let dis = fixture("disagreement.json");
    let edges = |x: &Game| -> BTreeSet<(String, String, Option<String>)> {
        x.edges()
            .map(|(u, v)| (x.name(u).into(), x.name(v).into(), x.edge_label(u, v).map(String::from)))
            .collect()
    };
    ensure(edges(&found.minor) == edges(&dis), || {
        format!("minor arena {:?}", edges(&found.minor))
    })?;
    for p in [Player(1), Player(2)] {
        let show = |x: &Game| -> Vec<Vec<String>> {
            x.preference(p)
                .classes()
                .iter()
                .map(|c| c.iter().map(|play| x.play_to_string(play)).collect())
                .collect()
        };
        ensure(show(&found.minor) == show(&dis), || {
            format!("player {p}: {:?}", show(&found.minor))
        })?;
    }
    Ok(())
}

fn unfair_cycle() -> Check {
    let g = fixture("unfair_cycle.json");
    let pc = build_dynamics(&g, DynamicsKind::PC, &Limits::default()).map_err(err)?;
    ensure(find_cycle(&pc).is_some(), || "PC should have a cycle".into())?;
    let report = find_fair_cycle(&pc);
    ensure(!report.fair, || format!("unexpected fair cycle {:?}", report.witness))?;
    let culprits: Vec<Player> = report
        .clauses
        .iter()
        .filter(|(_, c)| *c == FairClause::EnabledNeverSwitches)
        .map(|&(p, _)| p)
        .collect();
    ensure(culprits == vec![Player(3)], || {
        format!("non-switching players {culprits:?}")
    })
}

fn dominant_minor_counterexample() -> Check {
    let g = fixture("dominated_exit.json");
    let limits = Limits::default();
    let pc = build_dynamics(&g, DynamicsKind::PC, &limits).map_err(err)?;
    let space = ProfileSpace::new(&g);
    // choices of v1, v2, v3 in the listed order; v4 has no choice
    let listed = [
        ("v2", "vbot", "vbot"),
        ("v2", "v3", "vbot"),
        ("vbot", "v3", "vbot"),
        ("vbot", "v3", "v1"),
        ("v4", "v3", "v1"),
        ("v4", "vbot", "v1"),
        ("v4", "vbot", "vbot"),
        ("v2", "vbot", "vbot"),
    ];
    let node = |(a, b, c): (&str, &str, &str)| -> Result<usize, String> {
        let name = format!("{a},{b},{c}");
        pc.node_of_name(&name).ok_or(format!("no profile {name}"))
    };
    for w in listed.windows(2) {
        let (u, v) = (node(w[0])?, node(w[1])?);
        ensure(pc.graph().has_edge(u, v), || {
            format!("missing PC edge {} -> {}", pc.name(u), pc.name(v))
        })?;
    }
    ensure(space.count() == 12, || format!("{} profiles", space.count()))?;
    let v = |n: &str| g.vertex(n).unwrap();
    let dominated = is_dominated(&g, (v("v1"), v("vbot")), (v("v1"), v("v4")), &limits).map_err(err)?;
    ensure(dominated, || "(v1, vbot) should be dominated by (v1, v4)".into())?;
    let script = parse_script(&fixture_text("dominated_exit.script.json")).map_err(err)?;
    let minor = apply_script(&g, &script).map_err(err)?.game;
    let pc2 = build_dynamics(&minor, DynamicsKind::PC, &limits).map_err(err)?;
    ensure(terminates(&pc2), || {
        format!("minor still cycles: {:?}", find_cycle(&pc2))
    })
}

fn routing_pipeline() -> Check {
    let otg = parse_spp(&fixture_text("disagreement.spp.json"), false).map_err(err)?;
    let g = otg.game();
    let permitted: Vec<_> = g.players().map(|p| otg.permitted(p).to_vec()).collect();
    let diags = validate_otg(g, &permitted);
    ensure(diags.is_empty(), || format!("diagnostics {diags:?}"))?;
    ensure(is_notg(&otg), || "should be a neighbour game".into())?;
    let dw = find_dispute_wheel(&otg).ok_or("no dispute wheel")?;
    let named = dw.named(g);
    ensure(named.pivots == ["v1", "v2"], || format!("pivots {:?}", named.pivots))?;
    ensure(named.spokes == [vec!["v1", "vbot"], vec!["v2", "vbot"]], || {
        format!("spokes {:?}", named.spokes)
    })?;
    ensure(named.rims == [vec!["v1"], vec!["v2"]], || {
        format!("rims {:?}", named.rims)
    })?;
    let sdw = find_sdw(&otg, Limits::default().search_budget)
        .map_err(err)?
        .ok_or("no strict wheel")?;
    check_sdw(&otg, &sdw)?;
    let verdict = safety_verdict(&otg, Mode::Both, &Limits::default()).map_err(err)?;
    ensure(verdict.status.is_safe() == Some(false), || {
        format!("status {}", verdict.status)
    })?;
    let s = verdict.structural.as_ref().ok_or("no structural finding")?;
    let e = verdict.exact.as_ref().ok_or("no exact finding")?;
    ensure(
        s.status.is_safe() == Some(false) && e.status.is_safe() == Some(false),
        || format!("structural {} vs exact {}", s.status, e.status),
    )
}

fn property_suites() -> Check {
    let limits = Limits::default();
    let mut failures = Vec::new();
    for suite in Suite::ALL {
        let t = Instant::now();
        let r = run_suite(suite, 20_240_601, 1000, &limits);
        println!(
            "    {:<26} instances {} exercised {:>4} violations {} inconclusive {} ({:.2?})",
            suite.as_str(),
            r.instances,
            r.exercised,
            r.violations.len(),
            r.inconclusive.len(),
            t.elapsed()
        );
        if !r.passed() {
            let first = r
                .violations
                .first()
                .map(|v| format!("seed {}: {}", v.seed, v.detail))
                .or_else(|| r.inconclusive.first().map(|(s, e)| format!("seed {s}: {e}")))
                .unwrap_or_default();
            failures.push(format!("{suite}: {first}"));
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))
}

fn belief_pipeline() -> Check {
    let g = fixture("disagreement.json");
    let bg = build_belief_graph(&g, &Limits::default()).map_err(err)?;
    let lg = bg.graph();
    ensure(bg.node_count() == 16, || format!("{} nodes", bg.node_count()))?;
    ensure(lg.n_labels() == 3, || format!("{} labels", lg.n_labels()))?;
    let s = sinks(lg);
    let sink_names: BTreeSet<&str> = s.iter().map(|&m| bg.name(m)).collect();
    let want: BTreeSet<&str> = ["s1c2|s1c2", "c1s2|c1s2"].into_iter().collect();
    ensure(sink_names == want, || format!("sinks {sink_names:?}"))?;
    let d = check_diamond(lg);
    ensure(d.holds, || format!("diamond fails at {:?}", d.counterexample))?;
    let c = find_lfair_cycle(lg).ok_or("no L-fair cycle")?;
    ensure(
        c.validate(lg) && !c.is_constant() && c.covers_all_labels(lg.n_labels()),
        || format!("bad witness {c:?}"),
    )
}

fn oracle_equivalence() -> Check {
    let limits = Limits::sequential();
    let shape = GameShape {
        max_players: 3,
        max_vertices: 5,
        ..GameShape::default()
    };
    let mut checked = 0;
    for seed in 0..600u64 {
        let g = gen::random_game(&mut gen::rng(seed), &shape);
        if ProfileSpace::new(&g).count() > 64 {
            continue;
        }
        for kind in DynamicsKind::POSITIONAL {
            let dg = build_dynamics(&g, kind, &limits).map_err(err)?;
            let report = find_fair_cycle(&dg);
            let oracle = fair_cycle_oracle(&dg);
            ensure(report.fair == oracle, || {
                format!("seed {seed} {kind}: analysis {} oracle {oracle}", report.fair)
            })?;
            ensure(report.validate(&dg), || {
                format!("seed {seed} {kind}: witness does not replay")
            })?;
            checked += 1;
        }
    }
    ensure(checked >= 1000, || format!("only {checked} graphs compared"))
}

const BUDGET: Duration = Duration::from_secs(10);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 two-player dynamics graphs", two_player_graphs),
        ("2 termination and equilibria", termination_table),
        ("3 best replies hide a minor", best_reply_counterexample),
        ("4 cycle without fair cycle", unfair_cycle),
        ("5 dominated edge breaks a PC cycle", dominant_minor_counterexample),
        ("6 routing safety pipeline", routing_pipeline),
        ("7 randomized property suites", property_suites),
        ("8 belief graph analyses", belief_pipeline),
        ("9 fair cycles match the oracle", oracle_equivalence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let r = check();
        let took = t.elapsed();
        let r = r.and_then(|_| ensure(took < BUDGET, || format!("took {took:.2?}")));
        match r {
            Ok(()) => println!("criterion {name}: PASS ({took:.2?})"),
            Err(e) => {
                failed += 1;
                println!("criterion {name}: FAIL ({took:.2?}): {e}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
