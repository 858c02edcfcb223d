//! Randomized property suites over seeded instances. Each suite checks one
//! implication between the dynamics and the structure of a game and
//! reports every instance where it fails.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{equilibria, find_fair_cycle, terminates};
use crate::config::Limits;
use crate::dynamics::{build_dynamics, build_one_step, DynamicsKind};
use crate::error::Result;
use crate::format::game_to_json;
use crate::game::Game;
use crate::gen::{self, GameShape, OtgShape};
use crate::minors::{apply_script, find_dis_minor, script_to_json};
use crate::relations::largest_simulation;
use crate::spp::{extract_sdw_minor, find_dispute_wheel, find_sdw, routing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// The dynamics of a game simulates that of any of its minors
    /// (one-step on acyclic arenas, P1 and PC).
    MinorSimulation,
    /// Deleting only dominated edges preserves fair termination of bP1
    /// and bPC.
    DominantMinorFairness,
    /// If bPC fairly terminates on a one-target game, all its equilibria
    /// induce the same routing.
    UniqueEquilibrium,
    /// A one-target game without dispute wheel has fairly terminating bPC.
    NoWheelSafety,
    /// A strict dispute wheel forces a PC cycle, certified by its minor.
    StrictWheelCycle,
    /// On neighbour games, a strict wheel exists exactly when PC has a
    /// fair cycle.
    StrictWheelEquivalence,
    /// On neighbour games, PC has a fair cycle exactly when the game has a
    /// disagreement-shaped minor.
    DisMinorEquivalence,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::MinorSimulation,
        Suite::DominantMinorFairness,
        Suite::UniqueEquilibrium,
        Suite::NoWheelSafety,
        Suite::StrictWheelCycle,
        Suite::StrictWheelEquivalence,
        Suite::DisMinorEquivalence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::MinorSimulation => "minor-simulation",
            Suite::DominantMinorFairness => "dominant-minor-fairness",
            Suite::UniqueEquilibrium => "unique-equilibrium",
            Suite::NoWheelSafety => "no-wheel-safety",
            Suite::StrictWheelCycle => "strict-wheel-cycle",
            Suite::StrictWheelEquivalence => "strict-wheel-equivalence",
            Suite::DisMinorEquivalence => "dis-minor-equivalence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| {
            let all: Vec<&str> = Suite::ALL.iter().map(|x| x.as_str()).collect();
            format!("unknown suite `{s}` (expected one of {})", all.join(", "))
        })
    }
}

/// One failing instance, with enough to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub detail: String,
    pub game: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instances: usize,
    /// Instances where the hypothesis of the implication held.
    pub exercised: usize,
    pub violations: Vec<Violation>,
    /// Instances abandoned because a guard or budget ran out.
    pub inconclusive: Vec<(u64, String)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.inconclusive.is_empty()
    }
}

enum Outcome {
    Vacuous,
    Held,
    Violated(String),
}

fn held(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Held
    } else {
        Outcome::Violated(detail())
    }
}

/// Runs `count` instances seeded `seed, seed + 1, …`.
pub fn run_suite(suite: Suite, seed: u64, count: usize, limits: &Limits) -> SuiteReport {
    // instances run in parallel, so each one runs sequentially inside
    let inner = Limits {
        parallel: false,
        ..*limits
    };
    let results = crate::par::map_range(count, limits.parallel, |i| {
        let s = seed.wrapping_add(i as u64);
        let mut rng = gen::rng(s);
        let mut shown = String::new();
        let r = check(suite, &mut rng, &inner, &mut shown);
        (s, r, shown)
    });
    let mut report = SuiteReport {
        suite,
        instances: count,
        exercised: 0,
        violations: Vec::new(),
        inconclusive: Vec::new(),
    };
    for (s, r, game) in results {
        match r {
            Ok(Outcome::Vacuous) => {}
            Ok(Outcome::Held) => report.exercised += 1,
            Ok(Outcome::Violated(detail)) => {
                report.exercised += 1;
                report.violations.push(Violation { seed: s, detail, game });
            }
            Err(e) => report.inconclusive.push((s, e.to_string())),
        }
    }
    report
}

fn check(suite: Suite, rng: &mut rand_chacha::ChaCha8Rng, limits: &Limits, shown: &mut String) -> Result<Outcome> {
    let otg_shape = OtgShape {
        max_players: 5,
        ..OtgShape::default()
    };
    let notg_shape = OtgShape {
        neighbour: true,
        ..otg_shape
    };
    let show = |g: &Game, shown: &mut String| *shown = game_to_json(g);
    match suite {
        Suite::MinorSimulation => {
            use rand::Rng;
            let kind = [DynamicsKind::OneStep, DynamicsKind::P1, DynamicsKind::PC][rng.gen_range(0..3)];
            // history strategies multiply fast: keep one-step arenas small
            let shape = match kind {
                DynamicsKind::OneStep => GameShape {
                    max_players: 4,
                    max_vertices: 4,
                    max_out_degree: 2,
                    acyclic: true,
                    ..GameShape::default()
                },
                _ => GameShape {
                    max_players: 5,
                    max_vertices: 5,
                    ..GameShape::default()
                },
            };
            let g = gen::random_game(rng, &shape);
            show(&g, shown);
            let script = gen::random_script(rng, &g, 4);
            let minor = apply_script(&g, &script)?.game;
            let build = |x: &Game| match kind {
                DynamicsKind::OneStep => build_one_step(x, limits),
                k => build_dynamics(x, k, limits),
            };
            let (big, small) = (build(&g)?, build(&minor)?);
            let sim = largest_simulation(small.graph(), big.graph(), limits)?;
            let keeps_termination = !terminates(&big) || terminates(&small);
            Ok(held(sim.full_domain && keeps_termination, || {
                let dead_end = minor
                    .vertices()
                    .any(|v| minor.owner(v).is_none() && g.vertex(minor.name(v)).is_some_and(|w| g.owner(w).is_some()));
                format!(
                    "{kind}: minor after {} not simulated (full domain {}, termination kept {keeps_termination}{})",
                    script_to_json(&script).replace('\n', ""),
                    sim.full_domain,
                    if dead_end {
                        ", the script turns a player vertex into a terminal"
                    } else {
                        ""
                    }
                )
            }))
        }
        Suite::DominantMinorFairness => {
            let shape = GameShape {
                max_players: 5,
                max_vertices: 5,
                ..GameShape::default()
            };
            let g0 = gen::random_game(rng, &shape);
            let (g, script) = gen::random_dominant_minor(rng, &g0, 4, limits)?;
            show(&g, shown);
            let minor = apply_script(&g, &script)?.game;
            for kind in [DynamicsKind::BP1, DynamicsKind::BPC] {
                let a = find_fair_cycle(&build_dynamics(&g, kind, limits)?).fair;
                let b = find_fair_cycle(&build_dynamics(&minor, kind, limits)?).fair;
                if a != b {
                    let shared = g.players().any(|p| g.vertices_of(p).len() > 1);
                    return Ok(Outcome::Violated(format!(
                        "{kind}: fair cycle in game {a}, in dominant minor {b}, script {}{}",
                        script_to_json(&script).replace('\n', ""),
                        if shared {
                            " (a player owns several vertices)"
                        } else {
                            ""
                        }
                    )));
                }
            }
            Ok(if script.is_empty() {
                Outcome::Vacuous
            } else {
                Outcome::Held
            })
        }
        Suite::UniqueEquilibrium => {
            let otg = gen::random_otg(rng, &otg_shape);
            show(otg.game(), shown);
            let dg = build_dynamics(otg.game(), DynamicsKind::BPC, limits)?;
            if find_fair_cycle(&dg).fair {
                return Ok(Outcome::Vacuous);
            }
            let eq = equilibria(&dg);
            let routings: BTreeSet<_> = eq
                .iter()
                .map(|&u| routing(&otg, &dg.profile(u).expect("positional")))
                .collect();
            Ok(held(routings.len() == 1, || {
                format!(
                    "bPC fairly terminates but has {} equilibria with {} routings",
                    eq.len(),
                    routings.len()
                )
            }))
        }
        Suite::NoWheelSafety => {
            let otg = gen::random_otg(rng, &otg_shape);
            show(otg.game(), shown);
            if find_dispute_wheel(&otg).is_some() {
                return Ok(Outcome::Vacuous);
            }
            let r = find_fair_cycle(&build_dynamics(otg.game(), DynamicsKind::BPC, limits)?);
            Ok(held(!r.fair, || "no dispute wheel, yet bPC has a fair cycle".into()))
        }
        Suite::StrictWheelCycle => {
            let otg = gen::random_otg(rng, &otg_shape);
            show(otg.game(), shown);
            let Some(w) = find_sdw(&otg, limits.search_budget)? else {
                return Ok(Outcome::Vacuous);
            };
            let cert = extract_sdw_minor(&otg, &w);
            let pc = build_dynamics(otg.game(), DynamicsKind::PC, limits)?;
            Ok(match cert {
                Err(e) => Outcome::Violated(format!("strict wheel without certificate: {e}")),
                Ok(_) => held(!terminates(&pc), || "strict wheel, yet PC terminates".into()),
            })
        }
        Suite::StrictWheelEquivalence => {
            let otg = gen::random_otg(rng, &notg_shape);
            show(otg.game(), shown);
            let sdw = find_sdw(&otg, limits.search_budget)?.is_some();
            let fair = find_fair_cycle(&build_dynamics(otg.game(), DynamicsKind::PC, limits)?).fair;
            Ok(held(sdw == fair, || {
                format!("strict wheel {sdw}, PC fair cycle {fair}")
            }))
        }
        Suite::DisMinorEquivalence => {
            let otg = gen::random_otg(rng, &notg_shape);
            show(otg.game(), shown);
            let fair = find_fair_cycle(&build_dynamics(otg.game(), DynamicsKind::PC, limits)?).fair;
            let minor = find_dis_minor(otg.game(), limits)?.is_some();
            Ok(held(fair == minor, || {
                format!("PC fair cycle {fair}, disagreement minor {minor}")
            }))
        }
    }
}
