//! Safety verdicts: does the best-reply concurrent dynamics of a
//! one-target game fairly terminate?

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::wheel::NamedWheel;
use super::{find_dispute_wheel, find_sdw, is_notg, routing, DisputeWheel, OneTargetGame};
use crate::analysis::find_fair_cycle;
use crate::config::Limits;
use crate::dynamics::{build_dynamics, DynamicsKind};
use crate::error::{Error, Result};
use crate::game::{Game, Vertex};
use crate::strategy::{improving_moves, ProfileSpace, StrategyProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Structural,
    Exact,
    Both,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "structural" => Ok(Mode::Structural),
            "exact" => Ok(Mode::Exact),
            "both" => Ok(Mode::Both),
            _ => Err(format!("unknown mode `{s}` (expected structural, exact or both)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SafetyStatus {
    /// No dispute wheel at all.
    SafeNoDW,
    /// A strict wheel whose two alternating profiles form a fair cycle.
    UnsafeSDW,
    /// Two or more profiles without improving moves.
    UnsafeMultiEquilibria,
    /// None of the structural tests decides.
    UnknownStructural,
    /// Model checking found no fair cycle.
    Safe,
    /// Model checking found a fair cycle.
    UnsafeModelChecked,
}

impl SafetyStatus {
    /// `Some(true)` for safe, `Some(false)` for unsafe.
    pub fn is_safe(self) -> Option<bool> {
        match self {
            SafetyStatus::SafeNoDW | SafetyStatus::Safe => Some(true),
            SafetyStatus::UnknownStructural => None,
            _ => Some(false),
        }
    }
}

impl fmt::Display for SafetyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// What backs a status.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    NoDisputeWheel,
    StrictWheel { wheel: NamedWheel, cycle: Vec<String> },
    Equilibria { profiles: Vec<String> },
    Undecided { dispute_wheel: Option<NamedWheel> },
    NoFairCycle,
    FairCycle { cycle: Vec<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub status: SafetyStatus,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct SafetyVerdict {
    pub mode: Mode,
    pub status: SafetyStatus,
    pub structural: Option<Finding>,
    pub exact: Option<Finding>,
}

pub fn safety_verdict(otg: &OneTargetGame, mode: Mode, limits: &Limits) -> Result<SafetyVerdict> {
    let structural = match mode {
        Mode::Exact => None,
        _ => Some(structural(otg, limits)?),
    };
    let exact = match mode {
        Mode::Structural => None,
        _ => Some(exact(otg.game(), limits)?),
    };
    if let (Some(s), Some(e)) = (&structural, &exact) {
        if let (Some(a), Some(b)) = (s.status.is_safe(), e.status.is_safe()) {
            if a != b {
                return Err(Error::InconsistentVerdict(format!(
                    "structural analysis says {} but model checking says {}",
                    s.status, e.status
                )));
            }
        }
    }
    let status = match (&structural, &exact) {
        (Some(s), _) if s.status.is_safe().is_some() => s.status,
        (_, Some(e)) => e.status,
        (Some(s), None) => s.status,
        (None, None) => unreachable!(),
    };
    Ok(SafetyVerdict {
        mode,
        status,
        structural,
        exact,
    })
}

fn structural(otg: &OneTargetGame, limits: &Limits) -> Result<Finding> {
    let g = otg.game();
    let Some(dw) = find_dispute_wheel(otg) else {
        return Ok(Finding {
            status: SafetyStatus::SafeNoDW,
            evidence: Evidence::NoDisputeWheel,
        });
    };
    if is_notg(otg) {
        match find_sdw(otg, limits.search_budget) {
            Ok(Some(w)) => {
                if let Some((a, b)) = lift_wheel(otg, &w) {
                    let space = ProfileSpace::new(g);
                    return Ok(Finding {
                        status: SafetyStatus::UnsafeSDW,
                        evidence: Evidence::StrictWheel {
                            wheel: w.named(g),
                            cycle: vec![space.name(&a), space.name(&b)],
                        },
                    });
                }
                log::info!("strict wheel found but its profiles do not alternate under best replies");
            }
            Ok(None) => {}
            Err(Error::SearchBudgetExceeded(b)) => log::warn!("strict-wheel search stopped after {b} steps"),
            Err(e) => return Err(e),
        }
    }
    let space = ProfileSpace::new(g);
    match limits.check_count(space.count()) {
        Ok(_) => {
            // equilibria differing only where a player has no route are
            // the same routing
            let mut seen = BTreeSet::new();
            let stable: Vec<String> = space
                .iter()
                .filter(|s| g.non_terminals().all(|v| improving_moves(g, s, v).is_empty()))
                .filter(|s| seen.insert(routing(otg, s)))
                .take(2)
                .map(|s| space.name(&s))
                .collect();
            if stable.len() >= 2 {
                return Ok(Finding {
                    status: SafetyStatus::UnsafeMultiEquilibria,
                    evidence: Evidence::Equilibria { profiles: stable },
                });
            }
        }
        Err(_) => log::warn!("profile space too large to count equilibria"),
    }
    Ok(Finding {
        status: SafetyStatus::UnknownStructural,
        evidence: Evidence::Undecided {
            dispute_wheel: Some(dw.named(g)),
        },
    })
}

fn exact(g: &Game, limits: &Limits) -> Result<Finding> {
    let dg = build_dynamics(g, DynamicsKind::BPC, limits)?;
    let report = find_fair_cycle(&dg);
    Ok(match report.witness {
        Some(w) if report.fair => Finding {
            status: SafetyStatus::UnsafeModelChecked,
            evidence: Evidence::FairCycle {
                cycle: w.cycle.iter().map(|&u| dg.name(u).to_string()).collect(),
            },
        },
        _ => Finding {
            status: SafetyStatus::Safe,
            evidence: Evidence::NoFairCycle,
        },
    })
}

/// Above this many free vertex assignments the lift is not attempted.
const LIFT_LIMIT: u64 = 4096;

/// Lifts a strict wheel to two profiles of `g`: pivots route along their
/// rim or their spoke, vertices on the wheel follow it, and the rest are
/// fixed jointly. Succeeds when the two profiles reach each other by best
/// replies of exactly the pivots and every other player is disabled in
/// one of them, i.e. they form a fair best-reply cycle.
pub fn lift_wheel(otg: &OneTargetGame, w: &DisputeWheel) -> Option<(StrategyProfile, StrategyProfile)> {
    let g = otg.game();
    let k = w.len();
    let mut towards: Vec<Option<Vertex>> = vec![None; g.vertex_count()];
    let mut direct = towards.clone();
    let mut follow = |path: &[Vertex], skip_first: bool| {
        for e in path.windows(2).skip(usize::from(skip_first)) {
            towards[e[0].index()] = Some(e[1]);
            direct[e[0].index()] = Some(e[1]);
        }
    };
    for i in 0..k {
        follow(&w.spokes[i], true);
        follow(&w.rim_path(i), true);
    }
    for i in 0..k {
        let u = w.pivots[i];
        towards[u.index()] = Some(w.rim_path(i)[1]);
        direct[u.index()] = Some(w.spokes[i][1]);
    }
    let free: Vec<Vertex> = g.non_terminals().filter(|v| towards[v.index()].is_none()).collect();
    let combos = free
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(g.successors(v).len() as u64))
        .filter(|&c| c <= LIFT_LIMIT)?;
    let pivots: Vec<Vertex> = w.pivots.clone();
    for mut idx in 0..combos {
        let (mut a, mut b) = (towards.clone(), direct.clone());
        for &v in &free {
            let s = g.successors(v);
            let pick = s[(idx % s.len() as u64) as usize];
            idx /= s.len() as u64;
            a[v.index()] = Some(pick);
            b[v.index()] = Some(pick);
        }
        let a = StrategyProfile::from_choices(a);
        let b = StrategyProfile::from_choices(b);
        let best_step = |from: &StrategyProfile, to: &StrategyProfile| {
            pivots
                .iter()
                .all(|&u| improving_moves(g, from, u).contains(&(to.get(u).unwrap(), true)))
        };
        let disabled = |s: &StrategyProfile, v: Vertex| improving_moves(g, s, v).iter().all(|&(_, best)| !best);
        let others_fair = g
            .non_terminals()
            .filter(|v| !pivots.contains(v))
            .all(|v| disabled(&a, v) || disabled(&b, v));
        if best_step(&a, &b) && best_step(&b, &a) && others_fair {
            return Some((a, b));
        }
    }
    None
}
