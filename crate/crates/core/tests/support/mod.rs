//! Shared helpers for the integration tests.

#![allow(dead_code)]

use std::collections::VecDeque;

use gamedyn_core::dynamics::DynamicsGraph;
use gamedyn_core::format::parse_game;
use gamedyn_core::game::{Player, PlayerSet};
use gamedyn_core::Game;

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

pub fn fixture(name: &str) -> Game {
    parse_game(&fixture_text(name)).unwrap_or_else(|e| panic!("parsing {name}: {e}"))
}

/// Brute-force fair-path oracle, independent of the component analysis.
///
/// An infinite path in a finite graph is fair exactly when it eventually
/// repeats a closed walk on which every player switches on some edge or is
/// unable to switch at some node. Such a closed walk through `s` exists iff
/// the product state `(s, all players)` is reachable from `(s, players
/// disabled at s)` in at least one step, where the second component
/// accumulates the players satisfied so far. Every node of a dynamics
/// graph is a possible start, so any `s` will do.
pub fn fair_cycle_oracle(dg: &DynamicsGraph) -> bool {
    let n = dg.node_count();
    let full = PlayerSet::all(dg.n_players());
    let disabled = |u: usize| PlayerSet(full.0 & !dg.can_switch(u).0);
    for s in 0..n {
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::new();
        let start = disabled(s);
        for (v, changed) in dg.out_edges(s) {
            let m = start.union(changed).union(disabled(v));
            if seen.insert((v, m)) {
                queue.push_back((v, m));
            }
        }
        while let Some((u, m)) = queue.pop_front() {
            if u == s && m == full {
                return true;
            }
            for (v, changed) in dg.out_edges(u) {
                let next = m.union(changed).union(disabled(v));
                if seen.insert((v, next)) {
                    queue.push_back((v, next));
                }
            }
        }
    }
    false
}

/// Players named in a set, for messages.
pub fn players(set: PlayerSet) -> Vec<Player> {
    set.iter().collect()
}
