//! One-target games: the game-theoretic view of interdomain routing.
//!
//! Every player owns one vertex and routes toward a single terminal; the
//! plays a player ranks explicitly are its permitted paths.

pub mod format;
pub mod verdict;
pub mod wheel;

use std::collections::BTreeMap;

use crate::error::{Diagnostic, DiagnosticKind, Error, Result};
use crate::game::{Game, Play, Player, Vertex};
use crate::strategy::{outcome, StrategyProfile};

pub use format::parse_spp;
pub use verdict::{safety_verdict, Mode, SafetyStatus, SafetyVerdict};
pub use wheel::{
    check_dw, check_sdw, dis_minor_from_wheel, extract_sdw_minor, find_dispute_wheel, find_sdw, DisputeWheel, SdwMinor,
};

/// A validated one-target game.
#[derive(Clone, Debug)]
pub struct OneTargetGame {
    game: Game,
    target: Vertex,
    home: Vec<Vertex>,
    permitted: Vec<Vec<Play>>,
    index: BTreeMap<Play, (Player, usize)>,
}

impl OneTargetGame {
    /// Checks the axioms against explicit permitted-path sets (one per
    /// player, indexed from player 1).
    pub fn new(game: Game, permitted: Vec<Vec<Play>>) -> Result<OneTargetGame> {
        let diags = validate_otg(&game, &permitted);
        if !diags.is_empty() {
            return Err(Error::InvalidOtg(diags));
        }
        let target = game.terminals().next().unwrap();
        let home = game.players().map(|p| game.vertices_of(p)[0]).collect();
        let mut permitted = permitted;
        for (i, ps) in permitted.iter_mut().enumerate() {
            let p = Player::from_index(i);
            ps.sort_by(|a, b| game.value(p, b).cmp(&game.value(p, a)).then_with(|| a.cmp(b)));
        }
        let index = permitted
            .iter()
            .enumerate()
            .flat_map(|(i, ps)| {
                ps.iter()
                    .enumerate()
                    .map(move |(k, play)| (play.clone(), (Player::from_index(i), k)))
            })
            .collect();
        Ok(OneTargetGame {
            game,
            target,
            home,
            permitted,
            index,
        })
    }

    /// Reads permitted paths off the preferences: every finite play a
    /// player ranks from its own vertex to the target.
    pub fn from_game(game: Game) -> Result<OneTargetGame> {
        let permitted = derive_permitted(&game);
        OneTargetGame::new(game, permitted)
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn target(&self) -> Vertex {
        self.target
    }

    /// The vertex owned by `p`.
    pub fn home(&self, p: Player) -> Vertex {
        self.home[p.index()]
    }

    /// Permitted paths of `p`, best first.
    pub fn permitted(&self, p: Player) -> &[Play] {
        &self.permitted[p.index()]
    }

    pub fn is_permitted(&self, play: &Play) -> bool {
        self.index.contains_key(play)
    }

    /// `(player, position)` of a permitted path.
    pub fn permitted_index(&self, play: &Play) -> Option<(Player, usize)> {
        self.index.get(play).copied()
    }

    pub fn owner(&self, v: Vertex) -> Option<Player> {
        self.game.owner(v)
    }

    pub fn value_at(&self, v: Vertex, play: &Play) -> u32 {
        self.game.value(self.game.owner(v).unwrap(), play)
    }
}

fn derive_permitted(game: &Game) -> Vec<Vec<Play>> {
    let target = game.terminals().next();
    game.players()
        .map(|p| {
            let home = game.vertices_of(p).first().copied();
            game.preference(p)
                .plays()
                .filter(|play| match play {
                    Play::Finite(path) => Some(path[0]) == home && target == path.last().copied(),
                    _ => false,
                })
                .cloned()
                .collect()
        })
        .collect()
}

/// Checks the one-target axioms; an empty result means all hold.
pub fn validate_otg(g: &Game, permitted: &[Vec<Play>]) -> Vec<Diagnostic> {
    use DiagnosticKind::*;
    let mut out = crate::game::validate_game(g);
    let terminals: Vec<Vertex> = g.terminals().collect();
    if terminals.len() != 1 {
        out.push(Diagnostic::new(
            TargetCount,
            format!(
                "expected exactly one terminal vertex, found {}: [{}]",
                terminals.len(),
                terminals.iter().map(|&v| g.name(v)).collect::<Vec<_>>().join(", ")
            ),
        ));
    }
    for p in g.players() {
        let vs = g.vertices_of(p);
        if vs.len() != 1 {
            out.push(Diagnostic::new(
                StatesPerPlayer,
                format!("player {p} owns {} vertices, expected exactly one", vs.len()),
            ));
        }
    }
    if permitted.len() != g.n_players() as usize {
        out.push(Diagnostic::new(
            StatesPerPlayer,
            format!("{} permitted-path sets for {} players", permitted.len(), g.n_players()),
        ));
    }
    if !out.is_empty() {
        return out;
    }
    let target = terminals[0];
    let show = |p: &Play| g.play_to_string(p);
    let mut all: BTreeMap<&Play, Player> = BTreeMap::new();
    for p in g.players() {
        let home = g.vertices_of(p)[0];
        for play in &permitted[p.index()] {
            let ok = match play {
                Play::Finite(path) => {
                    path[0] == home && *path.last().unwrap() == target && g.is_play(play) && play.is_positional()
                }
                _ => false,
            };
            if !ok {
                out.push(Diagnostic::new(
                    InvalidPermitted,
                    format!(
                        "player {p}: `{}` is not a simple path from `{}` to `{}`",
                        show(play),
                        g.name(home),
                        g.name(target)
                    ),
                ));
            }
            all.insert(play, p);
        }
    }
    if !out.is_empty() {
        return out;
    }
    for p in g.players() {
        let home = g.vertices_of(p)[0];
        let perm = &permitted[p.index()];
        let forbidden: Vec<Play> = g
            .positional_plays(home)
            .into_iter()
            .filter(|x| !perm.contains(x))
            .collect();
        let val = |x: &Play| g.value(p, x);
        if let (Some(f), Some(q)) = (
            forbidden.iter().max_by_key(|x| val(x)),
            perm.iter().min_by_key(|x| val(x)),
        ) {
            if val(f) >= val(q) {
                out.push(Diagnostic::new(
                    ForbiddenAbovePermitted,
                    format!(
                        "player {p}: forbidden `{}` is not below permitted `{}`",
                        show(f),
                        show(q)
                    ),
                ));
            }
        }
        if let (Some(lo), Some(hi)) = (
            forbidden.iter().min_by_key(|x| val(x)),
            forbidden.iter().max_by_key(|x| val(x)),
        ) {
            if val(lo) != val(hi) {
                out.push(Diagnostic::new(
                    ForbiddenPlateau,
                    format!(
                        "player {p}: forbidden `{}` and `{}` are ranked differently",
                        show(lo),
                        show(hi)
                    ),
                ));
            }
        }
        for (i, a) in perm.iter().enumerate() {
            for b in &perm[i + 1..] {
                if val(a) == val(b) && next_hop(a) != next_hop(b) {
                    out.push(Diagnostic::new(
                        TieNextHop,
                        format!(
                            "player {p}: `{}` and `{}` are tied but leave through different neighbours",
                            show(a),
                            show(b)
                        ),
                    ));
                }
            }
        }
        for play in perm {
            let Play::Finite(path) = play else { continue };
            for k in 1..path.len() - 1 {
                let suffix = Play::Finite(path[k..].to_vec());
                if !all.contains_key(&suffix) {
                    out.push(Diagnostic::new(
                        SuffixClosure,
                        format!(
                            "player {p}: suffix `{}` of `{}` is not permitted",
                            show(&suffix),
                            show(play)
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// The routing a profile induces: each player's route when it is
/// permitted, `None` when the player is left with a forbidden path.
/// Profiles that differ only in choices of route-less players induce the
/// same routing.
pub fn routing(otg: &OneTargetGame, sigma: &StrategyProfile) -> Vec<Option<Play>> {
    let g = otg.game();
    g.players()
        .map(|p| {
            let play = outcome(g, sigma, otg.home(p));
            otg.is_permitted(&play).then_some(play)
        })
        .collect()
}

/// Second vertex of a path.
pub fn next_hop(play: &Play) -> Option<Vertex> {
    match play {
        Play::Finite(p) => p.get(1).copied(),
        Play::Lasso { .. } => play.vertices().nth(1),
    }
}

/// True when permitted paths sharing a next hop are always tied.
pub fn is_notg(otg: &OneTargetGame) -> bool {
    otg.game.players().all(|p| {
        let perm = otg.permitted(p);
        perm.iter().enumerate().all(|(i, a)| {
            perm[i + 1..]
                .iter()
                .all(|b| next_hop(a) != next_hop(b) || otg.game.value(p, a) == otg.game.value(p, b))
        })
    })
}
