//! Dynamics graphs over strategy profiles.

pub mod belief;

use std::fmt;
use std::str::FromStr;

use crate::config::Limits;
use crate::error::Result;
use crate::game::{Game, Player, PlayerSet, Vertex};
use crate::graph::Digraph;
use crate::par;
use crate::strategy::{improving_moves, HistorySpace, ProfileSpace, StrategyProfile};

pub use belief::{build_belief_graph, BeliefGraph, LabelledGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynamicsKind {
    /// One decision at one history (history-based profiles).
    OneStep,
    /// One decision at one vertex.
    P1,
    /// As `P1`, restricted to best replies.
    BP1,
    /// Several players at once, each making a `P1` move.
    PC,
    /// Several players at once, each making a `BP1` move.
    BPC,
}

impl DynamicsKind {
    pub const ALL: [DynamicsKind; 5] = [
        DynamicsKind::OneStep,
        DynamicsKind::P1,
        DynamicsKind::BP1,
        DynamicsKind::PC,
        DynamicsKind::BPC,
    ];

    pub const POSITIONAL: [DynamicsKind; 4] =
        [DynamicsKind::P1, DynamicsKind::BP1, DynamicsKind::PC, DynamicsKind::BPC];

    pub fn as_str(self) -> &'static str {
        match self {
            DynamicsKind::OneStep => "1",
            DynamicsKind::P1 => "p1",
            DynamicsKind::BP1 => "bp1",
            DynamicsKind::PC => "pc",
            DynamicsKind::BPC => "bpc",
        }
    }

    fn best_reply(self) -> bool {
        matches!(self, DynamicsKind::BP1 | DynamicsKind::BPC)
    }

    fn concurrent(self) -> bool {
        matches!(self, DynamicsKind::PC | DynamicsKind::BPC)
    }
}

impl fmt::Display for DynamicsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DynamicsKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "one" | "onestep" => Ok(DynamicsKind::OneStep),
            "p1" => Ok(DynamicsKind::P1),
            "bp1" => Ok(DynamicsKind::BP1),
            "pc" => Ok(DynamicsKind::PC),
            "bpc" => Ok(DynamicsKind::BPC),
            other => Err(format!("unknown dynamics `{other}` (expected 1, p1, bp1, pc or bpc)")),
        }
    }
}

/// How node indices map back to profiles.
#[derive(Clone, Debug)]
pub enum NodeSpace {
    Positional(ProfileSpace),
    History(HistorySpace),
}

/// A dynamics graph: node `i` is the `i`-th profile in enumeration order,
/// and every edge carries the set of players whose strategy changed.
#[derive(Clone, Debug)]
pub struct DynamicsGraph {
    kind: DynamicsKind,
    n_players: u32,
    space: NodeSpace,
    graph: Digraph,
    changed: Vec<Vec<PlayerSet>>,
    names: Vec<String>,
}

impl DynamicsGraph {
    pub fn kind(&self) -> DynamicsKind {
        self.kind
    }

    pub fn n_players(&self) -> u32 {
        self.n_players
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn space(&self) -> &NodeSpace {
        &self.space
    }

    pub fn successors(&self, u: usize) -> &[usize] {
        self.graph.successors(u)
    }

    /// Players changed along the edge `u -> v`, if it exists.
    pub fn changed(&self, u: usize, v: usize) -> Option<PlayerSet> {
        let i = self.graph.successors(u).binary_search(&v).ok()?;
        Some(self.changed[u][i])
    }

    /// `(target, changed)` pairs leaving `u`.
    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = (usize, PlayerSet)> + '_ {
        self.graph
            .successors(u)
            .iter()
            .copied()
            .zip(self.changed[u].iter().copied())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, PlayerSet)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.out_edges(u).map(move |(v, c)| (u, v, c)))
    }

    /// Players that have at least one outgoing move at `u`.
    pub fn can_switch(&self, u: usize) -> PlayerSet {
        self.changed[u].iter().fold(PlayerSet::EMPTY, |a, &b| a.union(b))
    }

    pub fn name(&self, u: usize) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_of_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The positional profile at node `u`; `None` for history dynamics.
    pub fn profile(&self, u: usize) -> Option<StrategyProfile> {
        match &self.space {
            NodeSpace::Positional(s) => Some(s.profile_at(u as u64)),
            NodeSpace::History(_) => None,
        }
    }

    /// Node index of a positional profile.
    pub fn node_of(&self, sigma: &StrategyProfile) -> Option<usize> {
        match &self.space {
            NodeSpace::Positional(s) => Some(s.index_of(sigma) as usize),
            NodeSpace::History(_) => None,
        }
    }
}

/// Moves of one player at profile `sigma`: `(vertex, new successor)`.
fn player_moves(g: &Game, sigma: &StrategyProfile, p: Player, best_only: bool) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for v in g.vertices_of(p) {
        for (w, best) in improving_moves(g, sigma, v) {
            if best || !best_only {
                out.push((v, w));
            }
        }
    }
    out
}

fn positional_successors(g: &Game, space: &ProfileSpace, idx: u64, kind: DynamicsKind) -> Vec<(usize, PlayerSet)> {
    let sigma = space.profile_at(idx);
    let per_player: Vec<(Player, Vec<(Vertex, Vertex)>)> = g
        .players()
        .map(|p| (p, player_moves(g, &sigma, p, kind.best_reply())))
        .filter(|(_, m)| !m.is_empty())
        .collect();
    let mut out = Vec::new();
    if !kind.concurrent() {
        for (p, moves) in &per_player {
            for &(v, w) in moves {
                out.push((space.shifted(idx, &sigma, v, w) as usize, PlayerSet::single(*p)));
            }
        }
    } else {
        // every non-empty choice of at most one move per player
        let mut stack: Vec<(usize, u64, PlayerSet)> = vec![(0, idx, PlayerSet::EMPTY)];
        while let Some((k, target, set)) = stack.pop() {
            if k == per_player.len() {
                if !set.is_empty() {
                    out.push((target as usize, set));
                }
                continue;
            }
            let (p, moves) = &per_player[k];
            stack.push((k + 1, target, set));
            for &(v, w) in moves {
                let mut s = set;
                s.insert(*p);
                stack.push((k + 1, space.shifted(target, &sigma, v, w), s));
            }
        }
    }
    out.sort_unstable();
    out
}

fn assemble(
    kind: DynamicsKind,
    n_players: u32,
    space: NodeSpace,
    rows: Vec<Vec<(usize, PlayerSet)>>,
    names: Vec<String>,
) -> DynamicsGraph {
    let mut succ = Vec::with_capacity(rows.len());
    let mut changed = Vec::with_capacity(rows.len());
    for row in rows {
        let (s, c): (Vec<usize>, Vec<PlayerSet>) = row.into_iter().unzip();
        succ.push(s);
        changed.push(c);
    }
    DynamicsGraph {
        kind,
        n_players,
        space,
        graph: Digraph::new(succ),
        changed,
        names,
    }
}

/// Builds the dynamics graph of `kind` over all profiles of `g`.
pub fn build_dynamics(g: &Game, kind: DynamicsKind, limits: &Limits) -> Result<DynamicsGraph> {
    if kind == DynamicsKind::OneStep {
        return build_one_step(g, limits);
    }
    let space = ProfileSpace::new(g);
    let n = limits.check_count(space.count())? as usize;
    log::debug!("building {kind} dynamics over {n} profiles");
    let rows = par::map_range(n, limits.parallel, |i| positional_successors(g, &space, i as u64, kind));
    let names = par::map_range(n, limits.parallel, |i| space.name(&space.profile_at(i as u64)));
    Ok(assemble(kind, g.n_players(), NodeSpace::Positional(space), rows, names))
}

/// Builds the one-step dynamics over history profiles of an acyclic arena.
pub fn build_one_step(g: &Game, limits: &Limits) -> Result<DynamicsGraph> {
    let space = HistorySpace::new(g)?;
    let n = limits.check_count(space.count())? as usize;
    let hs = space.histories();
    let rows = par::map_range(n, limits.parallel, |i| {
        let prof = space.profile_at(i as u64);
        let mut out = Vec::new();
        for (h, hist) in hs.iter().enumerate() {
            let last = *hist.last().unwrap();
            let p = g.owner(last).expect("non-terminal vertex must be owned");
            let now = g.value(p, &space.outcome(g, &prof, hist));
            for &w in space.successors(h) {
                if w != prof.choice[h] && g.value(p, &space.outcome_with(g, &prof, hist, h, w)) > now {
                    out.push((space.shifted(i as u64, &prof, h, w) as usize, PlayerSet::single(p)));
                }
            }
        }
        out.sort_unstable();
        out
    });
    let names = par::map_range(n, limits.parallel, |i| space.name(g, &space.profile_at(i as u64)));
    Ok(assemble(
        DynamicsKind::OneStep,
        g.n_players(),
        NodeSpace::History(space),
        rows,
        names,
    ))
}
