//! Arenas, plays, preferences and games.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Diagnostic, DiagnosticKind, Error, Result};

/// Dense vertex index; order is declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub u32);

impl Vertex {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Player identifier, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Player(pub u32);

impl Player {
    #[inline]
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Player {
        Player(i as u32 + 1)
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of players as a bitmask (at most 64 players).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerSet(pub u64);

impl PlayerSet {
    pub const EMPTY: PlayerSet = PlayerSet(0);

    pub fn single(p: Player) -> Self {
        PlayerSet(1 << p.index())
    }

    pub fn all(n: u32) -> Self {
        if n >= 64 {
            PlayerSet(u64::MAX)
        } else {
            PlayerSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, p: Player) -> bool {
        self.0 & (1 << p.index()) != 0
    }

    pub fn insert(&mut self, p: Player) {
        self.0 |= 1 << p.index();
    }

    pub fn union(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Player> {
        (0..64usize)
            .filter(move |i| self.0 & (1 << i) != 0)
            .map(Player::from_index)
    }
}

impl fmt::Display for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// A maximal play, stored in canonical form.
///
/// Lassos are normalized so that the loop is primitive, the stem is as
/// short as possible and, among the rotations that remain, the loop is the
/// lexicographically smallest one by vertex index. Two descriptions of the
/// same infinite word therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Play {
    Finite(Vec<Vertex>),
    Lasso { stem: Vec<Vertex>, cycle: Vec<Vertex> },
}

impl Play {
    /// Builds the canonical lasso for `stem · cycle^ω`.
    pub fn lasso(stem: Vec<Vertex>, cycle: Vec<Vertex>) -> Play {
        assert!(!cycle.is_empty(), "lasso loop must be non-empty");
        let (stem, cycle) = normalize_lasso(stem, cycle);
        Play::Lasso { stem, cycle }
    }

    pub fn first(&self) -> Vertex {
        match self {
            Play::Finite(p) => p[0],
            Play::Lasso { stem, cycle } => *stem.first().unwrap_or(&cycle[0]),
        }
    }

    /// Vertices along the walk: the stem, then one turn of the loop. A
    /// vertex may appear twice when the stem ends inside the loop.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let (a, b): (&[Vertex], &[Vertex]) = match self {
            Play::Finite(p) => (p, &[]),
            Play::Lasso { stem, cycle } => (stem, cycle),
        };
        a.iter().chain(b.iter()).copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices().any(|x| x == v)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Play::Finite(_))
    }

    /// True when every vertex is always left through the same edge, i.e.
    /// the play can arise from a positional profile.
    pub fn is_positional(&self) -> bool {
        let mut next = std::collections::BTreeMap::new();
        let consistent = self.edges().into_iter().all(|(u, v)| *next.entry(u).or_insert(v) == v);
        match self {
            Play::Finite(p) => consistent && p.iter().collect::<BTreeSet<_>>().len() == p.len(),
            Play::Lasso { .. } => consistent,
        }
    }

    /// Consecutive vertex pairs, including the loop-closing edge.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        match self {
            Play::Finite(p) => p.windows(2).map(|w| (w[0], w[1])).collect(),
            Play::Lasso { stem, cycle } => {
                let mut seq: Vec<Vertex> = stem.clone();
                seq.extend_from_slice(cycle);
                let mut out: Vec<(Vertex, Vertex)> = seq.windows(2).map(|w| (w[0], w[1])).collect();
                out.push((*cycle.last().unwrap(), cycle[0]));
                out
            }
        }
    }

    /// Applies `f` to every vertex, dropping those mapped to `None`, and
    /// re-canonicalizes. Returns `None` if a loop becomes empty.
    pub fn filter_map_vertices(&self, f: impl Fn(Vertex) -> Option<Vertex>) -> Option<Play> {
        match self {
            Play::Finite(p) => {
                let q: Vec<Vertex> = p.iter().filter_map(|&v| f(v)).collect();
                if q.is_empty() {
                    None
                } else {
                    Some(Play::Finite(q))
                }
            }
            Play::Lasso { stem, cycle } => {
                let s: Vec<Vertex> = stem.iter().filter_map(|&v| f(v)).collect();
                let c: Vec<Vertex> = cycle.iter().filter_map(|&v| f(v)).collect();
                if c.is_empty() {
                    None
                } else {
                    Some(Play::lasso(s, c))
                }
            }
        }
    }
}

fn normalize_lasso(stem: Vec<Vertex>, cycle: Vec<Vertex>) -> (Vec<Vertex>, Vec<Vertex>) {
    // primitive root of the loop
    let n = cycle.len();
    let p = (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| cycle[i] == cycle[i - p]))
        .unwrap_or(n);
    let mut lp: Vec<Vertex> = cycle[..p].to_vec();
    // absorb the tail of the stem into the loop
    let mut t = stem.len();
    while t > 0 && stem[t - 1] == lp[p - 1] {
        lp.rotate_right(1);
        t -= 1;
    }
    // smallest rotation
    let best = (0..p)
        .min_by(|&a, &b| (0..p).map(|i| lp[(a + i) % p]).cmp((0..p).map(|i| lp[(b + i) % p])))
        .unwrap_or(0);
    let mut new_stem = stem[..t].to_vec();
    new_stem.extend_from_slice(&lp[..best]);
    lp.rotate_left(best);
    (new_stem, lp)
}

/// A play as written in an input file, before canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayDesc {
    Path(Vec<Vertex>),
    Lasso { stem: Vec<Vertex>, cycle: Vec<Vertex> },
}

/// Rank classes of plays, best class first. Plays not mentioned form an
/// implicit bottom class.
#[derive(Clone, Debug, Default)]
pub struct PreferenceOrder {
    classes: Vec<Vec<Play>>,
    rank: HashMap<Play, u32>,
}

impl PreferenceOrder {
    /// Builds an order from classes listed best first. Fails with the first
    /// play that appears twice.
    pub fn new(classes: Vec<Vec<Play>>) -> std::result::Result<Self, Play> {
        let classes: Vec<Vec<Play>> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        let mut rank = HashMap::new();
        let k = classes.len() as u32;
        for (i, class) in classes.iter().enumerate() {
            for play in class {
                if rank.insert(play.clone(), k - i as u32).is_some() {
                    return Err(play.clone());
                }
            }
        }
        Ok(PreferenceOrder { classes, rank })
    }

    /// Builds an order from classes listed worst first.
    pub fn from_worst_first(mut classes: Vec<Vec<Play>>) -> std::result::Result<Self, Play> {
        classes.reverse();
        Self::new(classes)
    }

    /// Numeric value: bigger is better; unmentioned plays get 0.
    #[inline]
    pub fn value(&self, play: &Play) -> u32 {
        self.rank.get(play).copied().unwrap_or(0)
    }

    pub fn is_mentioned(&self, play: &Play) -> bool {
        self.rank.contains_key(play)
    }

    /// Classes, best first.
    pub fn classes(&self) -> &[Vec<Play>] {
        &self.classes
    }

    pub fn plays(&self) -> impl Iterator<Item = &Play> {
        self.classes.iter().flatten()
    }

    pub fn compare(&self, a: &Play, b: &Play) -> Ordering {
        self.value(a).cmp(&self.value(b))
    }

    /// Rewrites every play with `f`, dropping those mapped to `None`;
    /// empty classes disappear.
    pub fn rewrite(&self, f: impl Fn(&Play) -> Option<Play>) -> PreferenceOrder {
        let classes = self
            .classes
            .iter()
            .map(|c| c.iter().filter_map(&f).collect::<Vec<_>>())
            .collect();
        PreferenceOrder::new(classes).expect("rewrite must stay injective")
    }

    fn sorted_classes(&self) -> Vec<Vec<&Play>> {
        self.classes
            .iter()
            .map(|c| {
                let mut v: Vec<&Play> = c.iter().collect();
                v.sort();
                v
            })
            .collect()
    }
}

impl PartialEq for PreferenceOrder {
    fn eq(&self, other: &Self) -> bool {
        self.sorted_classes() == other.sorted_classes()
    }
}

impl Eq for PreferenceOrder {}

impl Hash for PreferenceOrder {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sorted_classes().hash(state);
    }
}

/// An n-player game on a finite graph.
#[derive(Clone, Debug)]
pub struct Game {
    n_players: u32,
    names: Vec<String>,
    lookup: HashMap<String, Vertex>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
    labels: BTreeMap<(Vertex, Vertex), String>,
    owner: Vec<Option<Player>>,
    prefs: Vec<PreferenceOrder>,
}

/// Raw parts of a game, used to construct and rebuild games.
#[derive(Clone, Debug, Default)]
pub struct GameParts {
    pub n_players: u32,
    pub names: Vec<String>,
    /// Edges with optional action labels.
    pub edges: Vec<(Vertex, Vertex, Option<String>)>,
    pub owner: Vec<Option<Player>>,
    /// One order per player.
    pub prefs: Vec<PreferenceOrder>,
}

impl Game {
    /// Assembles a game. Duplicate edges are merged; the result is not
    /// validated (see [`validate_game`]).
    pub fn from_parts(parts: GameParts) -> Game {
        let n = parts.names.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut labels = BTreeMap::new();
        for (u, v, l) in parts.edges {
            succ[u.index()].push(v);
            pred[v.index()].push(u);
            if let Some(l) = l {
                labels.insert((u, v), l);
            }
        }
        for s in succ.iter_mut().chain(pred.iter_mut()) {
            s.sort();
            s.dedup();
        }
        let lookup = parts
            .names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), Vertex(i as u32)))
            .collect();
        let mut prefs = parts.prefs;
        prefs.resize_with(parts.n_players as usize, PreferenceOrder::default);
        let mut owner = parts.owner;
        owner.resize(n, None);
        Game {
            n_players: parts.n_players,
            names: parts.names,
            lookup,
            succ,
            pred,
            labels,
            owner,
            prefs,
        }
    }

    /// Decomposes the game back into parts.
    pub fn to_parts(&self) -> GameParts {
        GameParts {
            n_players: self.n_players,
            names: self.names.clone(),
            edges: self
                .edges()
                .map(|(u, v)| (u, v, self.labels.get(&(u, v)).cloned()))
                .collect(),
            owner: self.owner.clone(),
            prefs: self.prefs.clone(),
        }
    }

    pub fn n_players(&self) -> u32 {
        self.n_players
    }

    pub fn players(&self) -> impl Iterator<Item = Player> {
        (1..=self.n_players).map(Player)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..self.names.len() as u32).map(Vertex)
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.lookup.get(name).copied()
    }

    /// Looks up a vertex by name, reporting `context` on failure.
    pub fn require_vertex(&self, name: &str, context: &str) -> Result<Vertex> {
        self.vertex(name).ok_or_else(|| Error::UnknownVertex {
            name: name.to_string(),
            context: context.to_string(),
        })
    }

    /// Successors sorted by vertex index.
    #[inline]
    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v.index()]
    }

    #[inline]
    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v.index()]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.succ[u.index()].binary_search(&v).is_ok()
    }

    /// All edges in lexicographic (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices()
            .flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edge_label(&self, u: Vertex, v: Vertex) -> Option<&str> {
        self.labels.get(&(u, v)).map(String::as_str)
    }

    #[inline]
    pub fn is_terminal(&self, v: Vertex) -> bool {
        self.succ[v.index()].is_empty()
    }

    pub fn terminals(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices().filter(move |&v| self.is_terminal(v))
    }

    pub fn non_terminals(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices().filter(move |&v| !self.is_terminal(v))
    }

    #[inline]
    pub fn owner(&self, v: Vertex) -> Option<Player> {
        self.owner[v.index()]
    }

    /// Non-terminal vertices owned by `p`, in index order.
    pub fn vertices_of(&self, p: Player) -> Vec<Vertex> {
        self.non_terminals().filter(|&v| self.owner(v) == Some(p)).collect()
    }

    pub fn preference(&self, p: Player) -> &PreferenceOrder {
        &self.prefs[p.index()]
    }

    #[inline]
    pub fn value(&self, p: Player, play: &Play) -> u32 {
        self.prefs[p.index()].value(play)
    }

    /// Compares two plays under player `p`'s preference.
    pub fn compare_plays(&self, p: Player, a: &Play, b: &Play) -> Ordering {
        self.prefs[p.index()].compare(a, b)
    }

    /// Turns a play description into a canonical play of this arena.
    pub fn canonicalize(&self, desc: &PlayDesc) -> Result<Play> {
        let play = match desc {
            PlayDesc::Path(p) => {
                let last = *p.last().ok_or_else(|| Error::NotAPlay("empty path".into()))?;
                if !self.is_terminal(last) {
                    return Err(Error::NotMaximal(self.name(last).to_string()));
                }
                Play::Finite(p.clone())
            }
            PlayDesc::Lasso { stem, cycle } => {
                if cycle.is_empty() {
                    return Err(Error::NotAPlay("empty loop".into()));
                }
                Play::lasso(stem.clone(), cycle.clone())
            }
        };
        if let Some((u, v)) = play.edges().into_iter().find(|&(u, v)| !self.has_edge(u, v)) {
            return Err(Error::NotAPlay(format!(
                "no edge `{}` -> `{}`",
                self.name(u),
                self.name(v)
            )));
        }
        Ok(play)
    }

    /// True when `play` follows edges of this arena and, if finite, ends in a
    /// terminal vertex.
    pub fn is_play(&self, play: &Play) -> bool {
        if play.vertices().any(|v| v.index() >= self.vertex_count()) {
            return false;
        }
        if let Play::Finite(p) = play {
            if !self.is_terminal(*p.last().unwrap()) {
                return false;
            }
        }
        play.edges().into_iter().all(|(u, v)| self.has_edge(u, v))
    }

    /// Every play from `v` induced by some positional profile.
    pub fn positional_plays(&self, v: Vertex) -> BTreeSet<Play> {
        let mut out = BTreeSet::new();
        let mut path = vec![v];
        self.collect_simple(&mut path, &mut out);
        out
    }

    fn collect_simple(&self, path: &mut Vec<Vertex>, out: &mut BTreeSet<Play>) {
        let u = *path.last().unwrap();
        if self.is_terminal(u) {
            out.insert(Play::Finite(path.clone()));
            return;
        }
        for &w in self.successors(u) {
            if let Some(pos) = path.iter().position(|&x| x == w) {
                out.insert(Play::lasso(path[..pos].to_vec(), path[pos..].to_vec()));
            } else {
                path.push(w);
                self.collect_simple(path, out);
                path.pop();
            }
        }
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut stack: Vec<Vertex> = self.vertices().filter(|v| indeg[v.index()] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &w in self.successors(u) {
                indeg[w.index()] -= 1;
                if indeg[w.index()] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == self.vertex_count()
    }

    /// Readable form: `v1 v2 t` or `v3 (v1 v2)^ω`.
    pub fn play_to_string(&self, play: &Play) -> String {
        let names = |s: &[Vertex]| s.iter().map(|&v| self.name(v)).collect::<Vec<_>>().join(" ");
        match play {
            Play::Finite(p) => names(p),
            Play::Lasso { stem, cycle } if stem.is_empty() => format!("({})^ω", names(cycle)),
            Play::Lasso { stem, cycle } => format!("{} ({})^ω", names(stem), names(cycle)),
        }
    }

    /// Replaces the preference order of `p`.
    pub fn set_preference(&mut self, p: Player, order: PreferenceOrder) {
        self.prefs[p.index()] = order;
    }
}

/// Checks the structural invariants of a game.
pub fn validate_game(g: &Game) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if g.n_players == 0 {
        out.push(Diagnostic::new(DiagnosticKind::NoPlayers, "the game has no players"));
    }
    for v in g.vertices() {
        match (g.is_terminal(v), g.owner(v)) {
            (false, None) => out.push(Diagnostic::new(
                DiagnosticKind::MissingOwner,
                format!("non-terminal vertex `{}` has no owner", g.name(v)),
            )),
            (true, Some(p)) => out.push(Diagnostic::new(
                DiagnosticKind::TerminalOwned,
                format!("terminal vertex `{}` is owned by player {p}", g.name(v)),
            )),
            _ => {}
        }
        if let Some(p) = g.owner(v) {
            if p.0 == 0 || p.0 > g.n_players {
                out.push(Diagnostic::new(
                    DiagnosticKind::OwnerOutOfRange,
                    format!("vertex `{}` owned by unknown player {p}", g.name(v)),
                ));
            }
        }
    }
    for p in g.players() {
        for play in g.preference(p).plays() {
            let reason = if !g.is_play(play) {
                Some("not a maximal play of the arena")
            } else if !play.is_positional() {
                Some("revisits a vertex, so no positional profile induces it")
            } else {
                None
            };
            if let Some(r) = reason {
                out.push(Diagnostic::new(
                    DiagnosticKind::InvalidPlay,
                    format!("player {p}: `{}` {r}", g.play_to_string(play)),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Vertex {
        Vertex(i)
    }

    #[test]
    fn lasso_rotation_and_stem_absorption() {
        // (v0 v1)^ω written as v0 (v1 v0)^ω
        assert_eq!(
            Play::lasso(vec![v(0)], vec![v(1), v(0)]),
            Play::Lasso {
                stem: vec![],
                cycle: vec![v(0), v(1)]
            }
        );
        // starting at v1
        assert_eq!(
            Play::lasso(vec![], vec![v(1), v(0)]),
            Play::Lasso {
                stem: vec![v(1)],
                cycle: vec![v(0), v(1)]
            }
        );
        assert_eq!(
            Play::lasso(vec![v(2), v(0), v(1)], vec![v(0), v(1)]),
            Play::Lasso {
                stem: vec![v(2)],
                cycle: vec![v(0), v(1)]
            }
        );
        // non-primitive loop
        assert_eq!(
            Play::lasso(vec![], vec![v(0), v(1), v(0), v(1)]),
            Play::lasso(vec![], vec![v(0), v(1)])
        );
    }

    #[test]
    fn preference_values() {
        let a = Play::Finite(vec![v(0), v(2)]);
        let b = Play::Finite(vec![v(0), v(1), v(2)]);
        let order = PreferenceOrder::new(vec![vec![b.clone()], vec![a.clone()]]).unwrap();
        assert!(order.value(&b) > order.value(&a));
        assert_eq!(order.value(&Play::Finite(vec![v(9)])), 0);
        assert!(PreferenceOrder::new(vec![vec![a.clone()], vec![a]]).is_err());
    }
}
