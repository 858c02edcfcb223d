//! Game minors: edge deletion, vertex deletion with preference rewriting,
//! dominated edges and the search for a minor with the disagreement shape.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{Error, NotDeletable, Result};
use crate::game::{Game, GameParts, Play, Player, Vertex};
use crate::strategy::{outcome_with, ProfileSpace, StrategyProfile};

/// One deletion, naming vertices by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeletionStep {
    Edge(String, String),
    Vertex(String),
}

impl std::fmt::Display for DeletionStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeletionStep::Edge(u, v) => write!(f, "delete edge {u} -> {v}"),
            DeletionStep::Vertex(v) => write!(f, "delete vertex {v}"),
        }
    }
}

pub type DeletionScript = Vec<DeletionStep>;

/// Parses a script: a JSON list of `{"edge":[u,v]}` / `{"vertex":v}`.
pub fn parse_script(text: &str) -> Result<DeletionScript> {
    serde_json::from_str(text).map_err(Error::from_json)
}

pub fn script_to_json(script: &DeletionScript) -> String {
    serde_json::to_string_pretty(script).expect("script serialization cannot fail")
}

/// What a single step changed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub step: DeletionStep,
    /// Plays removed from some preference.
    pub dropped_plays: usize,
    /// Plays rewritten in place.
    pub rewritten_plays: usize,
    /// Vertex that lost its last outgoing edge.
    pub new_terminal: Option<String>,
    /// Edges `(u, v′)` created by squeezing out a vertex.
    pub rewired: Vec<(String, String)>,
}

/// Deletes edge `(u, v)`; plays that used it leave every preference.
pub fn delete_edge(g: &Game, u: Vertex, v: Vertex) -> Result<Game> {
    delete_edge_recorded(g, u, v).map(|(g, _)| g)
}

fn delete_edge_recorded(g: &Game, u: Vertex, v: Vertex) -> Result<(Game, StepRecord)> {
    if !g.has_edge(u, v) {
        return Err(Error::UnknownEdge(g.name(u).into(), g.name(v).into()));
    }
    let mut parts = g.to_parts();
    parts.edges.retain(|&(a, b, _)| (a, b) != (u, v));
    let became_terminal = g.successors(u).len() == 1;
    if became_terminal {
        parts.owner[u.index()] = None;
    }
    let arena = Game::from_parts(GameParts {
        prefs: Vec::new(),
        ..parts.clone()
    });
    parts.prefs = g
        .players()
        .map(|p| {
            g.preference(p)
                .rewrite(|play| arena.is_play(play).then(|| play.clone()))
        })
        .collect();
    let dropped = g.players().map(|p| g.preference(p).plays().count()).sum::<usize>()
        - parts.prefs.iter().map(|o| o.plays().count()).sum::<usize>();
    let record = StepRecord {
        step: DeletionStep::Edge(g.name(u).into(), g.name(v).into()),
        dropped_plays: dropped,
        rewritten_plays: 0,
        new_terminal: became_terminal.then(|| g.name(u).to_string()),
        rewired: Vec::new(),
    };
    Ok((Game::from_parts(parts), record))
}

/// Why `v` cannot be deleted, if it cannot.
pub fn deletable(g: &Game, v: Vertex) -> std::result::Result<(), NotDeletable> {
    let succ = g.successors(v);
    let pred = g.predecessors(v);
    match succ {
        [] if pred.is_empty() => Ok(()),
        [] => Err(NotDeletable::TerminalWithPredecessors),
        [w] if *w == v => Err(NotDeletable::SelfLoop),
        [w] => {
            if pred.iter().any(|&u| g.has_edge(u, *w)) {
                Err(NotDeletable::PredecessorConflict)
            } else {
                Ok(())
            }
        }
        _ => Err(NotDeletable::MultipleSuccessors),
    }
}

/// Deletes an isolated vertex, or squeezes out a vertex with a unique
/// successor `v′` by rewiring each predecessor to `v′`.
pub fn delete_vertex(g: &Game, v: Vertex) -> Result<Game> {
    delete_vertex_recorded(g, v).map(|(g, _)| g)
}

fn delete_vertex_recorded(g: &Game, v: Vertex) -> Result<(Game, StepRecord)> {
    deletable(g, v).map_err(|reason| Error::NotDeletable {
        vertex: g.name(v).into(),
        reason,
    })?;
    let target = g.successors(v).first().copied();
    let remap = |x: Vertex| -> Option<Vertex> {
        use std::cmp::Ordering::*;
        match x.cmp(&v) {
            Less => Some(x),
            Equal => None,
            Greater => Some(Vertex(x.0 - 1)),
        }
    };
    let old = g.to_parts();
    let mut names = old.names.clone();
    names.remove(v.index());
    let mut owner = old.owner.clone();
    owner.remove(v.index());
    let mut edges = Vec::new();
    let mut rewired = Vec::new();
    for (a, b, l) in old.edges {
        if a == v {
            continue;
        }
        if b == v {
            let t = target.expect("vertex with predecessors has a successor");
            rewired.push((g.name(a).to_string(), g.name(t).to_string()));
            edges.push((remap(a).unwrap(), remap(t).unwrap(), l));
        } else {
            edges.push((remap(a).unwrap(), remap(b).unwrap(), l));
        }
    }
    let mut dropped = 0usize;
    let mut rewritten = 0usize;
    let mut prefs = Vec::new();
    for p in g.players() {
        let order = g.preference(p);
        for play in order.plays() {
            if play.first() == v {
                dropped += 1;
            } else if play.contains(v) {
                rewritten += 1;
            }
        }
        prefs.push(order.rewrite(|play| {
            if play.first() == v {
                None
            } else {
                play.filter_map_vertices(remap)
            }
        }));
    }
    let minor = Game::from_parts(GameParts {
        n_players: g.n_players(),
        names,
        edges,
        owner,
        prefs,
    });
    debug_assert!(minor
        .players()
        .all(|p| minor.preference(p).plays().all(|play| minor.is_play(play))));
    let record = StepRecord {
        step: DeletionStep::Vertex(g.name(v).into()),
        dropped_plays: dropped,
        rewritten_plays: rewritten,
        new_terminal: None,
        rewired,
    };
    Ok((minor, record))
}

/// Applies one named step.
pub fn apply_step(g: &Game, step: &DeletionStep) -> Result<(Game, StepRecord)> {
    match step {
        DeletionStep::Edge(u, v) => {
            let u = g.require_vertex(u, "script")?;
            let v = g.require_vertex(v, "script")?;
            delete_edge_recorded(g, u, v)
        }
        DeletionStep::Vertex(v) => {
            let v = g.require_vertex(v, "script")?;
            delete_vertex_recorded(g, v)
        }
    }
}

/// A minor together with the games produced after each step.
#[derive(Clone, Debug)]
pub struct Minor {
    pub game: Game,
    pub records: Vec<StepRecord>,
    /// `stages[0]` is the input, `stages[k]` the game after step `k`.
    pub stages: Vec<Game>,
}

pub fn apply_script(g: &Game, script: &[DeletionStep]) -> Result<Minor> {
    let mut stages = vec![g.clone()];
    let mut records = Vec::new();
    for (index, step) in script.iter().enumerate() {
        let (next, rec) = apply_step(stages.last().unwrap(), step).map_err(|e| Error::ScriptStep {
            index,
            source: Box::new(e),
        })?;
        stages.push(next);
        records.push(rec);
    }
    Ok(Minor {
        game: stages.last().unwrap().clone(),
        records,
        stages,
    })
}

/// Maps a profile of the game after `step` back to the game before it:
/// deleted edges are simply unused, and a squeezed vertex `w` with unique
/// successor `w′` is routed through again (`u ↦ w′` becomes `u ↦ w`).
pub fn lift_profile(before: &Game, after: &Game, step: &DeletionStep, sigma: &StrategyProfile) -> StrategyProfile {
    let mut choice = vec![None; before.vertex_count()];
    let map_name = |x: Vertex| before.vertex(after.name(x)).unwrap();
    for x in after.vertices() {
        if let Some(y) = sigma.get(x) {
            choice[map_name(x).index()] = Some(map_name(y));
        }
    }
    match step {
        DeletionStep::Edge(u, v) => {
            let (u, v) = (before.vertex(u).unwrap(), before.vertex(v).unwrap());
            if choice[u.index()].is_none() && !before.is_terminal(u) {
                choice[u.index()] = Some(v);
            }
        }
        DeletionStep::Vertex(w) => {
            let w = before.vertex(w).unwrap();
            if let Some(&t) = before.successors(w).first() {
                choice[w.index()] = Some(t);
                for &u in before.predecessors(w) {
                    if choice[u.index()] == Some(t) {
                        choice[u.index()] = Some(w);
                    }
                }
            }
        }
    }
    StrategyProfile::from_choices(choice)
}

/// Node map from the positional profiles of the minor into those of `g`.
pub fn profile_embedding(minor: &Minor, script: &[DeletionStep], limits: &Limits) -> Result<Vec<usize>> {
    let last = &minor.game;
    let space = ProfileSpace::new(last);
    let n = limits.check_count(space.count())? as usize;
    let top = ProfileSpace::new(&minor.stages[0]);
    Ok(crate::par::map_range(n, limits.parallel, |i| {
        let mut sigma = space.profile_at(i as u64);
        for k in (0..script.len()).rev() {
            sigma = lift_profile(&minor.stages[k], &minor.stages[k + 1], &script[k], &sigma);
        }
        top.index_of(&sigma) as usize
    }))
}

/// True when edge `e1` is dominated by `e2`: under every positional
/// profile, taking `e1` at their common source gives the owner a strictly
/// worse play than taking `e2`.
pub fn is_dominated(g: &Game, e1: (Vertex, Vertex), e2: (Vertex, Vertex), limits: &Limits) -> Result<bool> {
    for &(a, b) in &[e1, e2] {
        if !g.has_edge(a, b) {
            return Err(Error::UnknownEdge(g.name(a).into(), g.name(b).into()));
        }
    }
    if e1.0 != e2.0 {
        return Err(Error::SourceMismatch(
            format!("{}->{}", g.name(e1.0), g.name(e1.1)),
            format!("{}->{}", g.name(e2.0), g.name(e2.1)),
        ));
    }
    let v = e1.0;
    if e1.1 == e2.1 {
        return Ok(false);
    }
    let p = g.owner(v).expect("vertex with edges is owned");
    let space = ProfileSpace::new(g);
    limits.check_count(space.count())?;
    let pin = g.successors(v)[0];
    let dominated = space
        .iter()
        .filter(|s| s.get(v) == Some(pin))
        .all(|s| g.value(p, &outcome_with(g, &s, v, e1.1)) < g.value(p, &outcome_with(g, &s, v, e2.1)));
    Ok(dominated)
}

/// Vertices `(a, b, t)` of a game shaped like the two-player disagreement
/// game: edges exactly `a→b, a→t, b→a, b→t`, distinct owners, and both
/// owners ranking the loop below the direct route below the route through
/// the other vertex.
pub fn match_dis(g: &Game) -> Option<(Vertex, Vertex, Vertex)> {
    if g.vertex_count() != 3 || g.edge_count() != 4 {
        return None;
    }
    let t = g.terminals().collect::<Vec<_>>();
    let [t] = t.as_slice() else { return None };
    let nt: Vec<Vertex> = g.non_terminals().collect();
    let (a, b) = (nt[0], nt[1]);
    let edges_ok = g.has_edge(a, b) && g.has_edge(a, *t) && g.has_edge(b, a) && g.has_edge(b, *t);
    let (pa, pb) = (g.owner(a)?, g.owner(b)?);
    if !edges_ok || pa == pb {
        return None;
    }
    let pattern = |p: Player, x: Vertex, y: Vertex| {
        let lasso = Play::lasso(vec![], vec![x, y]);
        let direct = Play::Finite(vec![x, *t]);
        let indirect = Play::Finite(vec![x, y, *t]);
        g.value(p, &lasso) < g.value(p, &direct) && g.value(p, &direct) < g.value(p, &indirect)
    };
    (pattern(pa, a, b) && pattern(pb, b, a)).then_some((a, b, *t))
}

/// A script producing a disagreement-shaped minor.
#[derive(Clone, Debug)]
pub struct DisMinor {
    pub script: DeletionScript,
    pub minor: Game,
}

/// Searches for a deletion script whose result has the disagreement
/// shape. Neighbour one-target games go through the dispute-wheel
/// construction first; everything else (and any fallback) enumerates the
/// four routes a disagreement minor contracts, bounded by the budget.
///
/// Every edge of such a minor is the contraction of a simple path of `g`,
/// and the preference pattern only depends on the values of plays built
/// from those four paths. So the enumeration is exact: it checks the
/// preference pattern on the candidate paths, then realises the minor by
/// deleting every other edge and squeezing out the inner vertices.
pub fn find_dis_minor(g: &Game, limits: &Limits) -> Result<Option<DisMinor>> {
    if match_dis(g).is_some() {
        return Ok(Some(DisMinor {
            script: Vec::new(),
            minor: g.clone(),
        }));
    }
    if let Some(found) = crate::spp::dis_minor_from_wheel(g, limits)? {
        return Ok(Some(found));
    }
    search_routes(g, limits.search_budget)
}

/// Simple paths from `from` to `to` that avoid `avoid`.
fn simple_paths(g: &Game, from: Vertex, to: Vertex, avoid: Vertex) -> Vec<Vec<Vertex>> {
    fn go(g: &Game, to: Vertex, avoid: Vertex, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        let u = *path.last().unwrap();
        if u == to {
            out.push(path.clone());
            return;
        }
        for &w in g.successors(u) {
            if w != avoid && !path.contains(&w) {
                path.push(w);
                go(g, to, avoid, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, to, avoid, &mut vec![from], &mut out);
    out
}

fn join(a: &[Vertex], b: &[Vertex]) -> Option<Vec<Vertex>> {
    let mut out = a.to_vec();
    for &v in &b[1..] {
        if out.contains(&v) {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

fn search_routes(g: &Game, cap: u64) -> Result<Option<DisMinor>> {
    let mut budget = cap;
    let branching: Vec<Vertex> = g.non_terminals().filter(|&v| g.successors(v).len() >= 2).collect();
    let terminals: Vec<Vertex> = g.terminals().collect();
    for &a in &branching {
        for &b in &branching {
            let (pa, pb) = (g.owner(a).unwrap(), g.owner(b).unwrap());
            if a == b || pa == pb {
                continue;
            }
            let ab = simple_paths(g, a, b, a);
            let ba = simple_paths(g, b, a, b);
            if ab.is_empty() || ba.is_empty() {
                continue;
            }
            for &t in &terminals {
                let at = simple_paths(g, a, t, b);
                let bt = simple_paths(g, b, t, a);
                for p_at in &at {
                    let direct_a = g.value(pa, &Play::Finite(p_at.clone()));
                    if direct_a == 0 {
                        continue;
                    }
                    for p_bt in &bt {
                        let direct_b = g.value(pb, &Play::Finite(p_bt.clone()));
                        if direct_b == 0 {
                            continue;
                        }
                        for p_ab in ab.iter().filter(|p| p[1] != p_at[1]) {
                            let Some(ind_a) = join(p_ab, p_bt) else { continue };
                            if g.value(pa, &Play::Finite(ind_a)) <= direct_a {
                                continue;
                            }
                            for p_ba in ba.iter().filter(|p| p[1] != p_bt[1]) {
                                let Some(ind_b) = join(p_ba, p_at) else { continue };
                                if g.value(pb, &Play::Finite(ind_b)) <= direct_b {
                                    continue;
                                }
                                let Some(cycle) = join(p_ab, p_ba) else { continue };
                                let mut ring = cycle[..cycle.len() - 1].to_vec();
                                let loop_a = Play::lasso(Vec::new(), ring.clone());
                                ring.rotate_left(p_ab.len() - 1);
                                let loop_b = Play::lasso(Vec::new(), ring);
                                if g.value(pa, &loop_a) >= direct_a || g.value(pb, &loop_b) >= direct_b {
                                    continue;
                                }
                                if budget == 0 {
                                    return Err(Error::SearchBudgetExceeded(cap));
                                }
                                budget -= 1;
                                if let Some(found) = dis_minor_from_paths(g, [p_at, p_ab, p_ba, p_bt])? {
                                    return Ok(Some(found));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Realises a disagreement minor from four paths `a ⇝ t`, `a ⇝ b`,
/// `b ⇝ a`, `b ⇝ t`: every other edge is deleted, vertices off the paths
/// are removed once isolated, and inner vertices are squeezed out in the
/// first order that works. `None` when no order works or the result does
/// not have the disagreement shape.
pub fn dis_minor_from_paths(g: &Game, paths: [&[Vertex]; 4]) -> Result<Option<DisMinor>> {
    let keep: BTreeSet<(Vertex, Vertex)> = paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();
    let on: BTreeSet<Vertex> = paths.iter().flat_map(|p| p.iter().copied()).collect();
    let ends = [paths[0][0], paths[3][0], *paths[0].last().unwrap()];
    let mut script: DeletionScript = g
        .edges()
        .filter(|e| !keep.contains(e))
        .map(|(u, v)| DeletionStep::Edge(g.name(u).into(), g.name(v).into()))
        .collect();
    script.extend(
        g.vertices()
            .filter(|v| !on.contains(v))
            .map(|v| DeletionStep::Vertex(g.name(v).into())),
    );
    let Ok(stage) = apply_script(g, &script) else {
        return Ok(None);
    };
    let inner: Vec<String> = on
        .iter()
        .filter(|v| !ends.contains(v))
        .map(|&v| g.name(v).to_string())
        .collect();
    let accept = |m: &Game| match_dis(m).is_some();
    Ok(squeeze_out(&stage.game, inner, &accept, &mut script).then(|| {
        let minor = apply_script(g, &script).expect("replaying a checked script").game;
        DisMinor { script, minor }
    }))
}

/// Deletes every vertex named in `rest`, trying orders depth-first, until
/// the result satisfies `accept`. Steps are appended to `script`.
pub fn squeeze_out(g: &Game, rest: Vec<String>, accept: &dyn Fn(&Game) -> bool, script: &mut DeletionScript) -> bool {
    squeeze_rec(g, rest, accept, script, &mut HashSet::new())
}

fn squeeze_rec(
    g: &Game,
    rest: Vec<String>,
    accept: &dyn Fn(&Game) -> bool,
    script: &mut DeletionScript,
    failed: &mut HashSet<Vec<String>>,
) -> bool {
    if rest.is_empty() {
        return accept(g);
    }
    if failed.contains(&rest) {
        return false;
    }
    for (i, name) in rest.iter().enumerate() {
        let v = g.vertex(name).unwrap();
        if deletable(g, v).is_err() {
            continue;
        }
        let step = DeletionStep::Vertex(name.clone());
        let (next, _) = apply_step(g, &step).expect("deletable vertex");
        let mut left = rest.clone();
        left.remove(i);
        script.push(step);
        if squeeze_rec(&next, left, accept, script, failed) {
            return true;
        }
        script.pop();
    }
    failed.insert(rest);
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_game;

    const DELETION_ORDER: &str = r#"{
      "players": 1,
      "vertices": ["v1","v2","v3","v4","v5","vbot"],
      "edges": [["v1","v2"],["v1","v3"],["v1","v4"],["v2","v4"],["v3","v4"],["v3","vbot"],
                ["v4","v5"],["v4","vbot"],["v5","vbot"]],
      "owner": {"v1":1,"v2":1,"v3":1,"v4":1,"v5":1},
      "preferences": {"1": [
        [{"path":["v1","v2","v4","v5","vbot"]}],
        [{"path":["v1","v2","v4","vbot"]}],
        [{"path":["v1","v3","vbot"]}],
        [{"path":["v1","v4","v5","vbot"]}]
      ]}
    }"#;

    fn pref_strings(g: &Game) -> Vec<Vec<String>> {
        g.preference(Player(1))
            .classes()
            .iter()
            .map(|c| c.iter().map(|p| g.play_to_string(p)).collect())
            .collect()
    }

    #[test]
    fn deletion_order_script() {
        let g = parse_game(DELETION_ORDER).unwrap();
        let s1 = apply_step(&g, &DeletionStep::Edge("v4".into(), "vbot".into()))
            .unwrap()
            .0;
        assert_eq!(
            pref_strings(&s1),
            vec![vec!["v1 v2 v4 v5 vbot"], vec!["v1 v3 vbot"], vec!["v1 v4 v5 vbot"]]
        );
        let s2 = apply_step(&s1, &DeletionStep::Vertex("v4".into())).unwrap().0;
        assert_eq!(
            pref_strings(&s2),
            vec![vec!["v1 v2 v5 vbot"], vec!["v1 v3 vbot"], vec!["v1 v5 vbot"]]
        );
        match apply_step(&s2, &DeletionStep::Vertex("v2".into())) {
            Err(Error::NotDeletable { reason, .. }) => assert_eq!(reason, NotDeletable::PredecessorConflict),
            other => panic!("unexpected {other:?}"),
        }
        let s3 = apply_step(&s2, &DeletionStep::Edge("v1".into(), "v5".into()))
            .unwrap()
            .0;
        assert_eq!(pref_strings(&s3), vec![vec!["v1 v2 v5 vbot"], vec!["v1 v3 vbot"]]);
    }

    #[test]
    fn script_json_shape() {
        let s = vec![
            DeletionStep::Edge("a".into(), "b".into()),
            DeletionStep::Vertex("c".into()),
        ];
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"[{"edge":["a","b"]},{"vertex":"c"}]"#);
        assert_eq!(parse_script(&text).unwrap(), s);
    }
}
