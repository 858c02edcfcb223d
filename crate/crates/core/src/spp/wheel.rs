//! Dispute wheels: cyclic chains of players each preferring to route
//! through the next one.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{is_notg, OneTargetGame};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::game::{Game, Play, Player, Vertex};
use crate::graph::Digraph;
use crate::minors::{apply_script, dis_minor_from_paths, squeeze_out, DeletionScript, DeletionStep, DisMinor};
use crate::strategy::{improving_moves, StrategyProfile};

/// Pivots `u_i`, spokes `π_i ∈ P_{u_i}` and rims `h_i`. The rim `h_i`
/// leads from `u_i` up to (not including) `u_{i+1}`, and `h_i · π_{i+1}`
/// is a permitted path of `u_i` ranked above `π_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisputeWheel {
    pub pivots: Vec<Vertex>,
    pub spokes: Vec<Vec<Vertex>>,
    pub rims: Vec<Vec<Vertex>>,
}

/// Named view for reports.
#[derive(Clone, Debug, Serialize)]
pub struct NamedWheel {
    pub pivots: Vec<String>,
    pub spokes: Vec<Vec<String>>,
    pub rims: Vec<Vec<String>>,
}

impl DisputeWheel {
    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// `h_i · π_{i+1}`.
    pub fn detour(&self, i: usize) -> Vec<Vertex> {
        let mut out = self.rims[i].clone();
        out.extend_from_slice(&self.spokes[(i + 1) % self.len()]);
        out
    }

    /// `h_i · u_{i+1}`, the path the rim contracts to.
    pub fn rim_path(&self, i: usize) -> Vec<Vertex> {
        let mut out = self.rims[i].clone();
        out.push(self.pivots[(i + 1) % self.len()]);
        out
    }

    pub fn named(&self, g: &Game) -> NamedWheel {
        let names = |p: &[Vertex]| p.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>();
        NamedWheel {
            pivots: names(&self.pivots),
            spokes: self.spokes.iter().map(|p| names(p)).collect(),
            rims: self.rims.iter().map(|p| names(p)).collect(),
        }
    }

    /// Rotates so the smallest pivot comes first.
    fn rotate_to_min(mut self) -> DisputeWheel {
        let k = (0..self.len()).min_by_key(|&i| self.pivots[i]).unwrap_or(0);
        self.pivots.rotate_left(k);
        self.spokes.rotate_left(k);
        self.rims.rotate_left(k);
        self
    }
}

/// Nodes are permitted paths; an edge `π → π′` with rim `h` whenever
/// `h · π′` is permitted for the owner of `π` and beats `π`.
struct DisputeDigraph {
    nodes: Vec<Vec<Vertex>>,
    out: Vec<Vec<(usize, Vec<Vertex>)>>,
}

fn path_of(play: &Play) -> &[Vertex] {
    match play {
        Play::Finite(p) => p,
        Play::Lasso { .. } => unreachable!("permitted paths are finite"),
    }
}

fn dispute_digraph(otg: &OneTargetGame) -> DisputeDigraph {
    let g = otg.game();
    let mut nodes = Vec::new();
    let mut start = Vec::new();
    for p in g.players() {
        start.push(nodes.len());
        nodes.extend(otg.permitted(p).iter().map(|x| path_of(x).to_vec()));
    }
    let node_of = |play: &Play| otg.permitted_index(play).map(|(p, k)| start[p.index()] + k);
    let mut out = vec![Vec::new(); nodes.len()];
    for p in g.players() {
        let perm = otg.permitted(p);
        for (k, pi) in perm.iter().enumerate() {
            let from = start[p.index()] + k;
            let worse = g.value(p, pi);
            for rho in perm.iter().filter(|r| g.value(p, r) > worse) {
                let path = path_of(rho);
                for split in 1..path.len() - 1 {
                    let suffix = Play::Finite(path[split..].to_vec());
                    if let Some(to) = node_of(&suffix) {
                        out[from].push((to, path[..split].to_vec()));
                    }
                }
            }
        }
    }
    DisputeDigraph { nodes, out }
}

impl DisputeDigraph {
    fn digraph(&self) -> Digraph {
        Digraph::from_edges(
            self.nodes.len(),
            self.out
                .iter()
                .enumerate()
                .flat_map(|(u, es)| es.iter().map(move |(v, _)| (u, *v))),
        )
    }
}

/// Some dispute wheel, or `None` when the dispute digraph is acyclic.
pub fn find_dispute_wheel(otg: &OneTargetGame) -> Option<DisputeWheel> {
    let dd = dispute_digraph(otg);
    let w = crate::analysis::find_cycle_in(&dd.digraph())?;
    let c = &w.cycle;
    let mut wheel = DisputeWheel {
        pivots: Vec::new(),
        spokes: Vec::new(),
        rims: Vec::new(),
    };
    for k in 0..c.len() {
        let (u, v) = (c[k], c[(k + 1) % c.len()]);
        let rim = dd.out[u].iter().find(|(t, _)| *t == v).unwrap().1.clone();
        wheel.pivots.push(dd.nodes[u][0]);
        wheel.spokes.push(dd.nodes[u].clone());
        wheel.rims.push(rim);
    }
    Some(wheel.rotate_to_min())
}

/// Checks the dispute-wheel conditions; the error names the first failure.
pub fn check_dw(otg: &OneTargetGame, w: &DisputeWheel) -> std::result::Result<(), String> {
    let g = otg.game();
    let k = w.len();
    if k < 2 || w.spokes.len() != k || w.rims.len() != k {
        return Err(format!(
            "a wheel needs at least two pivots and one spoke and rim each, got {k}"
        ));
    }
    let show = |p: &[Vertex]| p.iter().map(|&v| g.name(v)).collect::<Vec<_>>().join(" ");
    for i in 0..k {
        let u = w.pivots[i];
        let Some(p) = otg.owner(u) else {
            return Err(format!("pivot `{}` is terminal", g.name(u)));
        };
        let spoke = Play::Finite(w.spokes[i].clone());
        if w.spokes[i].first() != Some(&u) || otg.permitted_index(&spoke).map(|x| x.0) != Some(p) {
            return Err(format!(
                "spoke `{}` is not a permitted path of `{}`",
                show(&w.spokes[i]),
                g.name(u)
            ));
        }
        let rim = &w.rims[i];
        let rim_path = w.rim_path(i);
        if rim.first() != Some(&u) || rim_path.windows(2).any(|e| !g.has_edge(e[0], e[1])) {
            return Err(format!(
                "rim `{}` is not a path from `{}` to the next pivot",
                show(&rim_path),
                g.name(u)
            ));
        }
        let detour = Play::Finite(w.detour(i));
        if otg.permitted_index(&detour).map(|x| x.0) != Some(p) {
            return Err(format!(
                "`{}` is not a permitted path of `{}`",
                show(&w.detour(i)),
                g.name(u)
            ));
        }
        if g.value(p, &detour) <= g.value(p, &spoke) {
            return Err(format!(
                "`{}` does not prefer `{}` to `{}`",
                g.name(u),
                show(&w.detour(i)),
                show(&w.spokes[i])
            ));
        }
    }
    Ok(())
}

/// Checks the extra conditions of a strict wheel: pivots stay off the
/// other spokes and rims, and outside the pivots spokes and rims are
/// disjoint while spokes meeting at a vertex continue identically.
pub fn check_sdw(otg: &OneTargetGame, w: &DisputeWheel) -> std::result::Result<(), String> {
    check_dw(otg, w)?;
    let g = otg.game();
    let k = w.len();
    let pivots: BTreeSet<Vertex> = w.pivots.iter().copied().collect();
    if pivots.len() != k {
        return Err("pivots repeat".into());
    }
    for i in 0..k {
        let u = w.pivots[i];
        for j in 0..k {
            if j != i && w.spokes[j].contains(&u) {
                return Err(format!("pivot `{}` lies on spoke {}", g.name(u), j + 1));
            }
            if j != i && (j + 1) % k != i && w.rims[j].contains(&u) {
                return Err(format!("pivot `{}` lies on rim {}", g.name(u), j + 1));
            }
        }
    }
    let outside = |p: &[Vertex]| -> BTreeSet<Vertex> { p.iter().copied().filter(|v| !pivots.contains(v)).collect() };
    let rims: Vec<BTreeSet<Vertex>> = w.rims.iter().map(|r| outside(r)).collect();
    let spokes: Vec<BTreeSet<Vertex>> = w.spokes.iter().map(|s| outside(s)).collect();
    for a in 0..k {
        for b in 0..k {
            if let Some(v) = spokes[a].intersection(&rims[b]).next() {
                return Err(format!("spoke {} and rim {} share `{}`", a + 1, b + 1, g.name(*v)));
            }
            if a < b {
                if let Some(v) = rims[a].intersection(&rims[b]).next() {
                    return Err(format!("rims {} and {} share `{}`", a + 1, b + 1, g.name(*v)));
                }
                for &v in spokes[a].intersection(&spokes[b]) {
                    let tail = |s: &[Vertex]| s[s.iter().position(|&x| x == v).unwrap()..].to_vec();
                    if tail(&w.spokes[a]) != tail(&w.spokes[b]) {
                        return Err(format!(
                            "spokes {} and {} part ways after `{}`",
                            a + 1,
                            b + 1,
                            g.name(v)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Searches for a strict wheel, shortest first, visiting at most `budget`
/// partial wheels.
pub fn find_sdw(otg: &OneTargetGame, budget: u64) -> Result<Option<DisputeWheel>> {
    let dd = dispute_digraph(otg);
    let owner: Vec<Player> = dd.nodes.iter().map(|p| otg.owner(p[0]).unwrap()).collect();
    let mut left = budget;
    let n = otg.game().n_players() as usize;
    for len in 2..=n {
        for s in 0..dd.nodes.len() {
            let mut st = SdwSearch {
                otg,
                dd: &dd,
                owner: &owner,
                start: s,
                len,
                nodes: vec![s],
                rims: Vec::new(),
                left: &mut left,
                budget,
            };
            if let Some(w) = st.extend()? {
                return Ok(Some(w.rotate_to_min()));
            }
        }
    }
    Ok(None)
}

struct SdwSearch<'a> {
    otg: &'a OneTargetGame,
    dd: &'a DisputeDigraph,
    owner: &'a [Player],
    start: usize,
    len: usize,
    nodes: Vec<usize>,
    rims: Vec<Vec<Vertex>>,
    left: &'a mut u64,
    budget: u64,
}

impl SdwSearch<'_> {
    fn wheel(&self) -> DisputeWheel {
        DisputeWheel {
            pivots: self.nodes.iter().map(|&x| self.dd.nodes[x][0]).collect(),
            spokes: self.nodes.iter().map(|&x| self.dd.nodes[x].clone()).collect(),
            rims: self.rims.clone(),
        }
    }

    fn extend(&mut self) -> Result<Option<DisputeWheel>> {
        let u = *self.nodes.last().unwrap();
        for (v, rim) in &self.dd.out[u] {
            let v = *v;
            if *self.left == 0 {
                return Err(Error::SearchBudgetExceeded(self.budget));
            }
            *self.left -= 1;
            if v == self.start && self.nodes.len() == self.len {
                self.rims.push(rim.clone());
                let w = self.wheel();
                self.rims.pop();
                if check_sdw(self.otg, &w).is_ok() {
                    return Ok(Some(w));
                }
                continue;
            }
            if v <= self.start
                || self.nodes.len() >= self.len
                || self.nodes.iter().any(|&x| self.owner[x] == self.owner[v])
            {
                continue;
            }
            // pivots never sit on another spoke
            let pv = self.dd.nodes[v][0];
            if self
                .nodes
                .iter()
                .any(|&x| self.dd.nodes[x].contains(&pv) || self.dd.nodes[v].contains(&self.dd.nodes[x][0]))
            {
                continue;
            }
            self.nodes.push(v);
            self.rims.push(rim.clone());
            if let Some(w) = self.extend()? {
                return Ok(Some(w));
            }
            self.nodes.pop();
            self.rims.pop();
        }
        Ok(None)
    }
}

/// The minor of a strict wheel with its two alternating profiles:
/// `towards` routes every pivot to the next one, `direct` straight to the
/// target, and each reaches the other in one step of the concurrent
/// dynamics.
#[derive(Clone, Debug)]
pub struct SdwMinor {
    pub script: DeletionScript,
    pub minor: Game,
    pub towards: StrategyProfile,
    pub direct: StrategyProfile,
}

/// True when every vertex `σ` changes towards `τ` is an improving move,
/// and no other vertex changes.
fn concurrent_step(g: &Game, sigma: &StrategyProfile, tau: &StrategyProfile) -> bool {
    let changed: Vec<Vertex> = sigma.diff(tau).collect();
    !changed.is_empty()
        && changed
            .iter()
            .all(|&v| improving_moves(g, sigma, v).iter().any(|&(w, _)| Some(w) == tau.get(v)))
}

/// Keeps only spokes and rims, squeezes out every vertex that is neither
/// a pivot nor the target, and checks the two-profile cycle.
pub fn extract_sdw_minor(otg: &OneTargetGame, w: &DisputeWheel) -> Result<SdwMinor> {
    check_sdw(otg, w).map_err(Error::InvalidSdw)?;
    let g = otg.game();
    let k = w.len();
    let paths: Vec<Vec<Vertex>> = (0..k).flat_map(|i| [w.spokes[i].clone(), w.rim_path(i)]).collect();
    let keep: BTreeSet<(Vertex, Vertex)> = paths.iter().flat_map(|p| p.windows(2).map(|e| (e[0], e[1]))).collect();
    let on: BTreeSet<Vertex> = paths.iter().flatten().copied().collect();
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
    let stage = apply_script(g, &script)?.game;
    let inner: Vec<String> = on
        .iter()
        .filter(|&&v| v != otg.target() && !w.pivots.contains(&v))
        .map(|&v| g.name(v).to_string())
        .collect();
    if !squeeze_out(&stage, inner, &|_| true, &mut script) {
        return Err(Error::InvalidSdw("inner vertices cannot be squeezed out".into()));
    }
    let minor = apply_script(g, &script)?.game;
    let at = |v: Vertex| minor.vertex(g.name(v)).unwrap();
    let target = at(otg.target());
    let mut towards = vec![None; minor.vertex_count()];
    let mut direct = vec![None; minor.vertex_count()];
    for i in 0..k {
        let u = at(w.pivots[i]);
        towards[u.index()] = Some(at(w.pivots[(i + 1) % k]));
        direct[u.index()] = Some(target);
    }
    let towards = StrategyProfile::from_choices(towards);
    let direct = StrategyProfile::from_choices(direct);
    if !concurrent_step(&minor, &towards, &direct) || !concurrent_step(&minor, &direct, &towards) {
        return Err(Error::InvalidSdw(
            "the minor does not alternate between the two profiles".into(),
        ));
    }
    Ok(SdwMinor {
        script,
        minor,
        towards,
        direct,
    })
}

/// Disagreement minor of a neighbour one-target game read off a strict
/// wheel. A longer wheel is collapsed onto two consecutive pivots by
/// chaining the remaining rims. `None` when `g` is not such a game or the
/// construction does not produce the disagreement shape.
pub fn dis_minor_from_wheel(g: &Game, limits: &Limits) -> Result<Option<DisMinor>> {
    let Ok(otg) = OneTargetGame::from_game(g.clone()) else {
        return Ok(None);
    };
    if !is_notg(&otg) {
        return Ok(None);
    }
    let w = match find_sdw(&otg, limits.search_budget) {
        Ok(Some(w)) => w,
        Ok(None) | Err(Error::SearchBudgetExceeded(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let k = w.len();
    for i in 0..k {
        let j = (i + 1) % k;
        // rims from u_{i+1} all the way round back to u_i
        let mut back = Vec::new();
        for s in 1..k {
            back.extend_from_slice(&w.rims[(i + s) % k]);
        }
        back.push(w.pivots[i]);
        if back.iter().collect::<BTreeSet<_>>().len() != back.len() {
            continue;
        }
        let ab = w.rim_path(i);
        if let Some(found) = dis_minor_from_paths(g, [&w.spokes[i], &ab, &back, &w.spokes[j]])? {
            log::debug!("disagreement minor from a {k}-pivot wheel");
            return Ok(Some(found));
        }
    }
    Ok(None)
}
