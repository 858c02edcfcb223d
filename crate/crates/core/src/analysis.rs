//! Termination, fairness, equilibria and labelled-graph analyses.

use crate::dynamics::{DynamicsGraph, LabelledGraph};
use crate::game::{Player, PlayerSet};
use crate::graph::{component_map, tarjan, BitSet, Digraph};

/// A lasso in a graph: a path leading to a cycle. Consecutive nodes are
/// edges and the last cycle node has an edge back to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleWitness {
    pub path_to_cycle: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl CycleWitness {
    /// Replays every edge of the witness against `g`.
    pub fn validate(&self, g: &Digraph) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let seq: Vec<usize> = self.path_to_cycle.iter().chain(&self.cycle).copied().collect();
        seq.windows(2).all(|w| g.has_edge(w[0], w[1])) && g.has_edge(*self.cycle.last().unwrap(), self.cycle[0])
    }
}

pub fn terminates(dg: &DynamicsGraph) -> bool {
    dg.graph().is_acyclic()
}

/// Some reachable cycle, found by depth-first search from the lowest node.
pub fn find_cycle(dg: &DynamicsGraph) -> Option<CycleWitness> {
    find_cycle_in(dg.graph())
}

pub fn find_cycle_in(g: &Digraph) -> Option<CycleWitness> {
    let n = g.node_count();
    // 0 = unseen, 1 = on stack, 2 = done
    let mut colour = vec![0u8; n];
    for root in 0..n {
        if colour[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        colour[root] = 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            let s = g.successors(u);
            if *next < s.len() {
                let v = s[*next];
                *next += 1;
                match colour[v] {
                    0 => {
                        colour[v] = 1;
                        stack.push((v, 0));
                    }
                    1 => {
                        let nodes: Vec<usize> = stack.iter().map(|&(x, _)| x).collect();
                        let pos = nodes.iter().position(|&x| x == v).unwrap();
                        return Some(CycleWitness {
                            path_to_cycle: nodes[..pos].to_vec(),
                            cycle: nodes[pos..].to_vec(),
                        });
                    }
                    _ => {}
                }
            } else {
                colour[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Nodes without outgoing edges.
pub fn equilibria(dg: &DynamicsGraph) -> Vec<usize> {
    (0..dg.node_count()).filter(|&u| dg.successors(u).is_empty()).collect()
}

/// Which fairness clause a player satisfies on a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FairClause {
    /// The player changes strategy along the given edge.
    Switches(usize, usize),
    /// The player has no move at the given node.
    Disabled(usize),
    /// The player can move somewhere on the cycle but never does.
    EnabledNeverSwitches,
}

impl FairClause {
    pub fn holds(self) -> bool {
        !matches!(self, FairClause::EnabledNeverSwitches)
    }

    pub fn tag(self) -> &'static str {
        match self {
            FairClause::Switches(..) => "switches",
            FairClause::Disabled(_) => "disabled",
            FairClause::EnabledNeverSwitches => "enabled-never-switches",
        }
    }
}

/// Outcome of the fair-cycle search.
///
/// When `fair` is true, `witness.cycle` is a closed walk on which every
/// player either switches or is disabled somewhere. When it is false but
/// the graph has a cycle, `clauses` explains the first non-trivial
/// strongly connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub fair: bool,
    pub witness: Option<CycleWitness>,
    pub clauses: Vec<(Player, FairClause)>,
}

impl FairnessReport {
    /// Re-checks every per-player clause directly on the witness walk.
    pub fn validate(&self, dg: &DynamicsGraph) -> bool {
        if !self.fair {
            return self.witness.is_none();
        }
        let Some(w) = &self.witness else { return false };
        if !w.validate(dg.graph()) {
            return false;
        }
        let c = &w.cycle;
        let steps: Vec<(usize, usize)> = (0..c.len()).map(|k| (c[k], c[(k + 1) % c.len()])).collect();
        (1..=dg.n_players()).map(Player).all(|p| {
            steps
                .iter()
                .any(|&(a, b)| dg.changed(a, b).is_some_and(|s| s.contains(p)))
                || c.iter().any(|&u| !dg.can_switch(u).contains(p))
        })
    }
}

fn is_nontrivial(g: &Digraph, comp: &[usize]) -> bool {
    comp.len() > 1 || g.has_edge(comp[0], comp[0])
}

/// Decides whether an infinite fair path exists and, if so, returns a
/// closed walk witnessing it.
pub fn find_fair_cycle(dg: &DynamicsGraph) -> FairnessReport {
    let g = dg.graph();
    let n = g.node_count();
    let mut comps = g.sccs();
    comps.sort_by_key(|c| c[0]);
    let cmap = component_map(n, &comps);
    let players: Vec<Player> = (1..=dg.n_players()).map(Player).collect();
    let mut first_report: Option<Vec<(Player, FairClause)>> = None;
    for (ci, comp) in comps.iter().enumerate() {
        if !is_nontrivial(g, comp) {
            continue;
        }
        let inside = |v: usize| cmap[v] == ci;
        let clauses: Vec<(Player, FairClause)> = players
            .iter()
            .map(|&p| {
                for &u in comp {
                    for (v, set) in dg.out_edges(u) {
                        if inside(v) && set.contains(p) {
                            return (p, FairClause::Switches(u, v));
                        }
                    }
                }
                match comp.iter().find(|&&u| !dg.can_switch(u).contains(p)) {
                    Some(&u) => (p, FairClause::Disabled(u)),
                    None => (p, FairClause::EnabledNeverSwitches),
                }
            })
            .collect();
        if clauses.iter().all(|(_, c)| c.holds()) {
            let cycle = assemble_walk(dg, comp[0], &clauses, inside);
            let path = g
                .shortest_path(0, comp[0], |_| true)
                .map(|mut p| {
                    p.pop();
                    p
                })
                .unwrap_or_default();
            return FairnessReport {
                fair: true,
                witness: Some(CycleWitness {
                    path_to_cycle: path,
                    cycle,
                }),
                clauses,
            };
        }
        if first_report.is_none() {
            first_report = Some(clauses);
        }
    }
    FairnessReport {
        fair: false,
        witness: None,
        clauses: first_report.unwrap_or_default(),
    }
}

/// Closed walk from `start` inside a component through every clause
/// witness, returned without repeating `start` at the end. A clause
/// already met by the walk so far adds no detour.
fn assemble_walk(
    dg: &DynamicsGraph,
    start: usize,
    clauses: &[(Player, FairClause)],
    inside: impl Fn(usize) -> bool + Copy,
) -> Vec<usize> {
    let g = dg.graph();
    let mut walk = vec![start];
    let mut cur = start;
    let go = |walk: &mut Vec<usize>, from: usize, to: usize| {
        let p = g
            .shortest_path(from, to, inside)
            .expect("component is strongly connected");
        walk.extend_from_slice(&p[1..]);
    };
    let met = |walk: &[usize], p: Player| {
        walk.windows(2)
            .any(|w| dg.changed(w[0], w[1]).is_some_and(|s| s.contains(p)))
            || walk.iter().any(|&u| !dg.can_switch(u).contains(p))
    };
    for &(p, c) in clauses {
        if met(&walk, p) {
            continue;
        }
        match c {
            FairClause::Switches(a, b) => {
                go(&mut walk, cur, a);
                walk.push(b);
                cur = b;
            }
            FairClause::Disabled(a) => {
                go(&mut walk, cur, a);
                cur = a;
            }
            FairClause::EnabledNeverSwitches => unreachable!(),
        }
    }
    if cur != start {
        go(&mut walk, cur, start);
    } else if walk.len() == 1 {
        // leave and come back so the walk has at least one edge
        let next = *g.successors(start).iter().find(|&&v| inside(v)).unwrap();
        walk.push(next);
        if next != start {
            go(&mut walk, next, start);
        }
    }
    walk.pop();
    if walk.is_empty() {
        walk.push(start);
    }
    walk
}

/// A closed walk in a labelled graph: edge `k` goes from `nodes[k]` to
/// `nodes[k + 1]` (cyclically) under `labels[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledCycle {
    pub nodes: Vec<usize>,
    pub labels: Vec<usize>,
}

impl LabelledCycle {
    pub fn validate(&self, lg: &LabelledGraph) -> bool {
        let k = self.nodes.len();
        k > 0
            && self.labels.len() == k
            && (0..k).all(|i| lg.step(self.nodes[i], self.labels[i]) == self.nodes[(i + 1) % k])
    }

    pub fn is_constant(&self) -> bool {
        self.nodes.iter().all(|&u| u == self.nodes[0])
    }

    pub fn covers_all_labels(&self, n_labels: usize) -> bool {
        (0..n_labels).all(|a| self.labels.contains(&a))
    }
}

fn labelled_path(lg: &LabelledGraph, from: usize, to: usize, inside: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    // BFS returning (node, label) steps
    let n = lg.node_count();
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for a in 0..lg.n_labels() {
            let v = lg.step(u, a);
            if !seen[v] && inside(v) {
                seen[v] = true;
                prev[v] = Some((u, a));
                queue.push_back(v);
            }
        }
    }
    let mut steps = Vec::new();
    let mut c = to;
    while c != from {
        let (u, a) = prev[c].expect("target reachable inside component");
        steps.push((u, a));
        c = u;
    }
    steps.reverse();
    steps
}

/// A non-constant cycle using every label, if one exists.
pub fn find_lfair_cycle(lg: &LabelledGraph) -> Option<LabelledCycle> {
    let n = lg.node_count();
    let dg = lg.digraph();
    let mut comps = tarjan(n, |u| dg.successors(u));
    comps.sort_by_key(|c| c[0]);
    let cmap = component_map(n, &comps);
    for (ci, comp) in comps.iter().enumerate() {
        if comp.len() < 2 {
            continue;
        }
        let inside = |v: usize| cmap[v] == ci;
        let mut required = Vec::new();
        for a in 0..lg.n_labels() {
            match comp.iter().find(|&&u| inside(lg.step(u, a))) {
                Some(&u) => required.push((u, a)),
                None => break,
            }
        }
        if required.len() < lg.n_labels() {
            continue;
        }
        // a move to a different node keeps the cycle non-constant
        let mover = comp
            .iter()
            .flat_map(|&u| (0..lg.n_labels()).map(move |a| (u, a)))
            .find(|&(u, a)| lg.step(u, a) != u && inside(lg.step(u, a)))
            .expect("component with two nodes has an internal move");
        required.push(mover);
        let start = comp[0];
        let mut nodes = Vec::new();
        let mut labels = Vec::new();
        let mut cur = start;
        for &(u, a) in &required {
            for (x, b) in labelled_path(lg, cur, u, inside) {
                nodes.push(x);
                labels.push(b);
            }
            nodes.push(u);
            labels.push(a);
            cur = lg.step(u, a);
        }
        for (x, b) in labelled_path(lg, cur, start, inside) {
            nodes.push(x);
            labels.push(b);
        }
        return Some(LabelledCycle { nodes, labels });
    }
    None
}

/// Nodes whose every outgoing edge is a self-loop.
pub fn sinks(lg: &LabelledGraph) -> Vec<usize> {
    (0..lg.node_count())
        .filter(|&u| (0..lg.n_labels()).all(|a| lg.step(u, a) == u))
        .collect()
}

/// Reachability sets per strongly connected component.
struct Reach {
    cmap: Vec<usize>,
    sets: Vec<BitSet>,
}

impl Reach {
    fn new(lg: &LabelledGraph) -> Reach {
        let n = lg.node_count();
        let dg = lg.digraph();
        let comps = tarjan(n, |u| dg.successors(u));
        let cmap = component_map(n, &comps);
        let mut sets: Vec<BitSet> = Vec::with_capacity(comps.len());
        // reverse topological order: successors are already done
        for (c, nodes) in comps.iter().enumerate() {
            let mut s = BitSet::new(n);
            for &u in nodes {
                s.insert(u);
            }
            for &u in nodes {
                for &v in dg.successors(u) {
                    let d = cmap[v];
                    if d != c {
                        s.union_with(&sets[d]);
                    }
                }
            }
            sets.push(s);
        }
        Reach { cmap, sets }
    }

    fn of(&self, u: usize) -> &BitSet {
        &self.sets[self.cmap[u]]
    }
}

/// Result of the diamond check; `counterexample` is `(v, a, b)` such that
/// the states reached by `a` and by `b` then `a` share no descendant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondCheck {
    pub holds: bool,
    pub counterexample: Option<(usize, usize, usize)>,
}

/// Checks that for all `v`, `a`, `b` the states `δ(v, a)` and
/// `δ(δ(v, b), a)` have a common descendant.
pub fn check_diamond(lg: &LabelledGraph) -> DiamondCheck {
    let reach = Reach::new(lg);
    for v in 0..lg.node_count() {
        for a in 0..lg.n_labels() {
            for b in 0..lg.n_labels() {
                let x = lg.step(v, a);
                let y = lg.step(lg.step(v, b), a);
                if !reach.of(x).intersects(reach.of(y)) {
                    return DiamondCheck {
                        holds: false,
                        counterexample: Some((v, a, b)),
                    };
                }
            }
        }
    }
    DiamondCheck {
        holds: true,
        counterexample: None,
    }
}

/// A node together with two distinct sinks reachable from it.
pub fn reachable_two_sinks(lg: &LabelledGraph) -> Option<(usize, usize, usize)> {
    let s = sinks(lg);
    if s.len() < 2 {
        return None;
    }
    let reach = Reach::new(lg);
    (0..lg.node_count()).find_map(|u| {
        let mut hit = s.iter().filter(|&&x| reach.of(u).contains(x));
        match (hit.next(), hit.next()) {
            (Some(&a), Some(&b)) => Some((u, a, b)),
            _ => None,
        }
    })
}

/// Players that change along a walk, for reporting.
pub fn switching_players(dg: &DynamicsGraph, cycle: &[usize]) -> PlayerSet {
    (0..cycle.len()).fold(PlayerSet::EMPTY, |acc, k| {
        acc.union(dg.changed(cycle[k], cycle[(k + 1) % cycle.len()]).unwrap_or_default())
    })
}
