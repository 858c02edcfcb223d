//! Positional and history-based strategy profiles.

use std::collections::HashMap;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::game::{Game, Play, Player, Vertex};

/// A positional profile: one successor per non-terminal vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile {
    choice: Vec<Option<Vertex>>,
}

impl StrategyProfile {
    pub fn from_choices(choice: Vec<Option<Vertex>>) -> Self {
        StrategyProfile { choice }
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> Option<Vertex> {
        self.choice[v.index()]
    }

    pub fn with(&self, v: Vertex, w: Vertex) -> StrategyProfile {
        let mut c = self.choice.clone();
        c[v.index()] = Some(w);
        StrategyProfile { choice: c }
    }

    pub fn set(&mut self, v: Vertex, w: Vertex) {
        self.choice[v.index()] = Some(w);
    }

    pub fn choices(&self) -> &[Option<Vertex>] {
        &self.choice
    }

    /// Vertices where the two profiles disagree.
    pub fn diff<'a>(&'a self, other: &'a StrategyProfile) -> impl Iterator<Item = Vertex> + 'a {
        self.choice
            .iter()
            .zip(&other.choice)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| Vertex(i as u32))
    }

    /// Map from vertex name to chosen successor name.
    pub fn to_named(&self, g: &Game) -> Vec<(String, String)> {
        g.vertices()
            .filter_map(|v| self.get(v).map(|w| (g.name(v).to_string(), g.name(w).to_string())))
            .collect()
    }
}

/// Mixed-radix indexing of the positional profiles of a game.
///
/// Digits follow vertex order (first non-terminal vertex most significant),
/// each digit indexing the sorted successor list, so index order is the
/// lexicographic order over vertex ids and successor ids.
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    vertex_count: usize,
    slots: Vec<Vertex>,
    slot_of: Vec<Option<usize>>,
    choices: Vec<Vec<Vertex>>,
    labels: Vec<Vec<String>>,
    weights: Vec<u64>,
    count: u128,
    compact: bool,
}

impl ProfileSpace {
    pub fn new(g: &Game) -> ProfileSpace {
        let slots: Vec<Vertex> = g.non_terminals().collect();
        let mut slot_of = vec![None; g.vertex_count()];
        for (i, v) in slots.iter().enumerate() {
            slot_of[v.index()] = Some(i);
        }
        let choices: Vec<Vec<Vertex>> = slots.iter().map(|&v| g.successors(v).to_vec()).collect();
        let named = g.edges().all(|(u, v)| g.edge_label(u, v).is_some());
        let labels = slots
            .iter()
            .map(|&v| {
                g.successors(v)
                    .iter()
                    .map(|&w| match g.edge_label(v, w) {
                        Some(l) if named => l.to_string(),
                        _ => g.name(w).to_string(),
                    })
                    .collect()
            })
            .collect();
        let mut weights = vec![0u64; slots.len()];
        let mut count: u128 = 1;
        for i in (0..slots.len()).rev() {
            weights[i] = u64::try_from(count).unwrap_or(u64::MAX);
            count = count.saturating_mul(choices[i].len() as u128);
        }
        ProfileSpace {
            vertex_count: g.vertex_count(),
            slots,
            slot_of,
            choices,
            labels,
            weights,
            count,
            compact: named,
        }
    }

    /// Number of positional profiles.
    pub fn count(&self) -> u128 {
        self.count
    }

    /// Non-terminal vertices in digit order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.slots
    }

    pub fn profile_at(&self, mut idx: u64) -> StrategyProfile {
        let mut choice = vec![None; self.vertex_count];
        for (i, &v) in self.slots.iter().enumerate() {
            let d = idx / self.weights[i];
            idx %= self.weights[i];
            choice[v.index()] = Some(self.choices[i][d as usize]);
        }
        StrategyProfile { choice }
    }

    /// Position of `w` in the successor list of `v`.
    #[inline]
    pub fn digit(&self, v: Vertex, w: Vertex) -> u64 {
        let s = self.slot_of[v.index()].expect("terminal vertex has no digit");
        self.choices[s].binary_search(&w).expect("not a successor") as u64
    }

    #[inline]
    pub fn weight(&self, v: Vertex) -> u64 {
        self.weights[self.slot_of[v.index()].expect("terminal vertex has no digit")]
    }

    pub fn index_of(&self, sigma: &StrategyProfile) -> u64 {
        self.slots
            .iter()
            .map(|&v| self.digit(v, sigma.get(v).expect("profile must be total")) * self.weight(v))
            .sum()
    }

    /// Index of `sigma` after replacing its choice at `v` by `w`.
    #[inline]
    pub fn shifted(&self, idx: u64, sigma: &StrategyProfile, v: Vertex, w: Vertex) -> u64 {
        let old = self.digit(v, sigma.get(v).unwrap());
        let new = self.digit(v, w);
        let wt = self.weight(v);
        idx - old * wt + new * wt
    }

    /// Compact name: concatenated action labels of vertices with a real
    /// choice when every edge is named, otherwise successor names joined by
    /// commas. A game with no choice at all displays as `-`.
    pub fn name(&self, sigma: &StrategyProfile) -> String {
        let parts: Vec<&str> = self
            .slots
            .iter()
            .enumerate()
            .filter(|(i, _)| self.choices[*i].len() > 1)
            .map(|(i, &v)| {
                let d = self.choices[i].binary_search(&sigma.get(v).unwrap()).unwrap();
                self.labels[i][d].as_str()
            })
            .collect();
        if parts.is_empty() {
            "-".to_string()
        } else if self.compact {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        let n = u64::try_from(self.count).unwrap_or(u64::MAX);
        (0..n).map(move |i| self.profile_at(i))
    }
}

/// Every positional profile in lexicographic order, subject to the guard.
pub fn enumerate_profiles(g: &Game, limits: &Limits) -> Result<Vec<StrategyProfile>> {
    let space = ProfileSpace::new(g);
    limits.check_count(space.count())?;
    Ok(space.iter().collect())
}

/// Follows `choose` from `start` until a terminal or a repeated vertex.
pub fn walk(g: &Game, start: Vertex, choose: impl Fn(Vertex) -> Vertex) -> Play {
    let mut path = vec![start];
    let mut cur = start;
    loop {
        if g.is_terminal(cur) {
            return Play::Finite(path);
        }
        let next = choose(cur);
        if let Some(pos) = path.iter().position(|&x| x == next) {
            let cycle = path.split_off(pos);
            return Play::lasso(path, cycle);
        }
        path.push(next);
        cur = next;
    }
}

/// The play induced by `sigma` from `v`.
pub fn outcome(g: &Game, sigma: &StrategyProfile, v: Vertex) -> Play {
    walk(g, v, |u| sigma.get(u).expect("profile must be total"))
}

/// The play from `v` when `v` plays `w` and everything else follows `sigma`.
pub fn outcome_with(g: &Game, sigma: &StrategyProfile, v: Vertex, w: Vertex) -> Play {
    walk(g, v, |u| if u == v { w } else { sigma.get(u).unwrap() })
}

/// Single-vertex deviations of player `i`, without any improvement test.
pub fn deviations_p1(g: &Game, sigma: &StrategyProfile, i: Player) -> Vec<(Vertex, StrategyProfile)> {
    let mut out = Vec::new();
    for v in g.vertices_of(i) {
        for &w in g.successors(v) {
            if Some(w) != sigma.get(v) {
                out.push((v, sigma.with(v, w)));
            }
        }
    }
    out
}

/// Values of every alternative at `v`, from the owner's point of view.
pub fn choice_values(g: &Game, sigma: &StrategyProfile, v: Vertex) -> Vec<(Vertex, u32)> {
    let p = g.owner(v).expect("non-terminal vertex must be owned");
    g.successors(v)
        .iter()
        .map(|&w| (w, g.value(p, &outcome_with(g, sigma, v, w))))
        .collect()
}

/// Successors of `v` that maximize the owner's outcome from `v`.
pub fn best_replies(g: &Game, sigma: &StrategyProfile, v: Vertex) -> Vec<Vertex> {
    let vals = choice_values(g, sigma, v);
    let best = vals.iter().map(|&(_, x)| x).max().unwrap_or(0);
    vals.into_iter().filter(|&(_, x)| x == best).map(|(w, _)| w).collect()
}

/// Improving moves at `v`: `(w, is_best_reply)` for every `w` whose
/// outcome strictly beats the current one.
pub fn improving_moves(g: &Game, sigma: &StrategyProfile, v: Vertex) -> Vec<(Vertex, bool)> {
    let vals = choice_values(g, sigma, v);
    let cur = sigma.get(v).unwrap();
    let now = vals.iter().find(|&&(w, _)| w == cur).map(|&(_, x)| x).unwrap();
    let best = vals.iter().map(|&(_, x)| x).max().unwrap_or(0);
    vals.into_iter()
        .filter(|&(_, x)| x > now)
        .map(|(w, x)| (w, x == best))
        .collect()
}

/// Histories of an acyclic arena (non-maximal paths from any vertex) with
/// mixed-radix indexing of history profiles.
#[derive(Clone, Debug)]
pub struct HistorySpace {
    histories: Vec<Vec<Vertex>>,
    index: HashMap<Vec<Vertex>, usize>,
    choices: Vec<Vec<Vertex>>,
    weights: Vec<u64>,
    count: u128,
}

/// A history profile: one successor per history, aligned with
/// [`HistorySpace::histories`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HistoryProfile {
    pub choice: Vec<Vertex>,
}

impl HistorySpace {
    pub fn new(g: &Game) -> Result<HistorySpace> {
        if !g.is_acyclic() {
            return Err(Error::CyclicArena);
        }
        let mut histories = Vec::new();
        for v in g.vertices() {
            let mut stack = vec![vec![v]];
            while let Some(h) = stack.pop() {
                let last = *h.last().unwrap();
                if g.is_terminal(last) {
                    continue;
                }
                for &w in g.successors(last).iter().rev() {
                    let mut e = h.clone();
                    e.push(w);
                    stack.push(e);
                }
                histories.push(h);
            }
        }
        histories.sort();
        let index = histories.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect();
        let choices: Vec<Vec<Vertex>> = histories
            .iter()
            .map(|h| g.successors(*h.last().unwrap()).to_vec())
            .collect();
        let mut weights = vec![0; histories.len()];
        let mut count: u128 = 1;
        for i in (0..histories.len()).rev() {
            weights[i] = u64::try_from(count).unwrap_or(u64::MAX);
            count = count.saturating_mul(choices[i].len() as u128);
        }
        Ok(HistorySpace {
            histories,
            index,
            choices,
            weights,
            count,
        })
    }

    pub fn count(&self) -> u128 {
        self.count
    }

    pub fn histories(&self) -> &[Vec<Vertex>] {
        &self.histories
    }

    pub fn history_index(&self, h: &[Vertex]) -> Option<usize> {
        self.index.get(h).copied()
    }

    pub fn successors(&self, h: usize) -> &[Vertex] {
        &self.choices[h]
    }

    pub fn profile_at(&self, mut idx: u64) -> HistoryProfile {
        let choice = (0..self.histories.len())
            .map(|i| {
                let d = idx / self.weights[i];
                idx %= self.weights[i];
                self.choices[i][d as usize]
            })
            .collect();
        HistoryProfile { choice }
    }

    pub fn index_of(&self, p: &HistoryProfile) -> u64 {
        (0..self.histories.len())
            .map(|i| self.choices[i].binary_search(&p.choice[i]).unwrap() as u64 * self.weights[i])
            .sum()
    }

    /// Index after replacing the choice at history `h` by `w`.
    pub fn shifted(&self, idx: u64, p: &HistoryProfile, h: usize, w: Vertex) -> u64 {
        let old = self.choices[h].binary_search(&p.choice[h]).unwrap() as u64;
        let new = self.choices[h].binary_search(&w).unwrap() as u64;
        idx - old * self.weights[h] + new * self.weights[h]
    }

    /// The maximal play extending history `h` under profile `p`.
    pub fn outcome(&self, g: &Game, p: &HistoryProfile, h: &[Vertex]) -> Play {
        let mut path = h.to_vec();
        while !g.is_terminal(*path.last().unwrap()) {
            let i = self.index[&path];
            path.push(p.choice[i]);
        }
        Play::Finite(path)
    }

    /// As [`HistorySpace::outcome`], with history `at` forced to `w`.
    pub fn outcome_with(&self, g: &Game, p: &HistoryProfile, h: &[Vertex], at: usize, w: Vertex) -> Play {
        let mut path = h.to_vec();
        while !g.is_terminal(*path.last().unwrap()) {
            let i = self.index[&path];
            path.push(if i == at { w } else { p.choice[i] });
        }
        Play::Finite(path)
    }

    /// Compact name listing the choice at every history with a real choice.
    pub fn name(&self, g: &Game, p: &HistoryProfile) -> String {
        let parts: Vec<String> = (0..self.histories.len())
            .filter(|&i| self.choices[i].len() > 1)
            .map(|i| {
                let h: Vec<&str> = self.histories[i].iter().map(|&v| g.name(v)).collect();
                format!("{}:{}", h.join("."), g.name(p.choice[i]))
            })
            .collect();
        if parts.is_empty() {
            "-".into()
        } else {
            parts.join(",")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_game;

    fn dis() -> Game {
        parse_game(
            r#"{"players":2,"vertices":["v1","v2","vbot"],
            "edges":[["v1","v2","c1"],["v1","vbot","s1"],["v2","v1","c2"],["v2","vbot","s2"]],
            "owner":{"v1":1,"v2":2},
            "preferences":{"1":[[{"path":["v1","v2","vbot"]}],[{"path":["v1","vbot"]}]],
                           "2":[[{"path":["v2","v1","vbot"]}],[{"path":["v2","vbot"]}]]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn enumeration_order_and_names() {
        let g = dis();
        let space = ProfileSpace::new(&g);
        let names: Vec<String> = space.iter().map(|s| space.name(&s)).collect();
        assert_eq!(names, ["c1c2", "c1s2", "s1c2", "s1s2"]);
        for (i, s) in space.iter().enumerate() {
            assert_eq!(space.index_of(&s), i as u64);
        }
    }

    #[test]
    fn outcomes() {
        let g = dis();
        let space = ProfileSpace::new(&g);
        let cc = space.profile_at(0);
        let cs = space.profile_at(1);
        assert_eq!(
            outcome(&g, &cc, Vertex(0)),
            Play::lasso(vec![], vec![Vertex(0), Vertex(1)])
        );
        assert_eq!(
            outcome(&g, &cs, Vertex(0)),
            Play::Finite(vec![Vertex(0), Vertex(1), Vertex(2)])
        );
        assert_eq!(outcome(&g, &cs, Vertex(2)), Play::Finite(vec![Vertex(2)]));
    }

    #[test]
    fn best_reply_examples() {
        let g = dis();
        let space = ProfileSpace::new(&g);
        let ss = space.profile_at(3);
        assert_eq!(best_replies(&g, &ss, Vertex(0)), vec![Vertex(1)]);
        let cc = space.profile_at(0);
        assert_eq!(best_replies(&g, &cc, Vertex(1)), vec![Vertex(2)]);
        let devs = deviations_p1(&g, &cc, Player(1));
        assert_eq!(devs.len(), 1);
        assert_eq!(space.name(&devs[0].1), "s1c2");
    }
}
