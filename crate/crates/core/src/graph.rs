//! Plain directed graphs over dense node indices.

use std::collections::VecDeque;

/// Adjacency lists with sorted, duplicate-free successor lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(mut succ: Vec<Vec<usize>>) -> Digraph {
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Digraph { succ }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Digraph {
        let mut succ = vec![Vec::new(); n];
        for (a, b) in edges {
            succ[a].push(b);
        }
        Digraph::new(succ)
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    #[inline]
    pub fn successors(&self, u: usize) -> &[usize] {
        &self.succ[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    pub fn reverse(&self) -> Digraph {
        Digraph::from_edges(self.node_count(), self.edges().map(|(a, b)| (b, a)))
    }

    /// Strongly connected components in reverse topological order: every
    /// component appears after all components reachable from it.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        tarjan(self.node_count(), |u| &self.succ[u])
    }

    pub fn is_acyclic(&self) -> bool {
        self.edges().all(|(a, b)| a != b) && self.sccs().iter().all(|c| c.len() == 1)
    }

    /// Nodes reachable from `from` (including `from`).
    pub fn reachable(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Shortest path from `from` to `to` using only nodes accepted by
    /// `allowed`; includes both endpoints.
    pub fn shortest_path(&self, from: usize, to: usize, allowed: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut c = to;
                while c != from {
                    c = prev[c];
                    path.push(c);
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.succ[u] {
                if prev[v] == usize::MAX && allowed(v) {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

/// Iterative Tarjan over an implicit graph; components come out in reverse
/// topological order, each sorted ascending.
pub fn tarjan<'a, F>(n: usize, succ: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> &'a [usize],
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut next)) = call.last_mut() {
            let s = succ(u);
            if *next < s.len() {
                let v = s[*next];
                *next += 1;
                if index[v] == UNSEEN {
                    index[v] = counter;
                    low[v] = counter;
                    counter += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == u {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Component id per node, given components from [`tarjan`].
pub fn component_map(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut map = vec![0; n];
    for (c, nodes) in comps.iter().enumerate() {
        for &u in nodes {
            map[u] = c;
        }
    }
    map
}

/// Fixed-width bitset used for reachability sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b))
    }
}
