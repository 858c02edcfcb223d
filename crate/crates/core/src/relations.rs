//! Simulation relations between graphs.
//!
//! A relation pairs nodes of a simulated graph `G′` with nodes of a
//! simulating graph `G`: `(u′, u)` reads "`u` simulates `u′`".

use std::collections::BTreeSet;

use crate::config::Limits;
use crate::graph::Digraph;
use crate::par;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relation {
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Relation {
        Relation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn identity(n: usize) -> Relation {
        Relation::new((0..n).map(|i| (i, i)))
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        self.pairs.insert((a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Projection on the simulated side.
    pub fn domain(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|&(a, _)| a).collect()
    }

    pub fn inverse(&self) -> Relation {
        Relation::new(self.pairs.iter().map(|&(a, b)| (b, a)))
    }

    /// `self ; other`: pairs `(a, c)` with `(a, b) ∈ self` and `(b, c) ∈ other`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut out = BTreeSet::new();
        for &(a, b) in &self.pairs {
            for &(_, c) in other.pairs.range((b, 0)..=(b, usize::MAX)) {
                out.insert((a, c));
            }
        }
        Relation { pairs: out }
    }
}

/// A failed simulation step: `simulator` relates to the source of the
/// edge `simulated_edge` but has no matching successor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimulationFailure {
    pub simulated_edge: (usize, usize),
    pub simulator: usize,
}

/// Checks the partial-simulation condition: for every edge `u′ → v′` of
/// `gp` with both endpoints in the domain and every `u` simulating `u′`,
/// some successor `v` of `u` simulates `v′`.
pub fn is_partial_simulation(gp: &Digraph, g: &Digraph, r: &Relation) -> Result<(), SimulationFailure> {
    if let Some(&(a, b)) = r
        .pairs
        .iter()
        .find(|&&(a, b)| a >= gp.node_count() || b >= g.node_count())
    {
        return Err(SimulationFailure {
            simulated_edge: (a, a),
            simulator: b,
        });
    }
    let dom = r.domain();
    for &(up, u) in &r.pairs {
        for &vp in gp.successors(up) {
            if !dom.contains(&vp) {
                continue;
            }
            if !g.successors(u).iter().any(|&v| r.contains(vp, v)) {
                return Err(SimulationFailure {
                    simulated_edge: (up, vp),
                    simulator: u,
                });
            }
        }
    }
    Ok(())
}

/// A partial simulation whose domain covers every node of `gp`.
pub fn is_simulation(gp: &Digraph, g: &Digraph, r: &Relation) -> bool {
    r.domain().len() == gp.node_count() && is_partial_simulation(gp, g, r).is_ok()
}

/// A simulation whose inverse is also a simulation.
pub fn is_bisimulation(gp: &Digraph, g: &Digraph, r: &Relation) -> bool {
    is_simulation(gp, g, r) && is_simulation(g, gp, &r.inverse())
}

/// The greatest relation in which every `u` simulating `u′` can match
/// every move of `u′`. `g` simulates `gp` exactly when `full_domain` holds.
/// Stored as one bit row per node of `gp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargestSimulation {
    rows: Vec<Vec<u64>>,
    n: usize,
    pub full_domain: bool,
}

impl LargestSimulation {
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a][b / 64] >> (b % 64) & 1 == 1
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().flatten().map(|w| w.count_ones() as usize).sum()
    }

    pub fn relation(&self) -> Relation {
        Relation::new(
            (0..self.rows.len())
                .flat_map(|a| (0..self.n).map(move |b| (a, b)))
                .filter(|&(a, b)| self.contains(a, b)),
        )
    }
}

/// Greatest fixpoint by round-wise pair removal starting from `V′ × V`.
/// The `|V′|·|V|` pairs count against the profile guard.
pub fn largest_simulation(gp: &Digraph, g: &Digraph, limits: &Limits) -> crate::Result<LargestSimulation> {
    let np = gp.node_count();
    let n = g.node_count();
    limits.check_count(np as u128 * n as u128)?;
    let words = n.div_ceil(64);
    let mut full = vec![u64::MAX; words];
    if !n.is_multiple_of(64) {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut rows: Vec<Vec<u64>> = vec![full; np];
    loop {
        // pre[vp]: nodes of `g` with a successor simulating vp
        let pre: Vec<Vec<u64>> = par::map_range(np, limits.parallel, |vp| {
            let row = &rows[vp];
            let mut out = vec![0u64; words];
            for u in 0..n {
                if g.successors(u).iter().any(|&v| row[v / 64] >> (v % 64) & 1 == 1) {
                    out[u / 64] |= 1 << (u % 64);
                }
            }
            out
        });
        let next: Vec<Vec<u64>> = par::map_range(np, limits.parallel, |up| {
            let mut row = rows[up].clone();
            for &vp in gp.successors(up) {
                for (w, p) in row.iter_mut().zip(&pre[vp]) {
                    *w &= p;
                }
            }
            row
        });
        if next == rows {
            break;
        }
        rows = next;
    }
    let full_domain = rows.iter().all(|row| row.iter().any(|&w| w != 0));
    Ok(LargestSimulation { rows, n, full_domain })
}

/// Edge `(a, b)` whenever a non-empty path leads from `a` to `b`.
pub fn transitive_closure(g: &Digraph, parallel: bool) -> Digraph {
    let n = g.node_count();
    let rows = par::map_range(n, parallel, |a| {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = g.successors(a).to_vec();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(u) = stack.pop() {
            for &v in g.successors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        (0..n).filter(|&b| seen[b]).collect()
    });
    Digraph::new(rows)
}
