//! Belief dynamics: each player keeps a belief about every player's
//! strategy. Label 0 lets everyone learn the actual strategies; label `l`
//! lets player `l` make its best-reply move against its own belief.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::game::{Game, Player, Vertex};
use crate::graph::Digraph;
use crate::par;
use crate::strategy::{improving_moves, StrategyProfile};

/// Complete deterministic labelled graph: `delta[node * labels + label]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledGraph {
    n_labels: usize,
    delta: Vec<usize>,
}

impl LabelledGraph {
    /// Builds from a transition table laid out node-major.
    pub fn new(n_labels: usize, delta: Vec<usize>) -> LabelledGraph {
        assert!(n_labels > 0 && delta.len().is_multiple_of(n_labels));
        let n = delta.len() / n_labels;
        assert!(delta.iter().all(|&t| t < n), "transition target out of range");
        LabelledGraph { n_labels, delta }
    }

    pub fn node_count(&self) -> usize {
        self.delta.len() / self.n_labels
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    #[inline]
    pub fn step(&self, node: usize, label: usize) -> usize {
        self.delta[node * self.n_labels + label]
    }

    /// The underlying unlabelled digraph (self-loops included).
    pub fn digraph(&self) -> Digraph {
        let n = self.node_count();
        Digraph::from_edges(
            n,
            (0..n)
                .flat_map(|u| (0..self.n_labels).map(move |a| (u, a)))
                .map(|(u, a)| (u, self.step(u, a))),
        )
    }
}

/// Strategies of one player: mixed radix over the player's vertices.
#[derive(Clone, Debug)]
struct PlayerStrategies {
    vertices: Vec<Vertex>,
    choices: Vec<Vec<Vertex>>,
    weights: Vec<usize>,
    count: usize,
}

impl PlayerStrategies {
    fn new(g: &Game, p: Player) -> PlayerStrategies {
        let vertices = g.vertices_of(p);
        let choices: Vec<Vec<Vertex>> = vertices.iter().map(|&v| g.successors(v).to_vec()).collect();
        let mut weights = vec![0; vertices.len()];
        let mut count = 1usize;
        for i in (0..vertices.len()).rev() {
            weights[i] = count;
            count = count.saturating_mul(choices[i].len());
        }
        PlayerStrategies {
            vertices,
            choices,
            weights,
            count,
        }
    }

    fn write(&self, s: usize, into: &mut StrategyProfile) {
        let mut s = s;
        for (i, &v) in self.vertices.iter().enumerate() {
            into.set(v, self.choices[i][s / self.weights[i]]);
            s %= self.weights[i];
        }
    }

    fn replace(&self, s: usize, v: Vertex, w: Vertex) -> usize {
        let i = self.vertices.iter().position(|&x| x == v).unwrap();
        let old = (s / self.weights[i]) % self.choices[i].len();
        let new = self.choices[i].binary_search(&w).unwrap();
        s - old * self.weights[i] + new * self.weights[i]
    }
}

/// Belief graph of a game. Node `m` encodes an n×n matrix whose row `j`
/// is player `j`'s belief about the profile; entry `(j, i)` is a strategy
/// index of player `i`. Labels run from 0 to n.
#[derive(Clone, Debug)]
pub struct BeliefGraph {
    n_players: usize,
    strategies: Vec<PlayerStrategies>,
    graph: LabelledGraph,
    vertex_count: usize,
    names: Vec<String>,
}

impl BeliefGraph {
    pub fn graph(&self) -> &LabelledGraph {
        &self.graph
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Row-major belief matrix of node `m`.
    pub fn matrix(&self, m: usize) -> Vec<Vec<usize>> {
        decode(&self.strategies, self.n_players, m)
    }

    pub fn node_of_matrix(&self, matrix: &[Vec<usize>]) -> usize {
        encode(&self.strategies, matrix)
    }

    /// Profile believed by player `j` (1-based) at node `m`.
    pub fn belief(&self, m: usize, j: Player) -> StrategyProfile {
        let row = &self.matrix(m)[j.index()];
        profile_of(&self.strategies, self.vertex_count, row)
    }

    /// Nodes where every player holds the same belief.
    pub fn is_agreeing(&self, m: usize) -> bool {
        let mat = self.matrix(m);
        mat.iter().all(|r| r == &mat[0])
    }

    pub fn name(&self, m: usize) -> &str {
        &self.names[m]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

fn decode(st: &[PlayerStrategies], n: usize, mut m: usize) -> Vec<Vec<usize>> {
    let mut mat = vec![vec![0; n]; n];
    for j in (0..n).rev() {
        for i in (0..n).rev() {
            mat[j][i] = m % st[i].count;
            m /= st[i].count;
        }
    }
    mat
}

fn encode(st: &[PlayerStrategies], mat: &[Vec<usize>]) -> usize {
    let mut m = 0;
    for row in mat {
        for (i, &s) in row.iter().enumerate() {
            m = m * st[i].count + s;
        }
    }
    m
}

fn profile_of(st: &[PlayerStrategies], vertex_count: usize, row: &[usize]) -> StrategyProfile {
    let mut sigma = StrategyProfile::from_choices(vec![None; vertex_count]);
    for (i, &s) in row.iter().enumerate() {
        st[i].write(s, &mut sigma);
    }
    sigma
}

/// Builds the belief graph; fails when some player has two best replies
/// in one belief state.
pub fn build_belief_graph(g: &Game, limits: &Limits) -> Result<BeliefGraph> {
    let n = g.n_players() as usize;
    let strategies: Vec<PlayerStrategies> = g.players().map(|p| PlayerStrategies::new(g, p)).collect();
    let profiles: u128 = strategies.iter().map(|s| s.count as u128).product();
    let count = (0..n).fold(1u128, |a, _| a.saturating_mul(profiles));
    let count = limits.check_count(count)? as usize;
    let space = crate::strategy::ProfileSpace::new(g);
    let labels = n + 1;
    let rows = par::try_map_range(count, limits.parallel, |m| -> Result<Vec<usize>> {
        let mat = decode(&strategies, n, m);
        let mut row = Vec::with_capacity(labels);
        let mut learned = mat.clone();
        for r in learned.iter_mut() {
            for (i, x) in r.iter_mut().enumerate() {
                *x = mat[i][i];
            }
        }
        row.push(encode(&strategies, &learned));
        for l in 0..n {
            let sigma = profile_of(&strategies, g.vertex_count(), &mat[l]);
            let p = Player::from_index(l);
            let mut moves = Vec::new();
            for &v in &strategies[l].vertices {
                for (w, best) in improving_moves(g, &sigma, v) {
                    if best {
                        moves.push((v, w));
                    }
                }
            }
            match moves.as_slice() {
                [] => row.push(m),
                [(v, w)] => {
                    let mut next = mat.clone();
                    next[l][l] = strategies[l].replace(mat[l][l], *v, *w);
                    row.push(encode(&strategies, &next));
                }
                _ => {
                    return Err(Error::NonDeterministicBestReply {
                        node: matrix_name(&space, &strategies, g.vertex_count(), &mat),
                        player: p.0,
                    })
                }
            }
        }
        Ok(row)
    })?;
    let names = par::map_range(count, limits.parallel, |m| {
        matrix_name(&space, &strategies, g.vertex_count(), &decode(&strategies, n, m))
    });
    Ok(BeliefGraph {
        n_players: n,
        graph: LabelledGraph::new(labels, rows.into_iter().flatten().collect()),
        strategies,
        vertex_count: g.vertex_count(),
        names,
    })
}

fn matrix_name(
    space: &crate::strategy::ProfileSpace,
    st: &[PlayerStrategies],
    vertex_count: usize,
    mat: &[Vec<usize>],
) -> String {
    mat.iter()
        .map(|row| space.name(&profile_of(st, vertex_count, row)))
        .collect::<Vec<_>>()
        .join("|")
}
