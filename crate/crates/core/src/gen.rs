//! Seeded random instances for the property suites.
//!
//! Every generator takes an explicit RNG so a seed reproduces an instance
//! exactly; [`rng`] builds the one the suites use.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::Limits;
use crate::game::{Game, GameParts, Play, Player, PreferenceOrder, Vertex};
use crate::minors::{apply_step, deletable, is_dominated, DeletionScript, DeletionStep};
use crate::spp::OneTargetGame;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random game.
#[derive(Clone, Copy, Debug)]
pub struct GameShape {
    pub max_players: u32,
    /// Non-terminal vertices.
    pub max_vertices: usize,
    pub max_terminals: usize,
    pub max_out_degree: usize,
    /// Only edges from lower to higher index, so the arena is acyclic.
    pub acyclic: bool,
}

impl Default for GameShape {
    fn default() -> Self {
        GameShape {
            max_players: 3,
            max_vertices: 4,
            max_terminals: 2,
            max_out_degree: 3,
            acyclic: false,
        }
    }
}

/// Ranks `plays` at random, best first, tying neighbours now and then and
/// leaving some unmentioned.
fn random_classes<R: Rng>(rng: &mut R, mut plays: Vec<Play>) -> Vec<Vec<Play>> {
    plays.shuffle(rng);
    let mut classes: Vec<Vec<Play>> = Vec::new();
    for play in plays {
        if rng.gen_bool(0.15) {
            continue;
        }
        match classes.last_mut() {
            Some(last) if rng.gen_bool(0.2) => last.push(play),
            _ => classes.push(vec![play]),
        }
    }
    classes
}

/// A random game: vertex `i` of `n` non-terminals, then the terminals.
/// Every non-terminal has at least one successor and every player owns at
/// least one vertex.
pub fn random_game<R: Rng>(rng: &mut R, shape: &GameShape) -> Game {
    let n = rng.gen_range(2..=shape.max_vertices.max(2));
    let t = rng.gen_range(1..=shape.max_terminals.max(1));
    let players = rng.gen_range(1..=shape.max_players.min(n as u32).max(1));
    let total = n + t;
    let mut names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    names.extend((1..=t).map(|i| format!("t{i}")));
    let mut edges = Vec::new();
    for u in 0..n {
        let targets: Vec<usize> = (0..total)
            .filter(|&w| if shape.acyclic { w > u } else { w != u })
            .collect();
        let k = rng.gen_range(1..=shape.max_out_degree.min(targets.len()));
        for &w in targets.choose_multiple(rng, k) {
            edges.push((Vertex(u as u32), Vertex(w as u32), None));
        }
    }
    let mut owner: Vec<Option<Player>> = (0..n)
        .map(|i| {
            if (i as u32) < players {
                Some(Player(i as u32 + 1))
            } else {
                Some(Player(rng.gen_range(1..=players)))
            }
        })
        .collect();
    owner[..n].shuffle(rng);
    owner.extend((0..t).map(|_| None));
    let arena = Game::from_parts(GameParts {
        n_players: players,
        names: names.clone(),
        edges: edges.clone(),
        owner: owner.clone(),
        prefs: Vec::new(),
    });
    let prefs = (1..=players)
        .map(|p| {
            let plays: Vec<Play> = arena
                .vertices_of(Player(p))
                .into_iter()
                .flat_map(|v| arena.positional_plays(v))
                .collect();
            PreferenceOrder::new(random_classes(rng, plays)).expect("distinct plays")
        })
        .collect();
    Game::from_parts(GameParts {
        n_players: players,
        names,
        edges,
        owner,
        prefs,
    })
}

/// A random valid deletion script of up to `max_steps` steps. Edges are
/// only deleted while their source keeps another successor, so every
/// player vertex stays a player vertex.
pub fn random_script<R: Rng>(rng: &mut R, g: &Game, max_steps: usize) -> DeletionScript {
    let mut cur = g.clone();
    let mut script = Vec::new();
    for _ in 0..rng.gen_range(1..=max_steps.max(1)) {
        let mut options: Vec<DeletionStep> = cur
            .vertices()
            .filter(|&v| deletable(&cur, v).is_ok())
            .map(|v| DeletionStep::Vertex(cur.name(v).into()))
            .collect();
        options.extend(
            cur.edges()
                .filter(|&(u, _)| cur.successors(u).len() > 1)
                .map(|(u, v)| DeletionStep::Edge(cur.name(u).into(), cur.name(v).into())),
        );
        let Some(step) = options.choose(rng).cloned() else {
            break;
        };
        cur = apply_step(&cur, &step).expect("step chosen among valid ones").0;
        script.push(step);
    }
    script
}

/// Makes edge `v → good` dominate every other edge out of `v` by lifting
/// every positional play from `v` through `good` above all plays the
/// owner ranks.
pub fn plant_domination(g: &Game, v: Vertex, good: Vertex) -> Game {
    let p = g.owner(v).expect("planted vertex is owned");
    let boosted: Vec<Play> = g
        .positional_plays(v)
        .into_iter()
        .filter(|play| play.vertices().nth(1) == Some(good))
        .collect();
    let mut classes: Vec<Vec<Play>> = boosted.iter().map(|x| vec![x.clone()]).collect();
    classes.extend(
        g.preference(p)
            .classes()
            .iter()
            .map(|c| c.iter().filter(|x| !boosted.contains(x)).cloned().collect()),
    );
    let mut out = g.clone();
    out.set_preference(p, PreferenceOrder::new(classes).expect("distinct plays"));
    out
}

/// A script deleting only dominated edges (and any deletable vertices).
/// One domination is planted first so the script is rarely empty; the
/// planted game is returned alongside.
pub fn random_dominant_minor<R: Rng>(
    rng: &mut R,
    g: &Game,
    max_steps: usize,
    limits: &Limits,
) -> crate::Result<(Game, DeletionScript)> {
    let branching: Vec<Vertex> = g.non_terminals().filter(|&v| g.successors(v).len() >= 2).collect();
    let base = match branching.choose(rng) {
        Some(&v) => {
            let good = *g.successors(v).choose(rng).unwrap();
            plant_domination(g, v, good)
        }
        None => g.clone(),
    };
    let mut cur = base.clone();
    let mut script = Vec::new();
    for _ in 0..max_steps {
        let mut options: Vec<DeletionStep> = cur
            .vertices()
            .filter(|&v| deletable(&cur, v).is_ok())
            .map(|v| DeletionStep::Vertex(cur.name(v).into()))
            .collect();
        for (u, w) in cur.edges() {
            let dominated = cur
                .successors(u)
                .iter()
                .filter(|&&x| x != w)
                .map(|&x| is_dominated(&cur, (u, w), (u, x), limits))
                .collect::<crate::Result<Vec<bool>>>()?
                .into_iter()
                .any(|d| d);
            if dominated {
                options.push(DeletionStep::Edge(cur.name(u).into(), cur.name(w).into()));
            }
        }
        // prefer edge deletions: they are what the domination is about
        let edges: Vec<&DeletionStep> = options.iter().filter(|s| matches!(s, DeletionStep::Edge(..))).collect();
        let step = if !edges.is_empty() && rng.gen_bool(0.7) {
            (*edges.choose(rng).unwrap()).clone()
        } else if let Some(s) = options.choose(rng) {
            s.clone()
        } else {
            break;
        };
        cur = apply_step(&cur, &step)?.0;
        script.push(step);
    }
    Ok((base, script))
}

/// Shape of a random one-target game.
#[derive(Clone, Copy, Debug)]
pub struct OtgShape {
    pub max_players: u32,
    /// Probability of an edge between two player vertices.
    pub edge_density: f64,
    /// Probability of a direct edge to the target.
    pub direct_density: f64,
    /// Rank permitted paths by next hop only.
    pub neighbour: bool,
}

impl Default for OtgShape {
    fn default() -> Self {
        OtgShape {
            max_players: 4,
            edge_density: 0.45,
            direct_density: 0.7,
            neighbour: false,
        }
    }
}

/// A random one-target game: players `v1..vn`, target `d`. Permitted sets
/// are a random set of simple paths closed under suffixes; rankings are
/// random, with ties only between paths sharing a next hop. With
/// `neighbour` set, the ranking is by next hop alone.
pub fn random_otg<R: Rng>(rng: &mut R, shape: &OtgShape) -> OneTargetGame {
    let n = rng.gen_range(2..=shape.max_players.max(2)) as usize;
    let mut names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    names.push("d".into());
    let d = Vertex(n as u32);
    let mut edges = Vec::new();
    for u in 0..n {
        let mut any = false;
        for w in 0..n {
            if w != u && rng.gen_bool(shape.edge_density) {
                edges.push((Vertex(u as u32), Vertex(w as u32), None));
                any = true;
            }
        }
        if !any || rng.gen_bool(shape.direct_density) {
            edges.push((Vertex(u as u32), d, None));
        }
    }
    let owner: Vec<Option<Player>> = (0..n).map(|i| Some(Player::from_index(i))).chain([None]).collect();
    let arena = Game::from_parts(GameParts {
        n_players: n as u32,
        names: names.clone(),
        edges: edges.clone(),
        owner: owner.clone(),
        prefs: Vec::new(),
    });
    let mut chosen: std::collections::BTreeSet<Vec<Vertex>> = std::collections::BTreeSet::new();
    for u in 0..n {
        for play in arena.positional_plays(Vertex(u as u32)) {
            if let Play::Finite(p) = play {
                if rng.gen_bool(0.6) {
                    for k in 0..p.len() - 1 {
                        chosen.insert(p[k..].to_vec());
                    }
                }
            }
        }
    }
    let mut permitted: Vec<Vec<Play>> = vec![Vec::new(); n];
    for p in &chosen {
        permitted[p[0].index()].push(Play::Finite(p.clone()));
    }
    let prefs = permitted
        .iter()
        .map(|perm| {
            let mut hops: Vec<Vertex> = perm.iter().filter_map(|p| p.vertices().nth(1)).collect();
            hops.sort();
            hops.dedup();
            hops.shuffle(rng);
            let mut classes: Vec<Vec<Play>> = Vec::new();
            for h in hops {
                let mut group: Vec<Play> = perm
                    .iter()
                    .filter(|p| p.vertices().nth(1) == Some(h))
                    .cloned()
                    .collect();
                if shape.neighbour {
                    classes.push(group);
                } else {
                    group.shuffle(rng);
                    for play in group {
                        match classes.last_mut() {
                            Some(last) if rng.gen_bool(0.2) && last[0].vertices().nth(1) == Some(h) => last.push(play),
                            _ => classes.push(vec![play]),
                        }
                    }
                }
            }
            if !shape.neighbour {
                // interleave next hops: shuffle whole classes
                classes.shuffle(rng);
            }
            PreferenceOrder::new(classes).expect("distinct plays")
        })
        .collect();
    let game = Game::from_parts(GameParts {
        n_players: n as u32,
        names,
        edges,
        owner,
        prefs,
    });
    OneTargetGame::new(game, permitted).expect("generated instances satisfy the axioms")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_reproduce() {
        let a = random_game(&mut rng(7), &GameShape::default());
        let b = random_game(&mut rng(7), &GameShape::default());
        assert_eq!(crate::format::game_to_json(&a), crate::format::game_to_json(&b));
        for seed in 0..50 {
            let g = random_game(&mut rng(seed), &GameShape::default());
            assert_eq!(crate::game::validate_game(&g), vec![]);
            let o = random_otg(
                &mut rng(seed),
                &OtgShape {
                    neighbour: true,
                    ..OtgShape::default()
                },
            );
            assert!(crate::spp::is_notg(&o));
            random_otg(&mut rng(seed), &OtgShape::default());
        }
    }
}
