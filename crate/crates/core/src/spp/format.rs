//! Routing-instance files: each node lists its permitted paths to the
//! origin, best first.
//!
//! ```json
//! {"origin": "d",
//!  "nodes": {"a": {"paths": [["a","b","d"], ["a","d"]]},
//!            "b": {"paths": [["b","a","d"], ["b","d"]]}},
//!  "extra_edges": [["a","c"]]}
//! ```
//!
//! A path entry may also be a list of paths, which are then tied.

use indexmap::IndexMap;
use serde::Deserialize;

use super::OneTargetGame;
use crate::error::{Error, Result};
use crate::game::{Game, GameParts, Play, PreferenceOrder, Vertex};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpp {
    origin: String,
    nodes: IndexMap<String, RawNode>,
    #[serde(default)]
    extra_edges: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    #[serde(default)]
    paths: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Path(Vec<String>),
    Tie(Vec<Vec<String>>),
}

/// Parses a routing instance into a one-target game where node `k` (in
/// file order) is player `k`. Missing suffixes of permitted paths are an
/// error unless `complete_suffixes` is set, in which case each one is
/// appended as a new lowest-ranked class of its node.
pub fn parse_spp(text: &str, complete_suffixes: bool) -> Result<OneTargetGame> {
    let raw: RawSpp = serde_json::from_str(text).map_err(Error::from_json)?;
    let mut names: Vec<String> = raw.nodes.keys().cloned().collect();
    if raw.nodes.contains_key(&raw.origin) {
        return Err(Error::UnknownPlayer {
            key: raw.origin.clone(),
            context: "the origin cannot own paths".into(),
        });
    }
    names.push(raw.origin.clone());
    let lookup = |name: &str, context: &str| -> Result<Vertex> {
        names
            .iter()
            .position(|n| n == name)
            .map(|i| Vertex(i as u32))
            .ok_or_else(|| Error::UnknownVertex {
                name: name.into(),
                context: context.into(),
            })
    };
    // classes[k] lists node k's permitted classes, best first
    let mut classes: Vec<Vec<Vec<Vec<Vertex>>>> = Vec::new();
    for (node, spec) in &raw.nodes {
        let context = format!("paths of `{node}`");
        let mut mine = Vec::new();
        for entry in &spec.paths {
            let group = match entry {
                RawEntry::Path(p) => vec![p.clone()],
                RawEntry::Tie(ps) => ps.clone(),
            };
            let mut class = Vec::new();
            for p in group {
                class.push(p.iter().map(|x| lookup(x, &context)).collect::<Result<Vec<_>>>()?);
            }
            mine.push(class);
        }
        classes.push(mine);
    }
    let mut missing = Vec::new();
    loop {
        let known: std::collections::BTreeSet<Vec<Vertex>> = classes.iter().flatten().flatten().cloned().collect();
        let mut added = false;
        for path in known.iter() {
            for k in 1..path.len().saturating_sub(1) {
                let suffix = path[k..].to_vec();
                let owner = suffix[0].index();
                if owner >= classes.len()
                    || known.contains(&suffix)
                    || classes[owner].iter().flatten().any(|p| *p == suffix)
                {
                    continue;
                }
                let shown = suffix
                    .iter()
                    .map(|v| names[v.index()].as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                if complete_suffixes {
                    log::info!("adding missing suffix `{shown}`");
                    classes[owner].push(vec![suffix]);
                    added = true;
                } else if !missing.contains(&shown) {
                    missing.push(shown);
                }
            }
        }
        if !added {
            break;
        }
    }
    if !missing.is_empty() {
        return Err(Error::SuffixClosureRepairNeeded(missing));
    }
    let mut edges: Vec<(Vertex, Vertex, Option<String>)> = Vec::new();
    let mut add_edge = |u: Vertex, v: Vertex| {
        if !edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) {
            edges.push((u, v, None));
        }
    };
    for path in classes.iter().flatten().flatten() {
        for e in path.windows(2) {
            add_edge(e[0], e[1]);
        }
    }
    for (u, v) in &raw.extra_edges {
        add_edge(lookup(u, "extra_edges")?, lookup(v, "extra_edges")?);
    }
    let n = raw.nodes.len();
    let mut owner: Vec<Option<crate::game::Player>> =
        (0..n).map(|k| Some(crate::game::Player::from_index(k))).collect();
    owner.push(None);
    let mut prefs = Vec::new();
    let mut permitted = Vec::new();
    for mine in classes {
        let play_classes: Vec<Vec<Play>> = mine
            .iter()
            .map(|c| c.iter().map(|p| Play::Finite(p.clone())).collect())
            .collect();
        permitted.push(play_classes.iter().flatten().cloned().collect::<Vec<_>>());
        let order = PreferenceOrder::new(play_classes).map_err(|dup| {
            Error::InvalidGame(vec![crate::error::Diagnostic::new(
                crate::error::DiagnosticKind::DuplicatePlay,
                format!(
                    "path `{}` is listed twice",
                    dup.vertices()
                        .map(|v| names[v.index()].as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            )])
        })?;
        prefs.push(order);
    }
    let game = Game::from_parts(GameParts {
        n_players: n as u32,
        names,
        edges,
        owner,
        prefs,
    });
    OneTargetGame::new(game, permitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_suffix_reported_or_repaired() {
        let text = r#"{"origin":"d","nodes":{"a":{"paths":[["a","b","d"]]},"b":{"paths":[]}}}"#;
        match parse_spp(text, false) {
            Err(Error::SuffixClosureRepairNeeded(m)) => assert_eq!(m, vec!["b d".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
        let otg = parse_spp(text, true).unwrap();
        assert_eq!(otg.permitted(crate::game::Player(2)).len(), 1);
    }
}
