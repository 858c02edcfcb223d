//! JSON game files.
//!
//! ```json
//! {
//!   "players": 2,
//!   "vertices": ["v1", "v2", "t"],
//!   "edges": [["v1", "v2", "c1"], ["v1", "t", "s1"], ["v2", "v1"], ["v2", "t"]],
//!   "owner": {"v1": 1, "v2": 2},
//!   "preferences": {
//!     "1": [[{"path": ["v1", "v2", "t"]}], [{"path": ["v1", "t"]}]],
//!     "2": [[{"lasso": {"stem": ["v2"], "loop": ["v1", "v2"]}}]]
//!   }
//! }
//! ```
//!
//! Rank classes are listed best first. An edge may carry an optional third
//! element naming the action; names are used when displaying profiles.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, DiagnosticKind, Error, Result};
use crate::game::{validate_game, Game, GameParts, Play, PlayDesc, Player, PreferenceOrder, Vertex};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    players: u32,
    vertices: Vec<String>,
    edges: Vec<RawEdge>,
    #[serde(default)]
    owner: IndexMap<String, u32>,
    #[serde(default)]
    preferences: IndexMap<String, Vec<Vec<RawPlay>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawEdge {
    Plain(String, String),
    Named(String, String, String),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawPlay {
    Path(Vec<String>),
    Lasso(RawLasso),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLasso {
    #[serde(default)]
    stem: Vec<String>,
    #[serde(rename = "loop")]
    cycle: Vec<String>,
}

/// Parses and validates a game file.
pub fn parse_game(text: &str) -> Result<Game> {
    let raw: RawGame = serde_json::from_str(text).map_err(Error::from_json)?;
    build(raw)
}

fn build(raw: RawGame) -> Result<Game> {
    let mut diags = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut index: IndexMap<String, Vertex> = IndexMap::new();
    for name in raw.vertices {
        if index.contains_key(&name) {
            diags.push(Diagnostic::new(
                DiagnosticKind::DuplicateVertex,
                format!("vertex `{name}` declared twice"),
            ));
            continue;
        }
        index.insert(name.clone(), Vertex(names.len() as u32));
        names.push(name);
    }
    let lookup = |name: &str, context: &str| -> Result<Vertex> {
        index.get(name).copied().ok_or_else(|| Error::UnknownVertex {
            name: name.to_string(),
            context: context.to_string(),
        })
    };

    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for e in &raw.edges {
        let (u, v, l) = match e {
            RawEdge::Plain(u, v) => (u, v, None),
            RawEdge::Named(u, v, l) => (u, v, Some(l.clone())),
        };
        let (u, v) = (lookup(u, "edges")?, lookup(v, "edges")?);
        if !seen.insert((u, v)) {
            diags.push(Diagnostic::new(
                DiagnosticKind::DuplicateEdge,
                format!("edge `{}` -> `{}` listed twice", names[u.index()], names[v.index()]),
            ));
            continue;
        }
        edges.push((u, v, l));
    }

    let mut owner = vec![None; names.len()];
    for (name, &p) in &raw.owner {
        let v = lookup(name, "owner")?;
        owner[v.index()] = Some(Player(p));
    }

    // the arena is needed to canonicalize plays
    let arena = Game::from_parts(GameParts {
        n_players: raw.players,
        names: names.clone(),
        edges: edges.clone(),
        owner: owner.clone(),
        prefs: Vec::new(),
    });

    let mut prefs = vec![PreferenceOrder::default(); raw.players as usize];
    for (key, classes) in raw.preferences {
        let context = format!("preferences.{key}");
        let p: u32 = key.parse().map_err(|_| Error::UnknownPlayer {
            key: key.clone(),
            context: "preferences".into(),
        })?;
        if p == 0 || p > raw.players {
            diags.push(Diagnostic::new(
                DiagnosticKind::UnknownPlayer,
                format!(
                    "preferences given for player {p}, but the game has {} players",
                    raw.players
                ),
            ));
            continue;
        }
        let mut plays = Vec::with_capacity(classes.len());
        for class in classes {
            let mut out = Vec::with_capacity(class.len());
            for rp in class {
                let desc = match rp {
                    RawPlay::Path(p) => PlayDesc::Path(p.iter().map(|n| lookup(n, &context)).collect::<Result<_>>()?),
                    RawPlay::Lasso(l) => PlayDesc::Lasso {
                        stem: l.stem.iter().map(|n| lookup(n, &context)).collect::<Result<_>>()?,
                        cycle: l.cycle.iter().map(|n| lookup(n, &context)).collect::<Result<_>>()?,
                    },
                };
                match arena.canonicalize(&desc) {
                    Ok(play) => out.push(play),
                    Err(e) => diags.push(Diagnostic::new(DiagnosticKind::InvalidPlay, format!("player {p}: {e}"))),
                }
            }
            plays.push(out);
        }
        match PreferenceOrder::new(plays) {
            Ok(order) => prefs[(p - 1) as usize] = order,
            Err(dup) => diags.push(Diagnostic::new(
                DiagnosticKind::DuplicatePlay,
                format!(
                    "player {p}: `{}` appears in two rank classes",
                    arena.play_to_string(&dup)
                ),
            )),
        }
    }

    let game = Game::from_parts(GameParts {
        n_players: raw.players,
        names,
        edges,
        owner,
        prefs,
    });
    diags.extend(validate_game(&game));
    if diags.is_empty() {
        Ok(game)
    } else {
        Err(Error::InvalidGame(diags))
    }
}

fn raw_play(g: &Game, play: &Play) -> RawPlay {
    let names = |s: &[Vertex]| s.iter().map(|&v| g.name(v).to_string()).collect();
    match play {
        Play::Finite(p) => RawPlay::Path(names(p)),
        Play::Lasso { stem, cycle } => RawPlay::Lasso(RawLasso {
            stem: names(stem),
            cycle: names(cycle),
        }),
    }
}

/// Serializes a game in the input format (pretty-printed, stable order).
pub fn game_to_json(g: &Game) -> String {
    let raw = RawGame {
        players: g.n_players(),
        vertices: g.names().to_vec(),
        edges: g
            .edges()
            .map(|(u, v)| {
                let (a, b) = (g.name(u).to_string(), g.name(v).to_string());
                match g.edge_label(u, v) {
                    Some(l) => RawEdge::Named(a, b, l.to_string()),
                    None => RawEdge::Plain(a, b),
                }
            })
            .collect(),
        owner: g
            .vertices()
            .filter_map(|v| g.owner(v).map(|p| (g.name(v).to_string(), p.0)))
            .collect(),
        preferences: g
            .players()
            .filter(|&p| !g.preference(p).classes().is_empty())
            .map(|p| {
                let classes = g
                    .preference(p)
                    .classes()
                    .iter()
                    .map(|c| {
                        let mut c: Vec<&Play> = c.iter().collect();
                        c.sort();
                        c.into_iter().map(|play| raw_play(g, play)).collect()
                    })
                    .collect();
                (p.0.to_string(), classes)
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("game serialization cannot fail")
}

/// Parses a play written as whitespace- or dot-separated vertex names, e.g.
/// `"v1 v2 t"`; used by the command line.
pub fn parse_path(g: &Game, text: &str) -> Result<Vec<Vertex>> {
    text.split(|c: char| c.is_whitespace() || c == '.')
        .filter(|s| !s.is_empty())
        .map(|n| g.require_vertex(n, "path"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISAGREEMENT: &str = r#"{
      "players": 2,
      "vertices": ["v1", "v2", "vbot"],
      "edges": [["v1","v2","c1"], ["v1","vbot","s1"], ["v2","v1","c2"], ["v2","vbot","s2"]],
      "owner": {"v1": 1, "v2": 2},
      "preferences": {
        "1": [[{"path":["v1","v2","vbot"]}], [{"path":["v1","vbot"]}]],
        "2": [[{"path":["v2","v1","vbot"]}], [{"path":["v2","vbot"]}]]
      }
    }"#;

    #[test]
    fn round_trip() {
        let g = parse_game(DISAGREEMENT).unwrap();
        let text = game_to_json(&g);
        let h = parse_game(&text).unwrap();
        assert_eq!(game_to_json(&h), text);
        assert_eq!(g.edge_label(Vertex(0), Vertex(1)), Some("c1"));
    }

    #[test]
    fn rejects_unknown_fields_and_vertices() {
        let bad = DISAGREEMENT.replace("\"players\"", "\"colour\": 1, \"players\"");
        assert!(matches!(parse_game(&bad), Err(Error::Syntax { .. })));
        let bad = DISAGREEMENT.replace("[\"v2\",\"vbot\",\"s2\"]", "[\"v2\",\"nowhere\"]");
        assert!(matches!(parse_game(&bad), Err(Error::UnknownVertex { .. })));
    }

    #[test]
    fn reports_non_maximal_play() {
        let bad = DISAGREEMENT.replace("{\"path\":[\"v1\",\"vbot\"]}", "{\"path\":[\"v1\",\"v2\"]}");
        match parse_game(&bad) {
            Err(Error::InvalidGame(d)) => assert_eq!(d[0].kind, DiagnosticKind::InvalidPlay),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_missing_owner() {
        let bad = DISAGREEMENT.replace("\"v2\": 2", "\"v1\": 1");
        match parse_game(&bad) {
            Err(Error::InvalidGame(d)) => {
                assert!(d.iter().any(|x| x.kind == DiagnosticKind::MissingOwner))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
