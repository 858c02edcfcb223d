//! Command-line front end.
//!
//! Every subcommand builds one ordered JSON object. `--output json` prints
//! it as is; `--output text` prints the same keys and values one per line,
//! so scripts and people read the same facts. `--output dot` is accepted
//! by the commands that produce a graph (`dynamics`, `belief`).
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | analysis done; terminates, safe, or holds |
//! | 2 | usage error |
//! | 3 | a cycle, a fair cycle, unsafety or a violated property was found |
//! | 4 | the structural safety analysis could not decide |
//! | 5 | malformed or invalid input (game, routing instance, script, edge) |
//! | 6 | a state-space guard or search budget ran out |
//! | 7 | structural and exact safety verdicts disagree |
//! | 8 | a file could not be read |
//! | 9 | the analysis does not apply to this input |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gamedyn_core::analysis::{
    check_diamond, equilibria, find_cycle, find_fair_cycle, find_lfair_cycle, reachable_two_sinks, sinks, CycleWitness,
};
use gamedyn_core::dot::{belief_to_dot, dynamics_to_dot};
use gamedyn_core::dynamics::{build_belief_graph, build_dynamics, DynamicsGraph, DynamicsKind};
use gamedyn_core::format::{game_to_json, parse_game};
use gamedyn_core::minors::{apply_script, find_dis_minor, is_dominated, parse_script, profile_embedding};
use gamedyn_core::relations::{is_simulation, largest_simulation, Relation};
use gamedyn_core::spp::{
    check_dw, check_sdw, find_dispute_wheel, find_sdw, is_notg, parse_spp, safety_verdict, Mode, OneTargetGame,
};
use gamedyn_core::theorems::{run_suite, Suite};
use gamedyn_core::{Error, Game, Limits, Vertex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FOUND: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;
pub const EXIT_INPUT: i32 = 5;
pub const EXIT_GUARD: i32 = 6;
pub const EXIT_INCONSISTENT: i32 = 7;
pub const EXIT_IO: i32 = 8;
pub const EXIT_UNSUPPORTED: i32 = 9;

#[derive(Parser, Debug)]
#[command(name = "gamedyn", version, about = "Strategy-update dynamics of games on graphs")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Largest number of profiles or belief states to build.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub profile_guard: u64,
    /// Largest number of expansions for the wheel and minor searches.
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub search_budget: u64,
    /// Ignore the profile guard.
    #[arg(long, global = true)]
    pub force: bool,
    /// Run on a single thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// First seed of the generated instances (check-theorems).
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    pub output: Output,
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits {
            profile_guard: self.profile_guard,
            search_budget: self.search_budget,
            force: self.force,
            parallel: !self.sequential,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a dynamics graph and print its size, or its DOT.
    Dynamics {
        game: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: DynamicsKind,
    },
    /// Decide termination or fair termination, or list equilibria.
    Analyze {
        game: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: DynamicsKind,
        #[arg(long, value_enum)]
        check: Check,
    },
    /// Apply a deletion script and check that the original dynamics
    /// simulates the minor's.
    Minor {
        game: PathBuf,
        #[arg(long)]
        script: PathBuf,
    },
    /// Is the first edge dominated by the second? Edges are written `u->v`.
    Dominated {
        game: PathBuf,
        #[arg(long, num_args = 2, value_names = ["E1", "E2"])]
        edges: Vec<String>,
    },
    /// Routing-instance analyses.
    Spp {
        #[command(subcommand)]
        command: SppCommand,
    },
    /// Build the belief graph and report sinks, the diamond property and
    /// a cycle using every label.
    Belief { game: PathBuf },
    /// Search for a minor with the disagreement shape.
    DisMinor { game: PathBuf },
    /// Run the randomized property suites.
    CheckTheorems {
        /// One suite; all of them when absent.
        #[arg(long, value_parser = parse_suite)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

#[derive(Args, Debug)]
struct SppInput {
    /// A routing instance (`{"origin": ..., "nodes": ...}`) or a game file.
    instance: PathBuf,
    /// Add missing suffixes of permitted paths at the bottom of each ranking.
    #[arg(long)]
    complete_suffixes: bool,
}

#[derive(Subcommand, Debug)]
enum SppCommand {
    /// Check the one-target axioms and report permitted path counts.
    Validate(SppInput),
    /// Search for a dispute wheel.
    Dw(SppInput),
    /// Search for a strong dispute wheel.
    Sdw(SppInput),
    /// Layered safety verdict; exit 0 safe, 3 unsafe, 4 undecided.
    Safety {
        #[command(flatten)]
        input: SppInput,
        #[arg(long, default_value = "both", value_parser = parse_mode)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Termination,
    FairTermination,
    Equilibria,
}

fn parse_kind(s: &str) -> Result<DynamicsKind, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ScriptStep { source, .. } => exit_code(source),
        Error::StateSpaceTooLarge { .. } | Error::SearchBudgetExceeded(_) => EXIT_GUARD,
        Error::InconsistentVerdict(_) => EXIT_INCONSISTENT,
        Error::Io(_) => EXIT_IO,
        Error::CyclicArena | Error::NonDeterministicBestReply { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_INPUT,
    }
}

/// What a subcommand produced.
enum Report {
    Fields(Map<String, Value>, i32),
    Dot(String),
}

/// Parses `argv` (program name first), runs one analysis and writes its
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let output = cli.config.output;
    let dot_capable = matches!(cli.command, Command::Dynamics { .. } | Command::Belief { .. });
    if output == Output::Dot && !dot_capable {
        let _ = writeln!(err, "error: --output dot is only available for `dynamics` and `belief`");
        return EXIT_USAGE;
    }
    match run(cli.command, &cli.config) {
        Ok(Report::Dot(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Ok(Report::Fields(fields, code)) => {
            let text = match output {
                Output::Json => {
                    let mut s = serde_json::to_string_pretty(&Value::Object(fields)).expect("report serializes");
                    s.push('\n');
                    s
                }
                _ => render_text(&fields),
            };
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            log::debug!("{e:?}");
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// `key: value` lines; nested objects and lists of objects are indented.
pub fn render_text(fields: &Map<String, Value>) -> String {
    let mut out = String::new();
    render_fields(fields, 0, &mut out);
    out
}

fn render_fields(fields: &Map<String, Value>, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for (key, value) in fields {
        let key = key.replace('_', " ");
        match value {
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{key}:\n"));
                render_fields(inner, depth + 1, out);
            }
            Value::Array(items) if items.iter().any(|v| v.is_object()) => {
                out.push_str(&format!("{pad}{key}:\n"));
                for item in items {
                    match item {
                        Value::Object(inner) => {
                            out.push_str(&format!("{pad}  -\n"));
                            render_fields(inner, depth + 2, out);
                        }
                        other => out.push_str(&format!("{pad}  - {}\n", inline(other))),
                    }
                }
            }
            other => out.push_str(&format!("{pad}{key}: {}\n", inline(other))),
        }
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn read(path: &Path) -> gamedyn_core::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_game(path: &Path) -> gamedyn_core::Result<Game> {
    parse_game(&read(path)?)
}

/// Routing instances are recognised by their `origin` key; anything else
/// is read as a game whose permitted paths are the ranked ones.
fn load_otg(input: &SppInput) -> gamedyn_core::Result<OneTargetGame> {
    let text = read(&input.instance)?;
    let is_spp = serde_json::from_str::<Value>(&text)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("origin")))
        .unwrap_or(false);
    if is_spp {
        parse_spp(&text, input.complete_suffixes)
    } else {
        OneTargetGame::from_game(parse_game(&text)?)
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("reports are objects"),
    }
}

fn names(dg: &DynamicsGraph, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&u| dg.name(u).to_string()).collect()
}

fn witness_json(dg: &DynamicsGraph, w: &CycleWitness) -> Value {
    json!({"path": names(dg, &w.path_to_cycle), "cycle": names(dg, &w.cycle)})
}

fn parse_edge(g: &Game, text: &str) -> gamedyn_core::Result<(Vertex, Vertex)> {
    let (a, b) = text
        .split_once("->")
        .or_else(|| text.split_once(','))
        .ok_or_else(|| Error::UnknownEdge(text.into(), String::new()))?;
    let (a, b) = (a.trim(), b.trim());
    let u = g.require_vertex(a, "--edges")?;
    let v = g.require_vertex(b, "--edges")?;
    if !g.has_edge(u, v) {
        return Err(Error::UnknownEdge(a.into(), b.into()));
    }
    Ok((u, v))
}

fn run(command: Command, config: &RunConfig) -> gamedyn_core::Result<Report> {
    let limits = config.limits();
    match command {
        Command::Dynamics { game, kind } => {
            let g = load_game(&game)?;
            let dg = build_dynamics(&g, kind, &limits)?;
            if config.output == Output::Dot {
                return Ok(Report::Dot(dynamics_to_dot(&dg)));
            }
            let eq = equilibria(&dg);
            Ok(Report::Fields(
                object(json!({
                    "kind": kind.as_str(),
                    "nodes": dg.node_count(),
                    "edges": dg.edge_count(),
                    "equilibria": names(&dg, &eq),
                })),
                EXIT_OK,
            ))
        }
        Command::Analyze { game, kind, check } => {
            let g = load_game(&game)?;
            let dg = build_dynamics(&g, kind, &limits)?;
            analyze(&dg, check)
        }
        Command::Minor { game, script } => {
            let g = load_game(&game)?;
            let script = parse_script(&read(&script)?)?;
            minor(&g, &script, &limits)
        }
        Command::Dominated { game, edges } => {
            let g = load_game(&game)?;
            let e1 = parse_edge(&g, &edges[0])?;
            let e2 = parse_edge(&g, &edges[1])?;
            if e1.0 != e2.0 {
                return Err(Error::SourceMismatch(edges[0].clone(), edges[1].clone()));
            }
            let dominated = is_dominated(&g, e1, e2, &limits)?;
            Ok(Report::Fields(
                object(json!({"edge": edges[0], "by": edges[1], "dominated": dominated})),
                EXIT_OK,
            ))
        }
        Command::Spp { command } => spp(command, &limits),
        Command::Belief { game } => {
            let g = load_game(&game)?;
            let bg = build_belief_graph(&g, &limits)?;
            if config.output == Output::Dot {
                return Ok(Report::Dot(belief_to_dot(&bg)));
            }
            let lg = bg.graph();
            let name = |m: usize| bg.name(m).to_string();
            let diamond = check_diamond(lg);
            let cycle = find_lfair_cycle(lg);
            let cycle_json = cycle.as_ref().map(|c| {
                json!({
                    "nodes": c.nodes.iter().map(|&m| name(m)).collect::<Vec<_>>(),
                    "labels": c.labels,
                    "replayed": c.validate(lg),
                    "constant": c.is_constant(),
                })
            });
            Ok(Report::Fields(
                object(json!({
                    "nodes": bg.node_count(),
                    "labels": lg.n_labels(),
                    "sinks": sinks(lg).into_iter().map(name).collect::<Vec<_>>(),
                    "diamond": diamond.holds,
                    "diamond_counterexample": diamond.counterexample.map(|(v, a, b)| json!([name(v), a, b])),
                    "two_sinks_from": reachable_two_sinks(lg).map(|(v, a, b)| json!([name(v), name(a), name(b)])),
                    "lfair_cycle": cycle_json,
                })),
                EXIT_OK,
            ))
        }
        Command::DisMinor { game } => {
            let g = load_game(&game)?;
            let found = find_dis_minor(&g, &limits)?;
            let fields = match found {
                Some(m) => json!({
                    "found": true,
                    "script": m.script.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    "minor_vertices": m.minor.names(),
                }),
                None => json!({"found": false}),
            };
            Ok(Report::Fields(object(fields), EXIT_OK))
        }
        Command::CheckTheorems { suite, count } => {
            let suites: Vec<Suite> = suite.map_or(Suite::ALL.to_vec(), |s| vec![s]);
            let mut reports = Vec::new();
            let mut code = EXIT_OK;
            for s in suites {
                let r = run_suite(s, config.seed, count, &limits);
                if !r.violations.is_empty() {
                    code = EXIT_FOUND;
                } else if !r.inconclusive.is_empty() && code == EXIT_OK {
                    code = EXIT_GUARD;
                }
                reports.push(json!({
                    "suite": s.as_str(),
                    "instances": r.instances,
                    "exercised": r.exercised,
                    "violations": r.violations.iter().map(|v| json!({"seed": v.seed, "detail": v.detail})).collect::<Vec<_>>(),
                    "inconclusive": r.inconclusive.iter().map(|(seed, why)| json!({"seed": seed, "reason": why})).collect::<Vec<_>>(),
                    "passed": r.passed(),
                }));
            }
            Ok(Report::Fields(
                object(json!({"seed": config.seed, "suites": reports})),
                code,
            ))
        }
    }
}

fn analyze(dg: &DynamicsGraph, check: Check) -> gamedyn_core::Result<Report> {
    let kind = dg.kind().as_str();
    Ok(match check {
        Check::Termination => {
            let cycle = find_cycle(dg);
            let code = if cycle.is_some() { EXIT_FOUND } else { EXIT_OK };
            Report::Fields(
                object(json!({
                    "kind": kind,
                    "terminates": cycle.is_none(),
                    "cycle": cycle.map(|w| witness_json(dg, &w)),
                })),
                code,
            )
        }
        Check::FairTermination => {
            let report = find_fair_cycle(dg);
            let clauses: Vec<Value> = report
                .clauses
                .iter()
                .map(|(p, c)| json!({"player": p.0, "clause": c.tag()}))
                .collect();
            let code = if report.fair { EXIT_FOUND } else { EXIT_OK };
            Report::Fields(
                object(json!({
                    "kind": kind,
                    "fairly_terminates": !report.fair,
                    "fair_cycle": report.witness.as_ref().map(|w| names(dg, &w.cycle)),
                    "replayed": report.validate(dg),
                    "clauses": clauses,
                })),
                code,
            )
        }
        Check::Equilibria => Report::Fields(
            object(json!({"kind": kind, "equilibria": names(dg, &equilibria(dg))})),
            EXIT_OK,
        ),
    })
}

/// Applies the script, then for P1, PC (and one-step on acyclic arenas)
/// checks that the original dynamics simulates the minor's, both through
/// the largest simulation and through the profile embedding.
fn minor(g: &Game, script: &[gamedyn_core::minors::DeletionStep], limits: &Limits) -> gamedyn_core::Result<Report> {
    let m = apply_script(g, script)?;
    let mut kinds = vec![DynamicsKind::P1, DynamicsKind::PC];
    if g.is_acyclic() {
        kinds.insert(0, DynamicsKind::OneStep);
    }
    let embed = profile_embedding(&m, script, limits)?;
    let embed_rel = Relation::new(embed.iter().enumerate().map(|(a, &b)| (a, b)));
    let mut checks = Vec::new();
    let mut all = true;
    for kind in kinds {
        let small = build_dynamics(&m.game, kind, limits)?;
        let big = build_dynamics(g, kind, limits)?;
        let sim = largest_simulation(small.graph(), big.graph(), limits)?.full_domain;
        let mut entry = json!({"kind": kind.as_str(), "simulated": sim});
        if kind != DynamicsKind::OneStep {
            let by_embedding = is_simulation(small.graph(), big.graph(), &embed_rel);
            entry["embedding_is_simulation"] = json!(by_embedding);
        }
        all &= sim;
        checks.push(entry);
    }
    let steps: Vec<Value> = m
        .records
        .iter()
        .map(|r| {
            json!({
                "step": r.step.to_string(),
                "dropped_plays": r.dropped_plays,
                "rewritten_plays": r.rewritten_plays,
                "new_terminal": r.new_terminal,
            })
        })
        .collect();
    let minor_game: Value = serde_json::from_str(&game_to_json(&m.game)).expect("game JSON is valid");
    Ok(Report::Fields(
        object(json!({
            "steps": steps,
            "vertices": m.game.names(),
            "edges": m.game.edge_count(),
            "simulation": checks,
            "minor": minor_game,
        })),
        if all { EXIT_OK } else { EXIT_FOUND },
    ))
}

fn spp(command: SppCommand, limits: &Limits) -> gamedyn_core::Result<Report> {
    match command {
        SppCommand::Validate(input) => {
            let otg = load_otg(&input)?;
            let g = otg.game();
            let nodes: Map<String, Value> = g
                .players()
                .map(|p| (g.name(otg.home(p)).to_string(), json!(otg.permitted(p).len())))
                .collect();
            Ok(Report::Fields(
                object(json!({
                    "valid": true,
                    "target": g.name(otg.target()),
                    "permitted_paths": nodes,
                    "neighbour_preferences": is_notg(&otg),
                })),
                EXIT_OK,
            ))
        }
        SppCommand::Dw(input) => {
            let otg = load_otg(&input)?;
            let fields = match find_dispute_wheel(&otg) {
                Some(w) => {
                    check_dw(&otg, &w).map_err(Error::InvalidSdw)?;
                    json!({"dispute_wheel": w.named(otg.game())})
                }
                None => json!({"dispute_wheel": null}),
            };
            Ok(Report::Fields(object(fields), EXIT_OK))
        }
        SppCommand::Sdw(input) => {
            let otg = load_otg(&input)?;
            let fields = match find_sdw(&otg, limits.search_budget)? {
                Some(w) => {
                    check_sdw(&otg, &w).map_err(Error::InvalidSdw)?;
                    json!({"strong_dispute_wheel": w.named(otg.game())})
                }
                None => json!({"strong_dispute_wheel": null}),
            };
            Ok(Report::Fields(object(fields), EXIT_OK))
        }
        SppCommand::Safety { input, mode } => {
            let otg = load_otg(&input)?;
            let v = safety_verdict(&otg, mode, limits)?;
            let code = match v.status.is_safe() {
                Some(true) => EXIT_OK,
                Some(false) => EXIT_FOUND,
                None => EXIT_UNKNOWN,
            };
            let fields = object(serde_json::to_value(&v).expect("verdict serializes"));
            Ok(Report::Fields(fields, code))
        }
    }
}
