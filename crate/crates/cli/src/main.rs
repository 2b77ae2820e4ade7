//! `menger`: scripting access to the word calculus, the Hanoi game and the session server.

mod output;

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use menger_core::fixtures::{ell_at, he1_prefix, l_prefix};
use menger_core::generator::{random_element, GeneratorParams};
use menger_core::graph::{self, base_vertex, enumerate_level, is_loop, neighbors, trace};
use menger_core::hanoi::{self, HanoiState};
use menger_core::metric::{norm_bounds_at, rho, weigh_word, RhoStatus};
use menger_core::projection::{decompose, project_chain};
use menger_core::sequences::{stabilize_prefix, star, validate, CoherentSequence, Membership};
use menger_core::{Error, Vertex, Word};
use serde_json::json;

use output::{exact, Out};

/// Levels above this are never materialized as explicit graphs.
const GRAPH_CAP: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "menger", version, about = "Word calculus for the fundamental group of the Menger curve")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Largest level or depth any command will accept.
    #[arg(long, global = true, env = "MENGER_DEPTH_CAP", default_value_t = 24)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Vertex and edge counts of X_n, or its adjacency with --json.
    Graph {
        #[arg(long)]
        level: usize,
    },
    /// The four neighbors of a vertex (the base vertex of --level if none is given).
    Neighbors {
        #[arg(value_parser = vertex_arg)]
        vertex: Option<Vertex>,
        #[arg(long, required_unless_present = "vertex")]
        level: Option<usize>,
    },
    /// Follows a word from a vertex and reports where it ends.
    Trace {
        #[arg(long)]
        level: usize,
        #[arg(long, value_parser = vertex_arg)]
        from: Option<Vertex>,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Whether a word is an edge-loop at the base vertex.
    Isloop {
        #[arg(long)]
        level: usize,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Projects a word down from one level to another.
    Project {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Reduce after every step.
        #[arg(long)]
        reduce: bool,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// The block table of one projection step for a word at --level.
    Decompose {
        #[arg(long)]
        level: usize,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Free reduction.
    Reduce {
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Product of two sequence files.
    Star {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weights and length of a word at --level.
    Length {
        #[arg(long)]
        level: usize,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// Bounds on the norm of a sequence, read at --depth (default: the stored depth).
    Norm {
        #[arg(long)]
        depth: Option<usize>,
        sequence: PathBuf,
    },
    /// Distance between two sequence files.
    Rho {
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        a: PathBuf,
        b: PathBuf,
    },
    /// A random element, reproducible from its seed.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the generator's replay record here.
        #[arg(long)]
        replay_out: Option<PathBuf>,
        #[arg(long)]
        max_w_len: Option<usize>,
        #[arg(long)]
        deadline_mean_extra: Option<f64>,
    },
    /// Named words and sequences.
    Fixture {
        #[command(subcommand)]
        which: Fixture,
    },
    /// The Towers of Hanoi variant.
    Hanoi {
        #[command(subcommand)]
        action: HanoiAction,
    },
    /// Runs the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Directory for per-session JSON snapshots.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// X_n in Graphviz format.
    ExportDot {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Fixture {
    /// The loop ell(k) at level n.
    Ell {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// The sequence L_i: empty below level i, then ell(1), ell(2), ...
    #[command(name = "L")]
    L {
        #[arg(long)]
        i: usize,
        #[command(flatten)]
        target: SequenceTarget,
    },
    /// The commutator sequence, stabilized.
    He1 {
        #[command(flatten)]
        target: SequenceTarget,
    },
    /// The identity.
    Empty {
        #[command(flatten)]
        target: SequenceTarget,
    },
}

#[derive(Args, Debug)]
struct SequenceTarget {
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum HanoiAction {
    /// The classical shortest solution for the given number of disks.
    Solution {
        #[arg(long)]
        disks: usize,
    },
    /// The game state of a vertex.
    State {
        #[arg(value_parser = vertex_arg)]
        vertex: Vertex,
    },
    /// The vertex of a game state given as JSON.
    Vertex { state: String },
    /// The stage of a peg list such as 0,2,1.
    Stage {
        #[arg(long, value_delimiter = ',', required = true)]
        pegs: Vec<u8>,
    },
    /// Plays a word from the starting state.
    Play {
        #[arg(long)]
        disks: usize,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
    /// The four legal moves from a state given as JSON.
    Moves { state: String },
    /// Which disk advances the solution from the board where a play ends.
    Leading {
        #[arg(long)]
        disks: usize,
        #[arg(long, value_enum, default_value_t = Board::Current)]
        board: Board,
        #[arg(value_parser = word_arg)]
        word: Word,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Board {
    /// The board the next forward move passes through.
    Current,
    /// The board the previous move passed through.
    Previous,
}

fn word_arg(s: &str) -> Result<Word, String> {
    menger_core::parse_word(s).map_err(|e| e.to_string())
}

fn vertex_arg(s: &str) -> Result<Vertex, String> {
    s.parse::<Vertex>().map_err(|e| e.to_string())
}

/// Why a command failed: bad input (exit 2) or a domain error (exit 1).
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::MalformedToken { .. } | Error::MisplacedSlash { .. } | Error::EmptyPartial => "MALFORMED_WORD",
        Error::PartialNotAllowed { .. } => "PARTIAL_NOT_ALLOWED",
        Error::OddLength { .. } => "ODD_LENGTH",
        Error::MalformedStage(_) | Error::MalformedVertex(_) | Error::InvalidVertex { .. } => "INVALID_VERTEX",
        Error::NotAdjacent { .. } => "NOT_ADJACENT",
        Error::AmbiguousLevelZero => "AMBIGUOUS_LEVEL_ZERO",
        Error::LevelCap { .. } => "LEVEL_CAP",
        Error::LevelMismatch { .. } => "LEVEL_MISMATCH",
        Error::NotAllowable => "NOT_ALLOWABLE",
        Error::StageZero => "STAGE_ZERO",
        Error::InvalidState(_) => "INVALID_STATE",
        Error::NotALoop { .. } => "NOT_A_LOOP",
        Error::NotCoherent { .. } => "NOT_COHERENT",
        Error::OutOfRange(_) => "OUT_OF_RANGE",
        Error::ConstraintViolation(_) => "CONSTRAINT_VIOLATION",
        Error::Sequence(_) => "SEQUENCE",
        Error::Json(_) => "JSON",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.json;
    let stdout = io::stdout();
    let mut out = Out::new(stdout.lock(), json);
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            if json {
                eprintln!("{}", json!({ "code": error_code(&e), "error": e.to_string() }));
            } else {
                eprintln!("error [{}]: {e}", error_code(&e));
            }
            ExitCode::from(1)
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<(), Failure> {
    if n > cap {
        return Err(Error::LevelCap { level: n, cap }.into());
    }
    Ok(())
}

fn read_sequence(path: &Path) -> Result<CoherentSequence, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let seq = CoherentSequence::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let report = validate(&seq, Membership::Paths);
    if let Some(n) = report.first_incoherent {
        return Err(Error::NotCoherent {
            level: n,
            expected: seq.word(n).to_string(),
            got: menger_core::projection::project(seq.word(n + 1), n).to_string(),
        }
        .into());
    }
    if !report.ok() {
        return Err(Error::Sequence(format!(
            "{}: certificates fail at levels {:?}",
            path.display(),
            [report.bad_certificates, report.impermanent].concat()
        ))
        .into());
    }
    Ok(seq)
}

fn write_text(path: Option<&Path>, text: &str, out: &mut Out<impl Write>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => out.raw(text),
    }
}

fn write_sequence(seq: &CoherentSequence, path: Option<&Path>, out: &mut Out<impl Write>) -> Result<(), Failure> {
    let mut text = seq.to_json();
    text.push('\n');
    write_text(path, &text, out)
}

fn parse_state(text: &str) -> Result<HanoiState, Failure> {
    serde_json::from_str(text).map_err(|e| usage(format!("state JSON: {e}")))
}

fn run(cli: Cli, out: &mut Out<impl Write>) -> Result<(), Failure> {
    let cap = cli.cap;
    match cli.command {
        Command::Graph { level } => {
            check_cap(level, cap.min(GRAPH_CAP))?;
            let g = enumerate_level(level, GRAPH_CAP)?;
            if out.json {
                out.json_value(&g.to_json())
            } else {
                let s = g.summary();
                out.line(format!("level {}: {} vertices, {} edges", s.level, s.vertices, s.edges))
            }
        }
        Command::ExportDot { level, out: path } => {
            check_cap(level, cap.min(GRAPH_CAP))?;
            let g = enumerate_level(level, GRAPH_CAP)?;
            write_text(path.as_deref(), &g.to_dot(), out)
        }
        Command::Neighbors { vertex, level } => {
            let v = match (vertex, level) {
                (Some(v), Some(n)) if v.level() != n => {
                    return Err(Error::LevelMismatch { expected: n, got: v.level() }.into())
                }
                (Some(v), _) => v,
                (None, Some(n)) => {
                    check_cap(n, cap)?;
                    base_vertex(n)
                }
                (None, None) => return Err(usage("give a vertex or --level")),
            };
            let ns = neighbors(&v);
            if out.json {
                let list: Vec<_> = ns
                    .iter()
                    .map(|(a, s)| json!({ "letter": a.to_string(), "vertex": s.to_string() }))
                    .collect();
                out.json_value(&json!({ "vertex": v.to_string(), "neighbors": list }))
            } else {
                for (a, s) in ns {
                    out.line(format!("{a}  {s}"))?;
                }
                Ok(())
            }
        }
        Command::Trace { level, from, word } => {
            check_cap(level, cap)?;
            let start = match from {
                Some(v) if v.level() != level => {
                    return Err(Error::LevelMismatch { expected: level, got: v.level() }.into())
                }
                Some(v) => v,
                None => base_vertex(level),
            };
            let end = trace(&start, &word);
            if out.json {
                out.json_value(&json!({
                    "level": level,
                    "from": start.to_string(),
                    "word": word.to_string(),
                    "end": end.vertex.to_string(),
                    "pending": end.pending.map(|a| a.to_string()),
                }))
            } else {
                out.line(end.to_string())
            }
        }
        Command::Isloop { level, word } => {
            check_cap(level, cap)?;
            let r = is_loop(&word, level)?;
            if out.json {
                out.json_value(&json!({ "level": level, "word": word.to_string(), "is_loop": r }))
            } else {
                out.line(r.to_string())
            }
        }
        Command::Project { from, to, reduce, word } => {
            check_cap(from, cap)?;
            let p = project_chain(&word, from, to, reduce)?;
            if out.json {
                out.json_value(&json!({
                    "from": from,
                    "to": to,
                    "input": word.to_string(),
                    "word": p.to_string(),
                }))
            } else {
                out.line(p.to_string())
            }
        }
        Command::Decompose { level, csv, word } => {
            check_cap(level, cap)?;
            if level == 0 {
                return Err(Error::OutOfRange("decompose needs a word at level 1 or more".into()).into());
            }
            let d = decompose(&word, level - 1)?;
            if out.json {
                out.json_value(&serde_json::to_value(&d).map_err(Error::from)?)
            } else if csv {
                out.raw(&d.to_csv())
            } else {
                out.raw(&output::table(&d))
            }
        }
        Command::Reduce { word } => {
            let r = word.reduce();
            if out.json {
                out.json_value(&json!({ "word": word.to_string(), "reduced": r.to_string() }))
            } else {
                out.line(r.to_string())
            }
        }
        Command::Star { a, b, out: path } => {
            let s = star(&read_sequence(&a)?, &read_sequence(&b)?)?;
            write_sequence(&s, path.as_deref(), out)
        }
        Command::Length { level, word } => {
            check_cap(level, cap)?;
            let ww = weigh_word(&word, level)?;
            if out.json {
                out.json_value(&json!({
                    "level": level,
                    "word": word.to_string(),
                    "weights": ww.weights.iter().map(|w| w.to_fraction()).collect::<Vec<_>>(),
                    "length": exact(&ww.length()),
                }))
            } else {
                out.line(ww.display())?;
                out.line(format!("length {}", output::both(&ww.length())))
            }
        }
        Command::Norm { depth, sequence } => {
            let seq = read_sequence(&sequence)?;
            let level = depth.unwrap_or(seq.depth());
            let b = norm_bounds_at(&seq, level)?;
            if out.json {
                out.json_value(&json!({
                    "level": b.level,
                    "lo": exact(&b.interval.lo),
                    "hi": exact(&b.interval.hi),
                    "length": exact(&b.length),
                    "width": exact(&b.interval.width()),
                }))
            } else {
                out.line(format!(
                    "norm in [{}, {}] at level {}",
                    output::both(&b.interval.lo),
                    output::both(&b.interval.hi),
                    b.level
                ))
            }
        }
        Command::Rho { tol, a, b } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(usage("--tol must be positive"));
            }
            let r = rho(&read_sequence(&a)?, &read_sequence(&b)?, tol)?;
            let status = match r.status {
                RhoStatus::ExactZero => "exact_zero",
                RhoStatus::Converged => "converged",
                RhoStatus::Indeterminate => "indeterminate",
            };
            if out.json {
                out.json_value(&json!({
                    "status": status,
                    "level": r.level,
                    "lo": r.interval.as_ref().map(|i| exact(&i.lo)),
                    "hi": r.interval.as_ref().map(|i| exact(&i.hi)),
                    "width": r.interval.as_ref().map(|i| exact(&i.width())),
                    "estimate": r.estimate(),
                }))
            } else {
                match &r.interval {
                    Some(i) => out.line(format!(
                        "{status}: rho in [{}, {}] at level {}",
                        output::both(&i.lo),
                        output::both(&i.hi),
                        r.level
                    )),
                    None => out.line(format!("{status}: no level is stable enough to bound rho")),
                }
            }
        }
        Command::Generate {
            seed,
            depth,
            out: path,
            replay_out,
            max_w_len,
            deadline_mean_extra,
        } => {
            check_cap(depth, cap)?;
            let mut params = GeneratorParams {
                depth,
                ..GeneratorParams::default()
            };
            if let Some(m) = max_w_len {
                params.max_w_len = m;
            }
            if let Some(m) = deadline_mean_extra {
                if m.is_nan() || m < 0.0 {
                    return Err(usage("--deadline-mean-extra must be non-negative"));
                }
                params.deadline_mean_extra = m;
            }
            let g = random_element(seed, &params)?;
            if let Some(p) = replay_out {
                let text = serde_json::to_string_pretty(&g.choice).map_err(Error::from)? + "\n";
                fs::write(&p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            }
            write_sequence(&g.sequence, path.as_deref(), out)
        }
        Command::Fixture { which } => match which {
            Fixture::Ell { k, n } => {
                check_cap(n, cap)?;
                let w = ell_at(k, n)?;
                if out.json {
                    out.json_value(&json!({ "k": k, "level": n, "word": w.to_string() }))
                } else {
                    out.line(w.to_string())
                }
            }
            Fixture::L { i, target } => {
                check_cap(target.depth, cap)?;
                let s = CoherentSequence::certified(l_prefix(i, target.depth)?, format!("L{i}"));
                write_sequence(&s, target.out.as_deref(), out)
            }
            Fixture::He1 { target } => {
                check_cap(target.depth, cap)?;
                let s = stabilize_prefix(&he1_prefix(target.depth)?, "he1");
                write_sequence(&s, target.out.as_deref(), out)
            }
            Fixture::Empty { target } => {
                check_cap(target.depth, cap)?;
                write_sequence(&CoherentSequence::empty(target.depth), target.out.as_deref(), out)
            }
        },
        Command::Hanoi { action } => run_hanoi(action, cap, out),
        Command::Serve { addr, snapshots } => {
            let store = match snapshots {
                Some(dir) => menger_service::Store::with_snapshots(dir).map_err(|e| usage(e.to_string()))?,
                None => menger_service::Store::in_memory(),
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| usage(e.to_string()))?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .map_err(|e| usage(format!("{addr}: {e}")))?;
                let local = listener.local_addr().map_err(|e| usage(e.to_string()))?;
                out.line(format!("listening on http://{local}"))?;
                menger_service::serve_on(listener, Arc::new(store))
                    .await
                    .map_err(|e| usage(e.to_string()))
            })
        }
    }
}

fn disks_level(disks: usize, cap: usize) -> Result<usize, Failure> {
    if disks == 0 {
        return Err(Error::OutOfRange("the game needs at least one disk".into()).into());
    }
    check_cap(disks - 1, cap)?;
    Ok(disks - 1)
}

fn run_hanoi(action: HanoiAction, cap: usize, out: &mut Out<impl Write>) -> Result<(), Failure> {
    match action {
        HanoiAction::Solution { disks } => {
            let n = disks_level(disks, cap.min(20))?;
            let sol = hanoi::shortest_solution(n);
            if out.json {
                out.json_value(&serde_json::to_value(&sol).map_err(Error::from)?)
            } else {
                for (i, t) in sol.iter().enumerate() {
                    out.line(format!("{:>4}  disk {} {} -> {}", i + 1, t.disk, t.from, t.to))?;
                }
                Ok(())
            }
        }
        HanoiAction::State { vertex } => {
            let s = hanoi::vertex_to_state(&vertex);
            if out.json {
                out.json_value(&serde_json::to_value(&s).map_err(Error::from)?)
            } else {
                out.line(s.to_string())
            }
        }
        HanoiAction::Vertex { state } => {
            let v = hanoi::state_to_vertex(&parse_state(&state)?)?;
            if out.json {
                out.json_value(&json!({ "vertex": v.to_string() }))
            } else {
                out.line(v.to_string())
            }
        }
        HanoiAction::Stage { pegs } => {
            let t = hanoi::stage_of_positions(&pegs).ok_or(Error::NotAllowable)?;
            if out.json {
                out.json_value(&json!({ "stage": t.bits(), "pegs": pegs }))
            } else {
                out.line(t.to_string())
            }
        }
        HanoiAction::Play { disks, word } => {
            let n = disks_level(disks, cap)?;
            let start = hanoi::vertex_to_state(&base_vertex(n));
            let s = hanoi::play(&start, &word)?;
            if out.json {
                out.json_value(&serde_json::to_value(&s).map_err(Error::from)?)
            } else {
                out.line(s.to_string())
            }
        }
        HanoiAction::Moves { state } => {
            let moves = hanoi::legal_moves(&parse_state(&state)?)?;
            if out.json {
                out.json_value(&serde_json::to_value(&moves).map_err(Error::from)?)
            } else {
                for m in moves {
                    out.line(format!(
                        "{}  set down disk {} showing {}, pick up disk {}  -> {}",
                        m.letter,
                        m.placed,
                        m.placed_face.as_char(),
                        m.picked,
                        m.state
                    ))?;
                }
                Ok(())
            }
        }
        HanoiAction::Leading { disks, board, word } => {
            let n = disks_level(disks, cap)?;
            let end = graph::trace(&base_vertex(n), &word).vertex;
            let t = match board {
                Board::Current => end.stage().clone(),
                Board::Previous => end.stage().step(-1),
            };
            let d = hanoi::leading_disk(&t);
            if out.json {
                out.json_value(&json!({ "board": t.bits(), "leading_disk": d }))
            } else {
                match d {
                    Some(d) => out.line(format!("disk {d}")),
                    None => out.line("none (the solution is complete)"),
                }
            }
        }
    }
}
