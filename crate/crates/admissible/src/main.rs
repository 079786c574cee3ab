use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use admissible::harness::{run_verification, VerifyParams};
use admissible::structures::{GameRef, RawStructureFile, StructureFile};
use admissible::{
    build_mbar, build_minfty, build_rationalizability_structure, eliminate,
    find_justifying_belief, parse, rationalizable_sets, render, Belief, Depth, DiamondOracle,
    DominanceMode, Dominator, DominatorClass, EliminationTrace, LogicError, ModelChecker,
    NormalFormGame, ProbabilityStructure, StrategyRestriction, SupportMode,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Criterion {
    Weak,
    Strong,
}

impl Criterion {
    fn mode(self) -> DominanceMode {
        match self {
            Criterion::Weak => DominanceMode::Weak,
            Criterion::Strong => DominanceMode::Strong,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    Pure,
    Mixed,
}

impl Class {
    fn class(self) -> DominatorClass {
        match self {
            Class::Pure => DominatorClass::Pure,
            Class::Mixed => DominatorClass::Mixed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Support {
    Full,
    Subset,
}

impl Support {
    fn mode(self) -> SupportMode {
        match self {
            Support::Full => SupportMode::Full,
            Support::Subset => SupportMode::Subset,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    Theorem,
    Family,
    Reject,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessKind {
    Mbar,
    Minfty,
    Rat,
}

/// Exact dominance solving, witness structures and epistemic model checking
/// for finite normal-form games.
#[derive(Parser)]
#[command(name = "admissible", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterated elimination of dominated strategies, round by round
    Eliminate {
        /// Game JSON file
        #[arg(long)]
        game: PathBuf,
        /// Dominance notion applied each round
        #[arg(long, value_enum, default_value_t = Criterion::Weak)]
        criterion: Criterion,
        /// Dominator candidates
        #[arg(long, value_enum, default_value_t = Class::Mixed)]
        class: Class,
        /// Round count, or `fix` to iterate until nothing changes
        #[arg(long, default_value = "fix")]
        rounds: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Strategies surviving iterated strong elimination, with justifying beliefs
    Rationalizable {
        /// Game JSON file
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Search for a belief making a strategy a best response
    Belief {
        /// Game JSON file
        #[arg(long)]
        game: PathBuf,
        /// Player number (1-based)
        #[arg(long)]
        player: usize,
        /// Strategy id
        #[arg(long)]
        strategy: String,
        /// Support discipline for the belief
        #[arg(long, value_enum, default_value_t = Support::Full)]
        support: Support,
        /// Opponent sets to restrict to, as JSON like [["T"],["L","R"]]
        #[arg(long)]
        sets: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Evaluate a formula at a state of a structure
    Check {
        /// Structure JSON file
        #[arg(long)]
        structure: PathBuf,
        /// State id
        #[arg(long)]
        state: String,
        /// Formula text, or @path to read it from a file
        #[arg(long)]
        formula: String,
        /// How diamond queries are answered
        #[arg(long, value_enum, default_value_t = OracleMode::Reject)]
        oracle: OracleMode,
        /// Witness structure file for the family oracle (repeatable)
        #[arg(long)]
        family: Vec<PathBuf>,
    },
    /// Construct a witness structure and emit its JSON
    Witness {
        /// Game JSON file
        #[arg(long)]
        game: PathBuf,
        /// Which construction to run
        #[arg(long, value_enum)]
        kind: WitnessKind,
        /// Grid depth (mbar, minfty)
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Designated player for minfty (1-based)
        #[arg(long)]
        player: Option<usize>,
        /// Designated strategy id for minfty
        #[arg(long)]
        strategy: Option<String>,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the theorem suite over fixed and seeded games
    Verify {
        /// Inclusive seed range lo..hi
        #[arg(long, default_value = "0..199")]
        seeds: String,
        #[arg(long, default_value_t = 2)]
        players: usize,
        #[arg(long, default_value_t = 4)]
        max_strategies: usize,
        #[arg(long, default_value_t = 3)]
        payoff_bound: i64,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[arg(long, default_value_t = 2)]
        convergence_extra: usize,
        #[arg(long, default_value_t = 200_000)]
        size_cap: u128,
        /// Skip the fixed example games
        #[arg(long)]
        no_fixed: bool,
    },
    /// Parse a formula and echo its normalized rendering
    Parse {
        /// Game JSON file (resolves player and strategy names)
        #[arg(long)]
        game: PathBuf,
        /// Formula text, or @path
        formula: String,
    },
}

/// Exit 1 for domain errors, 2 for unreadable or malformed inputs.
enum Failure {
    Domain(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Input(m) => m,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn logic_failure(e: LogicError) -> Failure {
    match e {
        LogicError::Parse { .. } | LogicError::Probability(_) => Failure::Input(e.to_string()),
        other => Failure::Domain(other.to_string()),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> CliResult<NormalFormGame> {
    NormalFormGame::from_json_str(&read_text(path)?).map_err(input)
}

/// Loads a structure file, resolving a path-valued `game` field relative to
/// the structure file's directory.
fn load_structure(path: &Path) -> CliResult<ProbabilityStructure> {
    let raw: RawStructureFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let game = match &raw.game {
        GameRef::Inline(value) => NormalFormGame::from_json_value(value).map_err(input)?,
        GameRef::Path(p) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            load_game(&base.join(p))?
        }
    };
    ProbabilityStructure::from_file(StructureFile { states: raw.states }, game).map_err(input)
}

fn formula_text(arg: &str) -> CliResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(read_text(Path::new(path))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn player_index(game: &NormalFormGame, player: usize) -> CliResult<usize> {
    if player == 0 || player > game.num_players() {
        return Err(Failure::Domain(format!(
            "player {player} out of range 1..={}",
            game.num_players()
        )));
    }
    Ok(player - 1)
}

fn parse_seed_range(text: &str) -> CliResult<(u64, u64)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| Failure::Input(format!("seed range `{text}` is not lo..hi")))?;
    let lo: u64 = lo
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("bad seed `{lo}`")))?;
    let hi: u64 = hi
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("bad seed `{hi}`")))?;
    if hi < lo {
        return Err(Failure::Input(format!("empty seed range `{text}`")));
    }
    Ok((lo, hi))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Domain(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

/// Rows padded to equal column widths, two spaces between columns.
fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if c + 1 < row.len() {
                for _ in cell.len()..widths[c] {
                    line.push(' ');
                }
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn dominator_text(game: &NormalFormGame, player: usize, d: &Dominator) -> String {
    match d {
        Dominator::Pure(idx) => game.strategy_id(player, *idx).to_string(),
        Dominator::Mixed(m) => {
            let map = m.to_id_map(game);
            if map.len() == 1 {
                return map.into_keys().next().expect("nonempty mixed strategy");
            }
            map.iter()
                .map(|(id, w)| format!("{w}*{id}"))
                .collect::<Vec<_>>()
                .join(" + ")
        }
    }
}

fn belief_text(game: &NormalFormGame, belief: &Belief) -> String {
    belief
        .to_id_map(game)
        .iter()
        .map(|(profile, w)| format!("{profile}={w}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn trace_table(game: &NormalFormGame, trace: &EliminationTrace) -> String {
    let mut rows = Vec::new();
    let mut header = vec!["round".to_string()];
    header.extend(game.players().iter().cloned());
    rows.push(header);
    for (k, restriction) in trace.rounds().iter().enumerate() {
        let mut row = vec![format!("X^{k}")];
        for ids in restriction.to_ids(game) {
            row.push(if ids.is_empty() { "-".into() } else { ids.join(" ") });
        }
        rows.push(row);
    }
    let mut out = aligned(&rows);
    let verb = match trace.criterion {
        DominanceMode::Weak => "weakly",
        DominanceMode::Strong => "strongly",
    };
    for (h, round) in trace.removals().iter().enumerate() {
        for removal in round {
            out.push_str(&format!(
                "round {}: {} drops {} ({verb} dominated by {})\n",
                h + 1,
                game.player_name(removal.player),
                game.strategy_id(removal.player, removal.strategy),
                dominator_text(game, removal.player, &removal.certificate.dominator),
            ));
        }
    }
    match trace.converged_at() {
        Some(k) => out.push_str(&format!("converged at round {k}\n")),
        None => out.push_str("not converged\n"),
    }
    out
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Eliminate {
            game,
            criterion,
            class,
            rounds,
            format,
        } => {
            let game = load_game(&game)?;
            let depth = if rounds == "fix" {
                Depth::ToFixpoint
            } else {
                Depth::Rounds(rounds.parse().map_err(|_| {
                    Failure::Input(format!("rounds must be `fix` or a number, got `{rounds}`"))
                })?)
            };
            let trace =
                eliminate(&game, criterion.mode(), class.class(), depth).map_err(domain)?;
            match format {
                Format::Json => print!("{}", pretty(&trace.to_json(&game))),
                Format::Table => print!("{}", trace_table(&game, &trace)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rationalizable { game, format } => {
            let game = load_game(&game)?;
            let sets = rationalizable_sets(&game).map_err(domain)?;
            match format {
                Format::Json => print!("{}", pretty(&sets.to_json(&game))),
                Format::Table => {
                    let mut rows = Vec::new();
                    for (i, ids) in sets.restriction.to_ids(&game).iter().enumerate() {
                        rows.push(vec![game.player_name(i).to_string(), ids.join(" ")]);
                    }
                    let mut out = aligned(&rows);
                    out.push_str(&format!(
                        "converged at round {}\n",
                        sets.trace.converged_at().expect("fixpoint run converges")
                    ));
                    for ((player, strategy), cert) in &sets.beliefs {
                        out.push_str(&format!(
                            "{} {} justified by {}\n",
                            game.player_name(*player),
                            game.strategy_id(*player, *strategy),
                            belief_text(&game, &cert.belief),
                        ));
                    }
                    print!("{out}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Belief {
            game,
            player,
            strategy,
            support,
            sets,
            format,
        } => {
            let game = load_game(&game)?;
            let p = player_index(&game, player)?;
            let s = game.strategy_index(p, &strategy).map_err(domain)?;
            let restriction = match sets {
                Some(text) => {
                    let ids: Vec<Vec<String>> = serde_json::from_str(&text).map_err(input)?;
                    StrategyRestriction::from_ids(&game, &ids).map_err(domain)?
                }
                None => StrategyRestriction::full(&game),
            };
            match find_justifying_belief(&game, p, s, &restriction, support.mode())
                .map_err(domain)?
            {
                Some(cert) => match format {
                    Format::Json => print!("{}", pretty(&cert.to_json(&game))),
                    Format::Table => println!(
                        "{} {} is a best response under {}",
                        game.player_name(p),
                        game.strategy_id(p, s),
                        belief_text(&game, &cert.belief),
                    ),
                },
                None => println!("none"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            structure,
            state,
            formula,
            oracle,
            family,
        } => {
            let m = load_structure(&structure)?;
            let text = formula_text(&formula)?;
            let f = parse(m.game(), &text).map_err(logic_failure)?;
            let oracle = match oracle {
                OracleMode::Reject => DiamondOracle::Reject,
                OracleMode::Theorem => DiamondOracle::theorem(m.game()).map_err(domain)?,
                OracleMode::Family => {
                    if family.is_empty() {
                        return Err(Failure::Domain(
                            "the family oracle needs at least one --family structure".into(),
                        ));
                    }
                    let mut members = Vec::new();
                    for path in &family {
                        members.push(load_structure(path)?);
                    }
                    DiamondOracle::family(members)
                }
            };
            let mut checker = ModelChecker::new(&m, &oracle);
            let value = checker.check(&state, &f).map_err(logic_failure)?;
            println!("{value}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness {
            game,
            kind,
            k,
            player,
            strategy,
            out,
        } => {
            let game = load_game(&game)?;
            let value = match kind {
                WitnessKind::Mbar => {
                    let grid = build_mbar(&game, k).map_err(domain)?;
                    let mut v = grid.structure.to_json();
                    v["levels"] = json!(grid.levels);
                    v["reroutes"] = grid
                        .reroutes
                        .iter()
                        .map(|r| {
                            json!({
                                "state": r.state,
                                "player": r.player + 1,
                                "intended_level": r.intended_level,
                                "used_level": r.used_level,
                                "target": r.target,
                            })
                        })
                        .collect();
                    v
                }
                WitnessKind::Minfty => {
                    let p = player_index(
                        &game,
                        player.ok_or_else(|| Failure::Domain("minfty needs --player".into()))?,
                    )?;
                    let sid = strategy
                        .ok_or_else(|| Failure::Domain("minfty needs --strategy".into()))?;
                    let (m, designated) = build_minfty(&game, p, &sid, k).map_err(domain)?;
                    let mut v = m.to_json();
                    v["designated"] = json!(designated);
                    v
                }
                WitnessKind::Rat => {
                    let sets = rationalizable_sets(&game).map_err(domain)?;
                    let beliefs: BTreeMap<(usize, usize), Belief> = sets
                        .beliefs
                        .iter()
                        .map(|(key, cert)| (*key, cert.belief.clone()))
                        .collect();
                    build_rationalizability_structure(&game, &sets.restriction, &beliefs)
                        .map_err(domain)?
                        .to_json()
                }
            };
            emit(out.as_deref(), &pretty(&value))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            seeds,
            players,
            max_strategies,
            payoff_bound,
            k_max,
            convergence_extra,
            size_cap,
            no_fixed,
        } => {
            let (seed_lo, seed_hi) = parse_seed_range(&seeds)?;
            let params = VerifyParams {
                seed_lo,
                seed_hi,
                players,
                max_strategies,
                payoff_bound,
                k_max,
                convergence_extra,
                size_cap,
                include_fixed: !no_fixed,
            };
            let report = run_verification(&params).map_err(domain)?;
            print!("{}", report.to_json_string());
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Parse { game, formula } => {
            let game = load_game(&game)?;
            let text = formula_text(&formula)?;
            let f = parse(&game, &text).map_err(logic_failure)?;
            println!("{}", render(&f));
            Ok(ExitCode::SUCCESS)
        }
    }
}
