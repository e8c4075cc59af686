use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mbgg::gadgets::{
    parse_library, synthesize_gadgets, validate_library, write_library, GadgetLibrary, SynthesisOptions,
    DEFAULT_LIBRARY_TEXT,
};
use mbgg::geography::{
    classify_all, gen_convertible, normalize_start, parse_gg, validate_convertible, write_gg, GgInstance, Player,
    Ruleset, Vertex, VertexClass,
};
use mbgg::hypergraph::{Position, Turn};
use mbgg::mbh::{parse_mbh, parse_pairing, write_game, write_pairing};
use mbgg::reduction::{build_associated_game, uniformize5, AssociatedGame};
use mbgg::solver::{
    solve_gg, solve_position_with, verify_equivalence, Certificate, EquivalenceOptions, SolveLimits, SolveOptions,
    Verdict,
};
use mbgg::strategy::{
    lemma3_pairing, play_out_with_pairing, replay_trace, run_regular, simulate_theorem4, variant_towards,
    verify_lemma5, verify_lemma8, FinishReason,
};
use mbgg::Error;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mbgg",
    version,
    about = "Generalized Geography to Maker-Breaker reductions and solvers"
)]
struct Cli {
    /// Worker threads for the verifiers (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Gadget library file. Falls back to $MBGG_GADGET_LIB, then the shipped library.
    #[arg(long, global = true)]
    library: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Limits {
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    max_seconds: Option<f64>,
}

impl Limits {
    fn get(&self) -> SolveLimits {
        SolveLimits {
            max_nodes: self.max_nodes,
            max_seconds: self.max_seconds,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a GG instance is convertible.
    Validate {
        input: PathBuf,
        #[arg(long)]
        planar: bool,
    },
    /// Rewrite an instance whose start has out-degree 2 into one with out-degree 1.
    Normalize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the gadget class of every vertex.
    Classify { input: PathBuf },
    /// Build the associated Maker-Breaker game.
    Reduce {
        input: PathBuf,
        /// Pad every combination to exactly five squares.
        #[arg(long)]
        uniform5: bool,
        /// Write the joint and interior name map here.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    SolveGg {
        input: PathBuf,
        #[arg(long)]
        revised: bool,
    },
    /// Solve an MBH game, or the associated game of a GG instance.
    SolveMb {
        input: PathBuf,
        #[command(flatten)]
        limits: Limits,
        /// Write the winner's certificate here.
        #[arg(long)]
        certify: Option<PathBuf>,
        /// A pairing (`pair a b` lines) to try as a Breaker cutoff.
        #[arg(long)]
        pairing: Option<PathBuf>,
    },
    /// Solve both games and compare the winners.
    VerifyEquivalence {
        input: PathBuf,
        #[arg(long)]
        uniform5: bool,
        /// Do not use the joint pairing as a search cutoff.
        #[arg(long)]
        no_hint: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Run the gadget validator on the library.
    CheckGadgets,
    /// Search for a gadget library from scratch.
    SynthGadgets {
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Play regular play to its end and compare with the matching Geography play.
    SimulateRegular {
        input: PathBuf,
        /// Successor taken at each two-choice vertex, as `v=w,...`.
        #[arg(long, value_delimiter = ',')]
        choices: Vec<String>,
        /// Write the move trace here instead of printing it.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check Breaker's forced replies or Maker's deviations over every regular line.
    CheckDeviations {
        input: PathBuf,
        #[arg(long, value_parser = ["5", "8"])]
        lemma: String,
        /// Also solve every Breaker deviation outright.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 200_000)]
        max_nodes: u64,
    },
    /// Generate a random convertible instance.
    Gen {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a move trace against regular play and report the outcome.
    Replay { input: PathBuf, trace: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Mismatch(why)) => {
            println!("FAIL\n{why}");
            ExitCode::from(FAIL)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}

fn read(path: &Path) -> mbgg::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&PathBuf>, text: &str) -> mbgg::Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_library(cli: &Cli) -> mbgg::Result<GadgetLibrary> {
    let path = cli
        .library
        .clone()
        .or_else(|| std::env::var_os("MBGG_GADGET_LIB").map(PathBuf::from));
    match path {
        Some(p) => parse_library(&read(&p)?),
        None => parse_library(DEFAULT_LIBRARY_TEXT),
    }
}

fn load_gg(path: &Path) -> mbgg::Result<GgInstance> {
    parse_gg(&read(path)?)
}

fn load_game(cli: &Cli, path: &Path) -> mbgg::Result<AssociatedGame> {
    build_associated_game(&load_gg(path)?, &load_library(cli)?)
}

fn looks_like_gg(src: &str) -> bool {
    src.lines()
        .filter_map(|l| l.split_whitespace().next())
        .find(|t| !t.starts_with('#'))
        .is_some_and(|t| t == "start" || t == "edge")
}

fn run(cli: &Cli) -> mbgg::Result<u8> {
    match &cli.command {
        Command::Validate { input, planar } => {
            let report = validate_convertible(&load_gg(input)?, *planar);
            print!("{report}");
            Ok(if report.is_valid() { PASS } else { FAIL })
        }
        Command::Normalize { input, output } => {
            emit(output.as_ref(), &write_gg(&normalize_start(&load_gg(input)?)?))?;
            Ok(PASS)
        }
        Command::Classify { input } => {
            for (v, class) in classify_all(&load_gg(input)?)? {
                println!("{v} {class}");
            }
            Ok(PASS)
        }
        Command::Reduce {
            input,
            uniform5,
            map,
            output,
        } => {
            let g = load_game(cli, input)?;
            let spec = if *uniform5 {
                uniformize5(&g.spec)?
            } else {
                g.spec.clone()
            };
            emit(output.as_ref(), &write_game(&spec))?;
            if let Some(path) = map {
                emit(Some(path), &g.map.write())?;
            }
            Ok(PASS)
        }
        Command::SolveGg { input, revised } => {
            let rules = if *revised { Ruleset::Revised } else { Ruleset::Original };
            let r = solve_gg(&load_gg(input)?, rules)?;
            println!("PASS\n{r}");
            Ok(PASS)
        }
        Command::SolveMb {
            input,
            limits,
            certify,
            pairing,
        } => solve_mb_cmd(cli, input, limits, certify.as_ref(), pairing.as_ref()),
        Command::VerifyEquivalence {
            input,
            uniform5,
            no_hint,
            limits,
        } => {
            let opts = EquivalenceOptions {
                limits: limits.get(),
                uniform: *uniform5,
                joint_pairing_hint: !no_hint,
            };
            let report = verify_equivalence(&load_gg(input)?, &load_library(cli)?, &opts)?;
            println!("{report}");
            Ok(match report.verdict {
                Verdict::Pass => PASS,
                Verdict::Fail => FAIL,
                Verdict::Inconclusive => USAGE,
            })
        }
        Command::CheckGadgets => {
            let report = validate_library(&load_library(cli)?);
            print!("{report}");
            Ok(if report.passed() { PASS } else { FAIL })
        }
        Command::SynthGadgets { budget, seed, output } => {
            let lib = synthesize_gadgets(SynthesisOptions {
                budget: *budget,
                seed: *seed,
            })?;
            emit(output.as_ref(), &write_library(&lib))?;
            Ok(PASS)
        }
        Command::SimulateRegular { input, choices, trace } => simulate(cli, input, choices, trace.as_ref()),
        Command::CheckDeviations {
            input,
            lemma,
            exhaustive,
            max_nodes,
        } => {
            let g = load_game(cli, input)?;
            let (passed, text) = if lemma == "5" {
                let r = verify_lemma5(&g, exhaustive.then(|| SolveLimits::nodes(*max_nodes)))?;
                (r.passed(), r.to_string())
            } else {
                let r = verify_lemma8(&g)?;
                (r.passed(), r.to_string())
            };
            println!("{text}");
            Ok(if passed { PASS } else { FAIL })
        }
        Command::Gen { vertices, seed, output } => {
            emit(output.as_ref(), &write_gg(&gen_convertible(*vertices, *seed)?))?;
            Ok(PASS)
        }
        Command::Replay { input, trace } => {
            let g = load_game(cli, input)?;
            let out = replay_trace(&g, &read(trace)?)?;
            let winner = out.winner().map_or("undecided", Turn::keyword);
            println!("PASS");
            let deviation = out.first_deviation.map_or("none".to_string(), |n| n.to_string());
            let finish = out.finished.map_or("none".to_string(), |f| f.to_string());
            println!(
                "moves={} first_deviation={deviation} finish={finish} winner={winner}",
                out.moves
            );
            Ok(PASS)
        }
    }
}

fn solve_mb_cmd(
    cli: &Cli,
    input: &Path,
    limits: &Limits,
    certify: Option<&PathBuf>,
    pairing: Option<&PathBuf>,
) -> mbgg::Result<u8> {
    let src = read(input)?;
    let pos = if looks_like_gg(&src) {
        Position::start(&build_associated_game(&parse_gg(&src)?, &load_library(cli)?)?.spec)
    } else {
        parse_mbh(&src)?
    };
    let opts = SolveOptions {
        limits: limits.get(),
        pairing_hint: pairing.map(|p| read(p).and_then(|s| parse_pairing(&s))).transpose()?,
        ..SolveOptions::default()
    };
    let r = solve_position_with(&pos, &opts)?;
    println!("{}\n{r}", if r.is_conclusive() { "PASS" } else { "INCONCLUSIVE" });
    if !r.is_conclusive() {
        return Ok(USAGE);
    }
    if let Some(path) = certify {
        let mut text = format!("winner {}\n", r.winner.expect("conclusive").keyword());
        match &r.certificate {
            Some(Certificate::WinningLine(line)) => {
                let names: Vec<&str> = line.iter().map(|s| s.name()).collect();
                writeln!(text, "line {}", names.join(" ")).unwrap();
            }
            Some(Certificate::Pairing(c)) => text.push_str(&write_pairing(c)),
            None => text.push_str("# no certificate extracted\n"),
        }
        emit(Some(path), &text)?;
    }
    Ok(PASS)
}

fn simulate(cli: &Cli, input: &Path, choices: &[String], trace: Option<&PathBuf>) -> mbgg::Result<u8> {
    let g = load_game(cli, input)?;
    let mut by_vertex: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for c in choices {
        let (v, w) = c
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("choice `{c}` is not of the form v=w")))?;
        by_vertex.insert(Vertex::new(v), Vertex::new(w));
    }
    // First pass only records which vertex chose what, in play order.
    let (mut alice, mut bob) = (Vec::new(), Vec::new());
    run_regular(&g, |st| {
        let v = &st.current().expect("active").vertex;
        let w = by_vertex
            .get(v)
            .ok_or_else(|| Error::Protocol(format!("no choice given for {v}")))?;
        match g.map.class(v) {
            Some(VertexClass::M12) => alice.push(w.clone()),
            _ => bob.push(w.clone()),
        }
        variant_towards(&g, v, w)
    })?;
    let outcome = simulate_theorem4(&g, &alice, &bob)?;
    let st = &outcome.state;
    let finish = st.finished.expect("regular play ran to its end");
    let mut end = st.position.clone();
    if finish == FinishReason::BreakerPairingB21 {
        let c = lemma3_pairing(&g, &end);
        end = play_out_with_pairing(&end, &c, |p| p.legal_moves().into_iter().next().expect("legal move"))?;
    }
    let mb_winner = if end.maker_has_won() {
        Turn::Maker
    } else {
        Turn::Breaker
    };
    if (mb_winner == Turn::Maker) != (outcome.winner == Player::Alice) {
        return Err(Error::Mismatch(format!(
            "play-out ended with {mb_winner}, Geography winner {}",
            outcome.winner
        )));
    }
    let marks: Vec<&str> = outcome.marks.iter().map(Vertex::name).collect();
    println!("PASS");
    println!("winner={} finish={finish} marks={}", outcome.winner, marks.join(","));
    let regular_moves = st.position.maker_set().len() + st.position.breaker_set().len();
    let total = end.maker_set().len() + end.breaker_set().len();
    println!("regular_moves={regular_moves} total_moves={total}");
    match trace {
        Some(path) => emit(Some(path), &st.trace_text())?,
        None => print!("{}", st.trace_text()),
    }
    Ok(PASS)
}
