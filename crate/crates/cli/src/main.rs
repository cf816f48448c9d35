use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unistrat::arena::{Arena, Player, Strategy};
use unistrat::config::{Caps, Config};
use unistrat::encoders::{self, Encoded};
use unistrat::error::Error;
use unistrat::formula::Formula;
use unistrat::ltlgame::dpa::{all_letters, determinize};
use unistrat::ltlgame::nba::ltl_to_nba;
use unistrat::marker::eliminate_r;
use unistrat::powerset::build_power_arena;
use unistrat::synthesizer::{check_uniform, synthesize_fully_uniform, FusInstance, Mode, Verdict};
use unistrat::transducer::Transducer;

#[derive(Parser)]
#[command(name = "unistrat", version, about = "Synthesis and checking of uniform strategies")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a fully-uniform strategy exists.
    Solve(SolveArgs),
    /// Check a finite-memory strategy for strict or full uniformity.
    Check(CheckArgs),
    /// Translate a framework instance into arena, transducer and formula files.
    Encode(EncodeArgs),
    /// Print an intermediate structure.
    Dump(DumpArgs),
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula text; takes precedence over --formula-file.
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Args)]
struct CapArgs {
    #[arg(long, default_value_t = 1_000_000)]
    max_power_positions: usize,
    #[arg(long, default_value_t = 1 << 20)]
    max_nba_states: usize,
    #[arg(long, default_value_t = 1 << 20)]
    max_dpa_states: usize,
    #[arg(long, default_value_t = 10_000_000)]
    max_product: usize,
    /// Worker threads for marking.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ProblemArgs {
    arena: PathBuf,
    fst: PathBuf,
    #[command(flatten)]
    formula: FormulaArgs,
    #[arg(long, default_value = "1")]
    player: String,
    /// Use the transducer as given instead of restricting it to pairs of plays.
    #[arg(long)]
    no_restrict: bool,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Where to write the strategy when one exists.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Ask for a strictly-uniform strategy (not supported).
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Full,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    strategy: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Framework {
    Impinfo,
    ImpinfoShifted,
    Opacity,
    Noninterference,
    Diag,
    Prognosis,
    Dlgame,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(value_enum)]
    framework: Framework,
    input: PathBuf,
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpKind {
    Powerset,
    Automaton,
    Marking,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(value_enum)]
    kind: DumpKind,
    /// Arena and transducer files (not needed for `automaton`).
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    formula: FormulaArgs,
    #[command(flatten)]
    caps: CapArgs,
}

/// An error with the file it came from.
struct Failure(String);

impl Failure {
    fn at(path: &Path, e: Error) -> Failure {
        Failure(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = std::result::Result<ExitCode, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

impl CapArgs {
    fn config(&self) -> Config {
        Config {
            caps: Caps {
                max_power_positions: self.max_power_positions,
                max_nba_states: self.max_nba_states,
                max_dpa_states: self.max_dpa_states,
                max_product: self.max_product,
            },
            jobs: self.jobs.max(1),
        }
    }
}

impl FormulaArgs {
    fn load(&self) -> std::result::Result<Formula, Failure> {
        match (&self.formula, &self.formula_file) {
            (Some(text), file) => {
                if file.is_some() {
                    eprintln!("warning: both --formula and --formula-file given; using --formula");
                }
                Ok(Formula::parse(text).map_err(|e| Failure(format!("--formula: {e}")))?)
            }
            (None, Some(path)) => Formula::parse(read(path)?.trim()).map_err(|e| Failure::at(path, e)),
            (None, None) => Err(Failure("a formula is required (--formula or --formula-file)".into())),
        }
    }
}

fn load_arena_fst(arena: &Path, fst: &Path) -> std::result::Result<(Arena, Transducer), Failure> {
    let g = Arena::parse(&read(arena)?).map_err(|e| Failure::at(arena, e))?;
    let t = Transducer::parse(&read(fst)?, &g).map_err(|e| Failure::at(fst, e))?;
    Ok((g, t))
}

impl ProblemArgs {
    fn instance(&self) -> std::result::Result<FusInstance, Failure> {
        let (g, t) = load_arena_fst(&self.arena, &self.fst)?;
        let phi = self.formula.load()?;
        let player = Player::from_number(&self.player)
            .ok_or_else(|| Failure(format!("--player must be 1 or 2, got `{}`", self.player)))?;
        let inst = if self.no_restrict {
            FusInstance::new_prerestricted(g, t, phi, player)
        } else {
            FusInstance::new(g, &t, phi, player)
        };
        inst.map_err(Failure::from)
    }
}

fn solve(args: &SolveArgs) -> Outcome {
    if args.strict {
        return Err(Error::StrictSynthesisUnsupported.into());
    }
    let inst = args.problem.instance()?;
    let res = synthesize_fully_uniform(&inst, &args.problem.caps.config())?;
    match args.format {
        Format::Text => print!("{res}"),
        Format::Kv => print!("{}", res.to_kv()),
    }
    match res.verdict {
        Verdict::Exists => {
            if let (Some(out), Some(s)) = (&args.out, &res.strategy) {
                write(out, &s.to_text(&inst.arena))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Verdict::NotExists => Ok(ExitCode::from(1)),
    }
}

fn check(args: &CheckArgs) -> Outcome {
    let inst = args.problem.instance()?;
    let sigma = Strategy::parse(&read(&args.strategy)?, &inst.arena).map_err(|e| Failure::at(&args.strategy, e))?;
    let mode = match args.mode {
        ModeArg::Strict => Mode::Strict,
        ModeArg::Full => Mode::Full,
    };
    let res = check_uniform(&inst, &sigma, mode, &args.problem.caps.config())?;
    if res.passed {
        println!("pass");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("fail");
        if let Some(c) = &res.counterexample {
            print!("{}", c.to_text(&inst.arena));
        }
        Ok(ExitCode::from(1))
    }
}

fn write_encoded(prefix: &Path, e: &Encoded) -> std::result::Result<(), Failure> {
    let with_ext = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    let inst = &e.instance;
    write(&with_ext(".arena"), &inst.arena.to_string())?;
    write(
        &with_ext(".fst"),
        &inst.transducer.with_plain_state_names().to_text(&inst.arena, &inst.arena),
    )?;
    write(&with_ext(".ltl"), &format!("{}\n", inst.phi))?;
    if let Some(s) = &e.strategy {
        write(&with_ext(".strategy"), &s.to_text(&inst.arena))?;
    }
    let mode = match e.mode {
        Mode::Strict => "strict",
        Mode::Full => "full",
    };
    println!(
        "{}: player={} mode={mode} positions={}",
        prefix.display(),
        inst.protagonist,
        inst.arena.len()
    );
    Ok(())
}

fn encode(args: &EncodeArgs) -> Outcome {
    let text = read(&args.input)?;
    let at = |e: Error| Failure::at(&args.input, e);
    let prefix = &args.out_prefix;
    match args.framework {
        Framework::Impinfo => {
            let raw = encoders::ImpInfo::parse(&text).map_err(at)?;
            write_encoded(prefix, &encoders::encode_imperfect_info(&raw).map_err(at)?)?;
        }
        Framework::ImpinfoShifted => {
            let raw = encoders::ImpInfo::parse(&text).map_err(at)?;
            write_encoded(prefix, &encoders::encode_imperfect_info_shifted(&raw).map_err(at)?)?;
        }
        Framework::Opacity => {
            let raw = encoders::ImpInfo::parse(&text).map_err(at)?;
            let (a, b) = encoders::encode_opacity(&raw).map_err(at)?;
            let mut pa = prefix.as_os_str().to_owned();
            pa.push(".a");
            let mut pb = prefix.as_os_str().to_owned();
            pb.push(".b");
            write_encoded(Path::new(&pa), &a)?;
            write_encoded(Path::new(&pb), &b)?;
        }
        Framework::Noninterference => {
            let sys = encoders::NiSys::parse(&text).map_err(at)?;
            write_encoded(prefix, &encoders::encode_noninterference(&sys).map_err(at)?)?;
        }
        Framework::Diag => {
            let des = encoders::Des::parse(&text).map_err(at)?;
            write_encoded(prefix, &encoders::encode_diagnosability(&des).map_err(at)?)?;
        }
        Framework::Prognosis => {
            let des = encoders::Des::parse(&text).map_err(at)?;
            write_encoded(prefix, &encoders::encode_prognosability(&des).map_err(at)?)?;
        }
        Framework::Dlgame => {
            let input = encoders::DlInput::parse(&text).map_err(at)?;
            write_encoded(prefix, &encoders::encode_dependence_game(&input).map_err(at)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dump(args: &DumpArgs) -> Outcome {
    let config = args.caps.config();
    let two_inputs = || match args.inputs.as_slice() {
        [a, t] => load_arena_fst(a, t),
        _ => Err(Failure("expected an arena file and a transducer file".into())),
    };
    match args.kind {
        DumpKind::Powerset => {
            let (g, t) = two_inputs()?;
            let t = t.restrict_to_plays(&g);
            let p = build_power_arena(&g, &t, config.caps.max_power_positions)?;
            println!("powerset positions={}", p.len());
            for x in p.arena.positions() {
                let info: Vec<&str> = p.info_set(x).iter().map(|&v| g.id(v)).collect();
                println!("{} down={} I={{{}}}", p.arena.id(x), g.id(p.down[x]), info.join(","));
            }
        }
        DumpKind::Automaton => {
            let phi = args.formula.load()?;
            let nba = ltl_to_nba(&phi, config.caps.max_nba_states)?;
            print!("{}", nba.to_text());
            let dpa = determinize(&nba, &all_letters(nba.atoms.len()), config.caps.max_dpa_states)?;
            print!("{}", dpa.to_text());
        }
        DumpKind::Marking => {
            let (g, t) = two_inputs()?;
            let t = t.restrict_to_plays(&g);
            let phi = args.formula.load()?;
            let e = eliminate_r(&g, &t, &phi, &config)?;
            print!("{}", e.report.to_text(&e.power.arena));
            println!("formula: {}", e.formula);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Solve(a) => solve(a),
        Cmd::Check(a) => check(a),
        Cmd::Encode(a) => encode(a),
        Cmd::Dump(a) => dump(a),
    };
    match res {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
