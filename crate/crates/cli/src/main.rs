use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mubkit::clifford::enumerate_group;
use mubkit::designs::{run_check, DEFAULT_TOL};
use mubkit::gf::{prime_power, Field};
use mubkit::io::{read_state_set, state_set_to_json, write_state_set};
use mubkit::orbits::{orbit_report, seeded_random_state, theorem1_experiment};
use mubkit::states::{canonical_mub, hesse_fiducial, hesse_sic};
use mubkit::{Error, GroupTable64, HwGroup64, PureState64, StateSet64};

const MAX_Q: u64 = 9;

#[derive(Parser, Debug)]
#[command(
    name = "mubkit",
    version,
    about = "Canonical MUBs, the Hesse SIC and restricted Clifford orbits in prime-power dimensions"
)]
struct Cli {
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, env = "MUBKIT_THREADS", default_value_t = 0)]
    threads: usize,
    /// Print timings to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a state set file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run design checks on a state set file.
    Check(CheckArgs),
    /// Orbit of a seed state under the restricted Clifford group.
    Orbit(OrbitArgs),
    /// Enumerate the restricted Clifford group.
    Group(GroupArgs),
    /// Minimal-orbit experiment: MUB and Hesse orbits against Haar-random seeds.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1(TheoremArgs),
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// The canonical MUB in dimension q.
    Mub {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The Hesse SIC in dimension 3.
    Sic {
        #[arg(long, required = true)]
        hesse: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated subset of mub, design2, sic, frame.
    #[arg(long, value_delimiter = ',', default_value = "mub,design2,sic,frame")]
    tests: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long)]
    q: u64,
    /// mub0, hesse, random or file:<path> (first state of the file).
    #[arg(long, default_value = "mub0")]
    seed_state: String,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Also write the orbit as a state set file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[arg(long)]
    q: u64,
    /// List every element.
    #[arg(long)]
    elements: bool,
    /// List every element with its unitary.
    #[arg(long)]
    dump_matrices: bool,
}

#[derive(Args, Debug)]
struct TheoremArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Usage(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn field(q: u64) -> Result<Field, Failure> {
    if q > MAX_Q || prime_power(q).is_none() {
        return Err(Failure::Usage(format!(
            "q must be a prime power ≤ {MAX_Q}, got {q}"
        )));
    }
    Ok(Field::of_order(q)?)
}

fn group(q: u64, verbose: bool) -> Result<GroupTable64, Failure> {
    let f = field(q)?;
    let start = Instant::now();
    let g = enumerate_group(&HwGroup64::new(&f))?;
    if verbose {
        eprintln!(
            "enumerated {} elements for q = {q} in {:.2?}",
            g.len(),
            start.elapsed()
        );
    }
    Ok(g)
}

fn print_json(v: &impl serde::Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("reports serialize")
    );
}

fn emit_set(set: &StateSet64, out: Option<&PathBuf>) -> Outcome {
    match out {
        Some(path) => write_state_set(set, path)?,
        None => println!("{}", state_set_to_json(set)),
    }
    Ok(())
}

fn gen(cmd: &GenCommand) -> Outcome {
    match cmd {
        GenCommand::Mub { q, out } => {
            let f = field(*q)?;
            emit_set(&canonical_mub(&HwGroup64::new(&f))?, out.as_ref())
        }
        GenCommand::Sic { out, .. } => emit_set(&hesse_sic(), out.as_ref()),
    }
}

fn check(args: &CheckArgs) -> Outcome {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let set: StateSet64 = read_state_set(&args.input)?;
    let mut reports = Vec::new();
    for name in &args.tests {
        reports.push(run_check(name.trim(), &set, args.tol)?);
    }
    print_json(&reports);
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn seed_state(
    choice: &str,
    q: u64,
    rng_seed: u64,
    g: &GroupTable64,
) -> Result<(PureState64, Option<u64>), Failure> {
    let d = q as usize;
    match choice {
        "mub0" => Ok((canonical_mub(g.hw())?.states[0].clone(), None)),
        "hesse" if q == 3 => Ok((hesse_fiducial(), None)),
        "hesse" => Err(Failure::Usage("the Hesse fiducial needs q = 3".into())),
        "random" => Ok((seeded_random_state(d, rng_seed), Some(rng_seed))),
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let set: StateSet64 = read_state_set(path)?;
                let s = set
                    .states
                    .into_iter()
                    .next()
                    .ok_or_else(|| Failure::Usage(format!("{path} holds no states")))?;
                if s.dim() != d {
                    return Err(Failure::Usage(format!(
                        "{path} holds states of dimension {}, expected {d}",
                        s.dim()
                    )));
                }
                Ok((s, None))
            }
            None => Err(Failure::Usage(format!(
                "unknown seed state {other:?}; expected mub0, hesse, random or file:<path>"
            ))),
        },
    }
}

fn orbit_cmd(args: &OrbitArgs, verbose: bool) -> Outcome {
    let g = group(args.q, verbose)?;
    let (seed, rng_seed) = seed_state(&args.seed_state, args.q, args.rng_seed, &g)?;
    let (orbit, report) = orbit_report(&args.seed_state, &seed, &g, rng_seed)?;
    if let Some(path) = &args.out {
        write_state_set(
            &orbit.to_state_set(g.dim(), &format!("orbit of {}", args.seed_state)),
            path,
        )?;
    }
    print_json(&report);
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn group_cmd(args: &GroupArgs, verbose: bool) -> Outcome {
    let g = group(args.q, verbose)?;
    let file = g.export(args.dump_matrices);
    let complete = file.order == file.expected_order;
    if args.elements || args.dump_matrices {
        print_json(&file);
    } else {
        print_json(&json!({
            "q": file.q,
            "field": file.field,
            "order": file.order,
            "expected_order": file.expected_order,
            "generators": file.generators,
        }));
    }
    if complete {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn theorem_cmd(args: &TheoremArgs, verbose: bool) -> Outcome {
    let g = group(args.q, verbose)?;
    let start = Instant::now();
    let report = theorem1_experiment(&g, args.samples, args.rng_seed)?;
    if verbose {
        eprintln!("experiment finished in {:.2?}", start.elapsed());
    }
    print_json(&report);
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("warning: {e}");
    }
    let outcome = match &cli.command {
        Command::Gen(cmd) => gen(cmd),
        Command::Check(args) => check(args),
        Command::Orbit(args) => orbit_cmd(args, cli.verbose),
        Command::Group(args) => group_cmd(args, cli.verbose),
        Command::VerifyTheorem1(args) => theorem_cmd(args, cli.verbose),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
