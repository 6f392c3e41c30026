//! Command-line front end. Exit codes: 0 success, 1 a run or verification
//! failed, 2 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::asm::{parse_program_bytes, print_program};
use crate::instances::{generate, SuiteSpec};
use crate::oracle::{CanonOracle, CodeOracle};
use crate::problems::{Canonification, Problem};
use crate::programs;
use crate::reductions::{compose, verify_suite, witness_by_name, Reduction, ReductionError};
use crate::set::SetValue;
use crate::setcode::{decode, encode_canonical, Code};
use crate::vm::{run, trace_to_jsonl, Fuel, Outcome, Program, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "otmlab", version, about = "Ordinal Turing machines and reductions between choice principles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a program and print its canonical form
    Asm {
        /// Program file, or the name of a bundled program
        program: String,
    },
    /// Run a program on a set or a raw code
    Run(RunArgs),
    /// Apply a witness to one instance
    Reduce {
        #[arg(long)]
        witness: String,
        /// Instance as a set literal
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value_t = Policy::Canonical)]
        policy: Policy,
        #[command(flatten)]
        seeds: SeedArgs,
    },
    /// Check a witness on a generated instance suite
    Verify {
        /// A witness name, or several joined by `+` to compose them
        #[arg(long)]
        witness: String,
        #[command(flatten)]
        suite: SuiteArgs,
        #[command(flatten)]
        seeds: SeedArgs,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print an instance suite, one set literal per line
    Gen {
        #[arg(long)]
        problem: Problem,
        #[command(flatten)]
        suite: SuiteArgs,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Program file, or the name of a bundled program
    #[arg(long)]
    program: String,
    /// Input as a set literal, encoded canonically
    #[arg(long, conflicts_with = "code", required_unless_present = "code")]
    input: Option<String>,
    /// Input as a raw code such as [2,5,6]
    #[arg(long)]
    code: Option<String>,
    /// Answer miracle calls with a canonification of this problem
    #[arg(long)]
    oracle: Option<Problem>,
    #[arg(long, value_enum, default_value_t = Policy::Canonical)]
    policy: Policy,
    /// Print the run trace as JSON lines before the result
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = Fuel::default().max_steps_per_segment)]
    max_steps: u64,
    #[arg(long, default_value_t = Fuel::default().max_limit_jumps)]
    max_limits: u32,
    #[arg(long, default_value_t = Fuel::default().window)]
    window: usize,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Number of re-encoding seeds
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    /// Seeds are seed_base+1, ..., seed_base+seeds
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
}

impl SeedArgs {
    fn list(&self) -> Vec<u64> {
        (1..=self.seeds).map(|i| self.seed_base + i).collect()
    }
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 2)]
    max_rank: usize,
    #[arg(long, default_value_t = 4)]
    max_carrier: usize,
    /// Keep only the first N instances
    #[arg(long)]
    limit: Option<usize>,
}

impl SuiteArgs {
    fn spec(&self) -> Result<SuiteSpec, Failure> {
        if self.max_rank > 3 {
            return Err(Failure::usage("--max-rank above 3 is too large to enumerate"));
        }
        Ok(SuiteSpec {
            max_rank: self.max_rank,
            max_carrier: self.max_carrier.min(4),
            limit: self.limit,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Canonical,
    Adversarial,
}

impl Policy {
    fn canon(self, p: Problem) -> Canonification {
        match self {
            Policy::Canonical => Canonification::canonical(p),
            Policy::Adversarial => Canonification::adversarial(p),
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: format!("error: {}", msg.into()),
        }
    }

    fn module(module: &str, msg: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: format!("error[{module}]: {msg}"),
        }
    }

    fn failed(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: msg.into(),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        let code = match e {
            ReductionError::Precondition(..) | ReductionError::ProblemMismatch(..) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: format!("error[reductions]: {e}"),
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let mut text = String::new();
    let result = match cmd {
        Command::Asm { program } => load_program(&program).map(|p| text = print_program(&p)),
        Command::Run(args) => cmd_run(args, &mut text),
        Command::Reduce {
            witness,
            input,
            policy,
            seeds,
        } => cmd_reduce(&witness, &input, policy, &seeds.list(), &mut text),
        Command::Verify {
            witness,
            suite,
            seeds,
            jobs,
        } => cmd_verify(&witness, &suite, &seeds.list(), jobs, &mut text),
        Command::Gen { problem, suite } => suite.spec().map(|spec| {
            for x in generate(problem, &spec) {
                text.push_str(&x.to_literal());
                text.push('\n');
            }
        }),
    };
    // whatever was produced is printed, even on failure
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::usage(format!("cannot write output: {e}")))?;
    result
}

fn load_program(name: &str) -> Result<Program, Failure> {
    let path = Path::new(name);
    if !path.exists() {
        if let Some(p) = programs::bundled(name.trim_end_matches(".otm")) {
            return Ok(p);
        }
    }
    let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {name}: {e}")))?;
    parse_program_bytes(&bytes).map_err(|e| Failure::module("asm", format!("{name}:{e}")))
}

fn parse_set(text: &str) -> Result<SetValue, Failure> {
    text.parse().map_err(|e| Failure::module("setcode", e))
}

fn cmd_run(args: RunArgs, text: &mut String) -> Result<(), Failure> {
    let program = load_program(&args.program)?;
    let input = match (&args.input, &args.code) {
        (Some(lit), _) => encode_canonical(&parse_set(lit)?),
        (None, Some(code)) => code.parse::<Code>().map_err(|e| Failure::module("setcode", e))?,
        (None, None) => return Err(Failure::usage("one of --input or --code is required")),
    };
    let oracle = args.oracle.map(|p| CanonOracle::new(args.policy.canon(p)));
    let opts = RunOptions {
        fuel: Fuel {
            max_steps_per_segment: args.max_steps,
            max_limit_jumps: args.max_limits,
            window: args.window,
        },
        trace: args.trace,
    };
    let result = run(&program, &input, oracle.as_ref().map(|o| o as &dyn CodeOracle), &opts);
    if args.trace {
        text.push_str(&trace_to_jsonl(&result.trace));
    }
    match &result.outcome {
        Outcome::Halted(cfg) => match cfg.output() {
            Some(code) => {
                text.push_str(&format!("{code}\n"));
                match decode(&code) {
                    Ok(x) => text.push_str(&format!("{x}\n")),
                    Err(e) => text.push_str(&format!("(not a set code: {e})\n")),
                }
                Ok(())
            }
            None => Err(Failure::failed(format!(
                "error[otm-vm]: halted at time {} with an infinite output tape",
                cfg.time
            ))),
        },
        other => Err(Failure::failed(format!(
            "error[otm-vm]: {} after {} steps and {} limit stages",
            other.name(),
            result.steps,
            result.limit_jumps
        ))),
    }
}

fn resolve(witness: &str) -> Result<Reduction, Failure> {
    let mut parts = witness.split('+');
    let first = parts.next().unwrap_or_default();
    let mut acc = witness_by_name(first).ok_or_else(|| Failure::usage(format!("unknown witness '{first}'")))?;
    for name in parts {
        let next = witness_by_name(name).ok_or_else(|| Failure::usage(format!("unknown witness '{name}'")))?;
        acc = match (acc, next) {
            (Reduction::Gw(a), Reduction::Gw(b)) => Reduction::Gw(compose(&a, &b)?),
            _ => return Err(Failure::usage("only generalized Weihrauch witnesses can be composed")),
        };
    }
    Ok(acc)
}

fn cmd_reduce(witness: &str, input: &str, policy: Policy, seeds: &[u64], text: &mut String) -> Result<(), Failure> {
    let r = resolve(witness)?;
    let x = parse_set(input)?;
    let (z, _) = r.solve(policy.canon(r.target()), &x, seeds)?;
    text.push_str(&format!("{z}\n"));
    if !r.source().check(&x, &z) {
        return Err(Failure::failed(format!(
            "error[reductions]: {z} does not solve {} on {x}",
            r.source()
        )));
    }
    Ok(())
}

fn cmd_verify(witness: &str, suite: &SuiteArgs, seeds: &[u64], jobs: Option<usize>, text: &mut String) -> Result<(), Failure> {
    let r = resolve(witness)?;
    let instances = generate(r.source(), &suite.spec()?);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::usage(format!("cannot start workers: {e}")))?;
    let report = pool.install(|| verify_suite(&r, &instances, seeds));
    text.push_str(&report.to_jsonl());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::failed(format!(
            "{} of {} instances failed",
            report.failures(),
            report.entries.len()
        )))
    }
}
