//! The `hytn` command line.
//!
//! Exit codes: 0 consistent or verified, 1 inconsistent or no witness,
//! 2 usage, I/O or structural error.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, write_csv, BenchConfig};
use crate::gen::{generate, Family, GenSpec};
use crate::io::{
    parse_certificate, parse_hytn, parse_mpg, parse_schedule, serialize_certificate, serialize_hytn,
    serialize_mpg, serialize_schedule, write_hytn,
};
use crate::model::{reverse_network, verify_negative_cycle, verify_schedule, Hytn, Weight};
use crate::mpg::QueuePolicy;
use crate::solver::{hytn_to_mpg, mpg_to_hytn, Solver, SolverError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hytn", version, about = "Consistency checking for hyper temporal networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide consistency: prints CONSISTENT or INCONSISTENT.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "lifo-stop")]
        policy: QueuePolicy,
        /// Print the lift count to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Print a feasible schedule, or a negative cycle if there is none.
    Schedule {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Pm)]
        method: Method,
        #[arg(long, default_value = "lifo")]
        policy: QueuePolicy,
    },
    /// Print a negative cycle proving inconsistency.
    Certify {
        file: PathBuf,
        #[arg(long, default_value = "lifo")]
        policy: QueuePolicy,
        /// Keep only the part of the cycle reachable from one timepoint.
        #[arg(long)]
        minimize: bool,
    },
    /// Check a schedule or a negative cycle against a network.
    Verify {
        file: PathBuf,
        #[arg(long, conflicts_with = "cycle", required_unless_present = "cycle")]
        schedule: Option<PathBuf>,
        #[arg(long)]
        cycle: Option<PathBuf>,
    },
    /// Transform an instance and write it to stdout.
    Convert {
        file: PathBuf,
        #[command(flatten)]
        target: ConvertTarget,
    },
    /// Write a generated instance.
    Generate {
        #[arg(value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        params: GenParams,
        /// Stream of the seeded generator.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a batch of generated instances and write CSV rows.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[command(flatten)]
        params: GenParams,
        #[arg(long, default_value = "lifo-stop")]
        policy: QueuePolicy,
        /// Run every instance under all four queue policies.
        #[arg(long)]
        compare_policies: bool,
        /// Build and verify a schedule or certificate for every instance.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    /// Read the schedule off the progress measure.
    Pm,
    /// Bellman-Ford on the projection of Player 1's strategy.
    Proj,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ConvertTarget {
    /// Reverse every arc; multi-head and multi-tail arcs swap.
    #[arg(long)]
    reverse: bool,
    /// Reduce a multi-head network to a mean payoff game.
    #[arg(long)]
    to_mpg: bool,
    /// Read a mean payoff game and write its network.
    #[arg(long)]
    from_mpg: bool,
    /// Rewrite in canonical order.
    #[arg(long)]
    canonical: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Random,
    Slow,
    Sat3,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Random => Family::RandomGame,
            FamilyArg::Slow => Family::SlowFamily,
            FamilyArg::Sat3 => Family::Sat3,
        }
    }
}

#[derive(Debug, Args)]
struct GenParams {
    /// Timepoints (random) or variables (sat3).
    #[arg(short, long, default_value_t = 100)]
    n: usize,
    /// Largest absolute weight.
    #[arg(short = 'W', long, default_value_t = 100)]
    max_weight: Weight,
    /// Probability that a node's arcs form a multi-head hyperarc.
    #[arg(long, default_value_t = 0.1)]
    frac: f64,
    #[arg(long, default_value_t = 3)]
    out_degree: usize,
    /// Clauses of a sat3 formula.
    #[arg(long, default_value_t = 10)]
    clauses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenParams {
    fn spec(&self, family: FamilyArg) -> GenSpec {
        GenSpec {
            family: family.into(),
            n: self.n,
            max_weight: self.max_weight,
            hyper_fraction: self.frac,
            out_degree: self.out_degree,
            clauses: self.clauses,
            seed: self.seed,
            stream: 0,
        }
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_network(path: &Path) -> Result<Hytn, Failure> {
    let text = read_input(path)?;
    parse_hytn(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check { file, policy, stats } => {
            let network = read_network(&file)?;
            let (consistent, st) = Solver::new(policy).check_consistency(&network)?;
            writeln!(out, "{}", if consistent { "CONSISTENT" } else { "INCONSISTENT" })?;
            if stats {
                writeln!(err, "lifts: {} (policy {}, early stop: {})", st.lift_count, st.policy, st.early_stopped)?;
            }
            Ok(if consistent { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Schedule { file, method, policy } => {
            let network = read_network(&file)?;
            let solver = Solver::new(policy);
            let result = match method {
                Method::Pm => solver.compute_schedule(&network),
                Method::Proj => solver.compute_schedule_via_projection(&network),
            };
            match result {
                Ok((s, _)) => {
                    write!(out, "{}", serialize_schedule(&s))?;
                    Ok(EXIT_OK)
                }
                Err(SolverError::Inconsistent(cert)) => {
                    writeln!(err, "network is inconsistent; negative cycle follows")?;
                    write!(out, "{}", serialize_certificate(&network, &cert))?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Certify { file, policy, minimize } => {
            let network = read_network(&file)?;
            match Solver::new(policy).minimize_certificates(minimize).compute_negative_cycle(&network) {
                Ok((cert, _)) => {
                    write!(out, "{}", serialize_certificate(&network, &cert))?;
                    Ok(EXIT_OK)
                }
                Err(SolverError::Consistent) => {
                    writeln!(err, "network is consistent; no negative cycle exists")?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Verify { file, schedule, cycle } => {
            let network = read_network(&file)?;
            let valid = if let Some(path) = schedule {
                let s = parse_schedule(&read_input(&path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                verify_schedule(&network, &s)?
            } else {
                let path = cycle.expect("clap requires one witness");
                let cert = parse_certificate(&read_input(&path)?, &network)
                    .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                verify_negative_cycle(&network, &cert)
            };
            writeln!(out, "{}", if valid { "VALID" } else { "INVALID" })?;
            Ok(if valid { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Convert { file, target } => {
            let text = if target.from_mpg {
                let game = parse_mpg(&read_input(&file)?).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
                write_hytn(&mpg_to_hytn(&game))
            } else {
                let network = read_network(&file)?;
                if target.reverse {
                    write_hytn(&reverse_network(&network))
                } else if target.to_mpg {
                    serialize_mpg(&hytn_to_mpg(&network)?.0)
                } else {
                    serialize_hytn(&network)
                }
            };
            write!(out, "{text}")?;
            Ok(EXIT_OK)
        }
        Command::Generate {
            family,
            params,
            index,
            output,
        } => {
            let spec = params.spec(family).with_stream(index);
            let (network, formula) = generate(&spec)?;
            let mut text = String::new();
            if let Some(phi) = formula {
                text.push_str(&format!("# 3-CNF over {} variables\n", phi.vars()));
                for c in phi.clauses() {
                    text.push_str(&format!("# clause {} {} {}\n", c[0], c[1], c[2]));
                }
            }
            text.push_str(&write_hytn(&network));
            match output {
                Some(path) => fs::write(&path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
                None => write!(out, "{text}")?,
            }
            Ok(EXIT_OK)
        }
        Command::Bench {
            family,
            count,
            params,
            policy,
            compare_policies,
            witness,
            csv,
        } => {
            let config = BenchConfig {
                spec: params.spec(family),
                count,
                policy,
                compare_policies,
                witness,
            };
            let rows = run_bench(&config)?;
            match csv {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                    write_csv(&rows, file)?;
                    writeln!(err, "wrote {} rows to {}", rows.len(), path.display())?;
                }
                None => write_csv(&rows, out)?,
            }
            Ok(EXIT_OK)
        }
    }
}
