use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ctmc_boltz::cycles::{cycle_force, Cycle};
use ctmc_boltz::generators::{
    cyclic_doubly_stochastic, example_chain, lifted_cyclic_chain, random_heavy_tail_chain,
    random_iid_chain, Example, ExitRates,
};
use ctmc_boltz::io::{
    emit_contour_csv, fmt_num, parse_chain_file, write_chain_file, write_report, Chain, GridSpec,
    ParseError, ReportFormat,
};
use ctmc_boltz::simulate::{aggregate, simulate_replicas};
use ctmc_boltz::{correlation_stats, stationary_ctmc, Error};

const EXIT_INVALID: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_REDUCIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "ctmc-boltz", version, about = "Boltzmann structure of CTMC stationary distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation statistics and Boltzmann certificate for a ctmc file.
    Analyze {
        /// Chain file, or '-' for stdin.
        file: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a chain file to stdout.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Monte Carlo occupation and jump frequencies.
    Simulate {
        file: String,
        #[arg(long)]
        jumps: usize,
        #[arg(long)]
        seed: u64,
        /// 1-based start state.
        #[arg(long, default_value_t = 1)]
        start: usize,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// Segments dropped from the front of each replica.
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// Log ratio of forward to reverse weights around a cycle.
    CycleForce {
        file: String,
        /// Comma-separated 1-based states, e.g. 1,2,3,4.
        #[arg(long)]
        cycle: String,
    },
    /// rho over an (r2, rho_tilde) grid as CSV.
    Contour {
        #[arg(long, allow_hyphen_values = true)]
        r2: String,
        #[arg(long = "rho-tilde", allow_hyphen_values = true)]
        rho_tilde: String,
    },
}

#[derive(Subcommand)]
enum Family {
    ExampleQ1,
    ExampleQ2,
    /// Cyclic doubly stochastic family; lifted to a ctmc when --exit-rates is given.
    Cyclic {
        #[arg(long)]
        n: usize,
        /// geometric:BASE or list:v1,v2,...
        #[arg(long = "exit-rates")]
        exit_rates: Option<String>,
    },
    Iid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        low: f64,
        #[arg(long)]
        high: f64,
        #[arg(long)]
        seed: u64,
    },
    Heavy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        width: f64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Structured,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateExitRates | Error::DegeneratePi => EXIT_DEGENERATE,
            Error::NotIrreducible { .. } => EXIT_REDUCIBLE,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Invalid(inner) => inner.into(),
            ParseError::NotIrreducible { .. } => Failure {
                code: EXIT_REDUCIBLE,
                msg: e.to_string(),
            },
            other => invalid(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        msg: msg.into(),
    }
}

fn read_chain(path: &str) -> Result<Chain, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| invalid(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| invalid(format!("{path}: {e}")))?
    };
    parse_chain_file(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{path}: {}", f.msg);
        f
    })
}

fn parse_exit_rates(spec: &str) -> Result<ExitRates, Failure> {
    if let Some(b) = spec.strip_prefix("geometric:") {
        let base = b
            .parse()
            .map_err(|_| invalid(format!("invalid geometric base {b:?}")))?;
        Ok(ExitRates::Geometric(base))
    } else if let Some(list) = spec.strip_prefix("list:") {
        list.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| invalid(format!("invalid exit rate {v:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()
            .map(ExitRates::List)
    } else {
        Err(invalid(format!(
            "exit rates must be geometric:BASE or list:v1,v2,..., got {spec:?}"
        )))
    }
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Analyze { file, format } => {
            let m = match read_chain(&file)? {
                Chain::Ctmc(m) => m,
                Chain::Dtmc(_) => return Err(invalid("analyze needs a ctmc file")),
            };
            let report = correlation_stats(&m)?;
            let format = match format {
                Format::Text => ReportFormat::Text,
                Format::Csv => ReportFormat::Csv,
                Format::Structured => ReportFormat::Structured,
            };
            Ok(write_report(&report, format))
        }
        Command::Generate { family } => {
            let chain = match family {
                Family::ExampleQ1 => Chain::Ctmc(example_chain(Example::Q1)),
                Family::ExampleQ2 => Chain::Ctmc(example_chain(Example::Q2)),
                Family::Cyclic { n, exit_rates: None } => Chain::Dtmc(cyclic_doubly_stochastic(n)?),
                Family::Cyclic {
                    n,
                    exit_rates: Some(spec),
                } => Chain::Ctmc(lifted_cyclic_chain(n, &parse_exit_rates(&spec)?, false)?),
                Family::Iid { n, low, high, seed } => Chain::Ctmc(random_iid_chain(n, low, high, seed)?),
                Family::Heavy { n, width, seed } => Chain::Ctmc(random_heavy_tail_chain(n, width, seed)?),
            };
            Ok(write_chain_file(&chain))
        }
        Command::Simulate {
            file,
            jumps,
            seed,
            start,
            replicas,
            burn_in,
        } => {
            let m = match read_chain(&file)? {
                Chain::Ctmc(m) => m,
                Chain::Dtmc(_) => return Err(invalid("simulate needs a ctmc file")),
            };
            if start == 0 || start > m.n() {
                return Err(invalid(format!("start state {start} out of range 1..={}", m.n())));
            }
            if replicas == 0 {
                return Err(invalid("--replicas must be at least 1"));
            }
            if burn_in >= jumps {
                return Err(invalid("--burn-in must be smaller than --jumps"));
            }
            let runs = simulate_replicas(&m, start - 1, jumps, seed, replicas)?;
            let est = aggregate(&runs, m.n(), burn_in)?;
            let pi = stationary_ctmc(&m)?;
            let mut out = String::from("state,occupation,jump_frequency,pi\n");
            for i in 0..m.n() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    i + 1,
                    fmt_num(est.occupation[i]),
                    fmt_num(est.jump_frequencies[i]),
                    fmt_num(pi[i])
                );
            }
            Ok(out)
        }
        Command::CycleForce { file, cycle } => {
            let chain = read_chain(&file)?;
            let states = cycle
                .split(',')
                .map(|s| match s.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(invalid(format!("invalid cycle state {s:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let c = Cycle::new(states, chain.n())?;
            let force = match &chain {
                Chain::Ctmc(m) => cycle_force(m, &c)?,
                Chain::Dtmc(p) => cycle_force(p, &c)?,
            };
            Ok(format!("cycle_force = {}\n", fmt_num(force)))
        }
        Command::Contour { r2, rho_tilde } => {
            let r2: GridSpec = r2.parse().map_err(|e: ctmc_boltz::io::BadGridSpec| invalid(e.to_string()))?;
            let rt: GridSpec = rho_tilde
                .parse()
                .map_err(|e: ctmc_boltz::io::BadGridSpec| invalid(e.to_string()))?;
            if rt.min < -1.0 || rt.max > 1.0 {
                return Err(invalid("rho_tilde grid must lie in [-1, 1]"));
            }
            if r2.min < 0.0 {
                return Err(invalid("r2 grid must be nonnegative"));
            }
            Ok(emit_contour_csv(&r2, &rt))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
