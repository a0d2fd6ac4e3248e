use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use simplek::bits::BitString;
use simplek::lab::{self, LabConfig, LabError};
use simplek::MachineSpec;

/// Exact complexity lab: build tables, derive κ, construct W, verify.
#[derive(Parser, Debug)]
#[command(name = "simplek", version)]
struct Cli {
    #[command(flatten)]
    opts: LabOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct LabOpts {
    /// Simplicity bound δ
    #[arg(long, global = true, default_value_t = 8)]
    delta: u32,

    /// Longest program length in bits (L_max)
    #[arg(long = "max-len", global = true, default_value_t = 21)]
    max_len: usize,

    /// Step budget per run (T)
    #[arg(long, global = true, default_value_t = 10_000)]
    steps: u64,

    /// Artifact directory
    #[arg(long, global = true, default_value = "lab-out")]
    out: PathBuf,

    /// Allow L_max below the finiteness guarantee
    #[arg(long = "allow-partial", global = true)]
    allow_partial: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write index.tsv and ktable.tsv
    Build,
    /// Write kappa.tsv
    Kappa,
    /// Write wtable.tsv
    Construct,
    /// Write theorem.tsv; exit 1 unless every residual is zero
    Verify,
    /// Write delta_survey.tsv
    DeltaReport,
    /// Print one complexity value with its shortest program
    Query {
        kind: QueryKind,
        /// `x d` for kU, `alpha gamma d` for kW; `^` is the empty string
        #[arg(num_args = 2..=3)]
        strings: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum QueryKind {
    #[value(name = "kU")]
    KU,
    #[value(name = "kW")]
    KW,
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn parse_strings(raw: &[String], n: usize) -> Result<Vec<BitString>, LabError> {
    if raw.len() != n {
        return Err(usage(format!("expected {n} strings, got {}", raw.len())));
    }
    raw.iter()
        .map(|s| s.parse().map_err(|e| usage(format!("bad string literal {s:?}: {e}"))))
        .collect()
}

fn run(cli: Cli) -> Result<(), LabError> {
    let config = LabConfig {
        delta: cli.opts.delta,
        max_len: cli.opts.max_len,
        steps: cli.opts.steps,
        out_dir: cli.opts.out,
        machine: MachineSpec::default(),
        allow_partial: cli.opts.allow_partial,
    };
    match cli.command {
        Command::Build => {
            let summary = lab::step_build(&config)?;
            println!("{summary}");
        }
        Command::Kappa => {
            let budget = lab::step_kappa(&config)?;
            println!("kappa={} pairs={}", budget.kappa, budget.per_pair.len());
        }
        Command::Construct => {
            let (kappa, rows) = lab::step_construct(&config)?;
            println!("kappa={kappa} rows={rows}");
        }
        Command::Verify => {
            let report = lab::step_verify(&config)?;
            println!(
                "triples={} all_exact={} kappa={}",
                report.rows.len(),
                report.all_exact,
                report.params.kappa
            );
            if let Some(r) = report.first_failure() {
                return Err(LabError::Verification(format!(
                    "alpha={} gamma={} d={} lhs={} rhs={} residual={}",
                    r.alpha, r.gamma, r.d, r.lhs, r.rhs, r.residual
                )));
            }
        }
        Command::DeltaReport => {
            let survey = lab::step_delta_report(&config)?;
            print!("finite={} infinite={}", survey.finite, survey.infinite);
            if let Some((lo, hi)) = &survey.extremes {
                print!(" min={} max={}", lo.delta_value, hi.delta_value);
            }
            println!();
        }
        Command::Query { kind, strings } => {
            let found = match kind {
                QueryKind::KU => {
                    let s = parse_strings(&strings, 2)?;
                    lab::query_ku(&config, &s[0], &s[1])?.map(|e| (e.k, e.witness.to_string()))
                }
                QueryKind::KW => {
                    let s = parse_strings(&strings, 3)?;
                    lab::query_kw(&config, &s[0], &s[1], &s[2])?.map(|(k, p)| (k, p.to_string()))
                }
            };
            match found {
                Some((k, program)) => println!("{k} {program}"),
                None => println!("inf"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simplek: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
