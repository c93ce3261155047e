mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iwk_core::Error;

use config::{Format, PartialConfig, RunConfig};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "iwk", version, about = "p-adic epsilon factors, regulators and identity checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Odd prime.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// p-adic precision in digits.
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Series degree in pi.
    #[arg(long, global = true)]
    deg: Option<usize>,
    /// Degree in T of Iwasawa algebra elements.
    #[arg(long, global = true)]
    tdeg: Option<usize>,
    /// Level cap; for `gauss` and `eps`, the conductor exponent.
    #[arg(long, global = true)]
    level: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for `suite`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every identity check.
    Suite,
    /// Regulator value of dlog g_c at chi^j against Bernoulli numbers.
    Zeta {
        #[arg(long, default_value_t = 2)]
        c: i64,
        #[arg(long, default_value_t = 1)]
        j: i64,
    },
    /// Gauss sum of a character of conductor p^level.
    Gauss {
        #[arg(long, default_value_t = 1)]
        tame: i64,
        /// Wild exponent for conductor p^2 and above.
        #[arg(long, default_value_t = 1)]
        wild: i64,
    },
    /// Epsilon factors of a character and of a sum of Tate twists.
    Eps {
        #[arg(long, default_value_t = 0)]
        j: i64,
        #[arg(long, default_value_t = 1)]
        tame: i64,
        #[arg(long, default_value_t = 1)]
        wild: i64,
        /// Hodge-Tate weights, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        weights: Vec<i64>,
    },
    /// Cyclotomic regulator of dlog g_c.
    Regulator {
        #[arg(long, default_value_t = 2)]
        c: i64,
    },
    /// Theta element and epsilon scalar for Q_p(r).
    Theta {
        #[arg(long, default_value_t = 2)]
        c: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        r: i64,
    },
}

fn resolve(global: &GlobalArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = std::env::var_os("IWK_CONFIG") {
        cfg.apply(&config::load_file(&PathBuf::from(path))?);
    }
    cfg.apply(&PartialConfig {
        p: global.p,
        prec: global.prec,
        deg: global.deg,
        tdeg: global.tdeg,
        level: global.level,
        seed: global.seed,
        format: global.format,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::InvalidArgument(_) | Error::InvalidPrime(_) | Error::CharacterShape(_))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli.global) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let (name, outcome) = match &cli.command {
        Command::Suite => ("suite", commands::suite(&cfg, cli.global.jobs)),
        Command::Zeta { c, j } => ("zeta", commands::zeta(&cfg, *c, *j)),
        Command::Gauss { tame, wild } => ("gauss", commands::gauss(&cfg, *tame, cli.global.level.unwrap_or(1), *wild)),
        Command::Eps { j, tame, wild, weights } => ("eps", commands::eps(&cfg, *j, *tame, cli.global.level.unwrap_or(1), *wild, weights)),
        Command::Regulator { c } => ("regulator", commands::regulator(&cfg, *c)),
        Command::Theta { c, r } => ("theta", commands::theta(&cfg, *c, *r)),
    };
    match outcome {
        Ok((result, checks)) => {
            let report = Report::new(cfg, name, result, checks);
            print!("{}", report.emit());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) if is_usage(&e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
