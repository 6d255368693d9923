mod cache;
mod commands;
mod config;
mod error;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CharacterQuery, Context, Format, Report};
use config::Overrides;
use error::CliError;

/// Euler characteristics of Hilbert schemes of points on surfaces with
/// simple (ADE) singularities.
#[derive(Parser, Debug)]
#[command(name = "kleinhilb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Directory of the content-addressed result cache [env: KLEIN_CACHE_DIR]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Worker threads [env: KLEIN_WORKERS; default: available cores]
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Memory budget for multivariate characters, in MiB [env: KLEIN_BUDGET_MB]
    #[arg(long, global = true)]
    budget_mb: Option<u64>,

    /// File of `key = value` settings, lowest precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Largest accepted rank in series A [default: 30]
    #[arg(long, global = true)]
    max_a_rank: Option<usize>,

    /// Largest accepted rank in series D [default: 12]
    #[arg(long, global = true)]
    max_d_rank: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local series of one singularity type
    Series {
        #[arg(long = "type")]
        dynkin_type: String,
        #[arg(long, default_value_t = 50)]
        order: usize,
        /// Also write the lattice shell sizes (`norm,count`) to this file
        #[arg(long)]
        shells_csv: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_integrality_fault: Option<usize>,
    },
    /// Global series of a surface with simple singularities
    Surface {
        /// Euler characteristic of the smooth locus
        #[arg(long, allow_hyphen_values = true)]
        chi0: i64,
        /// Comma-separated singularity types, e.g. A1,A1,D4
        #[arg(long, default_value = "")]
        sing: String,
        #[arg(long, default_value_t = 50)]
        order: usize,
        #[arg(long, hide = true)]
        inject_integrality_fault: Option<usize>,
    },
    /// Multivariate character: weight multiplicities, specialization check or full dump
    Character {
        #[arg(long = "type")]
        dynkin_type: String,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Root-lattice vector in simple-root coordinates, e.g. 1,-1
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            requires = "degree"
        )]
        beta: Option<Vec<i32>>,
        #[arg(long, requires = "beta")]
        degree: Option<usize>,
        /// Compare the specialization at the root of unity with the local series
        #[arg(long, conflicts_with = "beta")]
        check_specialization: bool,
    },
    /// Compare the type A formula with brute-force fixed-point counts
    Verify {
        #[arg(long, default_value_t = 4)]
        rmax: u32,
        #[arg(long, default_value_t = 8)]
        mmax: usize,
    },
    /// Integrality certificates for a list of types
    Integrality {
        #[arg(long, default_value = commands::DEFAULT_INTEGRALITY_TYPES)]
        types: String,
        #[arg(long, default_value_t = 50)]
        order: usize,
        #[arg(long, hide = true)]
        inject_integrality_fault: Option<usize>,
    },
    /// Run the desk-scale invariant suite
    Selfcheck,
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let file = match &cli.config {
        Some(path) => config::read_config(path)?,
        None => Default::default(),
    };
    let flags = Overrides {
        cache_dir: cli.cache_dir,
        workers: cli.workers,
        budget_mb: cli.budget_mb,
        max_a_rank: cli.max_a_rank,
        max_d_rank: cli.max_d_rank,
    };
    let settings = config::resolve(&flags, &|k| std::env::var(k).ok(), &file)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()?;
    let ctx = Context::new(settings, cli.format)?;

    pool.install(|| match cli.command {
        Command::Series {
            dynkin_type,
            order,
            shells_csv,
            inject_integrality_fault,
        } => {
            let t = ctx.settings.dynkin_type(&dynkin_type)?;
            commands::cmd_series(
                &ctx,
                t,
                order,
                inject_integrality_fault,
                shells_csv.as_deref(),
            )
        }
        Command::Surface {
            chi0,
            sing,
            order,
            inject_integrality_fault,
        } => {
            let spec = commands::parse_surface(&ctx, chi0, &sing)?;
            commands::cmd_surface(&ctx, &spec, order, inject_integrality_fault)
        }
        Command::Character {
            dynkin_type,
            order,
            beta,
            degree,
            check_specialization,
        } => {
            let t = ctx.settings.dynkin_type(&dynkin_type)?;
            let query = match (beta, degree) {
                (Some(beta), Some(degree)) => CharacterQuery::Multiplicity { beta, degree },
                _ if check_specialization => CharacterQuery::CheckSpecialization,
                _ => CharacterQuery::Dump,
            };
            commands::cmd_character(&ctx, t, order, query)
        }
        Command::Verify { rmax, mmax } => commands::cmd_verify(&ctx, rmax, mmax),
        Command::Integrality {
            types,
            order,
            inject_integrality_fault,
        } => {
            let types = commands::parse_types(&ctx, &types)?;
            commands::cmd_integrality(&ctx, &types, order, inject_integrality_fault)
        }
        Command::Selfcheck => Ok(commands::render_checks(&selfcheck::run_all(), ctx.format)),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_beta_parses() {
        let cli = Cli::try_parse_from([
            "kleinhilb",
            "character",
            "--type",
            "A2",
            "--beta",
            "-1,1",
            "--degree",
            "2",
        ])
        .unwrap();
        match cli.command {
            Command::Character { beta, .. } => assert_eq!(beta, Some(vec![-1, 1])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn beta_requires_degree() {
        assert!(
            Cli::try_parse_from(["kleinhilb", "character", "--type", "A1", "--beta", "0"]).is_err()
        );
    }
}
