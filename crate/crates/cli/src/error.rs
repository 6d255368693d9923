use kleinhilb::character::CharacterError;
use kleinhilb::lie_data::LieError;
use kleinhilb::oracle::OracleError;
use kleinhilb::zeta_series::ZetaError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTEGRALITY: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lie(_) => EXIT_USAGE,
            CliError::Zeta(e) => match e {
                ZetaError::Budget { .. } => EXIT_BUDGET,
                ZetaError::Integrality { .. } => EXIT_INTEGRALITY,
                ZetaError::Lie(_)
                | ZetaError::TooManySingularities { .. }
                | ZetaError::BadSurface(_) => EXIT_USAGE,
                ZetaError::Lattice(_) | ZetaError::Series(_) => EXIT_FAILURE,
            },
            CliError::Character(e) => match e {
                CharacterError::Budget { .. } => EXIT_BUDGET,
                CharacterError::DegreeOutOfRange { .. } | CharacterError::WrongRank { .. } => {
                    EXIT_USAGE
                }
                CharacterError::Lattice(_) => EXIT_FAILURE,
            },
            CliError::Oracle(e) => match e {
                OracleError::BadModulus(_) => EXIT_USAGE,
                OracleError::Budget(_) => EXIT_BUDGET,
            },
            CliError::Io { .. } | CliError::Pool(_) => EXIT_FAILURE,
        }
    }
}
