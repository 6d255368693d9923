//! Exact generating series of Euler characteristics of Hilbert schemes of
//! points on surfaces with simple (ADE) singularities.
//!
//! The building blocks, bottom-up:
//!
//! * [`lie_data`]: Dynkin types, Cartan matrices, roots, Coxeter numbers;
//! * [`cyclotomic`]: exact arithmetic in `Z[ζ_m]`;
//! * [`qseries`]: truncated power series and Euler products;
//! * [`lattice_theta`]: short-vector enumeration and theta sums;
//! * [`zeta_series`]: local and global Hilbert-scheme series;
//! * [`character`]: the multivariate affine character and its specializations;
//! * [`oracle`]: brute-force counts used to cross-check everything above.

pub mod character;
pub mod cyclotomic;
pub mod lattice_theta;
pub mod lie_data;
pub mod oracle;
pub mod qseries;
pub mod zeta_series;

pub use character::{extended_character, CharacterSeries};
pub use cyclotomic::{zeta_power, CyclotomicInteger};
pub use lie_data::{cartan_matrix, root_datum, zeta_order, CartanMatrix, DynkinType, Series};
pub use qseries::{CycloSeries, IntSeries, QSeries, Ring};
pub use zeta_series::{local_series, surface_series, Budget, LocalSeriesResult, SurfaceSpec};
