//! The generating series themselves.
//!
//! For a simple singularity of type Δ with `n` nodes,
//!
//! ```text
//! Z(q) = (∏ (1 - q^k)^{-1})^{n+1} · Σ_{v ∈ Z^n} ζ^{v_1 + … + v_n} q^{v^T C_Δ v / 2},
//! ζ = exp(2πi / (1 + h∨)),
//! ```
//!
//! computed over `Z[ζ]` and then certified to have rational-integer
//! coefficients. A surface with such singularities multiplies the Göttsche
//! series of its smooth locus with one local factor per singular point.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{zeta_power, CyclotomicInteger};
use crate::lattice_theta::{estimated_vector_count, twisted_theta, LatticeError};
use crate::lie_data::{zeta_order, DynkinType, LieError};
use crate::qseries::{
    demote_to_integer, euler_factor_inverse_power, promote_to_cyclotomic, smooth_surface_series,
    CycloSeries, IntSeries, SeriesError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(
        "local series of {dynkin_type} is not integral: coefficient of q^{degree} is {coefficient}"
    )]
    Integrality {
        dynkin_type: DynkinType,
        degree: usize,
        coefficient: CyclotomicInteger,
    },
    #[error("{dynkin_type} at order {order} needs about {estimate:.3e} lattice vectors, over the budget of {limit}")]
    Budget {
        dynkin_type: DynkinType,
        order: usize,
        estimate: f64,
        limit: u64,
    },
    #[error("stratification check supports at most {max} singular points, got {got}")]
    TooManySingularities { max: usize, got: usize },
    #[error("invalid surface description: {0}")]
    BadSurface(String),
}

/// Resource limits for one computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Upper bound on the estimated number of lattice vectors enumerated per
    /// local factor.
    pub max_lattice_vectors: u64,
    /// Upper bound on the number of stored (degree, exponent vector) terms of
    /// a multivariate character.
    pub max_character_terms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_lattice_vectors: 20_000_000_000,
            max_character_terms: 20_000_000,
        }
    }
}

impl Budget {
    /// Rough memory model: one stored character term costs about 96 bytes.
    pub fn from_megabytes(mb: u64) -> Self {
        Budget {
            max_character_terms: mb.saturating_mul(1 << 20) / 96,
            ..Budget::default()
        }
    }
}

/// Options for [`local_series_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalOptions {
    pub budget: Budget,
    /// Testing hook: adds `ζ` to the cyclotomic coefficient at this degree
    /// before demotion, to exercise the integrality-failure path.
    #[doc(hidden)]
    pub inject_fault_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralityCertificate {
    pub ok: bool,
    pub first_failure_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_failure_coefficient: Option<CyclotomicInteger>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSeriesResult {
    pub dynkin_type: DynkinType,
    pub truncation: usize,
    /// The product computed over `Z[ζ]`, before demotion.
    pub cyclotomic: CycloSeries,
    /// The demoted series; `None` iff the certificate failed.
    pub series: Option<IntSeries>,
    pub certificate: IntegralityCertificate,
}

impl LocalSeriesResult {
    pub fn integer_series(&self) -> Result<&IntSeries, ZetaError> {
        match &self.series {
            Some(s) => Ok(s),
            None => Err(ZetaError::Integrality {
                dynkin_type: self.dynkin_type,
                degree: self.certificate.first_failure_degree.unwrap_or(0),
                coefficient: self
                    .certificate
                    .first_failure_coefficient
                    .clone()
                    .unwrap_or_else(|| CyclotomicInteger::zero(self.cyclotomic_order())),
            }),
        }
    }

    pub fn cyclotomic_order(&self) -> u64 {
        zeta_order(self.dynkin_type)
    }
}

pub fn local_series(t: DynkinType, n: usize) -> Result<LocalSeriesResult, ZetaError> {
    local_series_with(t, n, &LocalOptions::default())
}

pub fn local_series_with(
    t: DynkinType,
    n: usize,
    opts: &LocalOptions,
) -> Result<LocalSeriesResult, ZetaError> {
    let estimate = estimated_vector_count(t, n);
    if estimate > opts.budget.max_lattice_vectors as f64 {
        return Err(ZetaError::Budget {
            dynkin_type: t,
            order: n,
            estimate,
            limit: opts.budget.max_lattice_vectors,
        });
    }
    let m = zeta_order(t);
    let euler = euler_factor_inverse_power(t.rank() as u32 + 1, n);
    let theta = twisted_theta(t, n)?;
    let mut cyclotomic = promote_to_cyclotomic(&euler, m).mul(&theta)?;
    if let Some(d) = opts.inject_fault_at.filter(|&d| d <= n) {
        let mut coeffs = cyclotomic.into_coeffs();
        coeffs[d] = coeffs[d].try_add(&zeta_power(m, 1)).expect("same ring");
        cyclotomic = CycloSeries::from_coeffs(crate::qseries::Ring::Cyclotomic(m), coeffs)?;
    }
    let (series, certificate) = match demote_to_integer(&cyclotomic) {
        Ok(s) => (
            Some(s),
            IntegralityCertificate {
                ok: true,
                first_failure_degree: None,
                first_failure_coefficient: None,
            },
        ),
        Err(SeriesError::Integrality {
            degree,
            coefficient,
        }) => (
            None,
            IntegralityCertificate {
                ok: false,
                first_failure_degree: Some(degree),
                first_failure_coefficient: Some(coefficient),
            },
        ),
        Err(e) => return Err(e.into()),
    };
    Ok(LocalSeriesResult {
        dynkin_type: t,
        truncation: n,
        cyclotomic,
        series,
        certificate,
    })
}

/// A quasiprojective surface, smooth away from finitely many simple
/// singularities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    /// Euler characteristic of the smooth locus.
    pub chi_smooth: i64,
    pub singularities: Vec<DynkinType>,
}

impl SurfaceSpec {
    pub fn new(chi_smooth: i64, singularities: Vec<DynkinType>) -> Self {
        SurfaceSpec {
            chi_smooth,
            singularities,
        }
    }

    pub fn smooth(chi_smooth: i64) -> Self {
        Self::new(chi_smooth, Vec::new())
    }

    /// Parses a comma-separated singularity list such as `"A1,A1,D4"`; the
    /// empty string means no singular points.
    pub fn parse_singularities(list: &str) -> Result<Vec<DynkinType>, LieError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(DynkinType::from_str)
            .collect()
    }

    /// Disjoint union: Euler characteristics add, singularities concatenate.
    pub fn disjoint_union(&self, other: &SurfaceSpec) -> SurfaceSpec {
        let mut singularities = self.singularities.clone();
        singularities.extend(other.singularities.iter().copied());
        SurfaceSpec::new(self.chi_smooth + other.chi_smooth, singularities)
    }

    /// Euler characteristic of the whole surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.chi_smooth + self.singularities.len() as i64
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sings: Vec<String> = self.singularities.iter().map(ToString::to_string).collect();
        write!(f, "chi0={} sing=[{}]", self.chi_smooth, sings.join(","))
    }
}

/// Integer local series for each distinct singularity type, computed in parallel.
fn local_factors(
    spec: &SurfaceSpec,
    n: usize,
    opts: &LocalOptions,
) -> Result<BTreeMap<DynkinType, IntSeries>, ZetaError> {
    let mut distinct: Vec<DynkinType> = spec.singularities.clone();
    distinct.sort();
    distinct.dedup();
    distinct
        .into_par_iter()
        .map(|t| {
            let local = local_series_with(t, n, opts)?;
            Ok((t, local.integer_series()?.clone()))
        })
        .collect()
}

pub fn surface_series(spec: &SurfaceSpec, n: usize) -> Result<IntSeries, ZetaError> {
    surface_series_with(spec, n, &LocalOptions::default())
}

pub fn surface_series_with(
    spec: &SurfaceSpec,
    n: usize,
    opts: &LocalOptions,
) -> Result<IntSeries, ZetaError> {
    let factors = local_factors(spec, n, opts)?;
    let mut acc = smooth_surface_series(spec.chi_smooth, n);
    for t in &spec.singularities {
        acc = acc.mul(&factors[t])?;
    }
    Ok(acc)
}

pub const MAX_STRATIFIED_POINTS: usize = 2;

/// Recomputes the surface series from the support decomposition
/// `Hilb^m(S) = ⊔_{m_0 + … + m_k = m} Hilb^{m_0}(S^0) × ∏ Hilb^{m_i}_{P_i}(S)`,
/// summing over every composition of each `m` explicitly, and compares it
/// with [`surface_series`].
pub fn stratification_check(spec: &SurfaceSpec, n: usize) -> Result<bool, ZetaError> {
    if spec.singularities.len() > MAX_STRATIFIED_POINTS {
        return Err(ZetaError::TooManySingularities {
            max: MAX_STRATIFIED_POINTS,
            got: spec.singularities.len(),
        });
    }
    let factors = local_factors(spec, n, &LocalOptions::default())?;
    let smooth = smooth_surface_series(spec.chi_smooth, n);
    let mut strata: Vec<&[BigInt]> = vec![smooth.coeffs()];
    for t in &spec.singularities {
        strata.push(factors[t].coeffs());
    }

    fn compositions(strata: &[&[BigInt]], remaining: usize, partial: BigInt, out: &mut BigInt) {
        match strata.split_first() {
            None => {
                if remaining == 0 {
                    *out += partial;
                }
            }
            Some((first, [])) => *out += partial * &first[remaining],
            Some((first, rest)) => {
                for part in 0..=remaining {
                    compositions(rest, remaining - part, &partial * &first[part], out);
                }
            }
        }
    }

    let direct: Vec<BigInt> = (0..=n)
        .map(|m| {
            let mut total = BigInt::from(0);
            compositions(&strata, m, BigInt::from(1), &mut total);
            total
        })
        .collect();
    let product = surface_series(spec, n)?;
    Ok(product.coeffs() == direct.as_slice())
}
