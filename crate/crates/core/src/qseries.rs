//! Truncated power series in `q` over `Z` or `Z[ζ_m]`.
//!
//! A series of truncation order `N` stores exactly `N + 1` coefficients and
//! claims nothing about degrees above `N`. Binary operations truncate to the
//! smaller of the two orders.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::CyclotomicInteger;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient rings differ: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("coefficient of q^{degree} is not a rational integer: {coefficient}")]
    Integrality {
        degree: usize,
        coefficient: CyclotomicInteger,
    },
    #[error("malformed series: {0}")]
    Malformed(String),
}

/// Coefficient ring tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ring {
    Integer,
    Cyclotomic(u64),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integer => write!(f, "Z"),
            Ring::Cyclotomic(m) => write!(f, "Z[zeta_{m}]"),
        }
    }
}

/// Exact commutative ring elements a series can hold.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero_in(ring: Ring) -> Self;
    fn one_in(ring: Ring) -> Self;
    fn ring(&self) -> Ring;
    fn vanishes(&self) -> bool;
    fn add_assign(&mut self, rhs: &Self);
    fn sub_assign(&mut self, rhs: &Self);
    fn mul(&self, rhs: &Self) -> Self;
}

impl Coefficient for BigInt {
    fn zero_in(_: Ring) -> Self {
        BigInt::zero()
    }

    fn one_in(_: Ring) -> Self {
        BigInt::one()
    }

    fn ring(&self) -> Ring {
        Ring::Integer
    }

    fn vanishes(&self) -> bool {
        self.is_zero()
    }

    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn sub_assign(&mut self, rhs: &Self) {
        *self -= rhs;
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Coefficient for CyclotomicInteger {
    fn zero_in(ring: Ring) -> Self {
        match ring {
            Ring::Cyclotomic(m) => CyclotomicInteger::zero(m),
            Ring::Integer => panic!("integer ring tag for a cyclotomic coefficient"),
        }
    }

    fn one_in(ring: Ring) -> Self {
        match ring {
            Ring::Cyclotomic(m) => CyclotomicInteger::one(m),
            Ring::Integer => panic!("integer ring tag for a cyclotomic coefficient"),
        }
    }

    fn ring(&self) -> Ring {
        Ring::Cyclotomic(self.order())
    }

    fn vanishes(&self) -> bool {
        self.is_zero()
    }

    fn add_assign(&mut self, rhs: &Self) {
        self.add_assign_unchecked(rhs);
    }

    fn sub_assign(&mut self, rhs: &Self) {
        self.add_assign_unchecked(&rhs.neg());
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.mul_unchecked(rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<C> {
    ring: Ring,
    coeffs: Vec<C>,
}

pub type IntSeries = QSeries<BigInt>;
pub type CycloSeries = QSeries<CyclotomicInteger>;

impl<C: Coefficient> QSeries<C> {
    /// Builds a series of truncation order `coeffs.len() - 1`.
    pub fn from_coeffs(ring: Ring, coeffs: Vec<C>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Malformed(
                "a series needs at least one coefficient".into(),
            ));
        }
        if let Some(c) = coeffs.iter().find(|c| c.ring() != ring) {
            return Err(SeriesError::RingMismatch(ring, c.ring()));
        }
        Ok(QSeries { ring, coeffs })
    }

    pub fn zero(ring: Ring, truncation: usize) -> Self {
        QSeries {
            ring,
            coeffs: vec![C::zero_in(ring); truncation + 1],
        }
    }

    pub fn one(ring: Ring, truncation: usize) -> Self {
        let mut s = Self::zero(ring, truncation);
        s.coeffs[0] = C::one_in(ring);
        s
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&C> {
        self.coeffs.get(k)
    }

    /// Drops every coefficient above degree `n`; no-op if already shorter.
    pub fn truncate(mut self, n: usize) -> Self {
        self.coeffs.truncate(n + 1);
        self
    }

    fn check(&self, other: &Self) -> Result<usize, SeriesError> {
        if self.ring != other.ring {
            return Err(SeriesError::RingMismatch(self.ring, other.ring));
        }
        Ok(self.truncation().min(other.truncation()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check(other)?;
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                c.add_assign(&other.coeffs[k]);
                c
            })
            .collect();
        Ok(QSeries {
            ring: self.ring,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check(other)?;
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                c.sub_assign(&other.coeffs[k]);
                c
            })
            .collect();
        Ok(QSeries {
            ring: self.ring,
            coeffs,
        })
    }

    /// Cauchy product truncated to the smaller order. Output degrees are
    /// computed independently, so the result does not depend on scheduling.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check(other)?;
        let coeffs = (0..=n)
            .into_par_iter()
            .map(|k| {
                let mut acc = C::zero_in(self.ring);
                for i in 0..=k {
                    let (a, b) = (&self.coeffs[i], &other.coeffs[k - i]);
                    if !a.vanishes() && !b.vanishes() {
                        acc.add_assign(&a.mul(b));
                    }
                }
                acc
            })
            .collect();
        Ok(QSeries {
            ring: self.ring,
            coeffs,
        })
    }
}

impl IntSeries {
    pub fn from_i64s(coeffs: &[i64]) -> Self {
        QSeries {
            ring: Ring::Integer,
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    /// `degree,coefficient` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,coefficient\n");
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{k},{c}\n"));
        }
        out
    }
}

/// `(∏_{k≥1} (1 - q^k)^{-1})^e` to order `n`, for any integer `e`.
///
/// Uses `k·a_k = e·Σ_{j=1}^{k} σ(j)·a_{k-j}`, obtained by differentiating the
/// logarithm of the product; the division by `k` is always exact.
pub fn euler_product_power(e: i64, n: usize) -> IntSeries {
    let sigma: Vec<BigInt> = (0..=n)
        .map(|j| {
            if j == 0 {
                BigInt::zero()
            } else {
                BigInt::from((1..=j).filter(|d| j % d == 0).sum::<usize>())
            }
        })
        .collect();
    let e = BigInt::from(e);
    let mut a: Vec<BigInt> = Vec::with_capacity(n + 1);
    a.push(BigInt::one());
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for j in 1..=k {
            acc += &sigma[j] * &a[k - j];
        }
        acc *= &e;
        let (q, r) = num_integer::Integer::div_rem(&acc, &BigInt::from(k));
        debug_assert!(r.is_zero());
        a.push(q);
    }
    QSeries {
        ring: Ring::Integer,
        coeffs: a,
    }
}

/// Generating series of `e`-tuples of partitions.
pub fn euler_factor_inverse_power(e: u32, n: usize) -> IntSeries {
    euler_product_power(e as i64, n)
}

/// Euler-characteristic series of `Hilb^m` of a smooth surface with Euler
/// characteristic `chi`.
pub fn smooth_surface_series(chi: i64, n: usize) -> IntSeries {
    euler_product_power(chi, n)
}

/// `(1 - q)^{-chi}`: the Hilbert-scheme series of a smooth curve.
pub fn smooth_curve_series(chi: i64, n: usize) -> IntSeries {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    coeffs.push(c.clone());
    for k in 1..=n {
        c = c * BigInt::from(chi + k as i64 - 1) / BigInt::from(k);
        coeffs.push(c.clone());
    }
    QSeries {
        ring: Ring::Integer,
        coeffs,
    }
}

pub fn promote_to_cyclotomic(a: &IntSeries, m: u64) -> CycloSeries {
    QSeries {
        ring: Ring::Cyclotomic(m),
        coeffs: a
            .coeffs
            .iter()
            .map(|c| CyclotomicInteger::from_integer(m, c.clone()))
            .collect(),
    }
}

/// Fails with the first degree whose coefficient is not a rational integer.
pub fn demote_to_integer(a: &CycloSeries) -> Result<IntSeries, SeriesError> {
    let coeffs = a
        .coeffs
        .iter()
        .enumerate()
        .map(|(degree, c)| {
            c.as_rational_integer()
                .ok_or_else(|| SeriesError::Integrality {
                    degree,
                    coefficient: c.clone(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QSeries {
        ring: Ring::Integer,
        coeffs,
    })
}

// JSON: {"variable": "q", "truncation": N, "ring": "Z" | {"cyclotomic": m}, "coeffs": [...]}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RingRepr {
    Named(String),
    Cyclotomic { cyclotomic: u64 },
}

impl From<Ring> for RingRepr {
    fn from(r: Ring) -> Self {
        match r {
            Ring::Integer => RingRepr::Named("Z".into()),
            Ring::Cyclotomic(m) => RingRepr::Cyclotomic { cyclotomic: m },
        }
    }
}

#[derive(Serialize)]
struct SeriesOut<'a, T> {
    variable: &'static str,
    truncation: usize,
    ring: RingRepr,
    coeffs: &'a [T],
}

#[derive(Deserialize)]
struct SeriesIn<T> {
    variable: String,
    truncation: usize,
    ring: RingRepr,
    coeffs: Vec<T>,
}

fn check_header<E: serde::de::Error>(
    variable: &str,
    truncation: usize,
    len: usize,
) -> Result<(), E> {
    if variable != "q" {
        return Err(E::custom(format!(
            "unexpected series variable {variable:?}"
        )));
    }
    if len != truncation + 1 {
        return Err(E::custom(format!(
            "truncation {truncation} needs {} coefficients, got {len}",
            truncation + 1
        )));
    }
    Ok(())
}

impl Serialize for IntSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        SeriesOut {
            variable: "q",
            truncation: self.truncation(),
            ring: self.ring.into(),
            coeffs: &coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SeriesIn::<String>::deserialize(deserializer)?;
        check_header::<D::Error>(&raw.variable, raw.truncation, raw.coeffs.len())?;
        match raw.ring {
            RingRepr::Named(ref s) if s == "Z" => {}
            _ => return Err(D::Error::custom("expected ring \"Z\"")),
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries {
            ring: Ring::Integer,
            coeffs,
        })
    }
}

impl Serialize for CycloSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesOut {
            variable: "q",
            truncation: self.truncation(),
            ring: self.ring.into(),
            coeffs: &self.coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SeriesIn::<CyclotomicInteger>::deserialize(deserializer)?;
        check_header::<D::Error>(&raw.variable, raw.truncation, raw.coeffs.len())?;
        let m = match raw.ring {
            RingRepr::Cyclotomic { cyclotomic } => cyclotomic,
            _ => return Err(D::Error::custom("expected a cyclotomic ring")),
        };
        QSeries::from_coeffs(Ring::Cyclotomic(m), raw.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::zeta_power;
    use crate::oracle::count_colored_partitions;
    use proptest::prelude::*;

    fn ints(s: &IntSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn products() {
        let a = IntSeries::from_i64s(&[1, 1, 0]);
        let b = IntSeries::from_i64s(&[1, -1, 0]);
        assert_eq!(ints(&a.mul(&b).unwrap()), vec![1, 0, -1]);
        let one = IntSeries::one(Ring::Integer, 2);
        assert_eq!(a.mul(&one).unwrap(), a);
        let geometric = IntSeries::from_i64s(&[1; 6]);
        let one_minus_q = IntSeries::from_i64s(&[1, -1, 0, 0, 0, 0]);
        assert_eq!(
            ints(&geometric.mul(&one_minus_q).unwrap()),
            vec![1, 0, 0, 0, 0, 0]
        );
    }

    #[test]
    fn truncation_is_minimum() {
        let a = IntSeries::from_i64s(&[1, 1, 1, 1]);
        let b = IntSeries::from_i64s(&[1, 1]);
        assert_eq!(a.mul(&b).unwrap().truncation(), 1);
        assert_eq!(a.add(&b).unwrap().truncation(), 1);
    }

    #[test]
    fn ring_mismatch() {
        let a = promote_to_cyclotomic(&IntSeries::from_i64s(&[1, 1]), 3);
        let b = promote_to_cyclotomic(&IntSeries::from_i64s(&[1, 1]), 7);
        assert!(matches!(a.mul(&b), Err(SeriesError::RingMismatch(_, _))));
        let bad = QSeries::from_coeffs(Ring::Cyclotomic(3), vec![zeta_power(7, 1)]);
        assert!(bad.is_err());
    }

    #[test]
    fn euler_factor_examples() {
        assert_eq!(
            ints(&euler_factor_inverse_power(1, 6)),
            vec![1, 1, 2, 3, 5, 7, 11]
        );
        assert_eq!(
            ints(&euler_factor_inverse_power(2, 4)),
            vec![1, 2, 5, 10, 20]
        );
        assert_eq!(
            ints(&euler_factor_inverse_power(0, 5)),
            vec![1, 0, 0, 0, 0, 0]
        );
    }

    #[test]
    fn euler_factor_matches_colored_partition_oracle() {
        for e in 0..=3u32 {
            let s = euler_factor_inverse_power(e, 25);
            for k in 0..=25 {
                assert_eq!(s.coeffs()[k], count_colored_partitions(k, e), "e={e} k={k}");
            }
        }
    }

    #[test]
    fn smooth_surfaces() {
        assert_eq!(ints(&smooth_surface_series(1, 5)), vec![1, 1, 2, 3, 5, 7]);
        assert_eq!(ints(&smooth_surface_series(0, 5)), vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(
            ints(&smooth_surface_series(-1, 5)),
            vec![1, -1, -1, 0, 0, 1]
        );
        // brute-force expansion of ∏ (1 - q^k) to degree 30
        let n = 30;
        let mut prod = vec![0i64; n + 1];
        prod[0] = 1;
        for k in 1..=n {
            for d in (k..=n).rev() {
                prod[d] -= prod[d - k];
            }
        }
        assert_eq!(ints(&smooth_surface_series(-1, n)), prod);
    }

    #[test]
    fn smooth_curves() {
        assert_eq!(ints(&smooth_curve_series(2, 3)), vec![1, 2, 3, 4]);
        assert_eq!(ints(&smooth_curve_series(0, 3)), vec![1, 0, 0, 0]);
        assert_eq!(ints(&smooth_curve_series(-2, 3)), vec![1, -2, 1, 0]);
        assert_eq!(ints(&smooth_curve_series(3, 4)), vec![1, 3, 6, 10, 15]);
    }

    #[test]
    fn promote_and_demote() {
        let a = IntSeries::from_i64s(&[1, 1]);
        assert_eq!(demote_to_integer(&promote_to_cyclotomic(&a, 3)).unwrap(), a);

        let one = CyclotomicInteger::one(3);
        let bad =
            QSeries::from_coeffs(Ring::Cyclotomic(3), vec![one.clone(), zeta_power(3, 1)]).unwrap();
        match demote_to_integer(&bad) {
            Err(SeriesError::Integrality {
                degree,
                coefficient,
            }) => {
                assert_eq!(degree, 1);
                assert_eq!(coefficient, zeta_power(3, 1));
            }
            other => panic!("unexpected {other:?}"),
        }

        let vanishing = zeta_power(3, 1)
            .try_add(&zeta_power(3, 2))
            .unwrap()
            .try_add(&one)
            .unwrap();
        let ok = QSeries::from_coeffs(
            Ring::Cyclotomic(3),
            vec![one.clone(), one.clone(), vanishing],
        )
        .unwrap();
        assert_eq!(ints(&demote_to_integer(&ok).unwrap()), vec![1, 1, 0]);
    }

    #[test]
    fn json_and_csv() {
        let s = IntSeries::from_i64s(&[1, -1, 0]);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"variable": "q", "truncation": 2, "ring": "Z", "coeffs": ["1", "-1", "0"]})
        );
        assert_eq!(s.to_csv(), "degree,coefficient\n0,1\n1,-1\n2,0\n");

        let c = promote_to_cyclotomic(&s, 3);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["ring"], serde_json::json!({"cyclotomic": 3}));
        assert_eq!(
            v["coeffs"][1],
            serde_json::json!({"m": 3, "coeffs": ["-1", "0"]})
        );
        let back: CycloSeries = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);

        assert!(serde_json::from_str::<IntSeries>(
            r#"{"variable":"q","truncation":3,"ring":"Z","coeffs":["1"]}"#
        )
        .is_err());
    }

    fn series(n: usize) -> impl Strategy<Value = IntSeries> {
        proptest::collection::vec(-50i64..50, n + 1).prop_map(|c| IntSeries::from_i64s(&c))
    }

    proptest! {
        #[test]
        fn mul_is_commutative_and_associative(a in series(12), b in series(12), c in series(12)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn surface_exponents_add(a in -6i64..6, b in -6i64..6) {
            let n = 20;
            prop_assert_eq!(
                smooth_surface_series(a + b, n),
                smooth_surface_series(a, n).mul(&smooth_surface_series(b, n)).unwrap()
            );
        }

        #[test]
        fn json_round_trip(s in series(9)) {
            let text = serde_json::to_string(&s).unwrap();
            prop_assert_eq!(serde_json::from_str::<IntSeries>(&text).unwrap(), s);
        }
    }
}
