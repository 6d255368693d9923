//! Exact arithmetic in `Z[ζ_m]`, stored in the power basis `1, ζ, …, ζ^{φ(m)-1}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("incompatible cyclotomic rings: order {0} vs order {1}")]
    IncompatibleRing(u64, u64),
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("expected {expected} coefficients for order {m}, got {got}")]
    WrongLength { m: u64, expected: usize, got: usize },
}

/// The monic cyclotomic polynomial `Φ_m`, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicPolynomial {
    order: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicPolynomial {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Exact division of `num` by the monic `den` (both low-to-high). Panics if
/// the division is not exact.
fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
    }
    assert!(rem.iter().all(|&r| r == 0), "division is not exact");
    quot
}

/// `Φ_m` by dividing `x^m - 1` by `Φ_d` for every proper divisor `d` of `m`.
pub fn cyclotomic_polynomial(m: u64) -> CyclotomicPolynomial {
    assert!(m >= 1, "cyclotomic order must be positive");
    let mut poly = vec![0i64; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        poly = divide_monic(&poly, &cyclotomic_polynomial(d).coeffs);
    }
    CyclotomicPolynomial {
        order: m,
        coeffs: poly,
    }
}

pub fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}

/// Precomputed data for `Z[ζ_m]`: `Φ_m` and the reduced form of every power
/// `ζ^k` for `k < max(m, 2φ(m) - 1)`.
#[derive(Debug)]
pub struct CyclotomicRing {
    m: u64,
    phi: usize,
    poly: CyclotomicPolynomial,
    powers: Vec<Vec<i64>>,
}

impl CyclotomicRing {
    fn build(m: u64) -> Self {
        let poly = cyclotomic_polynomial(m);
        let phi = poly.degree();
        let count = (m as usize).max(2 * phi);
        let mut powers: Vec<Vec<i64>> = Vec::with_capacity(count);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..count {
            powers.push(cur.clone());
            // multiply by x and rewrite x^phi = -(Φ_m - x^phi)
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for (c, p) in cur.iter_mut().zip(&poly.coeffs) {
                    *c -= top * p;
                }
            }
        }
        CyclotomicRing {
            m,
            phi,
            poly,
            powers,
        }
    }

    /// Shared ring data for order `m`, built once per process.
    pub fn get(m: u64) -> Arc<CyclotomicRing> {
        assert!(m >= 1, "cyclotomic order must be positive");
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicRing>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap();
        guard
            .entry(m)
            .or_insert_with(|| Arc::new(CyclotomicRing::build(m)))
            .clone()
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn polynomial(&self) -> &CyclotomicPolynomial {
        &self.poly
    }

    /// Reduced coefficients of `ζ^k` for `0 <= k < m`.
    pub fn power(&self, k: usize) -> &[i64] {
        &self.powers[k]
    }

    /// Reduce an unreduced coefficient vector (any length) in place into `out`.
    fn reduce_into(&self, raw: Vec<BigInt>) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = Vec::with_capacity(self.phi);
        let mut iter = raw.into_iter();
        for _ in 0..self.phi {
            out.push(iter.next().unwrap_or_default());
        }
        for (k, c) in iter.enumerate() {
            let k = k + self.phi;
            if c.is_zero() {
                continue;
            }
            let row = self.power_mod(k);
            for (o, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *o += &c * r;
                }
            }
        }
        out
    }

    fn power_mod(&self, k: usize) -> &[i64] {
        if k < self.powers.len() {
            &self.powers[k]
        } else {
            &self.powers[k % self.m as usize]
        }
    }
}

/// An element `Σ c_i ζ^i` of `Z[ζ_m]`, always fully reduced modulo `Φ_m`.
#[derive(Clone)]
pub struct CyclotomicInteger {
    ring: Arc<CyclotomicRing>,
    coeffs: Vec<BigInt>,
}

impl CyclotomicInteger {
    pub fn zero(m: u64) -> Self {
        let ring = CyclotomicRing::get(m);
        let coeffs = vec![BigInt::zero(); ring.phi];
        CyclotomicInteger { ring, coeffs }
    }

    pub fn from_integer(m: u64, value: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(m);
        z.coeffs[0] = value.into();
        z
    }

    pub fn one(m: u64) -> Self {
        Self::from_integer(m, 1)
    }

    /// Builds an element from power-basis coefficients of any length,
    /// reducing modulo `Φ_m`.
    pub fn from_coeffs(m: u64, coeffs: Vec<BigInt>) -> Self {
        let ring = CyclotomicRing::get(m);
        let coeffs = ring.reduce_into(coeffs);
        CyclotomicInteger { ring, coeffs }
    }

    /// Builds an element from already-reduced coefficients.
    pub fn from_reduced(m: u64, coeffs: Vec<BigInt>) -> Result<Self, CyclotomicError> {
        let ring = CyclotomicRing::get(m);
        if coeffs.len() != ring.phi {
            return Err(CyclotomicError::WrongLength {
                m,
                expected: ring.phi,
                got: coeffs.len(),
            });
        }
        Ok(CyclotomicInteger { ring, coeffs })
    }

    /// `Σ_r counts[r] ζ^r` for residues `r < m`.
    pub fn from_residue_counts<T: Into<BigInt> + Copy>(m: u64, counts: &[T]) -> Self {
        let ring = CyclotomicRing::get(m);
        let mut coeffs = vec![BigInt::zero(); ring.phi];
        for (r, &c) in counts.iter().enumerate() {
            let c: BigInt = c.into();
            if c.is_zero() {
                continue;
            }
            for (o, &p) in coeffs.iter_mut().zip(ring.power(r % ring.m as usize)) {
                if p != 0 {
                    *o += &c * p;
                }
            }
        }
        CyclotomicInteger { ring, coeffs }
    }

    pub fn order(&self) -> u64 {
        self.ring.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<(), CyclotomicError> {
        if self.ring.m == other.ring.m {
            Ok(())
        } else {
            Err(CyclotomicError::IncompatibleRing(self.ring.m, other.ring.m))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn neg(&self) -> Self {
        CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CyclotomicInteger {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        debug_assert_eq!(self.ring.m, other.ring.m);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    /// Schoolbook product followed by a single reduction pass.
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring.m, other.ring.m);
        let phi = self.ring.phi;
        let mut raw = vec![BigInt::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        CyclotomicInteger {
            coeffs: self.ring.reduce_into(raw),
            ring: self.ring.clone(),
        }
    }

    /// `Some(c_0)` iff the element is a rational integer.
    pub fn as_rational_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Image under the automorphism `ζ ↦ ζ^{-1}` (complex conjugation).
    pub fn conjugate(&self) -> Self {
        let m = self.ring.m as usize;
        let mut raw = vec![BigInt::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[(m - i) % m] += c;
        }
        CyclotomicInteger::from_coeffs(self.ring.m, raw)
    }

    /// Floating-point value at `ζ = exp(2πi/m)`, as `(re, im)`. For spot checks only.
    pub fn evaluate(&self) -> (f64, f64) {
        let m = self.ring.m as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * i as f64 / m;
            re += c * angle.cos();
            im += c * angle.sin();
        }
        (re, im)
    }
}

/// `ζ^{k mod m}` reduced modulo `Φ_m`.
pub fn zeta_power(m: u64, k: i64) -> CyclotomicInteger {
    let ring = CyclotomicRing::get(m);
    let r = k.rem_euclid(m as i64) as usize;
    let coeffs = ring.power(r).iter().map(|&c| BigInt::from(c)).collect();
    CyclotomicInteger { ring, coeffs }
}

impl PartialEq for CyclotomicInteger {
    fn eq(&self, other: &Self) -> bool {
        self.ring.m == other.ring.m && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicInteger {}

impl fmt::Debug for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self, self.ring.m)
    }
}

impl fmt::Display for CyclotomicInteger {
    /// Renders e.g. `1 - 2*z + z^3` in the power basis.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicRepr {
    m: u64,
    coeffs: Vec<String>,
}

impl Serialize for CyclotomicInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CyclotomicRepr {
            m: self.ring.m,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CyclotomicRepr::deserialize(deserializer)?;
        if repr.m == 0 {
            return Err(D::Error::custom(CyclotomicError::ZeroOrder));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        CyclotomicInteger::from_reduced(repr.m, coeffs).map_err(D::Error::custom)
    }
}
