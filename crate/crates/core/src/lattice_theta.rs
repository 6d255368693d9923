//! Short-vector enumeration in root lattices and the theta sums built on it.
//!
//! The quadratic form is completed to squares in exact rational arithmetic
//! (Fincke–Pohst). The resulting coefficients are then rounded to `f64` and
//! only used to bound coordinate intervals, which are widened by a slack far
//! larger than any rounding error. Acceptance of a vector is decided solely by
//! its exact integer norm, maintained incrementally along the search.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::cyclotomic::CyclotomicInteger;
use crate::lie_data::{cartan_matrix, leading_minors, zeta_order, CartanMatrix, DynkinType};
use crate::qseries::{CycloSeries, IntSeries, QSeries, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("norm bound must be nonnegative, got {0}")]
    NegativeBound(i64),
    #[error("odd norm {norm} for lattice vector {vector:?}; the lattice is not even")]
    OddNorm { vector: Vec<i64>, norm: i64 },
}

/// Symmetric positive-definite integer Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl GramMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotPositiveDefinite(
                "not a nonempty square matrix".into(),
            ));
        }
        let entries: Vec<i64> = rows.concat();
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(LatticeError::NotPositiveDefinite(format!(
                        "asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if !leading_minors(n, &entries).iter().all(|&d| d > 0) {
            return Err(LatticeError::NotPositiveDefinite(
                "a leading minor is not positive".into(),
            ));
        }
        Ok(GramMatrix { n, entries })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn norm(&self, x: &[i64]) -> i64 {
        let n = self.n;
        (0..n)
            .map(|i| x[i] * (0..n).map(|j| self.get(i, j) * x[j]).sum::<i64>())
            .sum()
    }
}

impl From<&CartanMatrix> for GramMatrix {
    fn from(c: &CartanMatrix) -> Self {
        GramMatrix {
            n: c.rank(),
            entries: c.rows().concat(),
        }
    }
}

/// Every lattice vector of norm at most `norm_bound`, each exactly once.
#[derive(Debug, Clone)]
pub struct GramEnumeration {
    pub gram: GramMatrix,
    pub norm_bound: i64,
    pub vectors: Vec<Vec<i64>>,
}

impl GramEnumeration {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Fincke–Pohst enumerator for one Gram matrix.
#[derive(Debug, Clone)]
pub struct ShortVectors {
    gram: GramMatrix,
    /// `d_i` of `Q(x) = Σ d_i (x_i + Σ_{j>i} mu_ij x_j)^2`
    diag: Vec<f64>,
    /// `mu_ij` for `j > i`, row-major `n x n`
    mu: Vec<f64>,
    determinant: f64,
}

const SLACK: f64 = 1e-6;

impl ShortVectors {
    pub fn new(gram: &GramMatrix) -> Result<Self, LatticeError> {
        let n = gram.n;
        let mut q: Vec<BigRational> = gram
            .entries
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        for i in 0..n {
            let pivot = q[i * n + i].clone();
            if !pivot.is_positive() {
                return Err(LatticeError::NotPositiveDefinite(format!(
                    "pivot {i} is {pivot}"
                )));
            }
            for j in i + 1..n {
                q[j * n + i] = q[i * n + j].clone();
                q[i * n + j] = &q[i * n + j] / &pivot;
            }
            for k in i + 1..n {
                for l in k..n {
                    let delta = &q[k * n + i] * &q[i * n + l];
                    q[k * n + l] -= delta;
                }
            }
        }
        let to_f64 = |r: &BigRational| r.to_f64().expect("finite rational");
        let diag: Vec<f64> = (0..n).map(|i| to_f64(&q[i * n + i])).collect();
        let mut mu = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                mu[i * n + j] = to_f64(&q[i * n + j]);
            }
        }
        let determinant = (0..n)
            .map(|i| q[i * n + i].clone())
            .fold(BigRational::from_integer(1.into()), |a, b| a * b);
        Ok(ShortVectors {
            gram: gram.clone(),
            diag,
            mu,
            determinant: to_f64(&determinant),
        })
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// Volume heuristic for the number of vectors of norm at most `bound`.
    pub fn estimated_count(&self, bound: i64) -> f64 {
        let n = self.gram.n as f64;
        let unit_ball = std::f64::consts::PI.powf(n / 2.0) / gamma_half_integer(self.gram.n + 2);
        unit_ball * (bound.max(0) as f64).powf(n / 2.0) / self.determinant.sqrt()
    }

    fn interval(&self, i: usize, center: f64, rem: f64) -> (i64, i64) {
        let r = ((rem + SLACK).max(0.0) / self.diag[i]).sqrt();
        ((center - r).ceil() as i64, (center + r).floor() as i64)
    }

    /// Center of coordinate `i` and the exact linear term `Σ_{j>i} G_ij x_j`
    /// given the coordinates above `i`.
    #[inline]
    fn center(&self, i: usize, x: &[i64]) -> (f64, i64) {
        let n = self.gram.n;
        let mut c = 0.0;
        let mut lin = 0i64;
        for (j, &xj) in x.iter().enumerate().take(n).skip(i + 1) {
            c -= self.mu[i * n + j] * xj as f64;
            lin += self.gram.entries[i * n + j] * xj;
        }
        (c, lin)
    }

    /// Sets coordinate `i` to `v` given the coordinates above it; returns the
    /// updated (exact norm, float remainder, coordinate sum).
    #[inline]
    fn step(&self, i: usize, v: i64, c: f64, lin: i64, state: (i64, f64, i64)) -> (i64, f64, i64) {
        let (pnorm, rem, psum) = state;
        let t = v as f64 - c;
        (
            pnorm + self.gram.get(i, i) * v * v + 2 * v * lin,
            rem - self.diag[i] * t * t,
            psum + v,
        )
    }

    /// Visits the subtree where coordinates `set_from..n` are fixed in `x`.
    fn descend<F: FnMut(&[i64], i64, i64)>(
        &self,
        set_from: usize,
        x: &mut [i64],
        state: (i64, f64, i64),
        bound: i64,
        f: &mut F,
    ) {
        if set_from == 0 {
            if state.0 <= bound {
                f(x, state.0, state.2);
            }
            return;
        }
        let i = set_from - 1;
        let (c, lin) = self.center(i, x);
        let (lo, hi) = self.interval(i, c, state.1);
        if i == 0 {
            let g = self.gram.get(0, 0);
            let (pnorm, _, psum) = state;
            for v in lo..=hi {
                let norm = pnorm + g * v * v + 2 * v * lin;
                if norm <= bound {
                    x[0] = v;
                    f(x, norm, psum + v);
                }
            }
        } else {
            for v in lo..=hi {
                x[i] = v;
                let next = self.step(i, v, c, lin, state);
                self.descend(i, x, next, bound, f);
            }
        }
        x[i] = 0;
    }

    /// Calls `f(vector, exact_norm, coordinate_sum)` for every lattice vector
    /// of norm at most `bound`.
    pub fn for_each<F: FnMut(&[i64], i64, i64)>(&self, bound: i64, mut f: F) {
        if bound < 0 {
            return;
        }
        let n = self.gram.n;
        let mut x = vec![0i64; n];
        self.descend(n, &mut x, (0, bound as f64, 0), bound, &mut f);
    }

    /// Fixed values of the top one or two coordinates that can lead to a
    /// vector within `bound`; each is an independent unit of work.
    fn prefixes(&self, bound: i64) -> Vec<(Vec<i64>, (i64, f64, i64))> {
        let n = self.gram.n;
        let depth = n.min(2);
        let mut out = vec![(vec![0i64; n], (0i64, bound as f64, 0i64))];
        for level in 0..depth {
            let i = n - 1 - level;
            let mut next = Vec::new();
            for (x, state) in out {
                let (c, lin) = self.center(i, &x);
                let (lo, hi) = self.interval(i, c, state.1);
                for v in lo..=hi {
                    let mut y = x.clone();
                    y[i] = v;
                    next.push((y, self.step(i, v, c, lin, state)));
                }
            }
            out = next;
        }
        out
    }

    /// Parallel fold over all vectors of norm at most `bound`. Work is split by
    /// the top coordinates; `merge` must be associative and commutative for the
    /// result to be independent of the thread count.
    pub fn par_fold<A, I, V, M>(&self, bound: i64, identity: I, visit: V, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        V: Fn(&mut A, &[i64], i64, i64) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        if bound < 0 {
            return identity();
        }
        let n = self.gram.n;
        let depth = n.min(2);
        self.prefixes(bound)
            .into_par_iter()
            .fold(&identity, |mut acc, (mut x, state)| {
                self.descend(n - depth, &mut x, state, bound, &mut |v, norm, sum| {
                    visit(&mut acc, v, norm, sum)
                });
                acc
            })
            .reduce(&identity, merge)
    }
}

/// `Γ(k/2)` for positive integers `k`.
fn gamma_half_integer(k: usize) -> f64 {
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut j = if k.is_multiple_of(2) { 2 } else { 1 };
    while j + 2 <= k {
        g *= j as f64 / 2.0;
        j += 2;
    }
    g
}

/// All integer vectors `v` with `v^T G v <= bound`, sorted lexicographically.
pub fn enumerate_vectors(gram: &GramMatrix, bound: i64) -> Result<GramEnumeration, LatticeError> {
    if bound < 0 {
        return Err(LatticeError::NegativeBound(bound));
    }
    let sv = ShortVectors::new(gram)?;
    let mut vectors = Vec::new();
    sv.for_each(bound, |v, norm, _| {
        debug_assert_eq!(norm, gram.norm(v));
        vectors.push(v.to_vec());
    });
    vectors.sort();
    Ok(GramEnumeration {
        gram: gram.clone(),
        norm_bound: bound,
        vectors,
    })
}

/// Number of lattice vectors per half-norm `0..=n` split by coordinate sum
/// modulo `m`: `counts[k * m + r]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueShells {
    pub truncation: usize,
    pub modulus: u64,
    pub counts: Vec<u64>,
}

impl ResidueShells {
    pub fn shell(&self, k: usize) -> &[u64] {
        let m = self.modulus as usize;
        &self.counts[k * m..(k + 1) * m]
    }

    pub fn shell_total(&self, k: usize) -> u64 {
        self.shell(k).iter().sum()
    }

    /// `norm,count` rows, one per even norm `0, 2, …, 2N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("norm,count\n");
        for k in 0..=self.truncation {
            out.push_str(&format!("{},{}\n", 2 * k, self.shell_total(k)));
        }
        out
    }
}

struct ShellAcc {
    counts: Vec<u64>,
    odd: Option<(Vec<i64>, i64)>,
}

/// Counts vectors of norm `<= 2n` by (norm / 2, coordinate sum mod `m`),
/// checking evenness of every norm.
pub fn residue_shells(
    gram: &CartanMatrix,
    n: usize,
    m: u64,
) -> Result<ResidueShells, LatticeError> {
    let sv = ShortVectors::new(&GramMatrix::from(gram))?;
    let width = m as usize;
    let size = (n + 1) * width;
    let acc = sv.par_fold(
        2 * n as i64,
        || ShellAcc {
            counts: vec![0; size],
            odd: None,
        },
        |acc, v, norm, sum| {
            if norm & 1 != 0 {
                acc.odd.get_or_insert_with(|| (v.to_vec(), norm));
                return;
            }
            let r = sum.rem_euclid(m as i64) as usize;
            acc.counts[(norm as usize / 2) * width + r] += 1;
        },
        |mut a, b| {
            for (x, y) in a.counts.iter_mut().zip(&b.counts) {
                *x += y;
            }
            a.odd = match (a.odd, b.odd) {
                (Some(p), Some(q)) => Some(p.min(q)),
                (p, q) => p.or(q),
            };
            a
        },
    );
    if let Some((vector, norm)) = acc.odd {
        return Err(LatticeError::OddNorm { vector, norm });
    }
    Ok(ResidueShells {
        truncation: n,
        modulus: m,
        counts: acc.counts,
    })
}

/// `Σ_{v ∈ Z^n} ζ^{Σ v_i} q^{v^T C v / 2}` to order `n` over `Z[ζ_m]`,
/// `m = 1 + h∨`.
pub fn twisted_theta(t: DynkinType, n: usize) -> Result<CycloSeries, LatticeError> {
    let m = zeta_order(t);
    let shells = residue_shells(&cartan_matrix(t), n, m)?;
    Ok(twisted_theta_from_shells(&shells))
}

pub fn twisted_theta_from_shells(shells: &ResidueShells) -> CycloSeries {
    let m = shells.modulus;
    let coeffs = (0..=shells.truncation)
        .map(|k| CyclotomicInteger::from_residue_counts(m, shells.shell(k)))
        .collect();
    QSeries::from_coeffs(Ring::Cyclotomic(m), coeffs).expect("uniform ring")
}

/// Classical root-lattice theta series: coefficient of `q^k` is the number
/// of vectors of norm `2k`.
pub fn theta_untwisted(t: DynkinType, n: usize) -> Result<IntSeries, LatticeError> {
    let shells = residue_shells(&cartan_matrix(t), n, 1)?;
    let coeffs = (0..=n)
        .map(|k| BigInt::from(shells.shell_total(k)))
        .collect();
    Ok(QSeries::from_coeffs(Ring::Integer, coeffs).expect("uniform ring"))
}

/// Sanity bound used by callers that budget work before enumerating.
pub fn estimated_vector_count(t: DynkinType, n: usize) -> f64 {
    ShortVectors::new(&GramMatrix::from(&cartan_matrix(t)))
        .map(|sv| sv.estimated_count(2 * n as i64))
        .unwrap_or(f64::INFINITY)
}
