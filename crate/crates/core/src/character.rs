//! Character of the extended basic representation as a multivariate series
//!
//! ```text
//! (∏ (1 - q^k)^{-1})^{n+1} · Σ_{β ∈ Q} q_1^{β_1} ⋯ q_n^{β_n} q^{⟨β,β⟩/2}
//! ```
//!
//! (the formal `e^{ω_0}` prefactor dropped), and its specializations at
//! `q_i = ζ` and `q_i = 1`. The lattice sum keeps every exponent vector, so
//! this is an independent route to the series computed in
//! [`crate::zeta_series`].

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::cyclotomic::CyclotomicInteger;
use crate::lattice_theta::{residue_shells, GramMatrix, LatticeError, ShortVectors};
use crate::lie_data::{cartan_matrix, zeta_order, DynkinType};
use crate::qseries::{euler_factor_inverse_power, CycloSeries, IntSeries, QSeries, Ring};
use crate::zeta_series::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("character of {dynkin_type} to order {order} needs {terms} terms, over the budget of {limit}")]
    Budget {
        dynkin_type: DynkinType,
        order: usize,
        terms: u64,
        limit: u64,
    },
    #[error("degree {degree} is beyond the truncation order {truncation}")]
    DegreeOutOfRange { degree: usize, truncation: usize },
    #[error("exponent vector has length {got}, expected rank {expected}")]
    WrongRank { expected: usize, got: usize },
}

/// Coordinates of a root-lattice element in the simple-root basis.
pub type ExponentVector = SmallVec<[i32; 8]>;

/// Coefficient of one power of `q`: a finite Laurent polynomial in
/// `q_1, …, q_n`, stored sorted by exponent vector with no zero entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentCoefficient {
    terms: Vec<(ExponentVector, BigInt)>,
}

impl LaurentCoefficient {
    fn from_sorted(terms: Vec<(ExponentVector, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        LaurentCoefficient { terms }
    }

    pub fn get(&self, beta: &[i32]) -> Option<&BigInt> {
        self.terms
            .binary_search_by(|(k, _)| k.as_slice().cmp(beta))
            .ok()
            .map(|i| &self.terms[i].1)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i32], &BigInt)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }
}

/// The character truncated at `q^N`.
///
/// Every multiplicity is an Euler coefficient: the monomial
/// `q^d q_1^{β_1} ⋯ q_n^{β_n}` has multiplicity `E_{d - ⟨β,β⟩/2}`, where
/// `E = (∏ (1 - q^k)^{-1})^{n+1}`. So only the lattice support is stored,
/// once, with each vector's half-norm; per-degree coefficients are derived.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSeries {
    pub dynkin_type: DynkinType,
    pub truncation: usize,
    support: Vec<(ExponentVector, usize)>,
    euler: IntSeries,
}

/// Number of lattice vectors the character to order `n` stores.
fn stored_terms(shell_sizes: &[u64]) -> u64 {
    shell_sizes.iter().sum()
}

pub fn extended_character(
    t: DynkinType,
    n: usize,
    budget: &Budget,
) -> Result<CharacterSeries, CharacterError> {
    let cartan = cartan_matrix(t);
    let sizes: Vec<u64> = {
        let shells = residue_shells(&cartan, n, 1)?;
        (0..=n).map(|k| shells.shell_total(k)).collect()
    };
    let terms = stored_terms(&sizes);
    if terms > budget.max_character_terms {
        return Err(CharacterError::Budget {
            dynkin_type: t,
            order: n,
            terms,
            limit: budget.max_character_terms,
        });
    }

    let sv = ShortVectors::new(&GramMatrix::from(&cartan))?;
    let mut support: Vec<(ExponentVector, usize)> = sv.par_fold(
        2 * n as i64,
        Vec::new,
        |acc, v, norm, _| {
            let beta: ExponentVector = v.iter().map(|&x| x as i32).collect();
            acc.push((beta, norm as usize / 2));
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    support.sort_unstable();
    support.shrink_to_fit();

    Ok(CharacterSeries {
        dynkin_type: t,
        truncation: n,
        support,
        euler: euler_factor_inverse_power(t.rank() as u32 + 1, n),
    })
}

impl CharacterSeries {
    /// Number of exponent vectors occurring anywhere up to the truncation.
    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// The coefficient of `q^d` as a Laurent polynomial in `q_1, …, q_n`.
    pub fn coefficient(&self, d: usize) -> Result<LaurentCoefficient, CharacterError> {
        if d > self.truncation {
            return Err(CharacterError::DegreeOutOfRange {
                degree: d,
                truncation: self.truncation,
            });
        }
        let terms = self
            .support
            .iter()
            .filter(|(_, k)| *k <= d)
            .map(|(beta, k)| (beta.clone(), self.euler.coeffs()[d - k].clone()))
            .collect();
        Ok(LaurentCoefficient::from_sorted(terms))
    }

    /// Multiplicity of the monomial `q_1^{β_1} ⋯ q_n^{β_n}` in the
    /// coefficient of `q^d`.
    pub fn weight_multiplicity(&self, beta: &[i32], d: usize) -> Result<BigInt, CharacterError> {
        if beta.len() != self.dynkin_type.rank() {
            return Err(CharacterError::WrongRank {
                expected: self.dynkin_type.rank(),
                got: beta.len(),
            });
        }
        if d > self.truncation {
            return Err(CharacterError::DegreeOutOfRange {
                degree: d,
                truncation: self.truncation,
            });
        }
        let found = self
            .support
            .binary_search_by(|(k, _)| k.as_slice().cmp(beta))
            .ok()
            .map(|i| self.support[i].1);
        Ok(match found {
            Some(k) if k <= d => self.euler.coeffs()[d - k].clone(),
            _ => BigInt::zero(),
        })
    }

    /// Substitutes `q_i = exp(2πi / (1 + h∨))` for every `i`, summing the
    /// stored monomials one at a time.
    pub fn specialize_at_zeta(&self) -> CycloSeries {
        let m = zeta_order(self.dynkin_type);
        let n = self.truncation;
        let mut buckets = vec![vec![BigInt::zero(); m as usize]; n + 1];
        let e = self.euler.coeffs();
        for (beta, k) in &self.support {
            let s: i64 = beta.iter().map(|&x| x as i64).sum();
            let r = s.rem_euclid(m as i64) as usize;
            for d in *k..=n {
                buckets[d][r] += &e[d - k];
            }
        }
        let coeffs = buckets
            .into_iter()
            .map(|b| CyclotomicInteger::from_coeffs(m, b))
            .collect();
        QSeries::from_coeffs(Ring::Cyclotomic(m), coeffs).expect("uniform ring")
    }

    /// Substitutes `q_i = 1` for every `i`.
    pub fn specialize_at_one(&self) -> IntSeries {
        let n = self.truncation;
        let mut acc = vec![BigInt::zero(); n + 1];
        let e = self.euler.coeffs();
        for (_, k) in &self.support {
            for d in *k..=n {
                acc[d] += &e[d - k];
            }
        }
        QSeries::from_coeffs(Ring::Integer, acc).expect("integer ring")
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term {
            beta: Vec<i32>,
            mult: String,
        }
        #[derive(Serialize)]
        struct Doc {
            #[serde(rename = "type")]
            dynkin_type: DynkinType,
            truncation: usize,
            coeffs: Vec<Vec<Term>>,
        }
        let doc = Doc {
            dynkin_type: self.dynkin_type,
            truncation: self.truncation,
            coeffs: (0..=self.truncation)
                .map(|d| {
                    self.coefficient(d)
                        .expect("degree in range")
                        .terms
                        .into_iter()
                        .map(|(beta, mult)| Term {
                            beta: beta.to_vec(),
                            mult: mult.to_string(),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }
}

/// Builds the character to order `d` and reads off one multiplicity.
pub fn weight_multiplicity(
    t: DynkinType,
    beta: &[i32],
    d: usize,
    budget: &Budget,
) -> Result<BigInt, CharacterError> {
    if beta.len() != t.rank() {
        return Err(CharacterError::WrongRank {
            expected: t.rank(),
            got: beta.len(),
        });
    }
    extended_character(t, d, budget)?.weight_multiplicity(beta, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_theta::theta_untwisted;
    use crate::oracle::count_colored_partitions;
    use crate::qseries::demote_to_integer;
    use crate::zeta_series::local_series;

    fn ty(s: &str) -> DynkinType {
        s.parse().unwrap()
    }

    fn character(s: &str, n: usize) -> CharacterSeries {
        extended_character(ty(s), n, &Budget::default()).unwrap()
    }

    #[test]
    fn constant_term_is_one() {
        for t in ["A1", "A3", "D4", "E6"] {
            let c = character(t, 2);
            assert_eq!(c.coefficient(0).unwrap().len(), 1);
            let zero = vec![0; ty(t).rank()];
            assert_eq!(c.coefficient(0).unwrap().get(&zero), Some(&BigInt::from(1)));
        }
    }

    #[test]
    fn a1_first_coefficient() {
        let c = character("A1", 3);
        let terms: Vec<(Vec<i32>, i64)> = c
            .coefficient(1)
            .unwrap()
            .iter()
            .map(|(b, m)| (b.to_vec(), i64::try_from(m).unwrap()))
            .collect();
        assert_eq!(terms, vec![(vec![-1], 1), (vec![0], 2), (vec![1], 1)]);
    }

    #[test]
    fn multiplicity_examples() {
        let b = Budget::default();
        assert_eq!(
            weight_multiplicity(ty("D4"), &[0; 4], 0, &b).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            weight_multiplicity(ty("A1"), &[1], 1, &b).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            weight_multiplicity(ty("A1"), &[0], 2, &b).unwrap(),
            BigInt::from(5)
        );
        assert_eq!(
            weight_multiplicity(ty("A1"), &[1], 0, &b).unwrap(),
            BigInt::from(0)
        );
        assert!(matches!(
            weight_multiplicity(ty("A2"), &[1], 1, &b),
            Err(CharacterError::WrongRank {
                expected: 2,
                got: 1
            })
        ));
        let c = character("A1", 2);
        assert!(matches!(
            c.weight_multiplicity(&[0], 3),
            Err(CharacterError::DegreeOutOfRange {
                degree: 3,
                truncation: 2
            })
        ));
    }

    #[test]
    fn multiplicities_are_colored_partition_counts() {
        for t in ["A2", "D4"] {
            let dt = ty(t);
            let c = character(t, 6);
            let g = cartan_matrix(dt);
            for d in 0..=6 {
                for (beta, mult) in c.coefficient(d).unwrap().iter() {
                    let b: Vec<i64> = beta.iter().map(|&x| x as i64).collect();
                    let half = g.norm(&b) as usize / 2;
                    assert_eq!(
                        *mult,
                        count_colored_partitions(d - half, dt.rank() as u32 + 1)
                    );
                }
            }
        }
    }

    #[test]
    fn multiplicities_are_negation_symmetric_and_nondecreasing() {
        let c = character("A3", 7);
        for d in 0..=7 {
            let coeff = c.coefficient(d).unwrap();
            for (beta, mult) in coeff.iter() {
                let neg: Vec<i32> = beta.iter().map(|x| -x).collect();
                assert_eq!(coeff.get(&neg), Some(mult));
                assert_eq!(&c.weight_multiplicity(beta, d).unwrap(), mult);
                if d < 7 {
                    assert!(c.coefficient(d + 1).unwrap().get(beta).unwrap() >= mult);
                }
            }
        }
    }

    #[test]
    fn specialization_at_zeta_matches_local_series() {
        for (t, n) in [("A1", 6), ("A2", 6), ("D4", 10)] {
            let c = character(t, n);
            let special = demote_to_integer(&c.specialize_at_zeta()).unwrap();
            let local = local_series(ty(t), n).unwrap();
            assert_eq!(&special, local.integer_series().unwrap(), "{t}");
        }
    }

    #[test]
    fn specialization_at_one() {
        let a1 = character("A1", 4).specialize_at_one();
        assert_eq!(a1, IntSeries::from_i64s(&[1, 4, 9, 20, 42]));
        let a2 = character("A2", 1).specialize_at_one();
        assert_eq!(a2, IntSeries::from_i64s(&[1, 9]));
        for t in ["A3", "D5"] {
            let dt = ty(t);
            let n = 8;
            let expected = euler_factor_inverse_power(dt.rank() as u32 + 1, n)
                .mul(&theta_untwisted(dt, n).unwrap())
                .unwrap();
            assert_eq!(character(t, n).specialize_at_one(), expected);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = Budget {
            max_character_terms: 100,
            ..Budget::default()
        };
        assert!(matches!(
            extended_character(ty("E8"), 3, &tiny),
            Err(CharacterError::Budget { .. })
        ));
    }

    #[test]
    fn json_layout() {
        let v = character("A1", 1).to_json();
        assert_eq!(
            v,
            serde_json::json!({
                "type": "A1",
                "truncation": 1,
                "coeffs": [
                    [{"beta": [0], "mult": "1"}],
                    [{"beta": [-1], "mult": "1"}, {"beta": [0], "mult": "2"}, {"beta": [1], "mult": "1"}]
                ]
            })
        );
    }

    #[test]
    fn stored_term_count() {
        let sizes = [1u64, 2, 0, 0, 2];
        assert_eq!(stored_terms(&sizes), 5);
        let c = character("A1", 4);
        assert_eq!(c.support_len() as u64, stored_terms(&sizes));
        assert_eq!(c.coefficient(4).unwrap().len(), 5);
    }
}
