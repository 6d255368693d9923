//! Brute-force ground truth, kept independent of the series code paths.
//!
//! * colored partition counts by coin-change dynamic programming;
//! * torus-fixed points of `Hilb^m(C^2/Z_r)`, i.e. monomial ideals of finite
//!   colength in the invariant ring `C[x, y]^{Z_r}`, counted as finite
//!   co-ideals of the invariant exponent semigroup
//!   `{(a, b) in N^2 : a ≡ b mod r}`.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::qseries::{IntSeries, QSeries, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("semigroup modulus must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
}

/// Number of `e`-tuples of partitions of total size `k`.
pub fn count_colored_partitions(k: usize, e: u32) -> BigInt {
    let mut dp = vec![BigInt::zero(); k + 1];
    dp[0] = BigInt::one();
    for _ in 0..e {
        for part in 1..=k {
            for s in part..=k {
                let prev = dp[s - part].clone();
                dp[s] += prev;
            }
        }
    }
    dp[k].clone()
}

pub fn count_partitions(k: usize) -> BigInt {
    count_colored_partitions(k, 1)
}

pub type Exponent = (u32, u32);

/// Exponents `(a, b)` of the `Z_r`-invariant monomials `x^a y^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantSemigroup {
    r: u32,
}

impl InvariantSemigroup {
    pub fn new(r: u32) -> Result<Self, OracleError> {
        if r < 2 {
            return Err(OracleError::BadModulus(r));
        }
        Ok(InvariantSemigroup { r })
    }

    pub fn modulus(&self) -> u32 {
        self.r
    }

    pub fn contains(&self, (a, b): Exponent) -> bool {
        (a as i64 - b as i64).rem_euclid(self.r as i64) == 0
    }

    /// Minimal generators `xy`, `x^r`, `y^r`.
    pub fn generators(&self) -> [Exponent; 3] {
        [(1, 1), (self.r, 0), (0, self.r)]
    }

    /// `t ≼ s` iff `s - t` lies in the semigroup.
    pub fn divides(&self, t: Exponent, s: Exponent) -> bool {
        t.0 <= s.0 && t.1 <= s.1 && self.contains((s.0 - t.0, s.1 - t.1))
    }

    /// `s - g` for each generator `g` with `s - g` in the semigroup; these
    /// are the lower covers that downward closure has to check.
    fn predecessors(&self, s: Exponent) -> impl Iterator<Item = Exponent> + '_ {
        self.generators()
            .into_iter()
            .filter(move |g| g.0 <= s.0 && g.1 <= s.1)
            .map(move |g| (s.0 - g.0, s.1 - g.1))
    }
}

/// Canonical linear extension of the divisibility order: total degree, then `a`.
fn canonical_key(s: Exponent) -> (u32, u32) {
    (s.0 + s.1, s.0)
}

/// Finite downward-closed subset of an [`InvariantSemigroup`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoIdeal {
    pub elements: BTreeSet<Exponent>,
}

impl CoIdeal {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Full re-check: every semigroup divisor of every element is present.
    pub fn is_downward_closed(&self, sg: &InvariantSemigroup) -> bool {
        self.elements.iter().all(|&s| {
            sg.contains(s)
                && (0..=s.0).all(|a| {
                    (0..=s.1).all(|b| !sg.divides((a, b), s) || self.elements.contains(&(a, b)))
                })
        })
    }
}

/// Depth-first search adding elements in strictly increasing canonical
/// order, so every co-ideal is produced exactly once (by listing it along the
/// linear extension).
struct CoIdealSearch<'a, F> {
    sg: InvariantSemigroup,
    target: usize,
    nodes: u64,
    max_nodes: u64,
    current: Vec<Exponent>,
    members: HashSet<Exponent>,
    on_leaf: &'a mut F,
}

impl<F: FnMut(&[Exponent])> CoIdealSearch<'_, F> {
    fn run(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(OracleError::Budget(self.max_nodes));
        }
        if self.current.len() == self.target {
            (self.on_leaf)(&self.current);
            return Ok(());
        }
        let last = self.current.last().map(|&s| canonical_key(s));
        let mut candidates: BTreeSet<(u32, u32)> = BTreeSet::new();
        if self.current.is_empty() {
            candidates.insert(canonical_key((0, 0)));
        }
        for &s in &self.current {
            for g in self.sg.generators() {
                let c = (s.0 + g.0, s.1 + g.1);
                let key = canonical_key(c);
                if Some(key) > last
                    && !self.members.contains(&c)
                    && self.sg.predecessors(c).all(|p| self.members.contains(&p))
                {
                    candidates.insert(key);
                }
            }
        }
        for (deg, a) in candidates {
            let c = (a, deg - a);
            self.current.push(c);
            self.members.insert(c);
            self.run()?;
            self.members.remove(&c);
            self.current.pop();
        }
        Ok(())
    }
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

fn search<F: FnMut(&[Exponent])>(
    r: u32,
    m: usize,
    max_nodes: u64,
    on_leaf: &mut F,
) -> Result<(), OracleError> {
    let sg = InvariantSemigroup::new(r)?;
    let mut s = CoIdealSearch {
        sg,
        target: m,
        nodes: 0,
        max_nodes,
        current: Vec::with_capacity(m),
        members: HashSet::new(),
        on_leaf,
    };
    s.run()
}

/// Number of monomial ideals of colength `m` in `C[x, y]^{Z_r}`.
pub fn count_typea_fixed_ideals(r: u32, m: usize) -> Result<u64, OracleError> {
    count_typea_fixed_ideals_with_budget(r, m, DEFAULT_SEARCH_BUDGET)
}

pub fn count_typea_fixed_ideals_with_budget(
    r: u32,
    m: usize,
    max_nodes: u64,
) -> Result<u64, OracleError> {
    let mut count = 0u64;
    search(r, m, max_nodes, &mut |_| count += 1)?;
    Ok(count)
}

/// Every co-ideal of size `m`, materialized.
pub fn enumerate_typea_coideals(r: u32, m: usize) -> Result<Vec<CoIdeal>, OracleError> {
    let mut out = Vec::new();
    search(r, m, DEFAULT_SEARCH_BUDGET, &mut |elems| {
        out.push(CoIdeal {
            elements: elems.iter().copied().collect(),
        })
    })?;
    Ok(out)
}

/// Exponential reference count: all `m`-subsets of the semigroup elements of
/// total degree `<= r (m - 1)` (a chain of `m` elements from the origin climbs
/// at most `r` in degree per step), filtered by downward closure.
pub fn reference_count_by_subsets(r: u32, m: usize) -> Result<u64, OracleError> {
    let sg = InvariantSemigroup::new(r)?;
    if m == 0 {
        return Ok(1);
    }
    let max_deg = r * (m as u32 - 1);
    let mut pool: Vec<Exponent> = Vec::new();
    for d in 0..=max_deg {
        for a in 0..=d {
            if sg.contains((a, d - a)) {
                pool.push((a, d - a));
            }
        }
    }
    // the origin belongs to every nonempty co-ideal
    let rest: Vec<Exponent> = pool.into_iter().filter(|&s| s != (0, 0)).collect();
    let mut count = 0u64;
    let mut chosen = vec![(0u32, 0u32)];
    fn choose(
        rest: &[Exponent],
        start: usize,
        need: usize,
        chosen: &mut Vec<Exponent>,
        sg: &InvariantSemigroup,
        count: &mut u64,
    ) {
        if need == 0 {
            let c = CoIdeal {
                elements: chosen.iter().copied().collect(),
            };
            if c.is_downward_closed(sg) {
                *count += 1;
            }
            return;
        }
        for i in start..rest.len() {
            if rest.len() - i < need {
                break;
            }
            chosen.push(rest[i]);
            choose(rest, i + 1, need - 1, chosen, sg, count);
            chosen.pop();
        }
    }
    choose(&rest, 0, m - 1, &mut chosen, &sg, &mut count);
    Ok(count)
}

/// `Σ_m count_typea_fixed_ideals(r, m) q^m` up to `q^max_m`.
pub fn typea_series_oracle(r: u32, max_m: usize) -> Result<IntSeries, OracleError> {
    let coeffs = (0..=max_m)
        .map(|m| count_typea_fixed_ideals(r, m).map(BigInt::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QSeries::from_coeffs(Ring::Integer, coeffs).expect("integer coefficients"))
}
