//! Simply-laced Dynkin data: types, Cartan matrices, positive roots and
//! Coxeter numbers.
//!
//! Nodes follow the Bourbaki labeling (zero-based in code):
//!
//! ```text
//! A_n:  1 - 2 - ... - n
//! D_n:  1 - 2 - ... - (n-2) < (n-1), n
//! E_n:  1 - 3 - 4 - 5 - ... - n
//!               |
//!               2
//! ```

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("invalid Dynkin type {series}{rank}: {reason}")]
    InvalidType {
        series: Series,
        rank: usize,
        reason: &'static str,
    },
    #[error("cannot parse Dynkin type from {0:?}")]
    Parse(String),
    #[error("not a simply-laced Cartan matrix: {0}")]
    NotCartan(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Series {
    A,
    D,
    E,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Series::A => 'A',
            Series::D => 'D',
            Series::E => 'E',
        };
        write!(f, "{c}")
    }
}

/// An irreducible simply-laced Dynkin diagram, e.g. `A1`, `D4`, `E8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DynkinType {
    series: Series,
    rank: usize,
}

impl DynkinType {
    pub fn new(series: Series, rank: usize) -> Result<Self, LieError> {
        let reason = match series {
            Series::A if rank < 1 => Some("type A needs rank >= 1"),
            Series::D if rank < 4 => Some("type D needs rank >= 4"),
            Series::E if !(6..=8).contains(&rank) => Some("type E needs rank 6, 7 or 8"),
            _ => None,
        };
        match reason {
            Some(reason) => Err(LieError::InvalidType {
                series,
                rank,
                reason,
            }),
            None => Ok(DynkinType { series, rank }),
        }
    }

    pub fn a(rank: usize) -> Result<Self, LieError> {
        Self::new(Series::A, rank)
    }

    pub fn d(rank: usize) -> Result<Self, LieError> {
        Self::new(Series::D, rank)
    }

    pub fn e(rank: usize) -> Result<Self, LieError> {
        Self::new(Series::E, rank)
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Edges of the Dynkin diagram as zero-based node pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.series {
            Series::A => (1..n).map(|i| (i - 1, i)).collect(),
            Series::D => {
                let mut edges: Vec<_> = (1..n - 1).map(|i| (i - 1, i)).collect();
                edges.push((n - 3, n - 1));
                edges
            }
            Series::E => {
                let mut edges = vec![(0, 2), (1, 3)];
                edges.extend((3..n).map(|i| (i - 1, i)));
                edges
            }
        }
    }

    /// All A up to `max_a`, all D up to `max_d`, then E6, E7, E8.
    pub fn all_up_to(max_a: usize, max_d: usize) -> Vec<DynkinType> {
        let mut out: Vec<_> = (1..=max_a)
            .map(|r| DynkinType {
                series: Series::A,
                rank: r,
            })
            .collect();
        out.extend((4..=max_d).map(|r| DynkinType {
            series: Series::D,
            rank: r,
        }));
        out.extend((6..=8).map(|r| DynkinType {
            series: Series::E,
            rank: r,
        }));
        out
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series, self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = LieError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        let series = match chars.next() {
            Some('A') | Some('a') => Series::A,
            Some('D') | Some('d') => Series::D,
            Some('E') | Some('e') => Series::E,
            _ => return Err(LieError::Parse(s.to_string())),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(LieError::Parse(s.to_string()));
        }
        let rank = digits.parse().map_err(|_| LieError::Parse(s.to_string()))?;
        DynkinType::new(series, rank)
    }
}

impl Serialize for DynkinType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DynkinType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Symmetric positive-definite Cartan matrix of a simply-laced root system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CartanMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl CartanMatrix {
    /// Validates symmetry, diagonal 2, off-diagonal in {0, -1} and positive
    /// definiteness.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, LieError> {
        let n = rows.len();
        if n == 0 {
            return Err(LieError::NotCartan("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LieError::NotCartan(format!(
                    "row {i} has length {}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let m = CartanMatrix { n, entries };
        for i in 0..n {
            if m.get(i, i) != 2 {
                return Err(LieError::NotCartan(format!("diagonal entry {i} is not 2")));
            }
            for j in 0..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(LieError::NotCartan(format!("not symmetric at ({i}, {j})")));
                }
                if i != j && !matches!(m.get(i, j), 0 | -1) {
                    return Err(LieError::NotCartan(format!(
                        "off-diagonal entry ({i}, {j}) = {}",
                        m.get(i, j)
                    )));
                }
            }
        }
        if !m.leading_minors().iter().all(|&d| d > 0) {
            return Err(LieError::NotCartan("not positive definite".into()));
        }
        Ok(m)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `x^T C y`.
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let mut acc = 0;
        for (i, xi) in x.iter().enumerate() {
            let row = &self.entries[i * self.n..(i + 1) * self.n];
            let cy: i64 = row.iter().zip(y).map(|(c, v)| c * v).sum();
            acc += xi * cy;
        }
        acc
    }

    /// `x^T C x`.
    pub fn norm(&self, x: &[i64]) -> i64 {
        self.pairing(x, x)
    }

    /// Leading principal minors, computed exactly by fraction-free elimination.
    pub fn leading_minors(&self) -> Vec<i128> {
        leading_minors(self.n, &self.entries)
    }

    pub fn determinant(&self) -> i128 {
        *self.leading_minors().last().unwrap()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.leading_minors().iter().all(|&d| d > 0)
    }
}

/// Bareiss elimination; returns the k x k leading minors for k = 1..=n.
pub(crate) fn leading_minors(n: usize, entries: &[i64]) -> Vec<i128> {
    let mut a: Vec<i128> = entries.iter().map(|&x| x as i128).collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = 1i128;
    for k in 0..n {
        let pivot = a[k * n + k];
        minors.push(pivot);
        if pivot == 0 {
            // A zero leading minor already rules out definiteness; stop here.
            minors.resize(n, 0);
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * pivot - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = pivot;
    }
    minors
}

pub fn cartan_matrix(t: DynkinType) -> CartanMatrix {
    let n = t.rank();
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        entries[i * n + i] = 2;
    }
    for (i, j) in t.edges() {
        entries[i * n + j] = -1;
        entries[j * n + i] = -1;
    }
    CartanMatrix { n, entries }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDatum {
    pub positive_roots: Vec<Vec<i64>>,
    pub highest_root: Vec<i64>,
    pub coxeter_number: u64,
}

/// Grows the positive roots from the simple roots: for a simply-laced
/// system, `beta + alpha_i` is a root iff it has norm 2, and every positive
/// root is reached by such a chain.
pub fn root_datum(c: &CartanMatrix) -> Result<RootDatum, LieError> {
    if !c.is_positive_definite() {
        return Err(LieError::NotCartan("not positive definite".into()));
    }
    let n = c.rank();
    let simple: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut seen: BTreeSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut queue: VecDeque<Vec<i64>> = simple.into_iter().collect();
    while let Some(beta) = queue.pop_front() {
        for i in 0..n {
            let mut next = beta.clone();
            next[i] += 1;
            if c.norm(&next) == 2 && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut positive_roots: Vec<Vec<i64>> = seen.into_iter().collect();
    positive_roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));

    let highest_root = positive_roots
        .last()
        .cloned()
        .expect("at least one simple root");
    // The highest root dominates every positive root coordinatewise.
    if positive_roots
        .iter()
        .any(|r| r.iter().zip(&highest_root).any(|(a, b)| a > b))
    {
        return Err(LieError::NotCartan(
            "no unique highest root (reducible diagram?)".into(),
        ));
    }
    let coxeter_number = 1 + highest_root.iter().sum::<i64>() as u64;
    Ok(RootDatum {
        positive_roots,
        highest_root,
        coxeter_number,
    })
}

/// Dual Coxeter number h∨ (equal to the Coxeter number for simply-laced types).
pub fn coxeter_number(t: DynkinType) -> u64 {
    root_datum(&cartan_matrix(t))
        .expect("classified Cartan matrices are positive definite")
        .coxeter_number
}

/// Order `1 + h∨` of the root of unity used in the twisted lattice sum.
pub fn zeta_order(t: DynkinType) -> u64 {
    1 + coxeter_number(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["A1", "A30", "D4", "D12", "E6", "E7", "E8"] {
            assert_eq!(s.parse::<DynkinType>().unwrap().to_string(), s);
        }
        for bad in ["", "A", "A0", "D3", "E5", "E9", "B2", "A-1", "A 1", "A1x"] {
            assert!(bad.parse::<DynkinType>().is_err(), "{bad}");
        }
        let json = serde_json::to_string(&DynkinType::e(8).unwrap()).unwrap();
        assert_eq!(json, "\"E8\"");
        let back: DynkinType = serde_json::from_str(&json).unwrap();
        assert_eq!(back, DynkinType::e(8).unwrap());
    }

    #[test]
    fn small_cartan_matrices() {
        assert_eq!(
            cartan_matrix(DynkinType::a(1).unwrap()).rows(),
            vec![vec![2]]
        );
        assert_eq!(
            cartan_matrix(DynkinType::a(2).unwrap()).rows(),
            vec![vec![2, -1], vec![-1, 2]]
        );
        let d4 = cartan_matrix(DynkinType::d(4).unwrap());
        // node 2 (index 1) is the trivalent node
        for j in [0, 2, 3] {
            assert_eq!(d4.get(1, j), -1);
        }
        assert_eq!(d4.get(0, 2), 0);
        assert_eq!(d4.get(0, 3), 0);
        assert_eq!(d4.get(2, 3), 0);
    }

    #[test]
    fn e8_has_branch_at_node_four() {
        let e8 = cartan_matrix(DynkinType::e(8).unwrap());
        let neighbours: Vec<usize> = (0..8).filter(|&j| e8.get(3, j) == -1).collect();
        assert_eq!(neighbours, vec![1, 2, 4]);
        assert_eq!(e8.determinant(), 1);
    }

    #[test]
    fn determinants() {
        for n in 1..=10 {
            assert_eq!(
                cartan_matrix(DynkinType::a(n).unwrap()).determinant(),
                n as i128 + 1
            );
        }
        for n in 4..=10 {
            assert_eq!(cartan_matrix(DynkinType::d(n).unwrap()).determinant(), 4);
        }
        for n in 6..=8 {
            assert_eq!(
                cartan_matrix(DynkinType::e(n).unwrap()).determinant(),
                9 - n as i128
            );
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(CartanMatrix::new(vec![vec![2, -1], vec![0, 2]]).is_err());
        assert!(CartanMatrix::new(vec![vec![2, -2], vec![-2, 2]]).is_err());
        // affine A2 (triangle) is only positive semidefinite
        let tri = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]];
        assert!(matches!(
            CartanMatrix::new(tri),
            Err(LieError::NotCartan(_))
        ));
        assert!(CartanMatrix::new(vec![vec![2, -1], vec![-1, 2]]).is_ok());
    }

    #[test]
    fn root_data_examples() {
        let a1 = root_datum(&cartan_matrix(DynkinType::a(1).unwrap())).unwrap();
        assert_eq!(a1.positive_roots, vec![vec![1]]);
        assert_eq!(a1.highest_root, vec![1]);
        assert_eq!(a1.coxeter_number, 2);

        let d4 = root_datum(&cartan_matrix(DynkinType::d(4).unwrap())).unwrap();
        assert_eq!(d4.positive_roots.len(), 12);
        assert_eq!(d4.highest_root, vec![1, 2, 1, 1]);
        assert_eq!(d4.coxeter_number, 6);

        let e8 = root_datum(&cartan_matrix(DynkinType::e(8).unwrap())).unwrap();
        assert_eq!(e8.positive_roots.len(), 120);
        assert_eq!(e8.highest_root, vec![2, 3, 4, 6, 5, 4, 3, 2]);
        assert_eq!(e8.coxeter_number, 30);
    }

    #[test]
    fn zeta_orders() {
        assert_eq!(zeta_order(DynkinType::a(1).unwrap()), 3);
        assert_eq!(zeta_order(DynkinType::d(4).unwrap()), 7);
        assert_eq!(zeta_order(DynkinType::e(8).unwrap()), 31);
    }

    #[test]
    fn root_invariants_for_all_small_types() {
        for t in DynkinType::all_up_to(8, 8) {
            let c = cartan_matrix(t);
            assert!(c.is_positive_definite(), "{t}");
            let rd = root_datum(&c).unwrap();
            for r in &rd.positive_roots {
                assert_eq!(c.norm(r), 2);
                assert!(r.iter().all(|&x| x >= 0));
            }
            let n = t.rank() as u64;
            assert_eq!(
                rd.positive_roots.len() as u64 * 2,
                n * rd.coxeter_number,
                "{t}"
            );
        }
    }
}
