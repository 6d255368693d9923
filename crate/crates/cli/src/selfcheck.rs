//! Desk-scale invariant suite behind the `selfcheck` subcommand.

use kleinhilb::character::extended_character;
use kleinhilb::cyclotomic::{zeta_power, CyclotomicInteger};
use kleinhilb::lattice_theta::{enumerate_vectors, residue_shells, theta_untwisted, GramMatrix};
use kleinhilb::lie_data::{cartan_matrix, DynkinType};
use kleinhilb::oracle::{count_colored_partitions, typea_series_oracle};
use kleinhilb::qseries::{demote_to_integer, euler_factor_inverse_power};
use kleinhilb::zeta_series::{local_series, stratification_check, Budget, SurfaceSpec};

use crate::commands::CheckOutcome;

fn types(list: &str) -> Vec<DynkinType> {
    list.split(',')
        .map(|s| s.parse().expect("built-in type list"))
        .collect()
}

/// Every integer vector with `x^T G x <= bound`, by scanning the box
/// `|x_i| <= sqrt(bound · (G^{-1})_{ii})`.
pub fn box_enumeration(gram: &GramMatrix, bound: i64) -> Vec<Vec<i64>> {
    let n = gram.rank();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| gram.get(i, j) as f64).collect();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = a[c][c];
        for x in a[c].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let pivot = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot) {
                    *x -= f * y;
                }
            }
        }
    }
    let radius: Vec<i64> = (0..n)
        .map(|i| (bound as f64 * a[i][n + i]).sqrt().floor() as i64 + 1)
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        if gram.norm(&x) <= bound {
            out.push(x.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if x[i] < radius[i] {
                x[i] += 1;
                break;
            }
            x[i] = -radius[i];
            i += 1;
        }
    }
}

fn enumeration_complete() -> bool {
    types("A1,A2,A3,A4,D4").into_iter().all(|t| {
        let g = GramMatrix::from(&cartan_matrix(t));
        (0..=10).all(|b| enumerate_vectors(&g, b).map(|e| e.vectors) == Ok(box_enumeration(&g, b)))
    })
}

fn norms_even() -> bool {
    types("A1,A2,A3,A4,A5,A6,A7,A8,D4,D5,D6,D7,D8,E6,E7,E8")
        .into_iter()
        .all(|t| residue_shells(&cartan_matrix(t), 8, 1).is_ok())
}

fn sample(m: u64, seed: i64) -> CyclotomicInteger {
    let coeffs = (0..m as i64)
        .map(|i| ((seed * 31 + i * 17) % 7 - 3).into())
        .collect();
    CyclotomicInteger::from_coeffs(m, coeffs)
}

fn ring_axioms() -> bool {
    [3u64, 4, 7, 12, 31].into_iter().all(|m| {
        (0..6).all(|s| {
            let (a, b, c) = (sample(m, s), sample(m, s + 11), sample(m, 2 * s + 5));
            let ab = a.try_mul(&b).unwrap();
            let assoc = ab.try_mul(&c) == a.try_mul(&b.try_mul(&c).unwrap());
            let comm = ab == b.try_mul(&a).unwrap();
            let dist = a.try_mul(&b.try_add(&c).unwrap()).unwrap()
                == ab.try_add(&a.try_mul(&c).unwrap()).unwrap();
            let (re, im) = ab.evaluate();
            let ((ar, ai), (br, bi)) = (a.evaluate(), b.evaluate());
            let numeric =
                (re - (ar * br - ai * bi)).abs() < 1e-6 && (im - (ar * bi + ai * br)).abs() < 1e-6;
            assoc && comm && dist && numeric
        }) && zeta_power(m, m as i64) == CyclotomicInteger::one(m)
    })
}

fn euler_matches_partitions() -> bool {
    (0..=9).all(|e| {
        let s = euler_factor_inverse_power(e, 20);
        (0..=20).all(|k| s.coeffs()[k] == count_colored_partitions(k, e))
    })
}

fn type_a_oracle() -> bool {
    (2..=3).all(|r| {
        let t = DynkinType::a(r as usize - 1).unwrap();
        let formula = local_series(t, 6).ok().and_then(|l| l.series);
        formula.is_some() && formula == typea_series_oracle(r, 6).ok()
    })
}

fn e8_theta() -> bool {
    let t = DynkinType::e(8).unwrap();
    theta_untwisted(t, 3).map(|s| {
        s.coeffs()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
    }) == Ok(vec!["1".into(), "240".into(), "2160".into(), "6720".into()])
}

fn small_integrality() -> bool {
    types("A1,A2,A3,A4,A5,A6,A7,A8,D4,D5,D6,D7,D8,E6,E7,E8")
        .into_iter()
        .all(|t| {
            local_series(t, 10)
                .map(|l| l.certificate.ok)
                .unwrap_or(false)
        })
}

fn first_coefficients() -> bool {
    types("A1,A5,A12,D4,D9,D12,E6,E7,E8").into_iter().all(|t| {
        local_series(t, 1)
            .ok()
            .and_then(|l| l.series)
            .is_some_and(|s| s.coeffs().iter().all(|c| *c == 1.into()))
    })
}

fn specialization() -> bool {
    [("A2", 8), ("D4", 6), ("E6", 4)]
        .into_iter()
        .all(|(name, n)| {
            let t: DynkinType = name.parse().unwrap();
            let Ok(c) = extended_character(t, n, &Budget::default()) else {
                return false;
            };
            let special = demote_to_integer(&c.specialize_at_zeta()).ok();
            let frenkel_kac = euler_factor_inverse_power(t.rank() as u32 + 1, n)
                .mul(&theta_untwisted(t, n).unwrap())
                .ok();
            special.is_some()
                && special == local_series(t, n).ok().and_then(|l| l.series)
                && frenkel_kac == Some(c.specialize_at_one())
        })
}

fn stratification() -> bool {
    let spec = SurfaceSpec::new(1, types("A1,A2"));
    stratification_check(&spec, 6).unwrap_or(false)
}

type Check = (&'static str, fn() -> bool);

pub fn run_all() -> Vec<CheckOutcome> {
    let checks: [Check; 10] = [
        (
            "enumeration completeness (rank <= 4, bound <= 10)",
            enumeration_complete,
        ),
        ("even norms (rank <= 8, bound <= 16)", norms_even),
        ("cyclotomic ring axioms", ring_axioms),
        (
            "Euler powers vs colored partitions",
            euler_matches_partitions,
        ),
        (
            "type A formula vs fixed-point oracle (r <= 3, m <= 6)",
            type_a_oracle,
        ),
        ("E8 theta series", e8_theta),
        ("integrality to q^10", small_integrality),
        ("first coefficients equal 1", first_coefficients),
        ("character specializations", specialization),
        ("support stratification", stratification),
    ];
    checks
        .into_iter()
        .map(|(name, f)| CheckOutcome {
            name: name.to_string(),
            ok: f(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_enumeration_small_cases() {
        let a1 = GramMatrix::new(vec![vec![2]]).unwrap();
        assert_eq!(box_enumeration(&a1, 2), vec![vec![-1], vec![0], vec![1]]);
        let a2 = GramMatrix::from(&cartan_matrix(DynkinType::a(2).unwrap()));
        assert_eq!(box_enumeration(&a2, 2).len(), 7);
    }
}
