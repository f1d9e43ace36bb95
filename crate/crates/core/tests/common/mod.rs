//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::Rng;
use siegel_core::halfint::{enumerate_lambda, HalfIntegralMatrix};
use siegel_core::theta::GramLattice;
use siegel_core::{FourierExpansion, QMatrix, Rational};

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Random scalar expansion with integer coefficients in `[-range, range]`
/// on every `T` up to `bound`; the constant term is forced to `constant`
/// when given.
pub fn random_expansion<R: Rng>(
    rng: &mut R,
    degree: usize,
    bound: u64,
    range: i64,
    constant: Option<i64>,
) -> FourierExpansion {
    let keys = enumerate_lambda(degree, bound).unwrap();
    FourierExpansion::from_scalars(
        degree,
        bound,
        keys.into_iter().map(|t| {
            let c = match constant {
                Some(c) if t.is_zero() => c,
                _ => rng.gen_range(-range..=range),
            };
            (t, q(c))
        }),
    )
    .unwrap()
}

/// Random integer matrix with entries in `[-range, range]`.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, range: i64) -> QMatrix {
    QMatrix::from_fn(n, n, |_, _| q(rng.gen_range(-range..=range)))
}

/// Random symmetric rational matrix with small numerators and denominators.
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = Rational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(rng.gen_range(1..=3)));
            m.set(i, j, x.clone());
            m.set(j, i, x);
        }
    }
    m
}

/// Naive theta oracle: every `X ∈ ℤ^{m×n}` inside the box
/// `|x_i| ≤ ⌊√(2N·(Q⁻¹)_ii)⌋`, which contains all vectors of norm `≤ 2N`.
pub fn naive_rep_numbers(q_lat: &GramLattice, n: usize, bound: u64) -> HashMap<Vec<i64>, u64> {
    let m = q_lat.rank();
    let inv = q_lat.to_rational().inverse().unwrap();
    let max_norm = 2 * bound as i64;
    let box_bound: Vec<i64> = (0..m)
        .map(|i| {
            let lim = inv.get(i, i) * q(max_norm);
            let mut b = 0i64;
            while q((b + 1) * (b + 1)) <= lim {
                b += 1;
            }
            b
        })
        .collect();
    let mut column_pool: Vec<Vec<i64>> = vec![vec![]];
    for b in &box_bound {
        column_pool = column_pool
            .into_iter()
            .flat_map(|prefix| {
                (-b..=*b).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let column_pool: Vec<Vec<i64>> = column_pool.into_iter().filter(|x| q_lat.norm(x) <= max_norm).collect();

    let mut counts = HashMap::new();
    let mut idx = vec![0usize; n];
    let total = column_pool.len().pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for slot in idx.iter_mut() {
            *slot = c % column_pool.len();
            c /= column_pool.len();
        }
        let cols: Vec<&Vec<i64>> = idx.iter().map(|&i| &column_pool[i]).collect();
        let trace2: i64 = cols.iter().map(|x| q_lat.norm(x)).sum();
        if trace2 > max_norm {
            continue;
        }
        let mut key = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                key[i * n + j] = q_lat.inner(cols[i], cols[j]);
            }
        }
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

/// Compares a theta expansion with a count map keyed by row-major `2T`.
pub fn matches_counts(theta: &FourierExpansion, counts: &HashMap<Vec<i64>, u64>) -> bool {
    let n = theta.degree();
    let from_theta: HashMap<Vec<i64>, Rational> = theta
        .iter()
        .map(|(t, b)| (t.doubled_entries().to_vec(), b.get(0, 0).clone()))
        .collect();
    from_theta.len() == counts.len()
        && counts.iter().all(|(k, &c)| {
            let t = HalfIntegralMatrix::from_doubled(&k.chunks(n).map(<[i64]>::to_vec).collect::<Vec<_>>()).unwrap();
            theta.scalar_coeff(&t) == q(c as i64)
        })
}
