//! Theta series of even positive definite lattices.
//!
//! The degree-`n` theta series of a lattice with Gram matrix `Q` has
//! coefficients `a(T) = #{X ∈ ℤ^{m×n} : XᵗQX = 2T}`. They are computed by
//! listing all lattice vectors up to the required norm (exact rational
//! Cholesky pruning) and then backtracking column by column, accumulating
//! the Gram matrix of the chosen columns.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfIntegralMatrix;
use crate::matrix::QMatrix;
use crate::qexpansion::{FourierExpansion, Meta};
use crate::Rational;

/// Largest degree accepted by [`rep_numbers`].
pub const MAX_THETA_DEGREE: usize = 3;

/// Gram matrix of an even positive definite lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GramJson", into = "GramJson")]
pub struct GramLattice {
    rank: usize,
    gram: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct GramJson {
    gram: Vec<Vec<i64>>,
    rank: usize,
}

impl TryFrom<GramJson> for GramLattice {
    type Error = Error;
    fn try_from(j: GramJson) -> Result<Self> {
        if j.gram.len() != j.rank {
            return Err(Error::DimensionMismatch(format!(
                "rank {} but {} rows",
                j.rank,
                j.gram.len()
            )));
        }
        GramLattice::new(&j.gram)
    }
}

impl From<GramLattice> for GramJson {
    fn from(g: GramLattice) -> Self {
        GramJson {
            gram: g.rows(),
            rank: g.rank,
        }
    }
}

impl GramLattice {
    /// Validates symmetry, even diagonal and positive definiteness.
    pub fn new(rows: &[Vec<i64>]) -> Result<Self> {
        let rank = rows.len();
        if rows.iter().any(|r| r.len() != rank) {
            return Err(Error::NotSquare);
        }
        for i in 0..rank {
            if rows[i][i] % 2 != 0 {
                return Err(Error::OddDiagonal(i));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let lattice = GramLattice {
            rank,
            gram: rows.iter().flatten().copied().collect(),
        };
        let q = lattice.to_rational();
        let leading_ok = (1..=rank).all(|k| {
            let idx: Vec<usize> = (0..k).collect();
            q.select(&idx, &idx).det().is_positive()
        });
        if !leading_ok {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(lattice)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.rank + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|i| self.gram[i * self.rank..(i + 1) * self.rank].to_vec())
            .collect()
    }

    pub fn to_rational(&self) -> QMatrix {
        QMatrix::from_i64_rows(&self.rows())
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_rational().det();
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    /// Smallest `ℓ` with `ℓ·Q⁻¹` integral with even diagonal.
    pub fn level(&self) -> u64 {
        let inv = self
            .to_rational()
            .inverse()
            .expect("positive definite Gram matrices are invertible");
        let two = Rational::from_integer(BigInt::from(2));
        let mut level = BigInt::one();
        for i in 0..self.rank {
            for j in 0..self.rank {
                let x = if i == j {
                    inv.get(i, j) / &two
                } else {
                    inv.get(i, j).clone()
                };
                level = level.lcm(x.denom());
            }
        }
        level.to_u64().expect("level fits in u64")
    }

    /// `xᵗQx`.
    pub fn norm(&self, x: &[i64]) -> i64 {
        self.inner(x, x)
    }

    /// `xᵗQy`.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> i64 {
        let m = self.rank;
        let mut acc = 0;
        for i in 0..m {
            if x[i] == 0 {
                continue;
            }
            let row = &self.gram[i * m..(i + 1) * m];
            acc += x[i] * row.iter().zip(y).map(|(a, b)| a * b).sum::<i64>();
        }
        acc
    }

    /// All `x ∈ ℤ^m` with `xᵗQx ≤ max_norm`, sorted by norm and then
    /// lexicographically, including the zero vector.
    pub fn short_vectors(&self, max_norm: i64) -> Vec<Vec<i64>> {
        let m = self.rank;
        let chol = rational_cholesky(&self.to_rational());
        let mut out = Vec::new();
        let mut x = vec![0i64; m];
        let budget = Rational::from_integer(BigInt::from(max_norm));
        enumerate_level(&chol, m, &mut x, budget, &mut out);
        out.sort_by(|a, b| self.norm(a).cmp(&self.norm(b)).then_with(|| a.cmp(b)));
        out
    }
}

/// Rational Cholesky in Fincke–Pohst form: `xᵗQx = Σ_i d_i (x_i + Σ_{j>i} μ_ij x_j)²`.
/// Diagonal holds `d_i`, strict upper triangle holds `μ_ij`.
fn rational_cholesky(q: &QMatrix) -> QMatrix {
    let m = q.rows();
    let mut a = q.clone();
    for i in 0..m {
        for j in i + 1..m {
            let v = a.get(i, j) / a.get(i, i);
            a.set(j, i, a.get(i, j).clone());
            a.set(i, j, v);
        }
        for k in i + 1..m {
            for l in k..m {
                let v = a.get(k, l) - a.get(k, i) * a.get(i, l);
                a.set(k, l, v);
            }
        }
    }
    a
}

fn enumerate_level(chol: &QMatrix, i: usize, x: &mut Vec<i64>, budget: Rational, out: &mut Vec<Vec<i64>>) {
    if i == 0 {
        out.push(x.clone());
        return;
    }
    let i = i - 1;
    let m = chol.rows();
    let mut center = Rational::zero();
    for j in i + 1..m {
        if x[j] != 0 {
            center -= chol.get(i, j) * Rational::from_integer(BigInt::from(x[j]));
        }
    }
    let d = chol.get(i, i);
    // approximate window, widened; membership is decided exactly below
    let c = center.to_f64().unwrap_or(0.0);
    let r = (budget.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0))
        .max(0.0)
        .sqrt();
    let lo = (c - r).floor() as i64 - 1;
    let hi = (c + r).ceil() as i64 + 1;
    for v in lo..=hi {
        let diff = Rational::from_integer(BigInt::from(v)) - &center;
        let used = d * &diff * &diff;
        if used > budget {
            continue;
        }
        x[i] = v;
        enumerate_level(chol, i, x, &budget - &used, out);
    }
    x[i] = 0;
}

/// Root lattice `A_m`: 2 on the diagonal, −1 next to it.
pub fn gram_a(m: usize) -> GramLattice {
    assert!(m >= 1, "A_m needs m >= 1");
    let rows: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    GramLattice::new(&rows).expect("A_m is even and positive definite")
}

/// Orthogonal direct sum.
pub fn direct_sum(a: &GramLattice, b: &GramLattice) -> GramLattice {
    let m = a.rank + b.rank;
    let rows: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match (i < a.rank, j < a.rank) {
                    (true, true) => a.entry(i, j),
                    (false, false) => b.entry(i - a.rank, j - a.rank),
                    _ => 0,
                })
                .collect()
        })
        .collect();
    GramLattice::new(&rows).expect("direct sum of even positive definite lattices")
}

/// The `p`-special lattice pair `A_{p−1} ⊕ A_{p−1}` (rank `2p−2`,
/// determinant `p²`).
pub fn p_special_double(p: u64) -> GramLattice {
    let a = gram_a(p as usize - 1);
    direct_sum(&a, &a)
}

/// The order-`(m+1)` automorphism of `A_m` induced by cycling the
/// coordinates of `ℤ^{m+1}`, written in the simple-root basis.
pub fn a_cycle_automorphism(m: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0i64; m]; m];
    for i in 0..m.saturating_sub(1) {
        s[i + 1][i] = 1;
    }
    for row in s.iter_mut() {
        row[m - 1] = -1;
    }
    s
}

/// Checks that `sigma` is an automorphism of `Q` of exact order `p`
/// (`sigma^p = 1`, `sigma ≠ 1`) without nonzero fixed vectors.
pub fn is_p_special_witness(q: &GramLattice, sigma: &[Vec<i64>], p: u64) -> Result<bool> {
    let m = q.rank;
    if sigma.len() != m || sigma.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch(format!("automorphism must be {m}x{m}")));
    }
    let s = QMatrix::from_i64_rows(sigma);
    let qm = q.to_rational();
    if &(&s.transpose() * &qm) * &s != qm {
        return Ok(false);
    }
    let id = QMatrix::identity(m);
    if s == id {
        return Ok(false);
    }
    let mut power = id.clone();
    for _ in 0..p {
        power = &power * &s;
    }
    if power != id {
        return Ok(false);
    }
    Ok(!(&s - &id).det().is_zero())
}

/// Degree-`n` theta series `Σ_T #{X : XᵗQX = 2T} q^T` up to trace `bound`.
pub fn rep_numbers(q: &GramLattice, n: usize, bound: u64) -> Result<FourierExpansion> {
    if n == 0 || n > MAX_THETA_DEGREE {
        return Err(Error::Unsupported(format!(
            "theta degree {n} (supported: 1..={MAX_THETA_DEGREE})"
        )));
    }
    let bound_i = i64::try_from(bound).map_err(|_| Error::Unsupported("trace bound".into()))?;
    let vectors = q.short_vectors(2 * bound_i);
    let norms: Vec<i64> = vectors.iter().map(|v| q.norm(v)).collect();

    let counts: HashMap<Vec<i64>, u64> = (0..vectors.len())
        .into_par_iter()
        .fold(HashMap::new, |mut acc, first| {
            let mut cols = Vec::with_capacity(n);
            cols.push(first);
            extend_columns(q, &vectors, &norms, n, 2 * bound_i - norms[first], &mut cols, &mut acc);
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let mut theta = FourierExpansion::from_scalars(
        n,
        bound,
        counts.into_iter().map(|(key, c)| {
            (
                HalfIntegralMatrix::from_flat_unchecked(n, key),
                Rational::from_integer(BigInt::from(c)),
            )
        }),
    )?;
    *theta.meta_mut() = Meta {
        weight: Some(Rational::new(BigInt::from(q.rank), BigInt::from(2))),
        level: Some(q.level()),
        character: None,
    };
    Ok(theta)
}

fn extend_columns(
    q: &GramLattice,
    vectors: &[Vec<i64>],
    norms: &[i64],
    n: usize,
    budget: i64,
    cols: &mut Vec<usize>,
    acc: &mut HashMap<Vec<i64>, u64>,
) {
    if cols.len() == n {
        let mut key = vec![0i64; n * n];
        for i in 0..n {
            key[i * n + i] = norms[cols[i]];
            for j in i + 1..n {
                let v = q.inner(&vectors[cols[i]], &vectors[cols[j]]);
                key[i * n + j] = v;
                key[j * n + i] = v;
            }
        }
        *acc.entry(key).or_insert(0) += 1;
        return;
    }
    for (idx, &norm) in norms.iter().enumerate() {
        if norm > budget {
            break;
        }
        cols.push(idx);
        extend_columns(q, vectors, norms, n, budget - norm, cols, acc);
        cols.pop();
    }
}

/// `𝒦_{p−1} = pⁿ·θⁿ_{A_{p−1}⊕A_{p−1}}`. Its defining cusp conditions are not
/// checked here.
pub fn k_form(p: u64, n: usize, bound: u64) -> Result<FourierExpansion> {
    let theta = rep_numbers(&p_special_double(p), n, bound)?;
    let scale = Rational::from_integer(BigInt::from(p).pow(n as u32));
    Ok(theta.scale(&scale))
}
