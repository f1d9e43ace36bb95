//! Half-integral symmetric matrices, the index set of Siegel Fourier
//! expansions, together with compound (minor) matrices.
//!
//! A matrix `T` with integral diagonal and half-integral off-diagonal
//! entries is stored through its doubled form `D = 2T`, which is an integer
//! symmetric matrix with even diagonal. This keeps hashing and ordering
//! exact without rational normalization.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::Rational;

/// Largest degree supported by [`enumerate_lambda`].
pub const MAX_DEGREE: usize = 4;

/// An element `T` of `Λ_n`, stored as the integer matrix `2T`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct HalfIntegralMatrix {
    n: usize,
    doubled: Vec<i64>,
}

impl HalfIntegralMatrix {
    /// Wraps the doubled matrix `D = 2T`. Fails unless `D` is square,
    /// symmetric and has even diagonal.
    pub fn from_doubled(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            if rows[i][i] % 2 != 0 {
                return Err(Error::OddDiagonal(i));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(HalfIntegralMatrix {
            n,
            doubled: rows.iter().flatten().copied().collect(),
        })
    }

    /// Row-major entries of `2T`; must already satisfy the invariants.
    pub(crate) fn from_flat_unchecked(n: usize, doubled: Vec<i64>) -> Self {
        debug_assert_eq!(doubled.len(), n * n);
        HalfIntegralMatrix { n, doubled }
    }

    pub fn zero(n: usize) -> Self {
        HalfIntegralMatrix {
            n,
            doubled: vec![0; n * n],
        }
    }

    /// `diag(t_1, …, t_n)`.
    pub fn diagonal(ts: &[i64]) -> Self {
        let n = ts.len();
        let mut doubled = vec![0; n * n];
        for (i, t) in ts.iter().enumerate() {
            doubled[i * n + i] = 2 * t;
        }
        HalfIntegralMatrix { n, doubled }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` of `2T`.
    pub fn doubled(&self, i: usize, j: usize) -> i64 {
        self.doubled[i * self.n + j]
    }

    /// Row-major entries of `2T`.
    pub fn doubled_entries(&self) -> &[i64] {
        &self.doubled
    }

    pub fn doubled_rows(&self) -> Vec<Vec<i64>> {
        self.doubled
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[i64]>::to_vec)
            .collect()
    }

    /// `trace(T)`, always an integer.
    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.doubled(i, i)).sum::<i64>() / 2
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.iter().all(|&x| x == 0)
    }

    /// `T` itself as a rational matrix.
    pub fn to_rational(&self) -> QMatrix {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        QMatrix::from_fn(self.n, self.n, |i, j| {
            Rational::from_integer(BigInt::from(self.doubled(i, j))) * &half
        })
    }

    /// `c·T`.
    pub fn scaled(&self, c: i64) -> Self {
        HalfIntegralMatrix {
            n: self.n,
            doubled: self.doubled.iter().map(|x| x * c).collect(),
        }
    }

    /// `T / c` if it lies in `Λ_n`.
    pub fn divided(&self, c: i64) -> Option<Self> {
        assert!(c > 0, "divisor must be positive");
        let mut doubled = Vec::with_capacity(self.doubled.len());
        for (idx, &x) in self.doubled.iter().enumerate() {
            if x % c != 0 {
                return None;
            }
            let y = x / c;
            if idx % (self.n + 1) == 0 && y % 2 != 0 {
                return None;
            }
            doubled.push(y);
        }
        Some(HalfIntegralMatrix { n: self.n, doubled })
    }

    /// `T₁ + T₂`.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "degree mismatch");
        HalfIntegralMatrix {
            n: self.n,
            doubled: self.doubled.iter().zip(&other.doubled).map(|(a, b)| a + b).collect(),
        }
    }

    /// `T₁ − T₂` (no psd guarantee).
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "degree mismatch");
        HalfIntegralMatrix {
            n: self.n,
            doubled: self.doubled.iter().zip(&other.doubled).map(|(a, b)| a - b).collect(),
        }
    }

    /// Every principal minor of `2T` is nonnegative.
    pub fn is_psd(&self) -> bool {
        (1..=self.n).all(|k| {
            (0..self.n).combinations(k).all(|idx| {
                let sub: Vec<i128> = idx
                    .iter()
                    .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| i128::from(self.doubled(i, j)))
                    .collect();
                int_det(&sub, k) >= 0
            })
        })
    }
}

/// Laplace expansion along the first row; only used for `k ≤ 4`.
fn int_det(a: &[i128], k: usize) -> i128 {
    match k {
        0 => 1,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        _ => {
            let mut acc = 0;
            for col in 0..k {
                let minor: Vec<i128> = (1..k)
                    .flat_map(|i| (0..k).filter(move |&j| j != col).map(move |j| (i, j)))
                    .map(|(i, j)| a[i * k + j])
                    .collect();
                let term = a[col] * int_det(&minor, k - 1);
                if col % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

impl Ord for HalfIntegralMatrix {
    /// Trace first, then row-major entries of `2T`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.trace().cmp(&other.trace()))
            .then_with(|| self.doubled.cmp(&other.doubled))
    }
}

impl PartialOrd for HalfIntegralMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<Vec<i64>>> for HalfIntegralMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        HalfIntegralMatrix::from_doubled(&rows)
    }
}

impl From<HalfIntegralMatrix> for Vec<Vec<i64>> {
    fn from(t: HalfIntegralMatrix) -> Self {
        t.doubled_rows()
    }
}

impl fmt::Debug for HalfIntegralMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2T={:?}", self.doubled_rows())
    }
}

/// All `T ∈ Λ_n` with `T ≥ 0` and `trace(T) ≤ bound`, sorted by trace and
/// then by the row-major entries of `2T`.
pub fn enumerate_lambda(n: usize, bound: u64) -> Result<Vec<HalfIntegralMatrix>> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::Unsupported(format!("degree {n} (supported: 1..={MAX_DEGREE})")));
    }
    let bound = i64::try_from(bound).map_err(|_| Error::Unsupported("trace bound".into()))?;
    let mut out = Vec::new();
    let mut diag = vec![0i64; n];
    fill_diagonal(n, 0, bound, &mut diag, &mut out);
    out.sort();
    Ok(out)
}

fn fill_diagonal(n: usize, i: usize, remaining: i64, diag: &mut [i64], out: &mut Vec<HalfIntegralMatrix>) {
    if i == n {
        let mut doubled = vec![0i64; n * n];
        for k in 0..n {
            doubled[k * n + k] = 2 * diag[k];
        }
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        fill_offdiagonal(n, &pairs, 0, &mut doubled, out);
        return;
    }
    for t in 0..=remaining {
        diag[i] = t;
        fill_diagonal(n, i + 1, remaining - t, diag, out);
    }
}

fn fill_offdiagonal(
    n: usize,
    pairs: &[(usize, usize)],
    k: usize,
    doubled: &mut Vec<i64>,
    out: &mut Vec<HalfIntegralMatrix>,
) {
    if k == pairs.len() {
        let t = HalfIntegralMatrix::from_flat_unchecked(n, doubled.clone());
        if t.is_psd() {
            out.push(t);
        }
        return;
    }
    let (i, j) = pairs[k];
    let cap = doubled[i * n + i] * doubled[j * n + j];
    let lim = isqrt(cap);
    for v in -lim..=lim {
        doubled[i * n + j] = v;
        doubled[j * n + i] = v;
        fill_offdiagonal(n, pairs, k + 1, doubled, out);
    }
    doubled[i * n + j] = 0;
    doubled[j * n + i] = 0;
}

fn isqrt(x: i64) -> i64 {
    debug_assert!(x >= 0);
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// The `r`-element subsets of `{0, …, n−1}` in lexicographic order; these
/// index the rows and columns of compound matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetOrder {
    n: usize,
    r: usize,
    subsets: Vec<Vec<usize>>,
}

impl SubsetOrder {
    pub fn new(n: usize, r: usize) -> Self {
        assert!(r <= n, "subset size {r} exceeds {n}");
        SubsetOrder {
            n,
            r,
            subsets: (0..n).combinations(r).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }
}

/// The `r`-th compound of a square matrix: entry `(I, J)` is the minor on
/// rows `I` and columns `J`, subsets taken in [`SubsetOrder`].
pub fn compound(m: &QMatrix, r: usize) -> QMatrix {
    assert!(m.is_square(), "compound of a non-square matrix");
    let order = SubsetOrder::new(m.rows(), r);
    let s = order.subsets();
    QMatrix::from_fn(s.len(), s.len(), |i, j| m.select(&s[i], &s[j]).det())
}

/// `binomial(n, r)`.
pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hm(rows: &[&[i64]]) -> HalfIntegralMatrix {
        HalfIntegralMatrix::from_doubled(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn make_half_integral() {
        let z = hm(&[&[0]]);
        assert_eq!(z.trace(), 0);
        let t = hm(&[&[2, 1], &[1, 2]]);
        assert_eq!(t.trace(), 2);
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(t.to_rational().get(0, 1), &half);
        assert_eq!(t.to_rational().get(0, 0), &Rational::from_integer(1.into()));
        assert_eq!(HalfIntegralMatrix::from_doubled(&[vec![1]]), Err(Error::OddDiagonal(0)));
        assert_eq!(
            HalfIntegralMatrix::from_doubled(&[vec![2, 1], vec![0, 2]]),
            Err(Error::NotSymmetric)
        );
        assert_eq!(HalfIntegralMatrix::from_doubled(&[vec![2, 1]]), Err(Error::NotSquare));
    }

    #[test]
    fn psd_checks() {
        assert!(hm(&[&[0, 0], &[0, 0]]).is_psd());
        assert!(!hm(&[&[2, 3], &[3, 2]]).is_psd());
        assert!(hm(&[&[2, 1], &[1, 2]]).is_psd());
        assert!(!hm(&[&[0, 1], &[1, 2]]).is_psd());
        // leading minors nonnegative but a later principal minor negative
        assert!(!hm(&[&[0, 0], &[0, -2]]).is_psd());
        assert!(hm(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 2]]).is_psd());
    }

    #[test]
    fn enumeration_small() {
        let l = enumerate_lambda(1, 3).unwrap();
        assert_eq!(l.iter().map(|t| t.trace()).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let l = enumerate_lambda(2, 1).unwrap();
        assert_eq!(
            l,
            vec![
                HalfIntegralMatrix::zero(2),
                HalfIntegralMatrix::diagonal(&[0, 1]),
                HalfIntegralMatrix::diagonal(&[1, 0]),
            ]
        );
        assert_eq!(enumerate_lambda(2, 0).unwrap(), vec![HalfIntegralMatrix::zero(2)]);
        assert!(enumerate_lambda(5, 1).is_err());
        assert!(enumerate_lambda(0, 1).is_err());
    }

    #[test]
    fn enumeration_is_prefix_closed() {
        for n in 1..=3 {
            let big = enumerate_lambda(n, 3).unwrap();
            for small_bound in 0..3 {
                let small = enumerate_lambda(n, small_bound).unwrap();
                let filtered: Vec<_> = big
                    .iter()
                    .filter(|t| t.trace() <= small_bound as i64)
                    .cloned()
                    .collect();
                assert_eq!(filtered, small);
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // independent route: all symmetric 2T with entries in a generous box
        let n = 2;
        let bound = 3i64;
        let mut brute = Vec::new();
        for a in (0..=2 * bound).step_by(2) {
            for c in (0..=2 * bound).step_by(2) {
                for b in -2 * bound..=2 * bound {
                    if a + c <= 2 * bound && a * c - b * b >= 0 {
                        brute.push(hm(&[&[a, b], &[b, c]]));
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(enumerate_lambda(n, bound as u64).unwrap(), brute);
    }

    #[test]
    fn compound_examples() {
        for n in 1..=4 {
            for r in 0..=n {
                let c = compound(&QMatrix::identity(n), r);
                assert_eq!(c, QMatrix::identity(binomial(n, r)));
            }
        }
        let m = QMatrix::from_i64_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(compound(&m, 1), m);
        assert_eq!(compound(&m, 2), QMatrix::scalar(m.det()));
        assert_eq!(compound(&m, 0), QMatrix::identity(1));
        assert!(compound(&QMatrix::zeros(3, 3), 2).is_zero());
    }

    #[test]
    fn dividing_and_scaling() {
        let t = hm(&[&[2, 1], &[1, 2]]);
        assert_eq!(t.scaled(3).divided(3), Some(t.clone()));
        assert_eq!(t.divided(3), None);
        assert_eq!(
            hm(&[&[6, 0], &[0, 6]]).divided(3),
            Some(HalfIntegralMatrix::diagonal(&[1, 1]))
        );
        // T = diag(1, 0) halves to an odd doubled diagonal
        assert_eq!(hm(&[&[2, 0], &[0, 0]]).divided(2), None);
    }
}
