//! `Sp_n(F_p)`, its Bruhat cells relative to the Siegel parabolic
//! `P = {(A B; 0 D)}`, and an explicit system of right coset
//! representatives for `P \ Sp_n(F_p)`.
//!
//! Matrices act on `F_p^{2n}` with the standard form `J = (0 1; −1 0)`.
//! Entries are kept in `0..p`, so `−1` is stored as `p − 1`.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::is_odd_prime;

/// Dense matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        ModMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Reduces arbitrary integer rows modulo `p`.
    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * c + j] = x.rem_euclid(p as i64) as u64;
            }
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "different moduli");
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(k, j)) % self.p;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.rows, self.cols), (other.p, other.rows, other.cols));
        ModMatrix {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a + b) % self.p)
                .collect(),
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        ModMatrix {
            data: self.data.iter().map(|&a| (self.p - a) % self.p).collect(),
            ..self.clone()
        }
    }

    /// Block `[r0, r0+h) × [c0, c0+w)`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        let mut b = Self::zeros(self.p, h, w);
        for i in 0..h {
            for j in 0..w {
                b.data[i * w + j] = self.get(r0 + i, c0 + j);
            }
        }
        b
    }

    fn put_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(pr * m.cols + j, row * m.cols + j);
            }
            let inv = mod_inv(m.get(row, col), p);
            for j in 0..m.cols {
                let v = m.get(row, j) * inv % p;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = (m.get(r, j) + p - f * m.get(row, j) % p) % p;
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        aug.put_block(0, 0, self);
        aug.put_block(0, n, &Self::identity(self.p, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(r.block(0, n, n, n))
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime: a^{p−2}
    let mut result = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// `J = (0 1_n; −1_n 0)` over `F_p`.
pub fn standard_form(n: usize, p: u64) -> ModMatrix {
    let mut j = ModMatrix::zeros(p, 2 * n, 2 * n);
    for i in 0..n {
        j.set(i, n + i, 1);
        j.set(n + i, i, p - 1);
    }
    j
}

/// An element of `Sp_n(F_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticModP {
    n: usize,
    mat: ModMatrix,
}

impl SymplecticModP {
    /// Validates `MᵗJM = J`.
    pub fn new(mat: ModMatrix) -> Result<Self> {
        if mat.rows != mat.cols || !mat.rows.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "symplectic matrix must be 2n x 2n, got {}x{}",
                mat.rows, mat.cols
            )));
        }
        let n = mat.rows / 2;
        let j = standard_form(n, mat.p);
        if mat.transpose().mul(&j).mul(&mat) != j {
            return Err(Error::Precondition("matrix is not symplectic".into()));
        }
        Ok(SymplecticModP { n, mat })
    }

    fn new_unchecked(mat: ModMatrix) -> Self {
        debug_assert!(Self::new(mat.clone()).is_ok());
        SymplecticModP { n: mat.rows / 2, mat }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        SymplecticModP {
            n,
            mat: ModMatrix::identity(p, 2 * n),
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.mat.p
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.mat
    }

    pub fn a_block(&self) -> ModMatrix {
        self.mat.block(0, 0, self.n, self.n)
    }

    pub fn b_block(&self) -> ModMatrix {
        self.mat.block(0, self.n, self.n, self.n)
    }

    pub fn c_block(&self) -> ModMatrix {
        self.mat.block(self.n, 0, self.n, self.n)
    }

    pub fn d_block(&self) -> ModMatrix {
        self.mat.block(self.n, self.n, self.n, self.n)
    }

    /// Rank of the lower-left block: the Bruhat cell index.
    pub fn cell(&self) -> usize {
        self.c_block().rank()
    }

    pub fn mul(&self, other: &Self) -> Self {
        SymplecticModP {
            n: self.n,
            mat: self.mat.mul(&other.mat),
        }
    }

    /// `(A B; C D)⁻¹ = (Dᵗ −Bᵗ; −Cᵗ Aᵗ)`.
    pub fn inverse(&self) -> Self {
        let n = self.n;
        let mut inv = ModMatrix::zeros(self.p(), 2 * n, 2 * n);
        inv.put_block(0, 0, &self.d_block().transpose());
        inv.put_block(0, n, &self.b_block().transpose().neg());
        inv.put_block(n, 0, &self.c_block().transpose().neg());
        inv.put_block(n, n, &self.a_block().transpose());
        SymplecticModP { n, mat: inv }
    }

    /// Canonical key of the coset `P·M`: the reduced echelon form of the
    /// bottom `n` rows `(C D)`.
    pub fn coset_key(&self) -> ModMatrix {
        self.mat.block(self.n, 0, self.n, 2 * self.n).rref().0
    }
}

fn check_params(n: usize, p: u64) -> Result<()> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if n == 0 {
        return Err(Error::Unsupported("degree 0".into()));
    }
    Ok(())
}

/// The partial involution `ω_j`: identity on the first `n − j` symplectic
/// pairs and `(0 −1; 1 0)` on the last `j`.
pub fn omega(n: usize, j: usize, p: u64) -> Result<SymplecticModP> {
    check_params(n, p)?;
    if j > n {
        return Err(Error::Unsupported(format!("omega_{j} in degree {n}")));
    }
    let mut m = ModMatrix::zeros(p, 2 * n, 2 * n);
    for i in 0..n - j {
        m.set(i, i, 1);
        m.set(n + i, n + i, 1);
    }
    for i in n - j..n {
        m.set(i, n + i, p - 1);
        m.set(n + i, i, 1);
    }
    Ok(SymplecticModP::new_unchecked(m))
}

/// `m(A) = diag(A, (A⁻¹)ᵗ)`.
pub fn levi(a: &ModMatrix) -> Result<SymplecticModP> {
    if a.rows != a.cols {
        return Err(Error::NotSquare);
    }
    let inv = a.inverse().ok_or(Error::Singular(a.p))?;
    let n = a.rows;
    let mut m = ModMatrix::zeros(a.p, 2 * n, 2 * n);
    m.put_block(0, 0, a);
    m.put_block(n, n, &inv.transpose());
    Ok(SymplecticModP::new_unchecked(m))
}

/// `n(B) = (1 B; 0 1)` for symmetric `B`.
pub fn unipotent(b: &ModMatrix) -> Result<SymplecticModP> {
    if b.rows != b.cols {
        return Err(Error::NotSquare);
    }
    if b.transpose() != *b {
        return Err(Error::NotSymmetric);
    }
    let n = b.rows;
    let mut m = ModMatrix::identity(b.p, 2 * n);
    m.put_block(0, n, b);
    Ok(SymplecticModP::new_unchecked(m))
}

/// `[n choose j]_p`.
pub fn gaussian_binomial(n: usize, j: usize, p: u64) -> u64 {
    if j > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..j {
        num *= p.pow((n - i) as u32) - 1;
        den *= p.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// `|P \ Sp_n(F_p)| = Π_{i=1}^n (p^i + 1)`.
pub fn coset_count(n: usize, p: u64) -> u64 {
    (1..=n as u32).map(|i| p.pow(i) + 1).product()
}

/// All `j`-dimensional subspaces of `F_p^n` as reduced echelon bases,
/// in lexicographic order of their entries.
pub fn subspaces_rref(n: usize, j: usize, p: u64) -> Vec<ModMatrix> {
    let mut out = Vec::new();
    for pivots in (0..n).combinations(j) {
        // free positions: (row, col) right of the row's pivot, not a pivot column
        let free: Vec<(usize, usize)> = (0..j)
            .flat_map(|r| {
                let pv = pivots.clone();
                (pv[r] + 1..n).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let total = p.pow(free.len() as u32);
        for code in 0..total {
            let mut m = ModMatrix::zeros(p, j, n);
            for (r, &c) in pivots.iter().enumerate() {
                m.set(r, c, 1);
            }
            let mut x = code;
            for &(r, c) in free.iter().rev() {
                m.set(r, c, x % p);
                x /= p;
            }
            out.push(m);
        }
    }
    out.sort_by(|a, b| a.data.cmp(&b.data));
    out
}

/// Right coset representatives of `P_{n,j} \ GL_n(F_p)`, where `P_{n,j}` has
/// a zero lower-left `j × (n−j)` block. Each representative has the echelon
/// basis of a `j`-dimensional subspace as its bottom rows, completed above by
/// the standard vectors of the non-pivot columns.
pub fn gl_parabolic_reps(n: usize, j: usize, p: u64) -> Result<Vec<ModMatrix>> {
    check_supported(n, p)?;
    if j > n {
        return Err(Error::Unsupported(format!("parabolic P_{{{n},{j}}}")));
    }
    Ok(subspaces_rref(n, j, p)
        .into_iter()
        .map(|basis| {
            let (_, pivots) = basis.rref();
            let mut a = ModMatrix::zeros(p, n, n);
            let free_cols: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
            for (r, &c) in free_cols.iter().enumerate() {
                a.set(r, c, 1);
            }
            a.put_block(n - j, 0, &basis);
            a
        })
        .collect())
}

fn check_supported(n: usize, p: u64) -> Result<()> {
    check_params(n, p)?;
    if n > 3 || p > 7 {
        return Err(Error::Unsupported(format!(
            "coset enumeration for n = {n}, p = {p} (supported: n <= 3, p in {{3, 5, 7}})"
        )));
    }
    Ok(())
}

/// All symmetric `j × j` matrices over `F_p`, lexicographic in row-major order.
pub fn symmetric_matrices(j: usize, p: u64) -> Vec<ModMatrix> {
    let slots: Vec<(usize, usize)> = (0..j).flat_map(|r| (r..j).map(move |c| (r, c))).collect();
    let total = p.pow(slots.len() as u32);
    let mut out: Vec<ModMatrix> = (0..total)
        .map(|code| {
            let mut m = ModMatrix::zeros(p, j, j);
            let mut x = code;
            for &(r, c) in slots.iter().rev() {
                m.set(r, c, x % p);
                m.set(c, r, x % p);
                x /= p;
            }
            m
        })
        .collect();
    out.sort_by(|a, b| a.data.cmp(&b.data));
    out
}

/// One right coset `P·ω_j n(B_j) m(A)` of the Siegel parabolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetRep {
    pub cell: usize,
    /// `B_j`, placed in the lower-right `j × j` corner of `n(B)`.
    pub b: ModMatrix,
    pub a: ModMatrix,
    pub mat: SymplecticModP,
}

#[derive(Serialize)]
struct CosetRepJson {
    a: Vec<Vec<u64>>,
    b: Vec<Vec<u64>>,
    cell: usize,
    mat: Vec<Vec<u64>>,
}

impl Serialize for CosetRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CosetRepJson {
            a: self.a.to_rows(),
            b: self.b.to_rows(),
            cell: self.cell,
            mat: self.mat.matrix().to_rows(),
        }
        .serialize(s)
    }
}

/// The system `{ω_j n(B_j) m(A)}` over all cells `j`, ordered by cell, then
/// `B_j`, then the echelon form behind `A`.
pub fn coset_reps(n: usize, p: u64) -> Result<Vec<CosetRep>> {
    check_supported(n, p)?;
    let mut out = Vec::with_capacity(coset_count(n, p) as usize);
    for j in 0..=n {
        let w = omega(n, j, p)?;
        let reps_a = gl_parabolic_reps(n, j, p)?;
        let levis: Vec<SymplecticModP> = reps_a.iter().map(levi).collect::<Result<_>>()?;
        for bj in symmetric_matrices(j, p) {
            let mut big = ModMatrix::zeros(p, n, n);
            big.put_block(n - j, n - j, &bj);
            let wn = w.mul(&unipotent(&big)?);
            for (a, m) in reps_a.iter().zip(&levis) {
                out.push(CosetRep {
                    cell: j,
                    b: bj.clone(),
                    a: a.clone(),
                    mat: wn.mul(m),
                });
            }
        }
    }
    Ok(out)
}

/// `M₁ M₂⁻¹ ∈ P`, i.e. the lower-left block of `M₁ M₂⁻¹` vanishes.
pub fn same_coset(m1: &SymplecticModP, m2: &SymplecticModP) -> Result<bool> {
    if m1.n != m2.n || m1.p() != m2.p() {
        return Err(Error::DimensionMismatch(format!(
            "Sp_{}(F_{}) vs Sp_{}(F_{})",
            m1.n,
            m1.p(),
            m2.n,
            m2.p()
        )));
    }
    // lower-left block of M₁M₂⁻¹ is C₁D₂ᵗ − D₁C₂ᵗ
    let left = m1.c_block().mul(&m2.d_block().transpose());
    let right = m1.d_block().mul(&m2.c_block().transpose());
    Ok(left == right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_shapes() {
        for n in 1..=3 {
            assert_eq!(omega(n, 0, 5).unwrap(), SymplecticModP::identity(n, 5));
            for j in 0..=n {
                assert_eq!(omega(n, j, 3).unwrap().cell(), j);
            }
        }
        let w = omega(1, 1, 7).unwrap();
        assert_eq!(w.matrix().to_rows(), vec![vec![0, 6], vec![1, 0]]);
        assert!(omega(2, 3, 3).is_err());
        assert!(omega(2, 1, 4).is_err());
    }

    #[test]
    fn levi_and_unipotent() {
        assert_eq!(
            levi(&ModMatrix::identity(3, 2)).unwrap(),
            SymplecticModP::identity(2, 3)
        );
        assert_eq!(
            unipotent(&ModMatrix::zeros(3, 2, 2)).unwrap(),
            SymplecticModP::identity(2, 3)
        );
        let b1 = ModMatrix::from_rows(5, &[vec![1, 2], vec![2, 3]]);
        let b2 = ModMatrix::from_rows(5, &[vec![4, 4], vec![4, 0]]);
        assert_eq!(
            unipotent(&b1).unwrap().mul(&unipotent(&b2).unwrap()),
            unipotent(&b1.add(&b2)).unwrap()
        );
        assert_eq!(
            levi(&ModMatrix::from_rows(3, &[vec![1, 1], vec![1, 1]])),
            Err(Error::Singular(3))
        );
        assert_eq!(
            unipotent(&ModMatrix::from_rows(3, &[vec![0, 1], vec![0, 0]])),
            Err(Error::NotSymmetric)
        );
        let a = ModMatrix::from_rows(7, &[vec![2, 5], vec![1, 3]]);
        assert!(SymplecticModP::new(levi(&a).unwrap().matrix().clone()).is_ok());
    }

    #[test]
    fn symplectic_validation() {
        let bad = ModMatrix::from_rows(3, &[vec![1, 1], vec![1, 0]]);
        // det = −1 ≠ 1, so not in SL_2 = Sp_1
        assert!(SymplecticModP::new(bad).is_err());
        let good = ModMatrix::from_rows(3, &[vec![1, 1], vec![0, 1]]);
        assert!(SymplecticModP::new(good).is_ok());
    }

    #[test]
    fn parabolic_rep_counts() {
        assert_eq!(gl_parabolic_reps(2, 0, 3).unwrap(), vec![ModMatrix::identity(3, 2)]);
        assert_eq!(gl_parabolic_reps(3, 3, 5).unwrap(), vec![ModMatrix::identity(5, 3)]);
        assert_eq!(gl_parabolic_reps(2, 1, 3).unwrap().len(), 4);
        for (n, p) in [(2, 3), (3, 3), (3, 5), (2, 7)] {
            for j in 0..=n {
                let reps = gl_parabolic_reps(n, j, p).unwrap();
                assert_eq!(reps.len() as u64, gaussian_binomial(n, j, p));
                assert!(reps.iter().all(|a| a.inverse().is_some()));
            }
        }
        assert!(gl_parabolic_reps(4, 1, 3).is_err());
        assert!(gl_parabolic_reps(2, 1, 11).is_err());
    }

    #[test]
    fn parabolic_reps_brute_force() {
        // class GL_2(F_3) under left multiplication by P_{2,1}
        let p = 3;
        let mut parabolic = Vec::new();
        let mut all = Vec::new();
        for code in 0..81u64 {
            let e: Vec<i64> = (0..4).map(|i| ((code / 3u64.pow(i)) % 3) as i64).collect();
            let m = ModMatrix::from_rows(p, &[vec![e[0], e[1]], vec![e[2], e[3]]]);
            if m.inverse().is_none() {
                continue;
            }
            if m.get(1, 0) == 0 {
                parabolic.push(m.clone());
            }
            all.push(m);
        }
        let mut classes: Vec<Vec<ModMatrix>> = Vec::new();
        for g in &all {
            if classes.iter().any(|c| c.contains(g)) {
                continue;
            }
            classes.push(parabolic.iter().map(|h| h.mul(g)).collect());
        }
        assert_eq!(classes.len(), 4);
        for a in gl_parabolic_reps(2, 1, p).unwrap() {
            assert_eq!(classes.iter().filter(|c| c.contains(&a)).count(), 1);
        }
    }

    #[test]
    fn coset_counts() {
        assert_eq!(coset_reps(1, 3).unwrap().len(), 4);
        assert_eq!(coset_reps(2, 3).unwrap().len(), 40);
        for (n, p) in [(1usize, 3u64), (2, 3), (2, 5), (3, 3)] {
            let direct: u64 = (0..=n)
                .map(|j| p.pow((j * (j + 1) / 2) as u32) * gaussian_binomial(n, j, p))
                .sum();
            assert_eq!(direct, coset_count(n, p));
        }
    }

    #[test]
    fn same_coset_examples() {
        let m = coset_reps(2, 3).unwrap()[7].mat.clone();
        assert!(same_coset(&m, &m).unwrap());
        let id = SymplecticModP::identity(2, 3);
        assert!(!same_coset(&id, &omega(2, 2, 3).unwrap()).unwrap());
        let b = ModMatrix::from_rows(3, &[vec![1, 2], vec![2, 0]]);
        assert!(same_coset(&unipotent(&b).unwrap().mul(&m), &m).unwrap());
        assert!(same_coset(&id, &SymplecticModP::identity(1, 3)).is_err());
    }

    #[test]
    fn inverse_is_inverse() {
        for rep in coset_reps(2, 5).unwrap().iter().step_by(17) {
            assert_eq!(rep.mat.mul(&rep.mat.inverse()), SymplecticModP::identity(2, 5));
        }
    }
}
