//! Truncated generalized q-expansions `Σ a(T) q^T`.
//!
//! An expansion of degree `n` and trace bound `N` knows every coefficient
//! `a(T)` with `trace(T) ≤ N`; keys missing from the map are zero. Because
//! the trace is additive and sums of positive semidefinite matrices stay
//! positive semidefinite, products are exact up to the smaller of the two
//! bounds.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::halfint::{binomial, HalfIntegralMatrix};
use crate::matrix::QMatrix;
use crate::Rational;

/// What each coefficient block is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// A single rational.
    Scalar,
    /// A `binomial(n, r)`-square rational matrix (values in `ρ^[r]`).
    Compound(usize),
}

impl Shape {
    /// Side length of a coefficient block in degree `n`.
    pub fn block_dim(self, n: usize) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Compound(r) => binomial(n, r),
        }
    }
}

/// Informational tags; none of them affect arithmetic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Meta {
    pub weight: Option<Rational>,
    pub level: Option<u64>,
    pub character: Option<String>,
}

impl Meta {
    pub fn with_weight(weight: Rational) -> Self {
        Meta {
            weight: Some(weight),
            ..Meta::default()
        }
    }

    /// Tags of a sum: whatever both sides agree on.
    fn join(&self, other: &Meta) -> Meta {
        Meta {
            weight: agree(&self.weight, &other.weight),
            level: agree(&self.level, &other.level),
            character: agree(&self.character, &other.character),
        }
    }

    /// Tags of a product: weights add, levels combine by lcm.
    fn product(&self, other: &Meta) -> Meta {
        let weight = match (&self.weight, &other.weight) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let level = match (self.level, other.level) {
            (Some(a), Some(b)) => Some(a.lcm(&b)),
            _ => None,
        };
        let character = match (&self.character, &other.character) {
            (None, c) | (c, None) => c.clone(),
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            (Some(a), Some(b)) => Some(format!("{a}*{b}")),
        };
        Meta {
            weight,
            level,
            character,
        }
    }
}

fn agree<T: Clone + PartialEq>(a: &Option<T>, b: &Option<T>) -> Option<T> {
    if a == b {
        a.clone()
    } else {
        None
    }
}

/// A truncated Fourier expansion with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierExpansion {
    degree: usize,
    trace_bound: u64,
    shape: Shape,
    coeffs: BTreeMap<HalfIntegralMatrix, QMatrix>,
    meta: Meta,
}

impl FourierExpansion {
    /// The zero expansion.
    pub fn zero(degree: usize, trace_bound: u64, shape: Shape) -> Self {
        FourierExpansion {
            degree,
            trace_bound,
            shape,
            coeffs: BTreeMap::new(),
            meta: Meta::default(),
        }
    }

    /// Builds an expansion from `(T, block)` pairs, validating every key and
    /// block. Repeated keys are summed; zero blocks are dropped.
    pub fn from_coeffs(
        degree: usize,
        trace_bound: u64,
        shape: Shape,
        coeffs: impl IntoIterator<Item = (HalfIntegralMatrix, QMatrix)>,
    ) -> Result<Self> {
        if let Shape::Compound(r) = shape {
            if r > degree {
                return Err(Error::ShapeMismatch(format!("compound({r}) in degree {degree}")));
            }
        }
        let dim = shape.block_dim(degree);
        let mut map: BTreeMap<HalfIntegralMatrix, QMatrix> = BTreeMap::new();
        for (t, block) in coeffs {
            if t.degree() != degree {
                return Err(Error::DegreeMismatch(t.degree(), degree));
            }
            if !t.is_psd() {
                return Err(Error::Precondition(format!("{t:?} is not positive semidefinite")));
            }
            if t.trace() as u64 > trace_bound {
                return Err(Error::Precondition(format!("{t:?} exceeds trace bound {trace_bound}")));
            }
            if block.rows() != dim || block.cols() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "block {}x{} for shape {shape:?}",
                    block.rows(),
                    block.cols()
                )));
            }
            match map.get_mut(&t) {
                Some(b) => *b = &*b + &block,
                None => {
                    map.insert(t, block);
                }
            }
        }
        map.retain(|_, b| !b.is_zero());
        Ok(FourierExpansion {
            degree,
            trace_bound,
            shape,
            coeffs: map,
            meta: Meta::default(),
        })
    }

    /// Scalar expansion from `(T, a(T))` pairs.
    pub fn from_scalars(
        degree: usize,
        trace_bound: u64,
        coeffs: impl IntoIterator<Item = (HalfIntegralMatrix, Rational)>,
    ) -> Result<Self> {
        Self::from_coeffs(
            degree,
            trace_bound,
            Shape::Scalar,
            coeffs.into_iter().map(|(t, c)| (t, QMatrix::scalar(c))),
        )
    }

    /// Degree-one expansion `Σ_{t ≤ N} c_t q^t` with `N = coeffs.len() − 1`.
    pub fn from_degree1(coeffs: &[Rational]) -> Self {
        assert!(!coeffs.is_empty(), "need at least the constant term");
        Self::from_scalars(
            1,
            coeffs.len() as u64 - 1,
            coeffs
                .iter()
                .enumerate()
                .map(|(t, c)| (HalfIntegralMatrix::diagonal(&[t as i64]), c.clone())),
        )
        .expect("degree-one keys are always valid")
    }

    /// Degree-one expansion from integer coefficients.
    pub fn from_degree1_ints(coeffs: &[i64]) -> Self {
        let q: Vec<Rational> = coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect();
        Self::from_degree1(&q)
    }

    /// The constant `c` (weight 0, level 1).
    pub fn constant(degree: usize, trace_bound: u64, c: Rational) -> Self {
        let mut f = Self::from_scalars(degree, trace_bound, [(HalfIntegralMatrix::zero(degree), c)])
            .expect("zero key is valid");
        f.meta = Meta {
            weight: Some(Rational::zero()),
            level: Some(1),
            character: None,
        };
        f
    }

    pub fn one(degree: usize, trace_bound: u64) -> Self {
        Self::constant(degree, trace_bound, Rational::one())
    }

    /// `c·q^T`.
    pub fn monomial(t: HalfIntegralMatrix, c: Rational, trace_bound: u64) -> Result<Self> {
        Self::from_scalars(t.degree(), trace_bound, [(t, c)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn trace_bound(&self) -> u64 {
        self.trace_bound
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Meta {
        &mut self.meta
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of nonzero coefficients.
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Nonzero coefficients in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&HalfIntegralMatrix, &QMatrix)> {
        self.coeffs.iter()
    }

    /// The block at `T`, or `None` when it is zero.
    pub fn coeff(&self, t: &HalfIntegralMatrix) -> Option<&QMatrix> {
        self.coeffs.get(t)
    }

    /// `a(T)` for a scalar expansion.
    pub fn scalar_coeff(&self, t: &HalfIntegralMatrix) -> Rational {
        assert_eq!(self.shape, Shape::Scalar, "scalar_coeff on a non-scalar expansion");
        self.coeffs.get(t).map_or_else(Rational::zero, |b| b.get(0, 0).clone())
    }

    /// `a(t)` of a degree-one scalar expansion.
    pub fn coeff1(&self, t: i64) -> Rational {
        assert_eq!(self.degree, 1, "coeff1 on degree {}", self.degree);
        self.scalar_coeff(&HalfIntegralMatrix::diagonal(&[t]))
    }

    /// Drops every coefficient with trace above `bound` (no-op if `bound`
    /// is not smaller than the current bound).
    pub fn truncate(&self, bound: u64) -> Self {
        let bound = bound.min(self.trace_bound);
        FourierExpansion {
            degree: self.degree,
            trace_bound: bound,
            shape: self.shape,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(t, _)| t.trace() as u64 <= bound)
                .map(|(t, b)| (t.clone(), b.clone()))
                .collect(),
            meta: self.meta.clone(),
        }
    }

    /// Coefficientwise equality up to the shared trace bound, ignoring tags.
    pub fn same_coefficients(&self, other: &Self) -> bool {
        if self.degree != other.degree || self.shape != other.shape {
            return false;
        }
        let bound = self.trace_bound.min(other.trace_bound);
        self.truncate(bound).coeffs == other.truncate(bound).coeffs
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }

    /// `f + g`, bound `min(N_f, N_g)`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let bound = self.trace_bound.min(other.trace_bound);
        let mut coeffs = self.truncate(bound).coeffs;
        for (t, b) in other.coeffs.iter().filter(|(t, _)| t.trace() as u64 <= bound) {
            match coeffs.get_mut(t) {
                Some(a) => *a = &*a + b,
                None => {
                    coeffs.insert(t.clone(), b.clone());
                }
            }
        }
        coeffs.retain(|_, b| !b.is_zero());
        Ok(FourierExpansion {
            degree: self.degree,
            trace_bound: bound,
            shape: self.shape,
            coeffs,
            meta: self.meta.join(&other.meta),
        })
    }

    /// `f − g`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `c·f`.
    pub fn scale(&self, c: &Rational) -> Self {
        let coeffs = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.coeffs.iter().map(|(t, b)| (t.clone(), b.scale(c))).collect()
        };
        FourierExpansion { coeffs, ..self.clone() }
    }

    /// Applies `op` to every coefficient block, keeping keys.
    pub fn map_blocks(&self, shape: Shape, op: impl Fn(&HalfIntegralMatrix, &QMatrix) -> QMatrix) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(t, b)| (t.clone(), op(t, b)))
            .filter(|(_, b)| !b.is_zero())
            .collect();
        FourierExpansion {
            degree: self.degree,
            trace_bound: self.trace_bound,
            shape,
            coeffs,
            meta: self.meta.clone(),
        }
    }

    /// Cauchy product. At least one factor must be scalar; the result has
    /// the other factor's shape and bound `min(N_f, N_g)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let shape = match (self.shape, other.shape) {
            (Shape::Scalar, s) | (s, Shape::Scalar) => s,
            (a, b) => {
                return Err(Error::ShapeMismatch(format!(
                    "product of two non-scalar expansions {a:?} and {b:?}"
                )))
            }
        };
        let bound = self.trace_bound.min(other.trace_bound);
        let left: Vec<(&HalfIntegralMatrix, &QMatrix)> = self.coeffs.iter().collect();
        let right: Vec<(i64, &HalfIntegralMatrix, &QMatrix)> =
            other.coeffs.iter().map(|(t, b)| (t.trace(), t, b)).collect();
        let bound_i = bound as i64;

        let acc = left
            .par_iter()
            .fold(
                HashMap::new,
                |mut acc: HashMap<HalfIntegralMatrix, QMatrix>, (t1, a)| {
                    let budget = bound_i - t1.trace();
                    // `right` is sorted by trace, so stop at the first overflow.
                    for (tr, t2, b) in &right {
                        if *tr > budget {
                            break;
                        }
                        let prod = block_mul(a, b);
                        let key = t1.add(t2);
                        match acc.get_mut(&key) {
                            Some(x) => *x = &*x + &prod,
                            None => {
                                acc.insert(key, prod);
                            }
                        }
                    }
                    acc
                },
            )
            .reduce(HashMap::new, merge_sum);

        let coeffs = acc.into_iter().filter(|(_, b)| !b.is_zero()).collect();
        Ok(FourierExpansion {
            degree: self.degree,
            trace_bound: bound,
            shape,
            coeffs,
            meta: self.meta.product(&other.meta),
        })
    }

    /// `f^e` by binary exponentiation; `f^0` is the constant 1 at `f`'s bound.
    pub fn pow(&self, e: u64) -> Result<Self> {
        if self.shape != Shape::Scalar {
            return Err(Error::ShapeMismatch("pow of a non-scalar expansion".into()));
        }
        let mut result = Self::one(self.degree, self.trace_bound);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `F | U(p) = Σ a(pT) q^T`, bound `⌊N/p⌋`. Tags are kept.
    pub fn u_p(&self, p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::Unsupported(format!("U({p})")));
        }
        let pi = p as i64;
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(t, b)| t.divided(pi).map(|s| (s, b.clone())))
            .collect();
        Ok(FourierExpansion {
            degree: self.degree,
            trace_bound: self.trace_bound / p,
            shape: self.shape,
            coeffs,
            meta: self.meta.clone(),
        })
    }

    /// `F(cZ) = Σ a(T) q^{cT}`, bound `c·N`. Tags are kept.
    pub fn dilate(&self, c: u64) -> Self {
        assert!(c >= 1, "dilation factor must be positive");
        let ci = c as i64;
        FourierExpansion {
            degree: self.degree,
            trace_bound: self.trace_bound * c,
            shape: self.shape,
            coeffs: self.coeffs.iter().map(|(t, b)| (t.scaled(ci), b.clone())).collect(),
            meta: self.meta.clone(),
        }
    }
}

fn block_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    match (a.rows(), b.rows()) {
        (1, _) if a.cols() == 1 => b.scale(a.get(0, 0)),
        (_, 1) if b.cols() == 1 => a.scale(b.get(0, 0)),
        _ => a * b,
    }
}

fn merge_sum(
    mut a: HashMap<HalfIntegralMatrix, QMatrix>,
    b: HashMap<HalfIntegralMatrix, QMatrix>,
) -> HashMap<HalfIntegralMatrix, QMatrix> {
    for (k, v) in b {
        match a.get_mut(&k) {
            Some(x) => *x = &*x + &v,
            None => {
                a.insert(k, v);
            }
        }
    }
    a
}

/// Bernoulli numbers `B_0, …, B_k` (with `B_1 = −1/2`).
pub fn bernoulli_numbers(k: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(k + 1);
    b.push(Rational::one());
    for m in 1..=k {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        let mut c = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(c.clone()) * bj;
            c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `σ_e(m)`.
pub fn divisor_power_sum(m: u64, e: u32) -> BigInt {
    let mut acc = BigInt::zero();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            acc += BigInt::from(d).pow(e);
            let other = m / d;
            if other != d {
                acc += BigInt::from(other).pow(e);
            }
        }
        d += 1;
    }
    acc
}

/// Degree-one Eisenstein series `E_k = 1 − (2k/B_k) Σ σ_{k−1}(m) q^m`.
pub fn eisenstein1(k: u32, bound: u64) -> Result<FourierExpansion> {
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("Eisenstein series of weight {k}")));
    }
    let bk = bernoulli_numbers(k as usize).pop().expect("nonempty");
    let factor = -Rational::from_integer(BigInt::from(2 * k)) / bk;
    let mut coeffs = vec![Rational::one()];
    for m in 1..=bound {
        coeffs.push(&factor * Rational::from_integer(divisor_power_sum(m, k - 1)));
    }
    let mut e = FourierExpansion::from_degree1(&coeffs);
    e.meta = Meta {
        weight: Some(Rational::from_integer(k.into())),
        level: Some(1),
        character: None,
    };
    Ok(e)
}

/// `Δ = (E_4³ − E_6²) / 1728`.
pub fn delta1(bound: u64) -> FourierExpansion {
    let e4 = eisenstein1(4, bound).expect("weight 4 supported");
    let e6 = eisenstein1(6, bound).expect("weight 6 supported");
    let num = e4
        .pow(3)
        .and_then(|a| a.sub(&e6.pow(2)?))
        .expect("same degree and shape");
    let mut d = num.scale(&Rational::new(1.into(), 1728.into()));
    d.meta = Meta {
        weight: Some(Rational::from_integer(12.into())),
        level: Some(1),
        character: None,
    };
    d
}

/// True when every coefficient entry is an integer.
pub fn is_integral(f: &FourierExpansion) -> bool {
    f.iter().all(|(_, b)| b.entries().iter().all(|x| x.is_integer()))
}

/// Largest absolute numerator among the coefficients (diagnostics only).
pub fn height(f: &FourierExpansion) -> BigInt {
    f.iter()
        .flat_map(|(_, b)| b.entries().iter().map(|x| x.numer().abs()))
        .max()
        .unwrap_or_else(BigInt::zero)
}
