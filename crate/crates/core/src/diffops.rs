//! Compound theta operators and the explicit Rankin–Cohen bracket.
//!
//! Everything acts on Fourier coefficients with the factors `(2πi)^{-r}`
//! already absorbed, so all outputs are rational. For a scalar expansion
//! `f = Σ a(T) q^T`, the operator `Θ^{[r]}` multiplies `a(T)` by the compound
//! matrix `T^{[r]}`. The bracket of two scalar expansions is
//!
//! ```text
//! D(f, g)(T) = Σ_{T₁+T₂=T} a_f(T₁) a_g(T₂)
//!              Σ_α (−1)^α C_α(l − (r−1)/2) C_{r−α}(k − (r−1)/2) P_α(T₁, T₂)
//! ```
//!
//! where `P_α(R, S)` is the coefficient of `λ^{r−α}` in `(R + λS)^{[r]}`,
//! homogeneous of degree `α` in `R` and `r − α` in `S`.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::halfint::{compound, HalfIntegralMatrix, SubsetOrder};
use crate::matrix::QMatrix;
use crate::qexpansion::{FourierExpansion, Shape};
use crate::Rational;

/// Degree, minor order and the two weights of a bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketParams {
    pub n: usize,
    pub r: usize,
    pub k: Rational,
    pub l: Rational,
}

impl BracketParams {
    pub fn new(n: usize, r: usize, k: Rational, l: Rational) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::Unsupported(format!("minor order {r} in degree {n}")));
        }
        Ok(BracketParams { n, r, k, l })
    }

    /// Integer-weight shorthand.
    pub fn with_int_weights(n: usize, r: usize, k: i64, l: i64) -> Result<Self> {
        Self::new(n, r, Rational::from_integer(k.into()), Rational::from_integer(l.into()))
    }

    /// The same bracket with the weights exchanged.
    pub fn swapped(&self) -> Self {
        BracketParams {
            n: self.n,
            r: self.r,
            k: self.l.clone(),
            l: self.k.clone(),
        }
    }

    /// `(r − 1)/2`.
    fn shift(&self) -> Rational {
        Rational::new(BigInt::from(self.r as i64 - 1), BigInt::from(2))
    }

    /// `(−1)^α C_α(l − (r−1)/2) C_{r−α}(k − (r−1)/2)` for `α = 0..=r`.
    pub fn term_weights(&self) -> Vec<Rational> {
        let sl = &self.l - self.shift();
        let sk = &self.k - self.shift();
        (0..=self.r)
            .map(|alpha| {
                let w = c_poly(alpha, &sl) * c_poly(self.r - alpha, &sk);
                if alpha % 2 == 1 {
                    -w
                } else {
                    w
                }
            })
            .collect()
    }

    /// `(−1)^r C_r(l − (r−1)/2)`, the constant in front of `Θ^{[r]}(f)·g`.
    pub fn p0_constant(&self) -> Rational {
        let c = c_poly(self.r, &(&self.l - self.shift()));
        if self.r % 2 == 1 {
            -c
        } else {
            c
        }
    }
}

/// `C_h(s) = s (s + 1/2) ⋯ (s + (h−1)/2)`; `C_0 = 1`.
pub fn c_poly(h: usize, s: &Rational) -> Rational {
    (0..h).fold(Rational::one(), |acc, i| {
        acc * (s + Rational::new(BigInt::from(i), BigInt::from(2)))
    })
}

/// `Θ^{[r]} f = Σ T^{[r]} a(T) q^T`.
pub fn theta_r(f: &FourierExpansion, r: usize) -> Result<FourierExpansion> {
    if f.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch("theta operator needs a scalar expansion".into()));
    }
    if r == 0 || r > f.degree() {
        return Err(Error::Unsupported(format!("minor order {r} in degree {}", f.degree())));
    }
    // the weight tag stays k; the representation becomes det^k ⊗ ρ^[r]
    Ok(f.map_blocks(Shape::Compound(r), |t, a| {
        compound(&t.to_rational(), r).scale(a.get(0, 0))
    }))
}

type Poly = Vec<Rational>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn permutation_sign(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Determinant of a square matrix with entries `a_ij + λ b_ij`, as a
/// polynomial in `λ` (coefficients in increasing degree).
fn linear_pencil_det(a: &QMatrix, b: &QMatrix) -> Poly {
    let r = a.rows();
    let mut acc = vec![Rational::zero(); r + 1];
    for perm in (0..r).permutations(r) {
        let mut term: Poly = vec![Rational::one()];
        for (i, &j) in perm.iter().enumerate() {
            term = poly_mul(&term, &vec![a.get(i, j).clone(), b.get(i, j).clone()]);
            if term.iter().all(Zero::is_zero) {
                break;
            }
        }
        let positive = permutation_sign(&perm);
        for (slot, c) in acc.iter_mut().zip(term) {
            if positive {
                *slot += c;
            } else {
                *slot -= c;
            }
        }
    }
    acc
}

/// Coefficients of `λ^0, …, λ^r` in `(R + λS)^{[r]}`.
pub fn lambda_compound_coeffs(rm: &QMatrix, sm: &QMatrix, r: usize) -> Result<Vec<QMatrix>> {
    if !rm.is_square() || !sm.is_square() || rm.rows() != sm.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            rm.rows(),
            rm.cols(),
            sm.rows(),
            sm.cols()
        )));
    }
    let n = rm.rows();
    if r == 0 || r > n {
        return Err(Error::Unsupported(format!("minor order {r} in size {n}")));
    }
    let order = SubsetOrder::new(n, r);
    let subsets = order.subsets();
    let dim = subsets.len();
    let mut out = vec![QMatrix::zeros(dim, dim); r + 1];
    for (i, rows) in subsets.iter().enumerate() {
        for (j, cols) in subsets.iter().enumerate() {
            let poly = linear_pencil_det(&rm.select(rows, cols), &sm.select(rows, cols));
            for (deg, c) in poly.into_iter().enumerate() {
                out[deg].set(i, j, c);
            }
        }
    }
    Ok(out)
}

/// `Σ_α w_α P_α(T₁, T₂)` for the bracket's term weights.
fn bracket_kernel(t1: &HalfIntegralMatrix, t2: &HalfIntegralMatrix, weights: &[Rational]) -> QMatrix {
    let r = weights.len() - 1;
    let coeffs = lambda_compound_coeffs(&t1.to_rational(), &t2.to_rational(), r).expect("keys share the degree");
    let dim = coeffs[0].rows();
    let mut acc = QMatrix::zeros(dim, dim);
    for (alpha, w) in weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        // P_α is the coefficient of λ^{r−α}
        acc = &acc + &coeffs[r - alpha].scale(w);
    }
    acc
}

fn check_bracket_inputs(f: &FourierExpansion, g: &FourierExpansion, params: &BracketParams) -> Result<()> {
    if f.shape() != Shape::Scalar || g.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch("bracket inputs must be scalar".into()));
    }
    if f.degree() != g.degree() {
        return Err(Error::DegreeMismatch(f.degree(), g.degree()));
    }
    if params.n != f.degree() {
        return Err(Error::DegreeMismatch(params.n, f.degree()));
    }
    if params.r == 0 || params.r > params.n {
        return Err(Error::Unsupported(format!(
            "minor order {} in degree {}",
            params.r, params.n
        )));
    }
    Ok(())
}

/// The bracket `D(f, g)` as a `Compound(r)` expansion with bound
/// `min(N_f, N_g)`.
pub fn rc_bracket(f: &FourierExpansion, g: &FourierExpansion, params: &BracketParams) -> Result<FourierExpansion> {
    check_bracket_inputs(f, g, params)?;
    let bound = f.trace_bound().min(g.trace_bound()) as i64;
    let weights = params.term_weights();
    let left: Vec<(&HalfIntegralMatrix, Rational)> = f.iter().map(|(t, b)| (t, b.get(0, 0).clone())).collect();
    let right: Vec<(i64, &HalfIntegralMatrix, Rational)> =
        g.iter().map(|(t, b)| (t.trace(), t, b.get(0, 0).clone())).collect();

    let acc = left
        .par_iter()
        .fold(
            HashMap::new,
            |mut acc: HashMap<HalfIntegralMatrix, QMatrix>, (t1, a)| {
                let budget = bound - t1.trace();
                for (tr, t2, b) in &right {
                    if *tr > budget {
                        break;
                    }
                    let kernel = bracket_kernel(t1, t2, &weights);
                    if kernel.is_zero() {
                        continue;
                    }
                    let term = kernel.scale(&(a * b));
                    let key = t1.add(t2);
                    match acc.get_mut(&key) {
                        Some(x) => *x = &*x + &term,
                        None => {
                            acc.insert(key, term);
                        }
                    }
                }
                acc
            },
        )
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                match a.get_mut(&k) {
                    Some(x) => *x = &*x + &v,
                    None => {
                        a.insert(k, v);
                    }
                }
            }
            a
        });

    let mut out = FourierExpansion::from_coeffs(params.n, bound as u64, Shape::Compound(params.r), acc)?;
    out.meta_mut().weight = Some(&params.k + &params.l);
    Ok(out)
}

/// The part of `D(f, g)` without derivatives of `g`:
/// `(−1)^r C_r(l − (r−1)/2) · Θ^{[r]}(f) · g`.
pub fn p0_part(f: &FourierExpansion, g: &FourierExpansion, params: &BracketParams) -> Result<FourierExpansion> {
    check_bracket_inputs(f, g, params)?;
    let theta = theta_r(f, params.r)?;
    Ok(theta.mul(g)?.scale(&params.p0_constant()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexpansion::{delta1, eisenstein1};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn frac(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn c_poly_values() {
        assert_eq!(c_poly(0, &frac(7, 3)), q(1));
        assert_eq!(c_poly(1, &frac(7, 3)), frac(7, 3));
        assert_eq!(c_poly(2, &q(4)), q(18));
        assert_eq!(c_poly(3, &q(1)), q(1) * frac(3, 2) * q(2));
    }

    #[test]
    fn serre_derivative_in_degree_one() {
        let f = FourierExpansion::from_degree1_ints(&[5, 3, -2, 7]);
        let th = theta_r(&f, 1).unwrap();
        for t in 0..=3i64 {
            let key = HalfIntegralMatrix::diagonal(&[t]);
            let expected = q(t) * f.coeff1(t);
            let got = th.coeff(&key).map_or_else(Rational::zero, |b| b.get(0, 0).clone());
            assert_eq!(got, expected);
        }
        assert!(theta_r(&FourierExpansion::one(2, 3), 1).unwrap().is_zero());
        assert!(theta_r(&FourierExpansion::one(2, 3), 2).unwrap().is_zero());
        assert!(theta_r(&f, 2).is_err());
        assert!(theta_r(&f, 0).is_err());
    }

    #[test]
    fn determinant_theta_in_degree_two() {
        let t = HalfIntegralMatrix::from_doubled(&[vec![2, 1], vec![1, 2]]).unwrap();
        let f = FourierExpansion::monomial(t.clone(), q(1), 2).unwrap();
        let th = theta_r(&f, 2).unwrap();
        assert_eq!(th.coeff(&t).unwrap(), &QMatrix::scalar(frac(3, 4)));
    }

    #[test]
    fn polarization_examples() {
        let r = QMatrix::from_i64_rows(&[vec![1, 2], vec![2, 5]]);
        let s = QMatrix::from_i64_rows(&[vec![3, -1], vec![-1, 4]]);
        let c1 = lambda_compound_coeffs(&r, &s, 1).unwrap();
        assert_eq!(c1, vec![r.clone(), s.clone()]);
        let c2 = lambda_compound_coeffs(&r, &s, 2).unwrap();
        // r11 s22 + s11 r22 − 2 r12 s12
        assert_eq!(c2[1], QMatrix::scalar(q(4 + 3 * 5 + 2 * 2)));
        assert_eq!(c2[0], QMatrix::scalar(r.det()));
        assert_eq!(c2[2], QMatrix::scalar(s.det()));
        let zero = QMatrix::zeros(2, 2);
        let c = lambda_compound_coeffs(&r, &zero, 2).unwrap();
        assert_eq!(
            c,
            vec![QMatrix::scalar(r.det()), QMatrix::zeros(1, 1), QMatrix::zeros(1, 1)]
        );
        assert!(lambda_compound_coeffs(&r, &QMatrix::zeros(3, 3), 1).is_err());
    }

    #[test]
    fn classical_bracket_e4_e6() {
        let bound = 8;
        let e4 = eisenstein1(4, bound).unwrap();
        let e6 = eisenstein1(6, bound).unwrap();
        let params = BracketParams::with_int_weights(1, 1, 4, 6).unwrap();
        let d = rc_bracket(&e4, &e6, &params).unwrap();
        let key = HalfIntegralMatrix::diagonal(&[1]);
        assert_eq!(d.coeff(&key).unwrap(), &QMatrix::scalar(q(-3456)));
        let delta = delta1(bound);
        for t in 0..=bound as i64 {
            let key = HalfIntegralMatrix::diagonal(&[t]);
            let got = d.coeff(&key).map_or_else(Rational::zero, |b| b.get(0, 0).clone());
            assert_eq!(got, q(-3456) * delta.coeff1(t), "t = {t}");
        }
    }

    #[test]
    fn bracket_with_constant() {
        let f = FourierExpansion::from_degree1_ints(&[1, 6, 0, 6]);
        let one = FourierExpansion::one(1, 3);
        let params = BracketParams::new(1, 1, q(1), frac(5, 2)).unwrap();
        let d = rc_bracket(&f, &one, &params).unwrap();
        let expected = theta_r(&f, 1).unwrap().scale(&params.p0_constant());
        assert!(d.same_coefficients(&expected));
        assert!(d.same_coefficients(&p0_part(&f, &one, &params).unwrap()));
        assert!(rc_bracket(&one, &one, &params).unwrap().is_zero());
        assert!(p0_part(&one, &f, &params).unwrap().is_zero());
    }

    #[test]
    fn p0_part_degree_one_formula() {
        let f = FourierExpansion::from_degree1_ints(&[2, 3, 5]);
        let g = FourierExpansion::from_degree1_ints(&[7, 11, 13]);
        let params = BracketParams::with_int_weights(1, 1, 4, 6).unwrap();
        let p0 = p0_part(&f, &g, &params).unwrap();
        for t in 0..=2i64 {
            let mut expected = q(0);
            for t1 in 0..=t {
                expected += q(t1) * f.coeff1(t1) * g.coeff1(t - t1);
            }
            expected *= q(-6);
            let got = p0
                .coeff(&HalfIntegralMatrix::diagonal(&[t]))
                .map_or_else(Rational::zero, |b| b.get(0, 0).clone());
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn params_validation() {
        assert!(BracketParams::with_int_weights(2, 0, 1, 1).is_err());
        assert!(BracketParams::with_int_weights(2, 3, 1, 1).is_err());
        let f = FourierExpansion::one(2, 1);
        let g = FourierExpansion::one(1, 1);
        let p = BracketParams::with_int_weights(2, 1, 1, 1).unwrap();
        assert!(rc_bracket(&f, &g, &p).is_err());
        let c = FourierExpansion::zero(2, 1, Shape::Compound(1));
        assert!(rc_bracket(&f, &c, &p).is_err());
    }
}
