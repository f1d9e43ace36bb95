//! p-adic valuations of expansions, congruence reports, and the congruence
//! pipelines (Frobenius descent, the `𝓔_i` products, p-adic limit profiles
//! and the theta-operator congruence via brackets).
//!
//! All verdicts are "up to the common trace bound" of the expansions
//! involved; every report carries that bound.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diffops::{rc_bracket, theta_r, BracketParams};
use crate::error::{Error, Result};
use crate::halfint::HalfIntegralMatrix;
use crate::qexpansion::{FourierExpansion, Meta, Shape};
use crate::theta::{p_special_double, rep_numbers};
use crate::Rational;

/// A p-adic valuation: an integer or `+∞` (the valuation of zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add<i64> for Valuation {
    type Output = Valuation;
    fn add(self, rhs: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Valuation::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Valuation::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_odd_prime(p: u64) -> bool {
    p != 2 && is_prime(p)
}

fn require_odd_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

fn int_valuation(x: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!x.is_zero());
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

fn rational_valuation(x: &Rational, p: &BigInt) -> Valuation {
    if x.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
    }
}

/// `ν_p(x)`.
pub fn vp(x: &Rational, p: u64) -> Result<Valuation> {
    require_odd_prime(p)?;
    Ok(rational_valuation(x, &BigInt::from(p)))
}

/// Minimum of `ν_p` over every entry of every stored coefficient; `+∞` for
/// the zero expansion. Only the truncation is seen.
pub fn vp_expansion(f: &FourierExpansion, p: u64) -> Result<Valuation> {
    require_odd_prime(p)?;
    let pb = BigInt::from(p);
    Ok(f.iter()
        .flat_map(|(_, b)| b.entries().iter())
        .map(|x| rational_valuation(x, &pb))
        .min()
        .unwrap_or(Valuation::Infinite))
}

/// Outcome of comparing two expansions modulo `p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub p: u64,
    pub m: i64,
    pub holds: bool,
    /// `min_T ν_p(a_F(T) − a_G(T))` over the common bound.
    pub min_valuation: Valuation,
    /// First key (in expansion order) attaining `min_valuation`.
    pub witness: Option<HalfIntegralMatrix>,
    pub normalized: bool,
    /// The trace bound the comparison was made up to.
    pub bound: u64,
}

impl CongruenceReport {
    /// `min_valuation − m`; `None` when the difference vanished.
    pub fn margin(&self) -> Option<i64> {
        self.min_valuation.finite().map(|v| v - self.m)
    }
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    bound: u64,
    holds: bool,
    m: i64,
    min_valuation: Valuation,
    normalized: bool,
    p: u64,
    witness_t2: Option<HalfIntegralMatrix>,
}

impl Serialize for CongruenceReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            bound: self.bound,
            holds: self.holds,
            m: self.m,
            min_valuation: self.min_valuation,
            normalized: self.normalized,
            p: self.p,
            witness_t2: self.witness.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CongruenceReport {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ReportJson::deserialize(d)?;
        Ok(CongruenceReport {
            p: r.p,
            m: r.m,
            holds: r.holds,
            min_valuation: r.min_valuation,
            witness: r.witness_t2,
            normalized: r.normalized,
            bound: r.bound,
        })
    }
}

/// Smallest valuation of `F − G` on the common bound, with the first key
/// attaining it.
fn difference_valuation(
    f: &FourierExpansion,
    g: &FourierExpansion,
    p: u64,
) -> Result<(Valuation, Option<HalfIntegralMatrix>, u64)> {
    let diff = f.sub(g)?;
    let pb = BigInt::from(p);
    let mut best = Valuation::Infinite;
    let mut witness = None;
    for (t, block) in diff.iter() {
        let v = block
            .entries()
            .iter()
            .map(|x| rational_valuation(x, &pb))
            .min()
            .unwrap_or(Valuation::Infinite);
        if v < best {
            best = v;
            witness = Some(t.clone());
        }
    }
    Ok((best, witness, diff.trace_bound()))
}

/// `F ≡ G (mod p^m)` on the common bound. With `normalized` the threshold
/// is `m + ν_p(F)`, otherwise `m`.
pub fn congruent(
    f: &FourierExpansion,
    g: &FourierExpansion,
    p: u64,
    m: i64,
    normalized: bool,
) -> Result<CongruenceReport> {
    require_odd_prime(p)?;
    let (min_valuation, witness, bound) = difference_valuation(f, g, p)?;
    let offset = if normalized {
        vp_expansion(&f.truncate(bound), p)?
    } else {
        Valuation::Finite(0)
    };
    let holds = min_valuation >= offset + m;
    Ok(CongruenceReport {
        p,
        m,
        holds,
        min_valuation,
        witness,
        normalized,
        bound,
    })
}

/// `H = (G^p) | U(p)`, which satisfies `H ≡ G (mod p)`. Bound `⌊N_G / p⌋`.
pub fn frobenius_descent(g: &FourierExpansion, p: u64) -> Result<FourierExpansion> {
    require_odd_prime(p)?;
    if g.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch(
            "Frobenius descent needs a scalar expansion".into(),
        ));
    }
    if let Valuation::Finite(v) = vp_expansion(g, p)? {
        if v < 0 {
            return Err(Error::NotPIntegral(v));
        }
    }
    let mut h = g.pow(p)?.u_p(p)?;
    if let Some(w) = g.meta().weight.clone() {
        h.meta_mut().weight = Some(w * Rational::from_integer(BigInt::from(p)));
    }
    Ok(h)
}

/// `𝓔_i = Π_{j<i} F_{k(p−1)p^j}` with the family realized as powers of a
/// single weight-`(p−1)` form `F_base ≡ 1 (mod p)`; this is
/// `F_base^{k(p^i − 1)/(p − 1)}`.
pub fn script_e(i: u32, f_base: &FourierExpansion, k: u64, p: u64) -> Result<FourierExpansion> {
    require_odd_prime(p)?;
    if i == 0 {
        return Err(Error::Unsupported("script_e needs i >= 1".into()));
    }
    let one = FourierExpansion::one(f_base.degree(), f_base.trace_bound());
    if !congruent(f_base, &one, p, 1, false)?.holds {
        return Err(Error::Precondition("base form is not congruent to 1 mod p".into()));
    }
    let pi = p
        .checked_pow(i)
        .ok_or_else(|| Error::Unsupported("p^i overflows".into()))?;
    let exponent = k * ((pi - 1) / (p - 1));
    let mut e = f_base.pow(exponent)?;
    *e.meta_mut() = Meta {
        weight: Some(Rational::from_integer(BigInt::from(k * (pi - 1)))),
        level: f_base.meta().level,
        character: f_base.meta().character.clone(),
    };
    Ok(e)
}

/// `ν_p(F_m − F)` for each member of `seq`; values growing without bound
/// indicate `F_m → F` p-adically.
pub fn limit_profile(seq: &[FourierExpansion], f: &FourierExpansion, p: u64) -> Result<Vec<Valuation>> {
    require_odd_prime(p)?;
    if seq.is_empty() {
        return Err(Error::Precondition("empty sequence".into()));
    }
    seq.iter()
        .map(|fm| difference_valuation(fm, f, p).map(|(v, _, _)| v))
        .collect()
}

/// Parameters of the theta-operator congruence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem41Params {
    /// Weight of `f`.
    pub k: i64,
    pub p: u64,
    /// Target exponent: `Θ(f)` is compared modulo `p^{m + ν}`.
    pub m: u32,
    /// Minor order of the theta operator.
    pub r: usize,
    /// The auxiliary form is dilated by `p^{m_dilate − 1}`.
    pub m_dilate: u32,
}

/// Checks `D(f, g) ≡ (−1)^r C_r(l − (r−1)/2) Θ^{[r]}(f) (mod p^{m + ν})`
/// where `g = F_{p−1}^{p^{m−1}}(p^{m_dilate−1} Z)`, `l = (p − 1)p^{m−1}`,
/// `F_{p−1}` is the theta series of `A_{p−1} ⊕ A_{p−1}` and `ν` is the
/// valuation of the constant in front of `Θ^{[r]}(f)`.
pub fn theorem41_check(
    f: &FourierExpansion,
    k: i64,
    p: u64,
    m: u32,
    r: usize,
    m_dilate: u32,
) -> Result<CongruenceReport> {
    let params = Theorem41Params { k, p, m, r, m_dilate };
    validate_theorem41(f, &params)?;
    let c = p.pow(m_dilate - 1);
    let base_bound = f.trace_bound().div_ceil(c);
    let base = rep_numbers(&p_special_double(p), f.degree(), base_bound)?;
    theorem41_check_with_base(f, &base, &params)
}

fn validate_theorem41(f: &FourierExpansion, params: &Theorem41Params) -> Result<()> {
    require_odd_prime(params.p)?;
    if f.shape() != Shape::Scalar {
        return Err(Error::ShapeMismatch("theta congruence needs a scalar expansion".into()));
    }
    if params.m == 0 || params.m_dilate == 0 {
        return Err(Error::Unsupported("m and m_dilate must be >= 1".into()));
    }
    if params.r == 0 || params.r > f.degree() {
        return Err(Error::Unsupported(format!(
            "minor order {} in degree {}",
            params.r,
            f.degree()
        )));
    }
    if let Valuation::Finite(v) = vp_expansion(f, params.p)? {
        if v < 0 {
            return Err(Error::NotPIntegral(v));
        }
    }
    Ok(())
}

/// As [`theorem41_check`] with a caller-supplied weight-`(p−1)` form
/// `base ≡ 1 (mod p)`.
pub fn theorem41_check_with_base(
    f: &FourierExpansion,
    base: &FourierExpansion,
    params: &Theorem41Params,
) -> Result<CongruenceReport> {
    validate_theorem41(f, params)?;
    let p = params.p;
    let one = FourierExpansion::one(base.degree(), base.trace_bound());
    if !congruent(base, &one, p, 1, false)?.holds {
        return Err(Error::Precondition("auxiliary form is not congruent to 1 mod p".into()));
    }
    let c = p.pow(params.m_dilate - 1);
    let g = base.pow(p.pow(params.m - 1))?.dilate(c);
    if g.trace_bound() < f.trace_bound() {
        return Err(Error::InsufficientBound {
            need: f.trace_bound(),
            have: g.trace_bound(),
        });
    }
    let l = Rational::from_integer(BigInt::from((p - 1) * p.pow(params.m - 1)));
    let bracket_params = BracketParams::new(f.degree(), params.r, Rational::from_integer(params.k.into()), l)?;
    let bracket = rc_bracket(f, &g, &bracket_params)?;
    let constant = bracket_params.p0_constant();
    let Valuation::Finite(nu) = vp(&constant, p)? else {
        return Err(Error::Precondition("the theta-operator constant vanishes".into()));
    };
    let reference = theta_r(f, params.r)?.scale(&constant);
    congruent(&bracket, &reference, p, i64::from(params.m) + nu, false)
}

/// Smallest `m_dilate ≤ max_dilate` for which [`theorem41_check`] holds.
pub fn minimal_dilation(
    f: &FourierExpansion,
    k: i64,
    p: u64,
    m: u32,
    r: usize,
    max_dilate: u32,
) -> Result<Option<u32>> {
    for md in 1..=max_dilate {
        if theorem41_check(f, k, p, m, r, md)?.holds {
            return Ok(Some(md));
        }
    }
    Ok(None)
}

/// `pow(F, p^{i−1})`, the power that lifts `F ≡ 1 (mod p)` to `≡ 1 (mod p^i)`.
pub fn p_power_lift(f: &FourierExpansion, p: u64, i: u32) -> Result<FourierExpansion> {
    if i == 0 {
        return Err(Error::Unsupported("lift exponent must be >= 1".into()));
    }
    f.pow(p.pow(i - 1))
}

/// True if every coefficient is a `p`-integral rational.
pub fn is_p_integral(f: &FourierExpansion, p: u64) -> Result<bool> {
    Ok(match vp_expansion(f, p)? {
        Valuation::Finite(v) => v >= 0,
        Valuation::Infinite => true,
    })
}
