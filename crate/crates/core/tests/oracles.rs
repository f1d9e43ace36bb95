//! Checks against independently computed values.

mod common;

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siegel_core::diffops::{rc_bracket, BracketParams};
use siegel_core::halfint::HalfIntegralMatrix;
use siegel_core::qexpansion::{delta1, eisenstein1, FourierExpansion};
use siegel_core::symplectic::{coset_reps, omega, same_coset, ModMatrix, SymplecticModP};
use siegel_core::theta::{
    a_cycle_automorphism, direct_sum, gram_a, is_p_special_witness, p_special_double, rep_numbers, GramLattice,
};
use siegel_core::Rational;

use common::{matches_counts, naive_rep_numbers, q, random_expansion};

fn divisors(n: i64) -> impl Iterator<Item = i64> {
    (1..=n).filter(move |d| n % d == 0)
}

#[test]
fn theta_matches_naive_enumeration_on_more_lattices() {
    let lattices = [
        GramLattice::new(&[vec![2]]).unwrap(),
        GramLattice::new(&[vec![2, 0], vec![0, 2]]).unwrap(),
        GramLattice::new(&[vec![2, 1], vec![1, 4]]).unwrap(),
        gram_a(3),
    ];
    for lat in &lattices {
        for n in 1..=2 {
            for bound in 0..=3 {
                let theta = rep_numbers(lat, n, bound).unwrap();
                assert!(
                    matches_counts(&theta, &naive_rep_numbers(lat, n, bound)),
                    "{lat:?} n={n} N={bound}"
                );
            }
        }
    }
}

#[test]
fn a2_degree_one_divisor_formula() {
    // r_{A2}(t) = 6 Σ_{d | t} χ_{-3}(d)
    let theta = rep_numbers(&gram_a(2), 1, 30).unwrap();
    assert_eq!(theta.coeff1(0), q(1));
    for t in 1..=30 {
        let s: i64 = divisors(t)
            .map(|d| match d % 3 {
                1 => 1,
                2 => -1,
                _ => 0,
            })
            .sum();
        assert_eq!(theta.coeff1(t), q(6 * s), "t={t}");
    }
}

#[test]
fn direct_sum_multiplies_theta_series() {
    let pairs = [(gram_a(1), gram_a(2)), (gram_a(2), gram_a(2)), (gram_a(1), gram_a(3))];
    for (a, b) in &pairs {
        let sum = direct_sum(a, b);
        for (n, bound) in [(1usize, 6u64), (2, 2)] {
            let lhs = rep_numbers(&sum, n, bound).unwrap();
            let rhs = rep_numbers(a, n, bound)
                .unwrap()
                .mul(&rep_numbers(b, n, bound).unwrap())
                .unwrap();
            assert!(lhs.same_coefficients(&rhs), "n={n}");
        }
    }
}

#[test]
fn levels_of_root_lattices() {
    assert_eq!(gram_a(1).level(), 4);
    assert_eq!(gram_a(2).level(), 3);
    assert_eq!(gram_a(4).level(), 5);
    assert_eq!(gram_a(6).level(), 7);
    assert_eq!(p_special_double(5).level(), 5);
    assert_eq!(GramLattice::new(&[vec![2, 0], vec![0, 2]]).unwrap().level(), 4);
}

#[test]
fn cyclic_automorphisms_witness_p_special() {
    for p in [3u64, 5, 7] {
        let m = p as usize - 1;
        let sigma = a_cycle_automorphism(m);
        assert!(is_p_special_witness(&gram_a(m), &sigma, p).unwrap(), "p={p}");
    }
    let identity = vec![vec![1, 0], vec![0, 1]];
    assert!(!is_p_special_witness(&gram_a(2), &identity, 3).unwrap());
}

#[test]
fn theta_of_p_special_lattices_is_one_mod_p_to_larger_bounds() {
    for p in [3u64, 5] {
        let theta = rep_numbers(&p_special_double(p), 1, 8).unwrap();
        for (t, b) in theta.iter() {
            let c = b.get(0, 0);
            if t.is_zero() {
                assert_eq!(c, &q(1));
            } else {
                assert!(c.numer().is_multiple_of(&(p.into())), "p={p} t={t:?}");
            }
        }
    }
}

#[test]
fn eisenstein_series_from_divisor_sums() {
    let bound = 20;
    let e4 = eisenstein1(4, bound).unwrap();
    let e6 = eisenstein1(6, bound).unwrap();
    assert_eq!(e4.coeff1(0), q(1));
    assert_eq!(e6.coeff1(0), q(1));
    for t in 1..=bound as i64 {
        let s3: i64 = divisors(t).map(|d| d.pow(3)).sum();
        let s5: i64 = divisors(t).map(|d| d.pow(5)).sum();
        assert_eq!(e4.coeff1(t), q(240 * s3));
        assert_eq!(e6.coeff1(t), q(-504 * s5));
    }
}

#[test]
fn delta_matches_product_formula() {
    // q Π (1 − q^n)^24 with plain integer arithmetic
    let bound = 20usize;
    let mut series = vec![0i64; bound + 1];
    series[1] = 1;
    for n in 1..=bound {
        for _ in 0..24 {
            for i in (n..=bound).rev() {
                series[i] -= series[i - n];
            }
        }
    }
    let delta = delta1(bound as u64);
    for (t, c) in series.iter().enumerate() {
        assert_eq!(delta.coeff1(t as i64), q(*c), "t={t}");
    }
}

#[test]
fn degree_one_bracket_is_classical_first_rankin_cohen() {
    // k f·g' − l f'·g with ' = q d/dq
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, l) in [(4i64, 6i64), (1, 1), (12, -2), (0, 5)] {
        let f = random_expansion(&mut rng, 1, 7, 30, None);
        let g = random_expansion(&mut rng, 1, 7, 30, None);
        let d = rc_bracket(&f, &g, &BracketParams::with_int_weights(1, 1, k, l).unwrap()).unwrap();
        for t in 0..=7i64 {
            let mut want = q(0);
            for a in 0..=t {
                let b = t - a;
                want += (q(k * b) - q(l * a)) * f.coeff1(a) * g.coeff1(b);
            }
            let got = d
                .coeff(&HalfIntegralMatrix::diagonal(&[t]))
                .map_or(q(0), |m| m.get(0, 0).clone());
            assert_eq!(got, want, "k={k} l={l} t={t}");
        }
    }
}

#[test]
fn e4_e6_bracket_to_larger_bound() {
    let bound = 15;
    let d = rc_bracket(
        &eisenstein1(4, bound).unwrap(),
        &eisenstein1(6, bound).unwrap(),
        &BracketParams::with_int_weights(1, 1, 4, 6).unwrap(),
    )
    .unwrap();
    let delta = delta1(bound);
    for t in 0..=bound as i64 {
        let got = d
            .coeff(&HalfIntegralMatrix::diagonal(&[t]))
            .map_or(q(0), |m| m.get(0, 0).clone());
        assert_eq!(got, q(-3456) * delta.coeff1(t));
    }
}

fn sl2(p: u64) -> Vec<SymplecticModP> {
    let mut out = Vec::new();
    let p2 = p * p;
    for code in 0..p2 * p2 {
        let e: Vec<i64> = (0..4).map(|i| ((code / p.pow(i)) % p) as i64).collect();
        if let Ok(s) = SymplecticModP::new(ModMatrix::from_rows(p, &[vec![e[0], e[1]], vec![e[2], e[3]]])) {
            out.push(s);
        }
    }
    out
}

#[test]
fn sl2_f5_brute_force_cosets() {
    let group = sl2(5);
    assert_eq!(group.len(), 120);
    let reps = coset_reps(1, 5).unwrap();
    assert_eq!(reps.len(), 6);
    for g in &group {
        let hits: Vec<_> = reps.iter().filter(|r| same_coset(&r.mat, g).unwrap()).collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].cell, g.cell());
    }
}

#[test]
fn omega_is_symplectic_and_has_expected_cell() {
    for n in 1..=3 {
        for j in 0..=n {
            let w = omega(n, j, 5).unwrap();
            assert_eq!(w.cell(), j);
            assert_eq!(w.mul(&w.inverse()), SymplecticModP::identity(n, 5));
        }
    }
}

#[test]
fn random_integral_expansions_keep_integrality_under_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_expansion(&mut rng, 2, 3, 5, Some(1));
    let g: FourierExpansion = f.pow(3).unwrap();
    assert!(siegel_core::qexpansion::is_integral(&g));
    assert_eq!(
        g.scalar_coeff(&HalfIntegralMatrix::zero(2)),
        Rational::from_integer(1.into())
    );
}
