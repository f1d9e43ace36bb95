use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use siegel_core::json::{expansion_from_str, parse_rational};
use siegel_core::padic::{
    congruent, frobenius_descent, is_odd_prime, limit_profile, theorem41_check, vp, vp_expansion,
};
use siegel_core::qexpansion::{delta1, eisenstein1};
use siegel_core::symplectic::{coset_count, coset_reps};
use siegel_core::theta::{direct_sum, gram_a, rep_numbers, GramLattice};
use siegel_core::{rc_bracket, theta_r, BracketParams, FourierExpansion, Rational};

use crate::{Cli, Command};

pub enum Verdict {
    Ok,
    Failed,
}

type Res<T> = Result<T, String>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Res<FourierExpansion> {
    expansion_from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_gram(path: &Path) -> Res<GramLattice> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn odd_prime(p: u64) -> Res<u64> {
    if is_odd_prime(p) {
        Ok(p)
    } else {
        Err(format!("--prime {p} is not an odd prime"))
    }
}

fn weight_of(f: &FourierExpansion, flag: Option<&str>, name: &str) -> Res<Rational> {
    match flag {
        Some(s) => parse_rational(s).map_err(|e| e.to_string()),
        None => f
            .meta()
            .weight
            .clone()
            .ok_or_else(|| format!("--{name} is required: the input records no weight")),
    }
}

fn int_weight(f: &FourierExpansion, flag: Option<i64>) -> Res<i64> {
    if let Some(k) = flag {
        return Ok(k);
    }
    let w = weight_of(f, None, "k")?;
    if !w.is_integer() {
        return Err(format!("recorded weight {w} is not an integer; pass --k"));
    }
    w.to_integer().try_into().map_err(|_| "weight out of range".to_string())
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Res<()> {
    let mut text = serde_json::to_string(value).map_err(|e| e.to_string())?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Res<Verdict> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let out = cli.out.as_deref();
    let e = |x: siegel_core::Error| x.to_string();
    match cli.command {
        Command::Theta { gram, degree, bound } => {
            let lat = load_gram(&gram)?;
            emit(out, &rep_numbers(&lat, degree, bound.trace_bound).map_err(e)?)?;
        }
        Command::Mul { f, g } => emit(out, &load(&f)?.mul(&load(&g)?).map_err(e)?)?,
        Command::Pow { f, power } => emit(out, &load(&f)?.pow(power).map_err(e)?)?,
        Command::Up { f, prime } => emit(out, &load(&f)?.u_p(odd_prime(prime)?).map_err(e)?)?,
        Command::Dilate { f, factor } => {
            if factor == 0 {
                return Err("--factor must be at least 1".into());
            }
            emit(out, &load(&f)?.dilate(factor))?;
        }
        Command::Thetaop { f, r } => emit(out, &theta_r(&load(&f)?, r).map_err(e)?)?,
        Command::Bracket { f, g, r, k, l } => {
            let (f, g) = (load(&f)?, load(&g)?);
            let params = BracketParams::new(
                f.degree(),
                r,
                weight_of(&f, k.as_deref(), "k")?,
                weight_of(&g, l.as_deref(), "l")?,
            )
            .map_err(e)?;
            emit(out, &rc_bracket(&f, &g, &params).map_err(e)?)?;
        }
        Command::Vp { f, value, prime } => {
            let p = odd_prime(prime)?;
            let v = match (f, value) {
                (Some(path), _) => vp_expansion(&load(&path)?, p),
                (None, Some(x)) => vp(&parse_rational(&x).map_err(e)?, p),
                (None, None) => unreachable!("clap requires one of --f and --value"),
            }
            .map_err(e)?;
            emit(out, &json!({ "p": p, "valuation": v }))?;
        }
        Command::Congruent { f, g, prime, m, mode } => {
            let report = congruent(&load(&f)?, &load(&g)?, odd_prime(prime)?, m, mode.normalized).map_err(e)?;
            emit(out, &report)?;
            if !report.holds {
                return Ok(Verdict::Failed);
            }
        }
        Command::Frobenius { f, prime } => emit(out, &frobenius_descent(&load(&f)?, odd_prime(prime)?).map_err(e)?)?,
        Command::Limit { seq, f, prime } => {
            let seq = seq.iter().map(|p| load(p)).collect::<Res<Vec<_>>>()?;
            let profile = limit_profile(&seq, &load(&f)?, odd_prime(prime)?).map_err(e)?;
            emit(out, &json!({ "profile": profile }))?;
        }
        Command::Thm41 {
            f,
            k,
            prime,
            m,
            r,
            m_dilate,
        } => {
            let f = load(&f)?;
            let k = int_weight(&f, k)?;
            let report = theorem41_check(&f, k, odd_prime(prime)?, m, r, m_dilate).map_err(e)?;
            emit(out, &report)?;
            if !report.holds {
                return Ok(Verdict::Failed);
            }
        }
        Command::Cosets {
            degree,
            prime,
            count_only,
        } => {
            let p = odd_prime(prime)?;
            if count_only {
                // validates support before reporting the closed-form count
                coset_reps(degree, p).map_err(e)?;
                emit(out, &json!({ "count": coset_count(degree, p) }))?;
            } else {
                emit(out, &coset_reps(degree, p).map_err(e)?)?;
            }
        }
        Command::Eisenstein { weight, bound } => emit(out, &eisenstein1(weight, bound.trace_bound).map_err(e)?)?,
        Command::Delta { bound } => emit(out, &delta1(bound.trace_bound))?,
        Command::GramA { m, double } => {
            if m == 0 {
                return Err("--m must be at least 1".into());
            }
            let a = gram_a(m);
            emit(out, &if double { direct_sum(&a, &a) } else { a })?;
        }
    }
    Ok(Verdict::Ok)
}
