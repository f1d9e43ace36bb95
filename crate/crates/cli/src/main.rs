//! `siegel`: JSON-in, JSON-out front end to `siegel-core`.
//!
//! Exit status: 0 on success, 1 when a requested check produced a negative
//! verdict, 2 on usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "siegel",
    version,
    about = "Exact computations with Siegel modular form expansions"
)]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Bound {
    #[arg(long)]
    pub trace_bound: u64,
}

#[derive(Args, Debug)]
pub struct Mode {
    /// Plain congruence, offset 0 (default).
    #[arg(long, conflicts_with = "normalized")]
    pub plain: bool,
    /// Offset the threshold by the valuation of F.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Theta series of a lattice given as {"gram": [[..]], "rank": m}.
    Theta {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        bound: Bound,
    },
    /// Product of two expansions.
    Mul {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Power of an expansion.
    Pow {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        power: u64,
    },
    /// Coefficient extraction T ↦ a(pT).
    Up {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        prime: u64,
    },
    /// F(Z) ↦ F(cZ).
    Dilate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        factor: u64,
    },
    /// Compound theta operator of minor order r.
    Thetaop {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Rankin–Cohen type bracket D(f, g).
    Bracket {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        r: usize,
        /// Weight of f; defaults to the weight recorded in the file.
        #[arg(long)]
        k: Option<String>,
        /// Weight of g; defaults to the weight recorded in the file.
        #[arg(long)]
        l: Option<String>,
    },
    /// p-adic valuation of an expansion or a single rational.
    Vp {
        #[arg(long, required_unless_present = "value", conflicts_with = "value")]
        f: Option<PathBuf>,
        #[arg(long)]
        value: Option<String>,
        #[arg(long)]
        prime: u64,
    },
    /// Congruence of two expansions modulo p^m.
    Congruent {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        m: i64,
        #[command(flatten)]
        mode: Mode,
    },
    /// (G^p) | U(p).
    Frobenius {
        #[arg(long, alias = "g")]
        f: PathBuf,
        #[arg(long)]
        prime: u64,
    },
    /// Valuations of F_i − F along a sequence.
    Limit {
        #[arg(long, num_args = 1.., required = true)]
        seq: Vec<PathBuf>,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        prime: u64,
    },
    /// Theta-operator congruence through the bracket with a p-adic unit form.
    Thm41 {
        #[arg(long)]
        f: PathBuf,
        /// Weight of f; defaults to the weight recorded in the file.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m_dilate: u32,
    },
    /// Right coset representatives of the Siegel parabolic in Sp_n(F_p).
    Cosets {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        count_only: bool,
    },
    /// Degree-one Eisenstein series E_k.
    Eisenstein {
        #[arg(long)]
        weight: u32,
        #[command(flatten)]
        bound: Bound,
    },
    /// The discriminant form Δ.
    Delta {
        #[command(flatten)]
        bound: Bound,
    },
    /// Gram matrix of A_m, or of A_m ⊕ A_m with --double.
    GramA {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        double: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(commands::Verdict::Ok) => ExitCode::SUCCESS,
        Ok(commands::Verdict::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("siegel: {e}");
            ExitCode::from(2)
        }
    }
}
