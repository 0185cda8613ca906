//! Command line driver for the `ffquat` arithmetic library.
//!
//! Every subcommand is deterministic: identical arguments produce identical
//! bytes on stdout (worker count only changes how fast they arrive).
//! Diagnostics and progress notes go to stderr. Exit codes: 0 on success,
//! 1 when `selftest` finds a violation, 2 for rejected inputs, 3 when an
//! internal consistency check trips.

mod cmd;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffquat_cli::checks;

use output::Format;

#[derive(Parser)]
#[command(name = "ffquat", version, about = "Class sets, Hecke operators and trace-zero point counts for definite quaternion algebras over F_q(t)")]
struct Cli {
    /// Worker threads for the sweep commands (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Reserved. Nothing here draws random numbers.
    #[arg(long, global = true, hide = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ExtOpts {
    /// Base field size (an odd prime)
    #[arg(long, default_value_t = 3)]
    q: u64,

    /// Monic irreducible discriminant of odd degree, e.g. "t^3+2*t+1"
    #[arg(long = "D")]
    d: String,
}

#[derive(Args)]
struct AlgOpts {
    /// Base field size (an odd prime)
    #[arg(long, default_value_t = 3)]
    q: u64,

    /// Monic irreducible prime ramified in the algebra, e.g. "t^3-t-1"
    #[arg(long = "P0")]
    p0: String,

    /// Expected nonresidue defining the algebra; checked against the one in use
    #[arg(long)]
    delta: Option<u64>,

    /// Directory for persisted class sets (reused across runs when valid)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct IoOpts {
    /// Write the primary output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format, where a command supports more than one
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Order counts and functional-equation data of k(sqrt(D))
    Lseries {
        #[command(flatten)]
        ext: ExtOpts,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Class number of the maximal order of k(sqrt(D))
    Classnum {
        #[command(flatten)]
        ext: ExtOpts,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Quaternion order computations
    #[command(subcommand)]
    Quat(QuatCmd),

    /// Integral Hecke operators on the ideal-class basis
    Brandt {
        #[command(flatten)]
        alg: AlgOpts,
        /// Single operator prime, e.g. "t"; omit to sweep degrees
        #[arg(long = "T")]
        t: Option<String>,
        /// Sweep all monic irreducible primes up to this degree
        #[arg(long, default_value_t = 2)]
        deg_max: usize,
        /// Slack allowed when validating the cuspidal spectrum bound
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Trace-zero embeddings of a discriminant and their class-group orbits
    Gross {
        #[command(flatten)]
        alg: AlgOpts,
        /// Monic irreducible discriminant of odd degree, inert at P0
        #[arg(long = "D")]
        d: String,
        /// Subgroup to count against: "pic", "trivial", or generators "1,0;0,2"
        #[arg(long)]
        subgroup: Option<String>,
        /// Require the subgroup index to stay below |D|^eta
        #[arg(long)]
        eta: Option<f64>,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Discrepancy sweep over every inert discriminant of a degree range
    Equidist {
        #[command(flatten)]
        alg: AlgOpts,
        /// Smallest discriminant degree (odd degrees only are scanned)
        #[arg(long, default_value_t = 3)]
        deg_min: usize,
        /// Largest discriminant degree
        #[arg(long, default_value_t = 9)]
        deg_max: usize,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Least degree at which some discriminant meets every ideal class
    Surjectivity {
        #[command(flatten)]
        alg: AlgOpts,
        /// Largest discriminant degree to try
        #[arg(long, default_value_t = 11)]
        deg_max: usize,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Rank-2 module computations in characteristic p
    #[command(subcommand)]
    Drinfeld(DrinfeldCmd),

    /// Complex multiplication by the square root of t, reduced prime by prime
    CmDemo {
        /// Base field size (an odd prime)
        #[arg(long, default_value_t = 3)]
        q: u64,
        /// Largest reduction prime degree
        #[arg(long, default_value_t = 3)]
        deg_max: usize,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Convolution expansion of an eigenform against a class-group character
    Rankin {
        #[command(flatten)]
        alg: AlgOpts,
        /// Monic irreducible discriminant of odd degree, inert at P0
        #[arg(long = "D")]
        d: String,
        /// Character index into the dual group (0 = principal)
        #[arg(long, default_value_t = 0)]
        chi: usize,
        /// Eigenform index into the spectral basis (default: first cuspidal)
        #[arg(long)]
        form: Option<usize>,
        /// Slack allowed when validating the zeros against the critical line
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Also scan central values against period sums over every character
        #[arg(long)]
        slow: bool,
        #[command(flatten)]
        io: IoOpts,
    },

    /// Run the built-in verification suite
    Selftest {
        /// Base field size (an odd prime)
        #[arg(long, default_value_t = 3)]
        q: u64,
        /// Depth of the suite
        #[arg(long, value_enum, default_value_t = checks::Level::Full)]
        level: checks::Level,
        /// Largest discrepancy-sweep degree (default depends on level)
        #[arg(long)]
        deg_max: Option<usize>,
        /// Largest surjectivity-search degree (default depends on level)
        #[arg(long)]
        surj_max: Option<usize>,
        /// Also run the period-ratio scan (minutes, not seconds)
        #[arg(long)]
        slow: bool,
    },
}

#[derive(Subcommand)]
enum QuatCmd {
    /// Enumerate the left ideal classes of the standard maximal order
    Classes {
        #[command(flatten)]
        alg: AlgOpts,
        #[command(flatten)]
        io: IoOpts,
    },
}

#[derive(Subcommand)]
enum DrinfeldCmd {
    /// Supersingular j-invariants over the quadratic extension of a prime
    Ss {
        #[command(flatten)]
        alg: AlgOpts,
        #[command(flatten)]
        io: IoOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: worker pool: {err}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Rejected inputs and unreachable requests exit 2; a tripped internal
/// consistency check exits 3.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ffquat::Error>() {
        Some(ffquat::Error::Internal(_)) => 3,
        _ => 2,
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Lseries { ext, io } => cmd::lseries(&ext, &io)?,
        Command::Classnum { ext, io } => cmd::classnum(&ext, &io)?,
        Command::Quat(QuatCmd::Classes { alg, io }) => cmd::quat_classes(&alg, &io)?,
        Command::Brandt {
            alg,
            t,
            deg_max,
            tol,
            io,
        } => cmd::brandt(&alg, t.as_deref(), deg_max, tol, &io)?,
        Command::Gross {
            alg,
            d,
            subgroup,
            eta,
            io,
        } => cmd::gross(&alg, &d, subgroup.as_deref(), eta, &io)?,
        Command::Equidist {
            alg,
            deg_min,
            deg_max,
            io,
        } => cmd::equidist(&alg, deg_min, deg_max, &io)?,
        Command::Surjectivity { alg, deg_max, io } => cmd::surjectivity(&alg, deg_max, &io)?,
        Command::Drinfeld(DrinfeldCmd::Ss { alg, io }) => cmd::drinfeld_ss(&alg, &io)?,
        Command::CmDemo { q, deg_max, io } => cmd::cm_demo(q, deg_max, &io)?,
        Command::Rankin {
            alg,
            d,
            chi,
            form,
            tol,
            slow,
            io,
        } => cmd::rankin(&alg, &d, chi, form, tol, slow, &io)?,
        Command::Selftest {
            q,
            level,
            deg_max,
            surj_max,
            slow,
        } => return cmd::selftest(q, level, deg_max, surj_max, slow),
    }
    Ok(0)
}
