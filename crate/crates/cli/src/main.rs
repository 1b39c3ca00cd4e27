//! `permrd` — ball volumes, covering-size bounds, covering codes, and
//! figure data for permutation spaces under the Kendall tau and Chebyshev
//! metrics.
//!
//! Every command is deterministic: identical invocations produce
//! byte-identical output.  `--seed` is accepted anywhere for interface
//! stability and ignored.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use permrd::ball::{
    chebyshev_ball_exact, chebyshev_ball_lower, chebyshev_ball_upper_bregman, kendall_ball_exact,
    kendall_ball_lower_quarter, kendall_ball_upper_binom,
};
use permrd::bounds::{bound_set, Basis, DistortionQuery};
use permrd::codes::{
    covering_radius, greedy_cover, minimal_cover_exact, render_codeword_file, BlockStructure,
    CoverObjective, CoveringCode,
};
use permrd::figures::{figure_table, FigureId, GridSpec};
use permrd::perm::Metric;
use permrd::verify::{run as run_verify, VerifyConfig};
use permrd::{Error, Result};

#[derive(Parser)]
#[command(
    name = "permrd",
    version,
    about = "Exact ball volumes, covering bounds, and covering codes on permutations"
)]
struct Cli {
    /// Accepted for interface stability and ignored; output is deterministic.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ball volume at a radius: exact value and certified bounds.
    Ball(BallArgs),
    /// Certified window on the optimal covering-code size.
    Bounds(BoundsArgs),
    /// The block construction (Chebyshev metric).
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Covering codes found by search.
    Cover {
        #[command(subcommand)]
        action: CoverAction,
    },
    /// Figure data tables as CSV.
    Figure(FigureArgs),
    /// Self-check suite against brute-force oracles.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
}

#[derive(Args)]
struct BallArgs {
    #[arg(long)]
    metric: Metric,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: u64,
    /// Exact volume (the default view).
    #[arg(long)]
    exact: bool,
    /// Certified upper bound.
    #[arg(long)]
    upper: bool,
    /// Certified lower bound.
    #[arg(long)]
    lower: bool,
    /// All of the above.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    metric: Metric,
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    d: u64,
    /// Bound the worst-case or the average-distortion optimum.
    #[arg(long, default_value = "worst")]
    basis: Basis,
}

#[derive(Subcommand)]
enum CodeAction {
    /// Build the block code with covering radius exactly d.
    Construct(ConstructArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: u64,
    /// Write the codeword file here.
    #[arg(long, value_name = "PATH")]
    emit: Option<PathBuf>,
    /// Re-measure the covering radius by full scan.
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum CoverAction {
    /// Greedy cover (max new coverage, lexicographic ties).
    Greedy(CoverArgs),
    /// Exact minimum cover by branch and bound (toy sizes).
    Exact(ExactArgs),
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    metric: Metric,
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    d: u64,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    metric: Metric,
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    d: u64,
    #[arg(long)]
    objective: CoverObjective,
}

#[derive(Args)]
struct FigureArgs {
    /// Which table: fig1, fig2, or fig3.
    id: FigureId,
    /// Permutation length (fig1 only).
    #[arg(long)]
    n: Option<usize>,
    /// Grid override, e.g. `1:612` for integers or `0.02:0.98:0.02`.
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum VerifyAction {
    /// Run every check.
    All {
        /// Enumeration cap for the oracle sweeps.
        #[arg(long = "max-n", default_value_t = 8)]
        max_n: usize,
    },
}

fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn ball_command(args: &BallArgs) -> Result<()> {
    let BallArgs { metric, n, r, .. } = *args;
    if n < 1 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    let show_exact = args.exact || args.all || !(args.upper || args.lower);
    let show_upper = args.upper || args.all;
    let show_lower = args.lower || args.all;
    if show_exact {
        let exact = match metric {
            Metric::Kendall => kendall_ball_exact(n, r),
            Metric::Chebyshev => chebyshev_ball_exact(n, r)?,
        };
        println!("{exact}");
    }
    // The bound formulas are derived for 1 <= r < n (Kendall) and
    // r <= n-1 (Chebyshev).  An explicit --lower/--upper outside that
    // window is an error; --all just skips what is not certified.
    let in_window = match metric {
        Metric::Kendall => r >= 1 && r < n as u64,
        Metric::Chebyshev => r <= n as u64 - 1,
    };
    if !in_window {
        if args.lower || args.upper {
            return Err(Error::Domain(format!(
                "no certified bound at n = {n}, r = {r}"
            )));
        }
        return Ok(());
    }
    match metric {
        Metric::Kendall => {
            if show_lower {
                let v = kendall_ball_lower_quarter(n, r)?;
                println!("lower {}", fmt_rational(&v));
            }
            if show_upper {
                println!("upper {}", kendall_ball_upper_binom(n, r));
            }
        }
        Metric::Chebyshev => {
            if show_lower {
                let v = chebyshev_ball_lower(n, r);
                println!("lower {}", fmt_rational(&v));
            }
            if show_upper {
                println!("upper_lg {:.12}", chebyshev_ball_upper_bregman(n, r).lg());
            }
        }
    }
    Ok(())
}

fn bounds_command(args: &BoundsArgs) -> Result<()> {
    let q = DistortionQuery::new(args.metric, args.n, args.d)?;
    let set = bound_set(&q, args.basis)?;
    println!(
        "bounds metric={} n={} D={} basis={}",
        args.metric.name(),
        args.n,
        args.d,
        set.basis.name()
    );
    if q.trivial_regime() {
        println!("note trivial-regime distortion budget");
    }
    println!(
        "lower_size {}  ~{:.6}  ({})",
        fmt_rational(&set.lower_size),
        set.lower_size.to_f64().unwrap_or(f64::INFINITY),
        set.lower_tag
    );
    println!(
        "upper_size {}  ~{:.6}  ({})",
        fmt_rational(&set.upper_size),
        set.upper_size.to_f64().unwrap_or(f64::INFINITY),
        set.upper_tag
    );
    println!("lower_rate {:.12}", set.lower_rate.rate);
    println!("upper_rate {:.12}", set.upper_rate.rate);
    println!("lower_excess {:.12}", set.lower_rate.excess);
    println!("upper_excess {:.12}", set.upper_rate.excess);
    Ok(())
}

fn construct_command(args: &ConstructArgs) -> Result<()> {
    let bs = BlockStructure::new(args.n, args.d)?;
    let code = CoveringCode::from_blocks(bs);
    println!("size {}", code.size());
    if let Some(path) = &args.emit {
        fs::write(path, render_codeword_file(&code)?)
            .map_err(|e| Error::Domain(format!("writing {}: {e}", path.display())))?;
    }
    if args.verify {
        let radius = covering_radius(&code)?;
        if radius == args.d {
            println!("radius {radius} OK");
        } else {
            println!("radius {radius} MISMATCH (claimed {})", args.d);
            return Err(Error::Domain("covering radius mismatch".into()));
        }
    }
    Ok(())
}

fn print_cover(code: &CoveringCode) {
    println!("size {}", code.size());
    println!("provenance {}", code.provenance.name());
    for w in code.iter() {
        println!("{w}");
    }
}

fn figure_command(args: &FigureArgs) -> Result<()> {
    let table = figure_table(args.id, args.n, args.grid.as_ref())?;
    fs::write(&args.out, table.to_csv())
        .map_err(|e| Error::Domain(format!("writing {}: {e}", args.out.display())))?;
    println!("{} rows {}", table.name, table.rows.len());
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Ball(args) => ball_command(args)?,
        Command::Bounds(args) => bounds_command(args)?,
        Command::Code {
            action: CodeAction::Construct(args),
        } => construct_command(args)?,
        Command::Cover { action } => match action {
            CoverAction::Greedy(args) => {
                print_cover(&greedy_cover(args.metric, args.n, args.d)?);
            }
            CoverAction::Exact(args) => {
                print_cover(&minimal_cover_exact(
                    args.metric,
                    args.n,
                    args.d,
                    args.objective,
                )?);
            }
        },
        Command::Figure(args) => figure_command(args)?,
        Command::Verify {
            action: VerifyAction::All { max_n },
        } => {
            let report = run_verify(&VerifyConfig::with_max_n(*max_n));
            print!("{}", report.render());
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    // Die quietly on SIGPIPE instead of panicking when stdout is a closed pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::ExactInfeasible {
            lower_lg, upper_lg, ..
        }) => {
            // No exact route at this size; report the certified window.
            eprintln!("exact computation infeasible at this size");
            println!("lower_lg {lower_lg:.12}");
            println!("upper_lg {upper_lg:.12}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
