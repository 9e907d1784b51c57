//! `ppclab`: generate samples, count close pairs, measure star-discrepancy
//! and check the discrepancy bound from the command line.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ppclab_core::prooflab::{proof_report, ProofOptions};
use ppclab_core::sequences::{golden_alpha, load_points, DEFAULT_QUADRATIC_ALPHA};
use ppclab_core::{
    bound_check, generate, pair_counts_fast, star_discrepancy_exact, SequenceKind, SequenceSample,
    SequenceSpec,
};

use output::Format;

#[derive(Parser)]
#[command(
    name = "ppclab",
    version,
    about = "Pair correlations and star-discrepancy of sequences in [0,1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated sample as a point file.
    Generate {
        #[command(flatten)]
        source: SourceArgs,
        /// Destination file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Close-pair counts, R(s, N) and the deviation F(K, N).
    Ppc {
        #[command(flatten)]
        source: SourceArgs,
        /// Largest threshold index s (default: min(10, N/2)).
        #[arg(long)]
        s_max: Option<usize>,
        /// K for F(K, N) (default: s_max).
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact star-discrepancy with its witness.
    Discrepancy {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare N·D*_N with 5·max(N^(4/5), sqrt(N·F(K², N))).
    VerifyBound {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bins, window moments, minimizer and inequality chain for one sample.
    Prooflab {
        #[command(flatten)]
        source: SourceArgs,
        /// Bin width multiplier K (default: smallest admissible K).
        #[arg(long)]
        k: Option<usize>,
        /// Minimizer B (default: the discrepancy witness).
        #[arg(long)]
        b: Option<f64>,
        /// Minimizer H (default: H(N, K)).
        #[arg(long)]
        h: Option<f64>,
        /// Random feasible vectors tried against the minimizer.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Seed for the minimizer trials.
        #[arg(long, default_value_t = 0)]
        trial_seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kronecker,
    Quadratic,
    Vdc,
    #[value(name = "sqrt_n")]
    SqrtN,
    #[value(name = "uniform_random")]
    UniformRandom,
}

#[derive(Args)]
struct SourceArgs {
    /// Read points from a point file instead of generating them.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Multiplier for kronecker (default (√5−1)/2) and quadratic (default √2).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Base for vdc (default 2).
    #[arg(long)]
    base: Option<u32>,
    /// Seed for uniform_random (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of points; with --input, keeps the first n.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Core(ppclab_core::Error),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) if e.is_io() => 2,
            Failure::Core(_) => 1,
            Failure::Io(..) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<ppclab_core::Error> for Failure {
    fn from(e: ppclab_core::Error) -> Self {
        Failure::Core(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ppclab: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("PPCLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        usage(format!(
            "PPCLAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| usage(format!("cannot configure {threads} threads: {e}")))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { source, out } => {
            if source.input.is_some() {
                return Err(usage("generate needs --kind, not --input"));
            }
            check_out(out.as_deref())?;
            let sample = load_sample(&source)?;
            output::emit(
                &ppclab_core::sequences::write_points(&sample),
                out.as_deref(),
            )
        }
        Command::Ppc {
            source,
            s_max,
            k,
            output,
        } => {
            check_out(output.out.as_deref())?;
            let sample = load_sample(&source)?;
            let s_max = s_max.unwrap_or_else(|| (sample.len() / 2).min(10));
            let table = pair_counts_fast(&sample, s_max)?;
            let k = k.unwrap_or(s_max);
            let rendered = output::ppc(&table, k, output.format)?;
            output::emit(&rendered, output.out.as_deref())
        }
        Command::Discrepancy { source, output } => {
            check_out(output.out.as_deref())?;
            let sample = load_sample(&source)?;
            let report = star_discrepancy_exact(&sample)?;
            output::emit(
                &output::discrepancy(&report, output.format),
                output.out.as_deref(),
            )
        }
        Command::VerifyBound { source, output } => {
            check_out(output.out.as_deref())?;
            let sample = load_sample(&source)?;
            let check = bound_check(&sample)?;
            output::emit(&output::bound(&check, output.format), output.out.as_deref())
        }
        Command::Prooflab {
            source,
            k,
            b,
            h,
            trials,
            trial_seed,
            output,
        } => {
            check_out(output.out.as_deref())?;
            let sample = load_sample(&source)?;
            let opts = ProofOptions {
                k,
                b,
                h,
                trials,
                seed: trial_seed,
            };
            let report = proof_report(&sample, &opts)?;
            output::emit(
                &output::proof(&report, output.format),
                output.out.as_deref(),
            )
        }
    }
}

/// The output directory must exist before any work starts.
fn check_out(out: Option<&Path>) -> Result<(), Failure> {
    let Some(out) = out else { return Ok(()) };
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(Failure::Io(
            out.to_path_buf(),
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "output directory does not exist",
            ),
        ));
    }
    if out.is_dir() {
        return Err(Failure::Io(
            out.to_path_buf(),
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "output path is a directory",
            ),
        ));
    }
    Ok(())
}

fn load_sample(src: &SourceArgs) -> Result<SequenceSample, Failure> {
    match (&src.input, src.kind) {
        (Some(_), Some(_)) => Err(usage("give either --input or --kind, not both")),
        (None, None) => Err(usage("one of --input or --kind is required")),
        (Some(path), None) => {
            if src.alpha.is_some() || src.base.is_some() || src.seed.is_some() {
                return Err(usage("--alpha, --base and --seed only apply with --kind"));
            }
            let sample = load_points(path)?;
            match src.n {
                Some(n) => Ok(sample.prefix(n)?),
                None => Ok(sample),
            }
        }
        (None, Some(kind)) => {
            let n = src.n.ok_or_else(|| usage("--n is required with --kind"))?;
            let spec = SequenceSpec::new(sequence_kind(kind, src)?, n);
            Ok(generate(&spec)?)
        }
    }
}

fn sequence_kind(kind: Kind, src: &SourceArgs) -> Result<SequenceKind, Failure> {
    let takes_alpha = matches!(kind, Kind::Kronecker | Kind::Quadratic);
    if src.alpha.is_some() && !takes_alpha {
        return Err(usage("--alpha only applies to kronecker and quadratic"));
    }
    if src.base.is_some() && !matches!(kind, Kind::Vdc) {
        return Err(usage("--base only applies to vdc"));
    }
    if src.seed.is_some() && !matches!(kind, Kind::UniformRandom) {
        return Err(usage("--seed only applies to uniform_random"));
    }
    Ok(match kind {
        Kind::Kronecker => SequenceKind::Kronecker {
            alpha: src.alpha.unwrap_or_else(golden_alpha),
        },
        Kind::Quadratic => SequenceKind::Quadratic {
            alpha: src.alpha.unwrap_or(DEFAULT_QUADRATIC_ALPHA),
        },
        Kind::Vdc => SequenceKind::Vdc {
            base: src.base.unwrap_or(2),
        },
        Kind::SqrtN => SequenceKind::SqrtN,
        Kind::UniformRandom => SequenceKind::UniformRandom {
            seed: src.seed.unwrap_or(0),
        },
    })
}
