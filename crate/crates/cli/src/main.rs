use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gifc_cli::config::{parse_powers, parse_s_range, parse_triple};
use gifc_cli::{parse_config_in, run, CliError, Command, Format, Overrides};
use gifc_core::lattice::SRange;
use gifc_core::sumset::suite::Lemma;

const LONG_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (interface 1)");

#[derive(Parser, Debug)]
#[command(name = "gifc", version = LONG_VERSION, about = "Degrees-of-freedom experiments for Gaussian interference channels")]
struct Cli {
    /// TOML file with default values; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Monte Carlo symbol error of the aligned lattice scheme.
    LatticeSim(SimArgs),
    /// Randomized checks of the sumset lemmas.
    Sumset {
        #[command(subcommand)]
        action: SumsetSub,
    },
    /// The deterministic multi-level code: validity, exhaustive check, DoF.
    Multilevel(MultilevelArgs),
    /// Exact DoF upper bound for a rational gain matrix.
    Bounds(BoundsArgs),
    /// Lattice simulation over a power grid with a fitted DoF slope.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum SumsetSub {
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Comma-separated powers, e.g. 1e6,1e9,1e12.
    #[arg(long)]
    powers: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// `auto` or a bound on the interference index searched by the decoder.
    #[arg(long, value_parser = parse_s_range)]
    s_range: Option<SRange>,
    #[arg(long)]
    noise_variance: Option<f64>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Also write tool version, seed, timestamp and config echo here.
    #[arg(long)]
    metadata: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_lemma)]
    lemma: Option<Lemma>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    max_card: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct MultilevelArgs {
    #[arg(long)]
    levels: Option<u32>,
    /// `default` or a scheme file.
    #[arg(long)]
    scheme: Option<String>,
    /// `exhaustive` or `none`.
    #[arg(long, value_parser = parse_check)]
    check: Option<bool>,
    /// Also search alphabets with bases up to this value.
    #[arg(long)]
    search_max_base: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// 1-based users `i,j,k` of a three-user sub-channel.
    #[arg(long, value_parser = parse_triple)]
    triple: Option<[usize; 3]>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_lemma(s: &str) -> Result<Lemma, String> {
    s.parse().map_err(|e: gifc_core::Error| e.to_string())
}

fn parse_check(s: &str) -> Result<bool, String> {
    match s {
        "exhaustive" => Ok(true),
        "none" => Ok(false),
        _ => Err(format!("expected `exhaustive` or `none`, got {s:?}")),
    }
}

fn sim_overrides(a: SimArgs) -> Result<Overrides, CliError> {
    let powers = a
        .powers
        .map(|p| parse_powers(&p).map_err(|e| CliError::Usage(format!("--powers: {e}"))))
        .transpose()?;
    Ok(Overrides {
        matrix: a.matrix,
        seed: a.common.seed,
        powers,
        epsilon: a.epsilon,
        trials: a.trials,
        out: a.common.out,
        format: a.format,
        s_range: a.s_range,
        noise_variance: a.noise_variance,
        ..Overrides::default()
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(summary) => {
            eprint!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gifc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let file_text = match &cli.config {
        Some(p) => Some(gifc_cli::output::read(p)?),
        None => None,
    };
    let mut metadata = None;
    let (command, flags) = match cli.command {
        Sub::LatticeSim(a) => (Command::LatticeSim, sim_overrides(a)?),
        Sub::Sweep(a) => {
            metadata = a.metadata;
            (Command::Sweep, sim_overrides(a.sim)?)
        }
        Sub::Sumset { action: SumsetSub::Verify(a) } => (
            Command::SumsetVerify,
            Overrides {
                seed: a.common.seed,
                out: a.common.out,
                lemma: a.lemma,
                trials: a.trials,
                max_card: a.max_card,
                ..Overrides::default()
            },
        ),
        Sub::Multilevel(a) => (
            Command::Multilevel,
            Overrides {
                levels: a.levels,
                scheme: a.scheme,
                exhaustive: a.check,
                search_max_base: a.search_max_base,
                out: a.out,
                ..Overrides::default()
            },
        ),
        Sub::Bounds(a) => (
            Command::Bounds,
            Overrides { matrix: a.matrix, triple: a.triple, out: a.out, ..Overrides::default() },
        ),
    };
    let file_dir = cli.config.as_deref().and_then(std::path::Path::parent);
    let cfg = parse_config_in(command, file_text.as_deref(), file_dir, &flags)?;
    run(&cfg, metadata.as_deref())
}
