use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momentcone::{Exponent, Perturbation};

mod commands;

/// Weighted moment-problem toolkit: norms, moment matrices, SOS
/// approximation and atomic measure recovery.
#[derive(Parser, Debug)]
#[command(name = "momentcone", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct WeightArgs {
    /// Norm exponent in [1, inf]; `inf` for the sup norm.
    #[arg(long, default_value = "1", value_parser = parse_exponent)]
    pub p: Exponent,
    /// Comma-separated positive weights, one per variable. Defaults to 1.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weighted l_{p,r} norm of a polynomial's coefficient sequence.
    Norm {
        #[arg(long)]
        f: PathBuf,
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Continuity of point evaluation at x for the weighted norm.
    EvalCont {
        /// Comma-separated coordinates of the point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Positive semidefiniteness of the moment matrix of degree d.
    PsdCheck {
        #[arg(long)]
        moments: PathBuf,
        /// Matrix degree; defaults to half the available moment degree.
        #[arg(long)]
        d: Option<usize>,
        /// Eigenvalue tolerance; defaults to 1e-9 * |trace| / size.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Localized moment matrices for 1, each generator and N - |X|^2.
    QmCheck {
        #[arg(long)]
        moments: PathBuf,
        /// Generator polynomial files.
        #[arg(long)]
        g: Vec<PathBuf>,
        /// Radius squared of the archimedean generator N - |X|^2.
        #[arg(long = "N", default_value_t = 1.0)]
        big_n: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Truncated square roots h_i of 1/i + f and their coefficient errors.
    SqrtApprox {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        i: usize,
        #[command(flatten)]
        output: Output,
    },
    /// SOS approximation of a box-nonnegative polynomial in the weighted norm.
    SosApprox {
        #[arg(long)]
        f: PathBuf,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 6)]
        dmax: usize,
        #[arg(long, value_enum, default_value_t = PerturbationArg::Exponential)]
        perturbation: PerturbationArg,
        /// Coefficient residual accepted for the Gram certificate.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Seed for the nonnegativity screen.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Atomic representing measure on the box of the weight.
    RecoverMeasure {
        #[arg(long)]
        moments: PathBuf,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 51)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Dual-norm hypothesis, PSD check and measure recovery in one report.
    Pipeline {
        #[arg(long)]
        moments: PathBuf,
        /// Generator polynomial files for the localized checks.
        #[arg(long)]
        g: Vec<PathBuf>,
        #[command(flatten)]
        weight: WeightArgs,
        /// Matrix degree; defaults to half the available moment degree.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 51)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Moments of an atomic measure file up to a degree.
    Moments {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
enum PerturbationArg {
    Exponential,
    HighDegree,
}

impl From<PerturbationArg> for Perturbation {
    fn from(p: PerturbationArg) -> Self {
        match p {
            PerturbationArg::Exponential => Perturbation::Exponential,
            PerturbationArg::HighDegree => Perturbation::HighDegree,
        }
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: momentcone::Error| e.to_string())
}

/// Whether the requested checks passed; errors are I/O or input problems.
pub enum Verdict {
    Pass,
    Fail,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("MOMENTCONE_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| anyhow::anyhow!("MOMENTCONE_THREADS must be a positive integer, got {value:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    configure_threads()?;
    match cli.command {
        Command::Norm { f, weight, output } => commands::norm(&f, &weight, &output),
        Command::EvalCont { x, weight, output } => commands::eval_cont(&x, &weight, &output),
        Command::PsdCheck {
            moments,
            d,
            tol,
            output,
        } => commands::psd_check(&moments, d, tol, &output),
        Command::QmCheck {
            moments,
            g,
            big_n,
            d,
            tol,
            output,
        } => commands::qm_check(&moments, &g, big_n, d, tol, &output),
        Command::SqrtApprox { f, i, output } => commands::sqrt_approx(&f, i, &output),
        Command::SosApprox {
            f,
            weight,
            eps,
            dmax,
            perturbation,
            tol,
            seed,
            output,
        } => commands::sos_approx(
            &f,
            &weight,
            commands::SosOptions {
                eps,
                dmax,
                perturbation: perturbation.into(),
                tol,
                seed,
            },
            &output,
        ),
        Command::RecoverMeasure {
            moments,
            weight,
            grid,
            tol,
            output,
        } => commands::recover(&moments, &weight, grid, tol, &output),
        Command::Pipeline {
            moments,
            g,
            weight,
            d,
            grid,
            tol,
            output,
        } => commands::pipeline(&moments, &g, &weight, d, grid, tol, &output),
        Command::Moments {
            measure,
            degree,
            output,
        } => commands::moments(&measure, degree, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
