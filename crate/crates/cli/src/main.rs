//! `gradest`: check hypotheses, compute gradient bounds, solve radial
//! problems and verify the estimates along them.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Tuning;

#[derive(Debug, Parser)]
#[command(name = "gradest", version, about)]
struct Cli {
    /// Flat TOML file whose keys are flag names
    #[arg(long, global = true, env = "GRADEST_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a hypothesis system for h on a sample grid
    Check(CheckArgs),
    /// Scan a grid of lambda values for which the general system holds
    FindLambda(FindLambdaArgs),
    /// Compute a gradient bound
    Bound(BoundArgs),
    /// Solve the radial problem and write the samples as CSV
    Solve(SolveArgs),
    /// Solve, check hypotheses, bound and compare
    Verify(VerifyArgs),
    /// Tabulate the decay of the general bound at K = 0
    Liouville(LiouvilleArgs),
    /// Run the verification pipeline over a grid of h = c exp(d s)
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ExprArgs {
    /// Nonlinearity h(s) in the variable s
    #[arg(long = "h", allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Parameter binding name=value (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Model space: euclidean | hyperbolic
    #[arg(long, default_value = "euclidean")]
    pub geometry: String,
    /// Sectional curvature of the hyperbolic model (< 0, default -1)
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CheckArgs {
    #[command(flatten)]
    pub expr: ExprArgs,
    /// Condition system: 1.9 | cor1.3 | cor1.4 | cor1.5
    #[arg(long, default_value = "1.9")]
    pub system: String,
    /// Multiplier lambda of the general system
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long = "K", default_value_t = 0.0)]
    pub k: f64,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FindLambdaArgs {
    #[command(flatten)]
    pub expr: ExprArgs,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long = "K", default_value_t = 0.0)]
    pub k: f64,
    /// Grid lo:hi:count of candidate lambda values
    #[arg(long, default_value = "0:1:21", allow_hyphen_values = true)]
    pub lambda_grid: String,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Clone, Args)]
pub struct LichnerowiczArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundArgs {
    /// case1 | case2 | general
    #[arg(long)]
    pub case: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long = "K", default_value_t = 0.0)]
    pub k: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    #[command(flatten)]
    pub lich: LichnerowiczArgs,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    #[command(flatten)]
    pub expr: ExprArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub u0: f64,
    #[arg(long)]
    pub rmax: f64,
    /// CSV output file (columns r, u, du, log_grad)
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// thm1.1 | thm1.2 | harnack
    #[arg(long)]
    pub theorem: String,
    #[command(flatten)]
    pub expr: ExprArgs,
    /// Multiplier lambda of the general system
    #[arg(long)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub lich: LichnerowiczArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Ricci bound constant; defaults to that of the model
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub u0: f64,
    /// Radius of the verification ball; the solve runs to 2R
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    /// Also write the solution samples as CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LiouvilleArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Increasing comma-separated radii
    #[arg(long = "R-list", default_value = "1,10,100,1000")]
    pub r_list: String,
    /// Write the table to this CSV file and print the JSON report
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the CSV table
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long, default_value = "0.5,1,2", allow_hyphen_values = true)]
    pub c_list: String,
    #[arg(long, default_value = "-2,-1,-0.5", allow_hyphen_values = true)]
    pub d_list: String,
    #[arg(long, default_value = "0,0.5,1", allow_hyphen_values = true)]
    pub lambda_list: String,
    #[arg(long, default_value = "0.5,1,2")]
    pub u0_list: String,
    #[arg(long, default_value = "2,3")]
    pub n_list: String,
    /// Curvatures of the models; 0 is Euclidean
    #[arg(long, default_value = "0,-1", allow_hyphen_values = true)]
    pub kappa_list: String,
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    /// CSV file with one line per run
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.config.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
