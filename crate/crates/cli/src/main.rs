// Copyright 2026 The urnvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `urnvote`: build voting strategies, simulate elections and emit the
//! coefficient and scan tables as CSV or JSON.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use urnvote::experiment::System;

#[derive(Parser)]
#[command(
    name = "urnvote",
    version,
    about = "Voting strategies for electing an unknown urn"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the vote distributions of a two-color strategy as JSON.
    Scheme(SchemeArgs),
    /// Print the vote kernel (row i: vote shares when urn i is the unknown one).
    Kernel(KernelArgs),
    /// Estimate the failure probability of an election by simulation.
    Simulate(SimulateArgs),
    /// Print the b and a coefficient tables.
    Coeffs(CoeffsArgs),
    /// Tabulate numerical evidence for the series conjecture.
    ConjectureScan(ScanArgs),
    /// Compare minimal electorates of the scoring and plurality strategies.
    ScoringExperiment(ScoringArgs),
    /// Minimal plurality electorates on evenly spaced instances.
    ScalingStudy(ScalingArgs),
    /// Print the voter budget of a system.
    Budget(BudgetArgs),
    /// Run a simulation described by a JSON config file.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeKind {
    Plurality,
    Flexible,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelSystem {
    Plurality,
    Scoring,
    Flexible,
    Multicolor,
}

#[derive(Args)]
struct SchemeArgs {
    kind: SchemeKind,
    #[arg(long, alias = "probs")]
    instance: PathBuf,
    /// JSON file `{"landmarks": [...]}`; required for `flexible`.
    #[arg(long)]
    landmarks: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    system: KernelSystem,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    landmarks: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_system)]
    system: System,
    #[arg(long)]
    instance: PathBuf,
    /// Voters per election.
    #[arg(long, conflicts_with = "eta", required_unless_present = "eta")]
    m: Option<u64>,
    /// Target failure probability; the voter count comes from the system's budget.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Multiplier for the plurality and multicolor budgets.
    #[arg(long, requires = "eta")]
    scale: Option<f64>,
    /// 1-based unknown urn; by default every urn is tried and the worst is reported.
    #[arg(long)]
    true_urn: Option<usize>,
    #[arg(long, env = "URNVOTE_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long, default_value_t = 5)]
    max_k: usize,
    #[arg(long, default_value_t = 5)]
    max_l: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// `start:stop:step`, inside (1/2, 1).
    #[arg(long, default_value = "0.55:0.95:0.05")]
    p: String,
    #[arg(long, default_value_t = urnvote::condorcet::DEFAULT_TERMS)]
    terms: usize,
    #[arg(long, default_value_t = 1e-3)]
    x_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoringArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Comma-separated separations.
    #[arg(long, default_value = "0.2,0.1,0.05", value_delimiter = ',')]
    eps: Vec<String>,
    #[arg(long, default_value_t = 0.9)]
    target: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, env = "URNVOTE_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, default_value = "3,4,5,6", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.9)]
    target: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, env = "URNVOTE_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, value_parser = parse_system)]
    system: System,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, env = "URNVOTE_THREADS")]
    threads: Option<usize>,
}

fn parse_system(s: &str) -> Result<System, String> {
    s.parse().map_err(|e: urnvote::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scheme(a) => commands::scheme(a),
        Command::Kernel(a) => commands::kernel(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Coeffs(a) => commands::coeffs(a),
        Command::ConjectureScan(a) => commands::conjecture_scan(a),
        Command::ScoringExperiment(a) => commands::scoring_experiment(a),
        Command::ScalingStudy(a) => commands::scaling_study(a),
        Command::Budget(a) => commands::budget(a),
        Command::Run(a) => commands::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<commands::InvariantViolation>() {
                Some(_) => ExitCode::from(3),
                None => ExitCode::from(1),
            }
        }
    }
}
