// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line surface.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "newsbias", version, about = "Narrative and selection bias of news outlets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate inputs and write canonical files, counts.csv and breakdown.csv.
    Ingest(RunArgs),
    /// Fit the latent-space model per event type into posterior.csv.
    Fit(RunArgs),
    /// Derive bias.csv from the posterior.
    Bias(RunArgs),
    /// Compute engagement.csv and the quadratic fits in fits.json.
    Engagement(RunArgs),
    /// Build, threshold and cluster the audience graph.
    Network(RunArgs),
    /// Join bias, engagement and cluster outputs into report.json.
    Report(RunArgs),
    /// Run every stage from ingest to report.
    Run(RunArgs),
    /// Write a synthetic corpus with a truth.json sidecar.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorScaleArg {
    /// Prior scales are standard deviations.
    Sd,
    /// Prior scales are variances.
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingArg {
    /// Plain mean over accounts active in the window.
    Unweighted,
    /// Mean weighted by days of overlap with the window.
    Duration,
}

/// Options shared by the pipeline stages. Every option can also be set in
/// the file given by `--config`; flags take precedence.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub articles: Option<PathBuf>,
    #[arg(long)]
    pub outlets: Option<PathBuf>,
    #[arg(long)]
    pub followers: Option<PathBuf>,
    #[arg(long)]
    pub retweets: Option<PathBuf>,
    /// First day of the analysis window (YYYY-MM-DD).
    #[arg(long)]
    pub from: Option<NaiveDate>,
    /// Last day of the analysis window (YYYY-MM-DD).
    #[arg(long)]
    pub to: Option<NaiveDate>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    /// Iterations per chain [default: 5000].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Burn-in iterations [default: 1000].
    #[arg(long)]
    pub burnin: Option<usize>,
    /// Selection Index angle in radians [default: pi/4].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Output directory [default: out].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Drop edges strictly below the mean weight (on) or at or below it (off).
    #[arg(long, value_enum)]
    pub strict_threshold: Option<Switch>,
    /// Remove nodes isolated by the threshold.
    #[arg(long, value_enum)]
    pub drop_isolates: Option<Switch>,
    #[arg(long, value_enum)]
    pub prior_scale: Option<PriorScaleArg>,
    #[arg(long, value_enum)]
    pub follower_averaging: Option<AveragingArg>,
    /// Also write raw draws to draws_<event>.csv.
    #[arg(long, value_enum)]
    pub dump_draws: Option<Switch>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "n-outlets", default_value_t = 40)]
    pub n_outlets: usize,
    /// Planted audience communities.
    #[arg(long, default_value_t = 2)]
    pub clusters: usize,
    #[arg(long, default_value_t = 150)]
    pub users_per_cluster: usize,
    /// Typical articles per outlet and event type.
    #[arg(long, default_value_t = 300.0)]
    pub articles_per_event: f64,
}
