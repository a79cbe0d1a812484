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

//! The `newsbias` pipeline: ingest, fit, bias, engagement, network and
//! report stages over a shared output directory.

pub mod args;
mod commands;
pub mod config;
mod session;

use std::path::PathBuf;

pub use args::{Cli, Command};
pub use config::RunConfig;
pub use session::derive_seed;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid input data.
    #[error("{0}")]
    Input(String),
    #[error("missing output of stage '{stage}': {} not found (run `newsbias {stage}` first)", path.display())]
    MissingStage { stage: &'static str, path: PathBuf },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::MissingStage { .. } => 3,
            CliError::Internal(_) => 1,
        }
    }

    /// Wraps a library error, treating data and configuration problems as
    /// input errors.
    pub(crate) fn core(context: impl std::fmt::Display, err: newsbias_core::Error) -> Self {
        use newsbias_core::Error as E;
        let msg = format!("{context}: {err}");
        match err {
            E::UnknownLabel { .. }
            | E::Malformed { .. }
            | E::UnregisteredOutlet { .. }
            | E::DuplicateOutlet(..)
            | E::NoArticles
            | E::DimensionMismatch { .. }
            | E::InvalidConfig(_)
            | E::TooFewDraws { .. }
            | E::Edgeless
            | E::Csv(_)
            | E::Json(_) => CliError::Input(msg),
            _ => CliError::Internal(msg),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Ingest(args) => session::Session::open("ingest", &args)?.finish(commands::ingest),
        Command::Fit(args) => session::Session::open("fit", &args)?.finish(commands::fit),
        Command::Bias(args) => session::Session::open("bias", &args)?.finish(commands::bias),
        Command::Engagement(args) => {
            session::Session::open("engagement", &args)?.finish(commands::engagement)
        }
        Command::Network(args) => session::Session::open("network", &args)?.finish(commands::network),
        Command::Report(args) => session::Session::open("report", &args)?.finish(commands::report),
        Command::Run(args) => session::Session::open("run", &args)?.finish(commands::run_all),
    }
}
