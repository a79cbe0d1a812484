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

//! Estimation of narrative and selection bias for news outlets.
//!
//! The crate is organised around the pipeline it supports:
//!
//! * [`corpus`] ingests labeled articles, outlet registries, follower
//!   counts and retweets, and aggregates articles into a count tensor.
//! * [`latent`] fits a one-dimensional Poisson latent-space model per event
//!   type with a Metropolis-within-Gibbs sampler.
//! * [`bias`] turns posterior summaries into propensity factors, the
//!   Selection Index and engagement measures.
//! * [`network`] builds the retweeter cosine-similarity graph between
//!   outlets, thresholds it and detects communities with Louvain.
//! * [`synth`] generates synthetic corpora with known ground truth.

pub mod bias;
pub mod corpus;
mod error;
pub mod latent;
pub mod network;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
