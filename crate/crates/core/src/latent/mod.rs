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

//! One-dimensional Poisson latent-space model for outlet stances.
//!
//! For a fixed event type, the number of articles outlet `i` publishes
//! with narrative `j` is Poisson with log-intensity
//! `alpha_i - |x_i - z_j|`, where `z = (-1, 0, 1)` anchors the anti,
//! neutral and pro narratives. `alpha_i` is the outlet's propensity to
//! cover the event type and `x_i` its stance when doing so. Each event type
//! is fitted independently.

mod mh;
mod model;
mod oracle;
mod sampler;
mod simulate;
mod summary;

pub use mh::{rwmh_update, ProposalScale, ADAPT_INTERVAL, TARGET_ACCEPTANCE};
pub use model::{
    log_intensity, log_likelihood, log_posterior, normal_logpdf, LatentParams, ModelConstants,
    PriorScale, IDEAL_STANCES,
};
pub use oracle::{grid_posterior_oracle, GridPosterior, GridSpec, MAX_RECOMMENDED_STEP};
pub use sampler::{run_chain, Chain, ChainConfig, ChainDraws};
pub use simulate::simulate_counts;
pub use summary::{
    effective_sample_size, posterior_summary, quantile, split_rhat, summarize_draws, Param,
    ParamEstimate, ParamSummary, MIN_DRAWS_PER_CHAIN,
};
