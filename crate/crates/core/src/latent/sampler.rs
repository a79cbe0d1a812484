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

//! Metropolis-within-Gibbs sampler for one event type.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mh::{rwmh_update, ProposalScale, ADAPT_INTERVAL};
use super::model::{normal_logpdf, row_kernel, ModelConstants};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub chains: usize,
    pub seed: u64,
    pub initial_proposal_sd: f64,
    pub adapt: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 5_000,
            burn_in: 1_000,
            chains: 4,
            seed: 0,
            initial_proposal_sd: 0.5,
            adapt: true,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.chains == 0 {
            return Err(Error::InvalidConfig("at least one chain is required".into()));
        }
        if !(self.initial_proposal_sd > 0.0 && self.initial_proposal_sd.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "initial proposal sd must be positive, got {}",
                self.initial_proposal_sd
            )));
        }
        Ok(())
    }

    /// Starting stance of a chain. A lone chain starts at 0; several chains
    /// alternate between +0.5 and -0.5.
    pub fn initial_x(&self, chain: usize) -> f64 {
        match (self.chains, chain % 2) {
            (1, _) => 0.0,
            (_, 0) => 0.5,
            _ => -0.5,
        }
    }
}

/// Stored draws of one chain, row-major by iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub alpha_accepted: Vec<u64>,
    pub x_accepted: Vec<u64>,
    /// Proposal scales in force after burn-in.
    pub alpha_proposal_sd: Vec<f64>,
    pub x_proposal_sd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainDraws {
    pub outlets: usize,
    pub iterations: usize,
    pub chains: Vec<Chain>,
}

impl ChainDraws {
    pub fn alpha_at(&self, chain: usize, iteration: usize, outlet: usize) -> f64 {
        self.chains[chain].alpha[iteration * self.outlets + outlet]
    }

    pub fn x_at(&self, chain: usize, iteration: usize, outlet: usize) -> f64 {
        self.chains[chain].x[iteration * self.outlets + outlet]
    }

    /// The trace of one parameter in one chain, from `start` onwards.
    pub fn trace(&self, chain: usize, param: super::Param, outlet: usize, start: usize) -> Vec<f64> {
        let values = match param {
            super::Param::Alpha => &self.chains[chain].alpha,
            super::Param::X => &self.chains[chain].x,
        };
        (start..self.iterations)
            .map(|h| values[h * self.outlets + outlet])
            .collect()
    }

    /// Acceptance rate of one parameter in one chain over all iterations.
    pub fn acceptance_rate(&self, chain: usize, param: super::Param, outlet: usize) -> f64 {
        let accepted = match param {
            super::Param::Alpha => self.chains[chain].alpha_accepted[outlet],
            super::Param::X => self.chains[chain].x_accepted[outlet],
        };
        accepted as f64 / self.iterations as f64
    }
}

/// Runs `config.chains` independent chains on one `N x 3` count slice.
///
/// Chain `c` draws from stream `c` of a ChaCha8 generator keyed by `seed`
/// (streams never overlap across chains or seeds), starts at
/// `alpha = 0` and [`ChainConfig::initial_x`], and each iteration updates
/// `alpha_1..alpha_N` and then `x_1..x_N` against their full conditionals.
/// Chains run on separate threads; the result does not depend on scheduling.
pub fn run_chain(
    counts: &[[u64; 3]],
    config: &ChainConfig,
    consts: &ModelConstants,
) -> Result<ChainDraws> {
    config.validate()?;
    consts.validate()?;
    if counts.is_empty() {
        return Err(Error::InvalidConfig("count slice has no outlets".into()));
    }
    let chains = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.chains)
            .map(|c| scope.spawn(move || sample_one(counts, config, consts, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    });
    Ok(ChainDraws {
        outlets: counts.len(),
        iterations: config.iterations,
        chains,
    })
}

fn sample_one(
    counts: &[[u64; 3]],
    config: &ChainConfig,
    consts: &ModelConstants,
    chain_index: usize,
) -> Chain {
    let n = counts.len();
    let h_total = config.iterations;
    let z = consts.ideal_stances;
    let (sd_alpha, sd_x) = (consts.prior_sd_alpha, consts.prior_sd_x);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(chain_index as u64);

    let mut alpha = vec![0.0; n];
    let mut x = vec![config.initial_x(chain_index); n];
    let mut alpha_scale = vec![ProposalScale::new(config.initial_proposal_sd); n];
    let mut x_scale = vec![ProposalScale::new(config.initial_proposal_sd); n];
    let mut alpha_accepted = vec![0u64; n];
    let mut x_accepted = vec![0u64; n];
    let mut alpha_draws = Vec::with_capacity(h_total * n);
    let mut x_draws = Vec::with_capacity(h_total * n);

    for h in 1..=h_total {
        for i in 0..n {
            let (xi, row) = (x[i], &counts[i]);
            let target = |a: f64| row_kernel(a, xi, row, &z) + normal_logpdf(a, sd_alpha);
            let (value, accepted) = rwmh_update(alpha[i], target, alpha_scale[i].sd, &mut rng);
            alpha[i] = value;
            alpha_scale[i].record(accepted);
            alpha_accepted[i] += accepted as u64;
        }
        for i in 0..n {
            let (ai, row) = (alpha[i], &counts[i]);
            let target = |v: f64| row_kernel(ai, v, row, &z) + normal_logpdf(v, sd_x);
            let (value, accepted) = rwmh_update(x[i], target, x_scale[i].sd, &mut rng);
            x[i] = value;
            x_scale[i].record(accepted);
            x_accepted[i] += accepted as u64;
        }
        if config.adapt && h <= config.burn_in && h % ADAPT_INTERVAL == 0 {
            alpha_scale.iter_mut().for_each(ProposalScale::adapt);
            x_scale.iter_mut().for_each(ProposalScale::adapt);
        }
        alpha_draws.extend_from_slice(&alpha);
        x_draws.extend_from_slice(&x);
    }

    Chain {
        alpha: alpha_draws,
        x: x_draws,
        alpha_accepted,
        x_accepted,
        alpha_proposal_sd: alpha_scale.iter().map(|s| s.sd).collect(),
        x_proposal_sd: x_scale.iter().map(|s| s.sd).collect(),
    }
}
