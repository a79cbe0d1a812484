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

//! Posterior summaries and convergence diagnostics.

use super::sampler::ChainDraws;
use crate::{Error, Result};

/// Minimum number of retained draws per chain.
pub const MIN_DRAWS_PER_CHAIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Alpha,
    X,
}

impl Param {
    pub fn as_str(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::X => "x",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "alpha" => Some(Param::Alpha),
            "x" => Some(Param::X),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamEstimate {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q95: f64,
    pub rhat: f64,
    pub ess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary {
    pub alpha: Vec<ParamEstimate>,
    pub x: Vec<ParamEstimate>,
}

impl ParamSummary {
    pub fn get(&self, param: Param, outlet: usize) -> &ParamEstimate {
        match param {
            Param::Alpha => &self.alpha[outlet],
            Param::X => &self.x[outlet],
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn max_rhat(&self) -> f64 {
        self.alpha
            .iter()
            .chain(&self.x)
            .map(|e| e.rhat)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Summarises every parameter after discarding the first `burn_in`
/// iterations of each chain.
pub fn posterior_summary(draws: &ChainDraws, burn_in: usize) -> Result<ParamSummary> {
    let kept = draws.iterations.saturating_sub(burn_in);
    if burn_in >= draws.iterations || kept < MIN_DRAWS_PER_CHAIN {
        return Err(Error::TooFewDraws {
            available: kept,
            required: MIN_DRAWS_PER_CHAIN,
        });
    }
    let summarise = |param| {
        (0..draws.outlets)
            .map(|i| {
                let traces: Vec<Vec<f64>> = (0..draws.chains.len())
                    .map(|c| draws.trace(c, param, i, burn_in))
                    .collect();
                summarize_draws(&traces)
            })
            .collect::<Result<Vec<_>>>()
    };
    Ok(ParamSummary {
        alpha: summarise(Param::Alpha)?,
        x: summarise(Param::X)?,
    })
}

/// Pooled summary of one scalar parameter observed in several chains.
pub fn summarize_draws(chains: &[Vec<f64>]) -> Result<ParamEstimate> {
    let shortest = chains.iter().map(Vec::len).min().unwrap_or(0);
    if chains.is_empty() || shortest < MIN_DRAWS_PER_CHAIN {
        return Err(Error::TooFewDraws {
            available: shortest,
            required: MIN_DRAWS_PER_CHAIN,
        });
    }
    let mut pooled: Vec<f64> = chains.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let mean = pooled.iter().sum::<f64>() / n;
    let var = pooled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    pooled.sort_by(f64::total_cmp);
    let refs: Vec<&[f64]> = chains.iter().map(Vec::as_slice).collect();
    Ok(ParamEstimate {
        mean,
        sd: var.sqrt(),
        q05: quantile(&pooled, 0.05),
        q95: quantile(&pooled, 0.95),
        rhat: split_rhat(&refs),
        ess: effective_sample_size(&refs),
    })
}

/// Linearly interpolated quantile of sorted data (Hyndman-Fan type 7).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn split_halves<'a>(chains: &[&'a [f64]]) -> Vec<&'a [f64]> {
    chains
        .iter()
        .flat_map(|c| {
            let half = c.len() / 2;
            [&c[..half], &c[c.len() - half..]]
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_var(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Split-R-hat. Returns 1 when every draw is identical and infinity when
/// the chains are individually constant but disagree.
pub fn split_rhat(chains: &[&[f64]]) -> f64 {
    let halves = split_halves(chains);
    let len = halves[0].len() as f64;
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    let within = halves.iter().map(|h| sample_var(h)).sum::<f64>() / halves.len() as f64;
    let between_over_len = if halves.len() > 1 { sample_var(&means) } else { 0.0 };
    if within == 0.0 {
        return if between_over_len == 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_plus = (len - 1.0) / len * within + between_over_len;
    (var_plus / within).sqrt()
}

fn autocovariance(values: &[f64], m: f64, lag: usize) -> f64 {
    let n = values.len();
    values[..n - lag]
        .iter()
        .zip(&values[lag..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum::<f64>()
        / n as f64
}

/// Effective sample size from split chains using Geyer's initial monotone
/// sequence on the multi-chain autocorrelation estimate.
pub fn effective_sample_size(chains: &[&[f64]]) -> f64 {
    let halves = split_halves(chains);
    let m_chains = halves.len() as f64;
    let len = halves[0].len();
    let total = m_chains * len as f64;
    let means: Vec<f64> = halves.iter().map(|h| mean(h)).collect();
    let lenf = len as f64;
    let mean_var = halves
        .iter()
        .zip(&means)
        .map(|(h, &m)| autocovariance(h, m, 0) * lenf / (lenf - 1.0))
        .sum::<f64>()
        / m_chains;
    let between = if halves.len() > 1 { sample_var(&means) } else { 0.0 };
    let var_plus = mean_var * (lenf - 1.0) / lenf + between;
    if var_plus == 0.0 {
        return chains.iter().map(|c| c.len()).sum::<usize>() as f64;
    }
    let rho = |lag: usize| {
        let acov = halves
            .iter()
            .zip(&means)
            .map(|(h, &m)| autocovariance(h, m, lag))
            .sum::<f64>()
            / m_chains;
        1.0 - (mean_var - acov) / var_plus
    };

    let mut tau_sum = 0.0;
    let mut previous_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < len {
        let pair = rho(lag) + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(previous_pair);
        tau_sum += pair;
        previous_pair = pair;
        lag += 2;
    }
    let tau = (-1.0 + 2.0 * tau_sum).max(1.0 / total.log10().max(1.0));
    total / tau
}
