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

use std::f64::consts::PI;

use crate::{Error, Result};

/// Ideal stances of the anti, neutral and pro narratives.
pub const IDEAL_STANCES: [f64; 3] = [-1.0, 0.0, 1.0];

/// How the second argument of a normal prior is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorScale {
    StdDev,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    pub ideal_stances: [f64; 3],
    pub prior_sd_alpha: f64,
    pub prior_sd_x: f64,
}

impl Default for ModelConstants {
    fn default() -> Self {
        Self {
            ideal_stances: IDEAL_STANCES,
            prior_sd_alpha: 15.0,
            prior_sd_x: 1.0,
        }
    }
}

impl ModelConstants {
    /// Builds constants from prior scales read according to `scale`.
    pub fn with_priors(alpha: f64, x: f64, scale: PriorScale) -> Result<Self> {
        let (sd_alpha, sd_x) = match scale {
            PriorScale::StdDev => (alpha, x),
            PriorScale::Variance => (alpha.sqrt(), x.sqrt()),
        };
        let consts = Self {
            prior_sd_alpha: sd_alpha,
            prior_sd_x: sd_x,
            ..Self::default()
        };
        consts.validate()?;
        Ok(consts)
    }

    pub fn validate(&self) -> Result<()> {
        let z = self.ideal_stances;
        if !(z[0] < z[1] && z[1] < z[2]) || z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "ideal stances must be finite and strictly increasing, got {z:?}"
            )));
        }
        for (name, sd) in [("alpha", self.prior_sd_alpha), ("x", self.prior_sd_x)] {
            if !(sd > 0.0 && sd.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "prior scale for {name} must be positive, got {sd}"
                )));
            }
        }
        Ok(())
    }
}

/// Intercepts and stances of every outlet for one event type.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentParams {
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
}

impl LatentParams {
    pub fn new(alpha: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if alpha.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                found: x.len(),
            });
        }
        Ok(Self { alpha, x })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

#[inline]
pub fn log_intensity(alpha: f64, x: f64, z: f64) -> f64 {
    alpha - (x - z).abs()
}

#[inline]
pub fn normal_logpdf(value: f64, sd: f64) -> f64 {
    let u = value / sd;
    -0.5 * u * u - sd.ln() - 0.5 * (2.0 * PI).ln()
}

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Poisson kernel of one outlet's row, without the `log(y!)` terms.
#[inline]
pub(crate) fn row_kernel(alpha: f64, x: f64, row: &[u64; 3], z: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for j in 0..3 {
        let eta = log_intensity(alpha, x, z[j]);
        acc += row[j] as f64 * eta - eta.exp();
    }
    acc
}

fn check_dims(params: &LatentParams, counts: &[[u64; 3]]) -> Result<()> {
    if params.alpha.len() != params.x.len() {
        return Err(Error::DimensionMismatch {
            expected: params.alpha.len(),
            found: params.x.len(),
        });
    }
    if counts.len() != params.alpha.len() {
        return Err(Error::DimensionMismatch {
            expected: params.alpha.len(),
            found: counts.len(),
        });
    }
    Ok(())
}

/// Full Poisson log-likelihood of an `N x 3` count slice, including the
/// `log(y!)` normalising terms.
pub fn log_likelihood(
    params: &LatentParams,
    counts: &[[u64; 3]],
    consts: &ModelConstants,
) -> Result<f64> {
    check_dims(params, counts)?;
    let z = &consts.ideal_stances;
    Ok(params
        .alpha
        .iter()
        .zip(&params.x)
        .zip(counts)
        .map(|((&a, &x), row)| {
            row_kernel(a, x, row, z) - row.iter().map(|&y| ln_factorial(y)).sum::<f64>()
        })
        .sum())
}

/// Log-likelihood plus the normal log-priors on every intercept and stance.
pub fn log_posterior(
    params: &LatentParams,
    counts: &[[u64; 3]],
    consts: &ModelConstants,
) -> Result<f64> {
    let ll = log_likelihood(params, counts, consts)?;
    let prior: f64 = params
        .alpha
        .iter()
        .zip(&params.x)
        .map(|(&a, &x)| normal_logpdf(a, consts.prior_sd_alpha) + normal_logpdf(x, consts.prior_sd_x))
        .sum();
    Ok(ll + prior)
}
