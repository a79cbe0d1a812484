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

//! Deterministic quadrature of the single-outlet posterior, used to check
//! the sampler.

use super::model::{log_posterior, LatentParams, ModelConstants};
use crate::{Error, Result};

/// Grid steps above this produce a warning.
pub const MAX_RECOMMENDED_STEP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl GridSpec {
    /// A grid spanning six prior sds of `x` and an intercept range wide
    /// enough for every stance on that span.
    ///
    /// For fixed `x` the intercept concentrates near
    /// `ln(total) - ln(sum_j exp(-|x - z_j|))` with spread about
    /// `1/sqrt(total)`; the range brackets that ridge over the whole `x`
    /// span with ten spreads of margin. Without data the intercept prior
    /// governs the lower tail.
    pub fn data_informed(row: &[u64; 3], consts: &ModelConstants, step: f64) -> Self {
        let x_half = 6.0 * consts.prior_sd_x;
        let z = consts.ideal_stances;
        let mass = |x: f64| z.iter().map(|zj| (-(x - zj).abs()).exp()).sum::<f64>();
        let peak = z.iter().map(|&zj| mass(zj)).fold(f64::NEG_INFINITY, f64::max);
        let edge = mass(-x_half).min(mass(x_half));
        let total = row.iter().sum::<u64>() as f64;
        let (alpha_min, alpha_max) = if total > 0.0 {
            let spread = 10.0 / total.sqrt();
            (total.ln() - peak.ln() - spread, total.ln() - edge.ln() + spread)
        } else {
            (-6.0 * consts.prior_sd_alpha, -edge.ln() + 3.0)
        };
        Self {
            alpha_min,
            alpha_max,
            x_min: -x_half,
            x_max: x_half,
            step,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    pub mean_alpha: f64,
    pub mean_x: f64,
    pub warnings: Vec<String>,
}

/// Posterior means of `(alpha, x)` for a single outlet by a midpoint
/// Riemann sum of the exponentiated log-posterior over `grid`.
pub fn grid_posterior_oracle(
    counts: &[[u64; 3]],
    grid: &GridSpec,
    consts: &ModelConstants,
) -> Result<GridPosterior> {
    if counts.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: counts.len(),
        });
    }
    if grid.step.is_nan() || grid.step <= 0.0 || grid.alpha_max <= grid.alpha_min || grid.x_max <= grid.x_min {
        return Err(Error::InvalidConfig(format!("degenerate grid {grid:?}")));
    }
    let mut warnings = Vec::new();
    if grid.step > MAX_RECOMMENDED_STEP {
        warnings.push(format!(
            "grid step {} exceeds {MAX_RECOMMENDED_STEP}; quadrature may be inaccurate",
            grid.step
        ));
    }
    let na = ((grid.alpha_max - grid.alpha_min) / grid.step).ceil() as usize;
    let nx = ((grid.x_max - grid.x_min) / grid.step).ceil() as usize;
    let alphas: Vec<f64> = (0..na)
        .map(|a| grid.alpha_min + (a as f64 + 0.5) * grid.step)
        .collect();
    let xs: Vec<f64> = (0..nx)
        .map(|x| grid.x_min + (x as f64 + 0.5) * grid.step)
        .collect();

    let mut params = LatentParams::new(vec![0.0], vec![0.0])?;
    let mut log_density = Vec::with_capacity(na * nx);
    for &a in &alphas {
        for &x in &xs {
            params.alpha[0] = a;
            params.x[0] = x;
            log_density.push(log_posterior(&params, counts, consts)?);
        }
    }
    let peak = log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut norm, mut sum_a, mut sum_x) = (0.0, 0.0, 0.0);
    for (ia, &a) in alphas.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            let w = (log_density[ia * nx + ix] - peak).exp();
            norm += w;
            sum_a += w * a;
            sum_x += w * x;
        }
    }

    // Mass left on the boundary means the grid clipped the posterior.
    let edge_mass: f64 = (0..na)
        .flat_map(|ia| [(ia, 0), (ia, nx - 1)])
        .chain((0..nx).flat_map(|ix| [(0, ix), (na - 1, ix)]))
        .map(|(ia, ix)| (log_density[ia * nx + ix] - peak).exp())
        .sum();
    if edge_mass / norm > 1e-6 {
        warnings.push(format!(
            "posterior mass {:.2e} on the grid boundary; widen the ranges",
            edge_mass / norm
        ));
    }

    Ok(GridPosterior {
        mean_alpha: sum_a / norm,
        mean_x: sum_x / norm,
        warnings,
    })
}
