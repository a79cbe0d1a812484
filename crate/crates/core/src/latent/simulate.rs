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

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::model::{log_intensity, ModelConstants};
use crate::{Error, Result};

/// Draws an `N x 3` count slice from the model at the given parameters.
pub fn simulate_counts<R: Rng + ?Sized>(
    alpha: &[f64],
    x: &[f64],
    consts: &ModelConstants,
    rng: &mut R,
) -> Result<Vec<[u64; 3]>> {
    if alpha.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            found: x.len(),
        });
    }
    if let Some(bad) = alpha.iter().chain(x).find(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(format!("non-finite parameter {bad}")));
    }
    let z = consts.ideal_stances;
    Ok(alpha
        .iter()
        .zip(x)
        .map(|(&a, &xi)| {
            let mut row = [0u64; 3];
            for (j, cell) in row.iter_mut().enumerate() {
                let lambda = log_intensity(a, xi, z[j]).exp();
                *cell = match Poisson::new(lambda) {
                    Ok(dist) => dist.sample(rng) as u64,
                    // underflow to zero intensity
                    Err(_) => 0,
                };
            }
            row
        })
        .collect())
}
