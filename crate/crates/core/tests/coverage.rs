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

//! Frequentist coverage of the intercept credible intervals.

use newsbias_core::latent::{posterior_summary, run_chain, simulate_counts, ChainConfig, ModelConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn ninety_percent_intervals_cover_planted_intercepts() {
    let consts = ModelConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut covered, mut total) = (0usize, 0usize);
    for rep in 0..100u64 {
        let x: Vec<f64> = (0..20).map(|_| rng.gen_range(-0.9..0.9)).collect();
        let alpha: Vec<f64> = (0..20).map(|_| rng.gen_range(1.0..4.0)).collect();
        let counts = simulate_counts(&alpha, &x, &consts, &mut rng).unwrap();
        let config = ChainConfig { seed: rep, ..ChainConfig::default() };
        let summary = posterior_summary(&run_chain(&counts, &config, &consts).unwrap(), config.burn_in).unwrap();
        for (est, truth) in summary.alpha.iter().zip(&alpha) {
            covered += (est.q05 <= *truth && *truth <= est.q95) as usize;
            total += 1;
        }
    }
    let rate = covered as f64 / total as f64;
    assert!((0.80..=0.98).contains(&rate), "coverage {rate}");
}
