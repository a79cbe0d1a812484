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
use rand_distr::StandardNormal;

/// Iterations between proposal rescalings during burn-in.
pub const ADAPT_INTERVAL: usize = 50;
/// Acceptance rate the burn-in adaptation steers towards.
pub const TARGET_ACCEPTANCE: f64 = 0.44;

/// One random-walk Metropolis-Hastings step on a scalar.
///
/// Proposes `current + N(0, proposal_sd^2)` and accepts with probability
/// `min(1, exp(logpdf(proposal) - logpdf(current)))`. A proposal whose
/// log-density is not finite is rejected. Both the normal and the uniform
/// draw are always consumed so that the random stream does not depend on
/// the outcome.
pub fn rwmh_update<R, F>(current: f64, mut logpdf: F, proposal_sd: f64, rng: &mut R) -> (f64, bool)
where
    R: Rng + ?Sized,
    F: FnMut(f64) -> f64,
{
    debug_assert!(proposal_sd > 0.0);
    let step: f64 = rng.sample(StandardNormal);
    let u: f64 = rng.gen();
    let proposal = current + proposal_sd * step;
    let lp_proposal = logpdf(proposal);
    if !lp_proposal.is_finite() {
        return (current, false);
    }
    let delta = lp_proposal - logpdf(current);
    if delta >= 0.0 || u.ln() < delta {
        (proposal, true)
    } else {
        (current, false)
    }
}

/// Per-parameter proposal scale with windowed acceptance bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalScale {
    pub sd: f64,
    window_accepted: usize,
    window_tried: usize,
}

impl ProposalScale {
    pub fn new(sd: f64) -> Self {
        Self {
            sd,
            window_accepted: 0,
            window_tried: 0,
        }
    }

    pub fn record(&mut self, accepted: bool) {
        self.window_tried += 1;
        if accepted {
            self.window_accepted += 1;
        }
    }

    /// Rescales by 1.1 or 0.9 depending on which side of the target the
    /// window's acceptance rate fell, then clears the window.
    pub fn adapt(&mut self) {
        if self.window_tried > 0 {
            let rate = self.window_accepted as f64 / self.window_tried as f64;
            if rate > TARGET_ACCEPTANCE {
                self.sd *= 1.1;
            } else if rate < TARGET_ACCEPTANCE {
                self.sd *= 0.9;
            }
        }
        self.window_accepted = 0;
        self.window_tried = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_target_always_accepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut value = 0.0;
        let mut accepted = 0;
        for _ in 0..10_000 {
            let (v, a) = rwmh_update(value, |_| 0.0, 2.0, &mut rng);
            value = v;
            accepted += a as usize;
        }
        assert_eq!(accepted, 10_000);
    }

    #[test]
    fn infinite_regions_are_never_entered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut value = 0.5;
        for _ in 0..5_000 {
            let target = |v: f64| if (0.0..1.0).contains(&v) { 0.0 } else { f64::NEG_INFINITY };
            let (v, _) = rwmh_update(value, target, 0.8, &mut rng);
            assert!((0.0..1.0).contains(&v));
            value = v;
        }
        let (v, a) = rwmh_update(3.0, |_| f64::NAN, 1.0, &mut rng);
        assert_eq!((v, a), (3.0, false));
    }

    #[test]
    fn standard_normal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut value = 0.0;
        let n = 100_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            value = rwmh_update(value, |v| -0.5 * v * v, 2.4, &mut rng).0;
            sum += value;
            sum_sq += value * value;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn adaptation_direction() {
        let mut scale = ProposalScale::new(1.0);
        for _ in 0..ADAPT_INTERVAL {
            scale.record(true);
        }
        scale.adapt();
        assert!((scale.sd - 1.1).abs() < 1e-15);
        for i in 0..ADAPT_INTERVAL {
            scale.record(i % 10 == 0);
        }
        scale.adapt();
        assert!((scale.sd - 1.1 * 0.9).abs() < 1e-15);
    }
}
