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

//! Synthetic corpora with planted stances, propensities and audience
//! communities.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::corpus::{
    ArticleRecord, EventType, FollowerRecord, Narrative, OutletKind, OutletProfile, Platform,
    Reliability, RetweetRecord,
};
use crate::latent::{simulate_counts, ModelConstants};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub outlets: usize,
    pub clusters: usize,
    pub users_per_cluster: usize,
    /// Typical number of articles per outlet and event type.
    pub articles_per_event: f64,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            outlets: 40,
            clusters: 2,
            users_per_cluster: 150,
            articles_per_event: 300.0,
            start: NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2021, 12, 31).expect("valid date"),
            seed: 0,
        }
    }
}

/// Ground truth written next to a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedTruth {
    pub outlets: Vec<String>,
    /// Event label to per-outlet intercepts.
    pub alpha: BTreeMap<String, Vec<f64>>,
    /// Event label to per-outlet stances.
    pub x: BTreeMap<String, Vec<f64>>,
    pub clusters: Vec<usize>,
    /// Outlet planted with identical adverse and positive propensities.
    pub balanced_outlet: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub articles: Vec<ArticleRecord>,
    pub outlets: Vec<OutletProfile>,
    pub followers: Vec<FollowerRecord>,
    pub retweets: Vec<RetweetRecord>,
    pub truth: PlantedTruth,
}

fn narrative_mass(x: f64, consts: &ModelConstants) -> f64 {
    consts.ideal_stances.iter().map(|z| (-(x - z).abs()).exp()).sum()
}

/// Generates a corpus. Outlet `i` belongs to community `i % clusters`;
/// community 0 is questionable, anti-leaning and favours adverse events,
/// the others are reliable and pro-leaning. Outlet 1 (or 0 when alone) is
/// planted with balanced adverse and positive coverage.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    if spec.outlets == 0 || spec.clusters == 0 || spec.users_per_cluster == 0 {
        return Err(Error::InvalidConfig(
            "outlets, clusters and users per cluster must be positive".into(),
        ));
    }
    if spec.start > spec.end {
        return Err(Error::InvalidConfig("start date after end date".into()));
    }
    if spec.articles_per_event.is_nan() || spec.articles_per_event <= 0.0 {
        return Err(Error::InvalidConfig("articles per event must be positive".into()));
    }
    let consts = ModelConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.outlets;
    let width = n.to_string().len().max(2);
    let ids: Vec<String> = (0..n).map(|i| format!("o{:0width$}", i + 1)).collect();
    let clusters: Vec<usize> = (0..n).map(|i| i % spec.clusters).collect();
    let balanced = if n > 1 { 1 } else { 0 };

    let outlets: Vec<OutletProfile> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| OutletProfile {
            outlet_id: id.clone(),
            name: format!("Outlet {}", i + 1),
            reliability: if clusters[i] == 0 && spec.clusters > 1 {
                Reliability::Questionable
            } else {
                Reliability::Reliable
            },
            kind: Some(OutletKind::ALL[i % OutletKind::ALL.len()]),
        })
        .collect();

    // Planted parameters.
    let base_x: Vec<f64> = (0..n)
        .map(|i| {
            if outlets[i].reliability == Reliability::Questionable {
                rng.gen_range(-0.9..-0.3)
            } else {
                rng.gen_range(0.0..0.9)
            }
        })
        .collect();
    // The balanced outlet publishes four times the typical volume so that
    // its equal propensities are resolved by the fit.
    let volume: Vec<f64> = (0..n)
        .map(|i| {
            let v = rng.gen_range(-0.7..0.7f64);
            if i == balanced { 4f64.ln() } else { v }
        })
        .collect();
    let mut alpha = BTreeMap::new();
    let mut x = BTreeMap::new();
    for event in EventType::ALL {
        let mut a_k = Vec::with_capacity(n);
        let mut x_k = Vec::with_capacity(n);
        for i in 0..n {
            let stance = if i == balanced {
                base_x[i]
            } else {
                (base_x[i] + rng.gen_range(-0.1..0.1)).clamp(-0.9, 0.9)
            };
            let tilt = match (outlets[i].reliability, event) {
                _ if i == balanced => 0.0,
                (Reliability::Questionable, EventType::Adverse) => 0.5,
                (Reliability::Questionable, EventType::Positive) => -0.5,
                (Reliability::Reliable, EventType::Adverse) => -0.2,
                (Reliability::Reliable, EventType::Positive) => 0.2,
                _ => 0.0,
            };
            let total = spec.articles_per_event * (volume[i] + tilt).exp();
            a_k.push((total / narrative_mass(stance, &consts)).ln());
            x_k.push(stance);
        }
        alpha.insert(event.as_str().to_string(), a_k);
        x.insert(event.as_str().to_string(), x_k);
    }

    // Followers: one account per platform covering the whole window.
    let mut followers = Vec::new();
    let audience: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(3.0..5.0))).collect();
    for (i, id) in ids.iter().enumerate() {
        for platform in [Platform::Facebook, Platform::Twitter] {
            followers.push(FollowerRecord {
                outlet_id: id.clone(),
                platform,
                period_start: spec.start,
                period_end: spec.end,
                followers: (audience[i] * rng.gen_range(0.8..1.2)).round() as u64,
            });
        }
    }

    // Articles drawn from the model, with engagement rising at the extremes.
    let days = (spec.end - spec.start).num_days();
    let mut articles = Vec::new();
    for event in EventType::ALL {
        let counts = simulate_counts(&alpha[event.as_str()], &x[event.as_str()], &consts, &mut rng)?;
        for (i, row) in counts.iter().enumerate() {
            let stance = x[event.as_str()][i];
            let rate = 0.002 * audience[i] * (1.0 + 2.0 * stance * stance);
            let interactions = Poisson::new(rate).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            for narrative in Narrative::ALL {
                for _ in 0..row[narrative.index()] {
                    articles.push(ArticleRecord {
                        outlet_id: ids[i].clone(),
                        platform: Platform::ALL[rng.gen_range(0..Platform::ALL.len())],
                        date: spec.start + Duration::days(rng.gen_range(0..=days)),
                        narrative: *narrative,
                        event: *event,
                        interactions: interactions.sample(&mut rng) as u64,
                    });
                }
            }
        }
    }
    articles.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.outlet_id.cmp(&b.outlet_id)));

    // Retweeters mostly follow outlets of their own community.
    let mut cells: BTreeMap<(String, String), u64> = BTreeMap::new();
    let user_width = (spec.clusters * spec.users_per_cluster).to_string().len();
    for c in 0..spec.clusters {
        let own: Vec<usize> = (0..n).filter(|&i| clusters[i] == c).collect();
        let other: Vec<usize> = (0..n).filter(|&i| clusters[i] != c).collect();
        for u in 0..spec.users_per_cluster {
            let user = format!("u{:0user_width$}", c * spec.users_per_cluster + u + 1);
            for &i in &own {
                if rng.gen_bool(0.5) {
                    *cells.entry((user.clone(), ids[i].clone())).or_default() += rng.gen_range(1..=5);
                }
            }
            if !other.is_empty() && rng.gen_bool(0.3) {
                let i = other[rng.gen_range(0..other.len())];
                *cells.entry((user.clone(), ids[i].clone())).or_default() += 1;
            }
        }
    }
    let retweets = cells
        .into_iter()
        .map(|((user_id, outlet_id), count)| RetweetRecord { user_id, outlet_id, count })
        .collect();

    Ok(SyntheticCorpus {
        articles,
        outlets,
        followers,
        retweets,
        truth: PlantedTruth {
            outlets: ids.clone(),
            alpha,
            x,
            clusters,
            balanced_outlet: ids[balanced].clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seeded() {
        let spec = SyntheticSpec { outlets: 6, users_per_cluster: 10, articles_per_event: 20.0, ..Default::default() };
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        let b = generate(&SyntheticSpec { seed: 1, ..spec }).unwrap();
        assert_ne!(a.articles, b.articles);
    }

    #[test]
    fn balanced_outlet_has_equal_propensities() {
        let corpus = generate(&SyntheticSpec { outlets: 4, ..Default::default() }).unwrap();
        let i = corpus.truth.outlets.iter().position(|o| *o == corpus.truth.balanced_outlet).unwrap();
        assert_eq!(corpus.truth.alpha["adverse"][i], corpus.truth.alpha["positive"][i]);
        assert!(corpus.truth.x["adverse"].iter().all(|v| v.abs() <= 0.9));
    }

    #[test]
    fn every_outlet_is_registered_and_retweeted() {
        let corpus = generate(&SyntheticSpec { outlets: 10, users_per_cluster: 40, ..Default::default() }).unwrap();
        for id in &corpus.truth.outlets {
            assert!(corpus.retweets.iter().any(|r| &r.outlet_id == id));
            assert!(corpus.articles.iter().any(|a| &a.outlet_id == id));
        }
        assert!(corpus.outlets.iter().any(|o| o.reliability == Reliability::Questionable));
    }
}
