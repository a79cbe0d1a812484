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

//! Propensity factors, the Selection Index, adjusted engagement and the
//! quadratic engagement regressions.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use serde::Serialize;

use crate::corpus::{ArticleRecord, DateWindow, EventType, FollowerRecord};
use crate::latent::{ParamEstimate, ParamSummary};
use crate::{Error, Result};

/// Angle of the balanced-selection line in the propensity plane.
pub const DEFAULT_THETA: f64 = FRAC_PI_4;

/// Distance of `(pf_adv, pf_pos)` from the line through the origin at
/// angle `theta`.
pub fn selection_index(pf_adv: f64, pf_pos: f64, theta: f64) -> f64 {
    // sin and cos of the rounded pi/4 differ in the last bit, which would
    // leave balanced outlets slightly off the line.
    if theta == FRAC_PI_4 {
        return (pf_adv - pf_pos).abs() * FRAC_1_SQRT_2;
    }
    (theta.sin() * pf_adv - theta.cos() * pf_pos).abs()
}

/// Interactions per content per follower.
pub fn adjusted_engagement(interactions: u64, contents: u64, followers: f64) -> Result<f64> {
    if contents == 0 {
        return Err(Error::UndefinedEngagement);
    }
    if followers.is_nan() || followers <= 0.0 {
        return Err(Error::NonPositiveFollowers(followers));
    }
    Ok(interactions as f64 / (contents as f64 * followers))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FollowerAveraging {
    /// Plain mean over the accounts active in the window.
    #[default]
    Unweighted,
    /// Mean weighted by the days each record overlaps the window.
    DurationWeighted,
}

/// Average follower count per outlet over the records overlapping `window`.
/// Outlets without an overlapping record are absent.
pub fn average_followers(
    records: &[FollowerRecord],
    window: &DateWindow,
    averaging: FollowerAveraging,
) -> BTreeMap<String, f64> {
    let mut acc: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for r in records {
        let days = window.overlap_days(r.period_start, r.period_end);
        if days == 0 {
            continue;
        }
        let weight = match averaging {
            FollowerAveraging::Unweighted => 1.0,
            FollowerAveraging::DurationWeighted => days as f64,
        };
        let entry = acc.entry(r.outlet_id.clone()).or_default();
        entry.0 += weight * r.followers as f64;
        entry.1 += weight;
    }
    acc.into_iter().map(|(id, (sum, w))| (id, sum / w)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngagementRecord {
    pub outlet_id: String,
    pub event: EventType,
    pub contents: u64,
    pub interactions: u64,
    pub followers: f64,
    pub engagement: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EngagementTable {
    pub records: Vec<EngagementRecord>,
    /// `(outlet, event)` pairs with articles but no follower data.
    pub missing_followers: Vec<(String, EventType)>,
}

/// Engagement per outlet and event type over the articles inside `window`.
/// Pairs with no contents are undefined and skipped; pairs whose outlet has
/// no usable follower average are reported in `missing_followers`.
pub fn engagement_table(
    articles: &[ArticleRecord],
    followers: &BTreeMap<String, f64>,
    window: &DateWindow,
) -> EngagementTable {
    let mut tallies: BTreeMap<(String, EventType), (u64, u64)> = BTreeMap::new();
    for a in articles.iter().filter(|a| window.contains(a.date)) {
        let t = tallies.entry((a.outlet_id.clone(), a.event)).or_default();
        t.0 += 1;
        t.1 += a.interactions;
    }
    let mut table = EngagementTable::default();
    for ((outlet_id, event), (contents, interactions)) in tallies {
        match followers.get(&outlet_id) {
            Some(&f) if f > 0.0 => {
                let engagement = adjusted_engagement(interactions, contents, f)
                    .expect("contents and followers are positive");
                table.records.push(EngagementRecord {
                    outlet_id,
                    event,
                    contents,
                    interactions,
                    followers: f,
                    engagement,
                });
            }
            _ => table.missing_followers.push((outlet_id, event)),
        }
    }
    table
}

/// Least-squares fit of `y = c0 + c1 x + c2 x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub rss: f64,
    pub n: usize,
}

impl QuadFit {
    pub fn is_convex(&self) -> bool {
        self.c2 > 0.0
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.c0 + self.c1 * x + self.c2 * x * x
    }
}

/// Ordinary least squares on the design `[1, x, x^2]`.
///
/// The abscissae are centred and scaled before a Householder QR solve, and
/// the coefficients are mapped back to the original variable.
pub fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Result<QuadFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::RankDeficient(format!("{n} points for 3 coefficients")));
    }
    let centre = xs.iter().sum::<f64>() / n as f64;
    let scale = xs.iter().map(|x| (x - centre).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::RankDeficient("all abscissae are equal".into()));
    }
    let us: Vec<f64> = xs.iter().map(|x| (x - centre) / scale).collect();

    // Column-major n x 3 design and a working copy of y.
    let mut a: Vec<[f64; 3]> = us.iter().map(|&u| [1.0, u, u * u]).collect();
    let mut b = ys.to_vec();
    let mut diag = [0.0; 3];
    for k in 0..3 {
        let norm = (k..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|x| x * x).sum::<f64>();
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for col in k..3 {
            let dot = (k..n).map(|i| v[i - k] * a[i][col]).sum::<f64>();
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                a[i][col] -= f * v[i - k];
            }
        }
        let dot = (k..n).map(|i| v[i - k] * b[i]).sum::<f64>();
        let f = 2.0 * dot / vnorm2;
        for i in k..n {
            b[i] -= f * v[i - k];
        }
    }
    let tol = 1e-10 * diag[0].abs().max(1.0);
    if let Some(k) = (0..3).find(|&k| a[k][k].abs() <= tol) {
        return Err(Error::RankDeficient(format!(
            "design column {k} is linearly dependent (fewer than three distinct abscissae?)"
        )));
    }
    let mut coef = [0.0; 3];
    for k in (0..3).rev() {
        let tail = ((k + 1)..3).map(|j| a[k][j] * coef[j]).sum::<f64>();
        coef[k] = (b[k] - tail) / a[k][k];
    }
    let rss = b[3..].iter().map(|r| r * r).sum::<f64>();

    let [b0, b1, b2] = coef;
    let (m, s) = (centre, scale);
    Ok(QuadFit {
        c0: b0 - b1 * m / s + b2 * m * m / (s * s),
        c1: b1 / s - 2.0 * b2 * m / (s * s),
        c2: b2 / (s * s),
        rss,
        n,
    })
}

/// Posterior summary of one event type together with its outlet order.
#[derive(Debug, Clone, PartialEq)]
pub struct EventFit {
    pub event: EventType,
    pub outlets: Vec<String>,
    pub summary: ParamSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasRow {
    pub outlet_id: String,
    pub x_adv: ParamEstimate,
    pub x_neu: ParamEstimate,
    pub x_pos: ParamEstimate,
    pub pf_adv: ParamEstimate,
    pub pf_neu: ParamEstimate,
    pub pf_pos: ParamEstimate,
    pub selection_index: f64,
    pub adverse_lean: bool,
}

impl BiasRow {
    pub fn narrative_bias(&self, event: EventType) -> f64 {
        match event {
            EventType::Adverse => self.x_adv.mean,
            EventType::Neutral => self.x_neu.mean,
            EventType::Positive => self.x_pos.mean,
        }
    }

    pub fn propensity(&self, event: EventType) -> f64 {
        match event {
            EventType::Adverse => self.pf_adv.mean,
            EventType::Neutral => self.pf_neu.mean,
            EventType::Positive => self.pf_pos.mean,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiasTable {
    pub rows: Vec<BiasRow>,
    /// Outlets dropped because an event-type fit was missing.
    pub excluded: Vec<String>,
}

impl BiasTable {
    pub fn get(&self, outlet_id: &str) -> Option<&BiasRow> {
        self.rows.iter().find(|r| r.outlet_id == outlet_id)
    }
}

/// Joins the three event-type fits into per-outlet bias estimates. Point
/// estimates are posterior means. Rows follow the order in which outlets
/// first appear across `fits`.
pub fn build_bias_table(fits: &[EventFit], theta: f64) -> BiasTable {
    let mut order: Vec<&str> = Vec::new();
    let mut lookup: HashMap<(&str, EventType), (&ParamEstimate, &ParamEstimate)> = HashMap::new();
    for fit in fits {
        for (i, outlet) in fit.outlets.iter().enumerate() {
            if i >= fit.summary.len() {
                break;
            }
            if !order.contains(&outlet.as_str()) {
                order.push(outlet);
            }
            lookup.insert(
                (outlet.as_str(), fit.event),
                (&fit.summary.alpha[i], &fit.summary.x[i]),
            );
        }
    }
    let mut table = BiasTable::default();
    for outlet in order {
        let get = |event| lookup.get(&(outlet, event)).copied();
        let (Some(adv), Some(neu), Some(pos)) = (
            get(EventType::Adverse),
            get(EventType::Neutral),
            get(EventType::Positive),
        ) else {
            table.excluded.push(outlet.to_string());
            continue;
        };
        table.rows.push(BiasRow {
            outlet_id: outlet.to_string(),
            x_adv: *adv.1,
            x_neu: *neu.1,
            x_pos: *pos.1,
            pf_adv: *adv.0,
            pf_neu: *neu.0,
            pf_pos: *pos.0,
            selection_index: selection_index(adv.0.mean, pos.0.mean, theta),
            adverse_lean: adv.0.mean > pos.0.mean,
        });
    }
    table
}
