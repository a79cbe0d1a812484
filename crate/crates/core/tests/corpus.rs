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

//! Corpus aggregation properties and independent tallies.

mod oracles;

use std::collections::HashMap;

use chrono::NaiveDate;
use newsbias_core::corpus::{
    aggregate_counts, parse_articles, parse_retweets, write_articles, ArticleRecord, CountTensor,
    EventType, Format, Narrative, OutletProfile, Platform, Reliability,
};
use oracles::Lcg;
use proptest::prelude::*;

fn registry(n: usize) -> Vec<OutletProfile> {
    (0..n)
        .map(|i| OutletProfile {
            outlet_id: format!("o{i}"),
            name: format!("Outlet {i}"),
            reliability: if i % 3 == 0 { Reliability::Questionable } else { Reliability::Reliable },
            kind: None,
        })
        .collect()
}

fn article(outlet: usize, narrative: usize, event: usize, day: u32, interactions: u64) -> ArticleRecord {
    ArticleRecord {
        outlet_id: format!("o{outlet}"),
        platform: Platform::ALL[(outlet + day as usize) % 4],
        date: NaiveDate::from_ymd_opt(2021, 1, 1 + day % 28).unwrap(),
        narrative: Narrative::ALL[narrative],
        event: EventType::ALL[event],
        interactions,
    }
}

fn arb_articles(outlets: usize) -> impl Strategy<Value = Vec<ArticleRecord>> {
    prop::collection::vec((0..outlets, 0..3usize, 0..3usize, 0..28u32, 0..1000u64), 0..200)
        .prop_map(|rows| rows.into_iter().map(|(o, n, e, d, i)| article(o, n, e, d, i)).collect())
}

#[test]
fn thousand_random_articles_match_tally() {
    let mut rng = Lcg(42);
    let reg = registry(7);
    let articles: Vec<ArticleRecord> = (0..1000)
        .map(|_| {
            article(
                rng.below(7) as usize,
                rng.below(3) as usize,
                rng.below(3) as usize,
                rng.below(28) as u32,
                rng.below(50),
            )
        })
        .collect();
    let tensor = aggregate_counts(&articles, &reg).unwrap();
    assert_eq!(tensor.total(), 1000);

    let mut tally: HashMap<(String, &str, &str), u64> = HashMap::new();
    for a in &articles {
        *tally.entry((a.outlet_id.clone(), a.narrative.as_str(), a.event.as_str())).or_default() += 1;
    }
    for (i, outlet) in tensor.outlets.iter().enumerate() {
        for n in Narrative::ALL {
            for e in EventType::ALL {
                let expected = tally.get(&(outlet.clone(), n.as_str(), e.as_str())).copied().unwrap_or(0);
                assert_eq!(tensor.get(i, *n, *e), expected);
            }
        }
    }
}

#[test]
fn random_retweet_rows_preserve_total() {
    let mut rng = Lcg(9);
    let mut text = String::from("user_id,outlet_id,count\n");
    let mut total = 0;
    for _ in 0..10 {
        let count = 1 + rng.below(9);
        total += count;
        text.push_str(&format!("u{},o{},{}\n", rng.below(3), rng.below(2), count));
    }
    let records = parse_retweets(text.as_bytes(), Format::Csv).unwrap();
    assert_eq!(records.iter().map(|r| r.count).sum::<u64>(), total);
    let mut pairs: Vec<_> = records.iter().map(|r| (&r.user_id, &r.outlet_id)).collect();
    pairs.sort();
    pairs.dedup();
    assert_eq!(pairs.len(), records.len());
}

proptest! {
    #[test]
    fn aggregation_conserves_articles(articles in arb_articles(5)) {
        let tensor = aggregate_counts(&articles, &registry(5)).unwrap();
        prop_assert_eq!(tensor.total(), articles.len() as u64);
    }

    #[test]
    fn registry_permutation_permutes_rows(articles in arb_articles(6), seed in any::<u64>()) {
        let reg = registry(6);
        let mut order: Vec<usize> = (0..6).collect();
        let mut rng = Lcg(seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.below(i as u64 + 1) as usize);
        }
        let permuted: Vec<OutletProfile> = order.iter().map(|&i| reg[i].clone()).collect();
        let base = aggregate_counts(&articles, &reg).unwrap();
        let moved = aggregate_counts(&articles, &permuted).unwrap();
        for (row, &i) in order.iter().enumerate() {
            prop_assert_eq!(&moved.outlets[row], &base.outlets[i]);
            prop_assert_eq!(moved.counts[row], base.counts[i]);
        }
    }

    #[test]
    fn tensor_csv_round_trip(articles in arb_articles(4)) {
        let tensor = aggregate_counts(&articles, &registry(4)).unwrap();
        let mut buf = Vec::new();
        tensor.write_csv(&mut buf).unwrap();
        prop_assert_eq!(CountTensor::read_csv(buf.as_slice()).unwrap(), tensor);
    }

    #[test]
    fn article_csv_round_trip(articles in arb_articles(4)) {
        let mut buf = Vec::new();
        write_articles(&mut buf, &articles).unwrap();
        prop_assert_eq!(parse_articles(buf.as_slice(), Format::Csv).unwrap(), articles);
    }
}
