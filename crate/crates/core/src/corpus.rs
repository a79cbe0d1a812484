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

//! Canonical records, their CSV/JSONL encodings, and aggregation of
//! labeled articles into the per-outlet count tensor.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const ARTICLES_HEADER: &str = "outlet_id,platform,date,narrative,event,interactions";
pub const OUTLETS_HEADER: &str = "outlet_id,name,reliability,kind";
pub const FOLLOWERS_HEADER: &str = "outlet_id,platform,period_start,period_end,followers";
pub const RETWEETS_HEADER: &str = "user_id,outlet_id,count";
pub const COUNTS_HEADER: &str = "outlet_id,narrative,event,count";
pub const BREAKDOWN_HEADER: &str =
    "category,sources,sources_pct,contents,contents_pct,interactions,interactions_pct";

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// Guesses the format from a file name, defaulting to CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

macro_rules! label_enum {
    ($(#[$meta:meta])* $name:ident, $kind:literal, { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn parse_label(value: &str, line: usize) -> Result<Self> {
                match value {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::UnknownLabel {
                        kind: $kind,
                        value: value.to_string(),
                        line,
                    }),
                }
            }

            /// Position of the label in [`Self::ALL`].
            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

label_enum!(Platform, "platform", {
    Facebook => "facebook",
    Instagram => "instagram",
    Twitter => "twitter",
    Youtube => "youtube",
});

label_enum!(
    /// Stance conveyed by an article, ordered along the latent axis.
    Narrative, "narrative", {
    Anti => "anti",
    Neutral => "neutral",
    Pro => "pro",
});

label_enum!(
    /// Nature of the event an article reports on.
    EventType, "event", {
    Adverse => "adverse",
    Neutral => "neutral",
    Positive => "positive",
});

label_enum!(Reliability, "reliability", {
    Questionable => "questionable",
    Reliable => "reliable",
});

label_enum!(OutletKind, "kind", {
    Newspaper => "newspaper",
    Online => "online",
    Tv => "tv",
    Radio => "radio",
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleRecord {
    pub outlet_id: String,
    pub platform: Platform,
    pub date: NaiveDate,
    pub narrative: Narrative,
    pub event: EventType,
    pub interactions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutletProfile {
    pub outlet_id: String,
    pub name: String,
    pub reliability: Reliability,
    pub kind: Option<OutletKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowerRecord {
    pub outlet_id: String,
    pub platform: Platform,
    pub period_start: NaiveDate,
    pub period_end: NaiveDate,
    pub followers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RetweetRecord {
    pub user_id: String,
    pub outlet_id: String,
    pub count: u64,
}

/// Inclusive calendar window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidConfig(format!(
                "window start {start} is after window end {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    /// Number of days shared with `[start, end]`, zero when disjoint.
    pub fn overlap_days(&self, start: NaiveDate, end: NaiveDate) -> i64 {
        let lo = self.start.max(start);
        let hi = self.end.min(end);
        if lo > hi {
            0
        } else {
            (hi - lo).num_days() + 1
        }
    }

    /// Smallest window containing every article date, if any.
    pub fn spanning(articles: &[ArticleRecord]) -> Option<Self> {
        let start = articles.iter().map(|a| a.date).min()?;
        let end = articles.iter().map(|a| a.date).max()?;
        Some(Self { start, end })
    }
}

/// Keeps the articles whose date falls inside the optional bounds.
pub fn filter_by_date(
    articles: Vec<ArticleRecord>,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
) -> Vec<ArticleRecord> {
    articles
        .into_iter()
        .filter(|a| from.is_none_or(|f| a.date >= f) && to.is_none_or(|t| a.date <= t))
        .collect()
}

// Wire representations. Every field is read as text so that validation can
// report the offending value verbatim.

#[derive(Debug, Deserialize)]
struct RawArticle {
    outlet_id: String,
    platform: String,
    date: String,
    narrative: String,
    event: String,
    interactions: String,
}

#[derive(Debug, Deserialize)]
struct RawOutlet {
    outlet_id: String,
    name: String,
    reliability: String,
    #[serde(default)]
    kind: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawFollower {
    outlet_id: String,
    platform: String,
    period_start: String,
    period_end: String,
    followers: String,
}

#[derive(Debug, Deserialize)]
struct RawRetweet {
    user_id: String,
    outlet_id: String,
    count: String,
}

#[derive(Debug, Deserialize)]
struct RawCount {
    outlet_id: String,
    narrative: String,
    event: String,
    count: String,
}

/// Reads `(line, row)` pairs. Lines are 1-based and count the CSV header.
fn read_rows<T: DeserializeOwned, R: Read>(reader: R, format: Format) -> Result<Vec<(usize, T)>> {
    match format {
        Format::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .trim(csv::Trim::All)
                .from_reader(reader);
            let headers = rdr.headers()?.clone();
            let mut rows = Vec::new();
            let mut record = csv::StringRecord::new();
            loop {
                let more = rdr
                    .read_record(&mut record)
                    .map_err(|e| csv_error(e, &headers, rows.len() + 2))?;
                if !more {
                    break;
                }
                let line = record
                    .position()
                    .map_or(rows.len() + 2, |p| p.line() as usize);
                let row = record
                    .deserialize(Some(&headers))
                    .map_err(|e| csv_error(e, &headers, line))?;
                rows.push((line, row));
            }
            Ok(rows)
        }
        Format::Jsonl => {
            let mut rows = Vec::new();
            for (idx, line) in BufReader::new(reader).lines().enumerate() {
                let line_no = idx + 1;
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let value: serde_json::Value =
                    serde_json::from_str(&line).map_err(|e| Error::Malformed {
                        line: line_no,
                        field: "record".into(),
                        reason: e.to_string(),
                    })?;
                let serde_json::Value::Object(map) = value else {
                    return Err(Error::Malformed {
                        line: line_no,
                        field: "record".into(),
                        reason: "expected a JSON object".into(),
                    });
                };
                let stringly: serde_json::Map<String, serde_json::Value> = map
                    .into_iter()
                    .map(|(k, v)| {
                        let v = match v {
                            serde_json::Value::String(s) => serde_json::Value::String(s),
                            serde_json::Value::Null => serde_json::Value::Null,
                            other => serde_json::Value::String(other.to_string()),
                        };
                        (k, v)
                    })
                    .collect();
                let row = serde_json::from_value(serde_json::Value::Object(stringly)).map_err(
                    |e| Error::Malformed {
                        line: line_no,
                        field: "record".into(),
                        reason: e.to_string(),
                    },
                )?;
                rows.push((line_no, row));
            }
            Ok(rows)
        }
    }
}

fn csv_error(err: csv::Error, headers: &csv::StringRecord, fallback_line: usize) -> Error {
    let line = err
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    match err.kind() {
        csv::ErrorKind::Deserialize { err: de, .. } => Error::Malformed {
            line,
            field: de
                .field()
                .and_then(|i| headers.get(i as usize))
                .unwrap_or("record")
                .to_string(),
            reason: de.kind().to_string(),
        },
        csv::ErrorKind::UnequalLengths { .. } => Error::Malformed {
            line,
            field: "record".into(),
            reason: "wrong number of fields".into(),
        },
        _ => err.into(),
    }
}

fn parse_date(value: &str, field: &str, line: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, DATE_FORMAT).map_err(|_| Error::Malformed {
        line,
        field: field.into(),
        reason: format!("expected an ISO-8601 date, got '{value}'"),
    })
}

fn parse_count(value: &str, field: &str, line: usize) -> Result<u64> {
    value.parse::<u64>().map_err(|_| Error::Malformed {
        line,
        field: field.into(),
        reason: format!("expected a nonnegative integer, got '{value}'"),
    })
}

fn non_empty(value: String, field: &str, line: usize) -> Result<String> {
    if value.is_empty() {
        Err(Error::Malformed {
            line,
            field: field.into(),
            reason: "must not be empty".into(),
        })
    } else {
        Ok(value)
    }
}

pub fn parse_articles<R: Read>(reader: R, format: Format) -> Result<Vec<ArticleRecord>> {
    read_rows::<RawArticle, _>(reader, format)?
        .into_iter()
        .map(|(line, raw)| {
            Ok(ArticleRecord {
                outlet_id: non_empty(raw.outlet_id, "outlet_id", line)?,
                platform: Platform::parse_label(&raw.platform, line)?,
                date: parse_date(&raw.date, "date", line)?,
                narrative: Narrative::parse_label(&raw.narrative, line)?,
                event: EventType::parse_label(&raw.event, line)?,
                interactions: parse_count(&raw.interactions, "interactions", line)?,
            })
        })
        .collect()
}

/// Parses an outlet registry, rejecting duplicate ids.
pub fn parse_outlets<R: Read>(reader: R, format: Format) -> Result<Vec<OutletProfile>> {
    let outlets = read_rows::<RawOutlet, _>(reader, format)?
        .into_iter()
        .map(|(line, raw)| {
            let kind = match raw.kind.as_deref() {
                None | Some("") => None,
                Some(k) => Some(OutletKind::parse_label(k, line)?),
            };
            Ok(OutletProfile {
                outlet_id: non_empty(raw.outlet_id, "outlet_id", line)?,
                name: raw.name,
                reliability: Reliability::parse_label(&raw.reliability, line)?,
                kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    validate_registry(&outlets)?;
    Ok(outlets)
}

pub fn validate_registry(outlets: &[OutletProfile]) -> Result<()> {
    let mut seen = HashSet::with_capacity(outlets.len());
    for outlet in outlets {
        if !seen.insert(outlet.outlet_id.as_str()) {
            return Err(Error::DuplicateOutlet(outlet.outlet_id.clone()));
        }
    }
    Ok(())
}

pub fn parse_followers<R: Read>(reader: R, format: Format) -> Result<Vec<FollowerRecord>> {
    read_rows::<RawFollower, _>(reader, format)?
        .into_iter()
        .map(|(line, raw)| {
            let period_start = parse_date(&raw.period_start, "period_start", line)?;
            let period_end = parse_date(&raw.period_end, "period_end", line)?;
            if period_start > period_end {
                return Err(Error::Malformed {
                    line,
                    field: "period_end".into(),
                    reason: format!("period ends ({period_end}) before it starts ({period_start})"),
                });
            }
            Ok(FollowerRecord {
                outlet_id: non_empty(raw.outlet_id, "outlet_id", line)?,
                platform: Platform::parse_label(&raw.platform, line)?,
                period_start,
                period_end,
                followers: parse_count(&raw.followers, "followers", line)?,
            })
        })
        .collect()
}

/// Parses retweet counts, summing repeated `(user, outlet)` pairs. The
/// result keeps the order in which each pair first appeared.
pub fn parse_retweets<R: Read>(reader: R, format: Format) -> Result<Vec<RetweetRecord>> {
    let mut merged: Vec<RetweetRecord> = Vec::new();
    let mut slot: HashMap<(String, String), usize> = HashMap::new();
    for (line, raw) in read_rows::<RawRetweet, _>(reader, format)? {
        let user_id = non_empty(raw.user_id, "user_id", line)?;
        let outlet_id = non_empty(raw.outlet_id, "outlet_id", line)?;
        let count = parse_count(&raw.count, "count", line)?;
        if count == 0 {
            return Err(Error::Malformed {
                line,
                field: "count".into(),
                reason: "retweet count must be at least 1".into(),
            });
        }
        match slot.get(&(user_id.clone(), outlet_id.clone())) {
            Some(&i) => merged[i].count += count,
            None => {
                slot.insert((user_id.clone(), outlet_id.clone()), merged.len());
                merged.push(RetweetRecord {
                    user_id,
                    outlet_id,
                    count,
                });
            }
        }
    }
    Ok(merged)
}

/// Article counts per outlet, narrative and event type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTensor {
    pub outlets: Vec<String>,
    /// `counts[i][narrative][event]`.
    pub counts: Vec<[[u64; 3]; 3]>,
}

impl CountTensor {
    pub fn zeros(outlets: Vec<String>) -> Self {
        let counts = vec![[[0; 3]; 3]; outlets.len()];
        Self { outlets, counts }
    }

    pub fn len(&self) -> usize {
        self.outlets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outlets.is_empty()
    }

    pub fn get(&self, outlet: usize, narrative: Narrative, event: EventType) -> u64 {
        self.counts[outlet][narrative.index()][event.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().flatten().sum()
    }

    /// The `N x 3` slice of narrative counts for one event type.
    pub fn event_slice(&self, event: EventType) -> Vec<[u64; 3]> {
        self.counts
            .iter()
            .map(|cell| {
                let k = event.index();
                [cell[0][k], cell[1][k], cell[2][k]]
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(COUNTS_HEADER.split(','))?;
        for (outlet, cell) in self.outlets.iter().zip(&self.counts) {
            for narrative in Narrative::ALL {
                for event in EventType::ALL {
                    w.write_record([
                        outlet.as_str(),
                        narrative.as_str(),
                        event.as_str(),
                        &cell[narrative.index()][event.index()].to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the long format written by [`CountTensor::write_csv`]. Outlets
    /// keep the order of their first appearance; missing cells are zero.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut tensor = CountTensor::zeros(Vec::new());
        let mut index: HashMap<String, usize> = HashMap::new();
        for (line, raw) in read_rows::<RawCount, _>(reader, Format::Csv)? {
            let narrative = Narrative::parse_label(&raw.narrative, line)?;
            let event = EventType::parse_label(&raw.event, line)?;
            let count = parse_count(&raw.count, "count", line)?;
            let i = *index.entry(raw.outlet_id.clone()).or_insert_with(|| {
                tensor.outlets.push(raw.outlet_id.clone());
                tensor.counts.push([[0; 3]; 3]);
                tensor.outlets.len() - 1
            });
            tensor.counts[i][narrative.index()][event.index()] = count;
        }
        Ok(tensor)
    }
}

/// Tallies articles into a tensor whose rows follow the registry order.
pub fn aggregate_counts(
    articles: &[ArticleRecord],
    registry: &[OutletProfile],
) -> Result<CountTensor> {
    let index: HashMap<&str, usize> = registry
        .iter()
        .enumerate()
        .map(|(i, o)| (o.outlet_id.as_str(), i))
        .collect();
    let mut tensor = CountTensor::zeros(registry.iter().map(|o| o.outlet_id.clone()).collect());
    for (pos, article) in articles.iter().enumerate() {
        let &i = index
            .get(article.outlet_id.as_str())
            .ok_or_else(|| Error::UnregisteredOutlet {
                outlet_id: article.outlet_id.clone(),
                line: pos + 1,
            })?;
        tensor.counts[i][article.narrative.index()][article.event.index()] += 1;
    }
    Ok(tensor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BreakdownRow {
    pub sources: u64,
    pub contents: u64,
    pub interactions: u64,
}

/// Sources, contents and interactions per reliability class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakdownTable {
    pub questionable: BreakdownRow,
    pub reliable: BreakdownRow,
    pub total: BreakdownRow,
}

/// Share of `part` in `whole` as a percentage; zero when `whole` is zero.
pub fn percentage(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

impl BreakdownTable {
    pub fn row(&self, reliability: Reliability) -> &BreakdownRow {
        match reliability {
            Reliability::Questionable => &self.questionable,
            Reliability::Reliable => &self.reliable,
        }
    }

    /// `(sources, contents, interactions)` percentages of the class,
    /// unrounded.
    pub fn percentages(&self, reliability: Reliability) -> (f64, f64, f64) {
        let row = self.row(reliability);
        (
            percentage(row.sources, self.total.sources),
            percentage(row.contents, self.total.contents),
            percentage(row.interactions, self.total.interactions),
        )
    }

    /// Writes the table with percentages rounded to one decimal.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(BREAKDOWN_HEADER.split(','))?;
        let rows = [
            ("questionable", &self.questionable),
            ("reliable", &self.reliable),
            ("total", &self.total),
        ];
        for (name, row) in rows {
            w.write_record([
                name.to_string(),
                row.sources.to_string(),
                format!("{:.1}", percentage(row.sources, self.total.sources)),
                row.contents.to_string(),
                format!("{:.1}", percentage(row.contents, self.total.contents)),
                row.interactions.to_string(),
                format!("{:.1}", percentage(row.interactions, self.total.interactions)),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Breakdown of the corpus by reliability class. Every registered outlet
/// counts as a source, whether or not it published anything.
pub fn dataset_breakdown(
    articles: &[ArticleRecord],
    registry: &[OutletProfile],
) -> Result<BreakdownTable> {
    if articles.is_empty() {
        return Err(Error::NoArticles);
    }
    let reliability: HashMap<&str, Reliability> = registry
        .iter()
        .map(|o| (o.outlet_id.as_str(), o.reliability))
        .collect();
    let mut rows: BTreeMap<Reliability, BreakdownRow> = BTreeMap::new();
    for outlet in registry {
        rows.entry(outlet.reliability).or_default().sources += 1;
    }
    for (pos, article) in articles.iter().enumerate() {
        let class = *reliability
            .get(article.outlet_id.as_str())
            .ok_or_else(|| Error::UnregisteredOutlet {
                outlet_id: article.outlet_id.clone(),
                line: pos + 1,
            })?;
        let row = rows.entry(class).or_default();
        row.contents += 1;
        row.interactions += article.interactions;
    }
    let questionable = rows.remove(&Reliability::Questionable).unwrap_or_default();
    let reliable = rows.remove(&Reliability::Reliable).unwrap_or_default();
    let total = BreakdownRow {
        sources: questionable.sources + reliable.sources,
        contents: questionable.contents + reliable.contents,
        interactions: questionable.interactions + reliable.interactions,
    };
    Ok(BreakdownTable {
        questionable,
        reliable,
        total,
    })
}

// Canonical writers. Output is CSV with the exchange headers above.

pub fn write_articles<W: Write>(writer: W, articles: &[ArticleRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ARTICLES_HEADER.split(','))?;
    for a in articles {
        w.write_record([
            a.outlet_id.as_str(),
            a.platform.as_str(),
            &a.date.format(DATE_FORMAT).to_string(),
            a.narrative.as_str(),
            a.event.as_str(),
            &a.interactions.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outlets<W: Write>(writer: W, outlets: &[OutletProfile]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(OUTLETS_HEADER.split(','))?;
    for o in outlets {
        w.write_record([
            o.outlet_id.as_str(),
            o.name.as_str(),
            o.reliability.as_str(),
            o.kind.map_or("", OutletKind::as_str),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_followers<W: Write>(writer: W, followers: &[FollowerRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(FOLLOWERS_HEADER.split(','))?;
    for f in followers {
        w.write_record([
            f.outlet_id.as_str(),
            f.platform.as_str(),
            &f.period_start.format(DATE_FORMAT).to_string(),
            &f.period_end.format(DATE_FORMAT).to_string(),
            &f.followers.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_retweets<W: Write>(writer: W, retweets: &[RetweetRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RETWEETS_HEADER.split(','))?;
    for r in retweets {
        w.write_record([r.user_id.as_str(), r.outlet_id.as_str(), &r.count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FORMAT).unwrap()
    }

    fn outlet(id: &str, reliability: Reliability) -> OutletProfile {
        OutletProfile {
            outlet_id: id.into(),
            name: id.to_uppercase(),
            reliability,
            kind: None,
        }
    }

    fn article(id: &str, narrative: Narrative, event: EventType) -> ArticleRecord {
        ArticleRecord {
            outlet_id: id.into(),
            platform: Platform::Twitter,
            date: date("2021-03-01"),
            narrative,
            event,
            interactions: 1,
        }
    }

    #[test]
    fn parses_a_csv_row() {
        let text = format!("{ARTICLES_HEADER}\no1,twitter,2021-03-01,anti,adverse,12\n");
        let parsed = parse_articles(text.as_bytes(), Format::Csv).unwrap();
        assert_eq!(
            parsed,
            vec![ArticleRecord {
                outlet_id: "o1".into(),
                platform: Platform::Twitter,
                date: date("2021-03-01"),
                narrative: Narrative::Anti,
                event: EventType::Adverse,
                interactions: 12,
            }]
        );
    }

    #[test]
    fn parses_jsonl_with_numeric_fields() {
        let text = r#"{"outlet_id":"o1","platform":"youtube","date":"2020-01-02","narrative":"pro","event":"positive","interactions":7}

{"outlet_id":"o2","platform":"facebook","date":"2020-01-03","narrative":"neutral","event":"neutral","interactions":"0"}
"#;
        let parsed = parse_articles(text.as_bytes(), Format::Jsonl).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].interactions, 7);
        assert_eq!(parsed[1].outlet_id, "o2");
    }

    #[test]
    fn empty_stream_yields_no_records() {
        assert!(parse_articles("".as_bytes(), Format::Csv).unwrap().is_empty());
        assert!(parse_articles("".as_bytes(), Format::Jsonl).unwrap().is_empty());
        assert!(parse_retweets("".as_bytes(), Format::Csv).unwrap().is_empty());
        let header_only = format!("{ARTICLES_HEADER}\n");
        assert!(parse_articles(header_only.as_bytes(), Format::Csv)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unknown_narrative_names_value_and_line() {
        let text = format!(
            "{ARTICLES_HEADER}\no1,twitter,2021-03-01,anti,adverse,1\no1,twitter,2021-03-01,provax,adverse,1\n"
        );
        let err = parse_articles(text.as_bytes(), Format::Csv).unwrap_err();
        assert_eq!(err.to_string(), "unknown narrative label 'provax' at line 3");
    }

    #[test]
    fn unknown_platform_is_rejected() {
        let text = format!("{ARTICLES_HEADER}\no1,tiktok,2021-03-01,anti,adverse,1\n");
        let err = parse_articles(text.as_bytes(), Format::Csv).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel { kind: "platform", .. }));
    }

    #[test]
    fn malformed_fields_carry_line_and_field() {
        let text = format!("{ARTICLES_HEADER}\no1,twitter,2021-03-01,anti,adverse,-4\n");
        match parse_articles(text.as_bytes(), Format::Csv).unwrap_err() {
            Error::Malformed { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "interactions");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{ARTICLES_HEADER}\no1,twitter,03/01/2021,anti,adverse,4\n");
        match parse_articles(text.as_bytes(), Format::Csv).unwrap_err() {
            Error::Malformed { field, .. } => assert_eq!(field, "date"),
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{ARTICLES_HEADER}\no1,twitter,2021-03-01\n");
        assert!(matches!(
            parse_articles(text.as_bytes(), Format::Csv).unwrap_err(),
            Error::Malformed { line: 2, .. }
        ));
        let err = parse_articles("{\"outlet_id\":\"o1\"}\n".as_bytes(), Format::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }));
    }

    #[test]
    fn outlet_ids_are_kept_verbatim() {
        let text = format!("{ARTICLES_HEADER}\n007,twitter,2021-03-01,anti,adverse,1\n");
        let parsed = parse_articles(text.as_bytes(), Format::Csv).unwrap();
        assert_eq!(parsed[0].outlet_id, "007");
    }

    #[test]
    fn registry_parsing() {
        let text = format!("{OUTLETS_HEADER}\no1,Daily,reliable,newspaper\no2,Blog,questionable,\n");
        let outlets = parse_outlets(text.as_bytes(), Format::Csv).unwrap();
        assert_eq!(outlets[0].kind, Some(OutletKind::Newspaper));
        assert_eq!(outlets[1].kind, None);
        assert_eq!(outlets[1].reliability, Reliability::Questionable);

        let dup = format!("{OUTLETS_HEADER}\no1,A,reliable,\no1,B,reliable,\n");
        assert!(matches!(
            parse_outlets(dup.as_bytes(), Format::Csv),
            Err(Error::DuplicateOutlet(id)) if id == "o1"
        ));
    }

    #[test]
    fn follower_periods_must_be_ordered() {
        let ok = format!("{FOLLOWERS_HEADER}\no1,facebook,2020-01-01,2020-12-31,5000\n");
        assert_eq!(parse_followers(ok.as_bytes(), Format::Csv).unwrap()[0].followers, 5000);
        let bad = format!("{FOLLOWERS_HEADER}\no1,facebook,2021-01-01,2020-12-31,5000\n");
        assert!(parse_followers(bad.as_bytes(), Format::Csv).is_err());
    }

    #[test]
    fn duplicate_retweet_pairs_are_summed() {
        let text = format!("{RETWEETS_HEADER}\nu1,o1,2\nu2,o1,1\nu1,o1,3\n");
        let parsed = parse_retweets(text.as_bytes(), Format::Csv).unwrap();
        assert_eq!(
            parsed,
            vec![
                RetweetRecord { user_id: "u1".into(), outlet_id: "o1".into(), count: 5 },
                RetweetRecord { user_id: "u2".into(), outlet_id: "o1".into(), count: 1 },
            ]
        );
        let zero = format!("{RETWEETS_HEADER}\nu1,o1,0\n");
        assert!(parse_retweets(zero.as_bytes(), Format::Csv).is_err());
    }

    #[test]
    fn aggregation_of_identical_articles() {
        let registry = vec![outlet("o1", Reliability::Reliable), outlet("o2", Reliability::Reliable)];
        let articles = vec![article("o1", Narrative::Pro, EventType::Positive); 3];
        let tensor = aggregate_counts(&articles, &registry).unwrap();
        assert_eq!(tensor.get(0, Narrative::Pro, EventType::Positive), 3);
        assert_eq!(tensor.total(), 3);
        assert_eq!(tensor.counts[1], [[0; 3]; 3]);
    }

    #[test]
    fn aggregation_over_two_outlets() {
        let registry = vec![outlet("o1", Reliability::Reliable), outlet("o2", Reliability::Reliable)];
        let articles = vec![
            article("o1", Narrative::Anti, EventType::Adverse),
            article("o2", Narrative::Neutral, EventType::Positive),
        ];
        let tensor = aggregate_counts(&articles, &registry).unwrap();
        assert_eq!(tensor.get(0, Narrative::Anti, EventType::Adverse), 1);
        assert_eq!(tensor.get(1, Narrative::Neutral, EventType::Positive), 1);
        assert_eq!(tensor.total(), 2);
        assert_eq!(
            tensor.event_slice(EventType::Positive),
            vec![[0, 0, 0], [0, 1, 0]]
        );
    }

    #[test]
    fn aggregation_rejects_unregistered_outlets() {
        let registry = vec![outlet("o1", Reliability::Reliable)];
        let articles = vec![article("ghost", Narrative::Anti, EventType::Adverse)];
        match aggregate_counts(&articles, &registry).unwrap_err() {
            Error::UnregisteredOutlet { outlet_id, .. } => assert_eq!(outlet_id, "ghost"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn breakdown_single_reliable_outlet() {
        let registry = vec![outlet("o1", Reliability::Reliable)];
        let mut articles = vec![article("o1", Narrative::Pro, EventType::Positive); 5];
        for (i, a) in articles.iter_mut().enumerate() {
            a.interactions = i as u64 * 10;
        }
        let table = dataset_breakdown(&articles, &registry).unwrap();
        assert_eq!(
            table.reliable,
            BreakdownRow { sources: 1, contents: 5, interactions: 100 }
        );
        assert_eq!(table.questionable, BreakdownRow::default());
        assert_eq!(table.percentages(Reliability::Reliable), (100.0, 100.0, 100.0));
        assert_eq!(table.percentages(Reliability::Questionable), (0.0, 0.0, 0.0));
    }

    #[test]
    fn breakdown_requires_articles() {
        let registry = vec![outlet("o1", Reliability::Reliable)];
        let err = dataset_breakdown(&[], &registry).unwrap_err();
        assert_eq!(err.to_string(), "no articles");
    }

    #[test]
    fn breakdown_rounds_to_one_decimal() {
        let table = BreakdownTable {
            questionable: BreakdownRow { sources: 161, contents: 44_547, interactions: 10_898_774 },
            reliable: BreakdownRow { sources: 521, contents: 308_983, interactions: 84_332_137 },
            total: BreakdownRow { sources: 682, contents: 353_530, interactions: 95_230_911 },
        };
        let mut out = Vec::new();
        table.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], BREAKDOWN_HEADER);
        assert_eq!(lines[1], "questionable,161,23.6,44547,12.6,10898774,11.4");
        assert_eq!(lines[2], "reliable,521,76.4,308983,87.4,84332137,88.6");
        assert_eq!(lines[3], "total,682,100.0,353530,100.0,95230911,100.0");
    }

    #[test]
    fn window_filtering_and_overlap() {
        let mut a = article("o1", Narrative::Anti, EventType::Adverse);
        let mut b = a.clone();
        a.date = date("2020-01-01");
        b.date = date("2021-06-01");
        let kept = filter_by_date(vec![a.clone(), b.clone()], Some(date("2021-01-01")), None);
        assert_eq!(kept, vec![b.clone()]);
        let window = DateWindow::spanning(&[a, b]).unwrap();
        assert_eq!(window.start, date("2020-01-01"));
        assert_eq!(window.overlap_days(date("2021-06-01"), date("2022-01-01")), 1);
        assert_eq!(window.overlap_days(date("2019-01-01"), date("2019-12-31")), 0);
        assert!(DateWindow::new(date("2021-01-02"), date("2021-01-01")).is_err());
    }
}
