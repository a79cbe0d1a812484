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

//! Stage implementations.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use newsbias_core::bias::{
    average_followers, build_bias_table, engagement_table, quadratic_fit, BiasTable, EventFit,
    FollowerAveraging,
};
use newsbias_core::corpus::{
    aggregate_counts, dataset_breakdown, filter_by_date, parse_articles, parse_followers,
    parse_outlets, parse_retweets, write_articles, write_followers, write_outlets,
    write_retweets, ArticleRecord, CountTensor, DateWindow, EventType, Format, OutletProfile,
};
use newsbias_core::latent::{
    posterior_summary, run_chain, ChainConfig, ModelConstants, Param, ParamEstimate,
    ParamSummary, PriorScale,
};
use newsbias_core::network::{
    build_graph, build_matrix, cluster_stats, louvain, threshold_graph, ThresholdOptions,
};
use newsbias_core::synth::{generate, SyntheticSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{AveragingArg, PriorScaleArg, SimulateArgs};
use crate::session::{derive_seed, ensure_dir, record_manifest, write_file, Session};
use crate::{CliError, Result};

pub const POSTERIOR_HEADER: &str = "outlet_id,event_type,param,mean,sd,q05,q95,rhat,ess";
pub const BIAS_HEADER: &str =
    "outlet_id,reliability,x_adv,x_neu,x_pos,pf_adv,pf_neu,pf_pos,selection_index,adverse_lean";
pub const ENGAGEMENT_HEADER: &str = "outlet_id,event_type,contents,interactions,followers,engagement";
const RHAT_WARNING: f64 = 1.05;

// Seed streams derived from the root seed. Fits use FIT_STREAM + event index.
const FIT_STREAM: u64 = 1;
const LOUVAIN_STREAM: u64 = 8;

fn core_err(context: impl std::fmt::Display) -> impl FnOnce(newsbias_core::Error) -> CliError {
    move |e| CliError::core(context, e)
}

fn csv_err(context: impl std::fmt::Display) -> impl FnOnce(csv::Error) -> CliError {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn to_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

fn write_csv(
    s: &Session,
    name: &str,
    write: impl FnOnce(&mut Vec<u8>) -> newsbias_core::Result<()>,
) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Internal(format!("{name}: {e}")))?;
    s.write_artifact(name, &buf)
}

fn json_bytes(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

pub fn ingest(s: &mut Session) -> Result<()> {
    let (path, bytes) = s.read_input("articles", s.cfg.articles.clone())?;
    let articles = parse_articles(bytes.as_slice(), Format::from_path(&path))
        .map_err(core_err(path.display()))?;
    let read = articles.len();
    let articles = filter_by_date(articles, s.cfg.from, s.cfg.to);
    if articles.len() < read {
        s.warn(format!("{} articles outside the date window dropped", read - articles.len()));
    }
    let (path, bytes) = s.read_input("outlets", s.cfg.outlets.clone())?;
    let outlets =
        parse_outlets(bytes.as_slice(), Format::from_path(&path)).map_err(core_err(path.display()))?;
    let counts = aggregate_counts(&articles, &outlets).map_err(core_err("articles"))?;
    let breakdown = dataset_breakdown(&articles, &outlets).map_err(core_err("articles"))?;

    if let Some(path) = s.cfg.followers.clone() {
        let (path, bytes) = s.read_input("followers", Some(path))?;
        let followers = parse_followers(bytes.as_slice(), Format::from_path(&path))
            .map_err(core_err(path.display()))?;
        write_csv(s, "followers.csv", |w| write_followers(w, &followers))?;
    }
    if let Some(path) = s.cfg.retweets.clone() {
        let (path, bytes) = s.read_input("retweets", Some(path))?;
        let retweets = parse_retweets(bytes.as_slice(), Format::from_path(&path))
            .map_err(core_err(path.display()))?;
        write_csv(s, "retweets.csv", |w| write_retweets(w, &retweets))?;
    }
    write_csv(s, "articles.csv", |w| write_articles(w, &articles))?;
    write_csv(s, "outlets.csv", |w| write_outlets(w, &outlets))?;
    write_csv(s, "counts.csv", |w| counts.write_csv(w))?;
    write_csv(s, "breakdown.csv", |w| breakdown.write_csv(w))
}

fn model_constants(prior_scale: PriorScaleArg) -> ModelConstants {
    let defaults = ModelConstants::default();
    let scale = match prior_scale {
        PriorScaleArg::Sd => PriorScale::StdDev,
        PriorScaleArg::Variance => PriorScale::Variance,
    };
    ModelConstants::with_priors(defaults.prior_sd_alpha, defaults.prior_sd_x, scale)
        .expect("default prior scales are positive")
}

pub fn fit(s: &mut Session) -> Result<()> {
    let bytes = s.read_artifact("ingest", "counts.csv")?;
    let counts = CountTensor::read_csv(bytes.as_slice()).map_err(core_err("counts.csv"))?;
    let consts = model_constants(s.cfg.prior_scale);

    let mut posterior = csv::Writer::from_writer(Vec::new());
    let mut totals = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    posterior.write_record(POSTERIOR_HEADER.split(',')).map_err(internal)?;
    totals.write_record(["outlet_id", "event_type", "total"]).map_err(internal)?;

    for (k, &event) in EventType::ALL.iter().enumerate() {
        let slice = counts.event_slice(event);
        let row_totals: Vec<u64> = slice.iter().map(|r| r.iter().sum()).collect();
        if row_totals.iter().sum::<u64>() == 0 {
            s.warn(format!("no {event} articles, event type skipped"));
            continue;
        }
        let empty = row_totals.iter().filter(|&&t| t == 0).count();
        if empty > 0 {
            s.warn(format!("{empty} outlets have no {event} articles; their estimates follow the prior"));
        }
        let config = ChainConfig {
            iterations: s.cfg.iters,
            burn_in: s.cfg.burnin,
            chains: s.cfg.chains,
            seed: derive_seed(s.cfg.seed, FIT_STREAM + k as u64),
            ..ChainConfig::default()
        };
        let draws = run_chain(&slice, &config, &consts).map_err(core_err(format!("{event} fit")))?;
        let summary =
            posterior_summary(&draws, config.burn_in).map_err(core_err(format!("{event} fit")))?;

        let high = summary
            .alpha
            .iter()
            .chain(&summary.x)
            .filter(|e| e.rhat.is_nan() || e.rhat > RHAT_WARNING)
            .count();
        if high > 0 {
            s.warn(format!(
                "{high} {event} parameters have R-hat above {RHAT_WARNING} (max {:.3})",
                summary.max_rhat()
            ));
        }
        for (i, outlet) in counts.outlets.iter().enumerate() {
            for (param, est) in [(Param::Alpha, &summary.alpha[i]), (Param::X, &summary.x[i])] {
                posterior
                    .write_record([
                        outlet.clone(),
                        event.to_string(),
                        param.as_str().to_string(),
                        est.mean.to_string(),
                        est.sd.to_string(),
                        est.q05.to_string(),
                        est.q95.to_string(),
                        est.rhat.to_string(),
                        est.ess.to_string(),
                    ])
                    .map_err(internal)?;
            }
            totals
                .write_record([outlet.as_str(), event.as_str(), &row_totals[i].to_string()])
                .map_err(internal)?;
        }
        if s.cfg.dump_draws {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["chain", "iter", "param_index", "value"]).map_err(internal)?;
            let n = draws.outlets;
            for (c, chain) in draws.chains.iter().enumerate() {
                for h in 0..draws.iterations {
                    for i in 0..n {
                        for (offset, value) in [(0, chain.alpha[h * n + i]), (n, chain.x[h * n + i])] {
                            w.write_record([
                                c.to_string(),
                                h.to_string(),
                                (offset + i).to_string(),
                                value.to_string(),
                            ])
                            .map_err(internal)?;
                        }
                    }
                }
            }
            s.write_artifact(&format!("draws_{event}.csv"), &to_bytes(w)?)?;
        }
    }
    s.write_artifact("posterior.csv", &to_bytes(posterior)?)?;
    s.write_artifact("totals.csv", &to_bytes(totals)?)
}

#[derive(Debug, Deserialize)]
struct PosteriorLine {
    outlet_id: String,
    event_type: String,
    param: String,
    mean: f64,
    sd: f64,
    q05: f64,
    q95: f64,
    rhat: f64,
    ess: f64,
}

type PendingFit = (Vec<String>, Vec<Option<ParamEstimate>>, Vec<Option<ParamEstimate>>);

/// Rebuilds the per-event fits from `posterior.csv` and joins them.
fn load_bias(s: &mut Session) -> Result<BiasTable> {
    let bytes = s.read_artifact("fit", "posterior.csv")?;
    let mut pending: BTreeMap<EventType, PendingFit> = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    for (n, row) in reader.deserialize::<PosteriorLine>().enumerate() {
        let line = n + 2;
        let row = row.map_err(csv_err("posterior.csv"))?;
        let event = EventType::parse_label(&row.event_type, line).map_err(core_err("posterior.csv"))?;
        let param = Param::parse(&row.param).ok_or_else(|| {
            CliError::Input(format!("posterior.csv: unknown param '{}' at line {line}", row.param))
        })?;
        let (outlets, alpha, x) = pending.entry(event).or_default();
        let i = match outlets.iter().position(|o| *o == row.outlet_id) {
            Some(i) => i,
            None => {
                outlets.push(row.outlet_id.clone());
                alpha.push(None);
                x.push(None);
                outlets.len() - 1
            }
        };
        let est = ParamEstimate {
            mean: row.mean,
            sd: row.sd,
            q05: row.q05,
            q95: row.q95,
            rhat: row.rhat,
            ess: row.ess,
        };
        match param {
            Param::Alpha => alpha[i] = Some(est),
            Param::X => x[i] = Some(est),
        }
    }
    let mut fits = Vec::new();
    for (event, (outlets, alpha, x)) in pending {
        let complete = |v: Vec<Option<ParamEstimate>>, param: &str| {
            v.into_iter()
                .zip(&outlets)
                .map(|(e, o)| {
                    e.ok_or_else(|| {
                        CliError::Input(format!("posterior.csv: no {param} row for {o} ({event})"))
                    })
                })
                .collect::<Result<Vec<_>>>()
        };
        let summary = ParamSummary { alpha: complete(alpha, "alpha")?, x: complete(x, "x")? };
        fits.push(EventFit { event, outlets, summary });
    }
    let table = build_bias_table(&fits, s.cfg.theta);
    if !table.excluded.is_empty() {
        s.warn(format!(
            "{} outlets lack a fit for some event type and are excluded from bias metrics",
            table.excluded.len()
        ));
    }
    Ok(table)
}

fn load_registry(s: &mut Session) -> Result<Vec<OutletProfile>> {
    let bytes = s.read_artifact("ingest", "outlets.csv")?;
    parse_outlets(bytes.as_slice(), Format::Csv).map_err(core_err("outlets.csv"))
}

pub fn bias(s: &mut Session) -> Result<()> {
    let table = load_bias(s)?;
    let registry = load_registry(s)?;
    let reliability: BTreeMap<&str, &str> = registry
        .iter()
        .map(|o| (o.outlet_id.as_str(), o.reliability.as_str()))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(BIAS_HEADER.split(',')).map_err(internal)?;
    for row in &table.rows {
        w.write_record([
            row.outlet_id.clone(),
            reliability.get(row.outlet_id.as_str()).copied().unwrap_or("").to_string(),
            row.x_adv.mean.to_string(),
            row.x_neu.mean.to_string(),
            row.x_pos.mean.to_string(),
            row.pf_adv.mean.to_string(),
            row.pf_neu.mean.to_string(),
            row.pf_pos.mean.to_string(),
            row.selection_index.to_string(),
            row.adverse_lean.to_string(),
        ])
        .map_err(internal)?;
    }
    s.write_artifact("bias.csv", &to_bytes(w)?)
}

fn analysis_window(
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    articles: &[ArticleRecord],
) -> Result<DateWindow> {
    let span = DateWindow::spanning(articles);
    let start = from.or(span.map(|w| w.start));
    let end = to.or(span.map(|w| w.end));
    match (start, end) {
        (Some(start), Some(end)) => DateWindow::new(start, end).map_err(core_err("date window")),
        _ => Err(CliError::Input("no articles and no explicit date window".into())),
    }
}

#[derive(Debug, Serialize)]
struct Panel {
    bias: &'static str,
    event_type: &'static str,
    points: usize,
    c0: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    rss: Option<f64>,
    convex: Option<bool>,
    error: Option<String>,
}

pub fn engagement(s: &mut Session) -> Result<()> {
    let bias = load_bias(s)?;
    let bytes = s.read_artifact("ingest", "articles.csv")?;
    let articles = parse_articles(bytes.as_slice(), Format::Csv).map_err(core_err("articles.csv"))?;
    let bytes = s.read_artifact("ingest", "followers.csv")?;
    let followers =
        parse_followers(bytes.as_slice(), Format::Csv).map_err(core_err("followers.csv"))?;

    let window = analysis_window(s.cfg.from, s.cfg.to, &articles)?;
    let averaging = match s.cfg.follower_averaging {
        AveragingArg::Unweighted => FollowerAveraging::Unweighted,
        AveragingArg::Duration => FollowerAveraging::DurationWeighted,
    };
    let averages = average_followers(&followers, &window, averaging);
    let table = engagement_table(&articles, &averages, &window);
    if !table.missing_followers.is_empty() {
        s.warn(format!(
            "{} outlet/event pairs have no follower data in the window and are skipped",
            table.missing_followers.len()
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(ENGAGEMENT_HEADER.split(',')).map_err(internal)?;
    for r in &table.records {
        w.write_record([
            r.outlet_id.clone(),
            r.event.to_string(),
            r.contents.to_string(),
            r.interactions.to_string(),
            r.followers.to_string(),
            r.engagement.to_string(),
        ])
        .map_err(internal)?;
    }
    s.write_artifact("engagement.csv", &to_bytes(w)?)?;

    let engagement: BTreeMap<(&str, EventType), f64> = table
        .records
        .iter()
        .map(|r| ((r.outlet_id.as_str(), r.event), r.engagement))
        .collect();
    let mut panels = Vec::new();
    for (dimension, narrative) in [("narrative", true), ("selection", false)] {
        for &event in EventType::ALL {
            let (xs, ys): (Vec<f64>, Vec<f64>) = bias
                .rows
                .iter()
                .filter_map(|row| {
                    let y = *engagement.get(&(row.outlet_id.as_str(), event))?;
                    let x = if narrative { row.narrative_bias(event) } else { row.selection_index };
                    Some((x, y))
                })
                .unzip();
            let mut panel = Panel {
                bias: dimension,
                event_type: event.as_str(),
                points: xs.len(),
                c0: None,
                c1: None,
                c2: None,
                rss: None,
                convex: None,
                error: None,
            };
            match quadratic_fit(&xs, &ys) {
                Ok(fit) => {
                    panel.c0 = Some(fit.c0);
                    panel.c1 = Some(fit.c1);
                    panel.c2 = Some(fit.c2);
                    panel.rss = Some(fit.rss);
                    panel.convex = Some(fit.is_convex());
                }
                Err(e) => panel.error = Some(e.to_string()),
            }
            panels.push(panel);
        }
    }
    s.write_artifact("fits.json", &json_bytes(&json!({ "panels": panels }))?)
}

pub fn network(s: &mut Session) -> Result<()> {
    let bias = load_bias(s)?;
    let registry = load_registry(s)?;
    let bytes = s.read_artifact("ingest", "retweets.csv")?;
    let retweets = parse_retweets(bytes.as_slice(), Format::Csv).map_err(core_err("retweets.csv"))?;

    let graph = build_graph(&build_matrix(&retweets)).with_reliability(&registry);
    let options = ThresholdOptions {
        strict: s.cfg.strict_threshold,
        drop_isolates: s.cfg.drop_isolates,
    };
    let outcome = threshold_graph(&graph, options).map_err(core_err("audience graph"))?;
    let r = &outcome.report;
    eprintln!(
        "threshold: {} nodes / {} edges in, {} isolated removed, mean weight {:.6}, \
         {} edges removed, {} newly isolated removed, {} nodes / {} edges out",
        r.nodes_in,
        r.edges_in,
        r.isolated_removed,
        r.mean_weight,
        r.edges_removed,
        r.newly_isolated_removed,
        r.nodes_out,
        r.edges_out
    );
    let partition = louvain(&outcome.graph, derive_seed(s.cfg.seed, LOUVAIN_STREAM));
    let graph = outcome.graph.clone().with_partition(&partition);
    let stats = cluster_stats(&graph.nodes, &partition, &bias, &registry);
    if stats.missing_bias > 0 || stats.missing_registry > 0 {
        s.warn(format!(
            "cluster statistics skip {} nodes without bias estimates and {} without a registry entry",
            stats.missing_bias, stats.missing_registry
        ));
    }

    let mut clusters = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    clusters.write_record(["outlet_id", "cluster_id"]).map_err(internal)?;
    for (node, label) in graph.nodes.iter().zip(&partition.assignment) {
        clusters.write_record([node.clone(), label.to_string()]).map_err(internal)?;
    }
    s.write_artifact("graph.graphml", graph.to_graphml().as_bytes())?;
    write_csv(s, "edges.csv", |w| graph.write_edges_csv(w))?;
    s.write_artifact("clusters.csv", &to_bytes(clusters)?)?;
    write_csv(s, "cluster_stats.csv", |w| stats.write_csv(w))?;
    s.write_artifact("threshold.json", &json_bytes(&outcome.report)?)
}

#[derive(Debug, Deserialize, Serialize)]
struct BiasLine {
    outlet_id: String,
    reliability: String,
    x_adv: f64,
    x_neu: f64,
    x_pos: f64,
    pf_adv: f64,
    pf_neu: f64,
    pf_pos: f64,
    selection_index: f64,
    adverse_lean: bool,
}

#[derive(Debug, Deserialize)]
struct EngagementLine {
    outlet_id: String,
    event_type: String,
    engagement: f64,
}

#[derive(Debug, Deserialize)]
struct ClusterLine {
    outlet_id: String,
    cluster_id: usize,
}

#[derive(Debug, Deserialize, Serialize)]
struct ClusterStatLine {
    cluster_id: usize,
    size: usize,
    frac_questionable: Option<f64>,
    mean_x_adv: Option<f64>,
    mean_x_pos: Option<f64>,
    mean_selection: Option<f64>,
    frac_adverse_lean: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ReportOutlet {
    #[serde(flatten)]
    bias: BiasLine,
    cluster_id: Option<usize>,
    engagement: BTreeMap<String, f64>,
}

fn read_rows<T: serde::de::DeserializeOwned>(
    s: &mut Session,
    stage: &'static str,
    name: &str,
) -> Result<Vec<T>> {
    let bytes = s.read_artifact(stage, name)?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(name))
}

pub fn report(s: &mut Session) -> Result<()> {
    let bias: Vec<BiasLine> = read_rows(s, "bias", "bias.csv")?;
    let engagement: Vec<EngagementLine> = read_rows(s, "engagement", "engagement.csv")?;
    let clusters: Vec<ClusterLine> = read_rows(s, "network", "clusters.csv")?;
    let stats: Vec<ClusterStatLine> = read_rows(s, "network", "cluster_stats.csv")?;

    let cluster_of: BTreeMap<String, usize> =
        clusters.into_iter().map(|c| (c.outlet_id, c.cluster_id)).collect();
    let mut by_outlet: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for e in engagement {
        by_outlet.entry(e.outlet_id).or_default().insert(e.event_type, e.engagement);
    }
    let outlets: Vec<ReportOutlet> = bias
        .into_iter()
        .map(|b| ReportOutlet {
            cluster_id: cluster_of.get(&b.outlet_id).copied(),
            engagement: by_outlet.remove(&b.outlet_id).unwrap_or_default(),
            bias: b,
        })
        .collect();
    s.write_artifact("report.json", &json_bytes(&json!({ "outlets": outlets, "clusters": stats }))?)
}

pub fn run_all(s: &mut Session) -> Result<()> {
    for (flag, value) in [("followers", &s.cfg.followers), ("retweets", &s.cfg.retweets)] {
        if value.is_none() {
            return Err(CliError::Input(format!("--{flag} is required for a full run")));
        }
    }
    ingest(s)?;
    fit(s)?;
    bias(s)?;
    engagement(s)?;
    network(s)?;
    report(s)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let spec = SyntheticSpec {
        outlets: args.n_outlets,
        clusters: args.clusters,
        users_per_cluster: args.users_per_cluster,
        articles_per_event: args.articles_per_event,
        seed: args.seed,
        ..SyntheticSpec::default()
    };
    let corpus = generate(&spec).map_err(core_err("simulate"))?;
    let write = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> newsbias_core::Result<()>| {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::Internal(format!("{name}: {e}")))?;
        write_file(&args.out.join(name), &buf)
    };
    write("articles.csv", &|w| write_articles(w, &corpus.articles))?;
    write("outlets.csv", &|w| write_outlets(w, &corpus.outlets))?;
    write("followers.csv", &|w| write_followers(w, &corpus.followers))?;
    write("retweets.csv", &|w| write_retweets(w, &corpus.retweets))?;
    write_file(&args.out.join("truth.json"), &json_bytes(&corpus.truth)?)?;
    record_manifest(&args.out, "simulate", json!({ "config": args }))
}
