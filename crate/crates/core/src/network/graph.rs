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

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::louvain::Partition;
use super::matrix::{RetweetMatrix, SparseColumn};
use crate::corpus::{OutletProfile, Reliability};
use crate::{Error, Result};

/// Undirected weighted edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AudienceGraph {
    pub nodes: Vec<String>,
    pub reliability: Vec<Option<Reliability>>,
    pub edges: Vec<Edge>,
    pub clusters: Option<Vec<usize>>,
}

impl AudienceGraph {
    /// Graph over nodes `n0..n{count-1}`. Pairs are normalised so that
    /// `a < b`; self-loops are dropped.
    pub fn from_edges(count: usize, edges: &[(usize, usize, f64)]) -> Self {
        let nodes = (0..count).map(|i| format!("n{i}")).collect();
        let edges = edges
            .iter()
            .filter(|(a, b, _)| a != b)
            .map(|&(a, b, weight)| Edge { a: a.min(b), b: a.max(b), weight })
            .collect();
        Self {
            nodes,
            reliability: vec![None; count],
            edges,
            clusters: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Number of incident edges per node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == a && e.b == b).map(|e| e.weight)
    }

    pub fn with_reliability(mut self, registry: &[OutletProfile]) -> Self {
        let lookup: HashMap<&str, Reliability> = registry
            .iter()
            .map(|o| (o.outlet_id.as_str(), o.reliability))
            .collect();
        self.reliability = self.nodes.iter().map(|n| lookup.get(n.as_str()).copied()).collect();
        self
    }

    pub fn with_partition(mut self, partition: &Partition) -> Self {
        self.clusters = Some(partition.assignment.clone());
        self
    }

    /// Keeps the nodes flagged in `keep` along with the edges between them.
    pub fn retain_nodes(&self, keep: &[bool]) -> Self {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                remap[i] = next;
                next += 1;
            }
        }
        let pick = |i: usize| keep[i];
        Self {
            nodes: (0..self.nodes.len()).filter(|&i| pick(i)).map(|i| self.nodes[i].clone()).collect(),
            reliability: (0..self.nodes.len()).filter(|&i| pick(i)).map(|i| self.reliability[i]).collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep[e.a] && keep[e.b])
                .map(|e| Edge { a: remap[e.a], b: remap[e.b], weight: e.weight })
                .collect(),
            clusters: self.clusters.as_ref().map(|c| {
                (0..c.len()).filter(|&i| pick(i)).map(|i| c[i]).collect()
            }),
        }
    }

    fn without_isolates(&self) -> Self {
        let keep: Vec<bool> = self.degrees().iter().map(|&d| d > 0).collect();
        self.retain_nodes(&keep)
    }

    pub fn write_edges_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["src", "dst", "weight"])?;
        for e in &self.edges {
            w.write_record([self.nodes[e.a].as_str(), self.nodes[e.b].as_str(), &e.weight.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_graphml(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        out.push_str("  <key id=\"reliability\" for=\"node\" attr.name=\"reliability\" attr.type=\"string\"/>\n");
        out.push_str("  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n");
        out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
        out.push_str("  <graph id=\"audience\" edgedefault=\"undirected\">\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = write!(out, "    <node id=\"{}\">", xml_escape(node));
            if let Some(r) = self.reliability[i] {
                let _ = write!(out, "<data key=\"reliability\">{r}</data>");
            }
            if let Some(c) = self.clusters.as_ref().map(|c| c[i]) {
                let _ = write!(out, "<data key=\"cluster\">{c}</data>");
            }
            out.push_str("</node>\n");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
                xml_escape(&self.nodes[e.a]),
                xml_escape(&self.nodes[e.b]),
                e.weight
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn squared_norm(col: &SparseColumn) -> u128 {
    col.iter().map(|&(_, c)| c as u128 * c as u128).sum()
}

/// Cosine similarity of two nonnegative sparse columns.
///
/// Dot product and squared norms are accumulated exactly in integers, so
/// the only rounding happens in the final square root and division.
pub fn cosine_weight(col_h: &SparseColumn, col_k: &SparseColumn) -> Result<f64> {
    let (nh, nk) = (squared_norm(col_h), squared_norm(col_k));
    if nh == 0 {
        return Err(Error::ZeroNorm("h".into()));
    }
    if nk == 0 {
        return Err(Error::ZeroNorm("k".into()));
    }
    let (mut i, mut j, mut dot) = (0, 0, 0u128);
    while i < col_h.len() && j < col_k.len() {
        let (uh, ch) = col_h[i];
        let (uk, ck) = col_k[j];
        match uh.cmp(&uk) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += ch as u128 * ck as u128;
                i += 1;
                j += 1;
            }
        }
    }
    let w = dot as f64 / (nh as f64 * nk as f64).sqrt();
    Ok(w.min(1.0))
}

/// Complete similarity graph over outlets that were retweeted at least
/// once. Pairs with no shared retweeter get no edge.
pub fn build_graph(matrix: &RetweetMatrix) -> AudienceGraph {
    let active: Vec<usize> = (0..matrix.outlets.len())
        .filter(|&j| squared_norm(&matrix.columns[j]) > 0)
        .collect();
    let mut edges = Vec::new();
    for (a, &h) in active.iter().enumerate() {
        for (b, &k) in active.iter().enumerate().skip(a + 1) {
            let w = cosine_weight(&matrix.columns[h], &matrix.columns[k])
                .expect("active columns have positive norm");
            if w > 0.0 {
                edges.push(Edge { a, b, weight: w });
            }
        }
    }
    AudienceGraph {
        nodes: active.iter().map(|&j| matrix.outlets[j].clone()).collect(),
        reliability: vec![None; active.len()],
        edges,
        clusters: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdOptions {
    /// Remove edges strictly below the mean (`true`) or at or below it.
    pub strict: bool,
    /// Remove nodes left without edges by the cut.
    pub drop_isolates: bool,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { strict: true, drop_isolates: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub nodes_in: usize,
    pub edges_in: usize,
    pub isolated_removed: usize,
    pub mean_weight: f64,
    pub edges_removed: usize,
    pub newly_isolated_removed: usize,
    pub nodes_out: usize,
    pub edges_out: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdOutcome {
    pub graph: AudienceGraph,
    pub report: ThresholdReport,
}

/// Drops edges under `cutoff` and, if requested, the nodes they isolate.
pub fn apply_cutoff(graph: &AudienceGraph, cutoff: f64, options: ThresholdOptions) -> AudienceGraph {
    let mut cut = graph.clone();
    cut.edges.retain(|e| if options.strict { e.weight >= cutoff } else { e.weight > cutoff });
    if options.drop_isolates {
        cut.without_isolates()
    } else {
        cut
    }
}

/// Removes isolated nodes, then edges below the mean weight of the
/// remaining edges, then (optionally) the nodes that cut isolates.
pub fn threshold_graph(graph: &AudienceGraph, options: ThresholdOptions) -> Result<ThresholdOutcome> {
    if graph.edges.is_empty() {
        return Err(Error::Edgeless);
    }
    let connected = graph.without_isolates();
    // Running mean: exact when all weights are equal.
    let mut mean = 0.0;
    for (k, e) in connected.edges.iter().enumerate() {
        mean += (e.weight - mean) / (k + 1) as f64;
    }
    let pruned = apply_cutoff(&connected, mean, ThresholdOptions { drop_isolates: false, ..options });
    let edges_removed = connected.edge_count() - pruned.edge_count();
    let final_graph = if options.drop_isolates { pruned.without_isolates() } else { pruned.clone() };
    let report = ThresholdReport {
        nodes_in: graph.node_count(),
        edges_in: graph.edge_count(),
        isolated_removed: graph.node_count() - connected.node_count(),
        mean_weight: mean,
        edges_removed,
        newly_isolated_removed: pruned.node_count() - final_graph.node_count(),
        nodes_out: final_graph.node_count(),
        edges_out: final_graph.edge_count(),
    };
    Ok(ThresholdOutcome { graph: final_graph, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RetweetRecord;
    use crate::network::build_matrix;
    use proptest::prelude::*;

    fn col(values: &[u64]) -> SparseColumn {
        values.iter().enumerate().filter(|(_, &v)| v > 0).map(|(i, &v)| (i, v)).collect()
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_weight(&col(&[3, 0, 7]), &col(&[3, 0, 7])).unwrap(), 1.0);
        assert_eq!(cosine_weight(&col(&[3, 0, 0]), &col(&[0, 4, 1])).unwrap(), 0.0);
        assert_eq!(cosine_weight(&col(&[1, 2]), &col(&[2, 1])).unwrap(), 0.8);
        assert!(matches!(cosine_weight(&col(&[0, 0]), &col(&[1, 1])), Err(Error::ZeroNorm(_))));
    }

    fn rt(u: &str, o: &str, c: u64) -> RetweetRecord {
        RetweetRecord { user_id: u.into(), outlet_id: o.into(), count: c }
    }

    #[test]
    fn proportional_audiences_share_a_unit_edge() {
        let m = build_matrix(&[rt("u1", "a", 1), rt("u2", "a", 2), rt("u1", "b", 3), rt("u2", "b", 6)]);
        let g = build_graph(&m);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges, vec![Edge { a: 0, b: 1, weight: 1.0 }]);
    }

    #[test]
    fn disjoint_audiences_have_no_edges() {
        let m = build_matrix(&[rt("u1", "a", 1), rt("u2", "b", 2), rt("u3", "c", 3)]);
        let g = build_graph(&m);
        assert_eq!((g.node_count(), g.edge_count()), (3, 0));
        assert!(matches!(threshold_graph(&g, ThresholdOptions::default()), Err(Error::Edgeless)));
    }

    #[test]
    fn equal_weights_survive_the_cut() {
        let w = 0.1;
        let g = AudienceGraph::from_edges(5, &[(0, 1, w), (1, 2, w), (2, 3, w), (0, 3, w), (1, 3, w), (0, 2, w), (0, 4, w)]);
        let out = threshold_graph(&g, ThresholdOptions::default()).unwrap();
        assert_eq!(out.report.edges_removed, 0);
        assert_eq!(out.graph, g);
    }

    #[test]
    fn light_edge_is_cut() {
        let g = AudienceGraph::from_edges(4, &[(0, 1, 0.1), (1, 2, 0.9)]);
        let out = threshold_graph(&g, ThresholdOptions::default()).unwrap();
        let r = out.report;
        assert_eq!(r.isolated_removed, 1);
        assert!((r.mean_weight - 0.5).abs() < 1e-15);
        assert_eq!(r.edges_removed, 1);
        assert_eq!(r.newly_isolated_removed, 1);
        assert_eq!(out.graph.nodes, vec!["n1", "n2"]);
        assert_eq!(out.graph.edges, vec![Edge { a: 0, b: 1, weight: 0.9 }]);

        let keep = threshold_graph(&g, ThresholdOptions { drop_isolates: false, ..Default::default() }).unwrap();
        assert_eq!(keep.graph.node_count(), 3);
        assert_eq!(keep.report.newly_isolated_removed, 0);
    }

    #[test]
    fn inclusive_cut_drops_edges_at_the_mean() {
        let g = AudienceGraph::from_edges(3, &[(0, 1, 0.5), (1, 2, 0.5)]);
        let out = threshold_graph(&g, ThresholdOptions { strict: false, drop_isolates: true }).unwrap();
        assert_eq!(out.graph.edge_count(), 0);
    }

    #[test]
    fn graphml_and_edges_export() {
        let g = AudienceGraph::from_edges(2, &[(1, 0, 0.25)]);
        let xml = g.to_graphml();
        assert!(xml.contains("<edge source=\"n0\" target=\"n1\"><data key=\"weight\">0.25</data></edge>"));
        let mut out = Vec::new();
        g.write_edges_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "src,dst,weight\nn0,n1,0.25\n");
    }

    proptest! {
        #[test]
        fn cosine_is_bounded_and_scale_invariant(
            pairs in proptest::collection::vec((0u64..20, 0u64..20), 1..30),
            s in 1u64..50, t in 1u64..50,
        ) {
            let h: Vec<u64> = pairs.iter().map(|p| p.0).collect();
            let k: Vec<u64> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(h.iter().any(|&v| v > 0) && k.iter().any(|&v| v > 0));
            let w = cosine_weight(&col(&h), &col(&k)).unwrap();
            prop_assert!((0.0..=1.0).contains(&w));
            let hs: Vec<u64> = h.iter().map(|v| v * s).collect();
            let ks: Vec<u64> = k.iter().map(|v| v * t).collect();
            prop_assert!((cosine_weight(&col(&hs), &col(&ks)).unwrap() - w).abs() < 1e-12);
            prop_assert_eq!(cosine_weight(&col(&k), &col(&h)).unwrap(), w);
        }

        #[test]
        fn thresholding_is_idempotent_at_the_recorded_mean(
            weights in proptest::collection::vec(0.01..1.0f64, 15),
            mask in proptest::collection::vec(proptest::bool::ANY, 15),
            strict in proptest::bool::ANY,
            drop in proptest::bool::ANY,
        ) {
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..6 {
                for b in (a + 1)..6 {
                    if mask[k] {
                        edges.push((a, b, weights[k]));
                    }
                    k += 1;
                }
            }
            prop_assume!(!edges.is_empty());
            let g = AudienceGraph::from_edges(7, &edges);
            let opts = ThresholdOptions { strict, drop_isolates: drop };
            let out = threshold_graph(&g, opts).unwrap();
            let again = apply_cutoff(&out.graph, out.report.mean_weight, opts);
            prop_assert_eq!(again, out.graph.clone());
            for e in &out.graph.edges {
                prop_assert!(e.a < e.b);
                prop_assert!(e.weight > 0.0 && e.weight <= 1.0);
            }
        }
    }
}
