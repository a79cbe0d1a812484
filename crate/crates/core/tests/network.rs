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

//! Audience-network checks against dense and brute-force references.

mod oracles;

use std::collections::{BTreeMap, BTreeSet};

use newsbias_core::corpus::RetweetRecord;
use newsbias_core::network::{
    build_graph, build_matrix, louvain, modularity, threshold_graph, AudienceGraph, Partition,
    ThresholdOptions,
};
use newsbias_core::stats::adjusted_rand_index;
use oracles::{brute_force_max_modularity, dense_modularity, louvain_fixtures, Lcg};

fn random_records(rng: &mut Lcg, n: usize, users: u64, outlets: u64) -> Vec<RetweetRecord> {
    (0..n)
        .map(|_| RetweetRecord {
            user_id: format!("u{}", rng.below(users)),
            outlet_id: format!("o{}", rng.below(outlets)),
            count: 1 + rng.below(6),
        })
        .collect()
}

#[test]
fn matrix_column_sums_match_tally() {
    let mut rng = Lcg(11);
    let records = random_records(&mut rng, 100, 30, 8);
    let mut tally: BTreeMap<&str, u64> = BTreeMap::new();
    for r in &records {
        *tally.entry(r.outlet_id.as_str()).or_default() += r.count;
    }
    let matrix = build_matrix(&records);
    assert_eq!(matrix.outlets.len(), tally.len());
    for (j, outlet) in matrix.outlets.iter().enumerate() {
        assert_eq!(matrix.column_total(j), tally[outlet.as_str()], "{outlet}");
    }
    let mut sorted = matrix.users.clone();
    sorted.sort();
    assert_eq!(sorted, matrix.users);
}

#[test]
fn graph_weights_match_dense_cosine() {
    let mut rng = Lcg(5);
    for _ in 0..20 {
        let records = random_records(&mut rng, 60, 25, 9);
        let matrix = build_matrix(&records);
        let dense = matrix.dense();
        let graph = build_graph(&matrix);
        let col = |j: usize| dense.iter().map(|row| row[j] as f64).collect::<Vec<_>>();
        for h in 0..matrix.outlets.len() {
            for k in (h + 1)..matrix.outlets.len() {
                let (a, b) = (col(h), col(k));
                let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                let expected = dot / (na * nb);
                match graph.weight(h, k) {
                    Some(w) => assert!((w - expected).abs() < 1e-12, "{w} vs {expected}"),
                    None => assert_eq!(expected, 0.0),
                }
                assert_eq!(graph.weight(h, k), graph.weight(k, h));
            }
        }
    }
}

fn edge_set(graph: &AudienceGraph) -> BTreeSet<(String, String)> {
    graph
        .edges
        .iter()
        .map(|e| (graph.nodes[e.a].clone(), graph.nodes[e.b].clone()))
        .collect()
}

#[test]
fn threshold_matches_two_pass_filter() {
    let mut rng = Lcg(21);
    for trial in 0..50 {
        let n = 6 + (trial % 7);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.below(3) == 0 {
                    edges.push((a, b, 0.01 + 0.99 * rng.unit()));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let graph = AudienceGraph::from_edges(n, &edges);
        let out = threshold_graph(&graph, ThresholdOptions::default()).unwrap();

        let mean = edges.iter().map(|e| e.2).sum::<f64>() / edges.len() as f64;
        let kept: BTreeSet<(String, String)> = edges
            .iter()
            .filter(|e| e.2 >= mean)
            .map(|&(a, b, _)| (format!("n{a}"), format!("n{b}")))
            .collect();
        assert_eq!(edge_set(&out.graph), kept);
        let nodes: BTreeSet<&String> = kept.iter().flat_map(|(a, b)| [a, b]).collect();
        assert_eq!(out.graph.nodes.iter().collect::<BTreeSet<_>>(), nodes);
        assert_eq!(out.report.edges_out, kept.len());
    }
}

#[test]
fn louvain_reaches_brute_force_optimum_on_fixtures() {
    for (name, n, edges) in louvain_fixtures() {
        let graph = AudienceGraph::from_edges(n, &edges);
        let (best, _) = brute_force_max_modularity(n, &edges);
        for seed in 0..5 {
            let partition = louvain(&graph, seed);
            let q = modularity(&graph, &partition).unwrap();
            assert!((q - best).abs() < 1e-9, "{name} seed {seed}: {q} vs {best}");
            let dense = dense_modularity(n, &edges, &partition.assignment);
            assert!((q - dense).abs() < 1e-12, "{name}");
        }
    }
}

#[test]
fn louvain_recovers_two_joined_cliques() {
    let (_, n, edges) = louvain_fixtures().into_iter().next().unwrap();
    let graph = AudienceGraph::from_edges(n, &edges);
    let partition = louvain(&graph, 0);
    let truth = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
    assert_eq!(partition.assignment, truth);
    assert_eq!(adjusted_rand_index(&partition.assignment, &truth), 1.0);
}

#[test]
fn louvain_beats_random_partitions() {
    let mut rng = Lcg(3);
    let n = 12;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.below(3) == 0 {
                edges.push((a, b, rng.unit() + 0.05));
            }
        }
    }
    let graph = AudienceGraph::from_edges(n, &edges);
    let q = modularity(&graph, &louvain(&graph, 9)).unwrap();
    let mut best_random = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let k = 1 + rng.below(5) as usize;
        let labels: Vec<usize> = (0..n).map(|_| rng.below(k as u64) as usize).collect();
        best_random = best_random.max(modularity(&graph, &Partition::new(&labels)).unwrap());
    }
    assert!(q >= best_random, "{q} < {best_random}");
    assert!(q >= modularity(&graph, &Partition::singletons(n)).unwrap());
}
