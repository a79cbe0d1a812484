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

//! Louvain community detection on weighted undirected graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::AudienceGraph;
use crate::{Error, Result};

/// Community label per node, numbered from zero in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    pub assignment: Vec<usize>,
}

impl Partition {
    /// Normalises arbitrary labels to first-appearance order.
    pub fn new(labels: &[usize]) -> Self {
        let (assignment, _) = renumber(labels);
        Self { assignment }
    }

    pub fn singletons(n: usize) -> Self {
        Self { assignment: (0..n).collect() }
    }

    pub fn all_in_one(n: usize) -> Self {
        Self { assignment: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.community_count()];
        for (node, &c) in self.assignment.iter().enumerate() {
            groups[c].push(node);
        }
        groups
    }
}

fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let out = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (out, map.len())
}

/// Newman-Girvan modularity with weighted degrees.
///
/// Per community `c`, `in_c` collects twice the weight of internal edges
/// and `tot_c` the weighted degrees of its members, both accumulated edge
/// by edge so that the all-in-one partition yields exactly zero.
pub fn modularity(graph: &AudienceGraph, partition: &Partition) -> Result<f64> {
    if partition.len() != graph.node_count() {
        return Err(Error::IncompletePartition {
            expected: graph.node_count(),
            found: partition.len(),
        });
    }
    let k = partition.community_count();
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    let mut two_m = 0.0;
    for e in &graph.edges {
        let (ca, cb) = (partition.assignment[e.a], partition.assignment[e.b]);
        let w2 = 2.0 * e.weight;
        two_m += w2;
        if ca == cb {
            internal[ca] += w2;
            total[ca] += w2;
        } else {
            total[ca] += e.weight;
            total[cb] += e.weight;
        }
    }
    if two_m == 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(internal
        .iter()
        .zip(&total)
        .map(|(&i, &t)| i / two_m - (t / two_m) * (t / two_m))
        .sum())
}

/// Working graph of one Louvain level. `adj[i]` excludes the self-loop,
/// which is held in `self_loop[i]` counted twice, as in the adjacency
/// matrix diagonal.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(graph: &AudienceGraph) -> Self {
        let n = graph.node_count();
        let mut adj = vec![Vec::new(); n];
        for e in &graph.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        Self::from_parts(adj, vec![0.0; n])
    }

    fn from_parts(adj: Vec<Vec<(usize, f64)>>, self_loop: Vec<f64>) -> Self {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&self_loop)
            .map(|(row, &s)| row.iter().map(|&(_, w)| w).sum::<f64>() + s)
            .collect();
        let two_m = degree.iter().sum();
        Self { adj, self_loop, degree, two_m }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Repeated sweeps of single-node moves in a shuffled order until no
    /// move improves modularity. A node leaves its community only for a
    /// strictly better one; ties among the best go to the lowest label.
    fn local_moves(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let eps = 1e-12 * self.two_m.max(1.0);

        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moves = 0;
            for &i in &order {
                let ki = self.degree[i];
                let own = community[i];
                for &(j, w) in &self.adj[i] {
                    let c = community[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= ki;
                let gain = |c: usize, link: &[f64]| link[c] - tot[c] * ki / self.two_m;
                let stay = gain(own, &link);
                let mut best = own;
                let mut best_gain = stay;
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let g = gain(c, &link);
                    if g <= stay + eps {
                        continue;
                    }
                    let better = best == own
                        || g > best_gain + eps
                        || ((g - best_gain).abs() <= eps && c < best);
                    if better {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ki;
                community[i] = best;
                if best != own {
                    moves += 1;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if moves == 0 {
                break;
            }
            moved_any = true;
        }
        (community, moved_any)
    }

    fn aggregate(&self, community: &[usize], count: usize) -> Self {
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        let mut self_loop = vec![0.0; count];
        for i in 0..self.len() {
            let ci = community[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    self_loop[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adj = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        Self::from_parts(adj, self_loop)
    }
}

/// Louvain community detection.
///
/// Alternates local moving and aggregation of communities into nodes until
/// a level produces no move. The visiting order of each level is shuffled
/// with a ChaCha8 stream seeded by `seed`; the result is deterministic for
/// a fixed seed. Nodes without edges stay in their own community.
pub fn louvain(graph: &AudienceGraph, seed: u64) -> Partition {
    let n = graph.node_count();
    let mut level = Level::from_graph(graph);
    if level.two_m <= 0.0 {
        return Partition::singletons(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let (community, moved) = level.local_moves(&mut rng);
        if !moved {
            break;
        }
        let (labels, count) = renumber(&community);
        for m in membership.iter_mut() {
            *m = labels[*m];
        }
        level = level.aggregate(&labels, count);
    }
    Partition::new(&membership)
}
