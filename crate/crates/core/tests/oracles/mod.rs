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

//! Independent reference computations for the integration and acceptance
//! tests. Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

/// Poisson log-pmf by direct summation of `ln k`.
pub fn poisson_log_pmf(y: u64, lambda: f64) -> f64 {
    let log_fact: f64 = (1..=y).map(|k| (k as f64).ln()).sum();
    y as f64 * lambda.ln() - lambda - log_fact
}

/// Normal log-density written from the textbook formula.
pub fn gaussian_log_density(v: f64, mean: f64, sd: f64) -> f64 {
    let var = sd * sd;
    -((v - mean) * (v - mean)) / (2.0 * var) - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
}

/// Log-likelihood of an `N x 3` slice from explicit intensities.
pub fn reference_log_likelihood(alpha: &[f64], x: &[f64], counts: &[[u64; 3]]) -> f64 {
    let z = [-1.0, 0.0, 1.0];
    let mut total = 0.0;
    for i in 0..counts.len() {
        for j in 0..3 {
            let lambda = (alpha[i] - ((x[i] - z[j]) * (x[i] - z[j])).sqrt()).exp();
            total += poisson_log_pmf(counts[i][j], lambda);
        }
    }
    total
}

/// Modularity straight from the double-sum definition over a dense matrix.
pub fn dense_modularity(n: usize, edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Maximum modularity over every set partition of the nodes, enumerated as
/// restricted growth strings. Returns the best value and one maximiser.
pub fn brute_force_max_modularity(n: usize, edges: &[(usize, usize, f64)]) -> (f64, Vec<usize>) {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    // b[i][j] = a[i][j] - k_i k_j / 2m; Q = sum over same-label pairs / 2m
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] - k[i] * k[j] / two_m).collect())
        .collect();

    struct Search<'a> {
        n: usize,
        b: &'a [Vec<f64>],
        labels: Vec<usize>,
        best: f64,
        best_labels: Vec<usize>,
    }
    impl Search<'_> {
        fn recurse(&mut self, node: usize, blocks: usize, score: f64) {
            if node == self.n {
                if score > self.best {
                    self.best = score;
                    self.best_labels = self.labels.clone();
                }
                return;
            }
            for label in 0..=blocks {
                // contribution of the new node with earlier members of its
                // block, both (i, j) and (j, i), plus the diagonal term
                let mut delta = self.b[node][node];
                for prev in 0..node {
                    if self.labels[prev] == label {
                        delta += 2.0 * self.b[node][prev];
                    }
                }
                self.labels[node] = label;
                let next_blocks = if label == blocks { blocks + 1 } else { blocks };
                self.recurse(node + 1, next_blocks, score + delta);
            }
        }
    }
    let mut search = Search {
        n,
        b: &b,
        labels: vec![0; n],
        best: f64::NEG_INFINITY,
        best_labels: vec![0; n],
    };
    search.recurse(0, 0, 0.0);
    (search.best / two_m, search.best_labels)
}

pub fn clique(nodes: &[usize], w: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            edges.push((a, b, w));
        }
    }
    edges
}

/// Name, node count and weighted edge list.
pub type Fixture = (&'static str, usize, Vec<(usize, usize, f64)>);

/// Weighted graphs of at most twelve nodes used to check Louvain against
/// exhaustive search.
pub fn louvain_fixtures() -> Vec<Fixture> {
    let mut fixtures = Vec::new();

    let mut two_cliques = clique(&[0, 1, 2, 3, 4], 1.0);
    two_cliques.extend(clique(&[5, 6, 7, 8, 9], 1.0));
    two_cliques.push((4, 5, 0.01));
    fixtures.push(("two 5-cliques joined by a 0.01 edge", 10, two_cliques));

    let mut triangles = clique(&[0, 1, 2], 1.0);
    triangles.extend(clique(&[3, 4, 5], 1.0));
    fixtures.push(("two disconnected triangles", 6, triangles));

    let mut ring = Vec::new();
    for c in 0..3 {
        let base = 4 * c;
        ring.extend(clique(&[base, base + 1, base + 2, base + 3], 1.0));
        ring.push((base + 3, (base + 4) % 12, 0.2));
    }
    fixtures.push(("ring of three 4-cliques", 12, ring));

    let mut weighted = clique(&[0, 1, 2, 3], 0.9);
    weighted.extend(clique(&[4, 5, 6, 7], 0.6));
    weighted.extend(clique(&[8, 9, 10], 0.8));
    weighted.extend([(3, 4, 0.3), (7, 8, 0.25), (0, 9, 0.1), (2, 6, 0.05)]);
    fixtures.push(("three weighted groups with cross links", 11, weighted));

    fixtures.push((
        "star",
        7,
        (1..7).map(|leaf| (0, leaf, 0.5)).collect(),
    ));

    fixtures.push((
        "weighted path",
        8,
        vec![(0, 1, 1.0), (1, 2, 0.9), (2, 3, 0.2), (3, 4, 1.0), (4, 5, 0.8), (5, 6, 0.1), (6, 7, 0.7)],
    ));

    let mut barbell = clique(&[0, 1, 2, 3, 4, 5], 0.7);
    barbell.extend(clique(&[6, 7, 8, 9, 10, 11], 0.7));
    barbell.push((5, 6, 0.7));
    fixtures.push(("barbell of two 6-cliques", 12, barbell));

    fixtures
}

/// Pseudo-random nonnegative matrix entries from a linear congruential
/// stream, independent of the crate's RNG choices.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        self.next_u64() as f64 / (1u64 << 31) as f64
    }
}
