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

//! Audience-overlap network between outlets.
//!
//! Outlets are linked by the cosine similarity of their retweeter count
//! columns. The graph is pruned at the mean edge weight and partitioned
//! with Louvain; clusters are then described by the reliability and bias
//! of their members.

mod clusters;
mod graph;
mod louvain;
mod matrix;

pub use clusters::{cluster_stats, ClusterStat, ClusterStats};
pub use graph::{
    apply_cutoff, build_graph, cosine_weight, threshold_graph, AudienceGraph, Edge,
    ThresholdOptions, ThresholdOutcome, ThresholdReport,
};
pub use louvain::{louvain, modularity, Partition};
pub use matrix::{build_matrix, RetweetMatrix, SparseColumn};
