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

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} label '{value}' at line {line}")]
    UnknownLabel {
        kind: &'static str,
        value: String,
        line: usize,
    },

    #[error("malformed field '{field}' at line {line}: {reason}")]
    Malformed {
        line: usize,
        field: String,
        reason: String,
    },

    #[error("article at line {line} references unregistered outlet '{outlet_id}'")]
    UnregisteredOutlet { outlet_id: String, line: usize },

    #[error("outlet '{0}' is registered more than once")]
    DuplicateOutlet(String),

    #[error("no articles")]
    NoArticles,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too few post-burn-in draws: {available} per chain, at least {required} required")]
    TooFewDraws { available: usize, required: usize },

    #[error("engagement is undefined for an outlet with no contents")]
    UndefinedEngagement,

    #[error("follower count must be positive, got {0}")]
    NonPositiveFollowers(f64),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("column '{0}' has zero norm")]
    ZeroNorm(String),

    #[error("graph has no edges")]
    Edgeless,

    #[error("graph has zero total edge weight")]
    ZeroTotalWeight,

    #[error("partition covers {found} nodes but the graph has {expected}")]
    IncompletePartition { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
