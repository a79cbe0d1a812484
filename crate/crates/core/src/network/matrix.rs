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

use std::collections::BTreeMap;

use crate::corpus::RetweetRecord;

/// Nonzero `(user index, count)` entries of one outlet column, sorted by
/// user index.
pub type SparseColumn = Vec<(usize, u64)>;

/// Users-by-outlets retweet counts stored column-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetweetMatrix {
    pub users: Vec<String>,
    pub outlets: Vec<String>,
    pub columns: Vec<SparseColumn>,
}

impl RetweetMatrix {
    pub fn column(&self, outlet: &str) -> Option<&SparseColumn> {
        let j = self.outlets.binary_search_by(|o| o.as_str().cmp(outlet)).ok()?;
        Some(&self.columns[j])
    }

    pub fn column_total(&self, j: usize) -> u64 {
        self.columns[j].iter().map(|&(_, c)| c).sum()
    }

    pub fn dense(&self) -> Vec<Vec<u64>> {
        let mut rows = vec![vec![0; self.outlets.len()]; self.users.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                rows[i][j] = c;
            }
        }
        rows
    }
}

/// Builds the matrix with users and outlets in lexicographic order,
/// summing repeated pairs.
pub fn build_matrix(records: &[RetweetRecord]) -> RetweetMatrix {
    let mut cells: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for r in records {
        *cells.entry((r.outlet_id.as_str(), r.user_id.as_str())).or_default() += r.count;
    }
    let mut users: Vec<String> = records.iter().map(|r| r.user_id.clone()).collect();
    users.sort();
    users.dedup();
    let mut outlets: Vec<String> = records.iter().map(|r| r.outlet_id.clone()).collect();
    outlets.sort();
    outlets.dedup();

    let user_index: BTreeMap<&str, usize> =
        users.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
    let mut columns: Vec<SparseColumn> = vec![Vec::new(); outlets.len()];
    let mut j = 0;
    // `cells` iterates by outlet, then user, so columns fill in order.
    for ((outlet, user), count) in cells {
        while outlets[j] != outlet {
            j += 1;
        }
        if count > 0 {
            columns[j].push((user_index[user], count));
        }
    }
    RetweetMatrix { users, outlets, columns }
}
