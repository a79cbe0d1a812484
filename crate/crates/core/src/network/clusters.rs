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
use std::io::Write;

use serde::Serialize;

use super::louvain::Partition;
use crate::bias::BiasTable;
use crate::corpus::{OutletProfile, Reliability};
use crate::Result;

pub const CLUSTER_STATS_HEADER: &str =
    "cluster_id,size,frac_questionable,mean_x_adv,mean_x_pos,mean_selection,frac_adverse_lean";

/// Summary of one community. Averages are plain means over members that
/// have the required data; they are `None` when no member has it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterStat {
    pub cluster_id: usize,
    pub size: usize,
    pub frac_questionable: Option<f64>,
    pub mean_x_adv: Option<f64>,
    pub mean_x_pos: Option<f64>,
    pub mean_selection: Option<f64>,
    pub frac_adverse_lean: Option<f64>,
    pub with_bias: usize,
    pub with_registry: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterStats {
    pub clusters: Vec<ClusterStat>,
    /// Members left out of the bias averages.
    pub missing_bias: usize,
    /// Members left out of the reliability fraction.
    pub missing_registry: usize,
}

impl ClusterStats {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CLUSTER_STATS_HEADER.split(','))?;
        let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        for c in &self.clusters {
            w.write_record([
                c.cluster_id.to_string(),
                c.size.to_string(),
                cell(c.frac_questionable),
                cell(c.mean_x_adv),
                cell(c.mean_x_pos),
                cell(c.mean_selection),
                cell(c.frac_adverse_lean),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Per-cluster reliability mix and bias averages. `nodes[i]` is the outlet
/// of node `i` in `partition`.
pub fn cluster_stats(
    nodes: &[String],
    partition: &Partition,
    bias: &BiasTable,
    registry: &[OutletProfile],
) -> ClusterStats {
    let reliability: HashMap<&str, Reliability> = registry
        .iter()
        .map(|o| (o.outlet_id.as_str(), o.reliability))
        .collect();
    let rows: HashMap<&str, _> = bias.rows.iter().map(|r| (r.outlet_id.as_str(), r)).collect();
    let mut missing_bias = 0;
    let mut missing_registry = 0;
    let clusters = partition
        .members()
        .into_iter()
        .enumerate()
        .map(|(cluster_id, members)| {
            let mut questionable = Vec::new();
            let (mut x_adv, mut x_pos, mut selection, mut lean) =
                (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for &node in &members {
                let id = nodes[node].as_str();
                match reliability.get(id) {
                    Some(&r) => questionable.push(f64::from(u8::from(r == Reliability::Questionable))),
                    None => missing_registry += 1,
                }
                match rows.get(id) {
                    Some(row) => {
                        x_adv.push(row.x_adv.mean);
                        x_pos.push(row.x_pos.mean);
                        selection.push(row.selection_index);
                        lean.push(f64::from(u8::from(row.adverse_lean)));
                    }
                    None => missing_bias += 1,
                }
            }
            ClusterStat {
                cluster_id,
                size: members.len(),
                frac_questionable: mean(&questionable),
                mean_x_adv: mean(&x_adv),
                mean_x_pos: mean(&x_pos),
                mean_selection: mean(&selection),
                frac_adverse_lean: mean(&lean),
                with_bias: x_adv.len(),
                with_registry: questionable.len(),
            }
        })
        .collect();
    ClusterStats {
        clusters,
        missing_bias,
        missing_registry,
    }
}
