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

//! Resolved run configuration: defaults, then the config file, then flags.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::ValueEnum;
use serde::Serialize;

use crate::args::{AveragingArg, PriorScaleArg, RunArgs, Switch};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub articles: Option<PathBuf>,
    pub outlets: Option<PathBuf>,
    pub followers: Option<PathBuf>,
    pub retweets: Option<PathBuf>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub seed: u64,
    pub chains: usize,
    pub iters: usize,
    pub burnin: usize,
    pub theta: f64,
    pub out: PathBuf,
    pub strict_threshold: bool,
    pub drop_isolates: bool,
    pub prior_scale: PriorScaleArg,
    pub follower_averaging: AveragingArg,
    pub dump_draws: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            articles: None,
            outlets: None,
            followers: None,
            retweets: None,
            from: None,
            to: None,
            seed: 0,
            chains: 4,
            iters: 5000,
            burnin: 1000,
            theta: FRAC_PI_4,
            out: PathBuf::from("out"),
            strict_threshold: true,
            drop_isolates: true,
            prior_scale: PriorScaleArg::Sd,
            follower_averaging: AveragingArg::Unweighted,
            dump_draws: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| format!("invalid value '{value}' for {key}: {e}"))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, String> {
    T::from_str(value, true).map_err(|_| format!("invalid value '{value}' for {key}"))
}

impl RunConfig {
    /// Defaults, overlaid with `args.config` when given, overlaid with flags.
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let mut config = Self::default();
        if let Some(path) = &args.config {
            config.load_file(path)?;
        }
        config.apply_flags(args);
        config.validate()?;
        Ok(config)
    }

    fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("{}:{}: expected `key = value`", path.display(), n + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|msg| CliError::Input(format!("{}:{}: {msg}", path.display(), n + 1)))?;
        }
        Ok(())
    }

    /// Sets one option by its flag name (`-` and `_` are interchangeable).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.replace('_', "-");
        match key.as_str() {
            "articles" => self.articles = Some(value.into()),
            "outlets" => self.outlets = Some(value.into()),
            "followers" => self.followers = Some(value.into()),
            "retweets" => self.retweets = Some(value.into()),
            "from" => self.from = Some(parse(&key, value)?),
            "to" => self.to = Some(parse(&key, value)?),
            "seed" => self.seed = parse(&key, value)?,
            "chains" => self.chains = parse(&key, value)?,
            "iters" => self.iters = parse(&key, value)?,
            "burnin" => self.burnin = parse(&key, value)?,
            "theta" => self.theta = parse(&key, value)?,
            "out" => self.out = value.into(),
            "strict-threshold" => self.strict_threshold = parse_enum::<Switch>(&key, value)?.is_on(),
            "drop-isolates" => self.drop_isolates = parse_enum::<Switch>(&key, value)?.is_on(),
            "prior-scale" => self.prior_scale = parse_enum(&key, value)?,
            "follower-averaging" => self.follower_averaging = parse_enum(&key, value)?,
            "dump-draws" => self.dump_draws = parse_enum::<Switch>(&key, value)?.is_on(),
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    fn apply_flags(&mut self, args: &RunArgs) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &args.$field { self.$field = v.clone().into(); })*
            };
        }
        take!(articles, outlets, followers, retweets, from, to);
        take!(seed, chains, iters, burnin, theta, out, prior_scale, follower_averaging);
        if let Some(s) = args.strict_threshold {
            self.strict_threshold = s.is_on();
        }
        if let Some(s) = args.drop_isolates {
            self.drop_isolates = s.is_on();
        }
        if let Some(s) = args.dump_draws {
            self.dump_draws = s.is_on();
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Input(msg));
        if !(self.theta > 0.0 && self.theta < FRAC_PI_2) {
            return fail(format!("theta must lie in (0, pi/2), got {}", self.theta));
        }
        if self.chains == 0 {
            return fail("chains must be positive".into());
        }
        if self.burnin >= self.iters {
            return fail(format!("burnin {} must be below iters {}", self.burnin, self.iters));
        }
        if let (Some(from), Some(to)) = (self.from, self.to) {
            if from > to {
                return fail(format!("--from {from} is after --to {to}"));
            }
        }
        Ok(())
    }
}
