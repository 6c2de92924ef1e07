// Copyright 2026 The urnvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Experiment plumbing shared by the command line and the tests.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::condorcet::{condorcet_budget, CondorcetStrategy};
use crate::cumulative::{cumulative_ballots, cumulative_budget};
use crate::engine::{
    estimate_failure, CondorcetElection, CumulativeElection, Election, EstimateConfig,
    KernelElection, Target,
};
use crate::error::{Error, Result};
use crate::io::{load_instance, read_file, write_file, Instance, StatsReport};
use crate::model::{BichromaticInstance, MulticolorInstance, Urn};
use crate::multicolor::{multicolor_budget, MulticolorKernel};
use crate::plurality::{plurality_budget, PluralityScheme};
use crate::scalar::Rational;
use crate::scoring::{Brier, InducedScheme};
use crate::stats::loglog_slope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Plurality,
    Cumulative,
    Condorcet,
    Scoring,
    Multicolor,
}

impl System {
    pub const ALL: [System; 5] = [
        System::Plurality,
        System::Cumulative,
        System::Condorcet,
        System::Scoring,
        System::Multicolor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            System::Plurality => "plurality",
            System::Cumulative => "cumulative",
            System::Condorcet => "condorcet",
            System::Scoring => "scoring",
            System::Multicolor => "multicolor",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        System::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown system {s:?}")))
    }
}

fn bichromatic(system: System, inst: &Instance) -> Result<&BichromaticInstance<Rational>> {
    match inst {
        Instance::Bichromatic(b) => Ok(b),
        Instance::Multicolor(_) => Err(Error::Config(format!(
            "{system} needs a two-color instance (\"probs\")"
        ))),
    }
}

/// Two-color instances are accepted as rows `(p, 1 - p)`.
fn multicolor(inst: &Instance) -> Result<MulticolorInstance<Rational>> {
    match inst {
        Instance::Multicolor(m) => Ok(m.clone()),
        Instance::Bichromatic(b) => MulticolorInstance::new(
            b.probs()
                .iter()
                .map(|p| vec![p.clone(), Rational::from_integer(1.into()) - p.clone()])
                .collect(),
        ),
    }
}

pub fn build_election(system: System, inst: &Instance) -> Result<Box<dyn Election>> {
    Ok(match system {
        System::Plurality => {
            let b = bichromatic(system, inst)?;
            let scheme = PluralityScheme::build(b)?;
            Box::new(KernelElection::new("plurality", &scheme.kernel(b)))
        }
        System::Scoring => {
            let b = bichromatic(system, inst)?;
            let scheme = InducedScheme::build(b, &Brier)?;
            Box::new(KernelElection::new("scoring", &scheme.kernel(b)))
        }
        System::Cumulative => {
            let b = bichromatic(system, inst)?;
            let scheme = cumulative_ballots(&PluralityScheme::build(b)?);
            Box::new(CumulativeElection::new(scheme, b.probs()))
        }
        System::Condorcet => {
            let b = bichromatic(system, inst)?;
            Box::new(CondorcetElection::new(CondorcetStrategy::build(b)?))
        }
        System::Multicolor => {
            let kernel = MulticolorKernel::build(&multicolor(inst)?)?;
            Box::new(KernelElection::new("multicolor", &kernel.matrix))
        }
    })
}

/// The voter count each system's guarantee asks for. `scale` multiplies
/// the plurality and multicolor formulas; the others take none.
pub fn voter_budget(system: System, inst: &Instance, eta: f64, scale: f64) -> Result<u64> {
    if scale != 1.0 && !matches!(system, System::Plurality | System::Multicolor) {
        return Err(Error::Config(format!("{system} does not take a scale")));
    }
    match system {
        System::Plurality => Ok(plurality_budget(bichromatic(system, inst)?, eta, scale)?.voters),
        System::Cumulative => cumulative_budget(bichromatic(system, inst)?, eta),
        System::Condorcet => condorcet_budget(bichromatic(system, inst)?, eta),
        System::Multicolor => multicolor_budget(&multicolor(inst)?, eta, scale),
        System::Scoring => Err(Error::Config(
            "scoring has no voter budget; give m explicitly".into(),
        )),
    }
}

/// How many voters each trial uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Voters {
    Fixed(u64),
    Budget { eta: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRequest {
    pub system: System,
    pub voters: Voters,
    pub trials: u64,
    pub seed: u64,
    /// 1-based; `None` sweeps every urn and keeps the worst.
    pub true_urn: Option<usize>,
    pub threads: Option<usize>,
}

pub fn simulate(inst: &Instance, req: &SimulationRequest) -> Result<StatsReport> {
    let m = match req.voters {
        Voters::Fixed(m) => m,
        Voters::Budget { eta, scale } => voter_budget(req.system, inst, eta, scale)?,
    };
    let election = build_election(req.system, inst)?;
    let target = match req.true_urn {
        Some(i) => Target::Urn(Urn::new(i, election.candidates())?),
        None => Target::WorstCase,
    };
    let stats = estimate_failure(
        election.as_ref(),
        &EstimateConfig {
            m,
            trials: req.trials,
            seed: req.seed,
            target,
            threads: req.threads,
        },
    )?;
    Ok(StatsReport::new(req.system.name(), stats))
}

/// A `simulate` run described in a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: System,
    /// Relative paths are taken from the config file's directory.
    pub instance: PathBuf,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub m: Option<u64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub true_urn: Option<usize>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.eta, self.m) {
            (Some(_), Some(_)) => Err(Error::Config("set only one of eta and m".into())),
            (None, None) => Err(Error::Config("one of eta and m is required".into())),
            (None, Some(_)) if self.scale.is_some() => {
                Err(Error::Config("scale only applies with eta".into()))
            }
            _ if self.trials == 0 => Err(Error::Config("trials must be at least 1".into())),
            _ => Ok(()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut config: Self =
            serde_json::from_str(&read_file(path)?).map_err(|e| Error::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.instance.is_relative() {
            config.instance = base.join(&config.instance);
        }
        if let Some(out) = config.out.as_mut().filter(|o| o.is_relative()) {
            *out = base.join(&*out);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn request(&self) -> SimulationRequest {
        SimulationRequest {
            system: self.system,
            voters: match self.m {
                Some(m) => Voters::Fixed(m),
                None => Voters::Budget {
                    eta: self.eta.unwrap_or_default(),
                    scale: self.scale.unwrap_or(1.0),
                },
            },
            trials: self.trials,
            seed: self.seed,
            true_urn: self.true_urn,
            threads: self.threads,
        }
    }
}

/// Runs the configured simulation and writes the report to `out` when set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<StatsReport> {
    config.validate()?;
    let inst = load_instance(&config.instance)?;
    let report = simulate(&inst, &config.request())?;
    if let Some(out) = &config.out {
        write_file(out, &report.to_json())?;
    }
    Ok(report)
}

/// Smallest `m` (up to Monte Carlo noise) whose worst-case empirical
/// success rate reaches `target`, found by doubling then bisection with a
/// fixed seed.
pub fn minimal_voters(
    election: &dyn Election,
    target: f64,
    trials: u64,
    seed: u64,
    max_m: u64,
) -> Result<u64> {
    let ok = |m: u64| -> Result<bool> {
        let stats = estimate_failure(
            election,
            &EstimateConfig {
                m,
                trials,
                seed,
                target: Target::WorstCase,
                threads: None,
            },
        )?;
        Ok(1.0 - stats.rate >= target)
    };
    let mut hi = 1u64;
    while !ok(hi)? {
        if hi >= max_m {
            return Err(Error::BudgetOverflow(hi as f64));
        }
        hi = (hi * 2).min(max_m);
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub const SEARCH_LIMIT: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub n: usize,
    pub eps: f64,
    pub plurality_m: u64,
    pub scoring_m: u64,
    /// `scoring_m / plurality_m`.
    pub ratio: f64,
}

/// Minimal electorates of the Brier-induced and plurality schemes on
/// `I(n, eps)` for each `eps`.
pub fn efficiency_experiment(
    n: usize,
    eps_list: &[Rational],
    target: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<EfficiencyRow>> {
    eps_list
        .iter()
        .map(|eps| {
            let inst = Instance::Bichromatic(BichromaticInstance::lower_bound(n, eps.clone())?);
            let plurality = build_election(System::Plurality, &inst)?;
            let scoring = build_election(System::Scoring, &inst)?;
            let plurality_m =
                minimal_voters(plurality.as_ref(), target, trials, seed, SEARCH_LIMIT)?;
            let scoring_m = minimal_voters(scoring.as_ref(), target, trials, seed, SEARCH_LIMIT)?;
            Ok(EfficiencyRow {
                n,
                eps: crate::scalar::Scalar::to_f64_lossy(eps),
                plurality_m,
                scoring_m,
                ratio: scoring_m as f64 / plurality_m as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub eps: f64,
    pub min_m: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Fitted exponent of `min_m` against `n`.
    pub slope: Option<f64>,
    /// The asymptotic exponent for plurality voting.
    pub theoretical_slope: f64,
}

/// Minimal plurality electorates on `I(n, 1/n)`.
pub fn scaling_study(
    n_list: &[usize],
    target: f64,
    trials: u64,
    seed: u64,
) -> Result<ScalingReport> {
    let rows = n_list
        .iter()
        .map(|&n| {
            let eps = Rational::new(1.into(), (n as i64).into());
            let inst = Instance::Bichromatic(BichromaticInstance::lower_bound(n, eps)?);
            let election = build_election(System::Plurality, &inst)?;
            Ok(ScalingRow {
                n,
                eps: 1.0 / n as f64,
                min_m: minimal_voters(election.as_ref(), target, trials, seed, SEARCH_LIMIT)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.min_m as f64).collect();
    Ok(ScalingReport {
        slope: loglog_slope(&xs, &ys),
        rows,
        theoretical_slope: 5.0,
    })
}
