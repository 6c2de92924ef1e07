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

//! Seeded Monte Carlo elections.
//!
//! Every trial draws from its own ChaCha stream selected by the master
//! seed, the true urn and the trial counter, so results do not depend on
//! how trials are spread over threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condorcet::ballot::draw_beats;
use crate::condorcet::{Color, CondorcetStrategy};
use crate::cumulative::CumulativeScheme;
use crate::error::{Error, Result};
use crate::model::Urn;
use crate::scalar::Scalar;
use crate::stats::wilson_interval;

pub type TrialRng = ChaCha8Rng;

/// The generator for one trial.
pub fn trial_rng(seed: u64, true_urn: Urn, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((true_urn.offset() as u64) << 40) ^ trial);
    rng
}

/// Index of the strictly largest value, `None` on a tie for first place.
pub fn unique_argmax<T: PartialOrd>(values: &[T]) -> Option<usize> {
    let mut best = 0;
    let mut tied = false;
    for (i, v) in values.iter().enumerate().skip(1) {
        match v.partial_cmp(&values[best]) {
            Some(std::cmp::Ordering::Greater) => {
                best = i;
                tied = false;
            }
            Some(std::cmp::Ordering::Equal) => tied = true,
            _ => {}
        }
    }
    (!values.is_empty() && !tied).then_some(best)
}

/// Vote counts of `m` voters who each pick urn `j` with probability
/// `row[j]`, drawn as a chain of conditional binomials.
pub fn multinomial_tally<R: Rng + ?Sized>(row: &[f64], m: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; row.len()];
    let mut remaining = m;
    let mut mass = 1.0f64;
    let last = row.len().saturating_sub(1);
    for (j, &w) in row.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if j == last {
            counts[j] = remaining;
            break;
        }
        let p = if mass > 0.0 {
            (w / mass).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let x = Binomial::new(remaining, p)
            .expect("p in [0, 1]")
            .sample(rng);
        counts[j] = x;
        remaining -= x;
        mass -= w;
    }
    counts
}

/// Plurality winner of `m` voters voting by `kernel_row`.
pub fn run_trial_plurality<R: Rng + ?Sized>(
    kernel_row: &[f64],
    m: u64,
    rng: &mut R,
) -> Option<usize> {
    unique_argmax(&multinomial_tally(kernel_row, m, rng))
}

/// Cumulative winner; only the number of blue draws matters.
pub fn run_trial_cumulative<T: Scalar, R: Rng + ?Sized>(
    scheme: &CumulativeScheme<T>,
    p_true: f64,
    m: u64,
    rng: &mut R,
) -> Option<usize> {
    let blue = Binomial::new(m, p_true.clamp(0.0, 1.0))
        .expect("p in [0, 1]")
        .sample(rng);
    unique_argmax(&scheme.scores(blue, m - blue))
}

/// The candidate ranked above every other by more than half of `m`
/// ballots; `wins[i][j]` counts ballots ranking `i` above `j`.
pub fn condorcet_winner(wins: &[Vec<u64>], m: u64) -> Option<usize> {
    (0..wins.len()).find(|&i| (0..wins.len()).all(|j| j == i || 2 * wins[i][j] > m))
}

/// Pairwise tallies of `m` ballots when `true_urn` is the unknown urn.
pub fn condorcet_tally<R: Rng + ?Sized>(
    strategy: &CondorcetStrategy,
    true_urn: Urn,
    m: u64,
    rng: &mut R,
) -> Vec<Vec<u64>> {
    let n = strategy.len();
    let p = strategy.probs()[true_urn.offset()];
    let mut wins = vec![vec![0u64; n]; n];
    let mut draws = vec![0.0; n];
    for _ in 0..m {
        let color = if rng.random::<f64>() < p {
            Color::Blue
        } else {
            Color::Red
        };
        strategy.draw_into(color, rng, &mut draws);
        for i in 0..n {
            for j in i + 1..n {
                if draw_beats(draws[i], i, draws[j], j) {
                    wins[i][j] += 1;
                } else {
                    wins[j][i] += 1;
                }
            }
        }
    }
    wins
}

pub fn run_trial_condorcet<R: Rng + ?Sized>(
    strategy: &CondorcetStrategy,
    true_urn: Urn,
    m: u64,
    rng: &mut R,
) -> Option<usize> {
    condorcet_winner(&condorcet_tally(strategy, true_urn, m, rng), m)
}

/// Something the engine can hold elections for.
pub trait Election: Sync {
    fn system(&self) -> &str;

    fn candidates(&self) -> usize;

    /// The winning urn offset, or `None` when nobody wins outright.
    fn run_trial(&self, true_urn: Urn, m: u64, rng: &mut TrialRng) -> Option<usize>;

    /// Whether urns `a` and `b` have the same ball distribution.
    fn same_class(&self, a: usize, b: usize) -> bool {
        a == b
    }
}

/// Any strategy summarised by its vote kernel: row `i` is the vote
/// distribution when urn `i` is the unknown one.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelElection {
    system: String,
    rows: Vec<Vec<f64>>,
    classes: Vec<usize>,
}

impl KernelElection {
    pub fn new<T: Scalar>(system: &str, kernel: &[Vec<T>]) -> Self {
        let rows = kernel
            .iter()
            .map(|row| row.iter().map(Scalar::to_f64_lossy).collect())
            .collect();
        Self {
            system: system.to_owned(),
            rows,
            classes: (0..kernel.len()).collect(),
        }
    }

    /// Urns sharing a class id count as interchangeable winners.
    pub fn with_classes(mut self, classes: Vec<usize>) -> Self {
        assert_eq!(classes.len(), self.rows.len());
        self.classes = classes;
        self
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

impl Election for KernelElection {
    fn system(&self) -> &str {
        &self.system
    }

    fn candidates(&self) -> usize {
        self.rows.len()
    }

    fn run_trial(&self, true_urn: Urn, m: u64, rng: &mut TrialRng) -> Option<usize> {
        run_trial_plurality(&self.rows[true_urn.offset()], m, rng)
    }

    fn same_class(&self, a: usize, b: usize) -> bool {
        self.classes[a] == self.classes[b]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeElection<T> {
    scheme: CumulativeScheme<T>,
    probs: Vec<f64>,
}

impl<T: Scalar> CumulativeElection<T> {
    pub fn new(scheme: CumulativeScheme<T>, probs: &[T]) -> Self {
        assert_eq!(scheme.len(), probs.len());
        Self {
            scheme,
            probs: probs.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }
}

impl<T: Scalar> Election for CumulativeElection<T> {
    fn system(&self) -> &str {
        "cumulative"
    }

    fn candidates(&self) -> usize {
        self.probs.len()
    }

    fn run_trial(&self, true_urn: Urn, m: u64, rng: &mut TrialRng) -> Option<usize> {
        run_trial_cumulative(&self.scheme, self.probs[true_urn.offset()], m, rng)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondorcetElection {
    strategy: CondorcetStrategy,
}

impl CondorcetElection {
    pub fn new(strategy: CondorcetStrategy) -> Self {
        Self { strategy }
    }
}

impl Election for CondorcetElection {
    fn system(&self) -> &str {
        "condorcet"
    }

    fn candidates(&self) -> usize {
        self.strategy.len()
    }

    fn run_trial(&self, true_urn: Urn, m: u64, rng: &mut TrialRng) -> Option<usize> {
        run_trial_condorcet(&self.strategy, true_urn, m, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub winner: Option<Urn>,
    pub true_urn: Urn,
    pub success: bool,
}

pub fn run_trial(
    election: &dyn Election,
    true_urn: Urn,
    m: u64,
    seed: u64,
    trial: u64,
) -> TrialOutcome {
    let mut rng = trial_rng(seed, true_urn, trial);
    let winner = election.run_trial(true_urn, m, &mut rng);
    TrialOutcome {
        winner: winner.map(Urn::from_offset),
        true_urn,
        success: winner.is_some_and(|w| election.same_class(w, true_urn.offset())),
    }
}

/// Which unknown urn the trials are run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Urn(Urn),
    /// Every urn in turn; the worst failure rate is reported.
    WorstCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateConfig {
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub target: Target,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub m: u64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci95: [f64; 2],
    pub seed: u64,
    /// 1-based index of the urn the figures refer to.
    pub true_urn: usize,
}

impl TrialStats {
    pub fn new(m: u64, trials: u64, failures: u64, seed: u64, true_urn: Urn) -> Self {
        let (lo, hi) = wilson_interval(failures, trials);
        Self {
            m,
            trials,
            failures,
            rate: failures as f64 / trials as f64,
            ci95: [lo, hi],
            seed,
            true_urn: true_urn.index(),
        }
    }
}

fn count_failures(election: &dyn Election, urn: Urn, config: &EstimateConfig) -> u64 {
    (0..config.trials)
        .into_par_iter()
        .filter(|&t| !run_trial(election, urn, config.m, config.seed, t).success)
        .count() as u64
}

pub fn estimate_failure(election: &dyn Election, config: &EstimateConfig) -> Result<TrialStats> {
    if config.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let n = election.candidates();
    let urns: Vec<Urn> = match config.target {
        Target::Urn(u) => vec![Urn::new(u.index(), n)?],
        Target::WorstCase => (0..n).map(Urn::from_offset).collect(),
    };
    let work = || {
        urns.iter()
            .map(|&u| (u, count_failures(election, u, config)))
            .fold(None, |best: Option<(Urn, u64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
            .expect("at least one urn")
    };
    let (urn, failures) = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(TrialStats::new(
        config.m,
        config.trials,
        failures,
        config.seed,
        urn,
    ))
}
