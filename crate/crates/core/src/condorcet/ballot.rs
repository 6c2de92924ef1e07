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

//! Ranking ballots for Condorcet elections.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::coeffs::CoeffTable;
use super::sampler::{default_series, pairwise_marginal, XpSampler};
use crate::budget::{ceil_voters, check_eta};
use crate::error::{Error, Result};
use crate::model::{BichromaticInstance, Urn};
use crate::scalar::Scalar;

/// A total order on the urns. `ranks()[i]` is the position of urn `i`
/// (0-based), with 0 the least preferred.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PermutationBallot {
    ranks: Vec<usize>,
}

impl PermutationBallot {
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for (i, &r) in ranks.iter().enumerate() {
            if r >= n || seen[r] {
                return Err(Error::Parse(format!(
                    "rank {r} of urn {} is not a permutation entry",
                    i + 1
                )));
            }
            seen[r] = true;
        }
        Ok(Self { ranks })
    }

    /// Orders urns by their draws, higher draws preferred; equal draws
    /// put the lower index below.
    pub fn from_draws(draws: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..draws.len()).collect();
        order.sort_by(|&a, &b| draws[a].total_cmp(&draws[b]).then(a.cmp(&b)));
        let mut ranks = vec![0; draws.len()];
        for (pos, &urn) in order.iter().enumerate() {
            ranks[urn] = pos;
        }
        Self { ranks }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Whether urn offset `i` is ranked above urn offset `j`.
    pub fn prefers(&self, i: usize, j: usize) -> bool {
        self.ranks[i] > self.ranks[j]
    }

    /// Urn offsets from least to most preferred.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.ranks.len()];
        for (urn, &r) in self.ranks.iter().enumerate() {
            order[r] = urn;
        }
        order
    }
}

/// Whether `x_i` beats `x_j` under the ballot ordering rule.
pub(crate) fn draw_beats(x_i: f64, i: usize, x_j: f64, j: usize) -> bool {
    x_i > x_j || (x_i == x_j && i > j)
}

pub fn sample_permutation<R: Rng + ?Sized>(
    samplers: &[XpSampler],
    rng: &mut R,
) -> PermutationBallot {
    let draws: Vec<f64> = samplers.iter().map(|s| s.sample(rng)).collect();
    PermutationBallot::from_draws(&draws)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
}

/// Samplers for the blue-side distribution on `(p_i)` and the red-side
/// distribution on `(1 - p_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondorcetStrategy {
    probs: Vec<f64>,
    blue: Vec<XpSampler>,
    red: Vec<XpSampler>,
}

impl CondorcetStrategy {
    pub fn build<T: Scalar>(inst: &BichromaticInstance<T>) -> Result<Self> {
        Self::with_series(inst, default_series())
    }

    pub fn with_series<T: Scalar>(
        inst: &BichromaticInstance<T>,
        table: &CoeffTable<f64>,
    ) -> Result<Self> {
        if let Err(e) = inst.require_strict() {
            return Err(match e {
                Error::NotStrict { first, .. } => {
                    Error::DuplicateProbability(inst.probs()[first - 1].to_f64_lossy())
                }
                other => other,
            });
        }
        let probs: Vec<f64> = inst.probs().iter().map(Scalar::to_f64_lossy).collect();
        let blue = probs
            .iter()
            .map(|&p| XpSampler::with_series(p, table))
            .collect::<Result<_>>()?;
        let red = probs
            .iter()
            .map(|&p| XpSampler::with_series(1.0 - p, table))
            .collect::<Result<_>>()?;
        Ok(Self { probs, blue, red })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn samplers(&self, color: Color) -> &[XpSampler] {
        match color {
            Color::Blue => &self.blue,
            Color::Red => &self.red,
        }
    }

    /// Fills `out` with one draw per urn.
    pub fn draw_into<R: Rng + ?Sized>(&self, color: Color, rng: &mut R, out: &mut [f64]) {
        for (slot, s) in out.iter_mut().zip(self.samplers(color)) {
            *slot = s.sample(rng);
        }
    }
}

pub fn condorcet_ballot<R: Rng + ?Sized>(
    strategy: &CondorcetStrategy,
    color: Color,
    rng: &mut R,
) -> PermutationBallot {
    sample_permutation(strategy.samplers(color), rng)
}

/// Probability that `i` is ranked above `j` on a single ballot when `i`
/// is the unknown urn.
pub fn beat_probability<T: Scalar>(inst: &BichromaticInstance<T>, i: Urn, j: Urn) -> Result<f64> {
    if i == j {
        return Err(Error::SameUrn(i.index()));
    }
    Urn::new(i.index(), inst.len())?;
    Urn::new(j.index(), inst.len())?;
    let pi = inst.prob(i).to_f64_lossy();
    let pj = inst.prob(j).to_f64_lossy();
    let above = |a: f64, b: f64| {
        if a > b {
            pairwise_marginal(b, a)
        } else {
            1.0 - pairwise_marginal(a, b)
        }
    };
    Ok(pi * above(pi, pj) + (1.0 - pi) * above(1.0 - pi, 1.0 - pj))
}

pub const CONDORCET_BUDGET_CONSTANT: f64 = 150.0;

/// `ceil(150 eps^-2 ln(3 / eta))`.
pub fn condorcet_budget<T: Scalar>(inst: &BichromaticInstance<T>, eta: f64) -> Result<u64> {
    check_eta(eta)?;
    inst.require_strict()?;
    let eps = inst.eps().to_f64_lossy();
    ceil_voters(CONDORCET_BUDGET_CONSTANT / (eps * eps) * (3.0 / eta).ln())
}
