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

//! Cumulative voting built from the plurality strategy.
//!
//! Instead of naming one urn at random, a voter hands out her unit of
//! weight exactly as the plurality strategy would have randomized: the
//! blue ballot is `(B_1, ..., B_n)` and the red ballot `(R_1, ..., R_n)`.
//! The total score of urn `j` then depends only on the number of blue
//! draws, which is why only `O(eps^-2)` voters are needed.

use serde::Serialize;

use crate::budget::{ceil_voters, check_eta};
use crate::error::{Error, Result};
use crate::model::{BichromaticInstance, Urn};
use crate::plurality::PluralityScheme;
use crate::scalar::Scalar;

/// The two possible cumulative ballots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeScheme<T> {
    pub blue_ballot: Vec<T>,
    pub red_ballot: Vec<T>,
}

impl<T: Scalar> CumulativeScheme<T> {
    pub fn len(&self) -> usize {
        self.blue_ballot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blue_ballot.is_empty()
    }

    /// Total score of every urn after `blue` blue draws and `red` red ones.
    pub fn scores(&self, blue: u64, red: u64) -> Vec<T> {
        let mb = T::from_u64(blue).expect("count fits");
        let mr = T::from_u64(red).expect("count fits");
        self.blue_ballot
            .iter()
            .zip(&self.red_ballot)
            .map(|(b, r)| mb.clone() * b.clone() + mr.clone() * r.clone())
            .collect()
    }

    /// `D_i(j) = m_b (B_i - B_j) + m_r (R_i - R_j)`.
    pub fn tally_difference(&self, i: Urn, j: Urn, blue: u64, red: u64) -> T {
        let mb = T::from_u64(blue).expect("count fits");
        let mr = T::from_u64(red).expect("count fits");
        let (a, b) = (i.offset(), j.offset());
        mb * (self.blue_ballot[a].clone() - self.blue_ballot[b].clone())
            + mr * (self.red_ballot[a].clone() - self.red_ballot[b].clone())
    }
}

pub fn cumulative_ballots<T: Scalar>(scheme: &PluralityScheme<T>) -> CumulativeScheme<T> {
    CumulativeScheme {
        blue_ballot: scheme.blue_votes.clone(),
        red_ballot: scheme.red_votes.clone(),
    }
}

pub const CUMULATIVE_BUDGET_CONSTANT: f64 = 150.0;

/// `ceil(150 eps^-2 ln(2 / eta))`.
pub fn cumulative_budget<T: Scalar>(inst: &BichromaticInstance<T>, eta: f64) -> Result<u64> {
    check_eta(eta)?;
    inst.require_strict()?;
    let eps = inst.eps().to_f64_lossy();
    ceil_voters(CUMULATIVE_BUDGET_CONSTANT / (eps * eps) * (2.0 / eta).ln())
}

/// The expected lead `Delta_i(j)` and the span `|B_i - B_j| + |R_i - R_j|`
/// of one voter's contribution to `D_i(j)`, next to the bound
/// `4 |i - j| / (eps M)` on the span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSpan<T> {
    pub delta: T,
    pub span: T,
    pub span_bound: T,
}

pub fn cumulative_margin_span<T: Scalar>(
    scheme: &PluralityScheme<T>,
    inst: &BichromaticInstance<T>,
    i: Urn,
    j: Urn,
) -> Result<MarginSpan<T>> {
    if i == j {
        return Err(Error::SameUrn(i.index()));
    }
    let delta = scheme.margin(inst, i, j)?;
    let (a, b) = (i.offset(), j.offset());
    let span = (scheme.blue_votes[a].clone() - scheme.blue_votes[b].clone()).abs()
        + (scheme.red_votes[a].clone() - scheme.red_votes[b].clone()).abs();
    let dist = T::from_count(a.abs_diff(b));
    let span_bound = T::from_count(4) * dist / (inst.eps().clone() * scheme.m_norm.clone());
    Ok(MarginSpan {
        delta,
        span,
        span_bound,
    })
}
