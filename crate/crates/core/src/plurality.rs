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

//! Plurality voting with two signals.
//!
//! Every voter draws one ball from the unknown urn and names a single urn at
//! random, using one distribution after a blue ball and another after a red
//! ball. The two distributions are built from the "ladder" weights
//!
//! ```text
//! b_k = sum_{l<k}  (2 - p_{l+1} - p_l) / (p_{l+1} - p_l)
//! r_k = sum_{l>=k} (p_{l+1} + p_l)     / (p_{l+1} - p_l)
//! ```
//!
//! normalised by `M = max(sum b, sum r)` and padded uniformly. With this
//! choice the true urn `i` leads every other urn `j` in expectation by at
//! least `|i - j| / M`.

use serde::Serialize;

use crate::budget::{ceil_voters, check_eta, check_scale};
use crate::error::{Error, Result};
use crate::model::{BichromaticInstance, Urn};
use crate::scalar::{self, Scalar};

/// Ladder weights `(b, r)` over a sorted, strictly increasing point list.
pub(crate) fn ladder_weights<T: Scalar>(points: &[T]) -> (Vec<T>, Vec<T>) {
    let n = points.len();
    let two = T::one() + T::one();
    let mut up = Vec::with_capacity(n.saturating_sub(1));
    let mut down = Vec::with_capacity(n.saturating_sub(1));
    for w in points.windows(2) {
        let gap = w[1].clone() - w[0].clone();
        let s = w[1].clone() + w[0].clone();
        up.push((two.clone() - s.clone()) / gap.clone());
        down.push(s / gap);
    }
    let mut b = Vec::with_capacity(n);
    let mut acc = T::zero();
    b.push(acc.clone());
    for u in &up {
        acc = acc + u.clone();
        b.push(acc.clone());
    }
    let mut r = vec![T::zero(); n];
    let mut acc = T::zero();
    for k in (0..n.saturating_sub(1)).rev() {
        acc = acc + down[k].clone();
        r[k] = acc.clone();
    }
    (b, r)
}

/// The two-signal plurality strategy for a strict instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PluralityScheme<T> {
    /// Ladder weights `b_1..b_n` (blue side).
    pub b: Vec<T>,
    /// Ladder weights `r_1..r_n` (red side).
    pub r: Vec<T>,
    /// Normaliser `M = max(sum b, sum r)`.
    #[serde(rename = "M")]
    pub m_norm: T,
    /// Vote distribution after drawing blue; non-decreasing in the urn index.
    pub blue_votes: Vec<T>,
    /// Vote distribution after drawing red; non-increasing in the urn index.
    pub red_votes: Vec<T>,
}

impl<T: Scalar> PluralityScheme<T> {
    pub fn build(inst: &BichromaticInstance<T>) -> Result<Self> {
        inst.require_strict()?;
        let (b, r) = ladder_weights(inst.probs());
        let sum_b = scalar::sum(&b);
        let sum_r = scalar::sum(&r);
        let m_norm = scalar::max(sum_r.clone(), sum_b.clone());
        let n = T::from_count(inst.len());
        let pad_b = (m_norm.clone() - sum_b) / n.clone();
        let pad_r = (m_norm.clone() - sum_r) / n;
        let blue_votes = b
            .iter()
            .map(|bk| (bk.clone() + pad_b.clone()) / m_norm.clone())
            .collect();
        let red_votes = r
            .iter()
            .map(|rk| (rk.clone() + pad_r.clone()) / m_norm.clone())
            .collect();
        Ok(Self {
            b,
            r,
            m_norm,
            blue_votes,
            red_votes,
        })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// `E_i(j) = p_i B_j + (1 - p_i) R_j` for every `j`.
    pub fn expected_shares(&self, inst: &BichromaticInstance<T>, true_urn: Urn) -> Result<Vec<T>> {
        let n = self.len();
        Urn::new(true_urn.index(), n)?;
        let p = inst.prob(true_urn).clone();
        let q = T::one() - p.clone();
        Ok((0..n)
            .map(|j| p.clone() * self.blue_votes[j].clone() + q.clone() * self.red_votes[j].clone())
            .collect())
    }

    /// `Delta_i(j) = E_i(i) - E_i(j)`, the expected per-voter lead of the
    /// true urn `i` over `j`.
    pub fn margin(&self, inst: &BichromaticInstance<T>, i: Urn, j: Urn) -> Result<T> {
        if i == j {
            return Err(Error::SameUrn(i.index()));
        }
        Urn::new(j.index(), self.len())?;
        let shares = self.expected_shares(inst, i)?;
        Ok(shares[i.offset()].clone() - shares[j.offset()].clone())
    }

    /// Row `i` of the vote kernel is the expected share vector when urn `i`
    /// is the unknown one.
    pub fn kernel(&self, inst: &BichromaticInstance<T>) -> Vec<Vec<T>> {
        inst.urns()
            .map(|u| self.expected_shares(inst, u).expect("urn in range"))
            .collect()
    }
}

/// Voter count sufficient for the plurality scheme to elect the unknown
/// urn with probability at least `1 - eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PluralityBudget {
    /// `ceil(scale * 108 * M (n-1) / eps * ln(4 / eta))`.
    pub voters: u64,
    /// `ceil(scale * 216 (n-1)^2 n / eps^2)`, the scheme-independent
    /// figure obtained from `M <= 2 n (n-1) / eps`. It leaves out the
    /// `ln(4 / eta)` factor; `capped_voters` puts it back.
    pub cap: u64,
    /// `ceil(scale * 216 (n-1)^2 n / eps^2 * ln(4 / eta))`, always `>= voters`.
    pub capped_voters: u64,
    pub constant: f64,
    pub scale: f64,
}

pub const PLURALITY_BUDGET_CONSTANT: f64 = 108.0;

pub fn plurality_budget<T: Scalar>(
    inst: &BichromaticInstance<T>,
    eta: f64,
    scale: f64,
) -> Result<PluralityBudget> {
    check_eta(eta)?;
    check_scale(scale)?;
    let scheme = PluralityScheme::build(inst)?;
    let n = inst.len() as f64;
    let eps = inst.eps().to_f64_lossy();
    let m_norm = scheme.m_norm.to_f64_lossy();
    let voters = ceil_voters(
        scale * PLURALITY_BUDGET_CONSTANT * m_norm * (n - 1.0) / eps * (4.0 / eta).ln(),
    )?;
    let cap_real = scale * 2.0 * PLURALITY_BUDGET_CONSTANT * (n - 1.0).powi(2) * n / (eps * eps);
    let cap = ceil_voters(cap_real)?;
    let capped_voters = ceil_voters(cap_real * (4.0 / eta).ln())?;
    Ok(PluralityBudget {
        voters,
        cap,
        capped_voters,
        constant: PLURALITY_BUDGET_CONSTANT,
        scale,
    })
}
