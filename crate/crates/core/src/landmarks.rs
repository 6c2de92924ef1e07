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

//! Two-signal plurality on a landmark grid.
//!
//! Urns are matched to the landmark that maximizes their expected ladder
//! score; urns mapped to the same landmark vote identically, so urns with
//! equal blue fractions are allowed. A grid satisfying the spacing
//! conditions checked by [`LandmarkSet::new`] keeps the normaliser `M`
//! within a constant factor of `(n' - 1)(n + n') / eps`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Urn;
use crate::plurality::ladder_weights;
use crate::scalar::{self, Scalar};

/// A validated landmark grid `p'_1 < ... < p'_{n'}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandmarkSet<T> {
    points: Vec<T>,
    eps: T,
    k: usize,
}

/// Smallest number of landmarks in a grid.
pub const MIN_LANDMARKS: usize = 10;

impl<T: Scalar> LandmarkSet<T> {
    /// Checks that the grid is long enough, strictly increasing inside
    /// `[0, 1]`, and satisfies
    ///
    /// * (a) the first and last `K = ceil((n'-1)/3)` gaps are at most `2 eps`;
    /// * (b) `p'_{K+1} <= (2K+1) eps` and `p'_{n'-K} >= 1 - (2K+1) eps`.
    ///
    /// Violations are reported with 1-based indices.
    pub fn new(points: Vec<T>) -> Result<Self> {
        let n = points.len();
        if n < MIN_LANDMARKS {
            return Err(Error::TooFewLandmarks(n));
        }
        if points[0] < T::zero() || points[n - 1] > T::one() {
            let at = if points[0] < T::zero() { 1 } else { n };
            return Err(Error::LandmarksNotIncreasing(at));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::LandmarksNotIncreasing(i + 2));
        }
        let eps = points
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .reduce(scalar::min)
            .expect("at least two points");
        let k = (n - 1).div_ceil(3);
        let two_eps = eps.clone() + eps.clone();
        let gap = |i: usize| points[i].clone() - points[i - 1].clone();

        // Gaps are named by the 1-based index of their left end point.
        let mut bad: Vec<usize> = Vec::new();
        for kk in 1..=k {
            if gap(kk) > two_eps {
                bad.push(kk);
            }
            if gap(n - kk) > two_eps {
                bad.push(n - kk);
            }
        }
        if !bad.is_empty() {
            bad.sort_unstable();
            bad.dedup();
            return Err(Error::LandmarkCondition {
                condition: 'a',
                indices: bad,
            });
        }

        let reach = eps.clone() * T::from_count(2 * k + 1);
        let mut bad = Vec::new();
        if points[k] > reach {
            bad.push(k + 1);
        }
        if points[n - k - 1] < T::one() - reach {
            bad.push(n - k);
        }
        if !bad.is_empty() {
            return Err(Error::LandmarkCondition {
                condition: 'b',
                indices: bad,
            });
        }
        Ok(Self { points, eps, k })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum gap between consecutive landmarks.
    pub fn eps(&self) -> &T {
        &self.eps
    }

    /// `K = ceil((n' - 1) / 3)`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// 1-based indices of the nearest landmarks below and above `p`
    /// (`k-` and `k+`); equal when `p` is itself a landmark.
    pub fn flanking(&self, p: &T) -> (Option<usize>, Option<usize>) {
        let below = self.points.iter().rposition(|x| x <= p).map(|i| i + 1);
        let above = self.points.iter().position(|x| x >= p).map(|i| i + 1);
        (below, above)
    }

    /// Bracket `[lower, upper]` on the normaliser `M` of any flexible
    /// scheme over `n` urns built on this grid:
    /// `(n'-1)(n+n') / (81 eps) <= M <= 2 (n'-1)(n+n') / eps`.
    pub fn m_bounds(&self, n: usize) -> (T, T) {
        let core = T::from_count(self.len() - 1) * T::from_count(n + self.len()) / self.eps.clone();
        (core.clone() / T::from_count(81), core * T::from_count(2))
    }
}

/// Plurality strategy for urns matched onto a landmark grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlexibleScheme<T> {
    /// Blue fraction of each urn, in input order.
    pub probs: Vec<T>,
    /// 1-based landmark index assigned to each urn.
    pub phi: Vec<usize>,
    /// Ladder weights over the landmarks.
    pub b: Vec<T>,
    pub r: Vec<T>,
    /// `|phi^-1(k)| + 1` for every landmark `k`.
    pub multiplicity: Vec<usize>,
    /// Normaliser `M = max(sum_k mult_k b_k, sum_k mult_k r_k)`.
    #[serde(rename = "M")]
    pub m_norm: T,
    pub blue_votes: Vec<T>,
    pub red_votes: Vec<T>,
}

impl<T: Scalar> FlexibleScheme<T> {
    /// Builds the scheme for `probs` (any order, ties allowed).
    ///
    /// Each urn goes to the landmark maximizing `p b_k + (1-p) r_k`, the
    /// smaller index on ties. Vote probabilities are
    /// `B_j = (b_phi(j) + (M - sum_i b_phi(i)) / n) / M`, and likewise for
    /// red, so both vectors sum to one while every pairwise margin only
    /// depends on the ladder weights.
    pub fn build(probs: &[T], landmarks: &LandmarkSet<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (index, p) in probs.iter().enumerate() {
            if *p < T::zero() || *p > T::one() {
                return Err(Error::ProbabilityOutOfRange {
                    index,
                    value: p.to_f64_lossy(),
                });
            }
        }
        let (b, r) = ladder_weights(landmarks.points());
        let phi: Vec<usize> = probs
            .iter()
            .map(|p| {
                let q = T::one() - p.clone();
                let mut best = 0;
                let mut best_score = p.clone() * b[0].clone() + q.clone() * r[0].clone();
                for k in 1..b.len() {
                    let score = p.clone() * b[k].clone() + q.clone() * r[k].clone();
                    if score > best_score {
                        best = k;
                        best_score = score;
                    }
                }
                best + 1
            })
            .collect();
        let mut multiplicity = vec![1usize; b.len()];
        for &k in &phi {
            multiplicity[k - 1] += 1;
        }
        let weighted = |w: &[T]| {
            w.iter()
                .zip(&multiplicity)
                .fold(T::zero(), |acc, (x, &m)| acc + x.clone() * T::from_count(m))
        };
        let m_norm = scalar::max(weighted(&r), weighted(&b));
        let n = T::from_count(probs.len());
        let votes = |w: &[T]| -> Vec<T> {
            let used = phi.iter().fold(T::zero(), |acc, &k| acc + w[k - 1].clone());
            let pad = (m_norm.clone() - used) / n.clone();
            phi.iter()
                .map(|&k| (w[k - 1].clone() + pad.clone()) / m_norm.clone())
                .collect()
        };
        let blue_votes = votes(&b);
        let red_votes = votes(&r);
        Ok(Self {
            probs: probs.to_vec(),
            phi,
            b,
            r,
            multiplicity,
            m_norm,
            blue_votes,
            red_votes,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn expected_shares(&self, true_urn: Urn) -> Result<Vec<T>> {
        Urn::new(true_urn.index(), self.len())?;
        let p = self.probs[true_urn.offset()].clone();
        let q = T::one() - p.clone();
        Ok(self
            .blue_votes
            .iter()
            .zip(&self.red_votes)
            .map(|(bj, rj)| p.clone() * bj.clone() + q.clone() * rj.clone())
            .collect())
    }

    pub fn margin(&self, i: Urn, j: Urn) -> Result<T> {
        Urn::new(j.index(), self.len())?;
        let shares = self.expected_shares(i)?;
        Ok(shares[i.offset()].clone() - shares[j.offset()].clone())
    }

    pub fn kernel(&self) -> Vec<Vec<T>> {
        (0..self.len())
            .map(|i| {
                self.expected_shares(Urn::from_offset(i))
                    .expect("urn in range")
            })
            .collect()
    }

    /// Guaranteed lower bound on `margin(i, j)`: `|phi_i - phi_j| / M` when
    /// urn `i` sits on a landmark, `max(|phi_i - phi_j| - 1, 0) / M`
    /// otherwise.
    pub fn margin_floor(&self, landmarks: &LandmarkSet<T>, i: Urn, j: Urn) -> T {
        let d = self.phi[i.offset()].abs_diff(self.phi[j.offset()]);
        let (below, above) = landmarks.flanking(&self.probs[i.offset()]);
        let steps = if below.is_some() && below == above {
            d
        } else {
            d.saturating_sub(1)
        };
        T::from_count(steps) / self.m_norm.clone()
    }

    /// Class label per urn; urns with equal blue fractions share a class
    /// and are interchangeable as election winners.
    pub fn classes(&self) -> Vec<usize> {
        (0..self.len())
            .map(|i| {
                (0..=i)
                    .find(|&j| self.probs[j] == self.probs[i])
                    .expect("i matches itself")
            })
            .collect()
    }
}
