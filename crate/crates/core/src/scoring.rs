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

//! Strategies induced by a proper scoring rule.
//!
//! A pair `(f0, f1)` is proper when `g_z(x) = z f0(x) + (1 - z) f1(x)` is
//! uniquely maximized at `x = z`. After a blue ball a voter names urn `i`
//! with probability proportional to `f0(p_i)`, after a red ball
//! proportional to `f1(p_i)`, both padded so the two weight vectors share a
//! common normaliser. Expected votes are then `g_{p_t}(p_j)` up to an
//! affine map, so the true urn `t` leads, but only by `O(eps^2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BichromaticInstance, Urn};
use crate::scalar::{self, Scalar};

/// A pair `(f0, f1)` of non-negative functions on `[0, 1]`.
pub trait ScoringRule<T>: Send + Sync {
    fn f0(&self, x: &T) -> T;
    fn f1(&self, x: &T) -> T;

    /// `z f0(x) + (1 - z) f1(x)`.
    fn g(&self, z: &T, x: &T) -> T
    where
        T: Scalar,
    {
        z.clone() * self.f0(x) + (T::one() - z.clone()) * self.f1(x)
    }
}

/// Quadratic (Brier) rule: `f0(x) = 2x - x^2`, `f1(x) = 1 - x^2`.
///
/// `d g_z / dx = 2z - 2x`, so `g_z` peaks at `x = z`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Brier;

impl<T: Scalar> ScoringRule<T> for Brier {
    fn f0(&self, x: &T) -> T {
        x.clone() * (T::from_count(2) - x.clone())
    }

    fn f1(&self, x: &T) -> T {
        T::one() - x.clone() * x.clone()
    }
}

pub fn brier_pair() -> Brier {
    Brier
}

/// Checks properness on the grid `z, x in {0, 1/steps, ..., 1}`: both
/// functions are non-negative there and each `g_z` has its unique grid
/// maximum at `x = z`.
pub fn check_proper_on_grid<R: ScoringRule<f64> + ?Sized>(rule: &R, steps: usize) -> Result<()> {
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    for &x in &grid {
        if rule.f0(&x) < 0.0 || rule.f1(&x) < 0.0 {
            return Err(Error::ImproperScoringRule {
                z: f64::NAN,
                argmax: x,
            });
        }
    }
    for (zi, &z) in grid.iter().enumerate() {
        let values: Vec<f64> = grid.iter().map(|x| rule.g(&z, x)).collect();
        let best = values[zi];
        if let Some((xi, _)) = values
            .iter()
            .enumerate()
            .find(|&(xi, &v)| xi != zi && v >= best)
        {
            return Err(Error::ImproperScoringRule {
                z,
                argmax: grid[xi],
            });
        }
    }
    Ok(())
}

/// Vote distributions induced by a scoring rule on a strict instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedScheme<T> {
    /// `sum_i f0(p_i)`.
    pub q0: T,
    /// `sum_i f1(p_i)`.
    pub q1: T,
    /// `max(q0, q1)`.
    pub q_star: T,
    /// Scores `f0(p_i)` and `f1(p_i)` per urn.
    pub f0_values: Vec<T>,
    pub f1_values: Vec<T>,
    /// `f0(p_i)/q* + (q* - q0)/(q* n)`.
    pub blue_votes: Vec<T>,
    /// `f1(p_i)/q* + (q* - q1)/(q* n)`.
    pub red_votes: Vec<T>,
}

impl<T: Scalar> InducedScheme<T> {
    pub fn build<R: ScoringRule<T> + ?Sized>(
        inst: &BichromaticInstance<T>,
        rule: &R,
    ) -> Result<Self> {
        inst.require_strict()?;
        let f0_values: Vec<T> = inst.probs().iter().map(|p| rule.f0(p)).collect();
        let f1_values: Vec<T> = inst.probs().iter().map(|p| rule.f1(p)).collect();
        let q0 = scalar::sum(&f0_values);
        let q1 = scalar::sum(&f1_values);
        let q_star = scalar::max(q0.clone(), q1.clone());
        let n = T::from_count(inst.len());
        let votes = |f: &[T], q: &T| -> Vec<T> {
            let pad = (q_star.clone() - q.clone()) / (q_star.clone() * n.clone());
            f.iter()
                .map(|v| v.clone() / q_star.clone() + pad.clone())
                .collect()
        };
        let blue_votes = votes(&f0_values, &q0);
        let red_votes = votes(&f1_values, &q1);
        Ok(Self {
            q0,
            q1,
            q_star,
            f0_values,
            f1_values,
            blue_votes,
            red_votes,
        })
    }

    pub fn len(&self) -> usize {
        self.blue_votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blue_votes.is_empty()
    }

    pub fn expected_shares(&self, inst: &BichromaticInstance<T>, true_urn: Urn) -> Result<Vec<T>> {
        Urn::new(true_urn.index(), self.len())?;
        let p = inst.prob(true_urn).clone();
        let q = T::one() - p.clone();
        Ok(self
            .blue_votes
            .iter()
            .zip(&self.red_votes)
            .map(|(b, r)| p.clone() * b.clone() + q.clone() * r.clone())
            .collect())
    }

    /// Expected votes per urn with `voters` voters, summed voter by voter.
    pub fn expected_votes(
        &self,
        inst: &BichromaticInstance<T>,
        true_urn: Urn,
        voters: usize,
    ) -> Result<Vec<T>> {
        let shares = self.expected_shares(inst, true_urn)?;
        Ok(shares
            .into_iter()
            .map(|s| (0..voters).fold(T::zero(), |acc, _| acc + s.clone()))
            .collect())
    }

    /// Closed form `(k / q*) g_{p_t}(p_j) + k (p_t (q* - q0) + (1 - p_t)(q* - q1)) / (q* n)`.
    ///
    /// The constant term is the same for every `j`, so the maximizer is
    /// the maximizer of `g_{p_t}`, i.e. the true urn.
    pub fn closed_form_votes<R: ScoringRule<T> + ?Sized>(
        &self,
        inst: &BichromaticInstance<T>,
        rule: &R,
        true_urn: Urn,
        voters: usize,
    ) -> Result<Vec<T>> {
        Urn::new(true_urn.index(), self.len())?;
        let k = T::from_count(voters);
        let pt = inst.prob(true_urn).clone();
        let n = T::from_count(inst.len());
        let shift = k.clone()
            * (pt.clone() * (self.q_star.clone() - self.q0.clone())
                + (T::one() - pt.clone()) * (self.q_star.clone() - self.q1.clone()))
            / (self.q_star.clone() * n);
        Ok(inst
            .probs()
            .iter()
            .map(|pj| k.clone() / self.q_star.clone() * rule.g(&pt, pj) + shift.clone())
            .collect())
    }

    pub fn kernel(&self, inst: &BichromaticInstance<T>) -> Vec<Vec<T>> {
        inst.urns()
            .map(|u| self.expected_shares(inst, u).expect("urn in range"))
            .collect()
    }
}
