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

//! Urn instances: bichromatic (blue fraction per urn) and multicolor
//! (a distribution over colors per urn), their separation parameters, and
//! the evenly spaced family used to exhibit hard elections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// 1-based label of an urn, validated against the instance size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Urn(usize);

impl Urn {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index == 0 || index > n {
            return Err(Error::UrnOutOfRange { index, n });
        }
        Ok(Urn(index))
    }

    /// Builds the label for a 0-based position.
    pub fn from_offset(offset: usize) -> Self {
        Urn(offset + 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn offset(self) -> usize {
        self.0 - 1
    }
}

/// Urns with two colors, described by the fraction of blue balls.
#[derive(Debug, Clone, PartialEq)]
pub struct BichromaticInstance<T> {
    probs: Vec<T>,
    eps: T,
    strict: bool,
}

impl<T: Scalar> BichromaticInstance<T> {
    /// Sorts `probs` and computes the smallest consecutive gap.
    ///
    /// Ties are allowed; such an instance is flagged non-strict and has
    /// `eps = 0`. A single urn has no gap and is also non-strict.
    pub fn new(mut probs: Vec<T>) -> Result<Self> {
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
        probs.sort_by(|a, b| a.partial_cmp(b).expect("probabilities are comparable"));
        let eps = probs
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .reduce(scalar::min)
            .unwrap_or_else(T::zero);
        let strict = probs.len() >= 2 && eps > T::zero();
        Ok(Self { probs, eps, strict })
    }

    /// The evenly spaced family `p_i = (1 - eps (n-1)) / 2 + (i-1) eps`,
    /// symmetric about one half.
    pub fn lower_bound(n: usize, eps: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewUrns { min: 2, got: n });
        }
        if eps <= T::zero() {
            return Err(Error::NonPositiveSeparation(eps.to_f64_lossy()));
        }
        let span = eps.clone() * T::from_count(n - 1);
        if span > T::one() + T::stochastic_tolerance() {
            return Err(Error::SeparationTooLarge {
                eps: eps.to_f64_lossy(),
                limit: 1.0 / (n - 1) as f64,
            });
        }
        let start = (T::one() - span) * scalar::one_half();
        let probs = (0..n)
            .map(|i| {
                let p = start.clone() + eps.clone() * T::from_count(i);
                // Float rounding can push the end points a hair outside [0, 1].
                scalar::min(scalar::max(p, T::zero()), T::one())
            })
            .collect();
        Self::new(probs)
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, urn: Urn) -> &T {
        &self.probs[urn.offset()]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Smallest gap between consecutive sorted probabilities.
    pub fn eps(&self) -> &T {
        &self.eps
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn urn(&self, index: usize) -> Result<Urn> {
        Urn::new(index, self.len())
    }

    pub fn urns(&self) -> impl Iterator<Item = Urn> {
        (0..self.len()).map(Urn::from_offset)
    }

    /// Errors unless the instance has at least two urns and no ties.
    pub fn require_strict(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::TooFewUrns {
                min: 2,
                got: self.len(),
            });
        }
        if !self.strict {
            let i = self
                .probs
                .windows(2)
                .position(|w| w[0] == w[1])
                .unwrap_or(0);
            return Err(Error::NotStrict {
                first: i + 1,
                second: i + 2,
            });
        }
        Ok(())
    }

    pub fn to_f64(&self) -> BichromaticInstance<f64> {
        BichromaticInstance {
            probs: self.probs.iter().map(Scalar::to_f64_lossy).collect(),
            eps: self.eps.to_f64_lossy(),
            strict: self.strict,
        }
    }
}

/// Urns over `C >= 2` colors.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticolorInstance<T> {
    rows: Vec<Vec<T>>,
    eps_l1: T,
}

/// `sum_c |a_c - b_c|`.
pub fn l1_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (x.clone() - y.clone()).abs())
}

impl<T: Scalar> MulticolorInstance<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::TooFewUrns {
                min: 2,
                got: rows.len(),
            });
        }
        let colors = rows[0].len();
        if colors < 2 {
            return Err(Error::TooFewColors(colors));
        }
        let tol = T::stochastic_tolerance();
        for (row, values) in rows.iter().enumerate() {
            if values.len() != colors {
                return Err(Error::RaggedRows {
                    row: row + 1,
                    got: values.len(),
                    expected: colors,
                });
            }
            if values.iter().any(|v| *v < T::zero()) {
                return Err(Error::NegativeEntry { row: row + 1 });
            }
            let total = scalar::sum(values);
            if !scalar::close(&total, &T::one(), &tol) {
                return Err(Error::NotStochastic {
                    row: row + 1,
                    sum: total.to_f64_lossy(),
                });
            }
        }
        let mut eps_l1: Option<T> = None;
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let d = l1_distance(&rows[i], &rows[j]);
                if d.is_zero() {
                    return Err(Error::DuplicateRows {
                        first: i + 1,
                        second: j + 1,
                    });
                }
                eps_l1 = Some(match eps_l1 {
                    Some(e) => scalar::min(e, d),
                    None => d,
                });
            }
        }
        Ok(Self {
            rows,
            eps_l1: eps_l1.expect("at least one pair"),
        })
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn colors(&self) -> usize {
        self.rows[0].len()
    }

    /// Minimum pairwise l1 distance between rows.
    pub fn eps(&self) -> &T {
        &self.eps_l1
    }

    /// Probability of color `color` (0-based) for every urn, in urn order.
    pub fn color_column(&self, color: usize) -> Vec<T> {
        self.rows.iter().map(|r| r[color].clone()).collect()
    }
}
