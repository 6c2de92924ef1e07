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

//! The random variables `X_p` whose orderings give permutations with
//! pairwise marginals `min(1, 1/(p_i + p_j))`.
//!
//! For `p <= 1/2` the variable is the constant `p`. Above one half it
//! mixes the density `(p + x)^-2` on `[1 - p, 1/2]`, the series density
//! `B(x - 1/2, p - 1/2)` on `(1/2, p)` and a point mass at `p`. The series
//! part rests on an open conjecture, so it is evaluated from a truncated
//! table and its numerical health is reported by [`conjecture_scan`].

use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::coeffs::CoeffTable;
use crate::error::{Error, Result};

/// Number of anti-diagonals of `b_{k,l}` kept in the series.
pub const DEFAULT_TERMS: usize = 200;
/// Resolution of the tabulated `beta` CDF.
pub const GRID_STEP: f64 = 1e-3;
pub const MIN_SCAN_TERMS: usize = 50;

/// The float table with [`DEFAULT_TERMS`] diagonals, built on first use.
pub fn default_series() -> &'static CoeffTable<f64> {
    static TABLE: OnceLock<CoeffTable<f64>> = OnceLock::new();
    TABLE.get_or_init(|| CoeffTable::new(DEFAULT_TERMS))
}

/// `Pr[X_p <= X_q] = min(1, 1 / (p + q))` for `p < q`.
pub fn pairwise_marginal(p: f64, q: f64) -> f64 {
    (1.0 / (p + q)).min(1.0)
}

/// `sqrt(1/p - 1)` above one half, `1` otherwise.
pub fn analytic_point_mass(p: f64) -> f64 {
    if p > 0.5 {
        (1.0 / p - 1.0).sqrt()
    } else {
        1.0
    }
}

/// `(2p - 1) / (2p + 1)`, the mass of the `alpha` part.
pub fn alpha_mass(p: f64) -> f64 {
    if p > 0.5 {
        (2.0 * p - 1.0) / (2.0 * p + 1.0)
    } else {
        0.0
    }
}

/// `(y - 1 + p) / (y + p)` on `[1 - p, 1/2]`.
pub fn alpha_cdf(p: f64, y: f64) -> f64 {
    let y = y.clamp(1.0 - p, 0.5);
    (y - 1.0 + p) / (y + p)
}

/// Truncated series for `beta_p` at `u = y - 1/2`.
#[derive(Debug, Clone)]
struct BetaSeries {
    rows: Vec<f64>,
}

impl BetaSeries {
    fn new(p: f64, table: &CoeffTable<f64>) -> Self {
        Self {
            rows: table.row_polynomials(&(p - 0.5)),
        }
    }

    fn density(&self, u: f64) -> f64 {
        self.rows.iter().rev().fold(0.0, |acc, g| acc * u + g)
    }

    fn cdf(&self, u: f64) -> f64 {
        let inner = self
            .rows
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (k, g)| acc * u + g / (k + 1) as f64);
        inner * u
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Mixture {
    alpha_mass: f64,
    beta_mass: f64,
    point_mass: f64,
    ys: Vec<f64>,
    cdf: Vec<f64>,
}

/// Sampler for `X_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct XpSampler {
    p: f64,
    mixture: Option<Mixture>,
}

impl XpSampler {
    pub fn new(p: f64) -> Result<Self> {
        Self::with_series(p, default_series())
    }

    pub fn with_series(p: f64, table: &CoeffTable<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange { index: 0, value: p });
        }
        if p <= 0.5 {
            return Ok(Self { p, mixture: None });
        }
        let series = BetaSeries::new(p, table);
        let steps = ((p - 0.5) / GRID_STEP).ceil().max(1.0) as usize;
        let mut ys = Vec::with_capacity(steps + 1);
        let mut cdf = Vec::with_capacity(steps + 1);
        let mut running = 0.0f64;
        for i in 0..=steps {
            let y = if i == steps {
                p
            } else {
                0.5 + i as f64 * GRID_STEP
            };
            running = running.max(series.cdf(y - 0.5));
            ys.push(y);
            cdf.push(running);
        }
        let alpha_mass = alpha_mass(p);
        let mut beta_mass = *cdf.last().expect("non-empty grid");
        if alpha_mass + beta_mass > 1.0 {
            let scale = (1.0 - alpha_mass) / beta_mass;
            cdf.iter_mut().for_each(|c| *c *= scale);
            beta_mass = 1.0 - alpha_mass;
        }
        let point_mass = (1.0 - alpha_mass - beta_mass).max(0.0);
        Ok(Self {
            p,
            mixture: Some(Mixture {
                alpha_mass,
                beta_mass,
                point_mass,
                ys,
                cdf,
            }),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Point mass at `p` used when sampling; it absorbs whatever the
    /// tabulated `alpha` and `beta` parts leave over.
    pub fn point_mass(&self) -> f64 {
        self.mixture.as_ref().map_or(1.0, |m| m.point_mass)
    }

    pub fn alpha_mass(&self) -> f64 {
        self.mixture.as_ref().map_or(0.0, |m| m.alpha_mass)
    }

    pub fn beta_mass(&self) -> f64 {
        self.mixture.as_ref().map_or(0.0, |m| m.beta_mass)
    }

    /// Tabulated CDF of the `beta` part at `y`, interpolated linearly.
    pub fn beta_cdf(&self, y: f64) -> f64 {
        let Some(m) = &self.mixture else {
            return 0.0;
        };
        if y <= 0.5 {
            return 0.0;
        }
        if y >= self.p {
            return m.beta_mass;
        }
        let hi = m.ys.partition_point(|v| *v <= y).min(m.ys.len() - 1);
        let lo = hi - 1;
        let t = (y - m.ys[lo]) / (m.ys[hi] - m.ys[lo]);
        m.cdf[lo] + t * (m.cdf[hi] - m.cdf[lo])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let Some(m) = &self.mixture else {
            return self.p;
        };
        let u: f64 = rng.random();
        if u < m.alpha_mass {
            return (1.0 - self.p + u * self.p) / (1.0 - u);
        }
        let v = u - m.alpha_mass;
        if v >= m.beta_mass {
            return self.p;
        }
        let hi = m.cdf.partition_point(|c| *c <= v).clamp(1, m.cdf.len() - 1);
        let lo = hi - 1;
        let width = m.cdf[hi] - m.cdf[lo];
        if width <= 0.0 {
            return m.ys[lo];
        }
        m.ys[lo] + (v - m.cdf[lo]) / width * (m.ys[hi] - m.ys[lo])
    }
}

/// One line of a conjecture scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: f64,
    /// Smallest value of the truncated `beta_p` on the grid.
    pub min_beta: f64,
    /// `|gamma_p + int alpha_p + int beta_p - 1|` with the truncated series.
    pub mass_residual: f64,
    /// Size of the last kept diagonal at `x = p`.
    pub tail_at_k: f64,
}

pub fn conjecture_scan(p_grid: &[f64], x_step: f64, terms: usize) -> Result<Vec<ScanRow>> {
    if terms < MIN_SCAN_TERMS {
        return Err(Error::TooFewTerms {
            min: MIN_SCAN_TERMS,
            got: terms,
        });
    }
    if x_step.is_nan() || x_step <= 0.0 {
        return Err(Error::NonPositiveSeparation(x_step));
    }
    for (index, &p) in p_grid.iter().enumerate() {
        if !(p > 0.5 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange { index, value: p });
        }
    }
    let table = CoeffTable::<f64>::new(terms);
    Ok(p_grid
        .iter()
        .map(|&p| {
            let series = BetaSeries::new(p, &table);
            let big_p = p - 0.5;
            let steps = (big_p / x_step).ceil() as usize;
            let min_beta = (0..=steps)
                .map(|i| series.density((i as f64 * x_step).min(big_p)))
                .fold(f64::INFINITY, f64::min);
            let mass = analytic_point_mass(p) + alpha_mass(p) + series.cdf(big_p);
            ScanRow {
                p,
                min_beta,
                mass_residual: (mass - 1.0).abs(),
                tail_at_k: table.last_diagonal_magnitude(big_p, big_p),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn low_probabilities_are_constant() {
        let s = XpSampler::new(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| s.sample(&mut rng) == 0.3));
        assert_eq!(s.point_mass(), 1.0);
        assert!(XpSampler::new(1.2).is_err());
    }

    #[test]
    fn alpha_part_closed_forms() {
        let p = 0.75;
        assert!((alpha_cdf(p, 0.5) - alpha_mass(p)).abs() < 1e-15);
        assert_eq!(alpha_cdf(p, 0.25), 0.0);
        // Masses telescope: alpha + (2/(2p+1) - gamma) + gamma = 1.
        let beta = 2.0 / (2.0 * p + 1.0) - analytic_point_mass(p);
        assert!((alpha_mass(p) + beta + analytic_point_mass(p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beta_density_starts_where_alpha_ends() {
        for p in [0.6, 0.75, 0.9] {
            let series = BetaSeries::new(p, default_series());
            let alpha_end = (p + 0.5f64).powi(-2);
            assert!((series.density(0.0) - alpha_end).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn tabulated_masses_are_consistent() {
        for p in [0.55, 0.75, 0.9, 0.95] {
            let s = XpSampler::new(p).unwrap();
            let total = s.alpha_mass() + s.beta_mass() + s.point_mass();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(
                (s.point_mass() - analytic_point_mass(p)).abs() < 1e-3,
                "p = {p}"
            );
            assert!((s.beta_cdf(p) - s.beta_mass()).abs() < 1e-15);
        }
    }

    #[test]
    fn samples_stay_in_support() {
        let s = XpSampler::new(0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = s.sample(&mut rng);
            assert!((0.2..=0.8).contains(&x));
        }
    }

    #[test]
    fn scan_rejects_bad_input() {
        assert!(conjecture_scan(&[0.7], 1e-3, 10).is_err());
        assert!(conjecture_scan(&[0.4], 1e-3, 60).is_err());
        let rows = conjecture_scan(&[0.6, 0.75], 1e-3, 60).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows
            .iter()
            .all(|r| r.min_beta > 0.0 && r.mass_residual < 1e-3));
    }
}
