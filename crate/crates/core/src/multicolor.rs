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

//! Many colors, reduced to the landmark scheme.
//!
//! A voter picks a color `c` uniformly and a resolution level `t` with
//! `Pr[t] = 3^(t-T) / alpha`, then views every urn as a two-color urn
//! ("`c`" versus "anything else"). For each `(c, t)` a landmark grid is
//! derived from the urns' `c`-probabilities by a marking sweep at scale
//! `3^-t eps`, followed by refinement and edge padding, and the voter runs
//! [`FlexibleScheme`] on it. Averaging over `(c, t)` gives the vote kernel.

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{ceil_voters, check_eta, check_scale};
use crate::error::{Error, Result};
use crate::landmarks::{FlexibleScheme, LandmarkSet, MIN_LANDMARKS};
use crate::model::MulticolorInstance;
use crate::scalar::{self, Scalar};

/// Distribution of the resolution level `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtLevelDistribution<T> {
    /// `T = ceil(log_3 C) + 1`.
    pub max_level: u32,
    /// `alpha = sum_{i=0..T} 3^-i`.
    pub alpha: T,
    /// `Pr[t = i] = 3^(i-T) / alpha` for `i = 0..=T`.
    pub level_probs: Vec<T>,
}

/// `ceil(log_3 colors)` computed on integers.
fn ceil_log3(colors: usize) -> u32 {
    let mut t = 0;
    let mut pow = 1usize;
    while pow < colors {
        pow *= 3;
        t += 1;
    }
    t
}

impl<T: Scalar> CtLevelDistribution<T> {
    pub fn new(colors: usize) -> Self {
        let max_level = ceil_log3(colors) + 1;
        let three = T::from_count(3);
        let alpha = (0..=max_level).fold(T::zero(), |acc, i| acc + three.inv_pow(i));
        let level_probs = (0..=max_level)
            .map(|i| three.inv_pow(max_level - i) / alpha.clone())
            .collect();
        Self {
            max_level,
            alpha,
            level_probs,
        }
    }
}

/// Marking sweep over one color's probabilities at scale `3^-t eps`.
///
/// Starts from `w = [0]` and marks every value closer than the scale to
/// it. The smallest unmarked value becomes the next mark, and so on. The list is closed with `1`;
/// when the last mark lies closer than the scale to `1` it is moved to `1`
/// instead, so consecutive marks stay at least one scale apart.
pub fn marking_algorithm<T: Scalar>(probs: &[T], t: u32, eps: &T) -> Vec<T> {
    let scale = eps.clone() * T::from_count(3).inv_pow(t);
    let mut sorted: Vec<T> = probs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    let mut w = vec![T::zero()];
    // Values are swept in increasing order, so "smallest unmarked" is the
    // first value past the marked prefix.
    let mut next = sorted.partition_point(|p| *p < scale);
    while next < sorted.len() {
        let mark = sorted[next].clone();
        next += sorted[next..].partition_point(|p| p.clone() - mark.clone() < scale);
        w.push(mark);
    }
    let last = w.last().expect("non-empty").clone();
    if !last.is_one() {
        if w.len() > 1 && T::one() - last < scale {
            *w.last_mut().expect("non-empty") = T::one();
        } else {
            w.push(T::one());
        }
    }
    w
}

/// The landmark grid used by voters who drew color `color` and level `level`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtInstance<T> {
    /// 1-based color.
    pub color: usize,
    pub level: u32,
    /// Output of the marking sweep, before padding.
    pub marks: Vec<T>,
    /// Marks after the ninth-point padding.
    pub padded_marks: Vec<T>,
    pub landmarks: LandmarkSet<T>,
    /// Minimum gap of the refined marks; the final grid keeps it.
    pub eps_ct: T,
}

impl<T: Scalar> CtInstance<T> {
    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }
}

fn min_gap<T: Scalar>(points: &[T]) -> T {
    points
        .windows(2)
        .map(|w| w[1].clone() - w[0].clone())
        .reduce(scalar::min)
        .expect("at least two points")
}

/// Builds the `(c, t)` landmark grid. `color` is 1-based.
pub fn build_ct_landmarks<T: Scalar>(
    inst: &MulticolorInstance<T>,
    color: usize,
    level: u32,
) -> Result<CtInstance<T>> {
    let colors = inst.colors();
    if color == 0 || color > colors {
        return Err(Error::ColorOutOfRange { color, colors });
    }
    let max_level = ceil_log3(colors) + 1;
    if level > max_level {
        return Err(Error::LevelOutOfRange {
            level,
            max: max_level,
        });
    }
    let column = inst.color_column(color - 1);
    let marks = marking_algorithm(&column, level, inst.eps());

    let mut padded = marks.clone();
    if padded.len() < MIN_LANDMARKS {
        let mut widest = 0;
        for i in 1..padded.len() - 1 {
            if padded[i + 1].clone() - padded[i].clone()
                > padded[widest + 1].clone() - padded[widest].clone()
            {
                widest = i;
            }
        }
        let lo = padded[widest].clone();
        let step = (padded[widest + 1].clone() - lo.clone()) / T::from_count(9);
        let ninths: Vec<T> = (1..=8)
            .map(|s| lo.clone() + step.clone() * T::from_count(s))
            .collect();
        padded.splice(widest + 1..widest + 1, ninths);
    }

    let three = T::from_count(3);
    let two = T::from_count(2);
    let mut y = Vec::with_capacity(3 * padded.len());
    for pair in padded.windows(2) {
        let (a, b) = (pair[0].clone(), pair[1].clone());
        y.push(a.clone());
        y.push((two.clone() * a.clone() + b.clone()) / three.clone());
        y.push((a + two.clone() * b) / three.clone());
    }
    y.push(padded.last().expect("non-empty").clone());
    let eps_ct = min_gap(&y);
    let two_eps = two * eps_ct.clone();

    loop {
        let mut changed = false;
        // Lower edge: first too-wide gap among the first ceil(n'/3).
        loop {
            let n = y.len();
            let limit = n.div_ceil(3).min(n - 1);
            match (1..=limit).find(|&i| y[i].clone() - y[i - 1].clone() > two_eps) {
                Some(i) => {
                    let v = y[i - 1].clone() + eps_ct.clone();
                    y.insert(i, v);
                    changed = true;
                }
                None => break,
            }
        }
        // Upper edge: last too-wide gap from floor(2n'/3) on.
        loop {
            let n = y.len();
            let from = (2 * n / 3).max(1);
            match (from..n)
                .rev()
                .find(|&i| y[i].clone() - y[i - 1].clone() > two_eps)
            {
                Some(i) => {
                    let v = y[i].clone() - eps_ct.clone();
                    y.insert(i, v);
                    changed = true;
                }
                None => break,
            }
        }
        if !changed {
            break;
        }
    }

    let landmarks = LandmarkSet::new(y)?;
    Ok(CtInstance {
        color,
        level,
        marks,
        padded_marks: padded,
        landmarks,
        eps_ct,
    })
}

/// Exact mixture of the per-`(c, t)` flexible schemes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MulticolorKernel<T> {
    pub levels: CtLevelDistribution<T>,
    /// Grids in `(c, t)` lexicographic order.
    pub instances: Vec<CtInstance<T>>,
    /// `matrix[i][j] = Pr[vote for j | urn i is the unknown one]`.
    pub matrix: Vec<Vec<T>>,
}

impl<T: Scalar> MulticolorKernel<T> {
    pub fn build(inst: &MulticolorInstance<T>) -> Result<Self> {
        let colors = inst.colors();
        let levels = CtLevelDistribution::<T>::new(colors);
        let pairs: Vec<(usize, u32)> = (1..=colors)
            .flat_map(|c| (0..=levels.max_level).map(move |t| (c, t)))
            .collect();
        let parts: Vec<(CtInstance<T>, Vec<Vec<T>>)> = pairs
            .par_iter()
            .map(|&(c, t)| {
                let ct = build_ct_landmarks(inst, c, t)?;
                let column = inst.color_column(c - 1);
                let scheme = FlexibleScheme::build(&column, &ct.landmarks)?;
                Ok((ct, scheme.kernel()))
            })
            .collect::<Result<_>>()?;
        let n = inst.len();
        let color_weight = T::one() / T::from_count(colors);
        let mut matrix = vec![vec![T::zero(); n]; n];
        let mut instances = Vec::with_capacity(parts.len());
        for (ct, part) in parts {
            let w = color_weight.clone() * levels.level_probs[ct.level as usize].clone();
            for (row, part_row) in matrix.iter_mut().zip(&part) {
                for (cell, v) in row.iter_mut().zip(part_row) {
                    *cell = cell.clone() + w.clone() * v.clone();
                }
            }
            instances.push(ct);
        }
        Ok(Self {
            levels,
            instances,
            matrix,
        })
    }

    /// `matrix[i][i] - matrix[i][j]` for 1-based urns.
    pub fn margin(&self, i: usize, j: usize) -> T {
        self.matrix[i - 1][i - 1].clone() - self.matrix[i - 1][j - 1].clone()
    }
}

/// Guaranteed kernel margin `eps / (26730 C T n^2)`.
pub fn kernel_margin_floor<T: Scalar>(inst: &MulticolorInstance<T>) -> T {
    let colors = inst.colors();
    let max_level = ceil_log3(colors) + 1;
    let n = inst.len();
    inst.eps().clone()
        / (T::from_count(26_730)
            * T::from_count(colors)
            * T::from_count(max_level as usize)
            * T::from_count(n * n))
}

/// Colors (0-based) on which urns `i` and `j` (0-based) differ by more than
/// `eps / (3C)`.
pub fn useful_colors<T: Scalar>(inst: &MulticolorInstance<T>, i: usize, j: usize) -> Vec<usize> {
    let threshold = inst.eps().clone() / T::from_count(3 * inst.colors());
    (0..inst.colors())
        .filter(|&c| (inst.rows()[i][c].clone() - inst.rows()[j][c].clone()).abs() > threshold)
        .collect()
}

/// Smallest level `t >= 0` with `|p_ic - p_jc| >= eps 3^-t`, if any.
pub fn separating_level<T: Scalar>(
    inst: &MulticolorInstance<T>,
    i: usize,
    j: usize,
    color: usize,
) -> Option<u32> {
    let diff = (inst.rows()[i][color].clone() - inst.rows()[j][color].clone()).abs();
    if diff.is_zero() {
        return None;
    }
    let three = T::from_count(3);
    (0..).find(|&t| diff >= inst.eps().clone() * three.inv_pow(t))
}

pub const MULTICOLOR_BUDGET_CONSTANT: f64 = 7e12;

/// `ceil(scale * 7e12 * C^2 T^2 n^3 / eps^2 * ln(n / eta))`.
pub fn multicolor_budget<T: Scalar>(
    inst: &MulticolorInstance<T>,
    eta: f64,
    scale: f64,
) -> Result<u64> {
    check_eta(eta)?;
    check_scale(scale)?;
    let c = inst.colors() as f64;
    let t = (ceil_log3(inst.colors()) + 1) as f64;
    let n = inst.len() as f64;
    let eps = inst.eps().to_f64_lossy();
    ceil_voters(
        scale * MULTICOLOR_BUDGET_CONSTANT * c * c * t * t * n.powi(3) / (eps * eps)
            * (n / eta).ln(),
    )
}
