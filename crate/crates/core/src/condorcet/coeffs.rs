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

//! The `b_{k,l}` coefficients of the power series `B(x, P)` and their
//! companions `a_{k,l}` and `c_{k,l}`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::scalar::Scalar;

fn sign<T: Scalar>(exp: usize) -> T {
    if exp.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// `binom(n, k)` built by the multiplicative formula, exact for rationals.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_count(n - i) / T::from_count(i + 1);
    }
    acc
}

/// `c_{k,l} = (-1)^{k+l} binom(k+l, k) - ((-1)^l binom(k+l, k) + (-1)^{k+l} (l+1)) / (k+l+2)`.
pub fn coeff_c<T: Scalar>(k: usize, l: usize) -> T {
    let bin: T = binomial(k + l, k);
    let s_kl: T = sign(k + l);
    let s_l: T = sign(l);
    s_kl.clone() * bin.clone()
        - (s_l * bin + s_kl * T::from_count(l + 1)) / T::from_count(k + l + 2)
}

/// `C_n`, the coefficient of `P^n` in `1/(P+1) - sqrt((1-2P)/(1+2P))`.
pub fn series_rhs(n: usize) -> BigInt {
    let half = n / 2;
    let central = num_integer::binomial(BigInt::from(2 * half), BigInt::from(half));
    if n.is_multiple_of(2) {
        BigInt::one() - central
    } else {
        BigInt::from(2) * central - BigInt::one()
    }
}

/// All `b_{k,l}` with `k + l < diagonals`, filled one anti-diagonal at a
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable<T> {
    diagonals: usize,
    /// `b[k][l]`; row `k` holds `l = 0 .. diagonals - k - 1`.
    b: Vec<Vec<T>>,
}

impl<T: Scalar> CoeffTable<T> {
    pub fn new(diagonals: usize) -> Self {
        let mut b: Vec<Vec<T>> = Vec::with_capacity(diagonals);
        // b[i][j] / (i + 1), reused by both inner sums.
        let mut scaled: Vec<Vec<T>> = Vec::with_capacity(diagonals);
        for n in 0..diagonals {
            b.push(Vec::with_capacity(diagonals - n));
            scaled.push(Vec::with_capacity(diagonals - n));
            for k in 0..=n {
                let l = n - k;
                let mut acc = -coeff_c::<T>(k + 1, l);
                if k > 0 {
                    let km = k - 1;
                    for s in 0..=km {
                        let mut inner = T::zero();
                        for i in 0..=s {
                            inner = inner + scaled[i][km - s].clone() * b[s - i][l].clone();
                        }
                        acc = acc + inner / T::from_count(s + 2);
                    }
                    for (i, row) in scaled.iter().enumerate().take(k) {
                        let term = row[l].clone();
                        if (km - i) % 2 == 0 {
                            acc = acc + term;
                        } else {
                            acc = acc - term;
                        }
                    }
                }
                let value = T::from_count(k + 1) * acc;
                scaled[k].push(value.clone() / T::from_count(k + 1));
                b[k].push(value);
            }
        }
        Self { diagonals, b }
    }

    /// A table large enough for every `b_{k,l}` with `k <= max_k`, `l <= max_l`.
    pub fn with_extent(max_k: usize, max_l: usize) -> Self {
        Self::new(max_k + max_l + 1)
    }

    pub fn diagonals(&self) -> usize {
        self.diagonals
    }

    pub fn covers(&self, k: usize, l: usize) -> bool {
        k + l < self.diagonals
    }

    /// `b_{k,l}`; panics outside the computed triangle.
    pub fn b(&self, k: usize, l: usize) -> &T {
        assert!(
            self.covers(k, l),
            "b({k},{l}) outside {} diagonals",
            self.diagonals
        );
        &self.b[k][l]
    }

    pub fn get_b(&self, k: usize, l: usize) -> Option<&T> {
        self.b.get(k).and_then(|row| row.get(l))
    }

    /// `a_{k,l} = sum_{i=0..l} binom(k+2, i) b_{k,l-i}`.
    pub fn a(&self, k: usize, l: usize) -> T {
        (0..=l).fold(T::zero(), |acc, i| {
            acc + binomial::<T>(k + 2, i) * self.b(k, l - i).clone()
        })
    }

    /// `sum_{k=0..n} b_{k,n-k} / (k+1)`, conjectured to equal `C_{n+1}`.
    pub fn diagonal_sum(&self, n: usize) -> T {
        (0..=n).fold(T::zero(), |acc, k| {
            acc + self.b(k, n - k).clone() / T::from_count(k + 1)
        })
    }

    /// `g_k(P) = sum_l b_{k,l} P^l` for `k = 0 .. diagonals - 1`, so that
    /// `B(u, P) = sum_k g_k(P) u^k` on the computed triangle.
    pub fn row_polynomials(&self, big_p: &T) -> Vec<T> {
        self.b
            .iter()
            .map(|row| {
                row.iter()
                    .rev()
                    .fold(T::zero(), |acc, v| acc * big_p.clone() + v.clone())
            })
            .collect()
    }

    /// Sum of `|b_{k,l}| u^k P^l` over the last computed diagonal.
    pub fn last_diagonal_magnitude(&self, u: f64, big_p: f64) -> f64 {
        let Some(n) = self.diagonals.checked_sub(1) else {
            return 0.0;
        };
        (0..=n)
            .map(|k| {
                self.b[k][n - k].to_f64_lossy().abs()
                    * u.powi(k as i32)
                    * big_p.powi((n - k) as i32)
            })
            .sum()
    }
}

/// One table entry in serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CoeffEntry {
    pub k: usize,
    pub l: usize,
    pub b: String,
    /// `a_{k,l}`; present for `l <= k`.
    pub a: Option<String>,
}

impl CoeffTable<crate::scalar::Rational> {
    pub fn entries(&self, max_k: usize, max_l: usize) -> Vec<CoeffEntry> {
        let mut out = Vec::new();
        for k in 0..=max_k {
            for l in 0..=max_l {
                out.push(CoeffEntry {
                    k,
                    l,
                    b: self.b(k, l).to_string(),
                    a: (l <= k).then(|| self.a(k, l).to_string()),
                });
            }
        }
        out
    }
}
