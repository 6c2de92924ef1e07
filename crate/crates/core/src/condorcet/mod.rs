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

//! Condorcet voting: every voter submits a ranking drawn from a
//! distribution over permutations with prescribed pairwise marginals.

pub mod ballot;
pub mod coeffs;
pub mod sampler;

pub use ballot::{
    beat_probability, condorcet_ballot, condorcet_budget, sample_permutation, Color,
    CondorcetStrategy, PermutationBallot,
};
pub use coeffs::{coeff_c, series_rhs, CoeffEntry, CoeffTable};
pub use sampler::{conjecture_scan, pairwise_marginal, ScanRow, XpSampler, DEFAULT_TERMS};
