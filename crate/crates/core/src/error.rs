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

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised while building instances, schemes and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("instance is empty")]
    EmptyInstance,
    #[error("probability {value} at position {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("instance needs at least {min} urns, got {got}")]
    TooFewUrns { min: usize, got: usize },
    #[error("instance is not strict: urns {first} and {second} share the same blue fraction")]
    NotStrict { first: usize, second: usize },
    #[error("separation {eps} exceeds the pigeonhole limit 1/(n-1) = {limit}")]
    SeparationTooLarge { eps: f64, limit: f64 },
    #[error("separation must be positive, got {0}")]
    NonPositiveSeparation(f64),
    #[error("row {row} does not sum to 1 (sum = {sum})")]
    NotStochastic { row: usize, sum: f64 },
    #[error("row {row} has a negative entry")]
    NegativeEntry { row: usize },
    #[error("rows {first} and {second} are identical")]
    DuplicateRows { first: usize, second: usize },
    #[error("row {row} has {got} colors, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("need at least 2 colors, got {0}")]
    TooFewColors(usize),
    #[error("urn index {index} is outside 1..={n}")]
    UrnOutOfRange { index: usize, n: usize },
    #[error("margin is undefined for identical urns ({0})")]
    SameUrn(usize),
    #[error("confidence parameter eta must lie in (0, 1), got {0}")]
    EtaOutOfRange(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("voter budget {0:e} does not fit in 64 bits")]
    BudgetOverflow(f64),
    #[error("landmark set needs at least 10 points, got {0}")]
    TooFewLandmarks(usize),
    #[error("landmarks must be strictly increasing inside [0, 1] (position {0})")]
    LandmarksNotIncreasing(usize),
    #[error("landmark condition ({condition}) violated at indices {indices:?}")]
    LandmarkCondition {
        condition: char,
        indices: Vec<usize>,
    },
    #[error("color {color} is outside 1..={colors}")]
    ColorOutOfRange { color: usize, colors: usize },
    #[error("level {level} is outside 0..={max}")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("duplicate probability {0} is not allowed for permutation sampling")]
    DuplicateProbability(f64),
    #[error("series truncation must keep at least {min} diagonals, got {got}")]
    TooFewTerms { min: usize, got: usize },
    #[error("scoring rule fails the properness check at z = {z} (argmax at x = {argmax})")]
    ImproperScoringRule { z: f64, argmax: f64 },
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
