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

//! Voting strategies that let a crowd of independently informed voters
//! elect an unknown urn, and a seeded Monte Carlo engine that measures how
//! often they succeed.
//!
//! Each voter draws one ball from the unknown urn and votes according to a
//! randomized strategy shared by everybody. The crate builds such
//! strategies for several voting systems:
//!
//! * [`plurality`]: two colors, one named urn per voter;
//! * [`landmarks`]: the same idea on a landmark grid, tolerating urns with
//!   equal blue fractions;
//! * [`multicolor`]: many colors, reduced to the landmark scheme by mixing
//!   over a random color and resolution level;
//! * [`scoring`]: strategies induced by a proper scoring rule;
//! * [`cumulative`]: every voter splits one unit of weight;
//! * [`condorcet`]: every voter submits a full ranking.
//!
//! [`engine`] simulates elections under any of them.

mod budget;
pub mod condorcet;
pub mod cumulative;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod io;
pub mod landmarks;
pub mod model;
pub mod multicolor;
pub mod plurality;
pub mod scalar;
pub mod scoring;
pub mod stats;

pub use error::{Error, Result};
pub use model::{BichromaticInstance, MulticolorInstance, Urn};
pub use scalar::{Rational, Scalar};
