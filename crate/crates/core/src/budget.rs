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

//! Shared helpers for the voter-budget formulas.

use crate::error::{Error, Result};

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(Error::EtaOutOfRange(eta))
    }
}

pub(crate) fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveScale(scale))
    }
}

/// Rounds a positive real voter count up to an integer.
pub(crate) fn ceil_voters(x: f64) -> Result<u64> {
    let c = x.ceil();
    if !c.is_finite() || c >= u64::MAX as f64 {
        return Err(Error::BudgetOverflow(x));
    }
    Ok((c as u64).max(1))
}
