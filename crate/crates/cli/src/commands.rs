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

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use urnvote::condorcet::{conjecture_scan as scan, CoeffTable};
use urnvote::experiment::{
    efficiency_experiment, run_experiment, scaling_study as study, simulate as run_simulation,
    voter_budget, ExperimentConfig, SimulationRequest, Voters,
};
use urnvote::io::{
    load_instance, matrix_to_csv, parse_value, to_csv, write_file, Instance, StatsReport,
    SCHEMA_VERSION,
};
use urnvote::landmarks::{FlexibleScheme, LandmarkSet};
use urnvote::multicolor::MulticolorKernel;
use urnvote::plurality::PluralityScheme;
use urnvote::scalar::{parse_rational, Rational};
use urnvote::scoring::{check_proper_on_grid, Brier, InducedScheme};
use urnvote::{BichromaticInstance, Scalar};

use crate::{
    BudgetArgs, CoeffsArgs, Format, KernelArgs, KernelSystem, RunArgs, ScalingArgs, ScanArgs,
    SchemeArgs, SchemeKind, ScoringArgs, SimulateArgs,
};

/// A checked property of the output did not hold.
#[derive(Debug)]
pub struct InvariantViolation(pub String);

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invariant violated: {}", self.0)
    }
}

impl std::error::Error for InvariantViolation {}

fn violation(msg: impl Into<String>) -> anyhow::Error {
    InvariantViolation(msg.into()).into()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

fn two_color(path: &Path) -> Result<BichromaticInstance<Rational>> {
    match load_instance(path)? {
        Instance::Bichromatic(b) => Ok(b),
        Instance::Multicolor(_) => bail!(
            "{} holds a multicolor instance; expected \"probs\"",
            path.display()
        ),
    }
}

fn load_landmarks(path: Option<&Path>) -> Result<LandmarkSet<Rational>> {
    let path = path.context("--landmarks is required for the flexible scheme")?;
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let doc: Value = serde_json::from_str(&text)?;
    let points = doc
        .get("landmarks")
        .and_then(Value::as_array)
        .context("landmark file needs a \"landmarks\" array")?
        .iter()
        .map(parse_value)
        .collect::<urnvote::Result<Vec<_>>>()?;
    Ok(LandmarkSet::new(points)?)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(t) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(f)),
        None => Ok(f()),
    }
}

pub fn scheme(a: SchemeArgs) -> Result<()> {
    let inst = two_color(&a.instance)?;
    let doc = match a.kind {
        SchemeKind::Plurality => {
            let s = PluralityScheme::build(&inst)?;
            json!({
                "schema": SCHEMA_VERSION,
                "kind": "plurality",
                "probs": strings(inst.probs()),
                "eps": inst.eps().to_string(),
                "b": strings(&s.b),
                "r": strings(&s.r),
                "M": s.m_norm.to_string(),
                "blue_votes": strings(&s.blue_votes),
                "red_votes": strings(&s.red_votes),
            })
        }
        SchemeKind::Flexible => {
            let lms = load_landmarks(a.landmarks.as_deref())?;
            let s = FlexibleScheme::build(inst.probs(), &lms)?;
            json!({
                "schema": SCHEMA_VERSION,
                "kind": "flexible",
                "probs": strings(&s.probs),
                "landmarks": strings(lms.points()),
                "phi": s.phi,
                "multiplicity": s.multiplicity,
                "b": strings(&s.b),
                "r": strings(&s.r),
                "M": s.m_norm.to_string(),
                "blue_votes": strings(&s.blue_votes),
                "red_votes": strings(&s.red_votes),
            })
        }
    };
    emit(a.out.as_deref(), &pretty(&doc))
}

/// Rows must be distributions and each urn must lead its own row.
fn check_kernel(matrix: &[Vec<Rational>], classes: &[usize]) -> Result<()> {
    let one = Rational::from_integer(1.into());
    for (i, row) in matrix.iter().enumerate() {
        if row
            .iter()
            .fold(Rational::from_integer(0.into()), |acc, v| acc + v)
            != one
        {
            return Err(violation(format!("kernel row {} does not sum to 1", i + 1)));
        }
        for (j, v) in row.iter().enumerate() {
            if classes[i] != classes[j] && *v >= row[i] {
                return Err(violation(format!(
                    "urn {} does not lead urn {} in its own row",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

pub fn kernel(a: KernelArgs) -> Result<()> {
    let (name, matrix, classes) = match a.system {
        KernelSystem::Plurality => {
            let inst = two_color(&a.instance)?;
            let k = PluralityScheme::build(&inst)?.kernel(&inst);
            ("plurality", k, (0..inst.len()).collect())
        }
        KernelSystem::Scoring => {
            let inst = two_color(&a.instance)?;
            let k = InducedScheme::build(&inst, &Brier)?.kernel(&inst);
            ("scoring", k, (0..inst.len()).collect())
        }
        KernelSystem::Flexible => {
            let inst = two_color(&a.instance)?;
            let s = FlexibleScheme::build(inst.probs(), &load_landmarks(a.landmarks.as_deref())?)?;
            // Urns sharing a landmark vote identically.
            ("flexible", s.kernel(), s.phi.clone())
        }
        KernelSystem::Multicolor => {
            let rows = match load_instance(&a.instance)? {
                Instance::Multicolor(m) => m,
                Instance::Bichromatic(_) => {
                    bail!("the multicolor kernel needs a \"rows\" instance")
                }
            };
            let k = MulticolorKernel::build(&rows)?.matrix;
            ("multicolor", k, (0..rows.len()).collect::<Vec<_>>())
        }
    };
    let text: Vec<Vec<String>> = matrix.iter().map(|r| strings(r)).collect();
    let out = match a.format {
        Format::Csv => matrix_to_csv(&text)?,
        Format::Json => {
            pretty(&json!({ "schema": SCHEMA_VERSION, "system": name, "kernel": text }))
        }
    };
    emit(a.out.as_deref(), &out)?;
    check_kernel(&matrix, &classes)
}

fn check_report(report: &StatsReport) -> Result<()> {
    let s = &report.stats;
    let in_range = (0.0..=1.0).contains(&s.rate);
    let covered = s.ci95[0] <= s.rate && s.rate <= s.ci95[1];
    if !in_range || !covered || s.failures > s.trials {
        return Err(violation(format!("inconsistent statistics {s:?}")));
    }
    Ok(())
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let voters = match (a.m, a.eta) {
        (Some(m), None) => Voters::Fixed(m),
        (None, Some(eta)) => Voters::Budget {
            eta,
            scale: a.scale.unwrap_or(1.0),
        },
        _ => bail!("give exactly one of --m and --eta"),
    };
    let report = run_simulation(
        &inst,
        &SimulationRequest {
            system: a.system,
            voters,
            trials: a.trials,
            seed: a.seed,
            true_urn: a.true_urn,
            threads: a.threads,
        },
    )?;
    emit(a.out.as_deref(), &report.to_json())?;
    check_report(&report)
}

pub fn coeffs(a: CoeffsArgs) -> Result<()> {
    let table = CoeffTable::<Rational>::with_extent(a.max_k, a.max_l);
    let entries = table.entries(a.max_k, a.max_l);
    let out = match a.format {
        Format::Csv => to_csv(&entries)?,
        Format::Json => pretty(&json!({ "schema": SCHEMA_VERSION, "entries": entries })),
    };
    emit(a.out.as_deref(), &out)?;
    for n in 0..table.diagonals() {
        let rhs = Rational::from_integer(urnvote::condorcet::series_rhs(n + 1));
        if table.diagonal_sum(n) != rhs {
            return Err(violation(format!("diagonal identity fails at n = {n}")));
        }
    }
    Ok(())
}

/// Expands `start:stop:step` into a grid that includes `stop` when it is
/// hit up to rounding.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        bail!("expected start:stop:step, got {text:?}");
    };
    let parse = |s: &str| -> Result<Rational> {
        parse_rational(s).with_context(|| format!("bad number {s:?}"))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if step <= Rational::from_integer(0.into()) {
        bail!("step must be positive");
    }
    let mut grid = Vec::new();
    let mut p = start;
    while p <= stop {
        grid.push(p.to_f64_lossy());
        p += step.clone();
    }
    Ok(grid)
}

pub fn conjecture_scan(a: ScanArgs) -> Result<()> {
    let rows = scan(&parse_range(&a.p)?, a.x_step, a.terms)?;
    emit(a.out.as_deref(), &to_csv(&rows)?)
}

pub fn scoring_experiment(a: ScoringArgs) -> Result<()> {
    check_proper_on_grid(&Brier, 20).map_err(|e| violation(e.to_string()))?;
    let eps = a
        .eps
        .iter()
        .map(|s| parse_rational(s).with_context(|| format!("bad separation {s:?}")))
        .collect::<Result<Vec<_>>>()?;
    let rows = with_threads(a.threads, || {
        efficiency_experiment(a.n, &eps, a.target, a.trials, a.seed)
    })??;
    emit(a.out.as_deref(), &to_csv(&rows)?)
}

pub fn scaling_study(a: ScalingArgs) -> Result<()> {
    let report = with_threads(a.threads, || study(&a.n, a.target, a.trials, a.seed))??;
    emit(a.out.as_deref(), &to_csv(&report.rows)?)?;
    match report.slope {
        Some(s) => eprintln!(
            "log-log slope {s:.3} (asymptotic exponent {})",
            report.theoretical_slope
        ),
        None => eprintln!("log-log slope unavailable (need two sizes)"),
    }
    let increasing = report.rows.windows(2).all(|w| w[0].min_m <= w[1].min_m);
    if !increasing {
        eprintln!("note: minimal electorate is not monotone in n at this trial count");
    }
    Ok(())
}

pub fn budget(a: BudgetArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let m = voter_budget(a.system, &inst, a.eta, a.scale)?;
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "system": a.system.name(),
        "eta": a.eta,
        "scale": a.scale,
        "m": m,
    });
    emit(None, &pretty(&doc))
}

pub fn run(a: RunArgs) -> Result<()> {
    let mut config = ExperimentConfig::load(&a.config)?;
    if config.threads.is_none() {
        config.threads = a.threads;
    }
    let report = run_experiment(&config)?;
    if config.out.is_none() {
        print!("{}", report.to_json());
    }
    check_report(&report)
}
