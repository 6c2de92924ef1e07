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

//! Acceptance suite. Runs every criterion in order, prints one line per
//! criterion and exits non-zero if any of them fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urnvote::condorcet::{sample_permutation, CoeffEntry, CoeffTable, XpSampler};
use urnvote::experiment::{
    efficiency_experiment, simulate, voter_budget, SimulationRequest, System, Voters,
};
use urnvote::io::{from_csv, Instance, StatsReport};
use urnvote::multicolor::MulticolorKernel;
use urnvote::plurality::PluralityScheme;
use urnvote::scalar::parse_rational;
use urnvote::scoring::{check_proper_on_grid, Brier, InducedScheme};
use urnvote::{BichromaticInstance, MulticolorInstance, Rational, Scalar};

type Check = fn() -> Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn urnvote(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_urnvote"))
        .args(args)
        .env_remove("URNVOTE_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn three_sigma(eta: f64, trials: u64) -> f64 {
    eta + 3.0 * (eta * (1.0 - eta) / trials as f64).sqrt()
}

fn lower_bound(n: usize, eps: Rational) -> Instance {
    Instance::Bichromatic(BichromaticInstance::lower_bound(n, eps).unwrap())
}

fn worst_case_run(
    system: System,
    inst: &Instance,
    m: u64,
    trials: u64,
    seed: u64,
) -> Result<String, String> {
    let report = simulate(
        inst,
        &SimulationRequest {
            system,
            voters: Voters::Fixed(m),
            trials,
            seed,
            true_urn: None,
            threads: None,
        },
    )
    .map_err(|e| e.to_string())?;
    let bound = three_sigma(0.1, trials);
    let s = &report.stats;
    ensure(s.rate <= bound, || {
        format!(
            "failure rate {} above {bound:.4} (urn {})",
            s.rate, s.true_urn
        )
    })?;
    Ok(format!(
        "m = {m}, worst urn {} failed {}/{} <= {bound:.4}",
        s.true_urn, s.failures, s.trials
    ))
}

const TABLE_B: [[(i64, i64); 6]; 6] = [
    [(1, 1), (-2, 1), (3, 1), (-4, 1), (5, 1), (-6, 1)],
    [(2, 1), (-2, 1), (0, 1), (4, 1), (-10, 1), (18, 1)],
    [(3, 1), (-8, 1), (18, 1), (-36, 1), (65, 1), (-108, 1)],
    [(20, 3), (-44, 3), (20, 1), (-44, 3), (-40, 3), (80, 1)],
    [(25, 3), (-64, 3), (53, 1), (-388, 3), (880, 3), (-610, 1)],
    [
        (98, 5),
        (-844, 15),
        (582, 5),
        (-188, 1),
        (668, 3),
        (-558, 5),
    ],
];

const TABLE_A: [&[(i64, i64)]; 6] = [
    &[(1, 1)],
    &[(2, 1), (4, 1)],
    &[(3, 1), (4, 1), (4, 1)],
    &[(20, 3), (56, 3), (40, 3), (16, 3)],
    &[(25, 3), (86, 3), (50, 1), (106, 3), (32, 3)],
    &[
        (98, 5),
        (1214, 15),
        (2012, 15),
        (656, 5),
        (1016, 15),
        (46, 3),
    ],
];

fn coefficient_tables() -> Result<String, String> {
    let csv = String::from_utf8(urnvote(&["coeffs", "--max-k", "5", "--max-l", "5"])?).unwrap();
    let entries: Vec<CoeffEntry> = from_csv(&csv).map_err(|e| e.to_string())?;
    let (mut b_checked, mut a_checked) = (0, 0);
    for e in &entries {
        let b = parse_rational(&e.b).ok_or("unparsable b")?;
        let (n, d) = TABLE_B[e.k][e.l];
        ensure(b == q(n, d), || {
            format!("b[{}][{}] = {b}, expected {n}/{d}", e.k, e.l)
        })?;
        b_checked += 1;
        if let Some(a) = &e.a {
            let a = parse_rational(a).ok_or("unparsable a")?;
            let (n, d) = TABLE_A[e.k][e.l];
            ensure(a == q(n, d), || {
                format!("a[{}][{}] = {a}, expected {n}/{d}", e.k, e.l)
            })?;
            a_checked += 1;
        }
    }
    ensure(b_checked == 36 && a_checked == 21, || {
        format!("checked {b_checked} b and {a_checked} a entries")
    })?;
    Ok("36 b and 21 a entries exact".into())
}

/// Coefficients of `1/(P+1) - sqrt((1-2P)/(1+2P))` up to `P^(len-1)`,
/// expanded term by term.
fn rhs_series(len: usize) -> Vec<Rational> {
    let sign = |i: usize| {
        if i.is_multiple_of(2) {
            q(1, 1)
        } else {
            q(-1, 1)
        }
    };
    // (1-2P)/(1+2P) = 1 + sum_{i>=1} 2 (-2)^i P^i.
    let mut ratio = vec![q(1, 1)];
    let mut pow = q(1, 1);
    for i in 1..len {
        pow *= q(2, 1);
        ratio.push(q(2, 1) * sign(i) * pow.clone());
    }
    // s^2 = ratio with s_0 = 1.
    let mut root = vec![q(1, 1)];
    for n in 1..len {
        let cross = (1..n).fold(q(0, 1), |acc, i| {
            acc + root[i].clone() * root[n - i].clone()
        });
        root.push((ratio[n].clone() - cross) / q(2, 1));
    }
    (0..len).map(|n| sign(n) - root[n].clone()).collect()
}

fn series_identity() -> Result<String, String> {
    let table = CoeffTable::<Rational>::new(41);
    let rhs = rhs_series(42);
    for n in 0..=40usize {
        let lhs = (0..=n).fold(q(0, 1), |acc, k| {
            acc + table.b(k, n - k).clone() / Rational::from_count(k + 1)
        });
        ensure(lhs == rhs[n + 1], || {
            format!("n = {n}: {lhs} != {}", rhs[n + 1])
        })?;
    }
    Ok("n = 0..40 exact".into())
}

fn random_strict_instance(rng: &mut ChaCha8Rng) -> BichromaticInstance<Rational> {
    let n = rng.random_range(2..=12usize);
    let den = rng.random_range(n as i64..=400);
    let mut nums: Vec<i64> = Vec::with_capacity(n);
    while nums.len() < n {
        let x = rng.random_range(0..=den);
        if !nums.contains(&x) {
            nums.push(x);
        }
    }
    BichromaticInstance::new(nums.into_iter().map(|x| q(x, den)).collect()).unwrap()
}

fn margin_law() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let inst = random_strict_instance(&mut rng);
        let n = inst.len();
        let scheme = PluralityScheme::build(&inst).map_err(|e| e.to_string())?;
        let m = &scheme.m_norm;
        let cap = Rational::from_count(2 * n * (n - 1)) / inst.eps().clone();
        ensure(*m <= cap, || format!("case {case}: M = {m} above {cap}"))?;
        let kernel = scheme.kernel(&inst);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let delta = kernel[i][i].clone() - kernel[i][j].clone();
                let floor = Rational::from_count(i.abs_diff(j)) / m.clone();
                ensure(delta >= floor, || {
                    format!("case {case}: margin {delta} below {floor} at ({i}, {j})")
                })?;
            }
        }
    }
    Ok("1000 instances, all margins and M bounds hold exactly".into())
}

fn plurality_end_to_end() -> Result<String, String> {
    let inst = lower_bound(5, q(1, 5));
    let m = voter_budget(System::Plurality, &inst, 0.1, 1.0).map_err(|e| e.to_string())?;
    worst_case_run(System::Plurality, &inst, m, 1000, 2026)
}

fn cumulative_end_to_end() -> Result<String, String> {
    let inst = lower_bound(5, q(1, 5));
    let m = (150.0 / 0.04 * (2.0f64 / 0.1).ln()).ceil() as u64;
    let lib = voter_budget(System::Cumulative, &inst, 0.1, 1.0).map_err(|e| e.to_string())?;
    ensure(m == lib, || format!("budget {lib}, formula {m}"))?;
    worst_case_run(System::Cumulative, &inst, m, 1000, 2026)
}

fn condorcet_marginals() -> Result<String, String> {
    let probs = [0.55, 0.7, 0.85];
    let samplers: Vec<XpSampler> = probs.iter().map(|&p| XpSampler::new(p).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draws = 100_000u32;
    let mut above = [[0u32; 3]; 3];
    for _ in 0..draws {
        let ballot = sample_permutation(&samplers, &mut rng);
        for i in 0..3 {
            for j in i + 1..3 {
                if ballot.prefers(j, i) {
                    above[i][j] += 1;
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            let target = (1.0 / (probs[i] + probs[j])).min(1.0);
            let freq = above[i][j] as f64 / draws as f64;
            let sigma = (target * (1.0 - target) / draws as f64).sqrt();
            let z = (freq - target).abs() / sigma;
            worst = worst.max(z);
            ensure(z <= 3.0, || {
                format!("pair ({}, {}): {freq} vs {target}", probs[i], probs[j])
            })?;
        }
    }
    Ok(format!("largest deviation {worst:.2} sigma"))
}

fn condorcet_end_to_end() -> Result<String, String> {
    let inst = lower_bound(4, q(3, 20));
    let m = (150.0 / 0.0225 * (3.0f64 / 0.1).ln()).ceil() as u64;
    let lib = voter_budget(System::Condorcet, &inst, 0.1, 1.0).map_err(|e| e.to_string())?;
    ensure(m == lib, || format!("budget {lib}, formula {m}"))?;
    worst_case_run(System::Condorcet, &inst, m, 500, 2026)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, halves: usize) -> f64 {
    let n = 2 * halves;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + inner + f(b)) * h / 3.0
}

fn sampler_mass() -> Result<String, String> {
    let terms = 200;
    let table = CoeffTable::<f64>::new(terms);
    let mut worst = 0.0f64;
    for p in [0.6, 0.75, 0.9] {
        let big_p: f64 = p - 0.5;
        let beta_hat = |y: f64| {
            let u = y - 0.5;
            (0..terms)
                .flat_map(|k| (0..terms - k).map(move |l| (k, l)))
                .map(|(k, l)| table.b(k, l) * u.powi(k as i32) * big_p.powi(l as i32))
                .sum::<f64>()
        };
        let gamma = (1.0 / p - 1.0).sqrt();
        let alpha = simpson(|x| (p + x).powi(-2), 1.0 - p, 0.5, 200);
        let beta = simpson(beta_hat, 0.5, p, 200);
        let residual = (gamma + alpha + beta - 1.0).abs();
        worst = worst.max(residual);
        ensure(residual < 1e-3, || {
            format!("p = {p}: residual {residual:e}")
        })?;
        let s = XpSampler::new(p).map_err(|e| e.to_string())?;
        let total = s.point_mass() + s.alpha_mass() + s.beta_mass();
        ensure((total - 1.0).abs() < 1e-9, || {
            format!("p = {p}: sampler mass {total}")
        })?;
    }
    Ok(format!("largest residual {worst:.2e}"))
}

fn scoring_property() -> Result<String, String> {
    check_proper_on_grid(&Brier, 200).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let exact = random_strict_instance(&mut rng);
        let inst = exact.to_f64();
        let scheme = InducedScheme::build(&inst, &Brier).map_err(|e| e.to_string())?;
        for t in inst.urns() {
            let pt = *inst.prob(t);
            for voters in [1usize, 7, 40] {
                let closed = scheme
                    .closed_form_votes(&inst, &Brier, t, voters)
                    .map_err(|e| e.to_string())?;
                for (j, c) in closed.iter().enumerate() {
                    // One voter at a time: a blue draw votes by blue_votes, a red one by red_votes.
                    let mut direct = 0.0;
                    for _ in 0..voters {
                        direct += pt * scheme.blue_votes[j] + (1.0 - pt) * scheme.red_votes[j];
                    }
                    worst = worst.max((direct - c).abs());
                    ensure((direct - c).abs() <= 1e-12, || {
                        format!("urn {j}: {direct} vs {c}")
                    })?;
                }
            }
        }
        let exact_scheme = InducedScheme::build(&exact, &Brier).map_err(|e| e.to_string())?;
        for t in exact.urns() {
            let closed = exact_scheme
                .closed_form_votes(&exact, &Brier, t, 5)
                .map_err(|e| e.to_string())?;
            let direct = exact_scheme
                .expected_votes(&exact, t, 5)
                .map_err(|e| e.to_string())?;
            ensure(closed == direct, || {
                "exact closed form differs from direct summation".into()
            })?;
        }
    }
    Ok(format!("grid check passed, largest gap {worst:.1e}"))
}

fn scoring_inefficiency() -> Result<String, String> {
    let rows =
        efficiency_experiment(4, &[q(1, 5), q(1, 20)], 0.9, 1000, 10).map_err(|e| e.to_string())?;
    let (coarse, fine) = (&rows[0], &rows[1]);
    ensure(fine.ratio > coarse.ratio, || {
        format!("ratio {} at 0.05 vs {} at 0.2", fine.ratio, coarse.ratio)
    })?;
    Ok(format!(
        "ratio {:.2} at eps 0.2, {:.2} at eps 0.05",
        coarse.ratio, fine.ratio
    ))
}

fn multicolor_kernel() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 60 {
        let d = rng.random_range(6..=30i64);
        let rows: Vec<Vec<Rational>> = (0..3)
            .map(|_| {
                let a = rng.random_range(0..=d);
                let b = rng.random_range(0..=d - a);
                vec![q(a, d), q(b, d), q(d - a - b, d)]
            })
            .collect();
        if rows[0] == rows[1] || rows[0] == rows[2] || rows[1] == rows[2] {
            continue;
        }
        let inst = MulticolorInstance::new(rows).map_err(|e| e.to_string())?;
        let kernel = MulticolorKernel::build(&inst).map_err(|e| e.to_string())?;
        // Three colors give T = ceil(log_3 3) + 1 = 2.
        let floor = inst.eps().clone() / Rational::from_count(26_730 * 3 * 2 * 9);
        for i in 1..=3 {
            for j in (1..=3).filter(|&j| j != i) {
                let margin = kernel.margin(i, j);
                ensure(margin >= floor, || format!("margin {margin} below {floor}"))?;
            }
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} instances, all off-diagonal margins above the floor"
    ))
}

fn determinism() -> Result<String, String> {
    let dir = std::env::temp_dir().join(format!("urnvote-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let inst = dir.join("i.json");
    std::fs::write(&inst, r#"{"probs": ["1/5", "2/5", "3/5", "4/5"]}"#)
        .map_err(|e| e.to_string())?;
    let inst = inst.to_str().unwrap().to_string();
    let run = |system: &str, threads: &str, out: &Path| -> Result<Vec<u8>, String> {
        let out_s = out.to_str().unwrap();
        urnvote(&[
            "simulate",
            "--system",
            system,
            "--instance",
            &inst,
            "--m",
            "800",
            "--trials",
            "300",
            "--seed",
            "77",
            "--threads",
            threads,
            "--out",
            out_s,
        ])?;
        std::fs::read(out).map_err(|e| e.to_string())
    };
    let mut runs = 0;
    for system in [
        "plurality",
        "cumulative",
        "condorcet",
        "scoring",
        "multicolor",
    ] {
        let reference = run(system, "1", &dir.join("ref.json"))?;
        StatsReport::from_json(std::str::from_utf8(&reference).unwrap())
            .map_err(|e| e.to_string())?;
        for threads in ["2", "3", "8"] {
            let again = run(system, threads, &dir.join("again.json"))?;
            ensure(again == reference, || {
                format!("{system} differs with {threads} threads")
            })?;
            runs += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{runs} repeated runs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 12] = [
        (
            "coefficient tables",
            coefficient_tables,
            Duration::from_secs(1),
        ),
        ("series identity", series_identity, Duration::from_secs(10)),
        ("margin law", margin_law, Duration::from_secs(30)),
        (
            "plurality end-to-end",
            plurality_end_to_end,
            Duration::from_secs(120),
        ),
        (
            "cumulative end-to-end",
            cumulative_end_to_end,
            Duration::from_secs(60),
        ),
        (
            "condorcet marginals",
            condorcet_marginals,
            Duration::from_secs(120),
        ),
        (
            "condorcet end-to-end",
            condorcet_end_to_end,
            Duration::from_secs(300),
        ),
        ("sampler mass", sampler_mass, Duration::from_secs(10)),
        ("scoring property", scoring_property, Duration::from_secs(5)),
        (
            "scoring inefficiency",
            scoring_inefficiency,
            Duration::from_secs(900),
        ),
        (
            "multicolor kernel",
            multicolor_kernel,
            Duration::from_secs(30),
        ),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (index, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            ensure(elapsed <= limit, || {
                format!("took {elapsed:.1?}, limit {limit:?}")
            })
            .map(|_| detail)
        });
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {status} {name}: {detail} [{:.2} s]",
            index + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
