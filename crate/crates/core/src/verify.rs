//! Self-checks run by `constwidth verify`, each reporting pass/fail with a
//! one-line detail.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::{membership_defect, BodySpec, INNER_RADIUS};
use crate::bounds::{minimize_s, schramm_lower_bound, verify_triangle_moments};
use crate::error::Result;
use crate::sampling::{map_chunks, point_with_split_norms, unit_vector};
use crate::specfun::{log_binomial, log_unit_ball_volume};
use crate::volume::{eq4_upper_bound, exact_volume, mc_volume, mc_volume_radial, VolumeResult};

/// Half-width of the band around `∂M` where the two membership oracles are
/// allowed to disagree.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Tolerance on `|width − 2|`.
pub const WIDTH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(check: &'static str, passed: bool, detail: String) -> Self {
        Self { check, passed, detail }
    }

    fn from_result(check: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(check, passed, detail),
            Err(e) => Self::new(check, false, e.to_string()),
        }
    }
}

/// Max relative deviation of the log-gamma based constants from their
/// defining identities: small-`n` ball volumes, Pascal's rule up to 60,
/// binomial symmetry and `Ω_n/Ω_{n−2} = 2π/n` up to `10^4`.
pub fn specfun_deviations() -> Result<[f64; 4]> {
    let known = [(1usize, 2.0), (2, PI), (3, 4.0 * PI / 3.0)];
    let mut small = 0.0f64;
    for (n, v) in known {
        small = small.max((log_unit_ball_volume(n)?.exp() / v - 1.0).abs());
    }
    let mut pascal = 0.0f64;
    let mut symmetric = true;
    for n in 2..=60usize {
        for k in 1..n {
            let c = log_binomial(n, k)?.exp();
            let sum = log_binomial(n - 1, k)?.exp() + log_binomial(n - 1, k - 1)?.exp();
            pascal = pascal.max((c - sum).abs() / c);
            symmetric &= log_binomial(n, k)? == log_binomial(n, n - k)?;
        }
    }
    let mut recurrence = 0.0f64;
    for n in 3..=10_000usize {
        let lhs = log_unit_ball_volume(n)? - log_unit_ball_volume(n - 2)?;
        let rhs = (2.0 * PI / n as f64).ln();
        let scale = log_unit_ball_volume(n)?.abs().max(1.0);
        recurrence = recurrence.max((lhs - rhs).abs() / scale);
    }
    Ok([small, pascal, if symmetric { 0.0 } else { 1.0 }, recurrence])
}

fn check_specfun() -> Result<(bool, String)> {
    let [small, pascal, asym, rec] = specfun_deviations()?;
    let passed = small < 1e-14 && pascal < 1e-12 && asym == 0.0 && rec < 1e-13;
    Ok((
        passed,
        format!(
            "ball={small:.1e} pascal={pascal:.1e} symmetric={} recurrence={rec:.1e}",
            asym == 0.0
        ),
    ))
}

/// Counts disagreements between the disk-segment and definitional
/// membership oracles on `samples` uniform points of `1.05·√2·B^n`, ignoring
/// points within [`BOUNDARY_BAND`] of the boundary. Returns
/// `(disagreements, points in band, inside count)`.
///
/// In high dimension almost none of these points land inside `M`; see
/// [`split_norm_disagreements`] for a sweep that stays informative.
pub fn oracle_disagreements(n: usize, samples: u64, seed: u64) -> Result<(u64, u64, u64)> {
    let radius = 1.05 * SQRT_2;
    compare_oracles(n, samples, seed, |rng| {
        let r = radius * (rng.random::<f64>().ln() / n as f64).exp();
        unit_vector(rng, n).into_iter().map(|x| x * r).collect()
    })
}

/// As [`oracle_disagreements`], but with `(|v₊|, |v₋|)` uniform on
/// `[0, 1.05√2] × [0, 1.05(2−√2)]` and random sign pattern, so that a fair
/// share of points falls inside `M` and near its boundary in any dimension.
pub fn split_norm_disagreements(n: usize, samples: u64, seed: u64) -> Result<(u64, u64, u64)> {
    compare_oracles(n, samples, seed, |rng| {
        let a = 1.05 * SQRT_2 * rng.random::<f64>();
        let b = 1.05 * INNER_RADIUS * rng.random::<f64>();
        point_with_split_norms(rng, n, a, b)
    })
}

fn compare_oracles<F>(n: usize, samples: u64, seed: u64, draw: F) -> Result<(u64, u64, u64)>
where
    F: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let body = BodySpec::new(n)?;
    let parts = map_chunks(samples, seed, |rng, count| {
        let mut tally = (0u64, 0u64, 0u64);
        for _ in 0..count {
            let v = draw(rng);
            let fast = body.contains(&v, 0.0).expect("dimension matches");
            let slow = body.contains_definitional(&v, 0.0).expect("dimension matches");
            tally.2 += fast as u64;
            if membership_defect(&v).abs() < BOUNDARY_BAND {
                tally.1 += 1;
            } else if fast != slow {
                tally.0 += 1;
            }
        }
        tally
    });
    Ok(parts
        .into_iter()
        .fold((0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2)))
}

/// Largest `|width(θ) − 2|` over `samples` uniform directions.
pub fn width_sweep(n: usize, samples: u64, seed: u64) -> Result<f64> {
    let body = BodySpec::new(n)?;
    let parts = map_chunks(samples, seed, |rng, count| {
        let mut worst = 0.0f64;
        for _ in 0..count {
            let theta = unit_vector(rng, n);
            let w = body.width(&theta).expect("unit direction");
            worst = worst.max((w - 2.0).abs());
        }
        worst
    });
    Ok(parts.into_iter().fold(0.0, f64::max))
}

/// The wider of `3×` the larger relative CI half-width and 1%.
pub fn agreement_tolerance(results: &[&VolumeResult]) -> f64 {
    let hw = results
        .iter()
        .filter_map(|r| r.relative_half_width())
        .fold(0.0, f64::max);
    (3.0 * hw).max(0.01)
}

/// Pairwise relative disagreement of the three volume estimates at `n`
/// against the allowed tolerance.
pub fn three_way(n: usize, rejection_samples: u64, radial_samples: u64, seed: u64) -> Result<(f64, f64)> {
    let exact = exact_volume(n)?;
    let rej = mc_volume(n, rejection_samples, seed)?;
    let rad = mc_volume_radial(n, radial_samples, seed)?;
    let all = [&exact, &rej, &rad];
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            worst = worst.max(((all[i].log_volume - all[j].log_volume).exp() - 1.0).abs());
        }
    }
    Ok((worst, agreement_tolerance(&all)))
}

/// Dimensions used by the bound-chain check.
pub const BOUND_CHAIN_DIMS: [usize; 21] = [
    2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 50, 75, 100, 150, 200, 300, 400, 500, 650, 800, 1000,
];

/// Worst violation of `schramm ≤ r_n ≤ eq4 + 1e-12` over `dims` (≤ 0 means
/// the chain holds).
pub fn bound_chain_violation(dims: &[usize]) -> Result<f64> {
    let s = minimize_s()?.s;
    let mut worst = f64::NEG_INFINITY;
    for &n in dims {
        let r = exact_volume(n)?.effective_radius;
        worst = worst
            .max(schramm_lower_bound(n) - r)
            .max(r - eq4_upper_bound(n, s) - 1e-12);
    }
    Ok(worst)
}

/// Runs every check in a fixed order.
pub fn run_all(samples: u64, seed: u64) -> Vec<CheckOutcome> {
    let mut out = vec![CheckOutcome::from_result("specfun-invariants", check_specfun())];

    out.push(CheckOutcome::from_result(
        "oracle-equivalence",
        (|| {
            let mut total = 0;
            let mut band = 0;
            for n in [2usize, 3, 5, 10, 50] {
                let (d, b, _) = oracle_disagreements(n, samples, seed)?;
                let (d2, b2, _) = split_norm_disagreements(n, samples, seed)?;
                total += d + d2;
                band += b + b2;
            }
            Ok((
                total == 0,
                format!("disagreements={total} in_band={band} points_per_n={}", 2 * samples),
            ))
        })(),
    ));

    out.push(CheckOutcome::from_result(
        "width-sweep",
        (|| {
            let mut worst = 0.0f64;
            for n in [2usize, 3, 10, 100] {
                worst = worst.max(width_sweep(n, samples, seed)?);
            }
            Ok((worst < WIDTH_TOL, format!("max_abs_width_dev={worst:.3e}")))
        })(),
    ));

    out.push(CheckOutcome::from_result(
        "triangle-moment-identity",
        (|| {
            let r = verify_triangle_moments(30)?;
            Ok((
                r.max_deviation() < 1e-9,
                format!(
                    "closed_form={:.1e} quadrature={:.1e} pairs={}",
                    r.max_dev_closed_form, r.max_dev_quadrature, r.pairs_checked
                ),
            ))
        })(),
    ));

    out.push(CheckOutcome::from_result(
        "s-two-route",
        (|| {
            let o = minimize_s()?;
            let diff = (o.s - o.s_numeric).abs();
            Ok((
                diff < 1e-9 && o.constraint_residual < 1e-9 && o.s < 1.8,
                format!(
                    "x_star={:.12} route_diff={diff:.1e} constraint={:.1e}",
                    o.x_star, o.constraint_residual
                ),
            ))
        })(),
    ));

    out.push(CheckOutcome::from_result(
        "volume-three-way",
        (|| {
            let mut ok = true;
            let mut worst = 0.0f64;
            for n in 2..=8usize {
                let (dev, tol) = three_way(n, samples, samples, seed)?;
                ok &= dev <= tol;
                worst = worst.max(dev / tol);
            }
            Ok((ok, format!("worst_dev_over_tol={worst:.3}")))
        })(),
    ));

    out.push(CheckOutcome::from_result(
        "bound-chain",
        (|| {
            let v = bound_chain_violation(&BOUND_CHAIN_DIMS)?;
            Ok((
                v <= 0.0,
                format!("max_violation={v:.3e} dims={}", BOUND_CHAIN_DIMS.len()),
            ))
        })(),
    ));

    out
}
