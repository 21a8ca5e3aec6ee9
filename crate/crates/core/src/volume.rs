//! Volume of `M`: exact assembly over coordinate orthants, two Monte Carlo
//! estimators, and the effective-radius table.
//!
//! In a `(k, n−k)` orthant the set `{v : (|v₊|, |v₋|) ∈ A}` is a product of
//! spherical shells, so its volume is
//! `(kΩ_k/2^k)((n−k)Ω_{n−k}/2^{n−k}) ∬_A a^{k−1} b^{n−k−1} da db`.
//! Membership in `M` is exactly membership of `(|v₊|, |v₋|)` in `A`, so the
//! orthant sum is the volume itself, not an upper bound.

use std::f64::consts::{LN_2, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::body::{disk_segment_contains, radial_from_minus_norm, INNER_RADIUS};
use crate::bounds::{minimize_s, schramm_lower_bound};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_log_integrate, AdaptiveOptions};
use crate::sampling::{gaussian_split_sq, map_chunks};
use crate::specfun::{log_ball_volume_raw, log_binomial, log_sum_exp};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// The threshold in "r_n < 0.9 for all large n".
pub const RADIUS_THRESHOLD: f64 = 0.9;

/// `ln ∬_A a^{k−1} b^{n−k−1} da db` with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegral {
    pub k: usize,
    pub n: usize,
    pub log_value: f64,
    pub est_abs_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Quadrature,
    McRejection,
    McRadial,
}

impl VolumeMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            VolumeMethod::Quadrature => "quadrature",
            VolumeMethod::McRejection => "mc_rejection",
            VolumeMethod::McRadial => "mc_radial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeResult {
    pub n: usize,
    pub log_volume: f64,
    pub effective_radius: f64,
    pub method: VolumeMethod,
    /// 95% interval on the volume (Monte Carlo only).
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Same interval in log space; survives dimensions where the volume
    /// itself underflows.
    pub log_ci_low: Option<f64>,
    pub log_ci_high: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Estimated absolute error of `log_volume` from quadrature.
    pub quadrature_error: Option<f64>,
}

impl VolumeResult {
    fn new(n: usize, log_volume: f64, method: VolumeMethod) -> Self {
        Self {
            n,
            log_volume,
            effective_radius: effective_radius(n, log_volume),
            method,
            ci_low: None,
            ci_high: None,
            log_ci_low: None,
            log_ci_high: None,
            samples: None,
            seed: None,
            quadrature_error: None,
        }
    }

    fn with_log_ci(mut self, lo: f64, hi: f64, samples: u64, seed: u64) -> Self {
        self.log_ci_low = Some(lo);
        self.log_ci_high = Some(hi);
        self.ci_low = Some(lo.exp());
        self.ci_high = Some(hi.exp());
        self.samples = Some(samples);
        self.seed = Some(seed);
        self
    }

    pub fn volume(&self) -> f64 {
        self.log_volume.exp()
    }

    /// Half-width of the 95% interval relative to the estimate.
    pub fn relative_half_width(&self) -> Option<f64> {
        match (self.log_ci_low, self.log_ci_high) {
            (Some(lo), Some(hi)) => {
                let up = (hi - self.log_volume).exp() - 1.0;
                let down = 1.0 - (lo - self.log_volume).exp();
                Some(up.max(down))
            }
            _ => None,
        }
    }
}

/// `r = (Vol/Ω_n)^{1/n}` taken in log space.
pub fn effective_radius(n: usize, log_volume: f64) -> f64 {
    ((log_volume - log_ball_volume_raw(n)) / n as f64).exp()
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n, 2));
    }
    Ok(())
}

pub fn moment_integral(k: usize, n: usize) -> Result<MomentIntegral> {
    moment_integral_with(k, n, AdaptiveOptions::default())
}

/// Integrates out `a` analytically, leaving
/// `(1/k) ∫_0^{2−√2} (4 − (b+√2)²)^{k/2} b^{n−k−1} db`.
pub fn moment_integral_with(k: usize, n: usize, opts: AdaptiveOptions) -> Result<MomentIntegral> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::IndexOutOfRange {
            k,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    let kf = k as f64;
    let b_exp = (n - k - 1) as f64;
    // b = c − t² turns (c−b)(2+√2+b) into t²(4−t²) and removes the
    // square-root endpoint at b = c.
    let root_c = INNER_RADIUS.sqrt();
    let log_f = |t: f64| {
        let mut v = (kf + 1.0) * t.ln() + 0.5 * kf * (4.0 - t * t).ln() + LN_2;
        if b_exp != 0.0 {
            v += b_exp * ((root_c - t) * (root_c + t)).ln();
        }
        v
    };
    let res = adaptive_log_integrate(log_f, 0.0, root_c, opts)?;
    Ok(MomentIntegral {
        k,
        n,
        log_value: res.log_value - (k as f64).ln(),
        est_abs_error: res.rel_error,
    })
}

/// Log of each orthant-class contribution inside the bracket, i.e. the
/// volume is `Ω_n/2^n · Σ exp(term)`. Index `k` counts positive
/// coordinates, so `terms[n]` is the all-positive orthant.
pub fn orthant_log_terms(n: usize, opts: AdaptiveOptions) -> Result<Vec<(f64, f64)>> {
    check_dimension(n)?;
    let log_ball_n = log_ball_volume_raw(n);
    let mid: Vec<(f64, f64)> = (1..n)
        .into_par_iter()
        .map(|k| {
            let m = moment_integral_with(k, n, opts)?;
            let t = (k as f64).ln()
                + ((n - k) as f64).ln()
                + log_binomial(n, k)?
                + log_ball_volume_raw(k)
                + log_ball_volume_raw(n - k)
                - log_ball_n
                + m.log_value;
            Ok((t, m.est_abs_error))
        })
        .collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(n + 1);
    terms.push((n as f64 * INNER_RADIUS.ln(), 0.0));
    terms.extend(mid);
    terms.push((n as f64 * SQRT_2.ln(), 0.0));
    Ok(terms)
}

pub fn exact_volume(n: usize) -> Result<VolumeResult> {
    exact_volume_with(n, AdaptiveOptions::default())
}

pub fn exact_volume_with(n: usize, opts: AdaptiveOptions) -> Result<VolumeResult> {
    let terms = orthant_log_terms(n, opts)?;
    let logs: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let lse = log_sum_exp(&logs);
    // weighted relative errors of the summands
    let err: f64 = terms.iter().map(|(t, e)| (t - lse).exp() * e).sum();
    let log_volume = log_ball_volume_raw(n) - n as f64 * LN_2 + lse;
    let mut res = VolumeResult::new(n, log_volume, VolumeMethod::Quadrature);
    res.quadrature_error = Some(err);
    Ok(res)
}

/// Rejection sampling inside `√2·B^n ⊇ M`.
///
/// The acceptance rate is `(r_n/√2)^n`, about `1e-3` at `n = 25` and
/// useless beyond; use [`mc_volume_radial`] for larger dimensions.
pub fn mc_volume(n: usize, samples: u64, seed: u64) -> Result<VolumeResult> {
    mc_volume_with_tol(n, samples, seed, 0.0)
}

/// [`mc_volume`] with an additive tolerance on the membership test.
pub fn mc_volume_with_tol(n: usize, samples: u64, seed: u64, tol: f64) -> Result<VolumeResult> {
    check_dimension(n)?;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be finite and non-negative, got {tol}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let inv_n = 1.0 / n as f64;
    let hits: u64 = map_chunks(samples, seed, |rng, count| {
        let mut hits = 0u64;
        for _ in 0..count {
            let (pp, mm) = gaussian_split_sq(rng, n);
            let u: f64 = rand::Rng::random(rng);
            let radius = SQRT_2 * (u.ln() * inv_n).exp();
            let scale = radius / (pp + mm).sqrt();
            if disk_segment_contains(pp.sqrt() * scale, mm.sqrt() * scale, tol) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    if hits == 0 {
        return Err(Error::ZeroHits(samples));
    }
    let log_box = log_ball_volume_raw(n) + n as f64 * SQRT_2.ln();
    let total = samples as f64;
    let p = hits as f64 / total;
    let (lo, hi) = wilson_interval(hits, samples);
    let res = VolumeResult::new(n, log_box + p.ln(), VolumeMethod::McRejection);
    Ok(res.with_log_ci(log_box + lo.ln(), log_box + hi.ln(), samples, seed))
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: u64, samples: u64) -> (f64, f64) {
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == samples { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Streaming first and second moments of `exp(x_i)` kept relative to a
/// running maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    pub count: u64,
    pub max: f64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Default for LogMoments {
    fn default() -> Self {
        Self {
            count: 0,
            max: f64::NEG_INFINITY,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }
}

impl LogMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        if x > self.max {
            let shift = (self.max - x).exp();
            self.sum = self.sum * shift + 1.0;
            self.sum_sq = self.sum_sq * shift * shift + 1.0;
            self.max = x;
        } else {
            let w = (x - self.max).exp();
            self.sum += w;
            self.sum_sq += w * w;
        }
    }

    pub fn merge(mut self, other: LogMoments) -> LogMoments {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let max = self.max.max(other.max);
        let (a, b) = ((self.max - max).exp(), (other.max - max).exp());
        self.sum = self.sum * a + other.sum * b;
        self.sum_sq = self.sum_sq * a * a + other.sum_sq * b * b;
        self.count += other.count;
        self.max = max;
        self
    }

    /// `(ln mean, standard error of the mean relative to the mean)`.
    pub fn log_mean_and_rel_se(&self) -> (f64, f64) {
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = if self.count > 1 {
            ((self.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        (self.max + mean.ln(), (var / n).sqrt() / mean)
    }
}

/// `Vol = Ω_n · E[ρ(U)^n]` for `U` uniform on the sphere, accumulated as
/// `n ln ρ` per sample.
pub fn mc_volume_radial(n: usize, samples: u64, seed: u64) -> Result<VolumeResult> {
    check_dimension(n)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let nf = n as f64;
    let moments = map_chunks(samples, seed, |rng, count| {
        let mut acc = LogMoments::default();
        for _ in 0..count {
            let (pp, mm) = gaussian_split_sq(rng, n);
            let q = (mm / (pp + mm)).sqrt();
            acc.push(nf * radial_from_minus_norm(q).ln());
        }
        acc
    })
    .into_iter()
    .fold(LogMoments::default(), LogMoments::merge);
    Ok(radial_result(n, moments, samples, seed))
}

/// Builds the radial-estimator result from accumulated `n ln ρ` moments.
pub fn radial_result(n: usize, moments: LogMoments, samples: u64, seed: u64) -> VolumeResult {
    let (log_mean, rel_se) = moments.log_mean_and_rel_se();
    let log_volume = log_ball_volume_raw(n) + log_mean;
    let half = Z95 * rel_se;
    let lo = if half < 1.0 {
        log_volume + (1.0 - half).ln()
    } else {
        f64::NEG_INFINITY
    };
    VolumeResult::new(n, log_volume, VolumeMethod::McRadial).with_log_ci(
        lo,
        log_volume + (1.0 + half).ln(),
        samples,
        seed,
    )
}

/// One line of the effective-radius table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusRow {
    pub n: usize,
    pub r_exact: f64,
    pub r_lower_schramm: f64,
    pub r_upper_eq4: f64,
    pub log_volume: f64,
}

impl RadiusRow {
    pub fn is_ordered(&self) -> bool {
        self.r_lower_schramm <= self.r_exact && self.r_exact <= self.r_upper_eq4 + 1e-12
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusTable {
    pub rows: Vec<RadiusRow>,
    /// Smallest computed `n` with `r_n < 0.9`. Found empirically.
    pub threshold_n: Option<usize>,
}

impl RadiusTable {
    /// Whether every computed row at or after the threshold is below 0.9.
    pub fn below_threshold_after(&self) -> bool {
        match self.threshold_n {
            None => false,
            Some(t) => self
                .rows
                .iter()
                .filter(|r| r.n >= t)
                .all(|r| r.r_exact < RADIUS_THRESHOLD),
        }
    }
}

/// `½ (n+1)^{1/n} s` from the optimal triangle.
pub fn eq4_upper_bound(n: usize, s: f64) -> f64 {
    0.5 * ((n as f64 + 1.0).ln() / n as f64).exp() * s
}

pub fn radius_table(n_from: usize, n_to: usize, step: usize) -> Result<RadiusTable> {
    check_dimension(n_from)?;
    if n_to < n_from {
        return Err(Error::InvalidArgument(format!("n_to ({n_to}) < n_from ({n_from})")));
    }
    if step == 0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let s = minimize_s()?.s;
    let dims: Vec<usize> = (n_from..=n_to).step_by(step).collect();
    let rows = dims.iter().map(|&n| radius_row(n, s)).collect::<Result<Vec<_>>>()?;
    let threshold_n = rows.iter().find(|r| r.r_exact < RADIUS_THRESHOLD).map(|r| r.n);
    Ok(RadiusTable { rows, threshold_n })
}

pub fn radius_row(n: usize, s: f64) -> Result<RadiusRow> {
    let v = exact_volume(n)?;
    Ok(RadiusRow {
        n,
        r_exact: v.effective_radius,
        r_lower_schramm: schramm_lower_bound(n),
        r_upper_eq4: eq4_upper_bound(n, s),
        log_volume: v.log_volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn moment_n2_closed_form() {
        let m = moment_integral(1, 2).unwrap();
        assert_relative_eq!(m.log_value, (PI / 2.0 - 1.0).ln(), max_relative = 1e-12);
        assert!(m.est_abs_error < 1e-10);
    }

    #[test]
    fn moment_2_3_polynomial() {
        // ½ ∫_0^c (4 − (b+√2)²) db with antiderivative 4b − (b+√2)³/3
        let c = INNER_RADIUS;
        let anti = |b: f64| 4.0 * b - (b + SQRT_2).powi(3) / 3.0;
        let exact = 0.5 * (anti(c) - anti(0.0));
        assert_relative_eq!(
            moment_integral(2, 3).unwrap().log_value,
            exact.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn moment_rejects_bad_k() {
        assert!(moment_integral(0, 3).is_err());
        assert!(moment_integral(3, 3).is_err());
        assert!(moment_integral(1, 1).is_err());
    }

    #[test]
    fn exact_n2() {
        let v = exact_volume(2).unwrap();
        let closed = 3.0 * PI - SQRT_2 * PI - 2.0;
        assert_relative_eq!(v.volume(), closed, max_relative = 1e-10);
        assert_relative_eq!(v.effective_radius, (closed / PI).sqrt(), max_relative = 1e-10);
        assert!(v.ci_low.is_none());
    }

    #[test]
    fn positive_quadrant_term_n2() {
        let terms = orthant_log_terms(2, AdaptiveOptions::default()).unwrap();
        // (Ω_2/4)·exp(term) = π/2
        let quarter = (PI / 4.0) * terms[2].0.exp();
        assert_relative_eq!(quarter, PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn effective_radius_consistency() {
        for n in [2usize, 7, 40] {
            let v = exact_volume(n).unwrap();
            let lhs = v.log_volume;
            let rhs = log_ball_volume_raw(n) + n as f64 * v.effective_radius.ln();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
            assert!(v.effective_radius > INNER_RADIUS && v.effective_radius < 1.0);
        }
    }

    #[test]
    fn mc_rejects_degenerate_input() {
        assert!(matches!(mc_volume(2, 0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(mc_volume_radial(2, 0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(mc_volume(1, 10, 1), Err(Error::InvalidDimension(1, 2))));
    }

    #[test]
    fn radial_accumulator_constant_rho() {
        // every direction treated as positive: ρ = √2
        for n in [2usize, 30, 400] {
            let mut acc = LogMoments::default();
            for _ in 0..1000 {
                acc.push(n as f64 * SQRT_2.ln());
            }
            let r = radial_result(n, acc, 1000, 0);
            let expect = log_ball_volume_raw(n) + n as f64 * SQRT_2.ln();
            assert_relative_eq!(r.log_volume, expect, max_relative = 1e-14);
            assert_eq!(r.log_ci_low, r.log_ci_high);
        }
    }

    #[test]
    fn log_moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 50.0).collect();
        let mut all = LogMoments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (LogMoments::default(), LogMoments::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        let (m1, s1) = all.log_mean_and_rel_se();
        let (m2, s2) = merged.log_mean_and_rel_se();
        assert_relative_eq!(m1, m2, max_relative = 1e-13);
        assert_relative_eq!(s1, s2, max_relative = 1e-10);
    }

    #[test]
    fn wilson_brackets_proportion() {
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = mc_volume(3, 200_000, 9).unwrap();
        let b = mc_volume(3, 200_000, 9).unwrap();
        assert_eq!(a, b);
        let c = mc_volume_radial(3, 200_000, 9).unwrap();
        assert_eq!(c, mc_volume_radial(3, 200_000, 9).unwrap());
    }

    #[test]
    fn membership_tolerance() {
        assert_eq!(
            mc_volume_with_tol(3, 50_000, 4, 0.0).unwrap(),
            mc_volume(3, 50_000, 4).unwrap()
        );
        assert!(mc_volume_with_tol(3, 10, 4, -1.0).is_err());
        assert!(mc_volume_with_tol(3, 10, 4, f64::NAN).is_err());
        // A generous tolerance can only admit more points.
        let strict = mc_volume_with_tol(3, 50_000, 4, 0.0).unwrap();
        let loose = mc_volume_with_tol(3, 50_000, 4, 0.1).unwrap();
        assert!(loose.log_volume > strict.log_volume);
    }

    #[test]
    fn table_validation() {
        assert!(radius_table(1, 3, 1).is_err());
        assert!(radius_table(5, 3, 1).is_err());
        assert!(radius_table(2, 3, 0).is_err());
        let t = radius_table(2, 4, 1).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(RadiusRow::is_ordered));
        assert_relative_eq!(
            t.rows[0].r_lower_schramm,
            (11.0f64 / 3.0).sqrt() - 1.0,
            max_relative = 1e-15
        );
    }
}
