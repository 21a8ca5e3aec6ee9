//! Dimensional constants and combinatorics in natural-log space.
//!
//! Every volume in this crate is carried as a logarithm. Binomial
//! coefficients grow like `2^n` while ball-volume ratios shrink
//! polynomially in `n`, so direct products overflow long before the
//! dimensions we care about (`n` around `10^3`).

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Stirling series is used at or above this argument, smaller arguments are
// shifted up by the recurrence Gamma(x+1) = x Gamma(x).
const STIRLING_CUTOFF: f64 = 15.0;

// B_{2k} / (2k (2k-1)) for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Natural log of the gamma function for `x > 0`.
///
/// Uses the asymptotic Stirling series for `x >= 15` and the upward
/// recurrence below that. `ln Γ(1) = ln Γ(2) = 0` are returned exactly.
pub fn log_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "log_gamma requires x > 0, got {x}");
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_CUTOFF {
        return stirling(x);
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_CUTOFF {
        prod *= shifted;
        shifted += 1.0;
    }
    stirling(shifted) - prod.ln()
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series * inv
}

/// `ln Ω_n`, the log volume of the unit ball in `R^n`.
pub fn log_unit_ball_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidDimension(0, 1));
    }
    Ok(log_ball_volume_raw(n))
}

/// Same as [`log_unit_ball_volume`] but also accepts `n = 0` (`Ω_0 = 1`),
/// which shows up as an end term of orthant sums.
pub(crate) fn log_ball_volume_raw(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let half = n as f64 / 2.0;
    half * PI.ln() - log_gamma(half + 1.0)
}

/// `ln ω_n`, the log surface area of the unit sphere `S^{n-1}`.
pub fn log_unit_sphere_area(n: usize) -> Result<f64> {
    Ok((n as f64).ln() + log_unit_ball_volume(n)?)
}

/// `ln C(n, k)`.
///
/// The two denominator terms are added in a fixed order so that
/// `log_binomial(n, k) == log_binomial(n, n - k)` bit for bit.
pub fn log_binomial(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::IndexOutOfRange { k, lo: 0, hi: n });
    }
    let (lo, hi) = if k <= n - k { (k, n - k) } else { (n - k, k) };
    if lo == 0 {
        return Ok(0.0);
    }
    let denom = log_gamma(lo as f64 + 1.0) + log_gamma(hi as f64 + 1.0);
    Ok(log_gamma(n as f64 + 1.0) - denom)
}

/// `ln B(x, y)` for positive arguments.
pub fn log_beta(x: f64, y: f64) -> f64 {
    log_gamma(x) + log_gamma(y) - log_gamma(x + y)
}

/// Max-shifted `ln Σ exp(t_i)`. Returns `-inf` for an empty slice or when
/// every term is `-inf`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Log-space constants for one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalConstants {
    pub n: usize,
    /// `ln ω_n`
    pub log_sphere_area: f64,
    /// `ln Ω_n`
    pub log_ball_volume: f64,
}

impl DimensionalConstants {
    pub fn new(n: usize) -> Result<Self> {
        let log_ball_volume = log_unit_ball_volume(n)?;
        Ok(Self {
            n,
            log_sphere_area: (n as f64).ln() + log_ball_volume,
            log_ball_volume,
        })
    }

    pub fn ball_volume(&self) -> f64 {
        self.log_ball_volume.exp()
    }

    pub fn sphere_area(&self) -> f64 {
        self.log_sphere_area.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_ball_volumes() {
        assert_relative_eq!(log_unit_ball_volume(1).unwrap(), 2f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_unit_ball_volume(2).unwrap(), PI.ln(), max_relative = 1e-14);
        assert_relative_eq!(
            log_unit_ball_volume(3).unwrap().exp(),
            4.0 * PI / 3.0,
            max_relative = 1e-14
        );
        // Γ(6) = 120
        let ln_omega_10 = (PI.powi(5) / 120.0).ln();
        assert_relative_eq!(log_unit_ball_volume(10).unwrap(), ln_omega_10, max_relative = 1e-13);
        assert_relative_eq!(ln_omega_10, 0.936_158, epsilon = 1e-6);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(log_unit_ball_volume(0), Err(Error::InvalidDimension(0, 1)));
        assert!(DimensionalConstants::new(0).is_err());
    }

    #[test]
    fn huge_dimension_is_finite() {
        let v = log_unit_ball_volume(1_000_000).unwrap();
        assert!(v.is_finite() && v < 0.0);
    }

    #[test]
    fn gamma_against_factorials() {
        let mut fact = 1.0f64;
        for k in 1..=30u32 {
            fact *= k as f64;
            assert_relative_eq!(log_gamma(k as f64 + 1.0), fact.ln(), max_relative = 1e-14);
        }
        // Γ(1/2) = sqrt(pi)
        assert_relative_eq!(log_gamma(0.5), 0.5 * PI.ln(), max_relative = 1e-14);
    }

    #[test]
    fn binomials() {
        assert_relative_eq!(log_binomial(2, 1).unwrap(), 2f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_binomial(5, 2).unwrap(), 10f64.ln(), max_relative = 1e-14);
        assert_eq!(log_binomial(7, 0).unwrap(), 0.0);
        assert_eq!(log_binomial(7, 7).unwrap(), 0.0);
        assert!(matches!(log_binomial(3, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn sphere_area_relation() {
        for n in [1usize, 2, 3, 17, 1000] {
            let c = DimensionalConstants::new(n).unwrap();
            assert_eq!(c.log_sphere_area, (n as f64).ln() + c.log_ball_volume);
        }
        assert_relative_eq!(
            DimensionalConstants::new(2).unwrap().sphere_area(),
            2.0 * PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn lse_edge_cases() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_add_exp(-1000.0, -1000.0), -1000.0 + 2f64.ln(), max_relative = 1e-15);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
    }
}
