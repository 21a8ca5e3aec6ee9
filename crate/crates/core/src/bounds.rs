//! The analytic bound chain: triangles `T_{α,β}` containing `A`, the
//! optimal triangle size `s`, the sextic whose root is `s/2`, the
//! triangle-moment identity and Schramm's lower bound.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_log_integrate, gl32, AdaptiveOptions};
use crate::specfun::{log_ball_volume_raw, log_beta, log_binomial, log_sum_exp};

const FEAS_TOL: f64 = 1e-12;

/// Coefficients of `P(x) = 8x⁶ − 76x⁴ + 54x² + 1` as a cubic in `y = x²`,
/// highest degree first.
pub const SEXTIC_IN_Y: [f64; 4] = [8.0, -76.0, 54.0, 1.0];

/// A candidate triangle `{a, b ≥ 0 : a/α + b/β ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleBound {
    pub alpha: f64,
    pub beta: f64,
    pub s_candidate: f64,
    pub feasible: bool,
}

/// The hypotenuse of `T_{α,β}` stays at distance ≥ 2 from `(0, −√2)`
/// exactly when `α(β+√2) ≥ 2√(α²+β²)`, i.e. when `T_{α,β} ⊇ A`.
pub fn triangle_feasible(alpha: f64, beta: f64) -> Result<TriangleBound> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "triangle intercepts must be positive, got ({alpha}, {beta})"
        )));
    }
    let s_candidate = alpha.hypot(beta);
    Ok(TriangleBound {
        alpha,
        beta,
        s_candidate,
        feasible: alpha * (beta + SQRT_2) >= 2.0 * s_candidate - FEAS_TOL,
    })
}

/// `½ (n+1)^{1/n} √(α²+β²)`, valid only for feasible triangles.
pub fn eq3_upper_bound(n: usize, alpha: f64, beta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidDimension(0, 1));
    }
    let t = triangle_feasible(alpha, beta)?;
    if !t.feasible {
        return Err(Error::InfeasibleTriangle { alpha, beta });
    }
    Ok(0.5 * ((n as f64 + 1.0).ln() / n as f64).exp() * t.s_candidate)
}

/// `ln` of the triangle-relaxed volume bound
/// `2^{−n} Σ_k α^k Ω_k · β^{n−k} Ω_{n−k}`.
pub fn triangle_log_volume_bound(n: usize, alpha: f64, beta: f64) -> f64 {
    let terms: Vec<f64> = (0..=n)
        .map(|k| product_ball_log_term(n, k, alpha, beta) + log_ball_volume_raw(n))
        .collect();
    log_sum_exp(&terms) - n as f64 * std::f64::consts::LN_2
}

/// `ln(α^k Ω_k β^{n−k} Ω_{n−k} / Ω_n)`: the log volume ratio of
/// `αB^k × βB^{n−k}` to `B^n`.
pub fn product_ball_log_term(n: usize, k: usize, alpha: f64, beta: f64) -> f64 {
    let kf = k as f64;
    let rest = (n - k) as f64;
    let a = if k == 0 { 0.0 } else { kf * alpha.ln() };
    let b = if k == n { 0.0 } else { rest * beta.ln() };
    a + b + log_ball_volume_raw(k) + log_ball_volume_raw(n - k) - log_ball_volume_raw(n)
}

/// `P(x) = 8x⁶ − 76x⁴ + 54x² + 1`.
pub fn sextic(x: f64) -> f64 {
    let y = x * x;
    SEXTIC_IN_Y.iter().fold(0.0, |acc, c| acc * y + c)
}

/// `P'(x) = 48x⁵ − 304x³ + 108x`.
pub fn sextic_derivative(x: f64) -> f64 {
    let y = x * x;
    x * ((48.0 * y - 304.0) * y + 108.0)
}

/// Sign changes in a coefficient sequence, zeros skipped.
pub fn sign_changes(coeffs: &[f64]) -> usize {
    let signs: Vec<bool> = coeffs.iter().filter(|c| **c != 0.0).map(|c| *c > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// The unique root of `P` in `(0, 1)`.
///
/// `P(0) = 1` and `P(1) = −13` bracket it. Bisection runs to width `1e-12`,
/// then at most five Newton steps polish it.
pub fn least_positive_root() -> f64 {
    debug_assert_eq!(sign_changes(&SEXTIC_IN_Y), 2);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if sextic(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let step = sextic(x) / sextic_derivative(x);
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    x
}

/// Positive root of `2β² + √2β − 4x² = 0`, the maximizer of
/// `β ↦ √(4x²−β²)(β+√2)`.
pub fn critical_beta(x: f64) -> f64 {
    let c = 1.0 / (2.0 * SQRT_2);
    let disc = (0.125 + 2.0 * x * x).sqrt();
    // −c + disc, rationalized to avoid cancellation near x = 0
    2.0 * x * x / (disc + c)
}

/// `1/8 + 11x² − 4x⁴`; must stay positive on `(0, 1)` for the squaring
/// step in the sextic derivation to be reversible.
pub fn squaring_rhs(x: f64) -> f64 {
    let y = x * x;
    0.125 + 11.0 * y - 4.0 * y * y
}

/// The minimal triangle and its certificates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SOptimum {
    /// `2 x*`
    pub s: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
    pub x_star: f64,
    /// `|P(x*)|`
    pub residual: f64,
    /// `s` from the direct constrained minimization.
    pub s_numeric: f64,
    pub beta_numeric: f64,
    /// `|α*(β*+√2) − 2s|`
    pub constraint_residual: f64,
}

/// `α` on the active constraint `α(β+√2) = 2√(α²+β²)` for `β > 2−√2`.
pub fn alpha_on_constraint(beta: f64) -> f64 {
    let t = beta + SQRT_2;
    // α²((β+√2)² − 4) = 4β², with (β+√2)² − 4 = (β+√2−2)(β+√2+2)
    2.0 * beta / ((t - 2.0) * (t + 2.0)).sqrt()
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `s = min √(α²+β²)` over feasible triangles, by two routes that must
/// agree to `1e-9`: golden-section search along the active constraint, and
/// twice the sextic root.
pub fn minimize_s() -> Result<SOptimum> {
    let lo = 2.0 - SQRT_2 + 1e-9;
    let objective = |beta: f64| {
        let a = alpha_on_constraint(beta);
        a * a + beta * beta
    };
    let beta_numeric = golden_section(objective, lo, 2.0, 1e-12);
    let s_numeric = objective(beta_numeric).sqrt();

    let x_star = least_positive_root();
    let s = 2.0 * x_star;
    if (s - s_numeric).abs() > 1e-9 {
        return Err(Error::CheckFailed(format!(
            "constrained minimizer gives s = {s_numeric}, sextic root gives s = {s}"
        )));
    }
    let beta_star = critical_beta(x_star);
    let alpha_star = (4.0 * x_star * x_star - beta_star * beta_star).sqrt();
    Ok(SOptimum {
        s,
        alpha_star,
        beta_star,
        x_star,
        residual: sextic(x_star).abs(),
        s_numeric,
        beta_numeric,
        constraint_residual: (alpha_star * (beta_star + SQRT_2) - 2.0 * s).abs(),
    })
}

/// `√(3 + 2/(n+1)) − 1`.
pub fn schramm_lower_bound(n: usize) -> f64 {
    (3.0 + 2.0 / (n as f64 + 1.0)).sqrt() - 1.0
}

/// Worst deviations of `k(n−k)·I·C(n,k)` from 1 over all checked `(n, k)`,
/// where `I = ∬_{T_{1,1}} a^{k−1} b^{n−k−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleMomentReport {
    pub n_max: usize,
    pub pairs_checked: usize,
    pub max_dev_closed_form: f64,
    pub max_dev_quadrature: f64,
    pub max_dev_between_routes: f64,
}

impl TriangleMomentReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_dev_closed_form.max(self.max_dev_quadrature)
    }
}

/// Largest `n` for which the inner single-panel Gauss rule is exact.
pub const TRIANGLE_MOMENT_MAX_N: usize = 64;

/// `ln I` from `I = B(k, n−k+1)/(n−k)`.
pub fn triangle_moment_closed(n: usize, k: usize) -> f64 {
    log_beta(k as f64, (n - k + 1) as f64) - ((n - k) as f64).ln()
}

/// `ln I` by iterated quadrature: Gauss–Legendre in `b` on `[0, 1−a]`,
/// adaptive in `a`.
pub fn triangle_moment_quadrature(n: usize, k: usize) -> Result<f64> {
    let rule = gl32();
    let a_exp = (k - 1) as f64;
    let b_exp = (n - k - 1) as f64;
    let pow_log = |x: f64, e: f64| if e == 0.0 { 0.0 } else { e * x.ln() };
    let log_inner = |a: f64| {
        let inner = rule.log_integrate(0.0, 1.0 - a, &|b: f64| pow_log(b, b_exp));
        pow_log(a, a_exp) + inner
    };
    let opts = AdaptiveOptions {
        rel_tol: 1e-13,
        ..AdaptiveOptions::default()
    };
    Ok(adaptive_log_integrate(log_inner, 0.0, 1.0, opts)?.log_value)
}

/// Checks `k(n−k)·C(n,k)·I = 1` for every `2 ≤ n ≤ n_max`, `1 ≤ k < n`.
pub fn verify_triangle_moments(n_max: usize) -> Result<TriangleMomentReport> {
    if n_max < 2 {
        return Err(Error::InvalidDimension(n_max, 2));
    }
    if n_max > TRIANGLE_MOMENT_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "n_max {n_max} exceeds {TRIANGLE_MOMENT_MAX_N}"
        )));
    }
    let mut report = TriangleMomentReport {
        n_max,
        pairs_checked: 0,
        max_dev_closed_form: 0.0,
        max_dev_quadrature: 0.0,
        max_dev_between_routes: 0.0,
    };
    for n in 2..=n_max {
        for k in 1..n {
            let scale = (k as f64).ln() + ((n - k) as f64).ln() + log_binomial(n, k)?;
            let closed = triangle_moment_closed(n, k);
            let quad = triangle_moment_quadrature(n, k)?;
            let dev_c = ((scale + closed).exp() - 1.0).abs();
            let dev_q = ((scale + quad).exp() - 1.0).abs();
            report.max_dev_closed_form = report.max_dev_closed_form.max(dev_c);
            report.max_dev_quadrature = report.max_dev_quadrature.max(dev_q);
            report.max_dev_between_routes = report.max_dev_between_routes.max(((quad - closed).exp() - 1.0).abs());
            report.pairs_checked += 1;
        }
    }
    if report.max_deviation() > 1e-9 {
        return Err(Error::CheckFailed(format!(
            "triangle moment identity violated by {:e}",
            report.max_deviation()
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_check_pair() {
        let t = triangle_feasible(1.5, 0.7 * SQRT_2).unwrap();
        assert!(t.feasible);
        assert_relative_eq!(t.s_candidate * t.s_candidate, 3.23, max_relative = 1e-12);
        assert!(t.s_candidate < 1.8);
    }

    #[test]
    fn corner_triangle_is_infeasible() {
        let t = triangle_feasible(SQRT_2, 2.0 - SQRT_2).unwrap();
        assert!(!t.feasible);
        assert!(triangle_feasible(10.0, 10.0).unwrap().feasible);
        assert!(triangle_feasible(0.0, 1.0).is_err());
        assert!(triangle_feasible(1.0, -1.0).is_err());
    }

    #[test]
    fn eq3_bound() {
        let b2 = eq3_upper_bound(2, 1.5, 0.7 * SQRT_2).unwrap();
        assert_relative_eq!(b2, 0.5 * 3f64.sqrt() * 3.23f64.sqrt(), max_relative = 1e-14);
        let big = eq3_upper_bound(1_000_000_000, 1.5, 0.7 * SQRT_2).unwrap();
        assert!((big - 3.23f64.sqrt() / 2.0).abs() < 1e-6);
        assert_relative_eq!(3.23f64.sqrt() / 2.0, 0.898_610, epsilon = 1e-6);
        assert!(matches!(
            eq3_upper_bound(5, SQRT_2, 2.0 - SQRT_2),
            Err(Error::InfeasibleTriangle { .. })
        ));
    }

    #[test]
    fn sextic_values() {
        assert_eq!(sextic(0.0), 1.0);
        assert_eq!(sextic(1.0), -13.0);
        assert_eq!(sign_changes(&SEXTIC_IN_Y), 2);
        let h = 1e-6;
        for x in [0.3, 0.89, 1.7] {
            let fd = (sextic(x + h) - sextic(x - h)) / (2.0 * h);
            assert_relative_eq!(sextic_derivative(x), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn root_value() {
        let x = least_positive_root();
        assert!((x - 0.89071).abs() < 5e-6);
        assert!(sextic(x).abs() < 1e-12);
    }

    #[test]
    fn critical_beta_residual() {
        for x in [0.5, 0.89, 1.0] {
            let b = critical_beta(x);
            assert!((2.0 * b * b + SQRT_2 * b - 4.0 * x * x).abs() < 1e-12);
        }
        assert!(critical_beta(1e-9) < 1e-16);
    }

    #[test]
    fn optimum() {
        let o = minimize_s().unwrap();
        assert!((o.s - o.s_numeric).abs() < 1e-9);
        assert!(o.s < 1.8);
        assert!(o.constraint_residual < 1e-9);
        assert!((2.0 * o.beta_star.powi(2) + SQRT_2 * o.beta_star - 4.0 * o.x_star.powi(2)).abs() < 1e-9);
        assert!(triangle_feasible(o.alpha_star, o.beta_star).unwrap().feasible);
        assert!((o.beta_numeric - o.beta_star).abs() < 1e-5);
        assert!((critical_beta(0.890712) - o.beta_star).abs() < 1e-5);
    }

    #[test]
    fn schramm_examples() {
        assert_relative_eq!(schramm_lower_bound(2), 0.914_854, epsilon = 1e-6);
        assert!((schramm_lower_bound(usize::MAX / 2) - (3f64.sqrt() - 1.0)).abs() < 1e-9);
        for n in 1..10_000 {
            assert!(schramm_lower_bound(n + 1) < schramm_lower_bound(n));
        }
    }

    #[test]
    fn triangle_moments_small() {
        // area of T_{1,1}
        assert_relative_eq!(triangle_moment_closed(2, 1).exp(), 0.5, max_relative = 1e-14);
        // ∬ b = 1/6
        assert_relative_eq!(triangle_moment_closed(3, 1).exp(), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(
            triangle_moment_quadrature(3, 1).unwrap().exp(),
            1.0 / 6.0,
            max_relative = 1e-13
        );
        let r = verify_triangle_moments(8).unwrap();
        assert_eq!(r.pairs_checked, 28);
        assert!(verify_triangle_moments(1).is_err());
        assert!(verify_triangle_moments(65).is_err());
    }

    #[test]
    fn product_ball_end_terms() {
        // k = n: α^n Ω_n / Ω_n
        assert_relative_eq!(
            product_ball_log_term(5, 5, 2.0, 3.0),
            5.0 * 2f64.ln(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            product_ball_log_term(5, 0, 2.0, 3.0),
            5.0 * 3f64.ln(),
            max_relative = 1e-14
        );
    }
}
