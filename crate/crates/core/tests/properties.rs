use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use constwidth::body::{positive_decomposition, split_norms, BodySpec, INNER_RADIUS};
use constwidth::specfun::{log_binomial, log_sum_exp};

fn vector(max_n: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, 2..=max_n)
}

fn unit(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    vector(max_n, 1.0)
        .prop_filter("non-degenerate", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The maximizer of `θ·x` over `M`, built from the geometry of `A`: the arc
/// point with outward normal `(p, q)` when that lies on the arc, otherwise
/// the corner `(√2, 0)`.
fn support_witness(theta: &[f64]) -> Vec<f64> {
    let (p, q) = split_norms(theta);
    let (a, b) = if q * q >= 0.5 {
        (2.0 * p, 2.0 * q - SQRT_2)
    } else {
        (SQRT_2, 0.0)
    };
    theta
        .iter()
        .map(|&t| {
            if t > 0.0 {
                a * t / p
            } else if t < 0.0 {
                b * t / q
            } else {
                0.0
            }
        })
        .collect()
}

proptest! {
    #[test]
    fn decomposition_is_exact_and_disjoint(v in vector(40, 3.0)) {
        let d = positive_decomposition(&v).unwrap();
        prop_assert_eq!(d.reconstruct(), v.clone());
        for (p, m) in d.v_plus.iter().zip(&d.v_minus) {
            prop_assert!(*p >= 0.0 && *m >= 0.0);
            prop_assert!(*p == 0.0 || *m == 0.0);
        }
    }

    #[test]
    fn membership_is_permutation_invariant(v in vector(12, 1.6), seed in any::<u64>()) {
        let body = BodySpec::new(v.len()).unwrap();
        let mut w = v.clone();
        // Deterministic shuffle from the seed.
        let mut s = seed;
        for i in (1..w.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            w.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(body.contains(&v, 0.0).unwrap(), body.contains(&w, 0.0).unwrap());
    }

    #[test]
    fn support_is_permutation_invariant(theta in unit(12)) {
        let body = BodySpec::new(theta.len()).unwrap();
        let mut rev = theta.clone();
        rev.reverse();
        // Equal up to the summation order of the split norms.
        let (a, b) = (body.support(&theta).unwrap(), body.support(&rev).unwrap());
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs());
    }

    #[test]
    fn width_is_two(theta in unit(64)) {
        let body = BodySpec::new(theta.len()).unwrap();
        prop_assert!((body.width(&theta).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn support_is_attained_by_a_member(theta in unit(30)) {
        let body = BodySpec::new(theta.len()).unwrap();
        let x = support_witness(&theta);
        prop_assert!(body.contains(&x, 1e-12).unwrap());
        let dot: f64 = theta.iter().zip(&x).map(|(t, y)| t * y).sum();
        prop_assert!((dot - body.support(&theta).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn radial_function_brackets_the_boundary(u in unit(30)) {
        let body = BodySpec::new(u.len()).unwrap();
        let rho = body.radial_extent(&u).unwrap();
        prop_assert!((INNER_RADIUS - 1e-12..=SQRT_2 + 1e-12).contains(&rho));
        let inside: Vec<f64> = u.iter().map(|x| x * rho * (1.0 - 1e-9)).collect();
        let outside: Vec<f64> = u.iter().map(|x| x * rho * (1.0 + 1e-9)).collect();
        prop_assert!(body.contains(&inside, 0.0).unwrap());
        prop_assert!(!body.contains(&outside, 0.0).unwrap());
    }

    #[test]
    fn antipodal_radii_fit_in_the_width(u in unit(30)) {
        let body = BodySpec::new(u.len()).unwrap();
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let span = body.radial_extent(&u).unwrap() + body.radial_extent(&neg).unwrap();
        prop_assert!(span <= 2.0 + 1e-12);
    }

    #[test]
    fn containment_sandwich(v in vector(20, 1.6)) {
        let body = BodySpec::new(v.len()).unwrap();
        let r = norm(&v);
        let inside = body.contains(&v, 0.0).unwrap();
        if r <= INNER_RADIUS * (1.0 - 1e-12) {
            prop_assert!(inside);
        }
        if r > SQRT_2 * (1.0 + 1e-12) {
            prop_assert!(!inside);
        }
    }

    #[test]
    fn star_shaped_about_origin(v in vector(20, 1.6), t in 0.0f64..1.0) {
        let body = BodySpec::new(v.len()).unwrap();
        if body.contains(&v, 0.0).unwrap() {
            let w: Vec<f64> = v.iter().map(|x| x * t).collect();
            prop_assert!(body.contains(&w, 0.0).unwrap());
        }
    }

    #[test]
    fn oracles_agree_off_the_boundary(v in vector(16, 1.6)) {
        let body = BodySpec::new(v.len()).unwrap();
        let defect = constwidth::body::membership_defect(&v);
        prop_assume!(defect.abs() > 1e-9);
        prop_assert_eq!(body.contains(&v, 0.0).unwrap(), body.contains_definitional(&v, 0.0).unwrap());
    }

    #[test]
    fn binomial_symmetry_is_exact(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        prop_assert_eq!(log_binomial(n, k).unwrap(), log_binomial(n, n - k).unwrap());
    }

    #[test]
    fn log_sum_exp_is_shift_equivariant(xs in prop::collection::vec(-50.0f64..50.0, 1..20), c in -500.0f64..500.0) {
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        let lhs = log_sum_exp(&shifted);
        let rhs = log_sum_exp(&xs) + c;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }
}
