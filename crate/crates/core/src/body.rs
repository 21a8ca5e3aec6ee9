//! The body `M`: intersection of radius-2 balls centred on two opposite
//! spherical caps of the positive orthant.
//!
//! `L = √2·S ∪ (√2−2)·S`, with `S` the unit sphere restricted to the
//! positive orthant, and `M = ⋂_{x∈L} (x + 2B^n)`. A point `v` lies in `M`
//! exactly when `(|v₊|, |v₋|)` lies in the planar disk segment
//! `A = {a, b ≥ 0 : a² + (b+√2)² ≤ 4}`, which makes every query on `M`
//! a two-number computation.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// `2 − √2`, the inner cap radius and the distance from the origin to the
/// boundary along the negative diagonal directions.
pub const INNER_RADIUS: f64 = 2.0 - SQRT_2;

/// Default additive tolerance for squared-distance comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Allowed deviation of `|θ|` from 1 for direction arguments.
pub const UNIT_TOL: f64 = 1e-9;

/// Dimension plus the two signed cap radii that define `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodySpec {
    n: usize,
}

impl BodySpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        Ok(Self { n })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Radius of the cap `√2·S`.
    pub fn r_outer(&self) -> f64 {
        SQRT_2
    }

    /// Signed scalar of the reflected cap `(√2−2)·S`.
    pub fn r_inner_signed(&self) -> f64 {
        SQRT_2 - 2.0
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_point(&self, v: &[f64]) -> Result<()> {
        self.check_len(v)?;
        match v.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(Error::NonFinite(i)),
            None => Ok(()),
        }
    }

    fn check_unit(&self, theta: &[f64]) -> Result<()> {
        self.check_point(theta)?;
        let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(norm));
        }
        Ok(())
    }

    /// Membership through the disk segment: `(|v₊|, |v₋|) ∈ A`.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        self.check_point(v)?;
        let (a, b) = split_norms(v);
        Ok(disk_segment_contains(a, b, tol))
    }

    /// Membership straight from the ball-intersection definition.
    ///
    /// For each cap the farthest point of the cap from `v` is found in
    /// closed form, so `v ∈ M` iff both worst-case squared distances are at
    /// most 4. The extreme of `s ↦ v·s` over `S` is `±|v±|` when the
    /// relevant part is nonzero and an extreme coordinate otherwise.
    pub fn contains_definitional(&self, v: &[f64], tol: f64) -> Result<bool> {
        self.check_point(v)?;
        let (far_outer, far_inner) = farthest_cap_distances_sq(v);
        Ok(far_outer <= 4.0 + tol && far_inner <= 4.0 + tol)
    }

    /// Support function `h(θ) = max_{x∈M} θ·x`.
    ///
    /// Reduces to `max_{(a,b)∈A} a|θ₊| + b|θ₋|`. When `|θ₊| ≥ |θ₋|` the
    /// maximum sits at the corner `(√2, 0)`, otherwise on the arc, where
    /// it evaluates to `2 − √2|θ₋|`.
    pub fn support(&self, theta: &[f64]) -> Result<f64> {
        self.check_unit(theta)?;
        let (p, q) = split_norms(theta);
        Ok(support_from_norms(p, q))
    }

    /// `h(θ) + h(−θ)`.
    pub fn width(&self, theta: &[f64]) -> Result<f64> {
        self.check_unit(theta)?;
        let (p, q) = split_norms(theta);
        Ok(support_from_norms(p, q) + support_from_norms(q, p))
    }

    /// Largest `t` with `t·u ∈ M`: the positive root of
    /// `t² + 2√2|u₋|t − 2 = 0`.
    pub fn radial_extent(&self, u: &[f64]) -> Result<f64> {
        self.check_unit(u)?;
        let (_, q) = split_norms(u);
        Ok(radial_from_minus_norm(q))
    }

    /// `a·u − b·w` for `(a, b) ∈ A` and unit `u, w` in the positive orthant.
    /// Every output is a member of `M`; with `u ⟂ w` it lies on the
    /// boundary when `(a, b)` lies on the arc of `A`.
    pub fn sample_boundary_point(&self, a: f64, b: f64, u: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        if !a.is_finite() || !b.is_finite() || !disk_segment_contains(a, b, DEFAULT_TOL) {
            return Err(Error::OutsideDiskSegment { a, b });
        }
        self.check_unit(u)?;
        self.check_unit(w)?;
        if u.iter().chain(w).any(|&x| x < 0.0) {
            return Err(Error::NotNonnegative);
        }
        Ok(u.iter().zip(w).map(|(ui, wi)| a * ui - b * wi).collect())
    }
}

/// Coordinate-wise split `v = v₊ − v₋` with disjoint supports.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDecomposition {
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub norm_plus: f64,
    pub norm_minus: f64,
}

impl PositiveDecomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        self.v_plus.iter().zip(&self.v_minus).map(|(p, m)| p - m).collect()
    }
}

pub fn positive_decomposition(v: &[f64]) -> Result<PositiveDecomposition> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let v_plus: Vec<f64> = v.iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect();
    let v_minus: Vec<f64> = v.iter().map(|&x| if x < 0.0 { -x } else { 0.0 }).collect();
    let (norm_plus, norm_minus) = split_norms(v);
    Ok(PositiveDecomposition {
        v_plus,
        v_minus,
        norm_plus,
        norm_minus,
    })
}

/// `(|v₊|, |v₋|)` without allocating.
pub fn split_norms(v: &[f64]) -> (f64, f64) {
    let (mut pp, mut mm) = (0.0, 0.0);
    for &x in v {
        if x > 0.0 {
            pp += x * x;
        } else {
            mm += x * x;
        }
    }
    (pp.sqrt(), mm.sqrt())
}

/// The planar region `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSegment {
    pub center_b: f64,
    pub radius: f64,
    pub corner_a: f64,
    pub corner_b: f64,
}

impl Default for DiskSegment {
    fn default() -> Self {
        Self {
            center_b: -SQRT_2,
            radius: 2.0,
            corner_a: SQRT_2,
            corner_b: INNER_RADIUS,
        }
    }
}

impl DiskSegment {
    pub fn contains(&self, a: f64, b: f64, tol: f64) -> bool {
        a >= -tol && b >= -tol && a * a + (b - self.center_b).powi(2) <= self.radius * self.radius + tol
    }
}

/// `a ≥ −tol`, `b ≥ −tol` and `a² + (b+√2)² ≤ 4 + tol`.
pub fn disk_segment_contains(a: f64, b: f64, tol: f64) -> bool {
    a >= -tol && b >= -tol && a * a + (b + SQRT_2) * (b + SQRT_2) <= 4.0 + tol
}

/// Signed membership defect `a² + (b+√2)² − 4` of `(|v₊|, |v₋|)`; zero on
/// the curved part of `∂M`.
pub fn membership_defect(v: &[f64]) -> f64 {
    let (a, b) = split_norms(v);
    a * a + (b + SQRT_2) * (b + SQRT_2) - 4.0
}

/// Worst-case squared distances from `v` to the caps `√2·S` and `(√2−2)·S`.
pub fn farthest_cap_distances_sq(v: &[f64]) -> (f64, f64) {
    let (p, q) = split_norms(v);
    let norm_sq = p * p + q * q;
    // min over S of v·s
    let min_dot = if q > 0.0 {
        -q
    } else {
        v.iter().copied().fold(f64::INFINITY, f64::min)
    };
    // max over S of v·s
    let max_dot = if p > 0.0 {
        p
    } else {
        v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let outer = norm_sq - 2.0 * SQRT_2 * min_dot + 2.0;
    let inner = norm_sq + 2.0 * INNER_RADIUS * max_dot + INNER_RADIUS * INNER_RADIUS;
    (outer, inner)
}

pub(crate) fn support_from_norms(p: f64, q: f64) -> f64 {
    if p >= q {
        SQRT_2 * p
    } else {
        2.0 - SQRT_2 * q
    }
}

pub(crate) fn radial_from_minus_norm(q: f64) -> f64 {
    // √(2q²+2) − √2 q, rewritten to avoid cancellation: 2 / (√(2q²+2) + √2 q)
    2.0 / ((2.0 * q * q + 2.0).sqrt() + SQRT_2 * q)
}
