//! Gauss–Legendre rules and a globally adaptive integrator that works on
//! `ln f` instead of `f`.
//!
//! The moment integrals behind the volume formula look like
//! `b^(n-k-1) (4 - (b+√2)^2)^(k/2)`, which for `n ~ 1000` are far below the
//! smallest positive double. Each panel sum is formed with a max shift, so
//! only the logarithm of the result ever needs to be representable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::log_sum_exp;

/// Order of the per-panel rule.
pub const GL_ORDER: usize = 32;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_order` from the usual Chebyshev-like guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Plain (linear-domain) integral of `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `ln ∫_a^b exp(log_f(x)) dx` on a single panel.
    pub fn log_integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, log_f: &F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut terms = [0.0f64; 64];
        let terms = &mut terms[..self.nodes.len().min(64)];
        for (t, (x, w)) in terms.iter_mut().zip(self.nodes.iter().zip(&self.weights)) {
            *t = w.ln() + log_f(mid + half * x);
        }
        log_sum_exp(terms) + half.ln()
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// The shared order-32 rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(GL_ORDER))
}

/// Controls for [`adaptive_log_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Target for the estimated relative error of the whole integral.
    pub rel_tol: f64,
    /// Maximum number of panels before giving up.
    pub max_panels: usize,
    /// Uniform panels used to seed the refinement.
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_panels: 10_000,
            initial_panels: 8,
        }
    }
}

/// Result of a log-domain integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegral {
    pub log_value: f64,
    /// Estimated relative error of the integral, which is also the absolute
    /// error of `log_value` to first order.
    pub rel_error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    log_value: f64,
    // error in units of exp(reference)
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Legendre integration of `exp(log_f)` over
/// `[a, b]`, returning the logarithm of the integral.
///
/// Each panel is scored by comparing its own 32-point estimate with the sum
/// of the estimates on its two halves; the panel with the largest error is
/// split until the summed error falls under `rel_tol` times the total.
pub fn adaptive_log_integrate<F: Fn(f64) -> f64>(
    log_f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<LogIntegral> {
    assert!(b > a, "empty integration interval [{a}, {b}]");
    let rule = gl32();
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / n0 as f64;

    let mut seeds = Vec::with_capacity(n0);
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + width };
        seeds.push((lo, hi, rule.log_integrate(lo, hi, &log_f)));
    }
    let reference = log_sum_exp(&seeds.iter().map(|s| s.2).collect::<Vec<_>>());
    if !reference.is_finite() {
        return Ok(LogIntegral {
            log_value: reference,
            rel_error: 0.0,
            panels: n0,
        });
    }

    let score = |lo: f64, hi: f64, whole: f64| -> (Panel, Panel, f64) {
        let mid = 0.5 * (lo + hi);
        let left = rule.log_integrate(lo, mid, &log_f);
        let right = rule.log_integrate(mid, hi, &log_f);
        let halves = crate::specfun::log_add_exp(left, right);
        let err = ((halves - reference).exp() - (whole - reference).exp()).abs();
        let l = Panel {
            a: lo,
            b: mid,
            log_value: left,
            err: 0.0,
        };
        let r = Panel {
            a: mid,
            b: hi,
            log_value: right,
            err: 0.0,
        };
        (l, r, err)
    };

    // A scored panel carries the two children it was compared with so that
    // splitting it costs only the scoring of the children.
    struct Scored {
        panel: Panel,
        children: (Panel, Panel),
    }
    impl PartialEq for Scored {
        fn eq(&self, o: &Self) -> bool {
            self.panel == o.panel
        }
    }
    impl Eq for Scored {}
    impl PartialOrd for Scored {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Scored {
        fn cmp(&self, o: &Self) -> Ordering {
            self.panel.cmp(&o.panel)
        }
    }

    let make = |p: Panel| -> Scored {
        let (l, r, err) = score(p.a, p.b, p.log_value);
        Scored {
            panel: Panel { err, ..p },
            children: (l, r),
        }
    };

    let mut heap: BinaryHeap<Scored> = seeds
        .into_iter()
        .map(|(lo, hi, v)| {
            make(Panel {
                a: lo,
                b: hi,
                log_value: v,
                err: 0.0,
            })
        })
        .collect();
    let mut panels = heap.len();

    loop {
        let total: f64 = heap.iter().map(|s| (s.panel.log_value - reference).exp()).sum();
        let err: f64 = heap.iter().map(|s| s.panel.err).sum();
        if err <= opts.rel_tol * total {
            // Report the refined (children) estimate, which is the better one.
            let logs: Vec<f64> = heap
                .iter()
                .flat_map(|s| [s.children.0.log_value, s.children.1.log_value])
                .collect();
            return Ok(LogIntegral {
                log_value: log_sum_exp(&logs),
                rel_error: err / total,
                panels,
            });
        }
        if panels >= opts.max_panels {
            return Err(Error::QuadratureBudget {
                panels,
                rel_err: err / total,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let (l, r) = worst.children;
        heap.push(make(l));
        heap.push(make(r));
        panels += 1;
    }
}
