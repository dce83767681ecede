//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Every panel is integrated with a 15-point rule, once whole and once as two
//! halves; the difference is the panel error estimate. Panels with the largest
//! estimate are bisected until the summed estimate drops below the absolute
//! target. Semi-infinite and infinite ranges are mapped onto finite ones.

use std::collections::BinaryHeap;
use std::sync::LazyLock;

use crate::error::{Error, Result};

const GL_ORDER: usize = 15;

/// Nodes and weights of the 15-point Gauss–Legendre rule on [-1, 1].
static GL15: LazyLock<([f64; GL_ORDER], [f64; GL_ORDER])> = LazyLock::new(legendre_rule);

fn legendre_rule() -> ([f64; GL_ORDER], [f64; GL_ORDER]) {
    let n = GL_ORDER;
    let mut nodes = [0.0; GL_ORDER];
    let mut weights = [0.0; GL_ORDER];
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Integration range, possibly unbounded.
///
/// `scale` sets the length scale of the map used for unbounded ranges; pick it
/// near the width of the integrand's bulk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Finite { lo: f64, hi: f64 },
    UpperHalf { start: f64, scale: f64 },
    Line { center: f64, scale: f64 },
}

impl Interval {
    pub fn finite(lo: f64, hi: f64) -> Self {
        Interval::Finite { lo, hi }
    }

    fn t_range(&self) -> (f64, f64) {
        match self {
            Interval::Finite { lo, hi } => (*lo, *hi),
            Interval::UpperHalf { .. } => (0.0, 1.0),
            Interval::Line { .. } => (-1.0, 1.0),
        }
    }

    /// Maps a parameter `t` to `(x, dx/dt)`.
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Interval::Finite { .. } => (t, 1.0),
            Interval::UpperHalf { start, scale } => {
                let u = 1.0 - t;
                (start + scale * t / u, scale / (u * u))
            }
            Interval::Line { center, scale } => {
                let u = 1.0 - t * t;
                (center + scale * t / u, scale * (1.0 + t * t) / (u * u))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_panels: usize,
    pub initial_panels: usize,
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            ..Default::default()
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            max_panels: 50_000,
            initial_panels: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub error: f64,
    pub panels: usize,
}

impl QuadResult {
    pub fn value(&self) -> f64 {
        self.values[0]
    }
}

struct Panel {
    a: f64,
    b: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Integrator<'a, F> {
    k: usize,
    f: &'a F,
    interval: Interval,
    scratch: Vec<f64>,
}

impl<F: Fn(f64, &mut [f64])> Integrator<'_, F> {
    /// Fixed 15-point rule on a parameter sub-range.
    fn rule(&mut self, a: f64, b: f64, out: &mut [f64]) -> Result<()> {
        let (nodes, weights) = &*GL15;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        out.iter_mut().for_each(|v| *v = 0.0);
        for (&xi, &wi) in nodes.iter().zip(weights.iter()) {
            let t = mid + half * xi;
            let (x, jac) = self.interval.map(t);
            if !x.is_finite() || !jac.is_finite() {
                continue;
            }
            self.scratch.iter_mut().for_each(|v| *v = 0.0);
            (self.f)(x, &mut self.scratch);
            for (o, s) in out.iter_mut().zip(self.scratch.iter()) {
                if !s.is_finite() {
                    return Err(Error::QuadratureFailed {
                        error: f64::NAN,
                        target: 0.0,
                    });
                }
                *o += wi * jac * s;
            }
        }
        out.iter_mut().for_each(|v| *v *= half);
        Ok(())
    }

    fn panel(&mut self, a: f64, b: f64, whole: &[f64]) -> Result<Panel> {
        let m = 0.5 * (a + b);
        let mut left = vec![0.0; self.k];
        let mut right = vec![0.0; self.k];
        self.rule(a, m, &mut left)?;
        self.rule(m, b, &mut right)?;
        let error = whole
            .iter()
            .zip(left.iter().zip(right.iter()))
            .map(|(w, (l, r))| (w - l - r).abs())
            .fold(0.0, f64::max);
        Ok(Panel {
            a,
            b,
            left,
            right,
            error,
        })
    }
}

/// Integrates a vector-valued function of `k` components.
///
/// The error estimate is the sum over panels of the largest component
/// discrepancy, so each component meets `opts.abs_tol`.
pub fn integrate_vec<F>(
    k: usize,
    f: F,
    interval: Interval,
    opts: &QuadOptions,
) -> Result<QuadResult>
where
    F: Fn(f64, &mut [f64]),
{
    let (t0, t1) = interval.t_range();
    if !(t1 > t0) {
        return Ok(QuadResult {
            values: vec![0.0; k],
            error: 0.0,
            panels: 0,
        });
    }
    let mut it = Integrator {
        k,
        f: &f,
        interval,
        scratch: vec![0.0; k],
    };
    let n0 = opts.initial_panels.max(1);
    let width = (t1 - t0) / n0 as f64;
    let mut heap = BinaryHeap::new();
    let mut whole = vec![0.0; k];
    for i in 0..n0 {
        let a = t0 + width * i as f64;
        let b = if i + 1 == n0 {
            t1
        } else {
            t0 + width * (i + 1) as f64
        };
        it.rule(a, b, &mut whole)?;
        heap.push(it.panel(a, b, &whole)?);
    }
    let mut panels = n0;
    let mut frozen_error = 0.0;
    let mut frozen = vec![0.0; k];
    loop {
        let total: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
        if total <= opts.abs_tol {
            break;
        }
        if panels >= opts.max_panels {
            return Err(Error::QuadratureFailed {
                error: total,
                target: opts.abs_tol,
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let m = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a) < 1e-13 * (1.0 + m.abs()) {
            // Panel cannot be split further; keep its contribution as is.
            frozen_error += worst.error;
            for c in 0..k {
                frozen[c] += worst.left[c] + worst.right[c];
            }
            if heap.is_empty() {
                break;
            }
            continue;
        }
        heap.push(it.panel(worst.a, m, &worst.left)?);
        heap.push(it.panel(m, worst.b, &worst.right)?);
        panels += 1;
    }
    let mut values = frozen;
    let mut error = frozen_error;
    let mut sorted: Vec<Panel> = heap.into_vec();
    sorted.sort_by(|p, q| p.a.total_cmp(&q.a));
    for p in &sorted {
        error += p.error;
        for c in 0..k {
            values[c] += p.left[c] + p.right[c];
        }
    }
    Ok(QuadResult {
        values,
        error,
        panels,
    })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(f: F, interval: Interval, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_vec(1, |x, out: &mut [f64]| out[0] = f(x), interval, opts)
}

/// Integrates over a product of two ranges by nesting the 1-D rule.
pub fn integrate_2d<F>(
    k: usize,
    f: F,
    outer: Interval,
    inner: Interval,
    opts: &QuadOptions,
) -> Result<QuadResult>
where
    F: Fn(f64, f64, &mut [f64]),
{
    let inner_opts = QuadOptions {
        abs_tol: 0.1 * opts.abs_tol,
        initial_panels: 4,
        ..*opts
    };
    let failure = std::cell::Cell::new(None);
    let outer_fn = |x: f64, out: &mut [f64]| match integrate_vec(
        k,
        |y, o: &mut [f64]| f(x, y, o),
        inner,
        &inner_opts,
    ) {
        Ok(r) => out.copy_from_slice(&r.values),
        Err(e) => {
            failure.set(Some(e));
            out.iter_mut().for_each(|v| *v = 0.0);
        }
    };
    let outer_opts = QuadOptions {
        initial_panels: 4,
        ..*opts
    };
    let res = integrate_vec(k, outer_fn, outer, &outer_opts)?;
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(res),
    }
}

/// Non-adaptive 15-point rule on `[a, b]`.
pub fn gauss_legendre_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*GL15;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * nodes
        .iter()
        .zip(weights.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
}
