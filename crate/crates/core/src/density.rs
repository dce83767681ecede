//! Parametric densities on `R^n` and the closed-form wrapped/quantized
//! expressions available for the exponential and Gaussian families.
//!
//! Besides pointwise evaluation, each model exposes what the truncation
//! machinery needs: a reference `center`, a length `scale`, a radial density
//! envelope and a tail-mass bound, both measured from `center`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_2d, Interval, QuadOptions};

/// Pointwise density evaluator for custom models.
pub type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Draws one point for custom models.
pub type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync>;
/// `r ↦ sup { p(x) : ‖x - center‖ ≥ r }`, nonincreasing in `r`.
pub type EnvelopeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Where a density may be nonzero. Selects quadrature placement and the
/// variant of the mutual-information bound.
#[derive(Debug, Clone, PartialEq)]
pub enum SupportDescriptor {
    /// `[start, ∞)`, one-dimensional.
    HalfLine { start: f64 },
    /// The whole space.
    FullLine,
    /// Axis-aligned box `∏ [lo_i, hi_i]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl SupportDescriptor {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            SupportDescriptor::HalfLine { start } => {
                if !start.is_finite() {
                    return Err(Error::InvalidParameter(
                        "half-line start must be finite".into(),
                    ));
                }
                if dim != 1 {
                    return Err(Error::InvalidParameter(
                        "half-line support is one-dimensional".into(),
                    ));
                }
            }
            SupportDescriptor::FullLine => {}
            SupportDescriptor::Box { lo, hi } => {
                if lo.len() != dim || hi.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: lo.len().min(hi.len()),
                    });
                }
                if lo
                    .iter()
                    .zip(hi)
                    .any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite())
                {
                    return Err(Error::InvalidParameter(
                        "box support needs lo < hi on every axis".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A user-supplied density.
#[derive(Clone)]
pub struct CustomDensity {
    pub dim: usize,
    pub density: DensityFn,
    pub support: SupportDescriptor,
    pub sampler: Option<SamplerFn>,
    /// Radial bound on the density around `center`; required for unbounded
    /// supports so truncations can be certified.
    pub envelope: Option<EnvelopeFn>,
    pub center: Vec<f64>,
    pub scale: f64,
    pub params: Vec<f64>,
}

impl CustomDensity {
    pub fn new(dim: usize, density: DensityFn, support: SupportDescriptor) -> Self {
        let (center, scale) = match &support {
            SupportDescriptor::Box { lo, hi } => (
                lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
                lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max),
            ),
            SupportDescriptor::HalfLine { start } => (vec![*start], 1.0),
            SupportDescriptor::FullLine => (vec![0.0; dim], 1.0),
        };
        CustomDensity {
            dim,
            density,
            support,
            sampler: None,
            envelope: None,
            center,
            scale,
            params: Vec::new(),
        }
    }

    pub fn with_sampler(mut self, sampler: SamplerFn) -> Self {
        self.sampler = Some(sampler);
        self
    }

    pub fn with_envelope(mut self, envelope: EnvelopeFn, center: Vec<f64>, scale: f64) -> Self {
        self.envelope = Some(envelope);
        self.center = center;
        self.scale = scale;
        self
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }

    /// Largest distance from `center` to a point of a box support.
    fn box_radius(&self) -> Option<f64> {
        match &self.support {
            SupportDescriptor::Box { lo, hi } => Some(
                lo.iter()
                    .zip(hi)
                    .zip(&self.center)
                    .map(|((l, h), c)| (l - c).abs().max((h - c).abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            _ => None,
        }
    }
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("dim", &self.dim)
            .field("support", &self.support)
            .field("has_sampler", &self.sampler.is_some())
            .field("has_envelope", &self.envelope.is_some())
            .field("params", &self.params)
            .finish()
    }
}

/// Multivariate normal with cached factorizations.
#[derive(Debug, Clone)]
pub struct GaussianNd {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    precision: DMatrix<f64>,
    chol: DMatrix<f64>,
    ln_norm: f64,
    max_eig: f64,
}

impl GaussianNd {
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    Exponential { rate: f64 },
    Gaussian1D { mean: f64, variance: f64 },
    GaussianND(GaussianNd),
    Custom(CustomDensity),
}

#[derive(Debug, Clone)]
pub struct DensityModel {
    family: Family,
}

impl DensityModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponential rate must be positive, got {rate}"
            )));
        }
        Ok(DensityModel {
            family: Family::Exponential { rate },
        })
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gaussian needs finite mean and positive variance, got ({mean}, {variance})"
            )));
        }
        Ok(DensityModel {
            family: Family::Gaussian1D { mean, variance },
        })
    }

    pub fn gaussian_nd(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: cov.nrows(),
            });
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::InvalidParameter(
                "covariance must be symmetric".into(),
            ));
        }
        let eig = cov.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.min();
        if !(min_eig > 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "covariance must be positive definite (min eigenvalue {min_eig:e})"
            )));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("covariance is not positive definite".into()))?;
        let ln_det: f64 = eig.eigenvalues.iter().map(|v| v.ln()).sum();
        let precision = chol.inverse();
        Ok(DensityModel {
            family: Family::GaussianND(GaussianNd {
                mean: DVector::from_vec(mean),
                precision,
                chol: chol.l(),
                ln_norm: -0.5 * (n as f64 * LN_2PI + ln_det),
                max_eig: eig.eigenvalues.max(),
                cov,
            }),
        })
    }

    /// Wraps a custom density, checking by quadrature that it integrates to 1
    /// within 1e-6. Supported for dimension 1 and 2.
    pub fn custom(custom: CustomDensity) -> Result<Self> {
        custom.support.validate(custom.dim)?;
        if custom.center.len() != custom.dim {
            return Err(Error::DimensionMismatch {
                expected: custom.dim,
                found: custom.center.len(),
            });
        }
        if !(custom.scale > 0.0) {
            return Err(Error::InvalidParameter(
                "custom density scale must be positive".into(),
            ));
        }
        let model = DensityModel {
            family: Family::Custom(custom),
        };
        let mass = model.total_mass(1e-9)?;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::NonNormalized { integral: mass });
        }
        Ok(model)
    }

    /// Uniform density on an axis-aligned box, with a sampler.
    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let dim = lo.len();
        let support = SupportDescriptor::Box {
            lo: lo.clone(),
            hi: hi.clone(),
        };
        support.validate(dim)?;
        let vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
        let (l2, h2) = (lo.clone(), hi.clone());
        let density: DensityFn = Arc::new(move |x: &[f64]| {
            let inside = x
                .iter()
                .zip(l2.iter().zip(&h2))
                .all(|(v, (l, h))| *v >= *l && *v < *h);
            if inside {
                1.0 / vol
            } else {
                0.0
            }
        });
        let (l3, h3) = (lo.clone(), hi.clone());
        let sampler: SamplerFn = Arc::new(move |rng: &mut dyn RngCore| {
            l3.iter()
                .zip(&h3)
                .map(|(l, h)| l + (h - l) * rng.random::<f64>())
                .collect()
        });
        Self::custom(
            CustomDensity::new(dim, density, support)
                .with_sampler(sampler)
                .with_params(lo.iter().chain(hi.iter()).copied().collect()),
        )
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            Family::Exponential { .. } | Family::Gaussian1D { .. } => 1,
            Family::GaussianND(g) => g.mean.len(),
            Family::Custom(c) => c.dim,
        }
    }

    /// The parameter vector θ of the model.
    pub fn params(&self) -> Vec<f64> {
        match &self.family {
            Family::Exponential { rate } => vec![*rate],
            Family::Gaussian1D { mean, variance } => vec![*mean, *variance],
            Family::GaussianND(g) => g.mean.iter().copied().collect(),
            Family::Custom(c) => c.params.clone(),
        }
    }

    pub fn support(&self) -> SupportDescriptor {
        match &self.family {
            Family::Exponential { .. } => SupportDescriptor::HalfLine { start: 0.0 },
            Family::Gaussian1D { .. } | Family::GaussianND(_) => SupportDescriptor::FullLine,
            Family::Custom(c) => c.support.clone(),
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Exponential { rate } => {
                if x[0] < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x[0]).exp()
                }
            }
            Family::Gaussian1D { mean, variance } => {
                let z = x[0] - mean;
                (-0.5 * z * z / variance).exp() / (2.0 * PI * variance).sqrt()
            }
            Family::GaussianND(_) => self.ln_density(x).exp(),
            Family::Custom(c) => (c.density)(x),
        }
    }

    /// Natural log of the density; `-∞` outside the support.
    pub fn ln_density(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Exponential { rate } => {
                if x[0] < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * x[0]
                }
            }
            Family::Gaussian1D { mean, variance } => {
                let z = x[0] - mean;
                -0.5 * (LN_2PI + variance.ln()) - 0.5 * z * z / variance
            }
            Family::GaussianND(g) => {
                let n = x.len();
                let mut q = 0.0;
                for i in 0..n {
                    let di = x[i] - g.mean[i];
                    for j in 0..n {
                        q += di * g.precision[(i, j)] * (x[j] - g.mean[j]);
                    }
                }
                g.ln_norm - 0.5 * q
            }
            Family::Custom(c) => (c.density)(x).ln(),
        }
    }

    /// Reference point for truncation radii.
    pub fn center(&self) -> Vec<f64> {
        match &self.family {
            Family::Exponential { .. } => vec![0.0],
            Family::Gaussian1D { mean, .. } => vec![*mean],
            Family::GaussianND(g) => g.mean.iter().copied().collect(),
            Family::Custom(c) => c.center.clone(),
        }
    }

    /// Characteristic length of the density's bulk.
    pub fn scale(&self) -> f64 {
        match &self.family {
            Family::Exponential { rate } => 1.0 / rate,
            Family::Gaussian1D { variance, .. } => variance.sqrt(),
            Family::GaussianND(g) => g.max_eig.sqrt(),
            Family::Custom(c) => c.scale,
        }
    }

    /// Mean vector where known in closed form.
    pub fn mean(&self) -> Option<Vec<f64>> {
        match &self.family {
            Family::Exponential { rate } => Some(vec![1.0 / rate]),
            Family::Gaussian1D { mean, .. } => Some(vec![*mean]),
            Family::GaussianND(g) => Some(g.mean.iter().copied().collect()),
            Family::Custom(_) => None,
        }
    }

    /// Upper bound on `p(x)` over `‖x - center‖ ≥ r`. `None` when the model
    /// declares no envelope.
    pub fn density_envelope(&self, r: f64) -> Option<f64> {
        let r = r.max(0.0);
        match &self.family {
            Family::Exponential { rate } => Some(rate * (-rate * r).exp()),
            Family::Gaussian1D { variance, .. } => {
                Some((-0.5 * r * r / variance).exp() / (2.0 * PI * variance).sqrt())
            }
            Family::GaussianND(g) => Some((g.ln_norm - 0.5 * r * r / g.max_eig).exp()),
            Family::Custom(c) => {
                if let Some(env) = &c.envelope {
                    return Some(env(r));
                }
                match c.box_radius() {
                    Some(br) if r > br => Some(0.0),
                    Some(_) => Some(f64::INFINITY),
                    None => None,
                }
            }
        }
    }

    /// `∫_a^∞ s^k · envelope(s) ds` with `envelope(s) = envelope(0)` for `s < 0`.
    pub fn envelope_moment(&self, a: f64, k: u32) -> Option<f64> {
        let neg = if a < 0.0 {
            let e0 = self.density_envelope(0.0)?;
            // ∫_a^0 s^k ds, in absolute value
            e0 * a.abs().powi(k as i32 + 1) / (k as f64 + 1.0)
        } else {
            0.0
        };
        let a0 = a.max(0.0);
        let tail = match (&self.family, k) {
            (Family::Exponential { rate }, 0) => (-rate * a0).exp(),
            (Family::Gaussian1D { variance, .. }, 0) => {
                0.5 * libm::erfc(a0 / (variance.sqrt() * SQRT_2))
            }
            _ => {
                let scale = self.scale();
                let f =
                    |s: f64| s.powi(k as i32) * self.density_envelope(s).unwrap_or(f64::INFINITY);
                if self.density_envelope(a0)?.is_infinite() {
                    return Some(f64::INFINITY);
                }
                let opts = QuadOptions {
                    abs_tol: 1e-18,
                    max_panels: 5_000,
                    initial_panels: 8,
                };
                integrate(f, Interval::UpperHalf { start: a0, scale }, &opts)
                    .map(|r| r.value() + r.error)
                    .unwrap_or(f64::INFINITY)
            }
        };
        Some(neg + tail)
    }

    /// Upper bound on `P(‖X - center‖ > r)`. `None` without an envelope.
    pub fn tail_mass(&self, r: f64) -> Option<f64> {
        if r <= 0.0 {
            return Some(1.0);
        }
        match &self.family {
            Family::Exponential { rate } => Some((-rate * r).exp()),
            Family::Gaussian1D { variance, .. } => Some(libm::erfc(r / (variance.sqrt() * SQRT_2))),
            Family::GaussianND(g) => {
                // Chernoff bound on the chi-square tail, ‖X-μ‖² ≤ λ_max·χ²_n.
                let n = g.mean.len() as f64;
                let t = r * r / g.max_eig;
                if t <= n {
                    Some(1.0)
                } else {
                    Some((-0.5 * (t - n - n * (t / n).ln())).exp().min(1.0))
                }
            }
            Family::Custom(c) => {
                if let Some(br) = c.box_radius() {
                    if r >= br {
                        return Some(0.0);
                    }
                    if c.envelope.is_none() {
                        return Some(1.0);
                    }
                }
                c.envelope.as_ref()?;
                let n = c.dim;
                let sphere = unit_sphere_area(n);
                let m = self.envelope_moment(r, n as u32 - 1)?;
                Some((sphere * m).min(1.0))
            }
        }
    }

    /// One-dimensional integration ranges covering the support, one per axis.
    pub fn support_intervals(&self) -> Vec<Interval> {
        let scale = self.scale();
        match &self.family {
            Family::Exponential { rate } => vec![Interval::UpperHalf {
                start: 0.0,
                scale: 1.0 / rate,
            }],
            Family::Gaussian1D { mean, variance } => {
                vec![Interval::Line {
                    center: *mean,
                    scale: variance.sqrt(),
                }]
            }
            Family::GaussianND(g) => (0..g.mean.len())
                .map(|i| Interval::Line {
                    center: g.mean[i],
                    scale: g.cov[(i, i)].sqrt(),
                })
                .collect(),
            Family::Custom(c) => match &c.support {
                SupportDescriptor::HalfLine { start } => vec![Interval::UpperHalf {
                    start: *start,
                    scale,
                }],
                SupportDescriptor::FullLine => c
                    .center
                    .iter()
                    .map(|&m| Interval::Line { center: m, scale })
                    .collect(),
                SupportDescriptor::Box { lo, hi } => lo
                    .iter()
                    .zip(hi)
                    .map(|(&l, &h)| Interval::finite(l, h))
                    .collect(),
            },
        }
    }

    /// `∫ p` over the support, dimensions 1 and 2.
    pub fn total_mass(&self, tol: f64) -> Result<f64> {
        let iv = self.support_intervals();
        let opts = QuadOptions::with_tol(tol);
        match iv.len() {
            1 => Ok(integrate(|x| self.density(&[x]), iv[0], &opts)?.value()),
            2 => Ok(integrate_2d(
                1,
                |x, y, o: &mut [f64]| o[0] = self.density(&[x, y]),
                iv[0],
                iv[1],
                &opts,
            )?
            .value()),
            n => Err(Error::UnsupportedDimension {
                op: "density quadrature",
                dim: n,
                max: 2,
            }),
        }
    }

    pub fn has_sampler(&self) -> bool {
        !matches!(&self.family, Family::Custom(c) if c.sampler.is_none())
    }

    /// One draw from the model.
    pub fn draw(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        match &self.family {
            Family::Exponential { rate } => {
                let u: f64 = rng.random();
                Ok(vec![-(-u).ln_1p() / rate])
            }
            Family::Gaussian1D { mean, variance } => {
                let z: f64 = StandardNormal.sample(rng);
                Ok(vec![mean + variance.sqrt() * z])
            }
            Family::GaussianND(g) => {
                let n = g.mean.len();
                let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng));
                Ok((&g.mean + &g.chol * z).as_slice().to_vec())
            }
            Family::Custom(c) => c.sampler.as_ref().map(|s| s(rng)).ok_or(Error::NoSampler),
        }
    }

    /// `count` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidParameter(
                "sample count must be positive".into(),
            ));
        }
        if !self.has_sampler() {
            return Err(Error::NoSampler);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Surface area of the unit sphere in `R^n` (2 for n = 1).
pub fn unit_sphere_area(n: usize) -> f64 {
    let half = 0.5 * n as f64;
    2.0 * PI.powf(half) / libm::tgamma(half)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal survival function, `1 - Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// `Φ(b) - Φ(a)` for `a ≤ b`, evaluated on the side that avoids cancellation.
pub fn normal_interval_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else {
        1.0 - normal_sf(b) - normal_cdf(a)
    }
}

/// Wrapped exponential density on `[0, α)`: `νe^{-νy}/(1 - e^{-να})`.
pub fn closed_wrapped_exponential(rate: f64, alpha: f64, y: f64) -> Result<f64> {
    if !(0.0..alpha).contains(&y) {
        return Err(Error::OutOfDomain {
            value: y,
            lo: 0.0,
            hi: alpha,
        });
    }
    Ok(rate * (-rate * y).exp() / -(-rate * alpha).exp_m1())
}

/// Quantized exponential mass at `λ = α·index`: `e^{-νλ}(1 - e^{-να})`.
pub fn closed_quantized_exponential(rate: f64, alpha: f64, index: i64) -> f64 {
    if index < 0 {
        return 0.0;
    }
    (-rate * alpha * index as f64).exp() * -(-rate * alpha).exp_m1()
}

/// Wrapped Gaussian density on `αZ`, a theta-type series truncated so the
/// omitted terms sum to less than `tol`.
pub fn closed_wrapped_gaussian(mean: f64, variance: f64, alpha: f64, y: f64, tol: f64) -> f64 {
    let sigma = variance.sqrt();
    let norm = 1.0 / (2.0 * PI * variance).sqrt();
    let omitted =
        |t: f64| 2.0 * (norm * (-0.5 * t * t / variance).exp() + normal_sf(t / sigma) / alpha);
    let mut k = 6.0;
    while omitted(k * sigma) >= tol && k < 1e4 {
        k += 1.0;
    }
    let reach = k * sigma;
    let d = y - mean;
    let lo = ((-reach - d) / alpha).ceil() as i64;
    let hi = ((reach - d) / alpha).floor() as i64;
    (lo..=hi)
        .map(|i| {
            let z = d + alpha * i as f64;
            (-0.5 * z * z / variance).exp()
        })
        .sum::<f64>()
        * norm
}

/// Quantized Gaussian mass on the cell `[λ - α/2, λ + α/2)`, `λ = α·index`.
pub fn closed_quantized_gaussian(mean: f64, variance: f64, alpha: f64, index: i64) -> f64 {
    let sigma = variance.sqrt();
    let lam = alpha * index as f64;
    normal_interval_mass(
        (lam - 0.5 * alpha - mean) / sigma,
        (lam + 0.5 * alpha - mean) / sigma,
    )
}

/// A family `θ ↦ p_θ` of densities.
pub trait ParametricFamily: Send + Sync {
    fn param_dim(&self) -> usize;
    fn model(&self, theta: &[f64]) -> Result<DensityModel>;
}

/// Exponential densities parametrized by the rate ν.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialFamily;

impl ParametricFamily for ExponentialFamily {
    fn param_dim(&self) -> usize {
        1
    }
    fn model(&self, theta: &[f64]) -> Result<DensityModel> {
        DensityModel::exponential(theta[0])
    }
}

/// Univariate Gaussians with a chosen set of free parameters.
#[derive(Debug, Clone, Copy)]
pub enum GaussianFamily {
    /// θ = (μ), fixed variance.
    Mean { variance: f64 },
    /// θ = (σ²), fixed mean.
    Variance { mean: f64 },
    /// θ = (μ, σ²).
    MeanVariance,
}

impl ParametricFamily for GaussianFamily {
    fn param_dim(&self) -> usize {
        match self {
            GaussianFamily::MeanVariance => 2,
            _ => 1,
        }
    }
    fn model(&self, theta: &[f64]) -> Result<DensityModel> {
        match *self {
            GaussianFamily::Mean { variance } => DensityModel::gaussian(theta[0], variance),
            GaussianFamily::Variance { mean } => DensityModel::gaussian(mean, theta[0]),
            GaussianFamily::MeanVariance => DensityModel::gaussian(theta[0], theta[1]),
        }
    }
}

/// A family given by a closure, with its parameter dimension.
pub struct FnFamily<F> {
    pub dim: usize,
    pub build: F,
}

impl<F> ParametricFamily for FnFamily<F>
where
    F: Fn(&[f64]) -> Result<DensityModel> + Send + Sync,
{
    fn param_dim(&self) -> usize {
        self.dim
    }
    fn model(&self, theta: &[f64]) -> Result<DensityModel> {
        (self.build)(theta)
    }
}
