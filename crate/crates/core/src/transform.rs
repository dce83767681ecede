//! Wrapping and quantization of a density through a lattice.
//!
//! `p_π(y) = Σ_λ p(y + λ)` on the fundamental domain and
//! `p_Q(λ) = ∫_D p(y + λ) dy` on the lattice. Both are truncated with a
//! certified bound derived from the model's envelope: the lattice points left
//! out of a ball of radius `R` own disjoint Voronoi cells inside the
//! complement of the ball of radius `R - ρ` (ρ the covering radius), which
//! turns the omitted sum into a radial integral of the envelope.

use std::collections::BTreeMap;
use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::{unit_sphere_area, DensityModel, SupportDescriptor};
use crate::error::{Error, Result};
use crate::lattice::{CellRegion, FundamentalDomain, Lattice, LatticePoint};
use crate::quadrature::{integrate, integrate_2d, integrate_vec, Interval, QuadOptions};

/// Default truncation tolerance for closed-form cross-checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default truncation tolerance for parameter sweeps.
pub const SWEEP_TOL: f64 = 1e-8;

/// Samples drawn when a quantized pmf has to be estimated by Monte Carlo.
const MC_SAMPLES: usize = 200_000;
const MC_SEED: u64 = 0x5eed;

/// Upper bound on `Σ_{‖v‖ > R} g(‖v‖)` over a translate of `lattice`.
fn lattice_sum_tail(model: &DensityModel, lattice: &Lattice, reach: f64) -> Option<f64> {
    let n = lattice.dim();
    let rho = lattice.covering_radius_bound();
    let a = reach - 2.0 * rho;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..n {
        // C(n-1, j) ρ^{n-1-j} ∫_a^∞ s^j g(s) ds
        sum += binom * rho.powi((n - 1 - j) as i32) * model.envelope_moment(a, j as u32)?;
        binom = binom * (n - 1 - j) as f64 / (j + 1) as f64;
    }
    Some(unit_sphere_area(n) / lattice.covolume() * sum)
}

/// Smallest radius `K·scale`, `K = 6, 7, …`, whose lattice-sum tail is below `tol`.
fn wrap_reach(model: &DensityModel, lattice: &Lattice, tol: f64) -> Result<(f64, f64)> {
    let scale = model.scale();
    let floor = 2.0 * lattice.covering_radius_bound();
    let mut k = 6.0;
    loop {
        let reach = (k * scale).max(floor + scale);
        let bound = lattice_sum_tail(model, lattice, reach).ok_or(Error::NoTailBound)?;
        if bound < tol {
            return Ok((reach, bound));
        }
        if k > 1e5 {
            return Err(Error::NoTailBound);
        }
        k += 1.0;
    }
}

/// Lattice points `λ` with `‖y + λ - c‖ ≤ reach`, as coordinates.
fn lattice_terms(lattice: &Lattice, y: &[f64], c: &[f64], reach: f64) -> Vec<Vec<f64>> {
    if lattice.dim() == 1 {
        let a = lattice.generator()[(0, 0)].abs();
        let d = y[0] - c[0];
        let lo = ((-reach - d) / a).ceil() as i64;
        let hi = ((reach - d) / a).floor() as i64;
        return (lo..=hi).map(|k| vec![a * k as f64]).collect();
    }
    let shift: Vec<f64> = c.iter().zip(y).map(|(c, y)| c - y).collect();
    let mut out = Vec::new();
    lattice.for_each_in_ball(&shift, reach, |_, l| out.push(l.to_vec()));
    out
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `p_π`, the wrapped density on a fundamental domain.
#[derive(Debug, Clone)]
pub struct WrappedDensity {
    model: DensityModel,
    domain: FundamentalDomain,
    tol: f64,
    reach: f64,
    tail_bound: f64,
    center: Vec<f64>,
}

impl WrappedDensity {
    pub fn model(&self) -> &DensityModel {
        &self.model
    }
    pub fn domain(&self) -> &FundamentalDomain {
        &self.domain
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    /// Certified bound on the omitted part of the lattice sum, at any `y`.
    pub fn achieved_tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `Σ_λ p(y + λ)` over the retained lattice points. Λ-periodic in `y`.
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        if self.domain.dim() == 1 {
            let a = self.domain.lattice().generator()[(0, 0)].abs();
            let d = y[0] - self.center[0];
            let lo = ((-self.reach - d) / a).ceil() as i64;
            let hi = ((self.reach - d) / a).floor() as i64;
            return (lo..=hi)
                .map(|k| self.model.density(&[y[0] + a * k as f64]))
                .sum();
        }
        let shift: Vec<f64> = self.center.iter().zip(y).map(|(c, y)| c - y).collect();
        let mut buf = vec![0.0; y.len()];
        let mut sum = 0.0;
        self.domain
            .lattice()
            .for_each_in_ball(&shift, self.reach, |_, l| {
                for (b, (yi, li)) in buf.iter_mut().zip(y.iter().zip(l)) {
                    *b = yi + li;
                }
                sum += self.model.density(&buf);
            });
        sum
    }

    /// `ln p_π(y)` by log-sum-exp over the log-density, robust to underflow.
    pub fn ln_evaluate(&self, y: &[f64]) -> f64 {
        let logs: Vec<f64> = lattice_terms(self.domain.lattice(), y, &self.center, self.reach)
            .iter()
            .map(|l| self.model.ln_density(&add(y, l)))
            .filter(|v| *v > f64::NEG_INFINITY)
            .collect();
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + logs.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    }

    /// `∫_D p_π`, which the Weil formula pins to 1.
    pub fn integral(&self, tol: f64) -> Result<f64> {
        Ok(integrate_periodic(&self.domain, 1, |y, o| o[0] = self.evaluate(y), tol)?[0])
    }

    /// Wrapped CDF `∫_{lo}^{y} p_π` for one-dimensional domains.
    pub fn cdf(&self, y: f64, tol: f64) -> Result<f64> {
        let (lo, hi) = self
            .domain
            .interval_bounds()
            .ok_or(Error::UnsupportedDimension {
                op: "wrapped cdf",
                dim: self.domain.dim(),
                max: 1,
            })?;
        let y = y.clamp(lo, hi);
        Ok(integrate(
            |t| self.evaluate(&[t]),
            Interval::finite(lo, y),
            &QuadOptions::with_tol(tol),
        )?
        .value())
    }

    /// Writes `y_1,…,y_n,density` on a uniform grid of `per_axis` points per
    /// basis direction of the domain.
    pub fn write_grid_csv<W: Write>(&self, mut w: W, per_axis: usize) -> io::Result<()> {
        let n = self.domain.dim();
        let header: Vec<String> = (1..=n)
            .map(|i| format!("y_{i}"))
            .chain(["density".into()])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for y in domain_grid(&self.domain, per_axis) {
            let y: Vec<f64> = y.iter().map(|v| (v * 1e12).round() / 1e12 + 0.0).collect();
            let row: Vec<String> = y.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{},{:?}", row.join(","), self.evaluate(&y))?;
        }
        Ok(())
    }
}

/// Uniform grid over the periodic region of a domain (lower faces included).
pub fn domain_grid(domain: &FundamentalDomain, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(1);
    match domain.periodic_region() {
        CellRegion::Interval { lo, hi } => {
            let h = (hi - lo) / per_axis as f64;
            (0..per_axis).map(|i| vec![lo + h * i as f64]).collect()
        }
        CellRegion::Parallelotope { origin, basis } => {
            let n = origin.len();
            let total = per_axis.pow(n as u32);
            (0..total)
                .map(|mut idx| {
                    let mut t = vec![0.0; n];
                    for ti in t.iter_mut().rev() {
                        *ti = (idx % per_axis) as f64 / per_axis as f64;
                        idx /= per_axis;
                    }
                    let v = &basis * DVector::from_vec(t);
                    origin.iter().zip(v.iter()).map(|(o, x)| o + x).collect()
                })
                .collect()
        }
    }
}

/// Integrates a Λ-periodic vector function over the fundamental domain.
pub(crate) fn integrate_periodic<F>(
    domain: &FundamentalDomain,
    k: usize,
    f: F,
    tol: f64,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let opts = QuadOptions::with_tol(tol);
    match domain.periodic_region() {
        CellRegion::Interval { lo, hi } => Ok(integrate_vec(
            k,
            |x, o: &mut [f64]| f(&[x], o),
            Interval::finite(lo, hi),
            &opts,
        )?
        .values),
        CellRegion::Parallelotope { origin, basis } => {
            if origin.len() != 2 {
                return Err(Error::UnsupportedDimension {
                    op: "domain quadrature",
                    dim: origin.len(),
                    max: 2,
                });
            }
            let det = basis.determinant().abs();
            let scaled = QuadOptions::with_tol(tol / det);
            let r = integrate_2d(
                k,
                |s, t, o: &mut [f64]| {
                    let x = [
                        origin[0] + basis[(0, 0)] * s + basis[(0, 1)] * t,
                        origin[1] + basis[(1, 0)] * s + basis[(1, 1)] * t,
                    ];
                    f(&x, o);
                },
                Interval::finite(0.0, 1.0),
                Interval::finite(0.0, 1.0),
                &scaled,
            )?;
            Ok(r.values.into_iter().map(|v| v * det).collect())
        }
    }
}

/// Builds the wrapped density `p_π` with a certified truncation below `tol`.
pub fn wrap_density(
    model: &DensityModel,
    domain: &FundamentalDomain,
    tol: f64,
) -> Result<WrappedDensity> {
    check_dims(model, domain)?;
    check_tol(tol)?;
    let (reach, tail_bound) = wrap_reach(model, domain.lattice(), tol)?;
    Ok(WrappedDensity {
        model: model.clone(),
        domain: domain.clone(),
        tol,
        reach,
        tail_bound,
        center: model.center(),
    })
}

fn check_dims(model: &DensityModel, domain: &FundamentalDomain) -> Result<()> {
    if model.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: model.dim(),
        });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// `p_Q`, the quantized probability mass function on the lattice.
#[derive(Debug, Clone)]
pub struct QuantizedPmf {
    domain: FundamentalDomain,
    table: BTreeMap<Vec<i64>, f64>,
    truncation_mass: f64,
    std_error: Option<f64>,
}

impl QuantizedPmf {
    pub fn domain(&self) -> &FundamentalDomain {
        &self.domain
    }

    /// Nonzero masses keyed by lattice coefficients, in lexicographic order.
    pub fn table(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.table
    }

    /// Certified bound on the probability mass not represented in the table.
    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    /// Standard error of the entries when estimated by Monte Carlo.
    pub fn std_error(&self) -> Option<f64> {
        self.std_error
    }

    pub fn prob(&self, coeffs: &[i64]) -> f64 {
        self.table.get(coeffs).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.table.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, f64)> + '_ {
        self.table
            .iter()
            .map(|(c, p)| (self.domain.lattice().point(c), *p))
    }

    /// `E[X_Q]` over the table.
    pub fn mean(&self) -> Vec<f64> {
        let n = self.domain.dim();
        let mut m = vec![0.0; n];
        for (pt, p) in self.iter() {
            for i in 0..n {
                m[i] += p * pt.coords[i];
            }
        }
        m
    }

    /// `Cov[X_Q]` over the table.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.domain.dim();
        let m = self.mean();
        let mut c = DMatrix::zeros(n, n);
        for (pt, p) in self.iter() {
            for i in 0..n {
                for j in 0..n {
                    c[(i, j)] += p * (pt.coords[i] - m[i]) * (pt.coords[j] - m[j]);
                }
            }
        }
        c
    }

    /// Writes `coeff_1,…,coeff_n,prob`, one row per table entry.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.domain.dim();
        let header: Vec<String> = (1..=n)
            .map(|i| format!("coeff_{i}"))
            .chain(["prob".into()])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (c, p) in &self.table {
            let row: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{},{p:?}", row.join(","))?;
        }
        Ok(())
    }
}

/// Smallest radius `K·scale`, `K = 1, 2, …`, with tail mass at most `budget`.
fn mass_reach(model: &DensityModel, budget: f64) -> Result<(f64, f64)> {
    mass_reach_capped(model, budget, 1e5).ok_or(Error::NoTailBound)?
}

fn mass_reach_capped(model: &DensityModel, budget: f64, max_k: f64) -> Option<Result<(f64, f64)>> {
    let scale = model.scale();
    let mut k = 1.0;
    loop {
        let t = match model.tail_mass(k * scale) {
            Some(t) => t,
            None => return Some(Err(Error::NoTailBound)),
        };
        if t <= budget {
            return Some(Ok((k * scale, t)));
        }
        if k > max_k {
            return None;
        }
        k += 1.0;
    }
}

/// Support of a 1-D model as an interval.
fn support_span(model: &DensityModel) -> (f64, f64) {
    match model.support() {
        SupportDescriptor::HalfLine { start } => (start, f64::INFINITY),
        SupportDescriptor::FullLine => (f64::NEG_INFINITY, f64::INFINITY),
        SupportDescriptor::Box { lo, hi } => (lo[0], hi[0]),
    }
}

/// Tail mass below which one-dimensional tables stop growing.
const TINY_MASS: f64 = 1e-300;

/// Lattice cells that may meet the ball holding all but `tol/2` of the mass.
/// In one dimension the ball is widened, when a moderate radius allows it,
/// until the tail is negligible in double precision, so small masses far
/// out are still tabulated.
fn candidate_cells(
    model: &DensityModel,
    domain: &FundamentalDomain,
    tol: f64,
) -> Result<(Vec<LatticePoint>, f64)> {
    let wide = if domain.dim() == 1 {
        mass_reach_capped(model, TINY_MASS.min(0.5 * tol), 1000.0)
    } else {
        None
    };
    let (reach, tail) = match wide {
        Some(r) => r?,
        None => mass_reach(model, 0.5 * tol)?,
    };
    let c = model.center();
    let mut cells = domain
        .lattice()
        .enumerate_points(&c, reach + domain.radius_bound())?;
    // outward from the mean
    let m = model.mean().unwrap_or(c);
    cells.sort_by(|p, q| {
        let dp: f64 = p
            .coords
            .iter()
            .zip(&m)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let dq: f64 = q
            .coords
            .iter()
            .zip(&m)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        dp.total_cmp(&dq).then_with(|| p.coeffs.cmp(&q.coeffs))
    });
    Ok((cells, tail))
}

/// Integrates `k` weighted moments of `p(y + λ)` over `y ∈ D` for one cell.
///
/// `weight(y, p, out)` receives the position `y` inside the domain and the
/// density value at `y + λ`.
fn cell_integral<G>(
    model: &DensityModel,
    domain: &FundamentalDomain,
    cell: &LatticePoint,
    k: usize,
    weight: &G,
    tol: f64,
) -> Result<Vec<f64>>
where
    G: Fn(&[f64], f64, &mut [f64]),
{
    match domain.exact_region() {
        Some(CellRegion::Interval { lo, hi }) => {
            let shift = cell.coords[0];
            let (s_lo, s_hi) = support_span(model);
            let a = (lo + shift).max(s_lo);
            let b = (hi + shift).min(s_hi);
            if !(b > a) {
                return Ok(vec![0.0; k]);
            }
            let opts = QuadOptions::with_tol(tol);
            Ok(integrate_vec(
                k,
                |x, o: &mut [f64]| {
                    let p = model.density(&[x]);
                    weight(&[x - shift], p, o)
                },
                Interval::finite(a, b),
                &opts,
            )?
            .values)
        }
        Some(CellRegion::Parallelotope { origin, basis }) if origin.len() == 2 => {
            let det = basis.determinant().abs();
            let opts = QuadOptions::with_tol(tol / det);
            let r = integrate_2d(
                k,
                |s, t, o: &mut [f64]| {
                    let y = [
                        origin[0] + basis[(0, 0)] * s + basis[(0, 1)] * t,
                        origin[1] + basis[(1, 0)] * s + basis[(1, 1)] * t,
                    ];
                    let p = model.density(&add(&y, &cell.coords));
                    weight(&y, p, o)
                },
                Interval::finite(0.0, 1.0),
                Interval::finite(0.0, 1.0),
                &opts,
            )?;
            Ok(r.values.into_iter().map(|v| v * det).collect())
        }
        _ => Err(Error::UnsupportedDimension {
            op: "cell quadrature",
            dim: domain.dim(),
            max: 2,
        }),
    }
}

/// Builds `p_Q` by integrating the density over each cell `λ + D`.
///
/// Cells are visited outward from the mean until the model's tail bound
/// certifies that less than `tol/2` of the mass lies beyond them; each cell
/// gets an absolute error budget of `tol/(2·#cells)`. Domains without an
/// interval or 2-D parallelotope shape fall back to Monte Carlo with a
/// reported standard error.
pub fn quantize_density(
    model: &DensityModel,
    domain: &FundamentalDomain,
    tol: f64,
) -> Result<QuantizedPmf> {
    check_dims(model, domain)?;
    check_tol(tol)?;
    let exact = matches!(domain.exact_region(), Some(CellRegion::Interval { .. }))
        || (domain.dim() == 2 && domain.exact_region().is_some());
    if !exact {
        return quantize_density_mc(model, domain, MC_SAMPLES, MC_SEED);
    }
    let (cells, tail) = candidate_cells(model, domain, tol)?;
    let per_cell = 0.5 * tol / cells.len().max(1) as f64;
    let mut table = BTreeMap::new();
    for cell in &cells {
        let mass = cell_integral(
            model,
            domain,
            cell,
            1,
            &|_, p, o: &mut [f64]| o[0] = p,
            per_cell,
        )?[0];
        if mass > 0.0 {
            table.insert(cell.coeffs.clone(), mass);
        }
    }
    Ok(QuantizedPmf {
        domain: domain.clone(),
        table,
        truncation_mass: tail,
        std_error: None,
    })
}

/// Monte Carlo estimate of `p_Q` from `count` seeded draws.
pub fn quantize_density_mc(
    model: &DensityModel,
    domain: &FundamentalDomain,
    count: usize,
    seed: u64,
) -> Result<QuantizedPmf> {
    check_dims(model, domain)?;
    let mut counts: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for x in model.sample(count, seed)? {
        *counts.entry(domain.quantize_point(&x)?.coeffs).or_default() += 1;
    }
    let n = count as f64;
    let mut worst = 0.0f64;
    let table = counts
        .into_iter()
        .map(|(c, k)| {
            let p = k as f64 / n;
            worst = worst.max((p * (1.0 - p) / n).sqrt());
            (c, p)
        })
        .collect();
    Ok(QuantizedPmf {
        domain: domain.clone(),
        table,
        truncation_mass: 0.0,
        std_error: Some(worst),
    })
}

/// `(p_π ⊗ p_Q)(x) = p_π(π(x))·p_Q(Q(x))`.
pub fn product_density(wrapped: &WrappedDensity, pmf: &QuantizedPmf, x: &[f64]) -> Result<f64> {
    if wrapped.domain() != pmf.domain() {
        return Err(Error::InvalidParameter(
            "wrapped density and pmf use different domains".into(),
        ));
    }
    let (y, q) = wrapped.domain().decompose_point(x)?;
    Ok(wrapped.evaluate(&y) * pmf.prob(&q.coeffs))
}

/// Conditional law of `X_Q` given `X_π = c`: `p(c + λ) / p_π(c)`.
pub fn conditional_discretization(
    model: &DensityModel,
    domain: &FundamentalDomain,
    c: &[f64],
    tol: f64,
) -> Result<QuantizedPmf> {
    let wrapped = wrap_density(model, domain, tol)?;
    if !domain.contains(c)? {
        return Err(Error::InvalidParameter(format!(
            "conditioning point {c:?} is outside the domain"
        )));
    }
    let terms: Vec<(Vec<i64>, f64)> =
        lattice_terms(domain.lattice(), c, &wrapped.center, wrapped.reach)
            .into_iter()
            .map(|l| {
                let coeffs: Vec<i64> = domain
                    .lattice()
                    .basis_coordinates(&l)
                    .iter()
                    .map(|t| t.round() as i64)
                    .collect();
                (coeffs, model.density(&add(c, &l)))
            })
            .collect();
    let p_pi: f64 = terms.iter().map(|(_, p)| p).sum();
    if p_pi < 1e-300 {
        return Err(Error::ZeroWrappedMass { value: p_pi });
    }
    let table = terms
        .into_iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(k, p)| (k, p / p_pi))
        .collect();
    Ok(QuantizedPmf {
        domain: domain.clone(),
        table,
        truncation_mass: wrapped.tail_bound / p_pi,
        std_error: None,
    })
}

/// One draw split into its wrapped and quantized parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSample {
    pub x: Vec<f64>,
    pub x_pi: Vec<f64>,
    pub x_q: LatticePoint,
}

/// Draws `count` points and splits each as `x = x_π + x_Q`.
pub fn decompose_samples(
    model: &DensityModel,
    domain: &FundamentalDomain,
    count: usize,
    seed: u64,
) -> Result<Vec<DecompositionSample>> {
    check_dims(model, domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !model.has_sampler() {
        return Err(Error::NoSampler);
    }
    (0..count)
        .map(|_| {
            let x = model.draw(&mut rng)?;
            let (x_pi, x_q) = domain.decompose_point(&x)?;
            Ok(DecompositionSample { x, x_pi, x_q })
        })
        .collect()
}

/// Terms of `E[X] = E[X_π] + E[X_Q]` and
/// `Var[X] = Var[X_π] + Var[X_Q] + Cov[X_π,X_Q] + Cov[X_Q,X_π]`.
#[derive(Debug, Clone)]
pub struct MomentDecomposition {
    pub mean_pi: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub var_pi: DMatrix<f64>,
    pub var_q: DMatrix<f64>,
    pub cross_cov: DMatrix<f64>,
    pub cross_cov_t: DMatrix<f64>,
    /// `E[X]` computed directly from the model or the raw samples.
    pub total_mean: Vec<f64>,
    /// `Var[X]` computed directly from the model or the raw samples.
    pub total_var: DMatrix<f64>,
}

impl MomentDecomposition {
    pub fn mean_residual(&self) -> f64 {
        self.total_mean
            .iter()
            .zip(self.mean_pi.iter().zip(&self.mean_q))
            .map(|(t, (a, b))| (t - a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn variance_residual(&self) -> f64 {
        (&self.total_var - &self.var_pi - &self.var_q - &self.cross_cov - &self.cross_cov_t).amax()
    }
}

/// Moment decomposition from decomposed samples.
pub fn moments_empirical(samples: &[DecompositionSample]) -> Result<MomentDecomposition> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidParameter("no samples".into()))?;
    let n = first.x.len();
    let count = samples.len() as f64;
    let col = |f: &dyn Fn(&DecompositionSample) -> Vec<f64>| -> Vec<DVector<f64>> {
        samples.iter().map(|s| DVector::from_vec(f(s))).collect()
    };
    let xs = col(&|s| s.x.clone());
    let ps = col(&|s| s.x_pi.clone());
    let qs = col(&|s| s.x_q.coords.clone());
    let mean = |v: &[DVector<f64>]| v.iter().fold(DVector::zeros(n), |a, b| a + b) / count;
    let (mx, mp, mq) = (mean(&xs), mean(&ps), mean(&qs));
    let cov = |a: &[DVector<f64>], ma: &DVector<f64>, b: &[DVector<f64>], mb: &DVector<f64>| {
        a.iter().zip(b).fold(DMatrix::zeros(n, n), |acc, (u, v)| {
            acc + (u - ma) * (v - mb).transpose()
        }) / count
    };
    Ok(MomentDecomposition {
        mean_pi: mp.as_slice().to_vec(),
        mean_q: mq.as_slice().to_vec(),
        var_pi: cov(&ps, &mp, &ps, &mp),
        var_q: cov(&qs, &mq, &qs, &mq),
        cross_cov: cov(&ps, &mp, &qs, &mq),
        cross_cov_t: cov(&qs, &mq, &ps, &mp),
        total_mean: mx.as_slice().to_vec(),
        total_var: cov(&xs, &mx, &xs, &mx),
    })
}

/// Moment decomposition by quadrature and summation, one-dimensional models.
pub fn moments_analytic(
    model: &DensityModel,
    domain: &FundamentalDomain,
    tol: f64,
) -> Result<MomentDecomposition> {
    check_dims(model, domain)?;
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            op: "analytic moments",
            dim: model.dim(),
            max: 1,
        });
    }
    let (cells, _) = candidate_cells(model, domain, tol)?;
    let per_cell = tol / cells.len().max(1) as f64;
    // Σ over cells of ∫_D [p, y p, y² p](y + λ) dy
    let (mut e_q, mut e_q2, mut e_pi, mut e_pi2, mut e_piq) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for cell in &cells {
        let v = cell_integral(
            model,
            domain,
            cell,
            3,
            &|y: &[f64], p: f64, o: &mut [f64]| {
                o[0] = p;
                o[1] = y[0] * p;
                o[2] = y[0] * y[0] * p;
            },
            per_cell,
        )?;
        let lam = cell.coords[0];
        e_q += lam * v[0];
        e_q2 += lam * lam * v[0];
        e_pi += v[1];
        e_pi2 += v[2];
        e_piq += lam * v[1];
    }
    let iv = model.support_intervals()[0];
    let opts = QuadOptions::with_tol(tol);
    let m = integrate(|x| x * model.density(&[x]), iv, &opts)?.value();
    let v = integrate(|x| (x - m) * (x - m) * model.density(&[x]), iv, &opts)?.value();
    let one = |x: f64| DMatrix::from_element(1, 1, x);
    let cross = e_piq - e_pi * e_q;
    Ok(MomentDecomposition {
        mean_pi: vec![e_pi],
        mean_q: vec![e_q],
        var_pi: one(e_pi2 - e_pi * e_pi),
        var_q: one(e_q2 - e_q * e_q),
        cross_cov: one(cross),
        cross_cov_t: one(cross),
        total_mean: vec![m],
        total_var: one(v),
    })
}
