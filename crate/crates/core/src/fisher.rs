//! Fisher information of a parametric family before and after the lattice
//! decomposition.
//!
//! `g_ij = E[∂_i ℓ ∂_j ℓ]` with `ℓ` the log-density of `X`, `X_π` or `X_Q`.
//! Scores come from central differences of log-densities; expectations from
//! quadrature (continuous levels) or summation over the pmf table.

use std::fmt;
use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::density::{DensityModel, ParametricFamily};
use crate::error::{Error, Result};
use crate::lattice::FundamentalDomain;
use crate::quadrature::{integrate_2d, integrate_vec, QuadOptions};
use crate::transform::{integrate_periodic, quantize_density, wrap_density};

/// Series truncation used for wrapped log-densities inside finite
/// differences, kept far below the step so the scores stay smooth.
const SERIES_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FisherLevel {
    Original,
    Wrapped,
    Quantized,
}

impl FisherLevel {
    pub const ALL: [FisherLevel; 3] = [
        FisherLevel::Original,
        FisherLevel::Wrapped,
        FisherLevel::Quantized,
    ];
}

impl fmt::Display for FisherLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FisherLevel::Original => "G",
            FisherLevel::Wrapped => "G_pi",
            FisherLevel::Quantized => "G_Q",
        })
    }
}

/// Finite-difference and quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    /// Step is `rel_step · max(1, |θ_i|)`.
    pub rel_step: f64,
    /// Absolute tolerance of expectations and pmf tables.
    pub tol: f64,
    /// Run the `h, 2h, 4h` Richardson check for round-off domination.
    pub check_noise: bool,
}

impl Default for FdScheme {
    fn default() -> Self {
        FdScheme {
            rel_step: 1e-4,
            tol: 1e-10,
            check_noise: true,
        }
    }
}

impl FdScheme {
    pub fn step(&self, theta_i: f64) -> f64 {
        self.rel_step * theta_i.abs().max(1.0)
    }
}

fn shifted(theta: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut t = theta.to_vec();
    t[i] += h;
    t
}

/// Models at `θ ± h_i e_i` for every coordinate.
fn shifted_models(
    family: &dyn ParametricFamily,
    theta: &[f64],
    steps: &[f64],
) -> Result<Vec<(DensityModel, DensityModel)>> {
    (0..theta.len())
        .map(|i| {
            Ok((
                family.model(&shifted(theta, i, steps[i]))?,
                family.model(&shifted(theta, i, -steps[i]))?,
            ))
        })
        .collect()
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Packs the upper triangle of `s sᵀ · p` into `out`.
fn outer(p: f64, s: &[f64], out: &mut [f64]) {
    let d = s.len();
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            out[k] = p * s[i] * s[j];
            k += 1;
        }
    }
}

fn unpack(d: usize, v: &[f64]) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            g[(i, j)] = v[k];
            g[(j, i)] = v[k];
            k += 1;
        }
    }
    g
}

fn fisher_with_steps(
    family: &dyn ParametricFamily,
    theta: &[f64],
    level: FisherLevel,
    domain: &FundamentalDomain,
    steps: &[f64],
    tol: f64,
) -> Result<DMatrix<f64>> {
    let d = theta.len();
    let k = d * (d + 1) / 2;
    let base = family.model(theta)?;
    let shifts = shifted_models(family, theta, steps)?;
    match level {
        FisherLevel::Original => {
            let score = |x: &[f64], s: &mut [f64]| {
                for (i, (mp, mm)) in shifts.iter().enumerate() {
                    s[i] = finite_or_zero((mp.ln_density(x) - mm.ln_density(x)) / (2.0 * steps[i]));
                }
            };
            let iv = base.support_intervals();
            let opts = QuadOptions::with_tol(tol);
            let v = match iv.len() {
                1 => {
                    integrate_vec(
                        k,
                        |x, o: &mut [f64]| {
                            let p = base.density(&[x]);
                            let mut s = vec![0.0; d];
                            if p > 0.0 {
                                score(&[x], &mut s);
                            }
                            outer(p, &s, o);
                        },
                        iv[0],
                        &opts,
                    )?
                    .values
                }
                2 => {
                    integrate_2d(
                        k,
                        |x, y, o: &mut [f64]| {
                            let p = base.density(&[x, y]);
                            let mut s = vec![0.0; d];
                            if p > 0.0 {
                                score(&[x, y], &mut s);
                            }
                            outer(p, &s, o);
                        },
                        iv[0],
                        iv[1],
                        &opts,
                    )?
                    .values
                }
                n => {
                    return Err(Error::UnsupportedDimension {
                        op: "fisher quadrature",
                        dim: n,
                        max: 2,
                    })
                }
            };
            Ok(unpack(d, &v))
        }
        FisherLevel::Wrapped => {
            let w = wrap_density(&base, domain, SERIES_TOL)?;
            let ws = shifts
                .iter()
                .map(|(mp, mm)| {
                    Ok((
                        wrap_density(mp, domain, SERIES_TOL)?,
                        wrap_density(mm, domain, SERIES_TOL)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let v = integrate_periodic(
                domain,
                k,
                |y, o| {
                    let p = w.evaluate(y);
                    let mut s = vec![0.0; d];
                    if p > 0.0 {
                        for (i, (wp, wm)) in ws.iter().enumerate() {
                            s[i] = finite_or_zero(
                                (wp.ln_evaluate(y) - wm.ln_evaluate(y)) / (2.0 * steps[i]),
                            );
                        }
                    }
                    outer(p, &s, o);
                },
                tol,
            )?;
            Ok(unpack(d, &v))
        }
        FisherLevel::Quantized => {
            let q = quantize_density(&base, domain, tol)?;
            let qs = shifts
                .iter()
                .map(|(mp, mm)| {
                    Ok((
                        quantize_density(mp, domain, tol)?,
                        quantize_density(mm, domain, tol)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut v = vec![0.0; k];
            let mut o = vec![0.0; k];
            let mut s = vec![0.0; d];
            for (lam, &p) in q.table() {
                for (i, (qp, qm)) in qs.iter().enumerate() {
                    let (a, b) = (qp.prob(lam), qm.prob(lam));
                    s[i] = if a > 0.0 && b > 0.0 {
                        (a.ln() - b.ln()) / (2.0 * steps[i])
                    } else {
                        0.0
                    };
                }
                outer(p, &s, &mut o);
                for (vi, oi) in v.iter_mut().zip(&o) {
                    *vi += oi;
                }
            }
            Ok(unpack(d, &v))
        }
    }
}

/// Numeric Fisher matrix of one level at `θ`.
///
/// With `scheme.check_noise`, the matrix is also evaluated at steps `2h` and
/// `4h`; for a second-order scheme successive differences shrink as the step
/// does, so an entry whose `h`-vs-`2h` change exceeds its `2h`-vs-`4h` change
/// (beyond a small floor) is reported as [`Error::StepTooSmall`], as is a
/// quadrature failure at step `h` that disappears at `4h`.
pub fn fisher_numeric(
    family: &dyn ParametricFamily,
    theta: &[f64],
    level: FisherLevel,
    domain: &FundamentalDomain,
    scheme: &FdScheme,
) -> Result<DMatrix<f64>> {
    let d = family.param_dim();
    if theta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: theta.len(),
        });
    }
    let steps: Vec<f64> = theta.iter().map(|&t| scheme.step(t)).collect();
    let s2: Vec<f64> = steps.iter().map(|h| 2.0 * h).collect();
    let s4: Vec<f64> = steps.iter().map(|h| 4.0 * h).collect();
    let g1 = match fisher_with_steps(family, theta, level, domain, &steps, scheme.tol) {
        Ok(g) => g,
        // round-off in the scores makes the integrand too rough to integrate
        Err(e @ Error::QuadratureFailed { .. }) if scheme.check_noise => {
            return match fisher_with_steps(family, theta, level, domain, &s4, scheme.tol) {
                Ok(_) => Err(Error::StepTooSmall {
                    step: steps.iter().copied().fold(f64::INFINITY, f64::min),
                    i: 0,
                    j: 0,
                }),
                Err(_) => Err(e),
            };
        }
        Err(e) => return Err(e),
    };
    if scheme.check_noise {
        let g2 = fisher_with_steps(family, theta, level, domain, &s2, scheme.tol)?;
        let g4 = fisher_with_steps(family, theta, level, domain, &s4, scheme.tol)?;
        for i in 0..d {
            for j in 0..d {
                let d1 = (g2[(i, j)] - g1[(i, j)]).abs();
                let d2 = (g4[(i, j)] - g2[(i, j)]).abs();
                let floor = 1e-7 * g1[(i, j)].abs().max(1e-3) + 100.0 * scheme.tol;
                if d1 > d2 && d1 > floor {
                    return Err(Error::StepTooSmall {
                        step: steps[i].min(steps[j]),
                        i,
                        j,
                    });
                }
            }
        }
    }
    Ok(g1)
}

/// Closed-form Fisher information of the exponential family under `αZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFisher {
    pub g: f64,
    pub g_pi: f64,
    pub g_q: f64,
}

/// `G = 1/ν²`, `G_Q = α²/(2(cosh αν - 1))`, `G_π = 1/ν² + α²/(2(1 - cosh αν))`.
///
/// `G_Q` is evaluated as `α²/(4 sinh²(αν/2))`, the same quantity without the
/// cancellation in `cosh - 1`, and `G_π` as `G - G_Q`.
pub fn fisher_exponential_closed(rate: f64, alpha: f64) -> Result<ExponentialFisher> {
    if !(rate > 0.0 && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate and scale must be positive, got ({rate}, {alpha})"
        )));
    }
    let g = 1.0 / (rate * rate);
    let sh = (0.5 * alpha * rate).sinh();
    let g_q = alpha * alpha / (4.0 * sh * sh);
    Ok(ExponentialFisher {
        g,
        g_pi: g - g_q,
        g_q,
    })
}

/// Smallest eigenvalue of `B - A`.
pub fn loewner_slack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: a.nrows(),
        });
    }
    let diff = b - a;
    let sym = (&diff + diff.transpose()) * 0.5;
    Ok(sym.symmetric_eigen().eigenvalues.min())
}

/// `A ⪯ B`: the smallest eigenvalue of `B - A` is at least `-eig_tol`.
pub fn loewner_leq(a: &DMatrix<f64>, b: &DMatrix<f64>, eig_tol: f64) -> Result<bool> {
    Ok(loewner_slack(a, b)? >= -eig_tol)
}

/// Fisher matrices of all three levels at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherReport {
    pub theta: Vec<f64>,
    pub g: DMatrix<f64>,
    pub g_pi: DMatrix<f64>,
    pub g_q: DMatrix<f64>,
    /// `g_pi + g_q`.
    pub g_tilde: DMatrix<f64>,
    pub scheme: FdScheme,
}

pub fn fisher_report(
    family: &dyn ParametricFamily,
    theta: &[f64],
    domain: &FundamentalDomain,
    scheme: &FdScheme,
) -> Result<FisherReport> {
    let g = fisher_numeric(family, theta, FisherLevel::Original, domain, scheme)?;
    let g_pi = fisher_numeric(family, theta, FisherLevel::Wrapped, domain, scheme)?;
    let g_q = fisher_numeric(family, theta, FisherLevel::Quantized, domain, scheme)?;
    let g_tilde = &g_pi + &g_q;
    Ok(FisherReport {
        theta: theta.to_vec(),
        g,
        g_pi,
        g_q,
        g_tilde,
        scheme: *scheme,
    })
}

/// Loewner checks at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub report: FisherReport,
    /// Smallest eigenvalue of `G - G_π`.
    pub slack_pi: f64,
    /// Smallest eigenvalue of `G - G_Q`.
    pub slack_q: f64,
    /// Smallest eigenvalue of `G - (G_π + G_Q)/2`.
    pub slack_avg: f64,
    pub passed: bool,
}

/// Checks `G_π ⪯ G`, `G_Q ⪯ G` and `(G_π + G_Q)/2 ⪯ G` at every grid point.
pub fn fisher_inequality_suite(
    family: &dyn ParametricFamily,
    thetas: &[Vec<f64>],
    domain: &FundamentalDomain,
    scheme: &FdScheme,
    eig_tol: f64,
) -> Result<Vec<SuiteRow>> {
    thetas
        .iter()
        .map(|t| suite_row(fisher_report(family, t, domain, scheme)?, eig_tol))
        .collect()
}

/// Loewner slacks of a computed report.
pub fn suite_row(report: FisherReport, eig_tol: f64) -> Result<SuiteRow> {
    let slack_pi = loewner_slack(&report.g_pi, &report.g)?;
    let slack_q = loewner_slack(&report.g_q, &report.g)?;
    let slack_avg = loewner_slack(&(&report.g_tilde * 0.5), &report.g)?;
    let passed = [slack_pi, slack_q, slack_avg]
        .iter()
        .all(|s| *s >= -eig_tol);
    Ok(SuiteRow {
        report,
        slack_pi,
        slack_q,
        slack_avg,
        passed,
    })
}

fn theta_label(theta: &[f64]) -> String {
    theta
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes `theta,level,i,j,value` for every matrix entry, then one row per
/// Loewner slack with empty `i,j`. Multi-parameter `theta` is `;`-joined.
pub fn write_fisher_csv<W: Write>(mut w: W, rows: &[SuiteRow]) -> io::Result<()> {
    writeln!(w, "theta,level,i,j,value")?;
    for row in rows {
        let r = &row.report;
        let t = theta_label(&r.theta);
        for (name, m) in [
            ("G", &r.g),
            ("G_pi", &r.g_pi),
            ("G_Q", &r.g_q),
            ("G_tilde", &r.g_tilde),
        ] {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    writeln!(w, "{t},{name},{i},{j},{:?}", m[(i, j)])?;
                }
            }
        }
        writeln!(w, "{t},slack_G_pi,,,{:?}", row.slack_pi)?;
        writeln!(w, "{t},slack_G_Q,,,{:?}", row.slack_q)?;
        writeln!(w, "{t},slack_avg,,,{:?}", row.slack_avg)?;
    }
    Ok(())
}
