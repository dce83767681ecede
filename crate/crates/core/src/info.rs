//! Entropies and the mutual information between wrapped and quantized parts.
//!
//! `I(X_π; X_Q) = h(X_π) + H(X_Q) - h(X)`, all in nats.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::density::{DensityModel, Family, SupportDescriptor};
use crate::error::{Error, Result};
use crate::lattice::FundamentalDomain;
use crate::quadrature::{integrate_2d, integrate_vec, Interval, QuadOptions};
use crate::transform::{
    integrate_periodic, quantize_density, wrap_density, QuantizedPmf, WrappedDensity,
};

/// Truncation mass above which a discrete entropy is refused.
pub const MAX_TRUNCATION: f64 = 1e-6;
/// Quantized variances below this make the real-line bound meaningless.
pub const MIN_VARIANCE: f64 = 1e-300;

/// Output units for information quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v / LN_2,
        }
    }
}

impl FromStr for Units {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            _ => Err(Error::InvalidParameter(format!(
                "unknown units '{s}' (expected nats or bits)"
            ))),
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        })
    }
}

fn neg_plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn check_mass(mass: f64, tol: f64) -> Result<()> {
    if (mass - 1.0).abs() > 100.0 * tol {
        return Err(Error::NonNormalized { integral: mass });
    }
    Ok(())
}

/// `-∫ p ln p` over the given ranges of a univariate density.
pub fn differential_entropy_fn<F: Fn(f64) -> f64>(
    f: F,
    support: &[Interval],
    tol: f64,
) -> Result<f64> {
    let opts = QuadOptions::with_tol(tol / support.len().max(1) as f64);
    let (mut mass, mut h) = (0.0, 0.0);
    for iv in support {
        let r = integrate_vec(
            2,
            |x, o: &mut [f64]| {
                let p = f(x);
                o[0] = p;
                o[1] = neg_plogp(p);
            },
            *iv,
            &opts,
        )?;
        mass += r.values[0];
        h += r.values[1];
    }
    check_mass(mass, tol)?;
    Ok(h)
}

/// `h(X)` of a model. Multivariate Gaussians use their closed form; other
/// models are integrated numerically (dimensions 1 and 2).
pub fn differential_entropy(model: &DensityModel, tol: f64) -> Result<f64> {
    if let Family::GaussianND(g) = model.family() {
        let n = model.dim() as f64;
        return Ok(0.5 * (n * (2.0 * PI * E).ln() + g.covariance().determinant().ln()));
    }
    let iv = model.support_intervals();
    match iv.len() {
        1 => differential_entropy_fn(|x| model.density(&[x]), &iv, tol),
        2 => {
            let r = integrate_2d(
                2,
                |x, y, o: &mut [f64]| {
                    let p = model.density(&[x, y]);
                    o[0] = p;
                    o[1] = neg_plogp(p);
                },
                iv[0],
                iv[1],
                &QuadOptions::with_tol(tol),
            )?;
            check_mass(r.values[0], tol)?;
            Ok(r.values[1])
        }
        n => Err(Error::UnsupportedDimension {
            op: "differential entropy",
            dim: n,
            max: 2,
        }),
    }
}

/// `h(X_π) = -∫_D p_π ln p_π`.
pub fn wrapped_entropy(w: &WrappedDensity, tol: f64) -> Result<f64> {
    let v = integrate_periodic(
        w.domain(),
        2,
        |y, o| {
            let p = w.evaluate(y);
            o[0] = p;
            o[1] = neg_plogp(p);
        },
        tol,
    )?;
    check_mass(v[0], tol.max(w.achieved_tail_bound()))?;
    Ok(v[1])
}

/// `H(X_Q) = -Σ p ln p` over the table.
pub fn discrete_entropy(q: &QuantizedPmf) -> Result<f64> {
    if q.truncation_mass() >= MAX_TRUNCATION {
        return Err(Error::ExcessTruncation {
            mass: q.truncation_mass(),
        });
    }
    Ok(q.table().values().map(|&p| neg_plogp(p)).sum())
}

/// Rough uncertainty of [`discrete_entropy`] from the mass left out of the
/// table and, for Monte Carlo tables, the sampling error.
pub fn discrete_entropy_error_bar(q: &QuantizedPmf) -> f64 {
    let eps = q.truncation_mass();
    let tail = if eps > 0.0 {
        eps * (1.0 - eps.ln())
    } else {
        0.0
    };
    let mc = q.std_error().map_or(0.0, |s| {
        q.table()
            .values()
            .map(|&p| s * (1.0 + p.ln().abs()))
            .sum::<f64>()
    });
    tail + mc
}

/// Entropy decomposition of one model on one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoReport {
    pub h_x: f64,
    pub h_xpi: f64,
    pub h_xq: f64,
    /// `h_xpi + h_xq - h_x` before clamping.
    pub raw_mutual_info: f64,
    /// `raw_mutual_info` with values in `[-tol, 0)` replaced by 0.
    pub mutual_info: f64,
    /// Whether the clamp above was applied.
    pub clamped: bool,
    /// Upper bound on the mutual information, when one applies.
    pub bound: Option<f64>,
    pub tol: f64,
    /// Mean of the quantized part, `μ_Q`.
    pub mu_q: Vec<f64>,
    /// Variance of the quantized part (1-D), `σ_Q²`.
    pub var_q: Option<f64>,
}

/// Bound term `ln(e (μ_Q + α/2))` for densities on `[0, ∞)`; subtract `h(X)`.
pub fn mi_bound_halfline(mu_q: f64, alpha: f64) -> f64 {
    1.0 + (mu_q + 0.5 * alpha).ln()
}

/// Bound term `½ ln(2πe σ_Q²) + 2/(exp(2π² σ_Q²/α²) - 1)` for densities on
/// the real line; subtract `h(X)`.
pub fn mi_bound_real(var_q: f64, alpha: f64) -> Result<f64> {
    if !(var_q >= MIN_VARIANCE) {
        return Err(Error::DegenerateVariance { variance: var_q });
    }
    Ok(
        0.5 * (2.0 * PI * E * var_q).ln()
            + 2.0 / (2.0 * PI * PI * var_q / (alpha * alpha)).exp_m1(),
    )
}

/// Computes `h(X)`, `h(X_π)`, `H(X_Q)` and their combination.
///
/// Internal quadratures and truncations run at `tol/10`. A one-dimensional
/// interval domain also gets the matching upper bound: the half-line form
/// for densities supported on `[0, ∞)` with `D = [0, α)`, the real-line form
/// for densities on `R` (falling back to `H(X_Q)` when `σ_Q²` underflows).
pub fn mutual_information(
    model: &DensityModel,
    domain: &FundamentalDomain,
    tol: f64,
) -> Result<InfoReport> {
    let inner = 0.1 * tol;
    let h_x = differential_entropy(model, inner)?;
    let w = wrap_density(model, domain, inner)?;
    let h_xpi = wrapped_entropy(&w, inner)?;
    let q = quantize_density(model, domain, inner)?;
    let h_xq = discrete_entropy(&q)?;
    let raw = h_xpi + h_xq - h_x;
    if raw < -tol {
        return Err(Error::NegativeMutualInformation { value: raw, tol });
    }
    let mu_q = q.mean();
    let var_q = (domain.dim() == 1).then(|| q.covariance()[(0, 0)]);
    let bound = match (domain.interval_bounds(), model.support(), var_q) {
        (Some((lo, hi)), SupportDescriptor::HalfLine { start }, _) if lo == start => {
            Some(mi_bound_halfline(mu_q[0] - start, hi - lo) - h_x)
        }
        (Some((lo, hi)), SupportDescriptor::FullLine, Some(v)) => match mi_bound_real(v, hi - lo) {
            Ok(b) => Some(b - h_x),
            Err(Error::DegenerateVariance { .. }) => Some(h_xq),
            Err(e) => return Err(e),
        },
        _ => None,
    };
    Ok(InfoReport {
        h_x,
        h_xpi,
        h_xq,
        raw_mutual_info: raw,
        mutual_info: raw.max(0.0),
        clamped: raw < 0.0,
        bound,
        tol,
        mu_q,
        var_q,
    })
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub report: InfoReport,
}

/// `I` along the lattice family `αΛ` with domains `αD`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSweep {
    pub points: Vec<SweepPoint>,
}

impl ScalingSweep {
    /// Whether `I` is below `threshold` at both ends of the grid.
    pub fn limits_vanish(&self, threshold: f64) -> bool {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => {
                a.report.mutual_info < threshold && b.report.mutual_info < threshold
            }
            _ => false,
        }
    }
}

/// Mutual information for each scale in `alphas`.
pub fn scaling_sweep(
    model: &DensityModel,
    base: &FundamentalDomain,
    alphas: &[f64],
    tol: f64,
) -> Result<ScalingSweep> {
    let points = alphas
        .iter()
        .map(|&a| {
            let d = base.scaled(a)?;
            Ok(SweepPoint {
                param: a,
                report: mutual_information(model, &d, tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingSweep { points })
}

/// Writes `param,h_X,h_Xpi,H_XQ,mutual_info,bound`; a missing bound is left empty.
pub fn write_sweep_csv<W: Write>(mut w: W, points: &[SweepPoint], units: Units) -> io::Result<()> {
    writeln!(w, "param,h_X,h_Xpi,H_XQ,mutual_info,bound")?;
    for p in points {
        let r = &p.report;
        let bound = r
            .bound
            .map(|b| format!("{:?}", units.from_nats(b)))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{:?},{:?},{:?},{:?},{}",
            p.param,
            units.from_nats(r.h_x),
            units.from_nats(r.h_xpi),
            units.from_nats(r.h_xq),
            units.from_nats(r.mutual_info),
            bound
        )?;
    }
    Ok(())
}
