//! The data-producing subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use lattice_decomp::density::{ExponentialFamily, GaussianFamily, ParametricFamily};
use lattice_decomp::fisher::{fisher_report, suite_row, write_fisher_csv, FdScheme};
use lattice_decomp::group::{quantize_pmf, wrap_pmf, DecayingPmf, FinitePmf, FiniteQuotient};
use lattice_decomp::info::{write_sweep_csv, SweepPoint};
use lattice_decomp::{
    mutual_information, product_density, quantize_density, wrap_density, DensityModel,
    FundamentalDomain,
};

use crate::config::{round12, Ambient, ConfigError, Grid, GroupPmf, ModelKind, Settings};

#[derive(Debug)]
pub enum CliError {
    /// Invalid settings; exit code 2.
    Config(ConfigError),
    /// A computation or I/O step failed; exit code 1.
    Run(String),
    /// Everything ran but a check did not hold; exit code 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) | CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Run(e) => write!(f, "error: {e}"),
            CliError::Failed(e) => write!(f, "check failed: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<lattice_decomp::Error> for CliError {
    fn from(e: lattice_decomp::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output files produced in memory, written only once everything succeeded.
pub struct Outputs(pub Vec<(String, Vec<u8>)>);

impl Outputs {
    pub fn write_all(&self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir).map_err(|e| CliError::Run(format!("{}: {e}", dir.display())))?;
        for (name, bytes) in &self.0 {
            let path = dir.join(name);
            fs::write(&path, bytes)
                .map_err(|e| CliError::Run(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

pub fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Run(e.to_string()))
}

fn domain(s: &Settings) -> CliResult<FundamentalDomain> {
    let a = s.lattice_scale;
    Ok(FundamentalDomain::interval(s.domain.left(a), a)?)
}

/// The model at one parameter value: variance or standard deviation for the
/// Gaussian (per `sd`), rate for the exponential.
fn model_at(kind: ModelKind, p: f64, sd: bool) -> CliResult<DensityModel> {
    Ok(match kind {
        ModelKind::Gaussian => DensityModel::gaussian(0.0, if sd { p * p } else { p })?,
        ModelKind::Exponential => DensityModel::exponential(p)?,
    })
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

pub fn decompose(s: &Settings) -> CliResult<Outputs> {
    let params = s.params.clone().unwrap_or_else(|| match s.model {
        ModelKind::Gaussian => vec![0.25, 1.0, 4.0],
        ModelKind::Exponential => vec![1.0],
    });
    let d = domain(s)?;
    let (left, a) = d.interval_bounds().map(|(lo, hi)| (lo, hi - lo)).unwrap();
    let tables = pool(s.jobs)?.install(|| {
        params
            .par_iter()
            .map(|&p| -> CliResult<Vec<(String, Vec<u8>)>> {
                let m = model_at(s.model, p, false)?;
                let w = wrap_density(&m, &d, s.tol)?;
                let q = quantize_density(&m, &d, s.tol)?;
                let cells: Vec<i64> = q
                    .table()
                    .iter()
                    .filter(|(_, &v)| v >= 1e-9)
                    .map(|(k, _)| k[0])
                    .collect();
                let (lo, hi) = (cells[0], *cells.last().unwrap());
                let per_cell = 50;
                let xs: Vec<f64> = (lo..=hi)
                    .flat_map(|k| {
                        (0..per_cell).map(move |j| {
                            round12(left + a * (k as f64 + j as f64 / per_cell as f64))
                        })
                    })
                    .collect();
                let mut original = String::from("x,density\n");
                let mut product = String::from("x,density\n");
                for &x in &xs {
                    writeln!(original, "{x:?},{:?}", m.density(&[x])).unwrap();
                    writeln!(product, "{x:?},{:?}", product_density(&w, &q, &[x])?).unwrap();
                }
                let stem = format!("{}_{p}", s.model);
                Ok(vec![
                    (format!("{stem}_original.csv"), original.into_bytes()),
                    (
                        format!("{stem}_wrapped.csv"),
                        csv_bytes(|b| w.write_grid_csv(b, 200))?,
                    ),
                    (
                        format!("{stem}_quantized.csv"),
                        csv_bytes(|b| q.write_csv(b))?,
                    ),
                    (format!("{stem}_product.csv"), product.into_bytes()),
                ])
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    Ok(Outputs(tables.into_iter().flatten().collect()))
}

fn sweep_grid(s: &Settings) -> Grid {
    s.grid.unwrap_or(match s.model {
        ModelKind::Gaussian => Grid {
            start: 0.05,
            stop: 3.0,
            step: 0.01,
        },
        ModelKind::Exponential => Grid {
            start: 0.1,
            stop: 5.0,
            step: 0.01,
        },
    })
}

fn sweep(s: &Settings) -> CliResult<Vec<SweepPoint>> {
    let d = domain(s)?;
    let points = sweep_grid(s).points();
    pool(s.jobs)?.install(|| {
        points
            .par_iter()
            .map(|&p| {
                let m = model_at(s.model, p, true)?;
                Ok(SweepPoint {
                    param: p,
                    report: mutual_information(&m, &d, s.tol)?,
                })
            })
            .collect()
    })
}

pub fn mi_sweep(s: &Settings) -> CliResult<Outputs> {
    let points = sweep(s)?;
    let best = points
        .iter()
        .max_by(|a, b| a.report.mutual_info.total_cmp(&b.report.mutual_info))
        .unwrap();
    let label = match s.model {
        ModelKind::Gaussian => "sigma",
        ModelKind::Exponential => "nu",
    };
    eprintln!(
        "{} points, max mutual information {} {} at {label} = {}",
        points.len(),
        s.units.from_nats(best.report.mutual_info),
        s.units,
        best.param
    );
    let bytes = csv_bytes(|b| write_sweep_csv(b, &points, s.units))?;
    Ok(Outputs(vec![(format!("mi_sweep_{}.csv", s.model), bytes)]))
}

pub fn bounds_check(s: &Settings) -> CliResult<Outputs> {
    let points = sweep(s)?;
    let mut csv = String::from("param,mutual_info,bound,slack,passed\n");
    let mut failures = 0;
    for p in &points {
        let r = &p.report;
        let (bound, slack, ok) = match r.bound {
            Some(b) => (b, b - r.mutual_info, b > r.mutual_info),
            None => (f64::NAN, f64::NAN, false),
        };
        failures += usize::from(!ok);
        writeln!(
            csv,
            "{},{:?},{:?},{:?},{ok}",
            p.param,
            s.units.from_nats(r.mutual_info),
            s.units.from_nats(bound),
            s.units.from_nats(slack)
        )
        .unwrap();
    }
    let out = Outputs(vec![(format!("bounds_{}.csv", s.model), csv.into_bytes())]);
    eprintln!(
        "{} of {} points satisfy bound > I",
        points.len() - failures,
        points.len()
    );
    if failures > 0 {
        out.write_all(&s.out)?;
        return Err(CliError::Failed(format!(
            "{failures} grid points violate the bound"
        )));
    }
    Ok(out)
}

pub fn fisher_sweep(s: &Settings) -> CliResult<Outputs> {
    let d = domain(s)?;
    let (family, grid): (Box<dyn ParametricFamily>, Grid) = match s.model {
        ModelKind::Exponential => (
            Box::new(ExponentialFamily),
            s.grid.unwrap_or(Grid {
                start: 0.5,
                stop: 2.0,
                step: 0.5,
            }),
        ),
        ModelKind::Gaussian => {
            let variance = s.params.as_ref().map_or(1.0, |p| p[0]);
            (
                Box::new(GaussianFamily::Mean { variance }),
                s.grid.unwrap_or(Grid {
                    start: 0.0,
                    stop: 0.5,
                    step: 0.25,
                }),
            )
        }
    };
    if s.model == ModelKind::Exponential && grid.start <= 0.0 {
        return Err(CliError::Config(ConfigError(
            "--grid: exponential rates must be positive".into(),
        )));
    }
    let scheme = FdScheme {
        tol: s.tol,
        ..FdScheme::default()
    };
    let thetas = grid.points();
    let rows = pool(s.jobs)?.install(|| {
        thetas
            .par_iter()
            .map(|&t| {
                Ok(suite_row(
                    fisher_report(family.as_ref(), &[t], &d, &scheme)?,
                    1e-5,
                )?)
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{:?}", r.report.theta))
        .collect();
    let out = Outputs(vec![(
        format!("fisher_{}.csv", s.model),
        csv_bytes(|b| write_fisher_csv(b, &rows))?,
    )]);
    eprintln!(
        "{} grid points, {} pass all three Loewner checks",
        rows.len(),
        rows.len() - failed.len()
    );
    if !failed.is_empty() {
        out.write_all(&s.out)?;
        return Err(CliError::Failed(format!(
            "Loewner checks fail at {}",
            failed.join(", ")
        )));
    }
    Ok(out)
}

fn box_support(n: usize, w: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (0..w).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn group_demo(s: &Settings) -> CliResult<Outputs> {
    let g = &s.group;
    let (quotient, pmf) = match g.ambient {
        Ambient::Lattice => {
            let n = g.generator.len();
            if g.generator.iter().any(|c| c.len() != n) {
                return Err(CliError::Config(ConfigError(format!(
                    "sublattice: need {n} columns of length {n}"
                ))));
            }
            let q = FiniteQuotient::lattice(None, g.generator.clone())
                .map_err(|e| CliError::Config(ConfigError(format!("sublattice: {e}"))))?;
            let pmf = match g.pmf {
                GroupPmf::Uniform => {
                    let support = box_support(n, g.window);
                    let p = 1.0 / support.len() as f64;
                    FinitePmf::new(support.clone(), vec![p; support.len()])?
                }
                GroupPmf::Geometric(r) if n == 1 => {
                    let (pmf, tail) = DecayingPmf::geometric(r)?.truncate(s.tol)?;
                    eprintln!("geometric pmf truncated with certified tail {tail:e}");
                    pmf
                }
                GroupPmf::Geometric(_) => {
                    return Err(CliError::Config(ConfigError(
                        "pmf: geometric is only available on Z".into(),
                    )))
                }
            };
            (q, pmf)
        }
        Ambient::Code => {
            if g.pmf != GroupPmf::Uniform {
                return Err(CliError::Config(ConfigError(
                    "pmf: codes support only the uniform pmf".into(),
                )));
            }
            let q = FiniteQuotient::code(g.modulus, g.length, g.generator.clone())
                .map_err(|e| CliError::Config(ConfigError(format!("generator: {e}"))))?;
            let support = box_support(g.length, g.modulus);
            let p = 1.0 / support.len() as f64;
            (q, FinitePmf::new(support.clone(), vec![p; support.len()])?)
        }
    };
    let join = |v: &[i64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    let mut cosets = String::from("coset,representative,leader\n");
    for c in quotient.cosets() {
        writeln!(
            cosets,
            "{},{},{}",
            c.index,
            join(&c.representative),
            join(&c.leader)
        )
        .unwrap();
    }
    let wrapped = wrap_pmf(&pmf, &quotient)?;
    let quantized = quantize_pmf(&pmf, &quotient)?;
    eprintln!(
        "{} cosets; wrapped mass {}, quantized mass {}",
        quotient.index(),
        wrapped.total(),
        quantized.total()
    );
    Ok(Outputs(vec![
        ("group_cosets.csv".into(), cosets.into_bytes()),
        (
            "group_wrapped.csv".into(),
            csv_bytes(|b| wrapped.write_csv(b))?,
        ),
        (
            "group_quantized.csv".into(),
            csv_bytes(|b| quantized.write_csv(b))?,
        ),
    ]))
}

/// Writes a report line to stdout, ignoring a closed pipe.
pub fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}
