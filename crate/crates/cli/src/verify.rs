//! The `verify` command: invariant suites with JSON-lines output.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use lattice_decomp::density::ExponentialFamily;
use lattice_decomp::fisher::{fisher_exponential_closed, fisher_report, suite_row, FdScheme};
use lattice_decomp::group::{quantize_pmf, wrap_pmf, FinitePmf, FiniteQuotient};
use lattice_decomp::{
    mutual_information, quantize_density, wrap_density, DensityModel, FundamentalDomain, Lattice,
};

use crate::commands::{emit, pool, CliError, CliResult};
use crate::config::{Settings, SUITES};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    pub widened_tolerance: bool,
}

fn pinned_tol(suite: &str) -> f64 {
    match suite {
        "tiling" => 1e-9,
        "entropy" => 1e-8,
        "group" => 0.0,
        _ => 1e-10,
    }
}

struct Suite {
    name: &'static str,
    tol: f64,
    widened: bool,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str, s: &Settings) -> Self {
        let pinned = pinned_tol(name);
        let mut tol = pinned;
        if s.tol_given && pinned > 0.0 {
            tol = s.tol;
        }
        if let Some((_, t)) = s.widen.iter().rev().find(|(n, _)| n == name) {
            tol = *t;
        }
        Suite {
            name,
            tol,
            widened: tol > pinned,
            checks: Vec::new(),
        }
    }

    fn at_most(&mut self, check: impl Into<String>, measured: f64, threshold: f64) {
        self.push(check, measured, threshold, measured <= threshold);
    }

    fn at_least(&mut self, check: impl Into<String>, measured: f64, threshold: f64) {
        self.push(check, measured, threshold, measured >= threshold);
    }

    fn above(&mut self, check: impl Into<String>, measured: f64, threshold: f64) {
        self.push(check, measured, threshold, measured > threshold);
    }

    fn push(&mut self, check: impl Into<String>, measured: f64, threshold: f64, passed: bool) {
        self.checks.push(Check {
            suite: self.name,
            check: check.into(),
            measured,
            threshold,
            passed: passed && !measured.is_nan(),
            widened_tolerance: self.widened,
        });
    }

    fn error(&mut self, check: impl Into<String>, e: impl std::fmt::Display) {
        let check = format!("{}: {e}", check.into());
        self.push(check, f64::NAN, f64::NAN, false);
    }
}

fn tiling(s: &mut Suite, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centered = FundamentalDomain::centered_interval(1.0).unwrap();
    let left = FundamentalDomain::interval(0.0, 1.0).unwrap();
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let x: f64 = rng.random_range(-1e4..1e4);
        let (y, q) = centered.decompose_point(&[x]).unwrap();
        mismatches += usize::from(y[0] + q.coords[0] != x);
        let (y, q) = left.decompose_point(&[x.abs()]).unwrap();
        mismatches += usize::from(y[0] + q.coords[0] != x.abs());
    }
    s.at_most("interval_bitwise_mismatches", mismatches as f64, 0.0);

    let skew = Lattice::from_columns(&[vec![2.0, 0.0], vec![1.0, 3.0]]).unwrap();
    let par = FundamentalDomain::basis_parallelotope(skew.clone());
    let (mut ulps, mut drift, mut shifts, mut outside) = (0.0f64, 0.0f64, 0usize, 0usize);
    for _ in 0..10_000 {
        let x = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
        let (y, q) = par.decompose_point(&x).unwrap();
        for i in 0..2 {
            let scale = x[i].abs().max(q.coords[i].abs()).max(f64::MIN_POSITIVE);
            ulps = ulps.max((y[i] + q.coords[i] - x[i]).abs() / (scale * f64::EPSILON));
        }
        let t = skew.basis_coordinates(&y);
        outside += usize::from(!t.iter().all(|v| (0.0..1.0).contains(v)));
        let k = [rng.random_range(-20..20), rng.random_range(-20..20)];
        let lam = skew.point(&k);
        let moved = [x[0] + lam.coords[0], x[1] + lam.coords[1]];
        let (y2, q2) = par.decompose_point(&moved).unwrap();
        drift = drift.max((y[0] - y2[0]).abs().max((y[1] - y2[1]).abs()));
        shifts += usize::from(q2.coeffs != vec![q.coeffs[0] + k[0], q.coeffs[1] + k[1]]);
    }
    s.at_most("parallelotope_identity_ulps", ulps, 1.0);
    s.at_most("parallelotope_membership_failures", outside as f64, 0.0);
    s.at_most("periodicity_max_drift", drift, s.tol);
    s.at_most("periodicity_coefficient_mismatches", shifts as f64, 0.0);

    let hex = Lattice::from_columns(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
    let vor = FundamentalDomain::voronoi(hex.clone()).unwrap();
    let mut wrong = 0;
    for _ in 0..1000 {
        let x = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        let q = vor.quantize_point(&x).unwrap();
        let got = (q.coords[0] - x[0]).hypot(q.coords[1] - x[1]);
        let u = hex.basis_coordinates(&x);
        let mut best = f64::INFINITY;
        for i in -3..=3 {
            for j in -3..=3 {
                let p = hex.point(&[u[0].round() as i64 + i, u[1].round() as i64 + j]);
                best = best.min((p.coords[0] - x[0]).hypot(p.coords[1] - x[1]));
            }
        }
        wrong += usize::from((got - best).abs() > 1e-9);
    }
    s.at_most("voronoi_bruteforce_mismatches", wrong as f64, 0.0);
}

fn matrix() -> Vec<(&'static str, DensityModel, FundamentalDomain)> {
    vec![
        (
            "gaussian_0.38_centered",
            DensityModel::gaussian(0.0, 0.38 * 0.38).unwrap(),
            FundamentalDomain::centered_interval(1.0).unwrap(),
        ),
        (
            "gaussian_2_left",
            DensityModel::gaussian(0.0, 4.0).unwrap(),
            FundamentalDomain::interval(0.0, 1.0).unwrap(),
        ),
        (
            "exponential_1_half",
            DensityModel::exponential(1.0).unwrap(),
            FundamentalDomain::interval(0.0, 0.5).unwrap(),
        ),
        (
            "gaussian2d_unit_square",
            DensityModel::gaussian_nd(
                vec![0.1, -0.2],
                DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]),
            )
            .unwrap(),
            FundamentalDomain::basis_parallelotope(Lattice::integer(2).unwrap()),
        ),
    ]
}

fn normalization(s: &mut Suite) {
    for (name, m, d) in matrix() {
        // two-dimensional quadrature stays at 1e-8 or coarser
        let tol = if d.dim() == 2 { s.tol.max(1e-8) } else { s.tol };
        match wrap_density(&m, &d, tol).and_then(|w| w.integral(tol)) {
            Ok(i) => s.at_most(
                format!("wrapped_integral:{name}"),
                (i - 1.0).abs(),
                10.0 * tol,
            ),
            Err(e) => s.error(format!("wrapped_integral:{name}"), e),
        }
        match quantize_density(&m, &d, tol) {
            Ok(q) => {
                s.at_most(
                    format!("pmf_sum:{name}"),
                    (q.total() + q.truncation_mass() - 1.0).abs(),
                    10.0 * tol,
                );
                s.push(
                    format!("truncation_mass:{name}"),
                    q.truncation_mass(),
                    tol,
                    q.truncation_mass() < tol,
                );
            }
            Err(e) => s.error(format!("pmf_sum:{name}"), e),
        }
    }
}

fn entropy(s: &mut Suite) {
    for (name, m, d) in matrix() {
        match mutual_information(&m, &d, s.tol) {
            Ok(r) => {
                s.at_most(
                    format!("wrapped_below_original:{name}"),
                    r.h_xpi - r.h_x,
                    s.tol,
                );
                s.at_most(
                    format!("subadditivity:{name}"),
                    r.h_x - r.h_xpi - r.h_xq,
                    s.tol,
                );
                s.at_most(
                    format!("info_below_discrete:{name}"),
                    r.mutual_info - r.h_xq,
                    s.tol,
                );
            }
            Err(e) => s.error(format!("mutual_information:{name}"), e),
        }
    }
}

fn bounds(s: &mut Suite) {
    let gauss = FundamentalDomain::centered_interval(1.0).unwrap();
    let expo = FundamentalDomain::interval(0.0, 1.0).unwrap();
    let runs: [(&str, Vec<f64>, &FundamentalDomain); 2] = [
        (
            "gaussian_min_gap",
            (1..=60).map(|i| i as f64 * 0.05).collect(),
            &gauss,
        ),
        (
            "exponential_min_gap",
            (1..=50).map(|i| i as f64 * 0.1).collect(),
            &expo,
        ),
    ];
    for (check, grid, d) in runs {
        let mut gap = f64::INFINITY;
        for p in grid {
            let m = if check.starts_with("gaussian") {
                DensityModel::gaussian(0.0, p * p).unwrap()
            } else {
                DensityModel::exponential(p).unwrap()
            };
            match mutual_information(&m, d, s.tol) {
                Ok(r) => gap = gap.min(r.bound.map_or(f64::NEG_INFINITY, |b| b - r.mutual_info)),
                Err(_) => gap = f64::NEG_INFINITY,
            }
        }
        s.above(check, gap, 0.0);
    }
}

fn fisher(s: &mut Suite) {
    let scheme = FdScheme {
        tol: s.tol,
        ..FdScheme::default()
    };
    let (mut rel, mut add, mut slack) = (0.0f64, 0.0f64, f64::INFINITY);
    for nu in [0.5, 1.0, 2.0] {
        for a in [0.5, 1.0, 2.0] {
            let d = FundamentalDomain::interval(0.0, a).unwrap();
            let closed = fisher_exponential_closed(nu, a).unwrap();
            match fisher_report(&ExponentialFamily, &[nu], &d, &scheme)
                .and_then(|r| suite_row(r, 1e-5))
            {
                Ok(row) => {
                    let r = &row.report;
                    for (num, exact) in [
                        (r.g[(0, 0)], closed.g),
                        (r.g_pi[(0, 0)], closed.g_pi),
                        (r.g_q[(0, 0)], closed.g_q),
                    ] {
                        rel = rel.max(((num - exact) / exact).abs());
                    }
                    add = add.max((r.g_tilde[(0, 0)] - r.g[(0, 0)]).abs());
                    slack = slack.min(row.slack_pi.min(row.slack_q).min(row.slack_avg));
                }
                Err(e) => {
                    s.error(format!("exponential_nu{nu}_alpha{a}"), e);
                }
            }
        }
    }
    s.at_most("exponential_max_relative_error", rel, 1e-4);
    s.at_most("exponential_numeric_additivity", add, 1e-10);
    s.at_least("exponential_min_loewner_slack", slack, -1e-5);
}

fn brute_leader(sub: &[Vec<i64>], x: &[i64], radius: i64) -> Vec<i64> {
    let n = x.len();
    let member = |v: &[i64]| match n {
        1 => v[0] % sub[0][0] == 0,
        _ => {
            let det = sub[0][0] * sub[1][1] - sub[1][0] * sub[0][1];
            let a = v[0] * sub[1][1] - sub[1][0] * v[1];
            let b = sub[0][0] * v[1] - v[0] * sub[0][1];
            a % det == 0 && b % det == 0
        }
    };
    let mut cands: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        cands = cands
            .into_iter()
            .flat_map(|v| {
                (-radius..=radius).map(move |t| {
                    let mut v = v.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
    }
    cands
        .into_iter()
        .filter(|y| member(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>()))
        .max_by(|a, b| {
            let na: i64 = a.iter().map(|v| v * v).sum();
            let nb: i64 = b.iter().map(|v| v * v).sum();
            nb.cmp(&na).then(a.cmp(b))
        })
        .unwrap()
}

fn group(s: &mut Suite, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: [(&str, Vec<Vec<i64>>, i64); 3] = [
        ("z_mod_4z", vec![vec![4]], 200),
        ("z2_mod_2z2", vec![vec![2, 0], vec![0, 2]], 15),
        ("z2_mod_skew", vec![vec![2, 1], vec![0, 3]], 15),
    ];
    for (name, sub, r) in cases {
        let n = sub.len();
        let q = match FiniteQuotient::lattice(None, sub.clone()) {
            Ok(q) => q,
            Err(e) => {
                s.error(name, e);
                continue;
            }
        };
        let mut support: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..n {
            support = support
                .into_iter()
                .flat_map(|v| {
                    (-r..=r).map(move |t| {
                        let mut v = v.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        // integer weights keep every sum exact
        let weights: Vec<i64> = support.iter().map(|_| rng.random_range(1..100)).collect();
        let p = FinitePmf::new(support.clone(), weights.clone()).unwrap();
        let mut wrap_bf = std::collections::BTreeMap::new();
        let mut quant_bf = std::collections::BTreeMap::new();
        for (x, w) in support.iter().zip(&weights) {
            let lead = brute_leader(&sub, x, 4);
            let s_: Vec<i64> = x.iter().zip(&lead).map(|(a, b)| a - b).collect();
            *wrap_bf.entry(lead).or_insert(0i64) += w;
            *quant_bf.entry(s_).or_insert(0i64) += w;
        }
        let nonzero = |p: FinitePmf<i64>| -> std::collections::BTreeMap<Vec<i64>, i64> {
            p.to_map().into_iter().filter(|(_, v)| *v != 0).collect()
        };
        let mismatches = match (wrap_pmf(&p, &q), quantize_pmf(&p, &q)) {
            (Ok(w), Ok(qq)) => {
                usize::from(nonzero(w) != wrap_bf) + usize::from(nonzero(qq) != quant_bf)
            }
            _ => 2,
        };
        s.at_most(
            format!("{name}_bruteforce_mismatches"),
            mismatches as f64,
            0.0,
        );
        let det = if n == 1 {
            sub[0][0].abs()
        } else {
            (sub[0][0] * sub[1][1] - sub[1][0] * sub[0][1]).abs()
        };
        s.at_most(
            format!("{name}_coset_count_error"),
            (q.index() as i64 - det).abs() as f64,
            0.0,
        );
    }
    match FiniteQuotient::code(2, 3, vec![vec![1, 1, 1]]) {
        Ok(q) => {
            let space: Vec<Vec<i64>> = (0..8)
                .map(|i| vec![(i >> 2) & 1, (i >> 1) & 1, i & 1])
                .collect();
            let weights: Vec<i64> = (1..=8).collect();
            let p = FinitePmf::new(space.clone(), weights.clone()).unwrap();
            let mut bf = std::collections::BTreeMap::new();
            for (x, w) in space.iter().zip(&weights) {
                let other: Vec<i64> = x.iter().map(|v| 1 - v).collect();
                let wx: i64 = x.iter().sum();
                let lead = if wx < 2 { x.clone() } else { other };
                *bf.entry(lead).or_insert(0i64) += w;
            }
            let got = wrap_pmf(&p, &q).map(|w| w.to_map()).unwrap_or_default();
            s.at_most(
                "repetition_code_bruteforce_mismatches",
                f64::from(u8::from(got != bf)),
                0.0,
            );
            s.at_most(
                "repetition_code_coset_count_error",
                (q.index() as f64 - 4.0).abs(),
                0.0,
            );
        }
        Err(e) => s.error("repetition_code", e),
    }
}

/// Runs every suite; prints JSON lines on stdout and a summary on stderr.
pub fn verify(settings: &Settings) -> CliResult<()> {
    let suites: Vec<Suite> = pool(settings.jobs)?.install(|| {
        SUITES
            .par_iter()
            .map(|&name| {
                let mut s = Suite::new(name, settings);
                match name {
                    "tiling" => tiling(&mut s, settings.seed),
                    "normalization" => normalization(&mut s),
                    "entropy" => entropy(&mut s),
                    "bounds" => bounds(&mut s),
                    "fisher" => fisher(&mut s),
                    _ => group(&mut s, settings.seed),
                }
                s
            })
            .collect()
    });
    let mut failed = 0;
    let mut total = 0;
    for s in &suites {
        for c in &s.checks {
            emit(&serde_json::to_string(c).map_err(|e| CliError::Run(e.to_string()))?);
            total += 1;
            failed += usize::from(!c.passed);
            eprintln!(
                "[{}] {}/{}: measured {:e}, threshold {:e}{}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.check,
                c.measured,
                c.threshold,
                if c.widened_tolerance {
                    " (WIDENED TOLERANCE)"
                } else {
                    ""
                }
            );
        }
    }
    let widened: Vec<&str> = suites
        .iter()
        .filter(|s| s.widened)
        .map(|s| s.name)
        .collect();
    if !widened.is_empty() {
        eprintln!(
            "warning: tolerances widened beyond pinned values for: {}",
            widened.join(", ")
        );
    }
    eprintln!("{} of {total} checks passed", total - failed);
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} checks failed")));
    }
    Ok(())
}
