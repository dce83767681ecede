mod common;

use approx::assert_abs_diff_eq;

use common::normal_mass;
use lattice_decomp::info::scaling_sweep;
use lattice_decomp::{mutual_information, DensityModel, FundamentalDomain};

/// `I = Σ_λ ∫_D p(y+λ) ln(p(y+λ) / (p_π(y) p_Q(λ))) dy` for `N(0, σ²)` on
/// `[-1/2, 1/2)`, by composite Simpson on a fine grid.
fn direct_kl_gaussian(sigma: f64) -> f64 {
    let pdf = |x: f64| {
        (-0.5 * x * x / (sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let panels = 4000;
    let h = 1.0 / panels as f64;
    let ys: Vec<f64> = (0..=panels).map(|i| -0.5 + i as f64 * h).collect();
    let wrapped: Vec<f64> = ys
        .iter()
        .map(|&y| (-60..=60).map(|m| pdf(y + m as f64)).sum())
        .collect();
    let reach = (40.0 * sigma).ceil() as i64 + 1;
    let mut total = 0.0;
    for lam in -reach..=reach {
        let l = lam as f64;
        let pq = normal_mass(0.0, sigma * sigma, l - 0.5, l + 0.5);
        if pq <= 0.0 {
            continue;
        }
        let f = |i: usize| {
            let p = pdf(ys[i] + l);
            if p > 0.0 {
                p * (p / (wrapped[i] * pq)).ln()
            } else {
                0.0
            }
        };
        let mut s = f(0) + f(panels);
        for i in 1..panels {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
        }
        total += s * h / 3.0;
    }
    total
}

#[test]
fn mutual_information_matches_direct_kl() {
    let d = FundamentalDomain::centered_interval(1.0).unwrap();
    for &s in &[0.3, 0.38, 0.7] {
        let m = DensityModel::gaussian(0.0, s * s).unwrap();
        let r = mutual_information(&m, &d, 1e-10).unwrap();
        assert_abs_diff_eq!(r.mutual_info, direct_kl_gaussian(s), epsilon = 1e-8);
    }
}

#[test]
fn information_inequalities() {
    let tol = 1e-8;
    for &a in &[0.25, 0.5, 1.0, 2.0, 4.0] {
        let domains = [
            FundamentalDomain::centered_interval(a).unwrap(),
            FundamentalDomain::interval(0.0, a).unwrap(),
        ];
        let models = [
            DensityModel::gaussian(0.1, 0.3).unwrap(),
            DensityModel::gaussian(-1.0, 2.5).unwrap(),
            DensityModel::exponential(1.5).unwrap(),
        ];
        for d in &domains {
            for m in &models {
                let r = mutual_information(m, d, tol).unwrap();
                assert!(r.mutual_info <= r.h_xq + tol);
                assert!(r.h_xpi <= a.ln() + tol);
                assert!(r.h_xpi <= r.h_x + tol);
                assert!(r.h_x <= r.h_xpi + r.h_xq + tol);
            }
        }
    }
}

#[test]
fn information_vanishes_at_both_scaling_limits() {
    let m = DensityModel::gaussian(0.0, 1.0).unwrap();
    let base = FundamentalDomain::centered_interval(1.0).unwrap();
    let alphas = [0.02, 0.1, 0.5, 1.0, 2.0, 5.0, 12.0, 30.0];
    let sweep = scaling_sweep(&m, &base, &alphas, 1e-8).unwrap();
    assert!(sweep.limits_vanish(0.01));
    let mid = sweep
        .points
        .iter()
        .map(|p| p.report.mutual_info)
        .fold(0.0, f64::max);
    assert!(mid > 0.1);
}

#[test]
fn quantized_entropy_decreases_for_coarse_lattices() {
    let m = DensityModel::gaussian(0.0, 1.0).unwrap();
    let base = FundamentalDomain::centered_interval(1.0).unwrap();
    let alphas: Vec<f64> = (0..15).map(|i| 6.0 + i as f64).collect();
    let sweep = scaling_sweep(&m, &base, &alphas, 1e-8).unwrap();
    for w in sweep.points.windows(2) {
        assert!(w[1].report.h_xq <= w[0].report.h_xq);
    }
}

#[test]
fn bounds_dominate_on_shifted_models() {
    let d = FundamentalDomain::centered_interval(1.0).unwrap();
    for &(mu, v) in &[(0.3, 0.09), (0.5, 0.2), (-0.2, 1.0)] {
        let r = mutual_information(&DensityModel::gaussian(mu, v).unwrap(), &d, 1e-10).unwrap();
        assert!(r.bound.unwrap() > r.mutual_info);
    }
    let d = FundamentalDomain::interval(0.0, 0.5).unwrap();
    for &nu in &[0.3, 3.0] {
        let r = mutual_information(&DensityModel::exponential(nu).unwrap(), &d, 1e-10).unwrap();
        assert!(r.bound.unwrap() > r.mutual_info);
    }
}
