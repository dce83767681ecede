//! Full-rank lattices, fundamental domains and the wrapping/quantization maps.
//!
//! A lattice is stored through its generator matrix `B` (columns are basis
//! vectors). A [`FundamentalDomain`] fixes the representative of each coset:
//! `quantize_point` returns the lattice point `λ` with `x - λ ∈ D` and
//! `wrap_point` returns `x - λ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Determinants at or below this magnitude are treated as singular.
pub const DET_EPS: f64 = 1e-12;

/// Default cap on the number of coefficient vectors visited by enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Largest dimension accepted by the Voronoi closest-point search.
pub const MAX_VORONOI_DIM: usize = 4;

/// Relative slack under which two squared distances count as a tie.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    generator: DMatrix<f64>,
    inverse: DMatrix<f64>,
    covolume: f64,
}

/// A point of a lattice together with its integer coordinates in the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    pub coords: Vec<f64>,
    pub coeffs: Vec<i64>,
}

impl Lattice {
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        if !generator.is_square() || generator.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "generator must be a non-empty square matrix, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        if generator.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "generator has non-finite entries".into(),
            ));
        }
        let det = generator.determinant();
        if det.abs() <= DET_EPS {
            return Err(Error::SingularGenerator { det });
        }
        let inverse = generator
            .clone()
            .try_inverse()
            .ok_or(Error::SingularGenerator { det })?;
        Ok(Lattice {
            generator,
            inverse,
            covolume: det.abs(),
        })
    }

    /// Builds a lattice from basis vectors given as columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter(
                "basis vectors must all have length n".into(),
            ));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| columns[j][i]))
    }

    /// `Z^n`.
    pub fn integer(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    /// `αZ^n`.
    pub fn scaled_integer(n: usize, alpha: f64) -> Result<Self> {
        Self::new(DMatrix::identity(n, n) * alpha)
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(&self.generator * alpha)
    }

    pub fn point(&self, coeffs: &[i64]) -> LatticePoint {
        let a = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&c| c as f64));
        let coords = (&self.generator * a).as_slice().to_vec();
        LatticePoint {
            coords,
            coeffs: coeffs.to_vec(),
        }
    }

    /// Coordinates of `x` in the lattice basis, `B⁻¹x`.
    pub fn basis_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(x);
        (&self.inverse * v).as_slice().to_vec()
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        self.generator.column(j).norm()
    }

    /// Upper bound on the covering radius, `½·sqrt(Σ‖b_i‖²)`.
    pub fn covering_radius_bound(&self) -> f64 {
        0.5 * (0..self.dim())
            .map(|j| self.column_norm(j).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Every lattice point within Euclidean distance `radius` of `center`.
    pub fn enumerate_points(&self, center: &[f64], radius: f64) -> Result<Vec<LatticePoint>> {
        self.enumerate_points_capped(center, radius, DEFAULT_ENUMERATION_CAP)
    }

    /// As [`Lattice::enumerate_points`] with an explicit cap on the search box.
    ///
    /// Coefficients are bounded through `|α_i - (B⁻¹c)_i| ≤ ‖row_i(B⁻¹)‖·r`,
    /// which holds for every point of the ball, so the box search misses none.
    /// Points come out in lexicographic coefficient order.
    pub fn enumerate_points_capped(
        &self,
        center: &[f64],
        radius: f64,
        cap: u64,
    ) -> Result<Vec<LatticePoint>> {
        self.check_dim(center)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let n = self.dim();
        let u = self.basis_coordinates(center);
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        let mut count: u128 = 1;
        for i in 0..n {
            let w = self.inverse.row(i).norm() * radius;
            lo[i] = (u[i] - w - 1e-9).ceil() as i64;
            hi[i] = (u[i] + w + 1e-9).floor() as i64;
            let len = (hi[i] - lo[i] + 1).max(0) as u128;
            count = count.saturating_mul(len);
        }
        if count > cap as u128 {
            return Err(Error::EnumerationTooLarge { count, cap });
        }
        let mut out = Vec::new();
        if count == 0 {
            return Ok(out);
        }
        let limit = radius + 1e-9;
        let mut a = lo.clone();
        loop {
            let p = self.point(&a);
            let d2: f64 = p
                .coords
                .iter()
                .zip(center)
                .map(|(x, c)| (x - c) * (x - c))
                .sum();
            if d2.sqrt() <= limit {
                out.push(p);
            }
            // odometer, last coordinate fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if a[i] < hi[i] {
                    a[i] += 1;
                    break;
                }
                a[i] = lo[i];
            }
        }
    }

    /// Calls `f(coeffs, coords)` for every lattice point within `radius` of
    /// `center`, without collecting them. No enumeration cap is applied.
    pub fn for_each_in_ball<F: FnMut(&[i64], &[f64])>(
        &self,
        center: &[f64],
        radius: f64,
        mut f: F,
    ) {
        let n = self.dim();
        let u = self.basis_coordinates(center);
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        for i in 0..n {
            let w = self.inverse.row(i).norm() * radius;
            lo[i] = (u[i] - w - 1e-9).ceil() as i64;
            hi[i] = (u[i] + w + 1e-9).floor() as i64;
            if hi[i] < lo[i] {
                return;
            }
        }
        let limit2 = (radius + 1e-9) * (radius + 1e-9);
        let mut a = lo.clone();
        let mut x = vec![0.0; n];
        loop {
            let mut d2 = 0.0;
            for (r, xr) in x.iter_mut().enumerate() {
                let mut v = 0.0;
                for (j, aj) in a.iter().enumerate() {
                    v += self.generator[(r, j)] * *aj as f64;
                }
                *xr = v;
                d2 += (v - center[r]) * (v - center[r]);
            }
            if d2 <= limit2 {
                f(&a, &x);
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if a[i] < hi[i] {
                    a[i] += 1;
                    break;
                }
                a[i] = lo[i];
            }
        }
    }

    /// Closest lattice point; ties go to the lexicographically smallest
    /// coefficient vector.
    pub fn closest_point(&self, x: &[f64]) -> Result<LatticePoint> {
        self.check_dim(x)?;
        if self.dim() > MAX_VORONOI_DIM {
            return Err(Error::UnsupportedDimension {
                op: "closest_point",
                dim: self.dim(),
                max: MAX_VORONOI_DIM,
            });
        }
        // Babai rounding gives a point at distance r0, so the closest point is
        // inside the ball of radius r0 around x.
        let rounded: Vec<i64> = self
            .basis_coordinates(x)
            .iter()
            .map(|t| t.round() as i64)
            .collect();
        let babai = self.point(&rounded);
        let r0 = dist2(&babai.coords, x).sqrt();
        if r0 == 0.0 {
            return Ok(babai);
        }
        let candidates = self.enumerate_points(x, r0 * (1.0 + 1e-9) + 1e-12)?;
        Ok(pick_closest(candidates, x).unwrap_or(babai))
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

fn pick_closest(candidates: Vec<LatticePoint>, x: &[f64]) -> Option<LatticePoint> {
    let scored: Vec<(f64, LatticePoint)> = candidates
        .into_iter()
        .map(|p| (dist2(&p.coords, x), p))
        .collect();
    let dmin = scored.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
    let slack = TIE_TOL * dmin.max(1e-300) + 1e-15;
    scored
        .into_iter()
        .filter(|(d, _)| *d <= dmin + slack)
        .map(|(_, p)| p)
        .min_by(|p, q| p.coeffs.cmp(&q.coeffs))
}

/// Shape of a fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// `offset + {Bt : t ∈ [0,1)^n}`.
    Parallelotope { offset: Vec<f64> },
    /// Points closer to the origin than to any other lattice point; ties go to
    /// the lattice point with lexicographically smallest coefficients.
    Voronoi,
    /// `[left, left + α)` for the lattice `αZ`.
    Interval1D { left: f64 },
}

/// Region over which a Λ-periodic function can be integrated.
#[derive(Debug, Clone, PartialEq)]
pub enum CellRegion {
    Interval {
        lo: f64,
        hi: f64,
    },
    Parallelotope {
        origin: Vec<f64>,
        basis: DMatrix<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalDomain {
    lattice: Lattice,
    kind: DomainKind,
}

impl FundamentalDomain {
    pub fn parallelotope(lattice: Lattice, offset: Vec<f64>) -> Result<Self> {
        lattice.check_dim(&offset)?;
        Ok(FundamentalDomain {
            lattice,
            kind: DomainKind::Parallelotope { offset },
        })
    }

    /// Fundamental parallelotope of the basis, `B[0,1)^n`.
    pub fn basis_parallelotope(lattice: Lattice) -> Self {
        let n = lattice.dim();
        FundamentalDomain {
            lattice,
            kind: DomainKind::Parallelotope {
                offset: vec![0.0; n],
            },
        }
    }

    pub fn voronoi(lattice: Lattice) -> Result<Self> {
        if lattice.dim() > MAX_VORONOI_DIM {
            return Err(Error::UnsupportedDimension {
                op: "Voronoi domain",
                dim: lattice.dim(),
                max: MAX_VORONOI_DIM,
            });
        }
        Ok(FundamentalDomain {
            lattice,
            kind: DomainKind::Voronoi,
        })
    }

    /// `[left, left + scale)` for the lattice `scale·Z`.
    pub fn interval(left: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !left.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval needs finite left end and positive scale, got ({left}, {scale})"
            )));
        }
        let lattice = Lattice::scaled_integer(1, scale)?;
        Ok(FundamentalDomain {
            lattice,
            kind: DomainKind::Interval1D { left },
        })
    }

    /// `[-α/2, α/2)` for `αZ`.
    pub fn centered_interval(scale: f64) -> Result<Self> {
        Self::interval(-0.5 * scale, scale)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// The scaled family member `αΛ`, `αD`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        let lattice = self.lattice.scaled(alpha)?;
        let kind = match &self.kind {
            DomainKind::Parallelotope { offset } => DomainKind::Parallelotope {
                offset: offset.iter().map(|o| o * alpha).collect(),
            },
            DomainKind::Voronoi => DomainKind::Voronoi,
            DomainKind::Interval1D { left } => DomainKind::Interval1D { left: left * alpha },
        };
        Ok(FundamentalDomain { lattice, kind })
    }

    /// For 1-D domains, the interval `[lo, hi)` (Voronoi: `(lo, hi]`).
    pub fn interval_bounds(&self) -> Option<(f64, f64)> {
        if self.dim() != 1 {
            return None;
        }
        let a = self.lattice.generator[(0, 0)];
        match &self.kind {
            DomainKind::Interval1D { left } => Some((*left, left + a)),
            DomainKind::Parallelotope { offset } => {
                Some((offset[0] + a.min(0.0), offset[0] + a.max(0.0)))
            }
            DomainKind::Voronoi => Some((-0.5 * a.abs(), 0.5 * a.abs())),
        }
    }

    /// `sup_{y ∈ D} ‖y‖`, or an upper bound on it.
    pub fn radius_bound(&self) -> f64 {
        match &self.kind {
            DomainKind::Interval1D { .. } => {
                let (lo, hi) = self.interval_bounds().expect("1-D");
                lo.abs().max(hi.abs())
            }
            DomainKind::Parallelotope { offset } => {
                offset.iter().map(|o| o * o).sum::<f64>().sqrt()
                    + (0..self.dim())
                        .map(|j| self.lattice.column_norm(j))
                        .sum::<f64>()
            }
            DomainKind::Voronoi => self.lattice.covering_radius_bound(),
        }
    }

    /// A region equivalent to `D` for integrating Λ-periodic functions.
    ///
    /// For intervals and parallelotopes this is `D` itself. For Voronoi cells
    /// in dimension ≥ 2 it is the basis parallelotope, which covers the same
    /// quotient.
    pub fn periodic_region(&self) -> CellRegion {
        if let Some((lo, hi)) = self.interval_bounds() {
            return CellRegion::Interval { lo, hi };
        }
        let origin = match &self.kind {
            DomainKind::Parallelotope { offset } => offset.clone(),
            _ => vec![0.0; self.dim()],
        };
        CellRegion::Parallelotope {
            origin,
            basis: self.lattice.generator.clone(),
        }
    }

    /// The exact region `D`, when it is an interval or parallelotope.
    pub fn exact_region(&self) -> Option<CellRegion> {
        match (&self.kind, self.dim()) {
            (DomainKind::Voronoi, n) if n > 1 => None,
            _ => Some(self.periodic_region()),
        }
    }

    /// Quantization map `Q(x)`: the lattice point `λ` with `x - λ ∈ D`.
    pub fn quantize_point(&self, x: &[f64]) -> Result<LatticePoint> {
        self.lattice.check_dim(x)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "point has non-finite coordinates".into(),
            ));
        }
        match &self.kind {
            DomainKind::Interval1D { left } => {
                let a = self.lattice.generator[(0, 0)];
                let mut k = ((x[0] - left) / a).floor() as i64;
                for _ in 0..4 {
                    let y = x[0] - a * k as f64;
                    if y < *left {
                        k -= 1;
                    } else if y >= left + a {
                        k += 1;
                    } else {
                        break;
                    }
                }
                Ok(LatticePoint {
                    coords: vec![a * k as f64],
                    coeffs: vec![k],
                })
            }
            DomainKind::Parallelotope { offset } => {
                let shifted: Vec<f64> = x.iter().zip(offset).map(|(v, o)| v - o).collect();
                let mut k: Vec<i64> = self
                    .lattice
                    .basis_coordinates(&shifted)
                    .iter()
                    .map(|t| t.floor() as i64)
                    .collect();
                // Round-off can put x - Bk a hair outside [0,1)^n in basis
                // coordinates; nudge the offending coefficients.
                for _ in 0..4 {
                    let p = self.lattice.point(&k);
                    let y: Vec<f64> = shifted.iter().zip(&p.coords).map(|(v, c)| v - c).collect();
                    let t = self.lattice.basis_coordinates(&y);
                    let mut moved = false;
                    for (ki, ti) in k.iter_mut().zip(&t) {
                        if *ti < 0.0 {
                            *ki -= 1;
                            moved = true;
                        } else if *ti >= 1.0 {
                            *ki += 1;
                            moved = true;
                        }
                    }
                    if !moved {
                        return Ok(p);
                    }
                }
                Ok(self.lattice.point(&k))
            }
            DomainKind::Voronoi => self.lattice.closest_point(x),
        }
    }

    /// Wrapping map `π(x) = x - Q(x)`.
    pub fn wrap_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.decompose_point(x)?.0)
    }

    /// Both factors at once: `(π(x), Q(x))`.
    pub fn decompose_point(&self, x: &[f64]) -> Result<(Vec<f64>, LatticePoint)> {
        let q = self.quantize_point(x)?;
        let y = x.iter().zip(&q.coords).map(|(v, c)| v - c).collect();
        Ok((y, q))
    }

    /// Membership test for `D` under the half-open and tie conventions.
    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        Ok(self.quantize_point(y)?.coeffs.iter().all(|&c| c == 0))
    }
}
