//! Wrapping and quantization on discrete and compact abelian groups.
//!
//! Three quotients are supported: a sublattice `Λ_s ⊂ Λ` (elements are
//! integer coefficient vectors in the basis of `Λ`), a linear code `C` in
//! `Z_q^n`, and the circle `R/α_sZ` with the finite subgroup generated by
//! `α = α_s/k`. Each coset gets a leader of minimum Euclidean norm, ties
//! going to the lexicographically largest candidate, so every element splits
//! as `x = leader + s` with `s` in the subgroup.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::ops::Add;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::quadrature::{integrate, Interval, QuadOptions};

/// Largest sublattice index enumerated.
pub const MAX_LATTICE_INDEX: u64 = 1_000_000;
/// Largest ambient size `q^n` enumerated for codes.
pub const MAX_CODE_SPACE: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    /// `Λ = BZ^n`; elements are coefficient vectors.
    LatticeGroup { basis: DMatrix<f64> },
    /// `Z_q^n`; elements have entries in `0..q`.
    ModularSpace { q: i64, n: usize },
    /// The circle `R/α_sZ`.
    Torus1D { alpha_s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Subgroup {
    /// Sublattice basis as integer columns in the basis of `Λ`.
    Sublattice(Vec<Vec<i64>>),
    /// Code generator rows over `Z_q`.
    Code(Vec<Vec<i64>>),
    /// Step `α` with `α_s = kα`.
    TorusStep(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub index: usize,
    /// Canonical representative (reduced coefficients, or smallest member
    /// for codes, or `i` for the torus point `iα`).
    pub representative: Vec<i64>,
    pub leader: Vec<i64>,
}

#[derive(Debug, Clone)]
enum Structure {
    Lattice {
        hnf: Vec<Vec<i128>>,
        radices: Vec<i64>,
    },
    Code {
        q: i64,
        n: usize,
        coset_of: Vec<u32>,
        codewords: Vec<Vec<i64>>,
    },
    Torus {
        k: usize,
    },
}

/// A finite quotient `G/Γ` with its cosets and leaders.
#[derive(Debug, Clone)]
pub struct FiniteQuotient {
    ambient: Ambient,
    subgroup: Subgroup,
    structure: Structure,
    cosets: Vec<Coset>,
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Lower-triangular column Hermite form of a square integer matrix given by
/// columns: `H = M U` with `U` unimodular, positive diagonal and
/// `0 ≤ H[i][j] < H[i][i]` for `j < i`. Returned as columns.
fn hermite_columns(cols: &[Vec<i64>]) -> Result<Vec<Vec<i128>>> {
    let n = cols.len();
    let mut h: Vec<Vec<i128>> = cols
        .iter()
        .map(|c| c.iter().map(|&v| v as i128).collect())
        .collect();
    for i in 0..n {
        // gcd-eliminate row i across columns i..n
        loop {
            let pivot = (i..n)
                .filter(|&j| h[j][i] != 0)
                .min_by_key(|&j| h[j][i].abs());
            let Some(p) = pivot else {
                return Err(Error::InvalidQuotient(
                    "sublattice basis is singular".into(),
                ));
            };
            h.swap(i, p);
            let mut done = true;
            for j in i + 1..n {
                if h[j][i] != 0 {
                    let t = floor_div(h[j][i], h[i][i]);
                    let (ci, cj) = (h[i].clone(), &mut h[j]);
                    for r in 0..n {
                        cj[r] -= t * ci[r];
                    }
                    if h[j][i] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[i][i] < 0 {
            for v in h[i].iter_mut() {
                *v = -*v;
            }
        }
        for j in 0..i {
            let t = floor_div(h[j][i], h[i][i]);
            let ci = h[i].clone();
            for r in 0..n {
                h[j][r] -= t * ci[r];
            }
        }
    }
    Ok(h)
}

/// `B x` for integer `x`.
fn embed(basis: &DMatrix<f64>, x: &[i64]) -> Vec<f64> {
    (0..basis.nrows())
        .map(|r| (0..x.len()).map(|c| basis[(r, c)] * x[c] as f64).sum())
        .collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Picks the leader among `candidates` by norm, then lexicographically largest.
fn pick_leader(candidates: impl Iterator<Item = (f64, Vec<i64>)>, tie: f64) -> Vec<i64> {
    let mut best: Option<(f64, Vec<i64>)> = None;
    for (n2, d) in candidates {
        best = match best {
            None => Some((n2, d)),
            Some((b2, bd)) => {
                if n2 < b2 - tie || ((n2 - b2).abs() <= tie && d > bd) {
                    Some((n2, d))
                } else {
                    Some((b2, bd))
                }
            }
        };
    }
    best.expect("coset has at least one member").1
}

fn check_integer_basis(basis: &DMatrix<f64>) -> bool {
    basis.iter().all(|v| v.fract() == 0.0 && v.abs() < 1e7)
}

impl FiniteQuotient {
    /// `Λ/Λ_s` with `Λ = BZ^n` (`basis = None` means `Z^n`) and `Λ_s`
    /// spanned by the integer columns of `sublattice`.
    pub fn lattice(basis: Option<DMatrix<f64>>, sublattice: Vec<Vec<i64>>) -> Result<Self> {
        let n = sublattice.len();
        if n == 0 || sublattice.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidQuotient(
                "sublattice needs n integer columns of length n".into(),
            ));
        }
        let basis = basis.unwrap_or_else(|| DMatrix::identity(n, n));
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: basis.ncols(),
            });
        }
        Lattice::new(basis.clone())?;
        let hnf = hermite_columns(&sublattice)?;
        let mut size: u128 = 1;
        for (i, col) in hnf.iter().enumerate() {
            size = size.saturating_mul(col[i] as u128);
        }
        if size > MAX_LATTICE_INDEX as u128 {
            return Err(Error::QuotientTooLarge {
                size,
                cap: MAX_LATTICE_INDEX,
            });
        }
        let radices: Vec<i64> = (0..n).map(|i| hnf[i][i] as i64).collect();
        let mut q = FiniteQuotient {
            ambient: Ambient::LatticeGroup {
                basis: basis.clone(),
            },
            subgroup: Subgroup::Sublattice(sublattice),
            structure: Structure::Lattice {
                hnf: hnf.clone(),
                radices: radices.clone(),
            },
            cosets: Vec::new(),
        };
        let sub_gen = DMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|m| basis[(r, m)] * hnf[c][m] as f64)
                .sum::<f64>()
        });
        let sub = Lattice::new(sub_gen)?;
        let exact = check_integer_basis(&basis);
        let tie = if exact { 0.0 } else { 1e-9 };
        let mut rep = vec![0i64; n];
        for index in 0..size as usize {
            let x = embed(&basis, &rep);
            let babai: Vec<f64> = sub
                .basis_coordinates(&x)
                .iter()
                .map(|t| t.round())
                .collect();
            let sb: Vec<f64> = (0..n)
                .map(|r| (0..n).map(|c| sub.generator()[(r, c)] * babai[c]).sum())
                .collect();
            let r0 = norm2(&x.iter().zip(&sb).map(|(a, b)| a - b).collect::<Vec<_>>()).sqrt();
            let mut cands = Vec::new();
            sub.for_each_in_ball(&x, r0 * (1.0 + 1e-9) + 1e-9, |z, _| {
                let d: Vec<i64> = (0..n)
                    .map(|r| rep[r] - (0..n).map(|c| hnf[c][r] * z[c] as i128).sum::<i128>() as i64)
                    .collect();
                cands.push(d);
            });
            let leader = pick_leader(
                cands.into_iter().map(|d| (norm2(&embed(&basis, &d)), d)),
                tie,
            );
            q.cosets.push(Coset {
                index,
                representative: rep.clone(),
                leader,
            });
            // odometer over Π [0, radix), last coordinate fastest
            for i in (0..n).rev() {
                rep[i] += 1;
                if rep[i] < radices[i] {
                    break;
                }
                rep[i] = 0;
            }
        }
        Ok(q)
    }

    /// `Z_q^n / C` with `C` the `Z_q`-span of the generator rows.
    pub fn code(q: i64, n: usize, generator: Vec<Vec<i64>>) -> Result<Self> {
        if q < 2 || n == 0 {
            return Err(Error::InvalidQuotient(format!(
                "need q >= 2 and n >= 1, got q={q}, n={n}"
            )));
        }
        if generator.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidQuotient(
                "generator rows must have length n".into(),
            ));
        }
        let space = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if space > MAX_CODE_SPACE as u128 {
            return Err(Error::QuotientTooLarge {
                size: space,
                cap: MAX_CODE_SPACE,
            });
        }
        let space = space as usize;
        let encode = |v: &[i64]| {
            v.iter()
                .fold(0usize, |acc, &x| acc * q as usize + x as usize)
        };
        let decode = |mut idx: usize| {
            let mut v = vec![0i64; n];
            for x in v.iter_mut().rev() {
                *x = (idx % q as usize) as i64;
                idx /= q as usize;
            }
            v
        };
        // closure of the span under addition of generator rows
        let mut in_code = vec![false; space];
        let zero = vec![0i64; n];
        in_code[0] = true;
        let mut stack = vec![zero];
        let mut codewords = Vec::new();
        let rows: Vec<Vec<i64>> = generator
            .iter()
            .map(|r| r.iter().map(|x| x.rem_euclid(q)).collect())
            .collect();
        while let Some(c) = stack.pop() {
            for r in &rows {
                let s: Vec<i64> = c
                    .iter()
                    .zip(r)
                    .map(|(a, b)| (a + b).rem_euclid(q))
                    .collect();
                let id = encode(&s);
                if !in_code[id] {
                    in_code[id] = true;
                    stack.push(s);
                }
            }
            codewords.push(c);
        }
        codewords.sort();
        let lift = |x: i64| if 2 * x > q { x - q } else { x };
        let mut coset_of = vec![u32::MAX; space];
        let mut cosets = Vec::new();
        for start in 0..space {
            if coset_of[start] != u32::MAX {
                continue;
            }
            let index = cosets.len();
            let base = decode(start);
            let mut members = Vec::with_capacity(codewords.len());
            for c in &codewords {
                let m: Vec<i64> = base
                    .iter()
                    .zip(c)
                    .map(|(a, b)| (a + b).rem_euclid(q))
                    .collect();
                coset_of[encode(&m)] = index as u32;
                members.push(m);
            }
            let leader = pick_leader(
                members.into_iter().map(|m| {
                    let l: Vec<i64> = m.iter().map(|&x| lift(x)).collect();
                    (l.iter().map(|&x| (x * x) as f64).sum(), l)
                }),
                0.0,
            );
            let leader: Vec<i64> = leader.iter().map(|x| x.rem_euclid(q)).collect();
            cosets.push(Coset {
                index,
                representative: base,
                leader,
            });
        }
        Ok(FiniteQuotient {
            ambient: Ambient::ModularSpace { q, n },
            subgroup: Subgroup::Code(generator),
            structure: Structure::Code {
                q,
                n,
                coset_of,
                codewords,
            },
            cosets,
        })
    }

    /// `(R/α_sZ) / (αZ/α_sZ)` with `α_s = kα`, `k ≥ 2` an integer.
    pub fn torus(alpha_s: f64, alpha: f64) -> Result<Self> {
        if !(alpha_s > 0.0 && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "circumference and step must be positive, got ({alpha_s}, {alpha})"
            )));
        }
        let ratio = alpha_s / alpha;
        let k = ratio.round();
        if (ratio - k).abs() > 1e-9 * ratio.max(1.0) || k < 2.0 {
            return Err(Error::NonIntegerIndex { ratio });
        }
        let k = k as usize;
        let cosets = (0..k)
            .map(|i| {
                let j = i as i64;
                let leader = if 2 * i > k { j - k as i64 } else { j };
                Coset {
                    index: i,
                    representative: vec![j],
                    leader: vec![leader],
                }
            })
            .collect();
        Ok(FiniteQuotient {
            ambient: Ambient::Torus1D { alpha_s },
            subgroup: Subgroup::TorusStep(alpha),
            structure: Structure::Torus { k },
            cosets,
        })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    /// Number of cosets `k`.
    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn dim(&self) -> usize {
        match &self.structure {
            Structure::Lattice { radices, .. } => radices.len(),
            Structure::Code { n, .. } => *n,
            Structure::Torus { .. } => 1,
        }
    }

    /// Codewords in lexicographic order (codes only).
    pub fn codewords(&self) -> Option<&[Vec<i64>]> {
        match &self.structure {
            Structure::Code { codewords, .. } => Some(codewords),
            _ => None,
        }
    }

    fn check(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        if let Structure::Code { q, .. } = &self.structure {
            if x.iter().any(|v| !(0..*q).contains(v)) {
                return Err(Error::InvalidParameter(format!(
                    "{x:?} is not an element of Z_{q}^n"
                )));
            }
        }
        Ok(())
    }

    /// Index of the coset containing `x`.
    pub fn coset_of(&self, x: &[i64]) -> Result<usize> {
        self.check(x)?;
        Ok(match &self.structure {
            Structure::Lattice { hnf, radices } => {
                let mut a: Vec<i128> = x.iter().map(|&v| v as i128).collect();
                for i in 0..a.len() {
                    let t = floor_div(a[i], hnf[i][i]);
                    if t != 0 {
                        for r in i..a.len() {
                            a[r] -= t * hnf[i][r];
                        }
                    }
                }
                a.iter()
                    .zip(radices)
                    .fold(0usize, |acc, (&v, &r)| acc * r as usize + v as usize)
            }
            Structure::Code { q, coset_of, .. } => {
                coset_of[x
                    .iter()
                    .fold(0usize, |acc, &v| acc * *q as usize + v as usize)]
                    as usize
            }
            Structure::Torus { k } => x[0].rem_euclid(*k as i64) as usize,
        })
    }

    /// Splits `x = leader + s` with `s` in the subgroup (sum taken mod `q`
    /// for codes and mod `k` for the torus).
    pub fn decompose(&self, x: &[i64]) -> Result<(usize, Vec<i64>, Vec<i64>)> {
        let c = self.coset_of(x)?;
        let leader = self.cosets[c].leader.clone();
        let s: Vec<i64> = match &self.structure {
            Structure::Code { q, .. } => x
                .iter()
                .zip(&leader)
                .map(|(a, b)| (a - b).rem_euclid(*q))
                .collect(),
            _ => x.iter().zip(&leader).map(|(a, b)| a - b).collect(),
        };
        Ok((c, leader, s))
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn compose(&self, leader: &[i64], s: &[i64]) -> Vec<i64> {
        match &self.structure {
            Structure::Code { q, .. } => leader
                .iter()
                .zip(s)
                .map(|(a, b)| (a + b).rem_euclid(*q))
                .collect(),
            _ => leader.iter().zip(s).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Cosets as (canonical representatives, leaders), in coset-index order.
pub fn coset_decompose(q: &FiniteQuotient) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    q.cosets()
        .iter()
        .map(|c| (c.representative.clone(), c.leader.clone()))
        .unzip()
}

/// A finitely supported probability mass function over group elements,
/// generic in the number type so exact rationals can be used.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmf<P> {
    pub support: Vec<Vec<i64>>,
    pub probs: Vec<P>,
}

impl<P: Clone + Zero + Add<Output = P>> FinitePmf<P> {
    pub fn new(support: Vec<Vec<i64>>, probs: Vec<P>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                found: probs.len(),
            });
        }
        Ok(FinitePmf { support, probs })
    }

    pub fn from_map(map: BTreeMap<Vec<i64>, P>) -> Self {
        let (support, probs) = map.into_iter().unzip();
        FinitePmf { support, probs }
    }

    pub fn point_mass(x: Vec<i64>, one: P) -> Self {
        FinitePmf {
            support: vec![x],
            probs: vec![one],
        }
    }

    pub fn total(&self) -> P {
        self.probs.iter().cloned().fold(P::zero(), |a, b| a + b)
    }

    /// Mass at `x`, merging repeated support entries.
    pub fn get(&self, x: &[i64]) -> P {
        self.support
            .iter()
            .zip(&self.probs)
            .filter(|(s, _)| s.as_slice() == x)
            .fold(P::zero(), |a, (_, p)| a + p.clone())
    }

    /// Support and masses merged into a sorted map.
    pub fn to_map(&self) -> BTreeMap<Vec<i64>, P> {
        let mut m: BTreeMap<Vec<i64>, P> = BTreeMap::new();
        for (s, p) in self.support.iter().zip(&self.probs) {
            let e = m.entry(s.clone()).or_insert_with(P::zero);
            *e = e.clone() + p.clone();
        }
        m
    }
}

impl<P: std::fmt::Display> FinitePmf<P> {
    /// Writes `element,prob`; vector elements are `;`-joined.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "element,prob")?;
        for (s, p) in self.support.iter().zip(&self.probs) {
            let e: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{},{}", e.join(";"), p)?;
        }
        Ok(())
    }
}

fn require_discrete(q: &FiniteQuotient) -> Result<()> {
    if let Structure::Torus { .. } = q.structure {
        return Err(Error::Unsupported(
            "use torus_decompose for the circle quotient".into(),
        ));
    }
    Ok(())
}

/// `p_π(d_i) = Σ_{s ∈ Γ} p(d_i + s)`, one entry per coset keyed by its leader.
pub fn wrap_pmf<P: Clone + Zero + Add<Output = P>>(
    p: &FinitePmf<P>,
    q: &FiniteQuotient,
) -> Result<FinitePmf<P>> {
    require_discrete(q)?;
    let mut acc = vec![P::zero(); q.index()];
    for (x, w) in p.support.iter().zip(&p.probs) {
        let c = q.coset_of(x)?;
        acc[c] = acc[c].clone() + w.clone();
    }
    Ok(FinitePmf {
        support: q.cosets().iter().map(|c| c.leader.clone()).collect(),
        probs: acc,
    })
}

/// `p_Q(s) = Σ_i p(d_i + s)`, keyed by subgroup element in sorted order.
pub fn quantize_pmf<P: Clone + Zero + Add<Output = P>>(
    p: &FinitePmf<P>,
    q: &FiniteQuotient,
) -> Result<FinitePmf<P>> {
    require_discrete(q)?;
    let mut acc: BTreeMap<Vec<i64>, P> = BTreeMap::new();
    for (x, w) in p.support.iter().zip(&p.probs) {
        let (_, _, s) = q.decompose(x)?;
        let e = acc.entry(s).or_insert_with(P::zero);
        *e = e.clone() + w.clone();
    }
    Ok(FinitePmf::from_map(acc))
}

/// Joint table `(leader, s) → p(leader + s)`.
pub fn joint_table<P: Clone + Zero + Add<Output = P>>(
    p: &FinitePmf<P>,
    q: &FiniteQuotient,
) -> Result<BTreeMap<(Vec<i64>, Vec<i64>), P>> {
    require_discrete(q)?;
    let mut acc = BTreeMap::new();
    for (x, w) in p.support.iter().zip(&p.probs) {
        let (_, d, s) = q.decompose(x)?;
        let e = acc.entry((d, s)).or_insert_with(P::zero);
        *e = e.clone() + w.clone();
    }
    Ok(acc)
}

/// `p(x) ≤ c · r^{‖x‖₁}` for a pmf on `Z^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricEnvelope {
    pub c: f64,
    pub r: f64,
}

impl GeometricEnvelope {
    /// Bound on the mass outside `‖x‖₁ ≤ radius` in `Z^n`, using
    /// `#{‖x‖₁ = m} ≤ 2^n C(m+n-1, n-1)`.
    pub fn tail(&self, n: usize, radius: u64) -> f64 {
        let mut total = 0.0;
        let mut m = radius + 1;
        let mut prev = f64::INFINITY;
        loop {
            let mut count = 2f64.powi(n as i32);
            for j in 1..n {
                count *= (m as f64 + j as f64) / j as f64;
            }
            let term = self.c * count * self.r.powf(m as f64);
            total += term;
            if (term < 1e-18 * total && term <= prev) || term == 0.0 {
                // remaining terms decay at least geometrically with ratio term/prev
                let ratio = if prev.is_finite() && prev > 0.0 {
                    term / prev
                } else {
                    self.r
                };
                return total + term * ratio / (1.0 - ratio).max(1e-12);
            }
            prev = term;
            m += 1;
        }
    }
}

/// A pmf on `Z^n` with possibly infinite support.
#[derive(Clone)]
pub struct DecayingPmf {
    pub dim: usize,
    pub prob: Arc<dyn Fn(&[i64]) -> f64 + Send + Sync>,
    pub envelope: Option<GeometricEnvelope>,
}

impl std::fmt::Debug for DecayingPmf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DecayingPmf")
            .field("dim", &self.dim)
            .field("envelope", &self.envelope)
            .finish()
    }
}

impl DecayingPmf {
    /// `(1 - r) r^j` on `j ≥ 0`.
    pub fn geometric(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric ratio must be in (0, 1), got {r}"
            )));
        }
        Ok(DecayingPmf {
            dim: 1,
            prob: Arc::new(move |x: &[i64]| {
                if x[0] < 0 {
                    0.0
                } else {
                    (1.0 - r) * r.powi(x[0] as i32)
                }
            }),
            envelope: Some(GeometricEnvelope { c: 1.0 - r, r }),
        })
    }

    /// Restriction to an `ℓ¹` ball whose complement carries less than `tol`;
    /// returns the table and the certified omitted mass.
    pub fn truncate(&self, tol: f64) -> Result<(FinitePmf<f64>, f64)> {
        let env = self.envelope.ok_or(Error::NoTailBound)?;
        let mut radius = 0u64;
        while env.tail(self.dim, radius) >= tol {
            radius += 1;
            if radius > 1_000_000 {
                return Err(Error::NoTailBound);
            }
        }
        let n = self.dim;
        let rr = radius as i64;
        let mut map = BTreeMap::new();
        let mut x = vec![-rr; n];
        loop {
            if x.iter().map(|v| v.abs()).sum::<i64>() <= rr {
                let p = (self.prob)(&x);
                if p > 0.0 {
                    map.insert(x.clone(), p);
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok((FinitePmf::from_map(map), env.tail(n, radius)));
                }
                i -= 1;
                if x[i] < rr {
                    x[i] += 1;
                    break;
                }
                x[i] = -rr;
            }
        }
    }
}

/// One draw split along the quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSample {
    pub x: Vec<i64>,
    pub coset: usize,
    pub leader: Vec<i64>,
    pub quantized: Vec<i64>,
}

/// Draws from `p` and splits each draw as `x = leader + s`.
pub fn group_decompose_samples(
    p: &FinitePmf<f64>,
    q: &FiniteQuotient,
    count: usize,
    seed: u64,
) -> Result<Vec<GroupSample>> {
    require_discrete(q)?;
    let dist = WeightedIndex::new(&p.probs)
        .map_err(|e| Error::InvalidParameter(format!("bad pmf weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = p.support[dist.sample(&mut rng)].clone();
            let (coset, leader, quantized) = q.decompose(&x)?;
            Ok(GroupSample {
                x,
                coset,
                leader,
                quantized,
            })
        })
        .collect()
}

/// Result of splitting a density on `R/α_sZ` along `αZ/α_sZ`.
pub struct TorusDecomposition {
    pub k: usize,
    pub alpha: f64,
    pbar: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `p_Q(i) = ∫_0^α p̄(x + iα) dx`.
    pub pmf: Vec<f64>,
}

impl TorusDecomposition {
    /// `p_π(x̄) = Σ_i p̄(x̄ + iα)` for `x̄ ∈ [0, α)`.
    pub fn wrapped(&self, x: f64) -> f64 {
        let x = x.rem_euclid(self.alpha);
        (0..self.k)
            .map(|i| (self.pbar)(x + i as f64 * self.alpha))
            .sum()
    }
}

/// Splits a density `p̄` on `[0, α_s)` into its wrap onto `[0, α)` and its
/// pmf on the `k = α_s/α` cosets.
pub fn torus_decompose(
    pbar: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    quotient: &FiniteQuotient,
    tol: f64,
) -> Result<TorusDecomposition> {
    let (Structure::Torus { k }, Subgroup::TorusStep(alpha)) =
        (&quotient.structure, &quotient.subgroup)
    else {
        return Err(Error::Unsupported(
            "torus_decompose needs a circle quotient".into(),
        ));
    };
    let (k, alpha) = (*k, *alpha);
    let opts = QuadOptions::with_tol(tol / k as f64);
    let pmf = (0..k)
        .map(|i| {
            let lo = i as f64 * alpha;
            Ok(integrate(|x| pbar(x), Interval::finite(lo, lo + alpha), &opts)?.value())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorusDecomposition {
        k,
        alpha,
        pbar,
        pmf,
    })
}
