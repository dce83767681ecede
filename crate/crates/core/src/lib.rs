//! Lattice decompositions of probability densities.
//!
//! A random vector `X` on `R^n` splits along a lattice `Λ` into a wrapped
//! part `X_π` living on a fundamental domain and a quantized part `X_Q` on
//! the lattice, with `X = X_π + X_Q`. This crate computes the laws of both
//! parts, their entropies and mutual information, Fisher information at each
//! level, and the analogous splitting for finite abelian groups.

pub mod density;
pub mod error;
pub mod fisher;
pub mod group;
pub mod info;
pub mod lattice;
pub mod quadrature;
pub mod transform;

pub use density::{DensityModel, ParametricFamily, SupportDescriptor};
pub use error::{Error, Result};
pub use fisher::{fisher_numeric, FisherLevel, FisherReport};
pub use group::{FinitePmf, FiniteQuotient};
pub use info::{mutual_information, InfoReport, Units};
pub use lattice::{FundamentalDomain, Lattice, LatticePoint};
pub use transform::{
    conditional_discretization, decompose_samples, product_density, quantize_density, wrap_density,
    QuantizedPmf, WrappedDensity,
};
