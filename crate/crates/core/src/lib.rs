//! Certified eigenvalue-free regions for three-dimensional Dirac operators
//! `H_V = -i α·∇ + m α₄ + V` with possibly non-Hermitian matrix potentials `V`.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: 4×4 complex matrices, the Dirac matrices and matrix norms.
//! * [`resolvent`]: the free resolvent kernel `(H₀ - z)⁻¹(x, x')`, its
//!   Hilbert–Schmidt norm in closed form and the pointwise bound on it.
//! * [`enclosure`]: the exclusion criteria built on the weight `f(λ, m)`,
//!   per-point certification and rasterisation over a rectangle of the plane.
//! * [`potential`]: potential models, Lebesgue norms of `|V|` by adaptive
//!   quadrature and the two admissibility checks.
//! * [`bs`]: a desk-scale Nyström discretisation of the Birman–Schwinger
//!   operator used to cross-check the analytic norm bounds.
//! * [`gridfile`]: the plain-text raster format.
//! * [`validation`]: self-check suites exposed by the command line tool.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bs;
pub mod constants;
pub mod enclosure;
pub mod error;
pub mod gridfile;
pub mod potential;
pub mod quadrature;
pub mod resolvent;
pub mod validation;

pub use num_complex::Complex64;

pub use algebra::{dirac_basis, DiracBasis, Matrix4C, Representation};
pub use bs::{build_bs, bs_norm_estimate, lemma1_bound, lemma2_bound, BsDiscretization, BsNormEstimate, BsScheme, PowerIteration};
pub use enclosure::{certify, certify_thm1, certify_thm2, f_function, raster, EnclosureReport, GridAxis, GridSpec, RegionGrid};
pub use error::{Error, Result};
pub use potential::{LpExponent, NormProvenance, NormValue, PotentialModel, QuadratureResult, ResolvedNorms};
pub use resolvent::{hs_bound, hs_closed_form, kappa, kernel, principal_sqrt, KernelEval, SpectralPoint};

/// The universal scalar type.
pub type ComplexScalar = Complex64;

/// A point of ℝ³.
pub type Vec3 = [f64; 3];
