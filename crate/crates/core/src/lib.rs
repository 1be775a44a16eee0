//! Numerical toolkit for the inhomogeneous biharmonic Dirichlet problem
//! `ΔΔf = g` on the unit disk with boundary data `f = f*`, `f_z̄ = φ`.
//!
//! The crate evaluates solutions through their Green-function
//! representation and checks the associated Schwarz-type, gradient,
//! Landau-radius and Lipschitz estimates against numerical oracles.
//!
//! Module map:
//!
//! * [`kernels`]: closed-form Green function, Poisson kernel and friends.
//! * [`quadrature`]: periodic trapezoid on the circle, graded polar rules on the disk.
//! * [`solver`]: boundary/source data models and the representation formula.
//! * [`bounds`]: the inequality checks and grid sweeps producing [`BoundReport`]s.
//! * [`landau`]: univalence radius machinery.
//! * [`lipschitz`]: majorants and the Lipschitz-modulus estimator.

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod kernels;
pub mod landau;
pub mod lipschitz;
pub mod quadrature;
pub mod solver;

pub use num_complex::Complex64;

pub use bounds::{BoundId, BoundReport, Norms, Sample};
pub use error::{Error, Result};
pub use kernels::KernelGradient;
pub use landau::{LandauInput, LandauResult};
pub use lipschitz::{LipschitzReport, Majorant};
pub use quadrature::{CircleRule, DiskRule, DiskRuleParams};
pub use solver::{BidegreePoly, BoundaryFourier, GradResult, PolarGrid, ProblemSpec};
