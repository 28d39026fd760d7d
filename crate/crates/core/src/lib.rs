//! Finite-element solver and convergence-study harness for linear-quadratic
//! elliptic optimal control with pointwise state tracking.
//!
//! The state equation `-Δu = f + q` on a disc is discretized with P1 elements.
//! Controls are bounded pointwise, `a ≤ q ≤ b`, and are discretized either
//! implicitly through the adjoint (variational discretization), cellwise
//! constant, or cellwise constant followed by a projection post-processing
//! step.
//!
//! * [`mesh`]: disc and square triangulations, uniform refinement, point location.
//! * [`fem`]: stiffness assembly, load vectors, solvers, projections.
//! * [`greens`]: the closed-form manufactured solution built on the Green's
//!   function of the disc.
//! * [`control`]: reduced coefficient solver for the discrete optimality system.
//! * [`analysis`]: error norms, active-set classification, convergence orders.
//! * [`study`]: configuration-driven experiment runner used by the CLI.

pub mod analysis;
pub mod bounds;
pub mod config;
pub mod control;
pub mod error;
pub mod fem;
pub mod greens;
pub mod mesh;
pub mod oracle;
pub mod quadrature;
pub mod study;

pub use bounds::{project_interval, Bounds};
pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];
