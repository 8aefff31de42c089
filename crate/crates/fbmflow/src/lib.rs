//! Simulation and verification toolkit for a two dimensional shear-thinning
//! fluid driven by fractional Brownian motion with Hurst index H in (1/2, 1).
//!
//! The crate is organized in layers:
//!
//! * [`specfun`]: scalar special functions (gamma, zeta, Dirichlet beta,
//!   lattice sums) and the analytic mean-square bounds built from them.
//! * [`fbm`]: scalar fractional Brownian motion. Covariance, the square-root
//!   Volterra kernel and its calculus, exact and circulant samplers, Wiener
//!   integrals of deterministic integrands.
//! * [`noise`]: mode-indexed infinite dimensional noise. Spectral truncations,
//!   the four commutativity/regularity assumptions on the covariance and
//!   shape operators, stochastic convolution against the Stokes-type
//!   semigroup, and its exact mean square by quadrature.
//! * [`fluid`]: divergence-free stream-function spectral basis on the square,
//!   Sobolev norms, the deformation tensor, the shear-thinning stress, and
//!   dealiased pseudo-spectral evaluation of the advection and stress
//!   operators.
//! * [`solver`]: mild-solution machinery. Semigroup convolution maps, Picard
//!   iteration on contraction windows, an exponential Euler stepper, pullback
//!   solves, and the pathwise energy (Gronwall) audit.
//! * [`attractor`]: ergodic averages of the stationary convolution, the
//!   attractor existence condition, absorption radii and pullback attraction
//!   experiments.
//!
//! Everything is deterministic given a master seed: per-purpose, per-mode and
//! per-replica generators are derived by counter-based splitting in [`rng`],
//! so results do not depend on thread scheduling.

pub mod attractor;
pub mod error;
pub mod fbm;
pub mod fluid;
pub mod io;
pub mod noise;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod specfun;
pub mod stats;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
