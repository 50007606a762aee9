//! Spectral Galerkin simulation of two-dimensional electroconvection: an
//! incompressible Navier–Stokes velocity driven by the electric force
//! `−q∇Λ⁻¹q` of a charge density `q` that is transported by the flow and
//! dissipated by `Λ = (−Δ_D)^{1/2}`, the square root of the Dirichlet
//! Laplacian.
//!
//! The pipeline is
//!
//! 1. [`mesh`]: finite-difference grids on a rectangle or an annulus,
//! 2. [`eigensolver`]: lowest Dirichlet eigenpairs `(μ_j, φ_j)`,
//! 3. [`spectral_ops`]: `Λˢ`, the Poisson semigroup and the Riesz transform
//!    on the span of those eigenfunctions,
//! 4. [`stokes`]: the divergence-free eigenbasis `(λ_j, w_j)` and the
//!    advection operators,
//! 5. [`dynamics`]: time stepping of the coefficient system and diagnostics,
//! 6. [`cli_io`]: configuration and output files.
//!
//! ```
//! use electroconvection::eigensolver::lowest_eigenpairs;
//! use electroconvection::mesh::{assemble_laplacian, build_rectangle_mesh};
//!
//! let mesh = build_rectangle_mesh(16, 16, 1.0, 1.0)?;
//! let basis = lowest_eigenpairs(&assemble_laplacian(&mesh), 4)?;
//! let mu1 = basis.values()[0];
//! assert!((mu1 / (2.0 * std::f64::consts::PI.powi(2)) - 1.0).abs() < 0.01);
//! # Ok::<(), electroconvection::Error>(())
//! ```

pub mod cli_io;
pub mod dynamics;
pub mod eigensolver;
mod error;
pub mod measure;
pub mod mesh;
pub mod sparse;
pub mod spectral_ops;
pub mod stokes;
pub mod verify;

pub use error::{Error, Result};
