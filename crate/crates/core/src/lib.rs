//! Numerical laboratory for planar affine convex geometry.
//!
//! Bodies are origin-symmetric and strictly convex, represented by support
//! functions sampled on a uniform angular grid:
//!
//! - [`spectral`]: angular grids, Fourier differentiation and interpolation
//! - [`body`], [`generators`], [`linear`]: the geometry kernel
//! - [`functionals`]: affine support, `Ω_p`, isoperimetric ratio and deficit
//! - [`ellipse`]: John/Löwner fits and SL(2) normalization
//! - [`flow`]: affine normal flow in support form, with monotonicity and comparison checks
//! - [`stability`]: constants and the full stability pipeline

pub mod body;
pub mod ellipse;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod generators;
pub mod linear;
pub mod spectral;
pub mod stability;

pub use body::{ConvexBody, SupportFunction};
pub use ellipse::Ellipse;
pub use error::{Error, Result};
pub use linear::LinearMap2;
pub use spectral::AngularGrid;
