//! Model-manifold geometry: warping profiles, radial grids, the volume
//! integral H, the radial Laplacian in pointwise and flux form, and the
//! stochastic-completeness classifier.

pub mod completeness;
pub mod grid;
pub mod h_integral;
pub mod laplacian;
pub mod operator;
pub mod profile;

pub use completeness::{classify_completeness, CompletenessReport, HSample, Verdict};
pub use grid::{RadialField, RadialGrid};
pub use h_integral::{eval_h, eval_h_many, h_prime};
pub use laplacian::{radial_laplacian, LaplacianField, StencilKind};
pub use operator::FluxOperator;
pub use profile::{unit_sphere_area, Profile, ProfileSpec, TableSample};
