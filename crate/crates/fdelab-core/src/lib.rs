//! Numerical laboratory for fast diffusion on rotationally symmetric
//! manifolds.
//!
//! Everything here is radial: a model manifold is a warping profile psi and
//! a dimension n, fields live on grids over [0, R], and the Laplacian is
//! f'' + (n-1)(psi'/psi) f'. On top of that the crate builds
//!
//! * [`geometry`] — profiles, the volume integral H and its identities,
//!   finite-difference and flux-form Laplacians, and a classifier that
//!   decides stochastic completeness from the tail of H';
//! * [`elliptic`] — explicit blow-up barriers for Delta W = alpha W^p,
//!   discrete supersolution verification, a damped-Newton Dirichlet solver,
//!   and the nonexistence decay experiment;
//! * [`parabolic`] — an implicit (backward Euler) solver for
//!   u_t = Delta u^m with 0 < m < 1, lifted Dirichlet approximations, and
//!   the monotone triple-limit ladder toward the minimal solution;
//! * [`estimates`] — local L^1 smoothing estimates with explicit geometric
//!   constants, and the time-weighted contraction functional behind the
//!   uniqueness probes;
//! * [`io`] — deterministic CSV and binary serialization with exact f64
//!   round-trips.

pub mod error;
pub mod quad;

pub mod geometry;

pub mod elliptic;
pub mod estimates;
pub mod parabolic;

pub mod io;
pub mod newton;
pub mod tridiag;

pub use error::{Error, Result};
pub use geometry::{Profile, ProfileSpec, RadialField, RadialGrid};
pub use parabolic::SpaceTimeField;
pub use quad::QuadCtl;
