//! Discrete-harmonic (Tutte-style) embeddings of disk triangulations into
//! convex and non-convex polygons, with exact injectivity certificates.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: combinatorial triangulations, drawings, target polygons.
//! * [`harmonic`]: the weighted discrete Laplacian and the Dirichlet solve.
//! * [`cone`]: boundary cones, the cone-condition report and the strictly
//!   positive combination solver (with Farkas certificates).
//! * [`certify`]: exact intersection-freeness/homeomorphism certificates
//!   and positive-weight recovery from a given homeomorphic drawing.
//! * [`extension`]: convex hull completion of a non-convex target:
//!   pockets, ear clipping and extended weights.
//! * [`disk`]: the continuous counterpart on the unit disk (Poisson
//!   extension, boundary derivatives, cone scan, Choquet-type maps).
//! * [`io`]: JSON/OFF/CSV/SVG formats.
//!
//! Exact predicates live in [`exact`]; every verdict about open cones,
//! orientations and segment intersections is decided there, never by a
//! floating-point threshold.
//!
//! With the default `parallel` feature, data-parallel loops (pairwise
//! segment oracle, disk sampling) run on rayon; see [`Exec`].

// `!(x <= bound)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cone;
pub mod disk;
pub mod exact;
mod exec;
pub mod extension;
pub mod geom;
pub mod harmonic;
pub mod instances;
pub mod io;
pub mod mesh;

pub use exec::Exec;
pub use geom::{Point, Vec2};
