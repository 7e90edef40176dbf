//! Atiyah's configuration determinant for points in Euclidean 3-space.
//!
//! Every ordered pair of distinct points contributes a spinor lift of the
//! direction between them (the earlier point sees the later one through
//! [`geometry::lift`], the later point sees the earlier one through the
//! antipode of that spinor). The column belonging to a point is the
//! symmetric product of its `n - 1` spinors, and the determinant of the
//! resulting `n x n` complex matrix is invariant under rigid motions and
//! relabelling of the points.
//!
//! The crate is organised as:
//!
//! * [`geometry`]: points, the Hopf map, the antipode and spinor lifts.
//! * [`determinant`]: the matrix, its determinant and the scale-free `D`.
//! * [`closed_forms`]: scalar identities for three and four points.
//! * [`sympoly`]: exact polynomials in the six edge lengths of a tetrahedron.
//! * [`precise`]: fixed-point big-number evaluation used for interpolation.
//! * [`verify`]: seeded generators and identity, invariance and scan suites.
//! * [`search`]: Nelder-Mead search for extremal configurations.
//! * [`cli`]: the `atiyah` command-line front end.
//!
//! ```
//! use atiyah::geometry::{Configuration, Point3};
//! use atiyah::determinant::atiyah_det;
//!
//! let h = 3f64.sqrt() / 2.0;
//! let cfg = Configuration::new(vec![
//!     Point3::new(0.0, 0.0, 0.0),
//!     Point3::new(0.0, 1.0, 0.0),
//!     Point3::new(0.0, 0.5, h),
//! ])
//! .unwrap();
//! let det = atiyah_det(&cfg).unwrap();
//! assert!((det.det_m.re - 9.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod closed_forms;
pub mod determinant;
pub mod error;
pub mod geometry;
pub mod precise;
pub mod search;
pub mod symmetry;
pub mod sympoly;
pub mod verify;

pub use error::{Error, Result};
