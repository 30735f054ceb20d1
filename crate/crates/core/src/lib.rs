//! Convex polyhedral embeddings of Euclidean cone surfaces into radiant flat
//! spacetimes with prescribed masses.
//!
//! Given a closed surface with marked cone points (a [`ConeSurface`]) and a
//! target mass for each point, [`solve`] finds the unique weights `τ` whose
//! suspension — the spacetime obtained by coning each weighted triangle over
//! the origin of Minkowski space — has those masses. The pipeline is:
//!
//! - [`hinge`] / [`delaunay`]: the affine legality form of each edge and the
//!   flipping algorithm producing the τ-Delaunay triangulation, which decides
//!   admissibility of `τ`;
//! - [`suspension`]: Minkowski embeddings of the weighted triangles, radial
//!   angles, face dihedrals and vertex masses;
//! - [`functional`]: the Einstein–Hilbert functional in heights `h = √τ`, its
//!   gradient `κ − κ̄` and Jacobian;
//! - [`solver`]: damped Newton iteration on the functional.
//!
//! [`stalk`] checks the Lorentzian Volkov bounds on single cones and is not
//! used by the solver.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod delaunay;
pub mod error;
pub mod functional;
pub mod hinge;
pub mod json;
pub mod minkowski;
pub mod solver;
pub mod stalk;
pub mod surface;
pub mod suspension;

pub use delaunay::{is_admissible, Admissibility, FlipOptions, FlipTrace};
pub use error::{Error, Result};
pub use functional::{Diagnostics, FunctionalEval};
pub use hinge::{Hinge, HingeForm, Legality};
pub use minkowski::{KiteSolution, MinkVector};
pub use solver::{solve, HessianMode, SolveOptions, SolveReport};
pub use stalk::Stalk;
pub use surface::{ConeSurface, EulerData, Side, SurfaceDoc};
pub use suspension::SuspensionData;
