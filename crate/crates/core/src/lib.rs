//! Linear finite elements for the Poisson equation on triangle and
//! tetrahedron meshes.
//!
//! The crate is organized bottom-up:
//!
//! * [`mesh`]: triangulations, boundary flags, generators and the text format
//! * [`sparse`]: triplet and CSC storage, MatrixMarket I/O
//! * [`quadrature`]: barycentric rules on simplices
//! * [`assembly`]: stiffness matrix by three interchangeable strategies
//! * [`system`]: load vector, boundary conditions, error norms
//! * [`solver`]: conjugate gradients and the full solve
//! * [`presets`], [`convergence`], [`benchmark`]: verification harnesses

pub mod assembly;
pub mod benchmark;
pub mod convergence;
pub mod dense;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod presets;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod system;

pub use assembly::{AssemblyStrategy, LocalStiffness};
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use mesh::{BoundaryFlag, FaceList, Mesh, Shape};
pub use presets::{BoundarySpec, Preset};
pub use quadrature::{QuadRule, RuleName};
pub use solver::{Method, Preconditioner, Solution, SolveOptions};
pub use sparse::{CscMatrix, Triplets};
pub use system::{BoundaryPartition, ErrorNorms, PoissonProblem};
