//! Generalized weak Galerkin discretization of the clamped biharmonic problem
//! on triangular and quadrilateral meshes.

pub mod assembly;
pub mod errnorms;
pub mod error;
pub mod experiments;
pub mod linsolve;
pub mod mesh;
pub mod polybasis;
pub mod projection;
pub mod weak_hessian;

pub use assembly::{Discretization, GwgConfig, SolverKind, WeakFunction};
pub use errnorms::ErrorReport;
pub use error::{Error, Result};
pub use mesh::{Domain, Mesh, MeshKind};
pub use weak_hessian::Degrees;
