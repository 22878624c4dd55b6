//! Gaussian radial basis function collocation for the fractional Poisson problem
//! (-Delta)^(alpha/2) u = f in a bounded domain with u = g outside it.
//!
//! Everything numerical is generic over [`scalar::Real`] (implemented for `f32` and `f64`);
//! the aliases below fix the scalar to `f64`.

pub mod analysis;
pub mod assembly;
pub mod boundary;
pub mod error;
pub mod frlap_kernel;
pub mod lattice;
pub mod oracle;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type FracOrder = frlap_kernel::FracOrder<f64>;
pub type GaussianRbf = frlap_kernel::GaussianRbf<f64>;
pub type Domain = lattice::Domain<f64>;
pub type PointSet = lattice::PointSet<f64>;
pub type LatticeGrid = lattice::LatticeGrid<f64>;
pub type DenseStiffness = assembly::DenseStiffness<f64>;
pub type ToeplitzStiffness = assembly::ToeplitzStiffness<f64>;
pub type StiffnessOperator = assembly::StiffnessOperator<f64>;
pub type SolveOptions = solver::SolveOptions<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type RbfSolution = solver::RbfSolution<f64>;
pub type BoundaryLayer = boundary::BoundaryLayer<f64>;
pub type AuxiliaryFit = boundary::AuxiliaryFit<f64>;
pub type CorrectionRule = boundary::CorrectionRule<f64>;
pub type ProblemSpec = problems::ProblemSpec<f64>;
pub type RunOptions = problems::RunOptions<f64>;
pub type ProblemRun = problems::ProblemRun<f64>;
pub type SaturationQuery = analysis::SaturationQuery<f64>;
pub type SymbolQuery = analysis::SymbolQuery<f64>;
