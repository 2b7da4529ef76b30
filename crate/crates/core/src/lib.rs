//! Swing-equation dynamics of single and interconnected micro-grids.
//!
//! The library models each micro-grid as a second-order system coupling its
//! frequency deviation to the power flowing in over the lines, and a network
//! of them through the graph Laplacian of the interconnection topology. On
//! top of that model it provides:
//!
//! - [`graph`]: topologies, unweighted and inertia-weighted Laplacians, and
//!   their spectra (cyclic Jacobi eigensolver).
//! - [`classify`]: closed-form transient classification: single-grid
//!   node/spiral thresholds, trace-determinant placement, per-mode spectral
//!   factorization of the network dynamics, degree-dependent damping bounds,
//!   and the consensus value the network converges to.
//! - [`sim`]: state-space assembly, fixed-step Euler/RK4 integration,
//!   periodic state reinitialization, sector measurement disturbances, and
//!   rescaling to physical units around 50 Hz / 30 MWh.
//! - [`spr`]: the loop transfer function of the disturbed single grid and a
//!   numerical strict-positive-realness check certifying absolute stability.
//! - [`scenario`]: TOML scenario ingestion, with the Nigerian 11-node case
//!   study bundled.

pub mod classify;
mod eigen;
pub mod error;
pub mod graph;
pub mod scenario;
pub mod sim;
pub mod spr;

pub use classify::{
    classify_planar, classify_single, damping_bounds, network_modes, predict_consensus, GridParams,
    NetworkClass, NetworkMode, NetworkVerdict, PlanarClass, TransientClass, TransientKind,
};
pub use error::{Error, Result};
pub use graph::{
    degree_bounds, spectrum, weighted_laplacian, LaplacianMatrix, LaplacianWeights, Spectrum,
    SpectrumSource, Topology,
};
pub use scenario::{load_scenario, nigeria_topology, Scenario};
pub use sim::{
    energy_diagnostics, random_initial_state, simulate, simulate_driven, DisturbanceShape, Method,
    NetworkSystem, RescaleSpec, SectorDisturbance, SimConfig, SimResult, Units,
};
pub use spr::{
    check_spr, default_omega_grid, hermitian_eigenvalues, hermitian_part, log_omega_grid,
    scaled_hermitian_diagonal, transfer_g, transfer_z, LureSystem, SprReport, SprVerdict,
};
