//! Entanglement entropy of a ground-state lattice scalar field.
//!
//! The crate is organised bottom-up:
//!
//! * [`gaussian`] turns a coupling matrix and a partition of oscillators into
//!   the entanglement entropy of the reduced Gaussian state.
//! * [`cubic`] discretizes the field on a cubic grid with Dirichlet walls and
//!   builds arbitrary voxel regions together with their staircase area.
//! * [`radial`] provides the partial-wave radial chains for a sphere in flat
//!   space and in the Einstein static universe, and sums the multipoles.
//! * [`analysis`] fits area laws and checks symmetry and cross-scheme
//!   consistency over sweeps.
//!
//! All lengths are in units of the lattice spacing `a = 1`.

pub mod analysis;
pub mod cubic;
mod error;
pub mod gaussian;
pub mod linalg;
pub mod radial;
pub mod zeta;

pub use error::{Error, Result};
pub use gaussian::{
    entanglement_entropy, entropy_from_spectrum, mode_entropy, mode_spectrum, omega_from_coupling,
    reduce, CouplingMatrix, EntropyResult, GroundState, ModeSpectrum, OmegaMatrix, PartitionMask,
    ReducedBlocks, Tolerances,
};
