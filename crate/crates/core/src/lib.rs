#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod amplitudes;
pub mod chain;
pub mod error;
pub mod grid;
pub mod krawtchouk;
pub mod linalg;
pub mod open;
pub mod oracle;

pub use amplitudes::{compare, AmplitudeTrajectory, Amplitudes, Basis};
pub use chain::{sin_law, ClosedChain, FidelitySeries, SiteState};
pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use krawtchouk::{
    hamiltonian, krawtchouk_poly, norm_d, orthonormal_basis, weight, ChainSpec, SpectralBasis,
};
pub use linalg::RealMatrix;
pub use open::{
    state_fidelity, BrightDecay, EnsembleConfig, OpenEnsemble, QubitDensityMatrix, QubitState,
    ReservoirSpec,
};
pub use oracle::{
    integrate_exponential_kernel, integrate_memory_kernel, integrate_mode_discretized, kernel,
    DiscretizedReservoir, ExponentialKernel, IntegratorSettings, KernelVariant,
};
