//! Phase-space (Weyl-Wigner-Moyal) numerics for pre- and post-selected
//! quantum states on a uniform one-dimensional grid.
//!
//! Every quantity that has two independent numerical realizations exposes
//! both, so that results can be cross-checked:
//!
//! * cross-Wigner transform by lag quadrature ([`transforms::cross_wigner`])
//!   and by Grossmann-Royer matrix elements ([`operators::cross_wigner_via_gr`]);
//! * cross-ambiguity function by direct quadrature and by the symplectic
//!   Fourier transform of the cross-Wigner transform;
//! * weak values by four routes ([`weak`]);
//! * operators from symbols by reflection and by displacement integrals.

pub mod checks;
pub mod error;
mod fft;
pub mod grid;
pub mod operators;
pub mod phase_space;
pub mod reconstruction;
pub mod states;
mod sum;
pub mod symbol;
pub mod symbolic;
pub mod transforms;
pub mod wavefunction;
pub mod weak;

pub use error::{Error, Result};
pub use grid::{make_grid, SpatialGrid};
pub use operators::LinearOperator;
pub use phase_space::{Kind, Lattice, PhaseSpaceFunction};
pub use states::{cat_state, coherent_state, hermite_state, plane_wave_windowed, StateSpec};
pub use symbol::PolynomialSymbol;
pub use symbolic::{mccoy_order, OrderedOperatorExpr};
pub use wavefunction::{fidelity, inner_product, MomentumWaveFunction, WaveFunction};
pub use weak::{WeakValueResult, WeakValueRoute};
