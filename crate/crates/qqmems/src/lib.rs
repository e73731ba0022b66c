//! Entanglement negativity of qubit-qutrit (2x3) states.
//!
//! * [`hermitian_core`]: Jacobi eigensolver, partial transpose, trace norm,
//!   random states.
//! * [`xstate`]: X-state parametrization with closed-form spectra and negativity.
//! * [`spectrum_mems`]: maximal X-state negativity for a given spectrum.
//! * [`purity_mems`]: maximal X-state negativity at given purity, plus dual
//!   certificate checks.
//! * [`tgx`]: TGX candidate families and their multistart maximization.
//! * [`acs`]: alternate convex search over all states of bounded purity.
//!
//! The `parallel` feature (on by default) runs independent work items such as
//! restarts and sweep runs on rayon; see [`par`].

pub mod acs;
pub mod error;
pub mod hermitian_core;
pub mod nelder_mead;
pub mod par;
pub mod purity_mems;
pub mod spectrum_mems;
pub mod tgx;
pub mod xstate;

pub use error::{Error, Result};
