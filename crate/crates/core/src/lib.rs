//! Two-pulse propagation in three-level Λ media whose ground states carry
//! partial phase coherence.
//!
//! The crate provides
//!
//! * [`medium`]: medium preparation (the initial ground-state density matrix and
//!   the rotation that diagonalizes it), the Gaussian detuning quadrature and the
//!   derived propagation constants;
//! * [`analytic`]: closed-form matched-pulse and density-matrix solutions;
//! * [`dressed`]: bright/dark basis transformations and the two-level reduction;
//! * [`propagator`]: a Maxwell–Bloch marching solver in the retarded frame;
//! * [`diagnostics`]: pulse areas, area-theorem residuals, velocity and decay fits;
//! * [`pulse`]: input pulse synthesis.
//!
//! Internal units set `c = 1`. Time is measured in units of the inhomogeneous
//! lifetime `T2*` when `t2_star = 1`, and the propagation coordinate `Z = x/c`
//! carries units of time.

pub mod analytic;
pub mod diagnostics;
pub mod dressed;
pub mod error;
pub mod matrix;
pub mod medium;
pub mod propagator;
pub mod pulse;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
