//! Elementary-operator calculus on finite-dimensional complex matrices.
//!
//! The two transforms at the centre of the crate are
//!
//! * `Δ^m_{B,A}(X) = (L_B R_A − I)^m (X) = Σ_j (−1)^j C(m,j) B^{m−j} X A^{m−j}`
//! * `δ^m_{B,A}(X) = (L_B − R_A)^m (X)     = Σ_j (−1)^j C(m,j) B^{m−j} X A^j`
//!
//! `A` is *left (X,m)-invertible by B* when `Δ^m_{B,A}(X) = 0`, and `B` is an
//! *(X,m)-adjoint of A* when `δ^m_{B,A}(X) = 0`. With `B = A*` these become
//! weighted m-isometries and weighted m-selfadjoint operators.
//!
//! Modules:
//!
//! * [`matcore`] dense complex matrices and tolerance policy
//! * [`elemops`] the two transforms, by binomial sum and by iteration
//! * [`drazin`] Drazin index, core-nilpotent decomposition, block views
//! * [`classify`] class membership, minimal orders, weight kernels
//! * [`genx`] seeded generators for structured instance families
//! * [`harness`] property suites, one per structural result
//! * [`cli`] the `opcheck` command-line front end

pub mod classify;
pub mod cli;
pub mod drazin;
pub mod elemops;
pub mod error;
pub mod genx;
pub mod harness;
pub mod matcore;

pub use error::{Error, Result};
pub use matcore::{c64, CMatrix, NumericPolicy, C64};
