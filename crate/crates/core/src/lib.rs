//! Cut tail times of stable linear systems and dwell-time bounds for linear
//! switching systems.
//!
//! For a Hurwitz matrix `A` and a generic initial state, the trajectory
//! `x(t) = e^{tA} x0` eventually enters the interior of the symmetrized
//! convex hull of its own path and stays there. The first such time is the
//! cut tail time `T_cut(A)`. It does not depend on `x0`, and `T > T_cut` holds
//! exactly when every quasipolynomial `p` of the trajectory space with
//! `p(T) = 1` has uniform norm above one on `[0, T]`.
//!
//! The crate provides:
//!
//! * [`spectral`]: eigenstructure of `A` and the quasipolynomial basis it spans;
//! * [`quasipoly`]: evaluation and uniform norms of quasipolynomials;
//! * [`remez`]: the least-deviation problem solved by an exchange algorithm
//!   with two-sided bounds and an alternance certificate;
//! * [`cuttail`]: the cut tail decision, `T_cut` by bisection, planar closed
//!   forms and a convex-hull membership check;
//! * [`switching`]: dwell-time systems, their critical upper bounds, and
//!   trajectory simulation.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar type.

pub mod cuttail;
pub mod error;
pub mod linalg;
pub mod quasipoly;
pub mod remez;
mod roots;
pub mod scalar;
pub mod simplex;
pub mod spectral;
pub mod switching;

pub use cuttail::{
    compute_tcut, compute_tcut_with_spectrum, hull_membership_oracle, is_cut_tail,
    is_cut_tail_with_spectrum, tcut_planar_complex, tcut_planar_real, CutTailConfig,
    CutTailDecision, CutTailResult, HullConfig, Method, Verdict,
};
pub use error::{Error, Result};
pub use linalg::{expm, Matrix};
pub use quasipoly::{eval, eval_derivative, moment_vector, sup_norm, Quasipolynomial, SearchConfig, SupNormResult};
pub use remez::{
    lp_grid_oracle, solve_least_deviation, verify_certificate, AlternanceState, Functional,
    IterationRecord, LeastDeviationResult, RemezConfig, SolveStatus,
};
pub use roots::bracketed_root;
pub use scalar::Real;
pub use spectral::{
    build_basis, compute_spectrum, eigenvalues, is_hurwitz, Basis, BasisFunction, SpectralConfig,
    SpectralItem, Spectrum, SystemMatrix, TrigKind,
};
pub use switching::{
    critical_bounds, random_switching_search, simulate, DwellReport, Regime, SearchOutcome,
    SwitchedSystem, SwitchingLaw, Trajectory,
};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type SystemMatrix64 = SystemMatrix<f64>;
pub type SystemMatrix32 = SystemMatrix<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type Basis64 = Basis<f64>;
pub type Basis32 = Basis<f32>;
pub type Quasipolynomial64 = Quasipolynomial<f64>;
pub type Quasipolynomial32 = Quasipolynomial<f32>;
pub type Functional64 = Functional<f64>;
pub type Functional32 = Functional<f32>;
pub type LeastDeviationResult64 = LeastDeviationResult<f64>;
pub type LeastDeviationResult32 = LeastDeviationResult<f32>;
pub type CutTailResult64 = CutTailResult<f64>;
pub type CutTailResult32 = CutTailResult<f32>;
pub type SwitchedSystem64 = SwitchedSystem<f64>;
pub type SwitchedSystem32 = SwitchedSystem<f32>;
