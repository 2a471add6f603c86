//! Invariant tori of quasi-periodically forced affine Anosov maps
//!
//! ```text
//! φ(ω, x) = (ω + α mod 1, A x + h(ω))   on T × T²
//! ```
//!
//! with `A ∈ GL(2, ℤ)` hyperbolic and `h: T → T²` continuous. Every invariant
//! torus has the same degree `m`, the least positive integer with
//! `m (I − A)⁻¹ deg h ∈ ℤ²`; the tori are the translates of one base torus by
//! the periodic points of `A`, so their count grows at rate `log |λ_u|`.
//!
//! Modules, bottom-up:
//!
//! * [`linalg`]: exact 2×2 integer/rational algebra, Smith form, eigensplitting.
//! * [`circle`]: force maps T → T², degrees, Fourier fitting.
//! * [`cocycle`]: the twisted cocycle equation via geometric series.
//! * [`torus`]: minimal degree and the base invariant torus.
//! * [`periodic`]: exact periodic-point enumeration and counts.
//! * [`catalog`]: torus catalog, conjugacy check, growth report, entropy.
//! * [`config`], [`commands`], [`output`]: configuration files, the
//!   `analyze`/`solve`/`enumerate`/`growth`/`verify` pipeline and CSV output.

pub mod catalog;
pub mod circle;
pub mod config;
pub mod cocycle;
pub mod commands;
pub mod error;
pub mod linalg;
pub mod output;
pub mod periodic;
pub mod torus;

pub use catalog::{
    conjugacy_check, enumerate_tori, estimate_entropy_separated, growth_rate_table, topological_entropy,
    GrowthReport, SolverSettings, System, TorusCatalog,
};
pub use commands::{cmd_analyze, cmd_enumerate, cmd_growth, cmd_solve, cmd_verify, RunReport, Session};
pub use config::{parse_config, SystemConfig};
pub use circle::{degree_from_samples, fit_modes, ForceMap, SampledMap, TorusPoint, TrigPoly, Waveform};
pub use cocycle::{solve_twisted_cocycle, truncation_length, CocycleSolution};
pub use error::{Error, Result};
pub use linalg::{classify_hyperbolic, eigen_split, mat_pow, rational_inverse, smith_normal_form, Hyperbolicity, IntMatrix2};
pub use periodic::{count_bounds, count_fixed, fixed_points, periodic_points_up_to, PeriodicPointSet, RationalPoint2};
pub use torus::{build_base_torus, invariance_residual, residual_profile, minimal_degree_m, solve_fourier_torus, torus_degree, TorusSolution};
