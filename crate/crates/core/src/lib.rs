//! Adiabatic geometric phases of non-Hermitian matrix Hamiltonians.
//!
//! A [`MatrixFamily`] maps real parameters to an `N×N` complex matrix. A closed
//! [`CurveSpec`] in parameter space is sampled, the spectrum is [`track`]ed by
//! continuity, and [`geometric_phase`] turns the biorthogonal frames into a
//! holonomy. Loops that encircle an exceptional point permute eigenvalues; use
//! [`tracking::lift_closed`] to traverse them until the label returns.
//!
//! ```
//! use holonomy::{example_family, geometric_phase, track, CurveSpec, Example, C64};
//! use holonomy::tracking::{lift_closed, monodromy_of};
//!
//! let h1 = example_family(Example::SquareRoot)?;
//! let unit = CurveSpec::complex_circle((0.0, 0.0), 1.0)?;
//! let m = monodromy_of(&track(&h1, &unit, 256)?)?;
//! assert_eq!(m.periods, vec![2, 2]);
//!
//! let lifted = lift_closed(&unit, 0, &m)?;
//! let phase = geometric_phase(&track(&h1, &lifted, 512)?, 0)?;
//! assert_eq!(phase.traversals, 2);
//!
//! let b = example_family(Example::NonSymB { alpha: C64::new(1.0, 0.0), beta: C64::new(2.0, 0.0) })?;
//! let g = geometric_phase(&track(&b, &unit, 1024)?, 0)?;
//! assert!((g.wrapped() + std::f64::consts::FRAC_PI_2).abs() < 1e-6);
//! # Ok::<(), holonomy::Error>(())
//! ```

pub mod analytic2x2;
pub mod curve;
pub mod evolve;
pub mod error;
pub mod family;
pub mod linalg;
pub mod perm;
pub mod phase;
pub mod tracking;

pub use curve::{discretize, CurveSpec, Orientation};
pub use error::{Error, Result};
pub use family::{example_family, EpLocus, Example, ExampleFamily, FnFamily, MatrixFamily};
pub use linalg::{C64, CVector, ComplexMatrix, Eigenframe};
pub use perm::Permutation;
pub use phase::{geometric_phase, HolonomyScheme, PhaseResult};
pub use tracking::{track, Monodromy, SpectralPath};
