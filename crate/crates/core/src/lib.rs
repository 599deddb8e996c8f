//! Conditional preparation of nonclassical light from coherent-state
//! superpositions, beam splitters and homodyne detection.
//!
//! The crate is organized bottom-up:
//!
//! * [`state`]: truncated Fock vectors, quadrature wavefunctions, misfit.
//! * [`css`]: coherent-state superpositions with exact Gram algebra, and
//!   two-mode superpositions behind a splitter.
//! * [`targets`]: the target states (amplitude squeezed, binomial,
//!   squeezed number, squeezed vacuum, ad hoc superpositions).
//! * [`scheme`]: conditional outputs of the two setups.
//! * [`metrics`]: window probabilities and average misfit.
//! * [`optimizer`]: seeded genetic search over setup parameters.
//! * [`oracle`]: brute-force two-mode Fock simulation used for validation.
//! * [`tables`]: published parameter sets.
//! * [`cli`]: run configurations, reports and the command-line front end.
//!
//! ```
//! use css_engineering::scheme::{output_state, SchemeKind, SchemeParams};
//! use css_engineering::targets::TargetSpec;
//!
//! let p = SchemeParams::s1(SchemeKind::S1Line, 245.5, 6.307175e-3, [-1.96796, -0.255, -1.945]);
//! let target: TargetSpec = "AS(1,2,1)".parse().unwrap();
//! let eps = output_state(&p)
//!     .unwrap()
//!     .misfit_against(&target.build(64).unwrap())
//!     .unwrap();
//! assert!(eps < 1e-3);
//! ```

pub mod cli;
pub mod css;
pub mod error;
pub mod metrics;
pub mod optimizer;
pub mod oracle;
pub mod quadrature;
pub mod scheme;
pub mod state;
pub mod tables;
pub mod targets;

pub use css::{CoherentSuperposition, Port, TwoModeCss};
pub use error::{Error, Result};
pub use scheme::{SchemeKind, SchemeParams};
pub use state::{Amplitude, FockVector};
pub use targets::TargetSpec;
