//! A common-knowledge New Keynesian model with job insecurity.
//!
//! * [`params`]: structural parameters, defaults and validation
//! * [`coeffs`]: the closed-form reduced-form coefficients
//! * [`shocks`]: seeded innovations and AR(1) states
//! * [`sim`]: equilibrium paths, expectations, impulse responses
//! * [`statespace`]: transition matrix, spectrum and determinacy
//! * [`oracle`]: independent undetermined-coefficients solution and audits
//! * [`cli`]: the `nkji` command line
//!
//! ```
//! use nkji::{coeffs, params::StructuralParams, sim, shocks};
//!
//! let p = StructuralParams::defaults();
//! let rf = coeffs::compute_all(&p);
//! let path = shocks::draw(&p, 42, 200, None);
//! let eq = sim::simulate(&rf, &path, sim::BudgetMode::Independent)?;
//! assert_eq!(eq.horizon(), 200);
//! # Ok::<(), nkji::Error>(())
//! ```

pub mod basis;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod oracle;
pub mod params;
pub mod shocks;
pub mod sim;
pub mod statespace;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/reduced-form.md")]
    mod reduced_form {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/determinacy.md")]
    mod determinacy {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
