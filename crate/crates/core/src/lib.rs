pub mod commutator;
pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod harmonic;
pub mod io;
pub mod spectral;

pub use error::{Error, Result};

/// The guide's snippets run as doc-tests so that they stay in sync with the API.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/spectral.md")]
    struct Spectral;
    #[doc = include_str!("../../../book/src/operators.md")]
    struct Operators;
    #[doc = include_str!("../../../book/src/elliptic.md")]
    struct Elliptic;
    #[doc = include_str!("../../../book/src/commutator.md")]
    struct Commutator;
    #[doc = include_str!("../../../book/src/dynamics.md")]
    struct Dynamics;
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    struct Diagnostics;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
}
