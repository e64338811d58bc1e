//! Dimensions of neurovarieties of polynomial neural networks with power
//! activation, computed exactly over prime fields.
//!
//! A network with widths `(d0, ..., dL)` and activation `z -> z^r` computes
//! `dL` homogeneous polynomials of degree `r^(L-1)` in `d0` variables. The
//! closure of the set of all such outputs is the neurovariety; the
//! architecture is *filling* when it is the whole space of polynomial tuples.
//!
//! The crate provides
//!
//! * exact arithmetic in [`algebra`]: `F_p`, dual numbers, dense homogeneous
//!   polynomials;
//! * the parameter map and width-only dimension counts in [`pnn`];
//! * Jacobian ranks over `F_p` in [`rank`], which certify filling;
//! * recursive upper bounds in [`bounds`], which certify non-filling;
//! * the antichain frontier search for minimal filling architectures in
//!   [`search`];
//! * end-to-end certificates and table reproductions in [`certify`].
//!
//! ```
//! use neurovariety::pnn::Architecture;
//! use neurovariety::rank::{generic_rank, RankConfig};
//!
//! let arch = Architecture::parse("2-4-5-4", 2)?;
//! let est = generic_rank(&arch, &RankConfig::default())?;
//! assert_eq!(est.rank_lower, 20);
//! assert!(est.certified_filling);
//! # Ok::<(), neurovariety::Error>(())
//! ```

pub mod algebra;
pub mod bounds;
pub mod certify;
pub mod error;
pub mod pnn;
pub mod rank;
pub mod rng;
pub mod search;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/rank.md")]
    mod rank {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
