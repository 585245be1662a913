//! Connected components of triples of transverse partial flags in `SO₀(p,q)`.
//!
//! The crate works in exact rational arithmetic throughout, except for the
//! floating-point connectivity oracle. The main entry points are
//! [`components::count_components`], [`components::classify_point`],
//! [`involution::component_involution`] and [`oracle::estimate_components`].

pub mod cli;
pub mod components;
pub mod error;
pub mod flag;
pub mod involution;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod quadratic;
pub mod sign_matrix;
pub mod transversality;
pub mod unipotent;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/charts.md")]
    mod charts {}
    #[doc = include_str!("../../../book/src/minors.md")]
    mod minors {}
    #[doc = include_str!("../../../book/src/sign_matrices.md")]
    mod sign_matrices {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/involution.md")]
    mod involution {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
}
