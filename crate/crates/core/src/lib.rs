//! Maker-Breaker games and the reduction from Generalized Geography.

mod text;

pub mod error;
pub mod gadgets;
pub mod geography;
pub mod hypergraph;
pub mod mbh;
pub mod reduction;
pub mod solver;
pub mod strategy;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/maker-breaker.md")]
    mod maker_breaker {}
    #[doc = include_str!("../../../book/src/geography.md")]
    mod geography {}
    #[doc = include_str!("../../../book/src/gadgets.md")]
    mod gadgets {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/strategy.md")]
    mod strategy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
