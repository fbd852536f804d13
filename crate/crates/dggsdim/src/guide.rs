//! The user guide, embedded so its examples compile and run as doctests.
//!
//! Each submodule carries one chapter of the `book/` sources. The chapters
//! render standalone with mdbook; including them here keeps every code
//! snippet honest, because `cargo test --doc` executes them against the
//! current API.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/grids.md")]
pub mod grids {}

#[doc = include_str!("../../../book/src/covering.md")]
pub mod covering {}

#[doc = include_str!("../../../book/src/scaling.md")]
pub mod scaling {}

#[doc = include_str!("../../../book/src/fractals.md")]
pub mod fractals {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
