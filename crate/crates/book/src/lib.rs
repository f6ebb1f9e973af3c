//! The guide under `book/`, compiled so that its snippets run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/bernstein.md")]
pub mod bernstein {}

#[doc = include_str!("../../../book/src/wphi.md")]
pub mod wphi {}

#[doc = include_str!("../../../book/src/mellin.md")]
pub mod mellin {}

#[doc = include_str!("../../../book/src/densities.md")]
pub mod densities {}

#[doc = include_str!("../../../book/src/monte_carlo.md")]
pub mod monte_carlo {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
