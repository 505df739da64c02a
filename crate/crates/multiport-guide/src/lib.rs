//! Doctest harness for the book under `book/`.
//!
//! mdbook renders the chapters; this crate includes the same markdown as
//! rustdoc so `cargo test -p multiport-guide --doc` compiles and runs every
//! code snippet in them. One module per chapter keeps test failures
//! attributable to the chapter they came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/feasibility.md")]
pub mod feasibility {}

#[doc = include_str!("../../../book/src/synthesis.md")]
pub mod synthesis {}

#[doc = include_str!("../../../book/src/multiphoton.md")]
pub mod multiphoton {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
