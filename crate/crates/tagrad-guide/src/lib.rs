//! Doctest shim for the mdbook guide in `book/`.
//!
//! Each chapter is attached verbatim as module documentation, so every
//! fenced Rust block in the book compiles and runs under
//! `cargo test -p tagrad-guide --doc`. Editing a chapter cannot silently
//! break its samples, and the rendered API docs double as a copy of the
//! guide.

#[doc = include_str!("../../../README.md")]
pub mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/rate-rules.md")]
pub mod rate_rules {}

#[doc = include_str!("../../../book/src/finite-time.md")]
pub mod finite_time {}

#[doc = include_str!("../../../book/src/escape.md")]
pub mod escape {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
