//! The guide under `book/` pulled in as rustdoc so `cargo test --doc` runs
//! every listing. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/maps.md")]
pub mod maps {}
#[doc = include_str!("../../../book/src/flows.md")]
pub mod flows {}
#[doc = include_str!("../../../book/src/limit.md")]
pub mod limit {}
#[doc = include_str!("../../../book/src/variations.md")]
pub mod variations {}
#[doc = include_str!("../../../book/src/control.md")]
pub mod control {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
