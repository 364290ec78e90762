//! The guide in `book/`, compiled so that every snippet in it runs as a
//! doc-test.

#[doc = include_str!("../../../book/src/game.md")]
pub mod game {}

#[doc = include_str!("../../../book/src/utilities.md")]
pub mod utilities {}

#[doc = include_str!("../../../book/src/best_response.md")]
pub mod best_response {}

#[doc = include_str!("../../../book/src/exact.md")]
pub mod exact {}

#[doc = include_str!("../../../book/src/disjoint.md")]
pub mod disjoint {}

#[doc = include_str!("../../../book/src/approximation.md")]
pub mod approximation {}

#[doc = include_str!("../../../book/src/heuristic.md")]
pub mod heuristic {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
