//! Spanning factorizations of regular digraphs and conflict-free
//! universal-exchange schedules.
//!
//! The crate builds cycle-prefix digraphs, the diameter-2 graphs `H_q` over
//! finite fields, and Cayley and Cayley coset graphs; splits regular digraphs
//! into 1-factors; checks that word lists span; schedules the resulting
//! all-to-all exchange; and replays the exchange packet by packet to confirm
//! that no link is used twice in one time step.

pub mod cayley;
pub mod cpcount;
pub mod cpgraph;
pub mod digraph;
pub mod error;
pub mod factorization;
mod matching;
pub mod mms;
pub mod schedule;

pub use digraph::{Digraph, DistanceProfile};
pub use error::{Error, Result};
pub use factorization::{Factorization, Word, WordList};
pub use schedule::{ExchangeReport, Schedule};
