//! Change-rule inference and distance-based API misuse detection.
//!
//! The pipeline: parse a Java-like source file into method bodies
//! ([`frontend`]), build an API usage graph per method ([`graph`]), diff the
//! misuse/fix graph pair into a change rule ([`rule`]), summarize graphs as
//! Exas feature vectors ([`exas`]), compare them with one of twelve distance
//! functions ([`distance`]), and flag usages whose distance profile matches
//! the misuse side of a rule ([`detector`]). The [`harness`] module mines
//! rules from version-controlled corpora and runs threshold grid searches and
//! cross-validated evaluations.

pub mod assignment;
pub mod detector;
pub mod distance;
pub mod exas;
pub mod frontend;
pub mod graph;
pub mod harness;
pub mod rule;
