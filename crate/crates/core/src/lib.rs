//! Exact non-Archimedean expectations.
//!
//! * [`algebra`]: exact scalars (`Q`, `Q(√d)`) and ordered exponent groups.
//! * [`hahn`]: finitely supported Hahn series with lexicographic order.
//! * [`gambles`]: finite state spaces, gambles and dominance relations.
//! * [`lp`]: exact simplex with Farkas infeasibility certificates.
//! * [`coherence`]: coherence of comparative judgment systems.
//! * [`extension`]: admissible prices for a new gamble.
//! * [`representation`]: lexicographic (series-valued) expectations.
//! * [`document`]: JSON system documents used by the command line tool.
//! * [`cli`]: the `lexpect` command line front end.

#![allow(clippy::result_large_err)]

pub mod algebra;
pub mod cli;
pub mod coherence;
pub mod document;
pub mod extension;
pub mod gambles;
pub mod hahn;
pub mod lp;
pub mod representation;
