//! Brute-force reference models. Nothing here calls into the symbolic
//! engine: circuits are evaluated gate by gate, games are solved over
//! enumerated states, and expressions are matched by derivatives.

pub mod bddcheck;
pub mod explicit;
pub mod random;
pub mod regex;
pub mod truth;
pub mod washing;
