//! Symbolic safety-game solving and controller synthesis for AIGER specifications.

pub mod absref;
pub mod arena;
pub mod aiger;
pub mod bdd;
pub mod benchgen;
pub mod clock;
pub mod compositional;
pub mod game;
pub mod synthesis;
pub mod verifier;
