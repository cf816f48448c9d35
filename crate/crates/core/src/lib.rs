//! Synthesis and checking of uniform strategies.
//!
//! A uniformity property pairs a regular relation between finite plays,
//! given by a finite state transducer, with a formula of LTL extended by the
//! modality `[R]` ("in every related play"). Fully-uniform strategies are
//! synthesized by repeatedly building a knowledge arena, marking it with
//! fresh propositions for innermost `[R]` subformulas, and finally solving
//! an LTL game.

pub mod arena;
pub mod config;
pub mod encoders;
pub mod error;
pub mod formula;
pub mod ltlgame;
pub mod marker;
pub mod oracle;
pub mod powerset;
pub mod synthesizer;
pub mod transducer;

pub use arena::{Arena, ArenaBuilder, Player, Pos, Strategy};
pub use config::{Caps, Config};
pub use error::{Error, Result};
pub use formula::Formula;
pub use transducer::Transducer;
