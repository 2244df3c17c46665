//! Parametrized games and efficient probabilistic higher-order computation.
//!
//! The crate models interactive computation as strategies on games whose
//! legal plays are indexed by a security parameter `n`, and uses that model
//! for two experiments on second-order functions
//! `F: ({0,1}^r(n) -> B) -> {0,1}^p(n)`:
//!
//! * [`attacks`]: when the argument function has a linear-size domain, a
//!   randomized adversary finds far-apart argument functions with equal
//!   tags (a collision, hence a forgery) by fixing the few influential
//!   coordinates of the functional ([`influence`]).
//! * [`prf`]: when the domain is logarithmic, a first-order PRF is lifted
//!   to a second-order functional that queries its argument bit by bit.
//!
//! Everything here is `no_std` + `alloc`. File formats, parallel trial
//! runners and the command line live in the `pargames` crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod attacks;
pub mod bits;
pub mod games;
pub mod influence;
pub mod mix;
pub mod poly;
pub mod prf;
pub mod strategies;

pub use bits::Bits;
pub use games::{Game, Letter, Move, Play, Side, Step, Word};
pub use poly::Poly;
pub use strategies::{
    Prob, ProbStrategy, RandomSource, Randomized, Session, StepMeter, Strategy, StrategyError,
    StrategyRef,
};
