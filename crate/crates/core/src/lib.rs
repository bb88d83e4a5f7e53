//! Relativistic wave-function laboratory: boosts, free scalar wave packets,
//! the Lorentz action on wave functions, Born-rule reduction, decay and
//! singlet-correlation thought experiments.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod epr;
pub mod lorentz_action;
pub mod reduction;
pub mod scenarios;
pub mod seeding;
pub mod spacetime;
pub mod twoparticle;
pub mod verify;
pub mod wavepacket;
