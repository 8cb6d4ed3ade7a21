//! Exact-arithmetic toolkit for Bogomolov-Gieseker type inequalities on
//! surfaces in positive characteristic, tilt stability central charges and
//! their support property.
//!
//! Every quantity is an exact rational. The modules follow the data flow:
//! [`exactform`] provides linear algebra, [`nsgeom`] surface models and
//! their constants, [`chern`] characters and discriminants, [`bgengine`]
//! inequality checkers, [`hyperquad`] hypersurface blow-up forms,
//! [`stabkit`] central charges and support certificates, and [`cli`] the
//! command-line surface.

#![allow(clippy::needless_range_loop)]

pub mod bgengine;
pub mod chern;
pub mod cli;
pub mod error;
pub mod exactform;
pub mod hyperquad;
pub mod nsgeom;
pub mod rational;
pub mod stabkit;

pub use error::{Error, Result};
pub use rational::Rational;
