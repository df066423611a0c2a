//! Lateral-leg-spring locomotion with hybrid curve-tracking control.
//!
//! A planar runner bounces between alternating right and left stances on a
//! linear leg spring. Between stances a discrete controller steers the
//! chord of the next stance so that the distance to a boundary curve
//! converges to a set point; a separate channel regulates body posture with
//! a minimum-effort torque.
//!
//! * [`geometry`]: boundary curves and the closest-point frame.
//! * [`tracking`]: the distance recursion and steering law.
//! * [`stance`]: stance mechanics, quadratures and the ODE oracle.
//! * [`leg_solver`]: leg plans at constant chord, cones, approximation method.
//! * [`body`]: posture targets and optimal torque.
//! * [`harness`]: the hybrid loop, metrics and sweeps.
//! * [`config`], [`output`], [`validate`]: scenario files, result files, oracle suites.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod config;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod leg_solver;
pub mod output;
pub mod quadrature;
pub mod stance;
pub mod tracking;
pub mod validate;

pub use error::{Error, Result};
