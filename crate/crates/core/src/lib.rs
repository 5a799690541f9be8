//! Exact simulation and verification of ramp quantum secret sharing with
//! the highest coding rate, including advance sharing of shares before the
//! secret is known.
//!
//! * [`gf`]: arithmetic in `GF(p^m)`.
//! * [`poly`]: bounded-degree polynomials, evaluation, interpolation.
//! * [`qstate`]: sparse exact pure states, basis relabelings, partial traces.
//! * [`schemes`]: the Ogawa and ZM encoders, advance sharing,
//!   reconstruction.
//! * [`verify`]: access structure, equivalence, strong security, and
//!   maximality checks.

pub mod gf;
pub mod poly;
pub mod qstate;
pub mod schemes;
pub mod verify;
pub mod cli;
