//! Brute-force oracles and acceptance checks for `raagtk-core`.

pub mod criteria;
pub mod oracle;
