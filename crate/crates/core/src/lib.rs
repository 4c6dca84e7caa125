//! Primitive completely normal elements of finite fields: exact arithmetic,
//! counting, certified sufficient conditions and self-verifying witnesses.

pub mod arith;

pub mod bounds;
pub mod chars;
pub mod classify;
pub mod ffield;
pub mod fqxpoly;
pub mod search;
pub(crate) mod serde_dec;
