//! Reference implementations used only by tests. Each one recomputes a
//! library result by the most direct method available, without sharing code
//! with the implementation it checks.
#![allow(dead_code)]

pub mod gradcheck;
pub mod isomorphism;
pub mod mwcg;
pub mod persistence;
pub mod random;
pub mod validity;
