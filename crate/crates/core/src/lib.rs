#![no_std]

extern crate alloc;

pub mod cp;
pub mod encode;
pub mod fstrips;
pub mod instances;
pub mod reach;
pub mod search;
pub mod validate;
pub mod pddl;
