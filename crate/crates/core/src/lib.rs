//! First-order logic over finite structures and finite boolean products.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod axioms;
pub mod corpus;
pub mod fv;
pub mod pairs;
pub mod product;
pub mod sexpr;
pub mod semantics;
pub mod syntax;
pub mod vnr;
