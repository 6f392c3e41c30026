//! Ordinal Turing machines, hereditarily finite set codes and reductions
//! between choice principles on finite instances.

pub mod asm;
pub mod cli;
pub mod instances;
pub mod oracle;
pub mod ordinal;
pub mod pairing;
pub mod problems;
pub mod programs;
pub mod reductions;
pub mod set;
pub mod setcode;
pub mod vm;

pub use ordinal::Ordinal;
pub use set::SetValue;
pub use setcode::Code;
