//! The bundled machine programs.

use crate::asm::parse_program;
use crate::vm::Program;

pub const COPY: &str = include_str!("../programs/copy.otm");
pub const FLIPFLOP: &str = include_str!("../programs/flipflop.otm");
pub const RIGHTMARCH: &str = include_str!("../programs/rightmarch.otm");
pub const MIRACLE: &str = include_str!("../programs/miracle.otm");
pub const ORACLE_ROUNDTRIP: &str = include_str!("../programs/oracle_roundtrip.otm");

/// Name and source of every bundled program.
pub const CORPUS: [(&str, &str); 5] = [
    ("copy", COPY),
    ("flipflop", FLIPFLOP),
    ("rightmarch", RIGHTMARCH),
    ("miracle", MIRACLE),
    ("oracle_roundtrip", ORACLE_ROUNDTRIP),
];

/// Parses a bundled program by name.
pub fn bundled(name: &str) -> Option<Program> {
    CORPUS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_program(src).expect("bundled programs parse"))
}
