//! The ordinal Turing machine: three tapes indexed by ordinals, successor
//! steps, and limit stages reached through certified pattern detectors.

mod machine;
mod program;
mod tape;
mod trace;

pub use machine::{
    move_left, run, run_to_first_limit, step, Configuration, Fuel, Outcome, RunOptions, RunResult, StepError, StepInfo,
};
pub use program::{Action, Bits, Move, Program, ProgramDefect, Rule, State, MIRACLE, OUTPUT, SCRATCH, TAPE_NAMES};
pub(crate) use program::bits_text;
pub use tape::{Tape, TapeDelta};
pub use trace::{trace_to_jsonl, TraceDelta, TraceEvent, TraceRecord};
