use serde::Serialize;

use super::machine::Configuration;
use super::tape::Tape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceEvent {
    Step,
    LimitJump,
    MiracleCall,
    Halt,
}

/// A changed block `[from, to)` on one tape, all cells now holding `bit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceDelta {
    pub tape: usize,
    pub from: String,
    pub to: String,
    pub bit: u8,
}

/// One trace line. `time`, `state` and `heads` describe the configuration
/// after the event; `tape_deltas` lists what the event changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub event: TraceEvent,
    pub time: String,
    pub state: u32,
    pub heads: [String; 3],
    pub tape_deltas: Vec<TraceDelta>,
}

impl TraceRecord {
    pub fn transition(event: TraceEvent, before: &Configuration, after: &Configuration) -> Self {
        let mut tape_deltas = Vec::new();
        for (i, (a, b)) in before.tapes.iter().zip(&after.tapes).enumerate() {
            if a == b {
                continue;
            }
            tape_deltas.extend(Tape::diff(a, b).into_iter().map(|d| TraceDelta {
                tape: i,
                from: d.from.to_text(),
                to: d.to.to_text(),
                bit: d.bit as u8,
            }));
        }
        TraceRecord {
            event,
            time: after.time.to_text(),
            state: after.state,
            heads: std::array::from_fn(|i| after.heads[i].to_text()),
            tape_deltas,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace records always serialize")
    }
}

/// Renders a trace as line-delimited JSON.
pub fn trace_to_jsonl(trace: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in trace {
        out.push_str(&r.to_json());
        out.push('\n');
    }
    out
}
