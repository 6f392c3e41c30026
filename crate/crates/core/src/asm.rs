//! Text format for transition tables.
//!
//! ```text
//! ; flip-flop
//! #halt 2
//! 0 0 0 0 -> 1 0 0 S S S 1
//! 1 1 0 0 -> 0 0 0 S S S 0
//! 3 * -> MIRACLE 2
//! ```

use std::fmt;

use thiserror::Error;

use crate::vm::{bits_text, Action, Bits, Move, Program, ProgramDefect, State};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AsmErrorKind {
    Syntax(String),
    NonAscii,
    DuplicateRule,
    RuleFromHalt,
    MissingHalt,
    MultipleHalt,
    UndeclaredState(State),
}

impl fmt::Display for AsmErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsmErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            AsmErrorKind::NonAscii => write!(f, "non-ASCII byte"),
            AsmErrorKind::DuplicateRule => write!(f, "duplicate rule for this state and read triple"),
            AsmErrorKind::RuleFromHalt => write!(f, "rule out of the halt state"),
            AsmErrorKind::MissingHalt => write!(f, "no #halt directive"),
            AsmErrorKind::MultipleHalt => write!(f, "second #halt directive"),
            AsmErrorKind::UndeclaredState(q) => write!(f, "state {q} has no rules and is not the halt state"),
        }
    }
}

/// A parse failure; `line` and `col` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct AsmError {
    pub line: usize,
    pub col: usize,
    pub kind: AsmErrorKind,
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, idx: usize, kind: AsmErrorKind) -> AsmError {
        let col = self.tokens.get(idx).map_or_else(|| self.end_col(), |t| t.col);
        AsmError {
            line: self.number,
            col,
            kind,
        }
    }

    fn syntax(&self, idx: usize, msg: impl Into<String>) -> AsmError {
        self.err(idx, AsmErrorKind::Syntax(msg.into()))
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.col + t.text.len())
    }

    fn token(&self, idx: usize, what: &str) -> Result<&'a str, AsmError> {
        self.tokens
            .get(idx)
            .map(|t| t.text)
            .ok_or_else(|| self.syntax(idx, format!("expected {what}")))
    }

    fn state(&self, idx: usize) -> Result<State, AsmError> {
        let t = self.token(idx, "a state number")?;
        let ok = t.bytes().all(|b| b.is_ascii_digit()) && !(t.len() > 1 && t.starts_with('0'));
        match t.parse::<State>() {
            Ok(q) if ok => Ok(q),
            _ => Err(self.syntax(idx, format!("expected a state number, found `{t}`"))),
        }
    }

    fn bit(&self, idx: usize) -> Result<bool, AsmError> {
        match self.token(idx, "a bit")? {
            "0" => Ok(false),
            "1" => Ok(true),
            t => Err(self.syntax(idx, format!("expected 0 or 1, found `{t}`"))),
        }
    }

    fn bits(&self, idx: usize) -> Result<Bits, AsmError> {
        Ok([self.bit(idx)?, self.bit(idx + 1)?, self.bit(idx + 2)?])
    }

    fn mv(&self, idx: usize) -> Result<Move, AsmError> {
        match self.token(idx, "a move")? {
            "L" => Ok(Move::Left),
            "R" => Ok(Move::Right),
            "S" => Ok(Move::Stay),
            t => Err(self.syntax(idx, format!("expected L, R or S, found `{t}`"))),
        }
    }

    fn keyword(&self, idx: usize, kw: &str) -> Result<(), AsmError> {
        match self.token(idx, &format!("`{kw}`"))? {
            t if t == kw => Ok(()),
            t => Err(self.syntax(idx, format!("expected `{kw}`, found `{t}`"))),
        }
    }

    fn done(&self, idx: usize) -> Result<(), AsmError> {
        match self.tokens.get(idx) {
            None => Ok(()),
            Some(t) => Err(self.syntax(idx, format!("unexpected `{}`", t.text))),
        }
    }
}

enum Item {
    Halt(State),
    Step { state: State, read: Bits, write: Bits, moves: [Move; 3], next: State },
    Miracle { state: State, next: State },
}

fn parse_line(line: &Line<'_>) -> Result<Item, AsmError> {
    if line.tokens[0].text == "#halt" {
        let q = line.state(1)?;
        line.done(2)?;
        return Ok(Item::Halt(q));
    }
    if line.tokens[0].text.starts_with('#') {
        return Err(line.syntax(0, format!("unknown directive `{}`", line.tokens[0].text)));
    }
    let state = line.state(0)?;
    if line.token(1, "a read triple or `*`")? == "*" {
        line.keyword(2, "->")?;
        line.keyword(3, "MIRACLE")?;
        let next = line.state(4)?;
        line.done(5)?;
        return Ok(Item::Miracle { state, next });
    }
    let read = line.bits(1)?;
    line.keyword(4, "->")?;
    let write = line.bits(5)?;
    let moves = [line.mv(8)?, line.mv(9)?, line.mv(10)?];
    let next = line.state(11)?;
    line.done(12)?;
    Ok(Item::Step {
        state,
        read,
        write,
        moves,
        next,
    })
}

fn tokenize(src: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in src.split('\n').enumerate() {
        let code = raw.split(';').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (j, c) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
            let ws = c.is_ascii_whitespace();
            match (start, ws) {
                (None, false) => start = Some(j),
                (Some(s), true) => {
                    tokens.push(Token {
                        text: &code[s..j],
                        col: s + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line { number: i + 1, tokens });
        }
    }
    out
}

/// Parses program text. Every rejection carries a line and column.
pub fn parse_program(src: &str) -> Result<Program, AsmError> {
    parse_program_bytes(src.as_bytes())
}

/// Like [`parse_program`], for raw bytes; anything outside ASCII is rejected.
pub fn parse_program_bytes(bytes: &[u8]) -> Result<Program, AsmError> {
    if let Some(pos) = bytes.iter().position(|b| !b.is_ascii()) {
        let line = bytes[..pos].iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = bytes[..pos].iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        return Err(AsmError {
            line,
            col: pos - line_start + 1,
            kind: AsmErrorKind::NonAscii,
        });
    }
    let src = std::str::from_utf8(bytes).expect("ASCII is UTF-8");
    let lines = tokenize(src);
    let mut items = Vec::with_capacity(lines.len());
    for line in &lines {
        items.push(parse_line(line)?);
    }

    let mut halt: Option<State> = None;
    for (line, item) in lines.iter().zip(&items) {
        if let Item::Halt(q) = item {
            if halt.is_some() {
                return Err(line.err(0, AsmErrorKind::MultipleHalt));
            }
            halt = Some(*q);
        }
    }
    let halt = halt.ok_or(AsmError {
        line: lines.last().map_or(1, |l| l.number),
        col: 1,
        kind: AsmErrorKind::MissingHalt,
    })?;

    let mut prog = Program::new(halt);
    for (line, item) in lines.iter().zip(&items) {
        let added = match *item {
            Item::Halt(_) => continue,
            Item::Step {
                state,
                read,
                write,
                moves,
                next,
            } => prog.add_step(state, read, write, moves, next),
            Item::Miracle { state, next } => prog.add_miracle(state, next),
        };
        added.map_err(|d| {
            line.err(
                0,
                match d {
                    ProgramDefect::DuplicateRule { .. } => AsmErrorKind::DuplicateRule,
                    ProgramDefect::RuleFromHalt(_) => AsmErrorKind::RuleFromHalt,
                    ProgramDefect::UndeclaredState(q) => AsmErrorKind::UndeclaredState(q),
                },
            )
        })?;
    }

    if let Err(ProgramDefect::UndeclaredState(q)) = prog.validate() {
        // point at the first line mentioning the target, or the top
        let at = lines.iter().zip(&items).find_map(|(line, item)| match item {
            Item::Step { next, .. } | Item::Miracle { next, .. } if *next == q => {
                let idx = line.tokens.len() - 1;
                Some(line.err(idx, AsmErrorKind::UndeclaredState(q)))
            }
            _ => None,
        });
        return Err(at.unwrap_or(AsmError {
            line: 1,
            col: 1,
            kind: AsmErrorKind::UndeclaredState(q),
        }));
    }
    Ok(prog)
}

/// Canonical text: the halt directive, then one line per rule ordered by
/// state and read triple.
pub fn print_program(p: &Program) -> String {
    let mut out = format!("#halt {}\n", p.halt());
    for rule in p.rules() {
        match (rule.read, rule.action) {
            (None, Action::Miracle { next }) => out.push_str(&format!("{} * -> MIRACLE {next}\n", rule.state)),
            (Some(read), Action::Step { write, moves, next }) => out.push_str(&format!(
                "{} {} -> {} {} {} {} {next}\n",
                rule.state,
                bits_text(&read),
                bits_text(&write),
                moves[0].symbol(),
                moves[1].symbol(),
                moves[2].symbol(),
            )),
            _ => unreachable!("miracle rules never carry a read triple"),
        }
    }
    out
}
