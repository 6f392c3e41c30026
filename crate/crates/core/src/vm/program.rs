use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Tape indices, in the order the three heads appear in a rule.
pub const SCRATCH: usize = 0;
pub const OUTPUT: usize = 1;
pub const MIRACLE: usize = 2;

pub const TAPE_NAMES: [&str; 3] = ["scratch", "output", "miracle"];

pub type State = u32;
pub type Bits = [bool; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn symbol(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
            Move::Stay => 'S',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Step { write: Bits, moves: [Move; 3], next: State },
    Miracle { next: State },
}

/// Reasons a transition table is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramDefect {
    DuplicateRule { state: State, read: Option<Bits> },
    RuleFromHalt(State),
    UndeclaredState(State),
}

impl fmt::Display for ProgramDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramDefect::DuplicateRule { state, read: Some(b) } => {
                write!(f, "duplicate rule for state {state} reading {}", bits_text(b))
            }
            ProgramDefect::DuplicateRule { state, read: None } => {
                write!(f, "duplicate rule for state {state} (miracle wildcard overlaps)")
            }
            ProgramDefect::RuleFromHalt(q) => write!(f, "rule out of halt state {q}"),
            ProgramDefect::UndeclaredState(q) => write!(f, "state {q} has no rules and is not the halt state"),
        }
    }
}

pub(crate) fn bits_text(b: &Bits) -> String {
    b.iter().map(|&x| if x { "1" } else { "0" }).collect::<Vec<_>>().join(" ")
}

/// One line of a transition table; `read` is `None` for a miracle rule,
/// which matches every read triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub state: State,
    pub read: Option<Bits>,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum StateRules {
    Table(BTreeMap<Bits, Action>),
    Miracle(State),
}

/// A deterministic OTM transition table. The start state is 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    halt: State,
    rules: BTreeMap<State, StateRules>,
}

impl Program {
    pub const START: State = 0;

    pub fn new(halt: State) -> Self {
        Program {
            halt,
            rules: BTreeMap::new(),
        }
    }

    pub fn halt(&self) -> State {
        self.halt
    }

    pub fn add_step(&mut self, state: State, read: Bits, write: Bits, moves: [Move; 3], next: State) -> Result<(), ProgramDefect> {
        if state == self.halt {
            return Err(ProgramDefect::RuleFromHalt(state));
        }
        let duplicate = ProgramDefect::DuplicateRule { state, read: Some(read) };
        match self.rules.entry(state).or_insert_with(|| StateRules::Table(BTreeMap::new())) {
            StateRules::Miracle(_) => Err(duplicate),
            StateRules::Table(t) => {
                if t.contains_key(&read) {
                    return Err(duplicate);
                }
                t.insert(read, Action::Step { write, moves, next });
                Ok(())
            }
        }
    }

    pub fn add_miracle(&mut self, state: State, next: State) -> Result<(), ProgramDefect> {
        if state == self.halt {
            return Err(ProgramDefect::RuleFromHalt(state));
        }
        if self.rules.contains_key(&state) {
            return Err(ProgramDefect::DuplicateRule { state, read: None });
        }
        self.rules.insert(state, StateRules::Miracle(next));
        Ok(())
    }

    /// States with at least one rule, plus the halt state.
    pub fn declared_states(&self) -> BTreeSet<State> {
        let mut s: BTreeSet<State> = self.rules.keys().copied().collect();
        s.insert(self.halt);
        s
    }

    /// Checks that the start state and every rule target are declared.
    pub fn validate(&self) -> Result<(), ProgramDefect> {
        let declared = self.declared_states();
        if !declared.contains(&Self::START) {
            return Err(ProgramDefect::UndeclaredState(Self::START));
        }
        for rule in self.rules() {
            let next = match rule.action {
                Action::Step { next, .. } | Action::Miracle { next } => next,
            };
            if !declared.contains(&next) {
                return Err(ProgramDefect::UndeclaredState(next));
            }
        }
        Ok(())
    }

    pub fn lookup(&self, state: State, read: Bits) -> Option<Action> {
        match self.rules.get(&state)? {
            StateRules::Miracle(next) => Some(Action::Miracle { next: *next }),
            StateRules::Table(t) => t.get(&read).cloned(),
        }
    }

    pub fn uses_miracle(&self) -> bool {
        self.rules.values().any(|r| matches!(r, StateRules::Miracle(_)))
    }

    /// All rules, ordered by state and then read triple.
    pub fn rules(&self) -> impl Iterator<Item = Rule> + '_ {
        self.rules.iter().flat_map(|(&state, r)| {
            let v: Vec<Rule> = match r {
                StateRules::Miracle(next) => vec![Rule {
                    state,
                    read: None,
                    action: Action::Miracle { next: *next },
                }],
                StateRules::Table(t) => t
                    .iter()
                    .map(|(read, a)| Rule {
                        state,
                        read: Some(*read),
                        action: a.clone(),
                    })
                    .collect(),
            };
            v
        })
    }

    pub fn rule_count(&self) -> usize {
        self.rules().count()
    }
}
