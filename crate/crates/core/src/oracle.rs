//! Code-level oracles answering the miracle command.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::problems::Canonification;
use crate::setcode::{decode, encode, encode_canonical, seeded_enumeration, Code};

/// A deterministic map from codes to codes. `None` means the oracle has no
/// value for the presented code.
pub trait CodeOracle: Send + Sync {
    fn query(&self, x: &Code) -> Option<Code>;
}

impl<F> CodeOracle for F
where
    F: Fn(&Code) -> Option<Code> + Send + Sync,
{
    fn query(&self, x: &Code) -> Option<Code> {
        self(x)
    }
}

/// Lifts a canonification to codes: decode, apply, encode.
///
/// With `reencode_seed` set, the answer is encoded under a shuffled
/// enumeration whose seed also depends on the presented code, so different
/// codes of the same set may receive different codes of the answer.
#[derive(Debug, Clone)]
pub struct CanonOracle {
    pub canon: Canonification,
    pub reencode_seed: Option<u64>,
}

impl CanonOracle {
    pub fn new(canon: Canonification) -> Self {
        CanonOracle {
            canon,
            reencode_seed: None,
        }
    }

    pub fn reencoding(canon: Canonification, seed: u64) -> Self {
        CanonOracle {
            canon,
            reencode_seed: Some(seed),
        }
    }
}

impl CodeOracle for CanonOracle {
    fn query(&self, x: &Code) -> Option<Code> {
        let y = decode(x).ok()?;
        let answer = self.canon.apply(&y);
        match self.reencode_seed {
            None => Some(encode_canonical(&answer)),
            Some(seed) => {
                let mut h = DefaultHasher::new();
                seed.hash(&mut h);
                x.hash(&mut h);
                encode(&answer, &seeded_enumeration(&answer, h.finish())).ok()
            }
        }
    }
}

/// Counts queries passed to an inner oracle.
pub struct CountingOracle<'a> {
    inner: &'a dyn CodeOracle,
    calls: AtomicUsize,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a dyn CodeOracle) -> Self {
        CountingOracle {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl CodeOracle for CountingOracle<'_> {
    fn query(&self, x: &Code) -> Option<Code> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.query(x)
    }
}
