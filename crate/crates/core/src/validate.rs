//! Structural checks on dependency sentences.

use alloc::vec;
use thiserror::Error;

use crate::corpus::Sentence;

/// First violated sentence invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("empty sentence")]
    Empty,
    #[error("token at position {position} has index {found}")]
    IndexMismatch { position: usize, found: usize },
    #[error("head {head} of token {token} out of range 0..={n}")]
    HeadOutOfRange { token: usize, head: usize, n: usize },
    #[error("self-loop at token {token}")]
    SelfLoop { token: usize },
    #[error("cycle through token {token}")]
    Cycle { token: usize },
    #[error("no root")]
    NoRoot,
    #[error("multiple roots (tokens {first} and {second})")]
    MultipleRoots { first: usize, second: usize },
}

/// Returns `Ok(())` iff the head pointers of `sentence` form one rooted tree
/// over tokens numbered `1..=n`.
pub fn validate(sentence: &Sentence) -> Result<(), Diagnostic> {
    let tokens = &sentence.tokens;
    let n = tokens.len();
    if n == 0 {
        return Err(Diagnostic::Empty);
    }
    for (i, t) in tokens.iter().enumerate() {
        if t.index != i + 1 {
            return Err(Diagnostic::IndexMismatch {
                position: i + 1,
                found: t.index,
            });
        }
    }
    for t in tokens {
        if t.head > n {
            return Err(Diagnostic::HeadOutOfRange {
                token: t.index,
                head: t.head,
                n,
            });
        }
        if t.head == t.index {
            return Err(Diagnostic::SelfLoop { token: t.index });
        }
    }

    // 0 = unvisited, 1 = on current path, 2 = reaches the root
    let mut state = vec![0u8; n + 1];
    state[0] = 2;
    let mut path = vec![];
    for start in 1..=n {
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = tokens[cur - 1].head;
        }
        if state[cur] == 1 {
            return Err(Diagnostic::Cycle { token: cur });
        }
        for v in path.drain(..) {
            state[v] = 2;
        }
    }

    let mut roots = tokens.iter().filter(|t| t.head == 0).map(|t| t.index);
    match (roots.next(), roots.next()) {
        (None, _) => Err(Diagnostic::NoRoot),
        (Some(first), Some(second)) => Err(Diagnostic::MultipleRoots { first, second }),
        (Some(_), None) => Ok(()),
    }
}
