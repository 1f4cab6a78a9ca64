//! Three-valued answers for questions the library can only sometimes settle.

use std::fmt;

/// How far a bounded search went before giving up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBound {
    pub height: u64,
    pub candidates: u64,
}

impl fmt::Display for SearchBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "height {} ({} candidates examined)", self.height, self.candidates)
    }
}

/// `Yes` carries a checkable witness, `No` a re-checkable certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W, C> {
    Yes(W),
    No(C),
    Unknown(SearchBound),
}

impl<W, C> Verdict<W, C> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn state(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "Yes",
            Verdict::No(_) => "No",
            Verdict::Unknown(_) => "Unknown",
        }
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Yes(w) => Some(w),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&C> {
        match self {
            Verdict::No(c) => Some(c),
            _ => None,
        }
    }
}
