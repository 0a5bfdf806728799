// SPDX-License-Identifier: Apache-2.0

//! Tag-side secret memory.

use serde::{Deserialize, Serialize};

use crate::word96::{Word96, BITS};

/// One `(IDS, K1, K2)` record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyTuple {
    pub ids: Word96,
    pub k1: Word96,
    pub k2: Word96,
}

impl KeyTuple {
    pub const fn new(ids: Word96, k1: Word96, k2: Word96) -> Self {
        KeyTuple { ids, k1, k2 }
    }

    pub const fn zero() -> Self {
        KeyTuple::new(Word96::ZERO, Word96::ZERO, Word96::ZERO)
    }
}

/// Which of the two stored tuples is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The potential-next tuple, announced on first identification.
    Next,
    /// The previous tuple, announced on the retry.
    Old,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attempt {
    First,
    Retry,
}

/// Bits of rewritable memory: two tuples of three words.
pub const REWRITABLE_BITS: u32 = 6 * BITS;

/// Bits of ROM holding the static identifier.
pub const STATIC_ID_BITS: u32 = BITS;

/// Secret state held by a tag.
///
/// Exactly two tuples are kept at all times. After a successful session the
/// tuple that was used moves to `old` and the freshly derived tuple becomes
/// `next`, so a tag that updated while its reader did not can still be
/// reached through the old pseudonym.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagState {
    id: Word96,
    pub next: KeyTuple,
    pub old: KeyTuple,
    pub last_announced: Side,
}

impl TagState {
    /// A freshly provisioned tag; both tuples start out equal.
    pub fn new(id: Word96, tuple: KeyTuple) -> Self {
        TagState {
            id,
            next: tuple,
            old: tuple,
            last_announced: Side::Next,
        }
    }

    pub fn with_tuples(id: Word96, next: KeyTuple, old: KeyTuple) -> Self {
        TagState {
            id,
            next,
            old,
            last_announced: Side::Next,
        }
    }

    pub fn id(&self) -> Word96 {
        self.id
    }

    pub fn tuple(&self, side: Side) -> KeyTuple {
        match side {
            Side::Next => self.next,
            Side::Old => self.old,
        }
    }

    pub fn tuple_mut(&mut self, side: Side) -> &mut KeyTuple {
        match side {
            Side::Next => &mut self.next,
            Side::Old => &mut self.old,
        }
    }

    /// Answers a reader's hello: the next pseudonym first, the old one on retry.
    pub fn identify(&mut self, attempt: Attempt) -> Word96 {
        self.last_announced = match attempt {
            Attempt::First => Side::Next,
            Attempt::Retry => Side::Old,
        };
        self.tuple(self.last_announced).ids
    }

    /// The tuple behind the most recent announcement.
    pub fn announced(&self) -> KeyTuple {
        self.tuple(self.last_announced)
    }

    /// Installs `derived` after a session authenticated with the `used` tuple.
    pub fn commit(&mut self, used: Side, derived: KeyTuple) {
        self.old = self.tuple(used);
        self.next = derived;
    }
}
