// SPDX-License-Identifier: Apache-2.0

//! SASI (Chien, 2007).
//!
//! Only A, C, K1', K2' and the pseudonym update are spelled out in the
//! cryptanalysis this crate reproduces. B and D follow the original SASI
//! definition and live in [`message_b`] and [`message_d`] so that a
//! correction touches a single site:
//!
//! ```text
//! A  = IDS ⊕ K1 ⊕ n1
//! B  = (IDS ∨ K2) + n2
//! K1' = Rot(K1 ⊕ n2, K1)
//! K2' = Rot(K2 ⊕ n1, K2)
//! C  = (K1 ⊕ K2') + (K2 ⊕ K1')
//! D  = (K2' + ID) ⊕ ((K1 ⊕ K2) ∨ K1')
//! IDS_next = (IDS + ID) ⊕ (n2 ⊕ K1')
//! ```

use crate::protocol::{Challenge, Internals, ReaderPending, Rejection, TagReply};
use crate::state::KeyTuple;
use crate::word96::Word96;

fn message_b(t: &KeyTuple, n2: Word96) -> Word96 {
    (t.ids | t.k2) + n2
}

fn message_d(t: &KeyTuple, id: Word96, k1p: Word96, k2p: Word96) -> Word96 {
    (k2p + id) ^ ((t.k1 ^ t.k2) | k1p)
}

fn refreshed_keys(t: &KeyTuple, n1: Word96, n2: Word96) -> (Word96, Word96) {
    ((t.k1 ^ n2).rotl(t.k1), (t.k2 ^ n1).rotl(t.k2))
}

fn message_c(t: &KeyTuple, k1p: Word96, k2p: Word96) -> Word96 {
    (t.k1 ^ k2p) + (t.k2 ^ k1p)
}

/// Next tuple: `IDS ← (IDS + ID) ⊕ (n2 ⊕ K1')`, `K1 ← K1'`, `K2 ← K2'`.
pub fn update(t: &KeyTuple, id: Word96, n2: Word96, k1p: Word96, k2p: Word96) -> KeyTuple {
    KeyTuple::new((t.ids + id) ^ (n2 ^ k1p), k1p, k2p)
}

fn internals(n1: Word96, n2: Word96, k1p: Word96, k2p: Word96) -> Internals {
    Internals {
        n1,
        n2,
        n3: None,
        n1p: None,
        n2p: None,
        k1_star: k1p,
        k2_star: k2p,
    }
}

pub fn reader_begin(
    record: &KeyTuple,
    id: Word96,
    n1: Word96,
    n2: Word96,
) -> (Challenge, ReaderPending) {
    let (k1p, k2p) = refreshed_keys(record, n1, n2);
    let challenge = Challenge {
        a: record.ids ^ record.k1 ^ n1,
        b: message_b(record, n2),
        c: message_c(record, k1p, k2p),
    };
    let pending = ReaderPending {
        internals: internals(n1, n2, k1p, k2p),
        expected_d: message_d(record, id, k1p, k2p),
        staged: update(record, id, n2, k1p, k2p),
    };
    (challenge, pending)
}

/// Recovers the nonces, checks C and answers with D.
pub fn tag_respond(tuple: &KeyTuple, id: Word96, msg: &Challenge) -> Result<TagReply, Rejection> {
    let n1 = msg.a ^ tuple.ids ^ tuple.k1;
    let n2 = msg.b - (tuple.ids | tuple.k2);
    let (k1p, k2p) = refreshed_keys(tuple, n1, n2);
    if message_c(tuple, k1p, k2p) != msg.c {
        return Err(Rejection::CMismatch);
    }
    Ok(TagReply {
        d: message_d(tuple, id, k1p, k2p),
        next: update(tuple, id, n2, k1p, k2p),
        internals: internals(n1, n2, k1p, k2p),
    })
}
