// SPDX-License-Identifier: Apache-2.0

//! Gossamer and its modified variant.
//!
//! Both variants share one equation skeleton; they differ in the mixing
//! function and in the amount fed to the outer rotation of each equation.
//! Every outer rotation amount is listed in [`Rotations`], one table per
//! variant:
//!
//! ```text
//! A        = ROT(ROT(IDS + K1 + π + n1, K2) + K1, a)
//! B        = ROT(ROT(IDS + K2 + π + n2, K1) + K2, b)
//! n3       = MixBits(n1, n2)
//! K1*      = ROT((ROT(n2 + K1 + π + n3, n2) + K2) ⊕ n3, k1*) ⊕ n3
//! K2*      = ROT(ROT(n1 + K2 + π + n3, n1) + K1 + n3, k2*) + n3
//! n1'      = MixBits(n3, n2)
//! C        = ROT((ROT(n3 + K1* + π + n1', n3) + K2*) ⊕ n1', c) ⊕ n1'
//! D        = ROT(ROT(n2 + K2* + ID + n1', n2) + K1* + n1', d) + n1'
//! n2'      = MixBits(n1', n3)
//! IDS_next = ROT((ROT(n1' + K1* + IDS + n2', n1') + K2*) ⊕ n2', ids) ⊕ n2'
//! K1_next  = ROT(ROT(n3 + K2* + π + n2', n3) + K1* + n2', k1) + n2'
//! K2_next  = ROT(ROT(IDS_next + K2* + π + K1_next, IDS_next) + K1* + K1_next, k2) + K1_next
//! ```

use serde::{Deserialize, Serialize};

use crate::protocol::{Challenge, Internals, ReaderPending, Rejection, TagReply};
use crate::state::KeyTuple;
use crate::word96::{mixbits_modified, mixbits_original, Word96, BITS, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Original,
    Modified,
}

/// A value that can serve as a rotation amount.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    K1,
    K2,
    N1,
    N2,
    N3,
    N1p,
    K1Star,
    K2Star,
}

/// Outer rotation amount of each equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rotations {
    pub a: Operand,
    pub b: Operand,
    pub k1_star: Operand,
    pub k2_star: Operand,
    pub c: Operand,
    pub d: Operand,
    pub ids_next: Operand,
    pub k1_next: Operand,
    pub k2_next: Operand,
}

// K1_next and K2_next amounts of the original are reconstructed by undoing
// the modification pattern; all other entries are stated directly.
const ORIGINAL: Rotations = Rotations {
    a: Operand::K1,
    b: Operand::K2,
    k1_star: Operand::N1,
    k2_star: Operand::N2,
    c: Operand::N2,
    d: Operand::N3,
    ids_next: Operand::N3,
    k1_next: Operand::N2,
    k2_next: Operand::N1p,
};

// A and B amounts are inferred from the reduced forms of A and B under
// zero keys.
const MODIFIED: Rotations = Rotations {
    a: Operand::N2,
    b: Operand::N1,
    k1_star: Operand::K1,
    k2_star: Operand::K2,
    c: Operand::K2Star,
    d: Operand::K1Star,
    ids_next: Operand::K1Star,
    k1_next: Operand::K1Star,
    k2_next: Operand::K2Star,
};

impl Variant {
    pub fn rotations(self) -> &'static Rotations {
        match self {
            Variant::Original => &ORIGINAL,
            Variant::Modified => &MODIFIED,
        }
    }

    pub fn mixbits(self, x: Word96, y: Word96) -> Word96 {
        match self {
            Variant::Original => mixbits_original(x, y),
            Variant::Modified => mixbits_modified(x, y),
        }
    }
}

/// Everything one side derives from a tuple, ID and the two nonces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionValues {
    pub challenge: Challenge,
    pub d: Word96,
    pub internals: Internals,
    pub next: KeyTuple,
}

#[derive(Default)]
struct Env {
    k1: Word96,
    k2: Word96,
    n1: Word96,
    n2: Word96,
    n3: Word96,
    n1p: Word96,
    k1_star: Word96,
    k2_star: Word96,
}

impl Env {
    fn get(&self, op: Operand) -> Word96 {
        match op {
            Operand::K1 => self.k1,
            Operand::K2 => self.k2,
            Operand::N1 => self.n1,
            Operand::N2 => self.n2,
            Operand::N3 => self.n3,
            Operand::N1p => self.n1p,
            Operand::K1Star => self.k1_star,
            Operand::K2Star => self.k2_star,
        }
    }
}

fn message_a(t: &KeyTuple, n1: Word96, outer: Word96) -> Word96 {
    ((t.ids + t.k1 + PI + n1).rotl(t.k2) + t.k1).rotl(outer)
}

fn message_b(t: &KeyTuple, n2: Word96, outer: Word96) -> Word96 {
    ((t.ids + t.k2 + PI + n2).rotl(t.k1) + t.k2).rotl(outer)
}

fn invert_a(t: &KeyTuple, a: Word96, outer: Word96) -> Word96 {
    (a.rotr(outer) - t.k1).rotr(t.k2) - t.ids - t.k1 - PI
}

fn invert_b(t: &KeyTuple, b: Word96, outer: Word96) -> Word96 {
    (b.rotr(outer) - t.k2).rotr(t.k1) - t.ids - t.k2 - PI
}

/// Evaluates the full equation set for one session.
pub fn session_values(
    t: &KeyTuple,
    id: Word96,
    n1: Word96,
    n2: Word96,
    variant: Variant,
) -> SessionValues {
    let rot = variant.rotations();
    let mut env = Env {
        k1: t.k1,
        k2: t.k2,
        n1,
        n2,
        ..Env::default()
    };
    let a = message_a(t, n1, env.get(rot.a));
    let b = message_b(t, n2, env.get(rot.b));

    let n3 = variant.mixbits(n1, n2);
    env.n3 = n3;
    let k1_star = (((n2 + t.k1 + PI + n3).rotl(n2) + t.k2) ^ n3).rotl(env.get(rot.k1_star)) ^ n3;
    let k2_star = ((n1 + t.k2 + PI + n3).rotl(n1) + t.k1 + n3).rotl(env.get(rot.k2_star)) + n3;
    env.k1_star = k1_star;
    env.k2_star = k2_star;

    let n1p = variant.mixbits(n3, n2);
    env.n1p = n1p;
    let c = (((n3 + k1_star + PI + n1p).rotl(n3) + k2_star) ^ n1p).rotl(env.get(rot.c)) ^ n1p;
    let d = ((n2 + k2_star + id + n1p).rotl(n2) + k1_star + n1p).rotl(env.get(rot.d)) + n1p;

    let n2p = variant.mixbits(n1p, n3);
    let ids_next = (((n1p + k1_star + t.ids + n2p).rotl(n1p) + k2_star) ^ n2p)
        .rotl(env.get(rot.ids_next))
        ^ n2p;
    let k1_next =
        ((n3 + k2_star + PI + n2p).rotl(n3) + k1_star + n2p).rotl(env.get(rot.k1_next)) + n2p;
    let k2_next = ((ids_next + k2_star + PI + k1_next).rotl(ids_next) + k1_star + k1_next)
        .rotl(env.get(rot.k2_next))
        + k1_next;

    SessionValues {
        challenge: Challenge { a, b, c },
        d,
        internals: Internals {
            n1,
            n2,
            n3: Some(n3),
            n1p: Some(n1p),
            n2p: Some(n2p),
            k1_star,
            k2_star,
        },
        next: KeyTuple::new(ids_next, k1_next, k2_next),
    }
}

/// Next `(IDS, K1, K2)` for a session with the given nonces.
pub fn update_tuples(t: &KeyTuple, n1: Word96, n2: Word96, variant: Variant) -> KeyTuple {
    // The update does not depend on ID.
    session_values(t, Word96::ZERO, n1, n2, variant).next
}

pub fn reader_begin(
    record: &KeyTuple,
    id: Word96,
    n1: Word96,
    n2: Word96,
    variant: Variant,
) -> (Challenge, ReaderPending) {
    let v = session_values(record, id, n1, n2, variant);
    let pending = ReaderPending {
        internals: v.internals,
        expected_d: v.d,
        staged: v.next,
    };
    (v.challenge, pending)
}

/// Candidate `(n1, n2)` pairs consistent with A and B.
///
/// In the original variant the outer rotations use keys and inversion is
/// direct. In the modified variant A's outer rotation uses n2 and B's uses
/// n1, so the tag guesses `n2 mod 96`, inverts A, inverts B with the
/// resulting n1 and keeps the guesses that are self-consistent.
pub fn nonce_candidates(
    t: &KeyTuple,
    a: Word96,
    b: Word96,
    variant: Variant,
) -> Vec<(Word96, Word96)> {
    match variant {
        Variant::Original => {
            let n1 = invert_a(t, a, t.k1);
            let n2 = invert_b(t, b, t.k2);
            vec![(n1, n2)]
        }
        Variant::Modified => (0..BITS as u8)
            .filter_map(|r| {
                let n1 = invert_a(t, a, Word96::from(r as u64));
                let n2 = invert_b(t, b, n1);
                (n2.mod96() == r).then_some((n1, n2))
            })
            .collect(),
    }
}

/// Tag side of mutual authentication.
///
/// Accepts iff exactly one nonce candidate reproduces the received C.
pub fn tag_respond(
    tuple: &KeyTuple,
    id: Word96,
    msg: &Challenge,
    variant: Variant,
) -> Result<TagReply, Rejection> {
    let mut matching = nonce_candidates(tuple, msg.a, msg.b, variant)
        .into_iter()
        .map(|(n1, n2)| session_values(tuple, id, n1, n2, variant))
        .filter(|v| v.challenge == *msg);
    let Some(first) = matching.next() else {
        return Err(Rejection::CMismatch);
    };
    let extra = matching.count();
    if extra > 0 {
        return Err(Rejection::Ambiguous(extra + 1));
    }
    Ok(TagReply {
        d: first.d,
        next: first.next,
        internals: first.internals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: u128) -> Word96 {
        Word96::new(v)
    }

    fn reference_tuple() -> (KeyTuple, Word96, Word96, Word96) {
        (
            KeyTuple::new(
                w(0x0123456789ABCDEF01234567),
                w(0x89ABCDEF0123456789ABCDEF),
                w(0xFEDCBA9876543210FEDCBA98),
            ),
            w(0x1F2E3D4C5B6A79881F2E3D4C),
            w(0xA5A5A5A55A5A5A5AC3C3C3C3),
            w(0x0F1E2D3C4B5A69788796A5B4),
        )
    }

    #[test]
    fn original_all_zero_closed_form() {
        let v = session_values(
            &KeyTuple::zero(),
            Word96::ZERO,
            Word96::ZERO,
            Word96::ZERO,
            Variant::Original,
        );
        let three_pi = PI + PI + PI;
        assert_eq!(
            v.challenge,
            Challenge {
                a: PI,
                b: PI,
                c: three_pi
            }
        );
        assert_eq!(v.internals.k1_star, PI);
        assert_eq!(v.internals.k2_star, PI);
        assert_eq!(v.internals.n3, Some(Word96::ZERO));
        assert_eq!(v.internals.n1p, Some(Word96::ZERO));
        assert_eq!(v.internals.n2p, Some(Word96::ZERO));
        assert_eq!(v.d, PI + PI);
        assert_eq!(v.next.ids, PI + PI);
        assert_eq!(three_pi, w(0x96cbe3f9990e91a79394c9e6));
    }

    #[test]
    fn original_matches_straight_line_reference() {
        // tests/oracle/oracle.py
        let (t, id, n1, n2) = reference_tuple();
        let v = session_values(&t, id, n1, n2, Variant::Original);
        assert_eq!(v.challenge.a, w(0xff0b970ca8c6e415c92f5e42));
        assert_eq!(v.challenge.b, w(0xc210cf24724bdf96fc957ed2));
        assert_eq!(v.challenge.c, w(0xd441c2c83764d1def9429d4d));
        assert_eq!(v.d, w(0x267e07cfc0ca246f13e8f0b6));
        assert_eq!(v.internals.n3, Some(w(0xc6317fd47ff815dd9e7d4817)));
        assert_eq!(v.internals.n1p, Some(w(0x2921dc250ebd38b7e7de7673)));
        assert_eq!(v.internals.n2p, Some(w(0x2d03af35ea4b58d500419dc7)));
        assert_eq!(v.internals.k1_star, w(0xd294f50b06f343b3f1c145c3));
        assert_eq!(v.internals.k2_star, w(0xb0d4f994b99ca7fcbe18f257));
        assert_eq!(
            v.next,
            KeyTuple::new(
                w(0x6c7a8e411857f0b97a1d2029),
                w(0xb12a67729f54aa209b0aa265),
                w(0xa4b1d0e84e4035584c5a9ebe)
            )
        );
    }

    #[test]
    fn modified_matches_straight_line_reference() {
        let (t, id, n1, n2) = reference_tuple();
        let v = session_values(&t, id, n1, n2, Variant::Modified);
        assert_eq!(v.challenge.a, w(0x18dc82b925ebc85fe172e195));
        assert_eq!(v.challenge.b, w(0x5efcb7e4abf6961086792392));
        assert_eq!(v.challenge.c, w(0xeeaedc572be0e68099a36450));
        assert_eq!(v.d, w(0x43bb3cf1901711c1e64bbf94));
        assert_eq!(v.internals.k1_star, w(0x713dcb20ec61f8d89dd282cb));
        assert_eq!(v.internals.k2_star, w(0xffa532e4b9d6dd98c97a8829));
        assert_eq!(
            v.next,
            KeyTuple::new(
                w(0xd9231735e7b67488b24f79c2),
                w(0xa4f9e9ca7c838882355b4a04),
                w(0xc85626838f41b42ed6198e09)
            )
        );
    }

    #[test]
    fn modified_all_zero_departs_from_closed_form() {
        let v = session_values(
            &KeyTuple::zero(),
            Word96::ZERO,
            Word96::ZERO,
            Word96::ZERO,
            Variant::Modified,
        );
        assert_eq!(v.internals.n3, Some(w(0x1a553f8878f90)));
        assert_ne!(v.challenge.c, PI + PI + PI);
        assert_eq!(v.challenge.c, w(0xc7fa133ec75d4fd3c6f914b5));
        assert_eq!(v.d, w(0xea185de95eb42ac8f38c06e9));
        assert_eq!(v.next.ids, w(0x91f5b3a16396a22c6707e34b));
    }

    #[test]
    fn round_trip_both_variants() {
        let (t, id, n1, n2) = reference_tuple();
        for variant in [Variant::Original, Variant::Modified] {
            let (msg, pending) = reader_begin(&t, id, n1, n2, variant);
            let reply = tag_respond(&t, id, &msg, variant).unwrap();
            assert_eq!(reply.internals, pending.internals);
            assert_eq!(reply.internals.n1, n1);
            assert_eq!(reply.internals.n2, n2);
            assert_eq!(pending.finish(reply.d).unwrap(), reply.next);
        }
    }

    #[test]
    fn original_zero_tag_answers_two_pi() {
        let t = KeyTuple::zero();
        let (msg, _) = reader_begin(
            &t,
            Word96::ZERO,
            Word96::ZERO,
            Word96::ZERO,
            Variant::Original,
        );
        let reply = tag_respond(&t, Word96::ZERO, &msg, Variant::Original).unwrap();
        assert_eq!(reply.d, PI + PI);
        assert_eq!(
            update_tuples(&t, Word96::ZERO, Word96::ZERO, Variant::Original).ids,
            PI + PI
        );
    }

    #[test]
    fn modified_search_contains_true_pair() {
        let (t, _, n1, n2) = reference_tuple();
        let v = session_values(&t, Word96::ZERO, n1, n2, Variant::Modified);
        let candidates = nonce_candidates(&t, v.challenge.a, v.challenge.b, Variant::Modified);
        assert!(candidates.contains(&(n1, n2)));
        assert!(candidates.len() <= 96);
    }

    #[test]
    fn corrupted_c_rejected() {
        let (t, id, n1, n2) = reference_tuple();
        for variant in [Variant::Original, Variant::Modified] {
            let (mut msg, _) = reader_begin(&t, id, n1, n2, variant);
            msg.c = msg.c ^ w(1 << 40);
            assert_eq!(
                tag_respond(&t, id, &msg, variant),
                Err(Rejection::CMismatch)
            );
        }
    }

    #[test]
    fn wrong_keys_rejected() {
        let (t, id, n1, n2) = reference_tuple();
        let other = KeyTuple::new(t.ids, t.k1 ^ Word96::ONE, t.k2);
        for variant in [Variant::Original, Variant::Modified] {
            let (msg, _) = reader_begin(&t, id, n1, n2, variant);
            assert!(tag_respond(&other, id, &msg, variant).is_err());
        }
    }

    #[test]
    fn tables_differ_only_where_intended() {
        let o = Variant::Original.rotations();
        let m = Variant::Modified.rotations();
        assert_eq!(
            (o.ids_next, o.k1_next, o.k2_next),
            (Operand::N3, Operand::N2, Operand::N1p)
        );
        assert_eq!(
            (m.ids_next, m.k1_next, m.k2_next),
            (Operand::K1Star, Operand::K1Star, Operand::K2Star)
        );
    }
}
