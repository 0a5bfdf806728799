// SPDX-License-Identifier: Apache-2.0

mod common;

use common::Big;
use proptest::prelude::*;
use umap::gossamer::{self, Variant};
use umap::protocol::{self, Protocol};
use umap::sasi;
use umap::state::KeyTuple;
use umap::word96::{mixbits_modified, mixbits_original, Word96};

fn word() -> impl Strategy<Value = Word96> {
    any::<u128>().prop_map(Word96::new)
}

fn tuple() -> impl Strategy<Value = KeyTuple> {
    (word(), word(), word()).prop_map(|(i, a, b)| KeyTuple::new(i, a, b))
}

proptest! {
    #[test]
    fn group_laws(a in word(), b in word()) {
        prop_assert_eq!((a + b) - b, a);
        prop_assert_eq!(a + (Word96::ZERO - a), Word96::ZERO);
        prop_assert_eq!(a + b, b + a);
    }

    #[test]
    fn rotation_is_bijective(x in word(), y in word()) {
        prop_assert_eq!(x.rotl(y).rotr(y), x);
        prop_assert_eq!(x.rotr(y).rotl(y), x);
    }

    #[test]
    fn rotation_amount_is_mod_96(x in word(), y in 0u64..1 << 40, k in 0u64..1 << 20) {
        let y = Word96::from(y);
        prop_assert_eq!(x.rotl(y), x.rotl(y + Word96::from(96 * k)));
    }

    #[test]
    fn hex_round_trip(x in word()) {
        let s = x.to_string();
        prop_assert_eq!(s.len(), 24);
        prop_assert!(s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)));
        prop_assert_eq!(s.parse::<Word96>().unwrap(), x);
    }

    #[test]
    fn arithmetic_matches_bigint(a in word(), b in word()) {
        let m = Big::new();
        let (ba, bb) = (m.of(a), m.of(b));
        prop_assert_eq!(a + b, m.word(&m.add(&[&ba, &bb])));
        prop_assert_eq!(a - b, m.word(&m.sub(&ba, &bb)));
        prop_assert_eq!(a.rotl(b), m.word(&m.rot(&ba, &bb)));
        prop_assert_eq!(a.rotr(b), m.word(&m.rotr(&ba, &bb)));
        prop_assert_eq!(mixbits_original(a, b), m.word(&m.mix_orig(&ba, &bb)));
        prop_assert_eq!(mixbits_modified(a, b), m.word(&m.mix_mod(&ba, &bb)));
    }

    #[test]
    fn gossamer_matches_reference(t in tuple(), id in word(), n1 in word(), n2 in word(), modified in any::<bool>()) {
        let variant = if modified { Variant::Modified } else { Variant::Original };
        let v = gossamer::session_values(&t, id, n1, n2, variant);
        let r = common::gossamer_ref(t.ids, t.k1, t.k2, id, n1, n2, modified);
        prop_assert_eq!((v.challenge.a, v.challenge.b, v.challenge.c, v.d), (r.a, r.b, r.c, r.d));
        prop_assert_eq!((v.internals.k1_star, v.internals.k2_star), (r.k1s, r.k2s));
        prop_assert_eq!((v.internals.n3, v.internals.n1p, v.internals.n2p), (Some(r.n3), Some(r.n1p), Some(r.n2p)));
        prop_assert_eq!(v.next, KeyTuple::new(r.ids_next, r.k1_next, r.k2_next));
    }

    #[test]
    fn sasi_matches_reference(t in tuple(), id in word(), n1 in word(), n2 in word()) {
        let (msg, pending) = sasi::reader_begin(&t, id, n1, n2);
        let r = common::sasi_ref(t.ids, t.k1, t.k2, id, n1, n2);
        prop_assert_eq!((msg.a, msg.b, msg.c), (r.a, r.b, r.c));
        prop_assert_eq!((pending.internals.k1_star, pending.internals.k2_star), (r.k1p, r.k2p));
        let reply = sasi::tag_respond(&t, id, &msg).unwrap();
        prop_assert_eq!(reply.d, r.d);
        prop_assert_eq!(reply.next.ids, r.ids_next);
    }

    #[test]
    fn every_protocol_round_trips(t in tuple(), id in word(), n1 in word(), n2 in word(), p in 0usize..3) {
        let p = Protocol::ALL[p];
        let (msg, pending) = protocol::reader_begin(p, &t, id, n1, n2);
        let reply = protocol::tag_respond(p, &t, id, &msg).unwrap();
        prop_assert_eq!(reply.internals.n1, n1);
        prop_assert_eq!(reply.internals.n2, n2);
        prop_assert_eq!(reply.internals, pending.internals);
        prop_assert_eq!(pending.finish(reply.d).unwrap(), reply.next);
        prop_assert_ne!(reply.next, t);
    }

    #[test]
    fn single_bit_corruption_of_c_rejected(t in tuple(), id in word(), n1 in word(), n2 in word(), p in 0usize..3, bit in 0u32..96) {
        let p = Protocol::ALL[p];
        let (mut msg, _) = protocol::reader_begin(p, &t, id, n1, n2);
        msg.c = msg.c ^ Word96::new(1u128 << bit);
        prop_assert!(protocol::tag_respond(p, &t, id, &msg).is_err());
    }

    #[test]
    fn sasi_zero_k1_steps_pseudonym_by_id(ids in word(), k2 in word(), id in word(), n1 in word(), n2 in word()) {
        let t = KeyTuple::new(ids, Word96::ZERO, k2);
        let (msg, _) = sasi::reader_begin(&t, id, n1, n2);
        let reply = sasi::tag_respond(&t, id, &msg).unwrap();
        prop_assert_eq!(reply.next.ids - ids, id);
    }
}
