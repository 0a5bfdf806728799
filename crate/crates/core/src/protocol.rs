// SPDX-License-Identifier: Apache-2.0

//! Protocol-independent session vocabulary and dispatch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gossamer::{self, Variant};
use crate::sasi;
use crate::state::KeyTuple;
use crate::word96::Word96;

/// The three protocols the simulator can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "sasi")]
    Sasi,
    #[serde(rename = "gossamer")]
    Gossamer,
    #[serde(rename = "gossamer-mod")]
    GossamerMod,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Sasi, Protocol::Gossamer, Protocol::GossamerMod];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Sasi => "sasi",
            Protocol::Gossamer => "gossamer",
            Protocol::GossamerMod => "gossamer-mod",
        }
    }

    pub fn gossamer_variant(self) -> Option<Variant> {
        match self {
            Protocol::Sasi => None,
            Protocol::Gossamer => Some(Variant::Original),
            Protocol::GossamerMod => Some(Variant::Modified),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown protocol variant {0:?} (expected sasi, gossamer or gossamer-mod)")]
pub struct UnknownProtocol(pub String);

impl FromStr for Protocol {
    type Err = UnknownProtocol;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sasi" => Ok(Protocol::Sasi),
            "gossamer" => Ok(Protocol::Gossamer),
            "gossamer-mod" => Ok(Protocol::GossamerMod),
            other => Err(UnknownProtocol(other.to_owned())),
        }
    }
}

/// The reader's `A || B || C` message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenge {
    pub a: Word96,
    pub b: Word96,
    pub c: Word96,
}

/// Session-internal secrets, as known to whichever side computed them.
///
/// SASI has no derived nonces; its refreshed keys `K1'`/`K2'` occupy the
/// `k1_star`/`k2_star` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Internals {
    pub n1: Word96,
    pub n2: Word96,
    pub n3: Option<Word96>,
    pub n1p: Option<Word96>,
    pub n2p: Option<Word96>,
    pub k1_star: Word96,
    pub k2_star: Word96,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    /// The tag could not reproduce C: the reader is not authenticated.
    #[error("submessage C does not verify")]
    CMismatch,
    /// Nonce recovery found several pairs that all reproduce C.
    #[error("{0} nonce candidates reproduce C")]
    Ambiguous(usize),
    /// The reader's local D differs from the received one.
    #[error("submessage D does not verify")]
    DMismatch,
}

/// What the reader keeps between sending `A || B || C` and receiving D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReaderPending {
    pub internals: Internals,
    pub(crate) expected_d: Word96,
    pub(crate) staged: KeyTuple,
}

impl ReaderPending {
    /// Checks D and releases the staged tuple. Consumes the pending state,
    /// so each session's verification happens once.
    pub fn finish(self, d: Word96) -> Result<KeyTuple, Rejection> {
        if d == self.expected_d {
            Ok(self.staged)
        } else {
            Err(Rejection::DMismatch)
        }
    }

    pub fn staged(&self) -> KeyTuple {
        self.staged
    }
}

/// A tag's accepted answer: D plus the tuple it installs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagReply {
    pub d: Word96,
    pub next: KeyTuple,
    pub internals: Internals,
}

pub fn reader_begin(
    protocol: Protocol,
    record: &KeyTuple,
    id: Word96,
    n1: Word96,
    n2: Word96,
) -> (Challenge, ReaderPending) {
    match protocol.gossamer_variant() {
        None => sasi::reader_begin(record, id, n1, n2),
        Some(v) => gossamer::reader_begin(record, id, n1, n2, v),
    }
}

pub fn tag_respond(
    protocol: Protocol,
    tuple: &KeyTuple,
    id: Word96,
    msg: &Challenge,
) -> Result<TagReply, Rejection> {
    match protocol.gossamer_variant() {
        None => sasi::tag_respond(tuple, id, msg),
        Some(v) => gossamer::tag_respond(tuple, id, msg, v),
    }
}
