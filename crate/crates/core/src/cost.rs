// SPDX-License-Identifier: Apache-2.0

//! Communication and storage accounting.

use serde::Serialize;

use crate::protocol::Protocol;
use crate::state::{REWRITABLE_BITS, STATIC_ID_BITS};
use crate::word96::BITS;

/// The hello message is five bytes.
pub const HELLO_BITS: u32 = 40;
pub const IDS_BITS: u32 = BITS;
pub const CHALLENGE_BITS: u32 = 3 * BITS;
pub const D_BITS: u32 = BITS;

/// hello + IDS + A||B||C: 424 bits.
pub const IDENTIFY_AND_CHALLENGE_BITS: u32 = HELLO_BITS + IDS_BITS + CHALLENGE_BITS;
/// The same plus D: 520 bits.
pub const FULL_SESSION_BITS: u32 = IDENTIFY_AND_CHALLENGE_BITS + D_BITS;

/// Bits on the channel for one session.
pub fn session_bits(challenge_sent: bool, d_sent: bool) -> u32 {
    let mut bits = HELLO_BITS + IDS_BITS;
    if challenge_sent {
        bits += CHALLENGE_BITS;
    }
    if d_sent {
        bits += D_BITS;
    }
    bits
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub variant: Protocol,
    pub hello_bits: u32,
    pub ids_bits: u32,
    pub abc_bits: u32,
    pub d_bits: u32,
    pub hello_ids_abc_bits: u32,
    pub full_session_bits: u32,
    pub rewritable_state_bits: u32,
    pub static_id_bits: u32,
    pub messages: u32,
    pub note: &'static str,
}

/// Costs are identical across the three protocols: four messages of the
/// same widths and two stored tuples.
pub fn cost_report(variant: Protocol) -> CostReport {
    CostReport {
        variant,
        hello_bits: HELLO_BITS,
        ids_bits: IDS_BITS,
        abc_bits: CHALLENGE_BITS,
        d_bits: D_BITS,
        hello_ids_abc_bits: IDENTIFY_AND_CHALLENGE_BITS,
        full_session_bits: FULL_SESSION_BITS,
        rewritable_state_bits: REWRITABLE_BITS,
        static_id_bits: STATIC_ID_BITS,
        messages: 4,
        note:
            "the commonly quoted 424-bit figure covers hello, IDS and A||B||C; adding D gives 520",
    }
}
