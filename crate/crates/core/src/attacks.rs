// SPDX-License-Identifier: Apache-2.0

//! Passive adversaries.
//!
//! Each attack reads only [`Transcript`] values, which carry public
//! messages and nothing else. Scoring against secrets happens in the
//! simulator, which owns the ground truth.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gossamer::{self, Variant};
use crate::protocol::Protocol;
use crate::simulator::{Outcome, Transcript};
use crate::state::KeyTuple;
use crate::word96::{mixbits_original, Word96, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackKind {
    /// SASI mod-96 disclosure of ID.
    #[serde(rename = "sasi")]
    Sasi,
    /// Gossamer with nonces vanishing: `C − π = IDS_next − IDS`.
    #[serde(rename = "gossamer-1")]
    Gossamer1,
    /// Gossamer with keys vanishing: one-session full disclosure.
    #[serde(rename = "gossamer-2")]
    Gossamer2,
}

impl AttackKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::Sasi => "sasi",
            AttackKind::Gossamer1 => "gossamer-1",
            AttackKind::Gossamer2 => "gossamer-2",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown attack {0:?} (expected sasi, gossamer-1 or gossamer-2)")]
pub struct UnknownAttack(pub String);

impl FromStr for AttackKind {
    type Err = UnknownAttack;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sasi" => Ok(AttackKind::Sasi),
            "gossamer-1" => Ok(AttackKind::Gossamer1),
            "gossamer-2" => Ok(AttackKind::Gossamer2),
            other => Err(UnknownAttack(other.to_owned())),
        }
    }
}

/// Session secrets reconstructed by the key-vanishing attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveredState {
    pub k1_star: Word96,
    pub k2_star: Word96,
    pub n1: Word96,
    pub n2: Word96,
    pub n3: Word96,
    pub n1p: Word96,
    pub n2p: Word96,
    pub ids_next: Word96,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackVerdict {
    pub attack: AttackKind,
    pub variant: Protocol,
    pub session: u64,
    /// The detector condition held on the public messages.
    pub fired: bool,
    pub recovered_id: Option<Word96>,
    /// `ID mod 96` disclosed by the SASI attack.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id_residue: Option<u8>,
    /// SASI near-miss: `(C − ((A ⊕ IDS) + (B − IDS))) mod 96` on the residues.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residue_gap: Option<u8>,
    /// Second ID estimate, `D − IDS_next + IDS`, from the nonce-vanishing attack.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id_cross_check: Option<Word96>,
    /// `K1* + K2*` implied by the nonce-vanishing attack.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub key_sum: Option<Word96>,
    pub recovered_state: Option<RecoveredState>,
    /// Whether the predicted next pseudonym equals the next announcement,
    /// when the next session was observed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prediction_confirmed: Option<bool>,
    /// Filled in by the simulator's scoring, never by an attack.
    pub ground_truth_match: Option<bool>,
}

impl AttackVerdict {
    fn blank(attack: AttackKind, t: &Transcript) -> Self {
        AttackVerdict {
            attack,
            variant: t.variant,
            session: t.session,
            fired: false,
            recovered_id: None,
            id_residue: None,
            residue_gap: None,
            id_cross_check: None,
            key_sum: None,
            recovered_state: None,
            prediction_confirmed: None,
            ground_truth_match: None,
        }
    }
}

/// Public messages of a completed session.
struct Observed {
    ids: Word96,
    a: Word96,
    b: Word96,
    c: Word96,
    d: Option<Word96>,
}

fn observed(t: &Transcript) -> Option<Observed> {
    Some(Observed {
        ids: t.ids,
        a: t.a?,
        b: t.b?,
        c: t.c?,
        d: t.d,
    })
}

/// SASI: fires iff `C ≡ (A ⊕ IDS) + (B − IDS) (mod 96)`; then discloses
/// `ID ≡ IDS_next − IDS (mod 96)`.
pub fn sasi_attack(t: &Transcript, next_ids: Word96) -> AttackVerdict {
    let mut v = AttackVerdict::blank(AttackKind::Sasi, t);
    let Some(o) = observed(t) else { return v };
    let predicted = ((o.a ^ o.ids) + (o.b - o.ids)).mod96();
    let gap = (o.c.mod96() + 96 - predicted) % 96;
    v.residue_gap = Some(gap);
    v.fired = gap == 0;
    if v.fired {
        v.id_residue = Some((next_ids - o.ids).mod96());
    }
    v
}

/// Gossamer, nonce-vanishing regime: fires iff `C − π = IDS_next − IDS`;
/// then `ID = D − C + π`, cross-checked by `ID = D − IDS_next + IDS`.
pub fn gossamer_attack1(t: &Transcript, next_ids: Word96) -> AttackVerdict {
    let mut v = AttackVerdict::blank(AttackKind::Gossamer1, t);
    let Some(o) = observed(t) else { return v };
    let Some(d) = o.d else { return v };
    let key_sum = o.c - PI;
    v.fired = key_sum == next_ids - o.ids;
    if v.fired {
        let id = d - o.c + PI;
        let cross = d - next_ids + o.ids;
        v.key_sum = Some(key_sum);
        v.id_cross_check = Some(cross);
        v.recovered_id = (id == cross).then_some(id);
    }
    v
}

/// Gossamer, key-vanishing regime. Assumes `K1 = K2 = 0`, recovers the
/// nonces from A and B, and fires iff the recomputed C equals the observed
/// one. On firing, ID is peeled out of D and the next pseudonym is
/// predicted.
pub fn gossamer_attack2(t: &Transcript, next_ids: Option<Word96>) -> AttackVerdict {
    let mut v = AttackVerdict::blank(AttackKind::Gossamer2, t);
    let Some(o) = observed(t) else { return v };
    let Some(d) = o.d else { return v };

    let n1 = o.a - o.ids - PI;
    let n2 = o.b - o.ids - PI;
    let guess = KeyTuple::new(o.ids, Word96::ZERO, Word96::ZERO);
    // The attacker runs the original equations; C and the update do not
    // involve ID.
    let s = gossamer::session_values(&guess, Word96::ZERO, n1, n2, Variant::Original);
    v.fired = s.challenge.c == o.c;
    if !v.fired {
        return v;
    }
    let n3 = s.internals.n3.expect("gossamer derives n3");
    let n1p = s.internals.n1p.expect("gossamer derives n1'");
    let n2p = s.internals.n2p.expect("gossamer derives n2'");
    let (k1s, k2s) = (s.internals.k1_star, s.internals.k2_star);
    let id = ((d - n1p).rotr(n3) - k1s - n1p).rotr(n2) - n2 - k2s - n1p;
    v.recovered_id = Some(id);
    v.recovered_state = Some(RecoveredState {
        k1_star: k1s,
        k2_star: k2s,
        n1,
        n2,
        n3,
        n1p,
        n2p,
        ids_next: s.next.ids,
    });
    v.prediction_confirmed = next_ids.map(|n| n == s.next.ids);
    v
}

/// Feeds a transcript sequence of one tag to an attack, one session at a
/// time.
///
/// SASI and attack 1 need the pseudonym of the following session, so a
/// verdict for session `i` is emitted when session `i + 1` arrives, and
/// only if session `i` completed. Attack 2 works on a single session;
/// its last verdict comes out of [`Scanner::finish`].
#[derive(Debug, Clone)]
pub struct Scanner {
    kind: AttackKind,
    pending: Option<Transcript>,
}

impl Scanner {
    pub fn new(kind: AttackKind) -> Self {
        Scanner {
            kind,
            pending: None,
        }
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    pub fn push(&mut self, t: &Transcript) -> Option<AttackVerdict> {
        let prev = self.pending.replace(t.clone())?;
        if prev.outcome != Outcome::MutualSuccess {
            return None;
        }
        Some(match self.kind {
            AttackKind::Sasi => sasi_attack(&prev, t.ids),
            AttackKind::Gossamer1 => gossamer_attack1(&prev, t.ids),
            AttackKind::Gossamer2 => gossamer_attack2(&prev, Some(t.ids)),
        })
    }

    pub fn finish(&mut self) -> Option<AttackVerdict> {
        let last = self.pending.take()?;
        (self.kind == AttackKind::Gossamer2 && last.outcome == Outcome::MutualSuccess)
            .then(|| gossamer_attack2(&last, None))
    }

    /// Runs the scanner over a whole sequence.
    pub fn scan<'a>(
        kind: AttackKind,
        transcripts: impl IntoIterator<Item = &'a Transcript>,
    ) -> Vec<AttackVerdict> {
        let mut s = Scanner::new(kind);
        let mut out: Vec<_> = transcripts.into_iter().filter_map(|t| s.push(t)).collect();
        out.extend(s.finish());
        out
    }
}

/// Fraction of `trials` random pairs of multiples of 96 for which the
/// original MixBits output is again a multiple of 96.
pub fn mixbits_residue_rate(trials: u64, mut draw_multiple_of_96: impl FnMut() -> Word96) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let hits = (0..trials)
        .filter(|_| {
            let x = draw_multiple_of_96();
            let y = draw_multiple_of_96();
            mixbits_original(x, y).mod96() == 0
        })
        .count();
    hits as f64 / trials as f64
}
