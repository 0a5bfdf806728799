// SPDX-License-Identifier: Apache-2.0

//! Session orchestration over an in-process, eavesdroppable channel.
//!
//! A session runs identification (next pseudonym, then one retry with the
//! old pseudonym), mutual authentication and updating. What crosses the
//! channel is recorded in a [`Transcript`]; every secret lives in the
//! matching [`GroundTruth`]. Forcing hooks pin nonces or keys, drop D, or
//! replay earlier messages.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::{AttackKind, AttackVerdict, Scanner};
use crate::cost;
use crate::protocol::{self, Challenge, Internals, Protocol};
use crate::state::{Attempt, KeyTuple, Side, TagState};
use crate::store::{write_atomic, Store, StoreError, TagRecordRow};
use crate::word96::Word96;

/// Deterministic 96-bit value source.
///
/// ChaCha20 seeded with the 64-bit seed through `seed_from_u64`, on stream
/// `stream`. Each word takes one `next_u64` for the low 64 bits and one
/// `next_u32` for the high 32 bits.
#[derive(Debug, Clone)]
pub struct NonceStream {
    rng: ChaCha20Rng,
}

/// Streams carved out of one campaign seed.
pub mod streams {
    pub const NONCES: u64 = 0;
    pub const PROVISION: u64 = 1;
    pub const FAULTS: u64 = 2;
}

const MAX_QUOTIENT_96: u128 = ((1u128 << 96) - 1) / 96;

impl NonceStream {
    pub fn new(seed: u64) -> Self {
        NonceStream::with_stream(seed, streams::NONCES)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NonceStream { rng }
    }

    pub fn next_word(&mut self) -> Word96 {
        let low = self.rng.next_u64();
        let high = self.rng.next_u32();
        Word96::from_parts(high, low)
    }

    /// Uniform over the multiples of 96 below 2^96.
    pub fn multiple_of_96(&mut self) -> Word96 {
        let q = self.rng.gen_range(0..=MAX_QUOTIENT_96);
        Word96::new(q * 96)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }
}

impl Iterator for NonceStream {
    type Item = Word96;
    fn next(&mut self) -> Option<Word96> {
        Some(self.next_word())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonceMode {
    #[default]
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "zero")]
    ExactZero,
    #[serde(rename = "zero-mod96")]
    ZeroMod96,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyMode {
    #[default]
    #[serde(rename = "stored")]
    AsStored,
    #[serde(rename = "zero")]
    ExactZero,
    #[serde(rename = "zero-mod96")]
    ZeroMod96,
}

/// Eavesdropped messages to be replayed to the tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayAbc {
    pub ids: Word96,
    pub challenge: Challenge,
}

impl ReplayAbc {
    pub fn from_transcript(t: &Transcript) -> Option<Self> {
        Some(ReplayAbc {
            ids: t.ids,
            challenge: Challenge {
                a: t.a?,
                b: t.b?,
                c: t.c?,
            },
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forcing {
    pub nonce_mode: NonceMode,
    pub key_mode: KeyMode,
    pub drop_d: bool,
    /// Play an old `A || B || C` to the tag instead of running the reader.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay_abc: Option<ReplayAbc>,
    /// Deliver this value to the reader in place of the tag's D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay_d: Option<Word96>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    MutualSuccess,
    /// The tag refused `A || B || C`; the reader was not authenticated.
    ReaderRejected,
    /// The reader refused D; the tag was not authenticated.
    TagRejected,
    /// The tag sent D but it never reached the reader.
    DDropped,
    /// Neither announced pseudonym is in the store.
    LookupFailed,
    /// The tag accepted a replayed `A || B || C` and answered the replayer.
    ReplayAbsorbed,
}

/// The eavesdropper's view of one session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub variant: Protocol,
    pub session: u64,
    /// The pseudonym the session proceeded with.
    pub ids: Word96,
    pub a: Option<Word96>,
    pub b: Option<Word96>,
    pub c: Option<Word96>,
    pub d: Option<Word96>,
    pub outcome: Outcome,
    pub bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuplePair {
    pub next: KeyTuple,
    pub old: KeyTuple,
}

impl TuplePair {
    fn of_tag(t: &TagState) -> Self {
        TuplePair {
            next: t.next,
            old: t.old,
        }
    }

    fn of_row(r: &TagRecordRow) -> Self {
        TuplePair {
            next: r.next(),
            old: r.old(),
        }
    }
}

/// Secrets behind one transcript, for scoring and invariant checks only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub session: u64,
    pub variant: Protocol,
    pub tag_label: String,
    pub id: Word96,
    /// Tuple the tag announced last (after any retry).
    pub announced: Side,
    pub identify_attempts: u8,
    pub tag_pre: TuplePair,
    pub tag_post: TuplePair,
    pub reader_pre: Option<TuplePair>,
    pub reader_post: Option<TuplePair>,
    /// As generated by the reader (or, for replays, as recovered by the tag).
    pub internals: Option<Internals>,
    pub forcing: Forcing,
    /// More than one store row matched the pseudonym.
    pub ids_collision: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionRecord {
    pub transcript: Transcript,
    pub truth: GroundTruth,
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// A simulated tag together with the label the harness knows it by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimTag {
    pub label: String,
    pub variant: Protocol,
    pub state: TagState,
}

pub fn provision_tag(label: impl Into<String>, variant: Protocol, rng: &mut NonceStream) -> SimTag {
    let id = rng.next_word();
    let tuple = KeyTuple::new(rng.next_word(), rng.next_word(), rng.next_word());
    SimTag {
        label: label.into(),
        variant,
        state: TagState::new(id, tuple),
    }
}

pub fn tag_label(index: usize) -> String {
    format!("tag-{index:04}")
}

/// `count` fresh tags and a store mirroring them.
pub fn provision(count: usize, variant: Protocol, seed: u64) -> Result<(Store, TagDeck), SimError> {
    let mut rng = NonceStream::with_stream(seed, streams::PROVISION);
    let mut store = Store::new();
    let mut deck = TagDeck::default();
    for i in 0..count {
        let tag = provision_tag(tag_label(i), variant, &mut rng);
        store.insert(TagRecordRow::mirror(&tag.label, variant, &tag.state))?;
        deck.tags.push(tag);
    }
    Ok((store, deck))
}

pub const TAGS_FORMAT: &str = "umap-tags/1";

/// Simulated tag memories, persisted next to the store.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagDeck {
    pub tags: Vec<SimTag>,
}

#[derive(Serialize, Deserialize)]
struct TagFile {
    format: String,
    tags: Vec<SimTag>,
}

impl TagDeck {
    pub fn get(&self, label: &str) -> Option<&SimTag> {
        self.tags.iter().find(|t| t.label == label)
    }

    pub fn get_mut(&mut self, label: &str) -> Option<&mut SimTag> {
        self.tags.iter_mut().find(|t| t.label == label)
    }

    pub fn to_json(&self) -> String {
        let file = TagFile {
            format: TAGS_FORMAT.to_owned(),
            tags: self.tags.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("tags serialize");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
            path: path.to_owned(),
            source,
        })?;
        let file: TagFile = serde_json::from_str(&text).map_err(|source| SimError::Parse {
            path: path.to_owned(),
            source,
        })?;
        if file.format != TAGS_FORMAT {
            return Err(StoreError::Format {
                path: path.to_owned(),
                found: file.format,
            }
            .into());
        }
        Ok(TagDeck { tags: file.tags })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SimError> {
        Ok(write_atomic(path.as_ref(), self.to_json().as_bytes())?)
    }
}

fn draw_nonce(mode: NonceMode, rng: &mut NonceStream) -> Word96 {
    match mode {
        NonceMode::Random => rng.next_word(),
        NonceMode::ExactZero => Word96::ZERO,
        NonceMode::ZeroMod96 => rng.multiple_of_96(),
    }
}

/// Overwrites the keys of every tuple on both sides that the tag could
/// announce, keeping the two sides consistent.
fn force_keys(tag: &mut SimTag, store: &mut Store, mode: KeyMode, rng: &mut NonceStream) {
    let (k1, k2) = match mode {
        KeyMode::AsStored => return,
        KeyMode::ExactZero => (Word96::ZERO, Word96::ZERO),
        KeyMode::ZeroMod96 => (rng.multiple_of_96(), rng.multiple_of_96()),
    };
    let mut row = store.get_mut(&tag.label);
    for side in [Side::Next, Side::Old] {
        let t = tag.state.tuple_mut(side);
        t.k1 = k1;
        t.k2 = k2;
        let ids = t.ids;
        if let Some(row) = row.as_deref_mut() {
            for rside in [Side::Next, Side::Old] {
                let mut rt = row.tuple(rside);
                if rt.ids == ids {
                    rt.k1 = k1;
                    rt.k2 = k2;
                    row.set_tuple(rside, rt);
                }
            }
        }
    }
}

/// Runs one session of `tag` against `store`.
pub fn run_session(
    tag: &mut SimTag,
    store: &mut Store,
    forcing: &Forcing,
    rng: &mut NonceStream,
    session: u64,
) -> Result<SessionRecord, SimError> {
    let variant = tag.variant;
    force_keys(tag, store, forcing.key_mode, rng);
    let tag_pre = TuplePair::of_tag(&tag.state);
    let reader_pre = store.get(&tag.label).map(TuplePair::of_row);

    let mut transcript = Transcript {
        variant,
        session,
        ids: Word96::ZERO,
        a: None,
        b: None,
        c: None,
        d: None,
        outcome: Outcome::LookupFailed,
        bits: 0,
    };
    let mut truth = GroundTruth {
        session,
        variant,
        tag_label: tag.label.clone(),
        id: tag.state.id(),
        announced: Side::Next,
        identify_attempts: 1,
        tag_pre,
        tag_post: tag_pre,
        reader_pre,
        reader_post: reader_pre,
        internals: None,
        forcing: forcing.clone(),
        ids_collision: false,
    };

    if let Some(replay) = &forcing.replay_abc {
        replay_challenge(tag, replay, &mut transcript, &mut truth);
        return Ok(SessionRecord { transcript, truth });
    }

    // Identification: next pseudonym, then one retry with the old one.
    let mut ids = tag.state.identify(Attempt::First);
    let mut hit = store
        .lookup(ids, variant)
        .map(|h| (h.row.clone(), h.side, h.collisions));
    if hit.is_none() {
        ids = tag.state.identify(Attempt::Retry);
        truth.identify_attempts = 2;
        hit = store
            .lookup(ids, variant)
            .map(|h| (h.row.clone(), h.side, h.collisions));
    }
    transcript.ids = ids;
    truth.announced = tag.state.last_announced;
    let Some((row, reader_side, collisions)) = hit else {
        transcript.bits = cost::session_bits(false, false);
        return Ok(SessionRecord { transcript, truth });
    };
    truth.ids_collision = collisions > 0;

    let n1 = draw_nonce(forcing.nonce_mode, rng);
    let n2 = draw_nonce(forcing.nonce_mode, rng);
    let (challenge, pending) =
        protocol::reader_begin(variant, &row.tuple(reader_side), row.id, n1, n2);
    truth.internals = Some(pending.internals);
    transcript.a = Some(challenge.a);
    transcript.b = Some(challenge.b);
    transcript.c = Some(challenge.c);

    let outcome =
        match protocol::tag_respond(variant, &tag.state.announced(), tag.state.id(), &challenge) {
            Err(_) => Outcome::ReaderRejected,
            Ok(reply) => {
                // The tag updates as soon as it has sent D.
                let used = tag.state.last_announced;
                tag.state.commit(used, reply.next);
                if forcing.drop_d {
                    Outcome::DDropped
                } else {
                    let delivered = forcing.replay_d.unwrap_or(reply.d);
                    transcript.d = Some(delivered);
                    match pending.finish(delivered) {
                        Ok(next) => {
                            store.commit(&row.tag_label, reader_side, next)?;
                            Outcome::MutualSuccess
                        }
                        Err(_) => Outcome::TagRejected,
                    }
                }
            }
        };
    transcript.outcome = outcome;
    transcript.bits = cost::session_bits(true, transcript.d.is_some());
    truth.tag_post = TuplePair::of_tag(&tag.state);
    truth.reader_post = store.get(&tag.label).map(TuplePair::of_row);
    Ok(SessionRecord { transcript, truth })
}

/// An eavesdropper posing as the reader replays `A || B || C`, asking for
/// the old pseudonym if the first announcement does not match.
fn replay_challenge(
    tag: &mut SimTag,
    replay: &ReplayAbc,
    transcript: &mut Transcript,
    truth: &mut GroundTruth,
) {
    let variant = tag.variant;
    let mut ids = tag.state.identify(Attempt::First);
    if ids != replay.ids {
        ids = tag.state.identify(Attempt::Retry);
        truth.identify_attempts = 2;
    }
    transcript.ids = ids;
    truth.announced = tag.state.last_announced;
    transcript.a = Some(replay.challenge.a);
    transcript.b = Some(replay.challenge.b);
    transcript.c = Some(replay.challenge.c);
    transcript.outcome = match protocol::tag_respond(
        variant,
        &tag.state.announced(),
        tag.state.id(),
        &replay.challenge,
    ) {
        Err(_) => Outcome::ReaderRejected,
        Ok(reply) => {
            let used = tag.state.last_announced;
            tag.state.commit(used, reply.next);
            transcript.d = Some(reply.d);
            truth.internals = Some(reply.internals);
            Outcome::ReplayAbsorbed
        }
    };
    transcript.bits = cost::session_bits(true, transcript.d.is_some());
    truth.tag_post = TuplePair::of_tag(&tag.state);
}

/// Checks a verdict against the secrets and records the result.
///
/// SASI succeeds when the disclosed residue equals `ID mod 96`; attack 1
/// when the recovered ID is exact; attack 2 when both the ID and the
/// predicted next pseudonym are exact.
pub fn score(verdict: &mut AttackVerdict, truth: &GroundTruth) {
    let hit = verdict.fired
        && match verdict.attack {
            AttackKind::Sasi => verdict.id_residue == Some(truth.id.mod96()),
            AttackKind::Gossamer1 => verdict.recovered_id == Some(truth.id),
            AttackKind::Gossamer2 => {
                verdict.recovered_id == Some(truth.id)
                    && verdict.recovered_state.map(|s| s.ids_next) == Some(truth.tag_post.next.ids)
            }
        };
    verdict.ground_truth_match = Some(hit);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub variant: Protocol,
    pub sessions: u64,
    pub seed: u64,
    pub forcing: Forcing,
    /// Probability of dropping D in each session, on top of `forcing.drop_d`.
    #[serde(default)]
    pub drop_rate: f64,
}

impl CampaignConfig {
    pub fn new(variant: Protocol, sessions: u64, seed: u64) -> Self {
        CampaignConfig {
            variant,
            sessions,
            seed,
            forcing: Forcing::default(),
            drop_rate: 0.0,
        }
    }

    pub fn nonces(mut self, mode: NonceMode) -> Self {
        self.forcing.nonce_mode = mode;
        self
    }

    pub fn keys(mut self, mode: KeyMode) -> Self {
        self.forcing.key_mode = mode;
        self
    }

    pub fn drop_rate(mut self, p: f64) -> Self {
        self.drop_rate = p;
        self
    }
}

/// Consecutive sessions of one tag. Yields one record per session.
#[derive(Debug, Clone)]
pub struct Campaign {
    config: CampaignConfig,
    tag: SimTag,
    store: Store,
    nonces: NonceStream,
    faults: NonceStream,
    index: u64,
}

impl Campaign {
    /// A campaign on a single fresh tag provisioned from the seed.
    pub fn new(config: CampaignConfig) -> Self {
        let mut prov = NonceStream::with_stream(config.seed, streams::PROVISION);
        let tag = provision_tag(tag_label(0), config.variant, &mut prov);
        let mut store = Store::new();
        store
            .insert(TagRecordRow::mirror(&tag.label, tag.variant, &tag.state))
            .expect("empty store accepts a row");
        Campaign::with_tag(config, tag, store)
    }

    pub fn with_tag(config: CampaignConfig, tag: SimTag, store: Store) -> Self {
        Campaign {
            nonces: NonceStream::with_stream(config.seed, streams::NONCES),
            faults: NonceStream::with_stream(config.seed, streams::FAULTS),
            config,
            tag,
            store,
            index: 0,
        }
    }

    pub fn config(&self) -> &CampaignConfig {
        &self.config
    }

    pub fn tag(&self) -> &SimTag {
        &self.tag
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn into_parts(self) -> (SimTag, Store) {
        (self.tag, self.store)
    }
}

impl Iterator for Campaign {
    type Item = Result<SessionRecord, SimError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.config.sessions {
            return None;
        }
        let mut forcing = self.config.forcing.clone();
        if self.config.drop_rate > 0.0 && self.faults.chance(self.config.drop_rate) {
            forcing.drop_d = true;
        }
        let session = self.index;
        self.index += 1;
        Some(run_session(
            &mut self.tag,
            &mut self.store,
            &forcing,
            &mut self.nonces,
            session,
        ))
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    [(centre - half).max(0.0), (centre + half).min(1.0)]
}

fn rate(k: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub attack: AttackKind,
    pub evaluated: u64,
    pub fired: u64,
    pub firing_rate: f64,
    pub firing_ci95: [f64; 2],
    pub scored: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub success_ci95: [f64; 2],
    /// Successes among fired verdicts.
    pub conditional_success_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_gap_histogram: Option<Vec<u64>>,
}

/// Running counts over a verdict stream.
#[derive(Debug, Clone)]
pub struct AttackTally {
    attack: AttackKind,
    evaluated: u64,
    fired: u64,
    scored: u64,
    successes: u64,
    gaps: Option<Vec<u64>>,
}

impl AttackTally {
    pub fn new(attack: AttackKind) -> Self {
        AttackTally {
            attack,
            evaluated: 0,
            fired: 0,
            scored: 0,
            successes: 0,
            gaps: (attack == AttackKind::Sasi).then(|| vec![0; 96]),
        }
    }

    pub fn add(&mut self, v: &AttackVerdict) {
        self.evaluated += 1;
        self.fired += v.fired as u64;
        if let Some(hit) = v.ground_truth_match {
            self.scored += 1;
            self.successes += hit as u64;
        }
        if let (Some(gaps), Some(g)) = (self.gaps.as_mut(), v.residue_gap) {
            gaps[g as usize] += 1;
        }
    }

    pub fn summary(&self) -> AttackSummary {
        AttackSummary {
            attack: self.attack,
            evaluated: self.evaluated,
            fired: self.fired,
            firing_rate: rate(self.fired, self.evaluated),
            firing_ci95: wilson_interval(self.fired, self.evaluated),
            scored: self.scored,
            successes: self.successes,
            success_rate: rate(self.successes, self.scored),
            success_ci95: wilson_interval(self.successes, self.scored),
            conditional_success_rate: rate(self.successes, self.fired),
            residue_gap_histogram: self.gaps.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub variant: Protocol,
    pub sessions: u64,
    pub outcomes: BTreeMap<Outcome, u64>,
    pub bits: u64,
    /// Mutual successes after which tag and reader next tuples differ.
    pub tuple_mismatches: u64,
    pub attacks: Vec<AttackSummary>,
}

/// Aggregates a record stream, running and scoring any attached attacks.
#[derive(Debug, Clone)]
pub struct CampaignStats {
    variant: Protocol,
    sessions: u64,
    outcomes: BTreeMap<Outcome, u64>,
    bits: u64,
    tuple_mismatches: u64,
    attacks: Vec<(Scanner, AttackTally)>,
    truths: BTreeMap<u64, GroundTruth>,
    keep_verdicts: bool,
    verdicts: Vec<AttackVerdict>,
}

impl CampaignStats {
    pub fn new(variant: Protocol, attacks: &[AttackKind]) -> Self {
        CampaignStats {
            variant,
            sessions: 0,
            outcomes: BTreeMap::new(),
            bits: 0,
            tuple_mismatches: 0,
            attacks: attacks
                .iter()
                .map(|&k| (Scanner::new(k), AttackTally::new(k)))
                .collect(),
            truths: BTreeMap::new(),
            keep_verdicts: false,
            verdicts: Vec::new(),
        }
    }

    /// Retain every scored verdict for later inspection.
    pub fn keep_verdicts(mut self) -> Self {
        self.keep_verdicts = true;
        self
    }

    pub fn observe(&mut self, transcript: &Transcript, truth: Option<&GroundTruth>) {
        self.sessions += 1;
        *self.outcomes.entry(transcript.outcome).or_default() += 1;
        self.bits += transcript.bits as u64;
        if let Some(gt) = truth {
            if transcript.outcome == Outcome::MutualSuccess
                && gt.reader_post.map(|r| r.next) != Some(gt.tag_post.next)
            {
                self.tuple_mismatches += 1;
            }
            self.truths.insert(transcript.session, gt.clone());
        }
        let mut produced = Vec::new();
        for (scanner, _) in &mut self.attacks {
            produced.extend(scanner.push(transcript));
        }
        self.absorb(produced);
        // Verdicts only ever look one session back.
        let keep_from = transcript.session.saturating_sub(1);
        self.truths.retain(|&s, _| s >= keep_from);
    }

    pub fn observe_record(&mut self, r: &SessionRecord) {
        self.observe(&r.transcript, Some(&r.truth));
    }

    fn absorb(&mut self, verdicts: Vec<AttackVerdict>) {
        for mut v in verdicts {
            if let Some(gt) = self.truths.get(&v.session) {
                score(&mut v, gt);
            }
            if let Some((_, tally)) = self.attacks.iter_mut().find(|(s, _)| s.kind() == v.attack) {
                tally.add(&v);
            }
            if self.keep_verdicts {
                self.verdicts.push(v);
            }
        }
    }

    pub fn finish(mut self) -> (CampaignSummary, Vec<AttackVerdict>) {
        let tail: Vec<_> = self
            .attacks
            .iter_mut()
            .filter_map(|(s, _)| s.finish())
            .collect();
        self.absorb(tail);
        let summary = CampaignSummary {
            variant: self.variant,
            sessions: self.sessions,
            outcomes: self.outcomes,
            bits: self.bits,
            tuple_mismatches: self.tuple_mismatches,
            attacks: self.attacks.iter().map(|(_, t)| t.summary()).collect(),
        };
        (summary, self.verdicts)
    }
}

/// Runs a campaign to completion, keeping every record.
pub fn run_campaign(config: CampaignConfig) -> Result<Vec<SessionRecord>, SimError> {
    Campaign::new(config).collect()
}
