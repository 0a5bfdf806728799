// SPDX-License-Identifier: Apache-2.0

//! Backend database of reader-side tag records.
//!
//! On disk a store is a single JSON document:
//!
//! ```json
//! { "format": "umap-store/1",
//!   "rows": [ { "tag_label": "tag-0000", "variant": "gossamer", "id": "…",
//!               "ids": "…", "k1": "…", "k2": "…",
//!               "ids_old": "…", "k1_old": "…", "k2_old": "…" } ] }
//! ```
//!
//! Rows are written in `tag_label` order and every word uses the canonical
//! 24-digit hex form, so saving the same store twice gives identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::protocol::Protocol;
use crate::state::{KeyTuple, Side, TagState};
use crate::word96::Word96;

pub const STORE_FORMAT: &str = "umap-store/1";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: unsupported store format {found:?}")]
    Format { path: PathBuf, found: String },
    #[error("duplicate tag label {0:?}")]
    DuplicateLabel(String),
    #[error("pseudonym {ids} already registered for {variant} by {label:?}")]
    DuplicateIds {
        ids: Word96,
        variant: Protocol,
        label: String,
    },
    #[error("no such tag {0:?}")]
    UnknownTag(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRecordRow {
    pub tag_label: String,
    pub variant: Protocol,
    pub id: Word96,
    pub ids: Word96,
    pub k1: Word96,
    pub k2: Word96,
    pub ids_old: Word96,
    pub k1_old: Word96,
    pub k2_old: Word96,
}

impl TagRecordRow {
    pub fn new(
        label: impl Into<String>,
        variant: Protocol,
        id: Word96,
        next: KeyTuple,
        old: KeyTuple,
    ) -> Self {
        TagRecordRow {
            tag_label: label.into(),
            variant,
            id,
            ids: next.ids,
            k1: next.k1,
            k2: next.k2,
            ids_old: old.ids,
            k1_old: old.k1,
            k2_old: old.k2,
        }
    }

    /// Row mirroring a tag's current memory.
    pub fn mirror(label: impl Into<String>, variant: Protocol, tag: &TagState) -> Self {
        TagRecordRow::new(label, variant, tag.id(), tag.next, tag.old)
    }

    pub fn next(&self) -> KeyTuple {
        KeyTuple::new(self.ids, self.k1, self.k2)
    }

    pub fn old(&self) -> KeyTuple {
        KeyTuple::new(self.ids_old, self.k1_old, self.k2_old)
    }

    pub fn tuple(&self, side: Side) -> KeyTuple {
        match side {
            Side::Next => self.next(),
            Side::Old => self.old(),
        }
    }

    pub fn set_tuple(&mut self, side: Side, t: KeyTuple) {
        match side {
            Side::Next => {
                self.ids = t.ids;
                self.k1 = t.k1;
                self.k2 = t.k2;
            }
            Side::Old => {
                self.ids_old = t.ids;
                self.k1_old = t.k1;
                self.k2_old = t.k2;
            }
        }
    }

    fn pseudonyms(&self) -> impl Iterator<Item = Word96> {
        let old = (self.ids_old != self.ids).then_some(self.ids_old);
        std::iter::once(self.ids).chain(old)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupHit<'a> {
    pub row: &'a TagRecordRow,
    pub side: Side,
    /// Number of further rows that also matched.
    pub collisions: usize,
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    format: String,
    rows: Vec<TagRecordRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Store {
    rows: BTreeMap<String, TagRecordRow>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &TagRecordRow> {
        self.rows.values()
    }

    pub fn get(&self, label: &str) -> Option<&TagRecordRow> {
        self.rows.get(label)
    }

    pub fn get_mut(&mut self, label: &str) -> Option<&mut TagRecordRow> {
        self.rows.get_mut(label)
    }

    fn check_unique(&self, row: &TagRecordRow) -> Result<(), StoreError> {
        for other in self.rows.values() {
            if other.tag_label == row.tag_label || other.variant != row.variant {
                continue;
            }
            for ids in row.pseudonyms() {
                if other.pseudonyms().any(|o| o == ids) {
                    return Err(StoreError::DuplicateIds {
                        ids,
                        variant: row.variant,
                        label: other.tag_label.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, row: TagRecordRow) -> Result<(), StoreError> {
        if self.rows.contains_key(&row.tag_label) {
            return Err(StoreError::DuplicateLabel(row.tag_label));
        }
        self.check_unique(&row)?;
        self.rows.insert(row.tag_label.clone(), row);
        Ok(())
    }

    /// Finds the record announcing `ids`. Next-tuple matches win over old
    /// ones; among equals the lowest label wins.
    pub fn lookup(&self, ids: Word96, variant: Protocol) -> Option<LookupHit<'_>> {
        let candidates = self.rows.values().filter(|r| r.variant == variant);
        let next: Vec<_> = candidates.clone().filter(|r| r.ids == ids).collect();
        let old: Vec<_> = candidates
            .filter(|r| r.ids != ids && r.ids_old == ids)
            .collect();
        let collisions = (next.len() + old.len()).saturating_sub(1);
        next.first()
            .map(|row| LookupHit {
                row,
                side: Side::Next,
                collisions,
            })
            .or_else(|| {
                old.first().map(|row| LookupHit {
                    row,
                    side: Side::Old,
                    collisions,
                })
            })
    }

    /// Records a completed session: the tuple used moves to the old slot and
    /// `next` is installed.
    pub fn commit(&mut self, label: &str, used: Side, next: KeyTuple) -> Result<(), StoreError> {
        let row = self
            .rows
            .get(label)
            .ok_or_else(|| StoreError::UnknownTag(label.to_owned()))?;
        let mut updated = row.clone();
        updated.set_tuple(Side::Old, row.tuple(used));
        updated.set_tuple(Side::Next, next);
        self.check_unique(&updated)?;
        self.rows.insert(label.to_owned(), updated);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = StoreFile {
            format: STORE_FORMAT.to_owned(),
            rows: self.rows.values().cloned().collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("store serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, StoreError> {
        let file: StoreFile = serde_json::from_str(text).map_err(|source| StoreError::Parse {
            path: path.to_owned(),
            source,
        })?;
        if file.format != STORE_FORMAT {
            return Err(StoreError::Format {
                path: path.to_owned(),
                found: file.format,
            });
        }
        let mut store = Store::new();
        for row in file.rows {
            store.insert(row)?;
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
            path: path.to_owned(),
            source,
        })?;
        Store::from_json(&text, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        write_atomic(path.as_ref(), self.to_json().as_bytes())
    }
}

/// Writes `bytes` next to `path` and renames over it.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_owned(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io_err)
}
