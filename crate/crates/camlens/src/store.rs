//! Capture persistence: an append-only newline-delimited JSON log plus one
//! image file per capture, both under a data directory. The in-memory index
//! is rebuilt by replaying the log on open.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::RwLock;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::codec::ImageFormat;
use crate::error::{Error, Result};
use crate::pipeline::{GridDims, PredictionJson};

pub const LOG_FILE: &str = "captures.ndjson";
pub const IMAGE_DIR: &str = "images";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Impressive,
    Funny,
    Puzzling,
    None,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Impressive => "impressive",
            Tag::Funny => "funny",
            Tag::Puzzling => "puzzling",
            Tag::None => "none",
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tag> {
        match s {
            "impressive" => Ok(Tag::Impressive),
            "funny" => Ok(Tag::Funny),
            "puzzling" => Ok(Tag::Puzzling),
            "none" => Ok(Tag::None),
            other => Err(Error::UnknownTag(other.to_owned())),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub image_ref: String,
    pub grid: GridDims,
    pub predictions: Vec<PredictionJson>,
    /// Normalized CAM grids aligned 1:1 with `predictions`.
    pub cam_grids: Vec<Vec<f32>>,
    /// Full class distribution, kept for comparisons on any class.
    pub probabilities: Vec<f32>,
    pub tag: Tag,
    pub note: String,
}

/// Listing row without the heavy grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureSummary {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub image_ref: String,
    pub predictions: Vec<PredictionJson>,
    pub tag: Tag,
    pub note: String,
}

impl From<&CaptureRecord> for CaptureSummary {
    fn from(r: &CaptureRecord) -> Self {
        CaptureSummary {
            id: r.id.clone(),
            created_at: r.created_at,
            image_ref: r.image_ref.clone(),
            predictions: r.predictions.clone(),
            tag: r.tag,
            note: r.note.clone(),
        }
    }
}

/// What a new capture needs besides its id and timestamp.
pub struct NewCapture<'a> {
    pub image: &'a [u8],
    pub format: ImageFormat,
    pub grid: GridDims,
    pub predictions: Vec<PredictionJson>,
    pub cam_grids: Vec<Vec<f32>>,
    pub probabilities: Vec<f32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum LogEntry {
    Capture {
        record: CaptureRecord,
    },
    Tag {
        id: String,
        tag: Tag,
        note: String,
        at: DateTime<Utc>,
    },
}

struct Inner {
    records: HashMap<String, CaptureRecord>,
    next_seq: u64,
    log: File,
}

/// Single-writer capture store. Mutations hold the write lock for the
/// duration of the append, so log order equals application order.
pub struct CaptureStore {
    dir: PathBuf,
    inner: RwLock<Inner>,
}

impl CaptureStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<CaptureStore> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join(IMAGE_DIR))?;
        let path = dir.join(LOG_FILE);
        let mut records = HashMap::new();
        let mut next_seq = 1;
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            let mut good_end = 0;
            let mut offset = 0;
            for (n, line) in text.split_inclusive('\n').enumerate() {
                offset += line.len();
                if line.trim().is_empty() {
                    good_end = offset;
                    continue;
                }
                let entry: LogEntry = match serde_json::from_str(line) {
                    Ok(e) => e,
                    // a torn final append is dropped, anything earlier is corruption
                    Err(_) if offset == text.len() && !line.ends_with('\n') => {
                        tracing::warn!("dropping incomplete final log line {}", n + 1);
                        break;
                    }
                    Err(e) => {
                        return Err(Error::Store(format!(
                            "{}: line {}: {e}",
                            path.display(),
                            n + 1
                        )))
                    }
                };
                apply(&mut records, &mut next_seq, entry)?;
                good_end = offset;
            }
            if good_end < text.len() {
                OpenOptions::new()
                    .write(true)
                    .open(&path)?
                    .set_len(good_end as u64)?;
            }
        }
        let log = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(CaptureStore {
            dir,
            inner: RwLock::new(Inner {
                records,
                next_seq,
                log,
            }),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn insert(&self, capture: NewCapture<'_>) -> Result<CaptureRecord> {
        let mut inner = self.inner.write().expect("store lock");
        let id = format!("cap-{:06}", inner.next_seq);
        let image_ref = format!("{id}.{}", capture.format.extension());
        let image_path = self.dir.join(IMAGE_DIR).join(&image_ref);
        fs::write(&image_path, capture.image)?;
        File::open(&image_path)?.sync_all()?;

        let record = CaptureRecord {
            id: id.clone(),
            created_at: Utc::now(),
            image_ref,
            grid: capture.grid,
            predictions: capture.predictions,
            cam_grids: capture.cam_grids,
            probabilities: capture.probabilities,
            tag: Tag::None,
            note: String::new(),
        };
        append(
            &mut inner.log,
            &LogEntry::Capture {
                record: record.clone(),
            },
        )?;
        inner.next_seq += 1;
        inner.records.insert(id, record.clone());
        Ok(record)
    }

    pub fn tag(&self, id: &str, tag: Tag, note: &str) -> Result<CaptureRecord> {
        let mut inner = self.inner.write().expect("store lock");
        if !inner.records.contains_key(id) {
            return Err(Error::UnknownCapture(id.to_owned()));
        }
        append(
            &mut inner.log,
            &LogEntry::Tag {
                id: id.to_owned(),
                tag,
                note: note.to_owned(),
                at: Utc::now(),
            },
        )?;
        let record = inner.records.get_mut(id).expect("checked above");
        record.tag = tag;
        record.note = note.to_owned();
        Ok(record.clone())
    }

    pub fn get(&self, id: &str) -> Result<CaptureRecord> {
        self.inner
            .read()
            .expect("store lock")
            .records
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownCapture(id.to_owned()))
    }

    /// Newest first: `created_at` descending, then id descending.
    pub fn list(&self, tag: Option<Tag>) -> Vec<CaptureSummary> {
        let inner = self.inner.read().expect("store lock");
        let mut rows: Vec<&CaptureRecord> = inner
            .records
            .values()
            .filter(|r| tag.is_none_or(|t| r.tag == t))
            .collect();
        rows.sort_by(|a, b| {
            b.created_at
                .cmp(&a.created_at)
                .then_with(|| b.id.cmp(&a.id))
        });
        rows.into_iter().map(CaptureSummary::from).collect()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("store lock").records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn image_path(&self, record: &CaptureRecord) -> PathBuf {
        self.dir.join(IMAGE_DIR).join(&record.image_ref)
    }
}

fn apply(
    records: &mut HashMap<String, CaptureRecord>,
    next_seq: &mut u64,
    entry: LogEntry,
) -> Result<()> {
    match entry {
        LogEntry::Capture { record } => {
            if let Some(seq) = record
                .id
                .strip_prefix("cap-")
                .and_then(|s| s.parse::<u64>().ok())
            {
                *next_seq = (*next_seq).max(seq + 1);
            }
            records.insert(record.id.clone(), record);
        }
        LogEntry::Tag { id, tag, note, .. } => {
            let record = records
                .get_mut(&id)
                .ok_or_else(|| Error::Store(format!("tag entry for unknown capture `{id}`")))?;
            record.tag = tag;
            record.note = note;
        }
    }
    Ok(())
}

fn append(log: &mut File, entry: &LogEntry) -> Result<()> {
    let mut line = serde_json::to_vec(entry).map_err(|e| Error::Store(e.to_string()))?;
    line.push(b'\n');
    log.write_all(&line)?;
    log.sync_data()?;
    Ok(())
}
