//! File formats.
//!
//! Edges: text lines `source<TAB>target<TAB>time` (`#` starts a comment
//! line), or a packed binary file of little-endian `u64` triples behind the
//! magic [`EDGE_MAGIC`].
//!
//! Walks: text, one walk per line of space-separated `node@time` entries
//! with `node@-` for an untimed start; or a binary file mirroring
//! [`WalkSet`]'s fixed stride behind [`WALK_MAGIC`].

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::edge_store::{EdgeStore, TemporalEdge};
use crate::walk::WalkSet;
use crate::{Timestamp, NO_TIME};

pub const EDGE_MAGIC: &[u8; 8] = b"TMPW0001";
pub const WALK_MAGIC: &[u8; 8] = b"TMPWALK1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a {0} file (bad magic header)")]
    BadMagic(&'static str),
    #[error("binary {0} file is truncated")]
    Truncated(&'static str),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// One walk with external node ids; `None` marks an untimed entry.
pub type ExternalWalk = Vec<(u64, Option<Timestamp>)>;

pub fn read_edges_text<R: BufRead>(reader: R) -> Result<Vec<TemporalEdge>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let mut next = |what: &str| -> Result<u64, FormatError> {
            let f = fields.next().ok_or_else(|| parse_err(no, format!("missing {what}")))?;
            f.trim()
                .parse::<u64>()
                .map_err(|e| parse_err(no, format!("bad {what} {f:?}: {e}")))
        };
        let (s, t, ts) = (next("source")?, next("target")?, next("timestamp")?);
        if ts == NO_TIME {
            return Err(parse_err(no, "timestamp u64::MAX is reserved"));
        }
        if fields.next().is_some() {
            return Err(parse_err(no, "expected exactly three tab-separated fields"));
        }
        out.push(TemporalEdge::new(s, t, ts));
    }
    Ok(out)
}

pub fn write_edges_text<W: Write>(mut w: W, edges: &[TemporalEdge]) -> io::Result<()> {
    for e in edges {
        writeln!(w, "{}\t{}\t{}", e.source, e.target, e.time)?;
    }
    w.flush()
}

pub fn read_edges_binary<R: Read>(mut r: R) -> Result<Vec<TemporalEdge>, FormatError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| FormatError::BadMagic("edge"))?;
    if &magic != EDGE_MAGIC {
        return Err(FormatError::BadMagic("edge"));
    }
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 24 != 0 {
        return Err(FormatError::Truncated("edge"));
    }
    let word = |b: &[u8]| u64::from_le_bytes(b.try_into().unwrap());
    let edges: Vec<TemporalEdge> = bytes
        .chunks_exact(24)
        .map(|c| TemporalEdge::new(word(&c[0..8]), word(&c[8..16]), word(&c[16..24])))
        .collect();
    if let Some(i) = edges.iter().position(|e| e.time == NO_TIME) {
        return Err(parse_err(i + 1, "timestamp u64::MAX is reserved"));
    }
    Ok(edges)
}

pub fn write_edges_binary<W: Write>(mut w: W, edges: &[TemporalEdge]) -> io::Result<()> {
    w.write_all(EDGE_MAGIC)?;
    for e in edges {
        w.write_all(&e.source.to_le_bytes())?;
        w.write_all(&e.target.to_le_bytes())?;
        w.write_all(&e.time.to_le_bytes())?;
    }
    w.flush()
}

/// Read an edge file, choosing the format from its first bytes.
pub fn read_edges_file(path: &Path) -> Result<Vec<TemporalEdge>, FormatError> {
    let mut r = BufReader::new(File::open(path)?);
    let head = r.fill_buf()?;
    if head.starts_with(EDGE_MAGIC) {
        read_edges_binary(r)
    } else {
        read_edges_text(r)
    }
}

fn fmt_time(t: Timestamp) -> String {
    if t == NO_TIME {
        "-".to_string()
    } else {
        t.to_string()
    }
}

/// Write walks as text using the store's external ids.
pub fn write_walks_text<W: Write>(mut w: W, store: &EdgeStore, walks: &WalkSet) -> io::Result<()> {
    let mut line = String::new();
    for (nodes, times) in walks.iter() {
        line.clear();
        for (k, (&v, &t)) in nodes.iter().zip(times).enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(&store.external_id(v).to_string());
            line.push('@');
            line.push_str(&fmt_time(t));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

pub fn read_walks_text<R: BufRead>(reader: R) -> Result<Vec<ExternalWalk>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let walk = line
            .split_whitespace()
            .map(|tok| {
                let (v, t) = tok
                    .split_once('@')
                    .ok_or_else(|| parse_err(no, format!("expected node@time, got {tok:?}")))?;
                let v = v
                    .parse::<u64>()
                    .map_err(|e| parse_err(no, format!("bad node {v:?}: {e}")))?;
                let t = match t {
                    "-" => None,
                    _ => Some(
                        t.parse::<u64>()
                            .map_err(|e| parse_err(no, format!("bad time {t:?}: {e}")))?,
                    ),
                };
                Ok((v, t))
            })
            .collect::<Result<ExternalWalk, FormatError>>()?;
        out.push(walk);
    }
    Ok(out)
}

/// Binary walk layout after the magic: `walk_count`, `stride`, then
/// `walk_count` lengths, `walk_count * stride` node ids and as many times,
/// all little-endian `u64`. Unused slots hold node 0 and [`NO_TIME`].
pub fn write_walks_binary<W: Write>(mut w: W, store: &EdgeStore, walks: &WalkSet) -> io::Result<()> {
    w.write_all(WALK_MAGIC)?;
    w.write_all(&(walks.len() as u64).to_le_bytes())?;
    w.write_all(&(walks.stride() as u64).to_le_bytes())?;
    for &l in walks.lengths() {
        w.write_all(&u64::from(l).to_le_bytes())?;
    }
    for i in 0..walks.len() {
        let len = walks.length(i);
        for k in 0..walks.stride() {
            let v = if k < len {
                store.external_id(walks.nodes(i)[k])
            } else {
                0
            };
            w.write_all(&v.to_le_bytes())?;
        }
    }
    for &t in walks.raw_times() {
        w.write_all(&t.to_le_bytes())?;
    }
    w.flush()
}

/// Read one or more concatenated binary walk blocks.
pub fn read_walks_binary<R: Read>(mut r: R) -> Result<Vec<ExternalWalk>, FormatError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut rest = bytes.as_slice();
    let mut out = Vec::new();
    loop {
        rest = read_walk_block(rest, &mut out)?;
        if rest.is_empty() {
            return Ok(out);
        }
    }
}

fn read_walk_block<'a>(bytes: &'a [u8], out: &mut Vec<ExternalWalk>) -> Result<&'a [u8], FormatError> {
    let body = bytes
        .strip_prefix(WALK_MAGIC.as_slice())
        .ok_or(FormatError::BadMagic("walk"))?;
    let mut words = body.chunks(8).map(|c| c.try_into().map(u64::from_le_bytes));
    let mut next =
        || -> Result<u64, FormatError> { words.next().and_then(Result::ok).ok_or(FormatError::Truncated("walk")) };
    let (count, stride) = (next()? as usize, next()? as usize);
    let total = count
        .checked_mul(stride)
        .and_then(|s| s.checked_mul(2))
        .and_then(|s| s.checked_add(count + 2))
        .and_then(|w| w.checked_mul(8))
        .filter(|&b| b <= body.len())
        .ok_or(FormatError::Truncated("walk"))?;
    let word = |i: usize| u64::from_le_bytes(body[8 * i..8 * i + 8].try_into().unwrap());
    let (lengths, nodes, times) = (2, 2 + count, 2 + count + count * stride);
    for i in 0..count {
        let len = word(lengths + i) as usize;
        if len > stride {
            return Err(parse_err(out.len() + 1, "walk length exceeds stride"));
        }
        let base = i * stride;
        out.push(
            (0..len)
                .map(|k| {
                    let t = word(times + base + k);
                    (word(nodes + base + k), (t != NO_TIME).then_some(t))
                })
                .collect(),
        );
    }
    Ok(&body[total..])
}

/// Read a walk file, choosing the format from its first bytes.
pub fn read_walks_file(path: &Path) -> Result<Vec<ExternalWalk>, FormatError> {
    let mut r = BufReader::new(File::open(path)?);
    let head = r.fill_buf()?;
    if head.starts_with(WALK_MAGIC) {
        read_walks_binary(r)
    } else {
        read_walks_text(r)
    }
}

pub fn create_buffered(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(|f| BufWriter::with_capacity(1 << 20, f))
}
