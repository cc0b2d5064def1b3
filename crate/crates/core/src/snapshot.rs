//! Binary snapshots of a graph together with its label state.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "RSLPASNP" | version u32
//! section*: tag [u8; 4] | length u64 | payload | crc32(payload) u32
//! ```
//!
//! Sections appear in the order `HEAD`, `VERT`, `EDGE`, `LABL`, `RECV`.
//! `HEAD` holds seed, T and the vertex, edge and record counts. Receiver
//! records are stored as flat `(owner, t, tar, k)` quadruples of dense indices.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::{LabelState, Receiver, VertexLabels};

pub const MAGIC: &[u8; 8] = b"RSLPASNP";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub seed: u64,
    pub graph: Graph,
    pub state: LabelState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub version: u32,
    pub seed: u64,
    pub iterations: u32,
    pub vertices: u64,
    pub edges: u64,
    pub records: u64,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], payload: Writer) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(payload.0.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload.0);
    out.extend_from_slice(&crc32fast::hash(&payload.0).to_le_bytes());
}

pub fn encode_snapshot(snap: &Snapshot) -> Vec<u8> {
    let (g, s) = (&snap.graph, &snap.state);
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());

    let mut head = Writer(Vec::new());
    head.u64(snap.seed);
    head.u32(s.iterations);
    head.u64(g.vertex_count() as u64);
    head.u64(g.edge_count() as u64);
    head.u64(s.total_receivers() as u64);
    section(&mut out, b"HEAD", head);

    let mut vert = Writer(Vec::new());
    for &id in g.ids() {
        vert.u64(id);
    }
    section(&mut out, b"VERT", vert);

    let mut edge = Writer(Vec::new());
    for (a, b) in g.edge_indices() {
        edge.u32(a);
        edge.u32(b);
    }
    section(&mut out, b"EDGE", edge);

    let mut labl = Writer(Vec::new());
    for v in &s.vertices {
        labl.u32(v.labels.len() as u32);
        for x in v.labels.iter().chain(&v.src).chain(&v.pos) {
            labl.u32(*x);
        }
    }
    section(&mut out, b"LABL", labl);

    let mut recv = Writer(Vec::new());
    for (owner, v) in s.vertices.iter().enumerate() {
        for (t, list) in v.receivers.iter().enumerate() {
            for r in list {
                recv.u32(owner as u32);
                recv.u32(t as u32);
                recv.u32(r.tar);
                recv.u32(r.k);
            }
        }
    }
    section(&mut out, b"RECV", recv);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.at..end];
                self.at = end;
                Ok(s)
            }
            None => Err(format!("truncated {}", self.what)),
        }
    }
    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn done(&self) -> bool {
        self.at == self.buf.len()
    }
}

fn read_section<'a>(r: &mut Reader<'a>, tag: &[u8; 4]) -> std::result::Result<Reader<'a>, String> {
    let name = String::from_utf8_lossy(tag).into_owned();
    r.what = "section header";
    let found = r.take(4)?;
    if found != tag {
        return Err(format!("expected section {name}, found {:?}", String::from_utf8_lossy(found)));
    }
    let len = r.u64()?;
    let len = usize::try_from(len).map_err(|_| format!("section {name} is too large"))?;
    r.what = "section payload";
    let payload = r.take(len)?;
    r.what = "section checksum";
    let crc = r.u32()?;
    if crc32fast::hash(payload) != crc {
        return Err(format!("checksum mismatch in section {name}"));
    }
    Ok(Reader { buf: payload, at: 0, what: "section contents" })
}

fn decode_header(r: &mut Reader) -> std::result::Result<Header, String> {
    r.what = "file header";
    if r.take(8)? != MAGIC {
        return Err("not a snapshot file (bad magic)".into());
    }
    let version = r.u32()?;
    if version == 0 || version > VERSION {
        return Err(format!("unsupported snapshot version {version} (this build reads up to {VERSION})"));
    }
    let mut head = read_section(r, b"HEAD")?;
    let h = Header {
        version,
        seed: head.u64()?,
        iterations: head.u32()?,
        vertices: head.u64()?,
        edges: head.u64()?,
        records: head.u64()?,
    };
    if !head.done() {
        return Err("trailing bytes in section HEAD".into());
    }
    Ok(h)
}

/// Reads only the header of an encoded snapshot.
pub fn read_header(bytes: &[u8]) -> std::result::Result<Header, String> {
    decode_header(&mut Reader { buf: bytes, at: 0, what: "" })
}

fn decode(bytes: &[u8]) -> std::result::Result<Snapshot, String> {
    let mut r = Reader { buf: bytes, at: 0, what: "" };
    let h = decode_header(&mut r)?;
    let n = usize::try_from(h.vertices).map_err(|_| "vertex count overflows".to_string())?;

    let mut vert = read_section(&mut r, b"VERT")?;
    let mut ids = Vec::with_capacity(n.min(bytes.len() / 8));
    for _ in 0..n {
        ids.push(vert.u64()?);
    }
    if !vert.done() {
        return Err("trailing bytes in section VERT".into());
    }

    let mut edge = read_section(&mut r, b"EDGE")?;
    let mut edges = Vec::new();
    for _ in 0..h.edges {
        let (a, b) = (edge.u32()? as usize, edge.u32()? as usize);
        if a >= n || b >= n {
            return Err(format!("edge endpoint index {} out of range", a.max(b)));
        }
        edges.push((ids[a], ids[b]));
    }
    if !edge.done() {
        return Err("trailing bytes in section EDGE".into());
    }
    let graph = Graph::from_layout(ids.iter().copied(), edges).map_err(|e| e.to_string())?;

    let mut labl = read_section(&mut r, b"LABL")?;
    let mut vertices = Vec::with_capacity(n);
    for &id in &ids {
        let len = labl.u32()? as usize;
        if len == 0 || len > h.iterations as usize + 1 {
            return Err(format!("vertex {id} declares {len} labels"));
        }
        let mut read = |k: usize| -> std::result::Result<Vec<u32>, String> { (0..k).map(|_| labl.u32()).collect() };
        let labels = read(len)?;
        let src = read(len - 1)?;
        let pos = read(len - 1)?;
        if let Some(&bad) = labels.iter().chain(&src).find(|&&x| x as usize >= n) {
            return Err(format!("vertex index {bad} out of range in labels of {id}"));
        }
        vertices.push(VertexLabels { labels, src, pos, receivers: vec![Vec::new(); len] });
    }
    if !labl.done() {
        return Err("trailing bytes in section LABL".into());
    }

    let mut recv = read_section(&mut r, b"RECV")?;
    for _ in 0..h.records {
        let (owner, t, tar, k) = (recv.u32()?, recv.u32()?, recv.u32()?, recv.u32()?);
        let list = vertices
            .get_mut(owner as usize)
            .and_then(|v: &mut VertexLabels| v.receivers.get_mut(t as usize))
            .ok_or_else(|| format!("receiver record ({owner}, {t}) out of range"))?;
        list.push(Receiver { k, tar });
    }
    if !recv.done() {
        return Err("trailing bytes in section RECV".into());
    }
    if !r.done() {
        return Err("trailing bytes after the last section".into());
    }

    let state = LabelState {
        iterations: h.iterations,
        index: ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect(),
        ids,
        vertices,
    };
    state.check_invariants(&graph).map_err(|e| format!("corrupt state: {e}"))?;
    Ok(Snapshot { seed: h.seed, graph, state })
}

/// Decodes and fully re-validates a snapshot.
pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    decode(bytes).map_err(|message| Error::Snapshot { path: "<memory>".into(), message })
}

/// Writes atomically: the file appears complete or not at all.
pub fn save_snapshot(snap: &Snapshot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    snap.state.check_invariants(&snap.graph)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(&encode_snapshot(snap)).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|message| Error::Snapshot { path: path.to_path_buf(), message })
}
