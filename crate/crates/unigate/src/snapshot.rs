//! Binary index snapshots.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "UGIX" | version u32 | dim u32 | depth u32 | set size u32
//! gate-set hash [u8; 32]
//! max_degree u32 | build_beam u32 | query_beam u32 | rerank u32 | seed u64
//! points u64
//! vectors: points * 2*dim^2 f32
//! entry u32 | levels: points u8 | layer-0 counts: points u32
//! layer-0 slots: points * 2*max_degree u32
//! per node, per upper layer: count u32, then count u32 ids
//! ```

use std::io::{self, Read, Write};

use sha2::{Digest, Sha256};
use unigate_core::index::GraphParts;
use unigate_core::{GateSet, IndexParams, NnIndex, ProductTable};

pub const MAGIC: [u8; 4] = *b"UGIX";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("snapshot io: {0}")]
    Io(#[from] io::Error),
    #[error("not an index snapshot (bad magic)")]
    BadMagic,
    #[error("snapshot version {found} is not supported (expected {VERSION})")]
    Version { found: u32 },
    #[error("snapshot does not match the request: {0}")]
    Mismatch(String),
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error("only approximate indexes are persisted")]
    NotPersistable,
}

impl SnapshotError {
    pub fn is_mismatch(&self) -> bool {
        matches!(self, SnapshotError::Mismatch(_) | SnapshotError::Version { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: u32,
    pub dim: u32,
    pub depth: u32,
    pub set_size: u32,
    pub set_hash: [u8; 32],
    pub params: IndexParams,
    pub points: u64,
}

/// SHA-256 over the variant matrices, entries as little-endian `f64` pairs.
pub fn gate_set_hash(gs: &GateSet) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((gs.len() as u32).to_le_bytes());
    for u in gs.variants() {
        for z in u.entries() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    h.finalize().into()
}

pub fn write(mut w: impl Write, gs: &GateSet, depth: usize, index: &NnIndex) -> Result<(), SnapshotError> {
    let graph = index.graph().ok_or(SnapshotError::NotPersistable)?;
    let parts = graph.to_parts();
    let p = index.params();
    w.write_all(&MAGIC)?;
    for v in [VERSION, index.dim() as u32, depth as u32, gs.len() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&gate_set_hash(gs))?;
    for v in [p.max_degree, p.build_beam, p.query_beam, p.rerank] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    w.write_all(&p.seed.to_le_bytes())?;
    w.write_all(&(index.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(index.coarse_vectors().len() * 4);
    for x in index.coarse_vectors() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.write_all(&parts.entry.to_le_bytes())?;
    w.write_all(&parts.levels)?;
    write_u32s(&mut w, &parts.layer0_counts)?;
    write_u32s(&mut w, &parts.layer0)?;
    for node in &parts.upper {
        for layer in node {
            w.write_all(&(layer.len() as u32).to_le_bytes())?;
            write_u32s(&mut w, layer)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_u32s(w: &mut impl Write, xs: &[u32]) -> io::Result<()> {
    let buf: Vec<u8> = xs.iter().flat_map(|x| x.to_le_bytes()).collect();
    w.write_all(&buf)
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const K: usize>(&mut self) -> Result<[u8; K], SnapshotError> {
        let mut b = [0u8; K];
        self.inner.read_exact(&mut b).map_err(truncated)?;
        Ok(b)
    }

    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64, SnapshotError> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn vec(&mut self, len: usize) -> Result<Vec<u8>, SnapshotError> {
        let mut out = Vec::new();
        (&mut self.inner).take(len as u64).read_to_end(&mut out)?;
        if out.len() != len {
            return Err(SnapshotError::Corrupt("unexpected end of file".into()));
        }
        Ok(out)
    }

    fn u32s(&mut self, len: usize) -> Result<Vec<u32>, SnapshotError> {
        Ok(self
            .vec(len.checked_mul(4).ok_or_else(|| too_large("array"))?)?
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
}

fn truncated(e: io::Error) -> SnapshotError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        SnapshotError::Corrupt("unexpected end of file".into())
    } else {
        SnapshotError::Io(e)
    }
}

fn too_large(what: &str) -> SnapshotError {
    SnapshotError::Corrupt(format!("{what} size overflows"))
}

pub fn read_header(r: impl Read) -> Result<Header, SnapshotError> {
    read_header_from(&mut Reader { inner: r })
}

fn read_header_from<R: Read>(r: &mut Reader<R>) -> Result<Header, SnapshotError> {
    if r.bytes::<4>()? != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(SnapshotError::Version { found: version });
    }
    let (dim, depth, set_size) = (r.u32()?, r.u32()?, r.u32()?);
    let set_hash = r.bytes::<32>()?;
    let (max_degree, build_beam, query_beam, rerank) = (r.u32()?, r.u32()?, r.u32()?, r.u32()?);
    let params = IndexParams {
        max_degree: max_degree as usize,
        build_beam: build_beam as usize,
        query_beam: query_beam as usize,
        rerank: rerank as usize,
        seed: r.u64()?,
    };
    Ok(Header {
        version,
        dim,
        depth,
        set_size,
        set_hash,
        params,
        points: r.u64()?,
    })
}

/// Reads a snapshot and attaches it to `table`, which must be the product
/// table of `gs` at the snapshot depth.
pub fn read(r: impl Read, gs: &GateSet, table: &ProductTable) -> Result<NnIndex, SnapshotError> {
    let mut r = Reader { inner: r };
    let h = read_header_from(&mut r)?;
    if h.set_hash != gate_set_hash(gs) {
        return Err(SnapshotError::Mismatch("gate set hash differs".into()));
    }
    if h.depth as usize != table.depth() || h.dim as usize != table.dim() || h.points != table.len() as u64 {
        return Err(SnapshotError::Mismatch(format!(
            "snapshot holds depth {} with {} points, requested depth {} with {} points",
            h.depth,
            h.points,
            table.depth(),
            table.len()
        )));
    }
    let n = h.points as usize;
    let stride = 2 * (h.dim as usize).pow(2);
    let coarse: Vec<f32> = r
        .vec(n.checked_mul(stride * 4).ok_or_else(|| too_large("vectors"))?)?
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let entry = r.u32()?;
    let levels = r.vec(n)?;
    let layer0_counts = r.u32s(n)?;
    let cap = 2 * h.params.max_degree;
    let layer0 = r.u32s(n.checked_mul(cap).ok_or_else(|| too_large("layer 0"))?)?;
    let mut upper = Vec::with_capacity(n);
    for &level in &levels {
        let mut node = Vec::with_capacity(level as usize);
        for _ in 0..level {
            let count = r.u32()? as usize;
            if count > h.params.max_degree {
                return Err(SnapshotError::Corrupt("upper-layer degree exceeds the bound".into()));
            }
            node.push(r.u32s(count)?);
        }
        upper.push(node);
    }
    let mut rest = [0u8; 1];
    if r.inner.read(&mut rest)? != 0 {
        return Err(SnapshotError::Corrupt("trailing bytes".into()));
    }
    let parts = GraphParts {
        max_degree: h.params.max_degree as u32,
        levels,
        layer0,
        layer0_counts,
        upper,
        entry,
    };
    NnIndex::with_graph(table, h.params, coarse, parts).map_err(|e| SnapshotError::Corrupt(e.to_string()))
}
