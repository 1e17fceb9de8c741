//! Versioned binary containers for built oracles.
//!
//! All containers share one framing. Integers are little-endian; `f64` is
//! its IEEE-754 bit pattern, little-endian. Layout:
//!
//! ```text
//! magic   b"VCNO"
//! version u16 (currently 1)
//! kind    u8  (1 tz, 2 stretch2, 3 mult, 4 additive)
//! flags   u8  (kind-specific: stored-variant bit, additive mode bit)
//! body    kind-specific sections, see below
//! ```
//!
//! Thorup-Zwick body: `u32 n`, `u32 k`, `u64 seed`, then `k` level bitmaps of
//! `ceil(n/8)` bytes (bit `v` set when node `v` is in the level), then `k`
//! witness arrays of `n` entries `(u32 witness, f64 dist)`, then the bunch
//! CSR: `n+1` `u64` offsets followed by the entries `(u32 node, f64 dist,
//! u32 next_hop)`.
//!
//! The stretch-2 body holds the graph (`u32 n`, `u64 m`, edge triples
//! `(u32, u32, f64)`), the landmark section (sampling mode, seed, member
//! list), one distance row per landmark (`f64 dist, u32 parent` per node)
//! and, when the stored-variant flag is set, every node's ball and vicinity
//! tables. The stretch-(4k-1) body embeds the sub-oracle blob in place of
//! the rows; the additive body stores nearest-landmark records, balls, and
//! the mode's tail structure. Derived state (nearest landmarks, leg tables,
//! size audits) is rebuilt deterministically on load.

use std::path::Path;

use thiserror::Error;
use vicinity::additive::{AdditiveMode, AdditiveOracle};
use vicinity::graph::{DistanceTable, Graph, NodeId, INVALID_NODE};
use vicinity::landmark::{
    BallEntry, BallInfo, LandmarkMode, LandmarkSet, NearestLandmark, VicinityEntry, VicinityInfo,
    VicinityStore,
};
use vicinity::mult::MultOracle;
use vicinity::stretch2::Stretch2Oracle;
use vicinity::tz::{BunchEntry, TzOracle, WitnessEntry};

const MAGIC: &[u8; 4] = b"VCNO";
const VERSION: u16 = 1;

const KIND_TZ: u8 = 1;
const KIND_STRETCH2: u8 = 2;
const KIND_MULT: u8 = 3;
const KIND_ADDITIVE: u8 = 4;

const FLAG_STORED: u8 = 0b0000_0001;
const FLAG_FOURK: u8 = 0b0000_0010;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("not an oracle container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    BadVersion(u16),
    #[error("unknown container kind {0}")]
    BadKind(u8),
    #[error("container truncated or corrupt: {0}")]
    Corrupt(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Any loadable oracle.
pub enum OracleContainer {
    Tz(TzOracle),
    Stretch2(Stretch2Oracle),
    Mult(MultOracle),
    Additive(AdditiveOracle),
}

impl OracleContainer {
    pub fn kind_name(&self) -> &'static str {
        match self {
            OracleContainer::Tz(_) => "tz",
            OracleContainer::Stretch2(_) => "stretch2",
            OracleContainer::Mult(_) => "mult",
            OracleContainer::Additive(_) => "additive",
        }
    }
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new(kind: u8, flags: u8) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.push(kind);
        buf.push(flags);
        Writer { buf }
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], ContainerError> {
        if self.pos + len > self.buf.len() {
            return Err(ContainerError::Corrupt("unexpected end of data"));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ContainerError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ContainerError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ContainerError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, ContainerError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self, what: &'static str) -> Result<usize, ContainerError> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| ContainerError::Corrupt(what))
    }

    fn done(&self) -> Result<(), ContainerError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(ContainerError::Corrupt("trailing bytes"))
        }
    }
}

fn write_graph(w: &mut Writer, g: &Graph) {
    w.u32(g.node_count() as u32);
    w.u64(g.edge_count() as u64);
    for &(u, v, wt) in g.edges() {
        w.u32(u);
        w.u32(v);
        w.f64(wt);
    }
}

fn read_graph(r: &mut Reader) -> Result<Graph, ContainerError> {
    let n = r.u32()? as usize;
    let m = r.len("edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let u = r.u32()?;
        let v = r.u32()?;
        let wt = r.f64()?;
        edges.push((u, v, wt));
    }
    Graph::from_edges(n, edges).map_err(|_| ContainerError::Corrupt("invalid graph section"))
}

fn write_landmarks(w: &mut Writer, l: &LandmarkSet) {
    match &l.mode {
        LandmarkMode::Uniform { alpha } => {
            w.u8(0);
            w.f64(*alpha);
        }
        LandmarkMode::DegreeProportional { alpha, delta } => {
            w.u8(1);
            w.f64(*alpha);
            w.f64(delta.unwrap_or(f64::NAN));
        }
        LandmarkMode::PaperEvalUniform { alpha } => {
            w.u8(2);
            w.f64(*alpha);
        }
        LandmarkMode::PaperEvalDegree { alpha } => {
            w.u8(3);
            w.f64(*alpha);
        }
        LandmarkMode::Forced(_) => w.u8(4),
    }
    w.u64(l.seed);
    w.u64(l.members().len() as u64);
    for &v in l.members() {
        w.u32(v);
    }
}

fn read_landmarks(r: &mut Reader, n: usize) -> Result<LandmarkSet, ContainerError> {
    let tag = r.u8()?;
    let mode = match tag {
        0 => LandmarkMode::Uniform { alpha: r.f64()? },
        1 => {
            let alpha = r.f64()?;
            let delta = r.f64()?;
            LandmarkMode::DegreeProportional {
                alpha,
                delta: if delta.is_nan() { None } else { Some(delta) },
            }
        }
        2 => LandmarkMode::PaperEvalUniform { alpha: r.f64()? },
        3 => LandmarkMode::PaperEvalDegree { alpha: r.f64()? },
        4 => LandmarkMode::Forced(Vec::new()),
        _ => return Err(ContainerError::Corrupt("bad landmark mode tag")),
    };
    let seed = r.u64()?;
    let len = r.len("landmark count")?;
    let mut members = Vec::with_capacity(len);
    for _ in 0..len {
        members.push(r.u32()?);
    }
    let mode = if tag == 4 { LandmarkMode::Forced(members.clone()) } else { mode };
    LandmarkSet::from_parts(n, members, mode, seed)
        .map_err(|_| ContainerError::Corrupt("invalid landmark section"))
}

fn write_row(w: &mut Writer, t: &DistanceTable) {
    w.u32(t.source);
    w.u32(t.distances().len() as u32);
    for (d, p) in t.distances().iter().zip(t.parents()) {
        w.f64(*d);
        w.u32(*p);
    }
}

fn read_row(r: &mut Reader) -> Result<DistanceTable, ContainerError> {
    let source = r.u32()?;
    let n = r.u32()? as usize;
    let mut dist = Vec::with_capacity(n);
    let mut parent = Vec::with_capacity(n);
    for _ in 0..n {
        dist.push(r.f64()?);
        parent.push(r.u32()?);
    }
    Ok(DistanceTable::from_parts(source, dist, parent))
}

fn write_ball(w: &mut Writer, b: &BallInfo) {
    w.u32(b.node);
    w.u32(b.landmark);
    w.f64(b.radius);
    w.u32(b.len() as u32);
    for e in b.entries() {
        w.u32(e.node);
        w.f64(e.dist);
        w.u32(e.first_hop);
        w.u32(e.parent);
    }
}

fn read_ball(r: &mut Reader) -> Result<BallInfo, ContainerError> {
    let node = r.u32()?;
    let landmark = r.u32()?;
    let radius = r.f64()?;
    let len = r.u32()? as usize;
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        entries.push(BallEntry {
            node: r.u32()?,
            dist: r.f64()?,
            first_hop: r.u32()?,
            parent: r.u32()?,
        });
    }
    Ok(BallInfo::from_parts(node, landmark, radius, entries))
}

fn write_vicinity(w: &mut Writer, v: &VicinityInfo) {
    w.u32(v.node);
    w.u32(v.len() as u32);
    for e in v.entries() {
        w.u32(e.node);
        w.f64(e.dist);
        w.u32(e.first_hop);
    }
    w.u32(v.support().len() as u32);
    for &(node, parent) in v.support() {
        w.u32(node);
        w.u32(parent);
    }
}

fn read_vicinity(r: &mut Reader) -> Result<VicinityInfo, ContainerError> {
    let node = r.u32()?;
    let len = r.u32()? as usize;
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        entries.push(VicinityEntry { node: r.u32()?, dist: r.f64()?, first_hop: r.u32()? });
    }
    let slen = r.u32()? as usize;
    let mut support = Vec::with_capacity(slen);
    for _ in 0..slen {
        support.push((r.u32()?, r.u32()?));
    }
    Ok(VicinityInfo::from_parts(node, entries, support))
}

fn write_store(w: &mut Writer, s: &VicinityStore) {
    w.u32(s.balls.len() as u32);
    for (b, v) in s.balls.iter().zip(&s.vicinities) {
        write_ball(w, b);
        write_vicinity(w, v);
    }
}

fn read_store(r: &mut Reader) -> Result<VicinityStore, ContainerError> {
    let n = r.u32()? as usize;
    let mut balls = Vec::with_capacity(n);
    let mut vicinities = Vec::with_capacity(n);
    for _ in 0..n {
        balls.push(read_ball(r)?);
        vicinities.push(read_vicinity(r)?);
    }
    Ok(VicinityStore { balls, vicinities })
}

fn write_tz_body(w: &mut Writer, o: &TzOracle) {
    let n = o.node_count();
    w.u32(n as u32);
    w.u32(o.k());
    w.u64(o.seed());
    for level in o.levels() {
        let mut bitmap = vec![0u8; n.div_ceil(8)];
        for &v in level {
            bitmap[v as usize / 8] |= 1 << (v as usize % 8);
        }
        w.buf.extend_from_slice(&bitmap);
    }
    for i in 0..o.k() {
        for e in o.witness_level(i) {
            w.u32(e.witness);
            w.f64(e.dist);
        }
    }
    for &off in o.bunch_offsets() {
        w.u64(off as u64);
    }
    for e in o.bunch_entries_flat() {
        w.u32(e.node);
        w.f64(e.dist);
        w.u32(e.next_hop);
    }
}

fn read_tz_body(r: &mut Reader) -> Result<TzOracle, ContainerError> {
    let n = r.u32()? as usize;
    let k = r.u32()?;
    if k == 0 {
        return Err(ContainerError::Corrupt("k must be positive"));
    }
    let seed = r.u64()?;
    let mut levels = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let bitmap = r.take(n.div_ceil(8))?;
        let level: Vec<NodeId> = (0..n)
            .filter(|&v| bitmap[v / 8] & (1 << (v % 8)) != 0)
            .map(|v| v as NodeId)
            .collect();
        levels.push(level);
    }
    let mut witnesses = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let mut level = Vec::with_capacity(n);
        for _ in 0..n {
            level.push(WitnessEntry { witness: r.u32()?, dist: r.f64()? });
        }
        witnesses.push(level);
    }
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(r.len("bunch offset")?);
    }
    let total = *offsets.last().unwrap();
    let mut entries = Vec::with_capacity(total);
    for _ in 0..total {
        entries.push(BunchEntry { node: r.u32()?, dist: r.f64()?, next_hop: r.u32()? });
    }
    Ok(TzOracle::from_parts(k, n, seed, levels, witnesses, offsets, entries))
}

pub fn encode_tz(o: &TzOracle) -> Vec<u8> {
    let mut w = Writer::new(KIND_TZ, 0);
    write_tz_body(&mut w, o);
    w.buf
}

pub fn encode_stretch2(o: &Stretch2Oracle) -> Vec<u8> {
    let flags = if o.store().is_some() { FLAG_STORED } else { 0 };
    let mut w = Writer::new(KIND_STRETCH2, flags);
    write_graph(&mut w, o.graph());
    write_landmarks(&mut w, o.landmarks());
    for row in o.rows() {
        write_row(&mut w, row);
    }
    if let Some(store) = o.store() {
        write_store(&mut w, store);
    }
    w.buf
}

pub fn encode_mult(o: &MultOracle) -> Vec<u8> {
    let flags = if o.store().is_some() { FLAG_STORED } else { 0 };
    let mut w = Writer::new(KIND_MULT, flags);
    write_graph(&mut w, o.graph());
    write_landmarks(&mut w, o.landmarks());
    write_tz_body(&mut w, o.sub_oracle());
    if let Some(store) = o.store() {
        write_store(&mut w, store);
    }
    w.buf
}

pub fn encode_additive(o: &AdditiveOracle) -> Vec<u8> {
    let flags = match o.mode() {
        AdditiveMode::TwoPlus => 0,
        AdditiveMode::FourKPlus { .. } => FLAG_FOURK,
    };
    let mut w = Writer::new(KIND_ADDITIVE, flags);
    let n = o.nearest_all().len();
    w.u32(n as u32);
    write_landmarks(&mut w, o.landmarks());
    for rec in o.nearest_all() {
        w.u32(rec.landmark);
        w.f64(rec.radius);
    }
    for b in o.balls() {
        write_ball(&mut w, b);
    }
    match o.mode() {
        AdditiveMode::TwoPlus => {
            for row in o.rows().expect("two-plus keeps rows") {
                write_row(&mut w, row);
            }
        }
        AdditiveMode::FourKPlus { .. } => {
            write_tz_body(&mut w, o.sub_oracle().expect("four-k keeps the sub-oracle"));
        }
    }
    w.buf
}

pub fn decode(bytes: &[u8]) -> Result<OracleContainer, ContainerError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(ContainerError::BadVersion(version));
    }
    let kind = r.u8()?;
    let flags = r.u8()?;
    let oracle = match kind {
        KIND_TZ => OracleContainer::Tz(read_tz_body(&mut r)?),
        KIND_STRETCH2 => {
            let g = read_graph(&mut r)?;
            let landmarks = read_landmarks(&mut r, g.node_count())?;
            let mut rows = Vec::with_capacity(landmarks.len());
            for _ in 0..landmarks.len() {
                rows.push(read_row(&mut r)?);
            }
            let store = if flags & FLAG_STORED != 0 { Some(read_store(&mut r)?) } else { None };
            OracleContainer::Stretch2(Stretch2Oracle::from_parts(g, landmarks, rows, store))
        }
        KIND_MULT => {
            let g = read_graph(&mut r)?;
            let landmarks = read_landmarks(&mut r, g.node_count())?;
            let sub = read_tz_body(&mut r)?;
            let store = if flags & FLAG_STORED != 0 { Some(read_store(&mut r)?) } else { None };
            OracleContainer::Mult(MultOracle::from_parts(g, landmarks, sub, store))
        }
        KIND_ADDITIVE => {
            let n = r.u32()? as usize;
            let landmarks = read_landmarks(&mut r, n)?;
            let mut nearest = Vec::with_capacity(n);
            for _ in 0..n {
                nearest.push(NearestLandmark { landmark: r.u32()?, radius: r.f64()? });
            }
            let mut balls = Vec::with_capacity(n);
            for _ in 0..n {
                balls.push(read_ball(&mut r)?);
            }
            if flags & FLAG_FOURK != 0 {
                let sub = read_tz_body(&mut r)?;
                let mode = AdditiveMode::FourKPlus { k: sub.k() };
                OracleContainer::Additive(AdditiveOracle::from_parts(
                    mode, landmarks, nearest, balls, None, Some(sub),
                ))
            } else {
                let mut rows = Vec::with_capacity(landmarks.len());
                for _ in 0..landmarks.len() {
                    rows.push(read_row(&mut r)?);
                }
                OracleContainer::Additive(AdditiveOracle::from_parts(
                    AdditiveMode::TwoPlus,
                    landmarks,
                    nearest,
                    balls,
                    Some(rows),
                    None,
                ))
            }
        }
        other => return Err(ContainerError::BadKind(other)),
    };
    r.done()?;
    Ok(oracle)
}

pub fn save(path: &Path, bytes: &[u8]) -> Result<(), ContainerError> {
    Ok(std::fs::write(path, bytes)?)
}

pub fn load(path: &Path) -> Result<OracleContainer, ContainerError> {
    decode(&std::fs::read(path)?)
}

// Keep the sentinel encodable: parents of unreachable nodes never occur in
// connected-graph oracles, but the format must not silently alias them.
const _: () = assert!(INVALID_NODE == u32::MAX);
