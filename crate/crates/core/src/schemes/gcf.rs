//! Binary encodings of garbled circuits and their encoding/decoding data.
//! The byte layout is documented in `docs/FORMATS.md`.

use crate::circuit::{Side, Topology};
use crate::dkc::DkcKind;
use crate::label::Label;

use super::{DecodingInfo, EncodingInfo, GarbleParams, GarbledCircuit, GateBlob, SchemeId, SchemeError, SchemeKind};

pub const GCF_MAGIC: &[u8; 4] = b"GCF1";
pub const DECODING_MAGIC: &[u8; 4] = b"GCD1";
pub const ENCODING_MAGIC: &[u8; 4] = b"GCE1";

const TAG_FREE: u8 = 0;
const TAG_ROWS: u8 = 1;
const TAG_GRR2_ODD: u8 = 2;
const TAG_GRR2_EVEN: u8 = 3;
const TAG_HALF: u8 = 4;
const TAG_BUFFER: u8 = 5;
const TAG_UNARY_A: u8 = 6;
const TAG_UNARY_B: u8 = 7;
const TAG_CONSTANT: u8 = 8;

fn malformed(msg: impl Into<String>) -> SchemeError {
    SchemeError::Malformed(msg.into())
}

/// Cursor over a byte slice that reports truncation as a malformed-data error.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], SchemeError> {
        if self.buf.len() - self.pos < n {
            return Err(malformed(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, SchemeError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, SchemeError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, SchemeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, SchemeError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn label(&mut self, k: usize) -> Result<Label, SchemeError> {
        Ok(Label::from_bytes(self.take(k / 8)?, k))
    }

    pub(crate) fn finish(&self) -> Result<(), SchemeError> {
        if self.pos != self.buf.len() {
            return Err(malformed(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn blob_tag(blob: &GateBlob) -> u8 {
    match blob {
        GateBlob::Free => TAG_FREE,
        GateBlob::Rows(_) => TAG_ROWS,
        GateBlob::Grr2 { even: false, .. } => TAG_GRR2_ODD,
        GateBlob::Grr2 { even: true, .. } => TAG_GRR2_EVEN,
        GateBlob::Half { .. } => TAG_HALF,
        GateBlob::Buffer(_) => TAG_BUFFER,
        GateBlob::Unary { side: Side::A, .. } => TAG_UNARY_A,
        GateBlob::Unary { side: Side::B, .. } => TAG_UNARY_B,
        GateBlob::Constant { .. } => TAG_CONSTANT,
    }
}

/// Appends one record: tag byte, u32 payload length, payload.
pub fn encode_blob(blob: &GateBlob, k: usize, out: &mut Vec<u8>) {
    out.push(blob_tag(blob));
    let len = blob.payload_bytes(k) as u32;
    out.extend_from_slice(&len.to_le_bytes());
    let start = out.len();
    match blob {
        GateBlob::Free => {}
        GateBlob::Rows(rows) => rows.iter().for_each(|r| r.write_bytes(k, out)),
        GateBlob::Grr2 { points, bits, .. } => {
            points[0].write_bytes(k, out);
            points[1].write_bytes(k, out);
            out.push(*bits & 0xF);
        }
        GateBlob::Half { tg, te } => {
            tg.write_bytes(k, out);
            te.write_bytes(k, out);
        }
        GateBlob::Buffer(ct) => ct.write_bytes(k, out),
        GateBlob::Unary { ct: l, bit, .. } | GateBlob::Constant { label: l, bit } => {
            l.write_bytes(k, out);
            if let Some(b) = bit {
                out.push(*b as u8);
            }
        }
    }
    debug_assert_eq!(out.len() - start, len as usize);
}

pub(crate) fn read_blob(r: &mut Reader<'_>, k: usize) -> Result<GateBlob, SchemeError> {
    let tag = r.u8()?;
    let len = r.u32()? as usize;
    let mut p = Reader::new(r.take(len)?);
    let kb = k / 8;
    let bit = |p: &mut Reader<'_>| -> Result<Option<bool>, SchemeError> {
        if p.is_empty() {
            return Ok(None);
        }
        match p.u8()? {
            0 => Ok(Some(false)),
            1 => Ok(Some(true)),
            b => Err(malformed(format!("bad external bit {b}"))),
        }
    };
    let blob = match tag {
        TAG_FREE => GateBlob::Free,
        TAG_ROWS => {
            if len == 0 || len % kb != 0 || len / kb > 4 {
                return Err(malformed(format!("row table of {len} bytes")));
            }
            GateBlob::Rows((0..len / kb).map(|_| p.label(k)).collect::<Result<_, _>>()?)
        }
        TAG_GRR2_ODD | TAG_GRR2_EVEN => {
            let points = [p.label(k)?, p.label(k)?];
            let bits = p.u8()?;
            if bits > 0xF {
                return Err(malformed("external bits out of range"));
            }
            GateBlob::Grr2 { even: tag == TAG_GRR2_EVEN, points, bits }
        }
        TAG_HALF => GateBlob::Half { tg: p.label(k)?, te: p.label(k)? },
        TAG_BUFFER => GateBlob::Buffer(p.label(k)?),
        TAG_UNARY_A | TAG_UNARY_B => {
            let side = if tag == TAG_UNARY_A { Side::A } else { Side::B };
            let ct = p.label(k)?;
            GateBlob::Unary { side, ct, bit: bit(&mut p)? }
        }
        TAG_CONSTANT => {
            let label = p.label(k)?;
            GateBlob::Constant { label, bit: bit(&mut p)? }
        }
        t => return Err(malformed(format!("unknown blob tag {t}"))),
    };
    p.finish()?;
    Ok(blob)
}

/// Decodes exactly one record.
pub fn decode_blob(bytes: &[u8], k: usize) -> Result<GateBlob, SchemeError> {
    let mut r = Reader::new(bytes);
    let b = read_blob(&mut r, k)?;
    r.finish()?;
    Ok(b)
}

/// Decodes a concatenation of records.
pub fn decode_blobs(bytes: &[u8], k: usize) -> Result<Vec<GateBlob>, SchemeError> {
    let mut r = Reader::new(bytes);
    let mut out = Vec::new();
    while !r.is_empty() {
        out.push(read_blob(&mut r, k)?);
    }
    Ok(out)
}

fn dkc_tag(kind: DkcKind) -> u8 {
    DkcKind::ALL.iter().position(|d| *d == kind).unwrap() as u8
}

fn write_params(p: &GarbleParams, out: &mut Vec<u8>) {
    out.push(p.kind().tag());
    out.push(p.scheme.authenticity_decode as u8);
    out.push(dkc_tag(p.dkc.kind));
    out.push(0);
    out.extend_from_slice(&(p.k() as u16).to_le_bytes());
}

fn read_params(r: &mut Reader<'_>) -> Result<GarbleParams, SchemeError> {
    let kind = SchemeKind::from_tag(r.u8()?).ok_or_else(|| malformed("unknown scheme tag"))?;
    let flags = r.u8()?;
    let dkc = *DkcKind::ALL.get(r.u8()? as usize).ok_or_else(|| malformed("unknown cipher tag"))?;
    let _reserved = r.u8()?;
    let k = r.u16()? as usize;
    GarbleParams::with_dkc(SchemeId { kind, authenticity_decode: flags & 1 == 1 }, dkc, k)
}

pub fn write_gcf(f: &GarbledCircuit) -> Vec<u8> {
    let k = f.params.k();
    let t = &f.topology;
    let mut out = Vec::new();
    out.extend_from_slice(GCF_MAGIC);
    write_params(&f.params, &mut out);
    for v in [t.n, t.m, t.q()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for (a, b) in &t.wires {
        out.extend_from_slice(&(*a as u32).to_le_bytes());
        out.extend_from_slice(&(*b as u32).to_le_bytes());
    }
    for blob in &f.blobs {
        encode_blob(blob, k, &mut out);
    }
    out
}

fn check_magic(r: &mut Reader<'_>, magic: &[u8; 4]) -> Result<(), SchemeError> {
    if r.take(4)? != magic {
        return Err(malformed(format!("missing {} magic", String::from_utf8_lossy(magic))));
    }
    Ok(())
}

pub fn read_gcf(bytes: &[u8]) -> Result<GarbledCircuit, SchemeError> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r, GCF_MAGIC)?;
    let params = read_params(&mut r)?;
    let (n, m, q) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
    if m > q || n == 0 {
        return Err(malformed("bad circuit shape"));
    }
    let mut wires = Vec::with_capacity(q.min(1 << 24));
    for g in 0..q {
        let (a, b) = (r.u32()? as usize, r.u32()? as usize);
        if a > b || b >= n + g || b >= n + q - m {
            return Err(malformed(format!("gate {} has bad inputs", n + g + 1)));
        }
        wires.push((a, b));
    }
    let mut blobs = Vec::with_capacity(q.min(1 << 24));
    for _ in 0..q {
        blobs.push(read_blob(&mut r, params.k())?);
    }
    r.finish()?;
    Ok(GarbledCircuit { params, topology: Topology { n, m, wires }, blobs })
}

pub fn write_decoding(d: &DecodingInfo, k: usize) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(DECODING_MAGIC);
    let (tag, k) = match d {
        DecodingInfo::Pairs(_) => (0u8, k),
        DecodingInfo::Lsb(_) => (1, k),
        DecodingInfo::Hashes { k, .. } => (2, *k),
    };
    out.push(tag);
    out.extend_from_slice(&(k as u16).to_le_bytes());
    out.extend_from_slice(&(d.m() as u32).to_le_bytes());
    match d {
        DecodingInfo::Pairs(p) => p.iter().for_each(|(a, b)| {
            a.write_bytes(k, &mut out);
            b.write_bytes(k, &mut out);
        }),
        DecodingInfo::Lsb(bits) => out.extend(bits.iter().map(|b| *b as u8)),
        DecodingInfo::Hashes { first_output, pairs, .. } => {
            out.extend_from_slice(&first_output.to_le_bytes());
            pairs.iter().for_each(|(a, b)| {
                a.write_bytes(k, &mut out);
                b.write_bytes(k, &mut out);
            })
        }
    }
    out
}

fn read_width(r: &mut Reader<'_>) -> Result<usize, SchemeError> {
    let k = r.u16()? as usize;
    if !crate::label::SUPPORTED_K.contains(&k) {
        return Err(malformed(format!("unsupported label width {k}")));
    }
    Ok(k)
}

pub fn read_decoding(bytes: &[u8]) -> Result<DecodingInfo, SchemeError> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r, DECODING_MAGIC)?;
    let tag = r.u8()?;
    let k = read_width(&mut r)?;
    let m = r.u32()? as usize;
    let pairs = |r: &mut Reader<'_>| -> Result<Vec<(Label, Label)>, SchemeError> {
        (0..m).map(|_| Ok((r.label(k)?, r.label(k)?))).collect()
    };
    let d = match tag {
        0 => DecodingInfo::Pairs(pairs(&mut r)?),
        1 => DecodingInfo::Lsb(
            r.take(m)?
                .iter()
                .map(|b| match b {
                    0 | 1 => Ok(*b == 1),
                    _ => Err(malformed("decoding bit out of range")),
                })
                .collect::<Result<_, _>>()?,
        ),
        2 => {
            let first_output = r.u64()?;
            DecodingInfo::Hashes { k, first_output, pairs: pairs(&mut r)? }
        }
        t => return Err(malformed(format!("unknown decoding tag {t}"))),
    };
    r.finish()?;
    Ok(d)
}

pub fn write_encoding(e: &EncodingInfo, k: usize) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(ENCODING_MAGIC);
    out.push(matches!(e, EncodingInfo::Offset { .. }) as u8);
    out.extend_from_slice(&(k as u16).to_le_bytes());
    out.extend_from_slice(&(e.n() as u32).to_le_bytes());
    match e {
        EncodingInfo::Pairs(p) => p.iter().for_each(|(a, b)| {
            a.write_bytes(k, &mut out);
            b.write_bytes(k, &mut out);
        }),
        EncodingInfo::Offset { w0, r } => {
            r.write_bytes(k, &mut out);
            w0.iter().for_each(|l| l.write_bytes(k, &mut out));
        }
    }
    out
}

pub fn read_encoding(bytes: &[u8]) -> Result<(EncodingInfo, usize), SchemeError> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r, ENCODING_MAGIC)?;
    let tag = r.u8()?;
    let k = read_width(&mut r)?;
    let n = r.u32()? as usize;
    let e = match tag {
        0 => EncodingInfo::Pairs((0..n).map(|_| Ok((r.label(k)?, r.label(k)?))).collect::<Result<_, SchemeError>>()?),
        1 => {
            let off = r.label(k)?;
            EncodingInfo::Offset { r: off, w0: (0..n).map(|_| r.label(k)).collect::<Result<_, _>>()? }
        }
        t => return Err(malformed(format!("unknown encoding tag {t}"))),
    };
    r.finish()?;
    Ok((e, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random::{random_circuit, RandomCircuitConfig};
    use crate::schemes::gb;

    #[test]
    fn files_round_trip() {
        let mut cfg = RandomCircuitConfig::new(4, 3, 60, 0.5);
        cfg.trivial_fraction = 0.2;
        let c = random_circuit(&cfg, 9).circuit;
        for kind in SchemeKind::ALL {
            for k in [32, 128] {
                let params = GarbleParams::new(kind, k).unwrap();
                let (f, e, d) = gb(params, &c, 3).unwrap();
                assert_eq!(read_gcf(&write_gcf(&f)).unwrap(), f);
                assert_eq!(read_decoding(&write_decoding(&d, k)).unwrap(), d);
                assert_eq!(read_encoding(&write_encoding(&e, k)).unwrap(), (e, k));
            }
        }
        let (f, _, d) = gb(GarbleParams::new(SchemeId::half_gates_authenticated(), 128).unwrap(), &c, 3).unwrap();
        assert_eq!(read_decoding(&write_decoding(&d, 128)).unwrap(), d);
        let bytes = write_gcf(&f);
        assert!(read_gcf(&bytes[..bytes.len() - 1]).is_err());
    }
}
