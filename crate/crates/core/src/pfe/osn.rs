//! Oblivious evaluation of a switching network.
//!
//! The owner holds the input strings and picks a random mask `r_w` for every
//! wire. For each switch with inputs `i, j` and outputs `k, l` the holder
//! obtains, by OT on its selection `(s0, s1)`, the row
//! `(r[in s0] ^ r_k, r[in s1] ^ r_l)`: 1-out-of-2 for 1-switches,
//! 1-out-of-4 for 2-switches. The owner then sends its masked inputs, the
//! holder walks the network by XOR, adds its blinding and returns the first
//! `reveal` outputs, which the owner unmasks.
//!
//! With a lane width `L`, each revealed string is read as
//! `head | p | q` with `|p| = |q| = L` bytes, and a final layer of
//! 1-switches chosen by the holder swaps `p` and `q` before the reveal.
//!
//! Frames: `OSN_OFFLINE` (owner to holder) carries the shape as five
//! little-endian u32 values `width, string_bytes, reveal, lane, switches`;
//! then the OT batches for 1-switches, 2-switches and the swap layer;
//! `OSN_BLIND_IN` carries `width` masked input strings and `OSN_BLIND_OUT`
//! the `reveal` blinded outputs.

use rand::{Rng, RngCore};

use crate::channel::{Channel, Tag};
use crate::ot::{ot_receive, ot_send, OtBatch};

use super::network::{Selection, SwitchKind, SwitchingNetwork};
use super::PfeError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OsnShape {
    pub network: SwitchingNetwork,
    /// Bytes per string.
    pub string_bytes: usize,
    /// Number of leading outputs returned to the owner.
    pub reveal: usize,
    /// Width of the swapped lanes, if the swap layer is present.
    pub lane: Option<usize>,
}

impl OsnShape {
    fn header(&self) -> Vec<u8> {
        let mut h = Vec::with_capacity(20);
        for v in [self.network.inputs, self.string_bytes, self.reveal, self.lane.unwrap_or(0), self.network.switches.len()] {
            h.extend_from_slice(&(v as u32).to_le_bytes());
        }
        h
    }

    fn check(&self) -> Result<(), PfeError> {
        if self.reveal > self.network.outputs.len() {
            return Err(PfeError::Shape("reveal exceeds outputs".into()));
        }
        if let Some(l) = self.lane {
            if l == 0 || 2 * l > self.string_bytes {
                return Err(PfeError::Shape("lanes wider than strings".into()));
            }
        }
        Ok(())
    }
}

/// OT transfers used by one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OsnStats {
    pub ot_1of2: usize,
    pub ot_1of4: usize,
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

fn xor_into(a: &mut [u8], b: &[u8]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
}

fn row(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut r = a.to_vec();
    r.extend_from_slice(b);
    r
}

fn split_row(r: &[u8]) -> (&[u8], &[u8]) {
    r.split_at(r.len() / 2)
}

/// Owner side. Returns `ep(x) ^ t` for the first `reveal` outputs, after the
/// holder's swaps if the shape has lanes. `inputs` shorter than the network
/// width are padded with zero strings.
pub fn osn_owner<C: Channel + ?Sized, R: RngCore>(ch: &mut C, shape: &OsnShape, inputs: &[Vec<u8>], rng: &mut R) -> Result<(Vec<Vec<u8>>, OsnStats), PfeError> {
    shape.check()?;
    let net = &shape.network;
    let sb = shape.string_bytes;
    if inputs.len() > net.inputs || inputs.iter().any(|x| x.len() != sb) {
        return Err(PfeError::Shape("owner inputs".into()));
    }
    ch.send(Tag::OsnOffline, shape.header())?;

    let masks: Vec<Vec<u8>> = (0..net.wire_count()).map(|_| (0..sb).map(|_| rng.gen()).collect()).collect();
    let (mut ones, mut twos) = (Vec::new(), Vec::new());
    for (s, sw) in net.switches.iter().enumerate() {
        let [k, l] = net.switch_outputs(s);
        let cell = |sel: Selection| row(&xor(&masks[sw.inputs[sel.s0 as usize]], &masks[k]), &xor(&masks[sw.inputs[sel.s1 as usize]], &masks[l]));
        match sw.kind {
            SwitchKind::One => ones.extend([cell(Selection::one(false)), cell(Selection::one(true))]),
            SwitchKind::Two => {
                for s0 in [false, true] {
                    for s1 in [false, true] {
                        twos.push(cell(Selection { s0, s1 }));
                    }
                }
            }
        }
    }
    let mut stats = OsnStats { ot_1of2: ones.len() / 2, ot_1of4: twos.len() / 4 };
    ot_send(ch, &OtBatch::new(2, stats.ot_1of2, 16 * sb)?, &ones)?;
    ot_send(ch, &OtBatch::new(4, stats.ot_1of4, 16 * sb)?, &twos)?;
    drop((ones, twos));

    let mut lane_masks = Vec::new();
    if let Some(l) = shape.lane {
        let head = sb - 2 * l;
        let mut rows = Vec::with_capacity(2 * shape.reveal);
        for j in 0..shape.reveal {
            let r = &masks[net.outputs[j]];
            let (rp, rq) = (&r[head..head + l], &r[head + l..]);
            let fresh: Vec<u8> = (0..2 * l).map(|_| rng.gen()).collect();
            let (fp, fq) = fresh.split_at(l);
            rows.push(row(&xor(rp, fp), &xor(rq, fq)));
            rows.push(row(&xor(rq, fp), &xor(rp, fq)));
            lane_masks.push(fresh);
        }
        ot_send(ch, &OtBatch::new(2, shape.reveal, 16 * l)?, &rows)?;
        stats.ot_1of2 += shape.reveal;
    }

    let mut blind = Vec::with_capacity(net.inputs * sb);
    for w in 0..net.inputs {
        match inputs.get(w) {
            Some(x) => blind.extend(xor(x, &masks[w])),
            None => blind.extend_from_slice(&masks[w]),
        }
    }
    ch.send(Tag::OsnBlindIn, blind)?;

    let back = ch.expect(Tag::OsnBlindOut)?;
    if back.len() != shape.reveal * sb {
        return Err(PfeError::Protocol("OSN_BLIND_OUT length".into()));
    }
    let out = back
        .chunks(sb.max(1))
        .take(shape.reveal)
        .enumerate()
        .map(|(j, c)| {
            let mut v = c.to_vec();
            match shape.lane {
                Some(l) => {
                    let head = sb - 2 * l;
                    xor_into(&mut v[..head], &masks[net.outputs[j]][..head]);
                    xor_into(&mut v[head..], &lane_masks[j]);
                }
                None => xor_into(&mut v, &masks[net.outputs[j]]),
            }
            v
        })
        .collect();
    Ok((out, stats))
}

/// Holder side. `blinding` has one string per revealed output; `swaps` one
/// bit per revealed output when the shape has lanes.
pub fn osn_holder<C: Channel + ?Sized>(ch: &mut C, shape: &OsnShape, sels: &[Selection], blinding: &[Vec<u8>], swaps: Option<&[bool]>) -> Result<OsnStats, PfeError> {
    shape.check()?;
    let net = &shape.network;
    net.check_selections(sels)?;
    let sb = shape.string_bytes;
    if blinding.len() != shape.reveal || blinding.iter().any(|t| t.len() != sb) {
        return Err(PfeError::Shape("holder blinding".into()));
    }
    if shape.lane.is_some() != swaps.is_some() || swaps.is_some_and(|s| s.len() != shape.reveal) {
        return Err(PfeError::Shape("swap layer selections".into()));
    }
    if ch.expect(Tag::OsnOffline)? != shape.header() {
        return Err(PfeError::Shape("peer network shape differs".into()));
    }

    let (mut one_idx, mut two_idx) = (Vec::new(), Vec::new());
    for (sw, sel) in net.switches.iter().zip(sels) {
        match sw.kind {
            SwitchKind::One => one_idx.push(sel.s0 as usize),
            SwitchKind::Two => two_idx.push(2 * sel.s0 as usize + sel.s1 as usize),
        }
    }
    let mut stats = OsnStats { ot_1of2: one_idx.len(), ot_1of4: two_idx.len() };
    let ones = ot_receive(ch, &OtBatch::new(2, one_idx.len(), 16 * sb)?, &one_idx)?;
    let twos = ot_receive(ch, &OtBatch::new(4, two_idx.len(), 16 * sb)?, &two_idx)?;
    let lane_rows = match (shape.lane, swaps) {
        (Some(l), Some(sw)) => {
            let idx: Vec<usize> = sw.iter().map(|&s| s as usize).collect();
            stats.ot_1of2 += idx.len();
            ot_receive(ch, &OtBatch::new(2, idx.len(), 16 * l)?, &idx)?
        }
        _ => Vec::new(),
    };

    let blind = ch.expect(Tag::OsnBlindIn)?;
    if blind.len() != net.inputs * sb {
        return Err(PfeError::Protocol("OSN_BLIND_IN length".into()));
    }
    let mut w: Vec<Vec<u8>> = Vec::with_capacity(net.wire_count());
    w.extend(blind.chunks(sb.max(1)).take(net.inputs).map(<[u8]>::to_vec));
    let (mut oi, mut ti) = (ones.iter(), twos.iter());
    for (sw, sel) in net.switches.iter().zip(sels) {
        let r = match sw.kind {
            SwitchKind::One => oi.next(),
            SwitchKind::Two => ti.next(),
        }
        .expect("one row per switch");
        let (t0, t1) = split_row(r);
        let y0 = xor(&w[sw.inputs[sel.s0 as usize]], t0);
        let y1 = xor(&w[sw.inputs[sel.s1 as usize]], t1);
        w.push(y0);
        w.push(y1);
    }

    let mut out = Vec::with_capacity(shape.reveal * sb);
    for j in 0..shape.reveal {
        let mut y = xor(&w[net.outputs[j]], &blinding[j]);
        if let (Some(l), Some(sw)) = (shape.lane, swaps) {
            let head = sb - 2 * l;
            let (p, q) = (y[head..head + l].to_vec(), y[head + l..].to_vec());
            let (t0, t1) = split_row(&lane_rows[j]);
            let (a, b) = if sw[j] { (q, p) } else { (p, q) };
            y[head..head + l].copy_from_slice(&xor(&a, t0));
            y[head + l..].copy_from_slice(&xor(&b, t1));
        }
        out.extend(y);
    }
    ch.send(Tag::OsnBlindOut, out)?;
    Ok(stats)
}
