//! Semi-honest two-party Yao protocol over a [`Channel`].
//!
//! Monolithic flow, garbler to evaluator unless noted:
//!
//! 1. `GC_BULK`: every gate blob record back to back
//! 2. `INPUT_LABELS`: the garbler's own input labels in wire order
//! 3. `OT_REQ` / `OT_RESP`: one batched 1-out-of-2 OT for the evaluator's inputs
//! 4. `OUTPUT_LABELS` (evaluator to garbler)
//! 5. `OUTPUT_PLAIN`: one byte per output bit, or `ABORT` if decoding fails
//!
//! Pipelined mode moves the input transfer first and then sends one
//! `GC_GATE` frame per gate, which the evaluator consumes before reading the
//! next. With [`Reveal::ShipDecoding`] the garbler sends `DECODE_INFO` after
//! the last gate, and the evaluator decodes and returns `OUTPUT_PLAIN` itself.

use std::thread;

use thiserror::Error;

use crate::channel::{mem_pair, Channel, ChannelError, Recorder, Tag, Transcript};
use crate::circuit::Circuit;
use crate::label::Label;
use crate::ot::{ot_receive_labels, ot_send_labels, OtError};
use crate::schemes::{Evaluator, Garbler};
use crate::schemes::gcf::{decode_blob, decode_blobs, encode_blob, read_decoding, write_decoding};
use crate::schemes::{de, gb, DecodeError, DecodingInfo, GarbleParams, SchemeError};

/// `ABORT` payload byte when output decoding returned bottom.
pub const ABORT_AUTHENTICITY: u8 = 1;

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Ot(#[from] OtError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("expected {expected} input bits, got {got}")]
    Input { expected: usize, got: usize },
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("output label on wire {0} failed authentication")]
    Authenticity(usize),
    #[error("peer aborted the session")]
    Aborted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Monolithic,
    Pipelined,
}

/// Who learns the output first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reveal {
    /// Evaluator sends output labels, garbler decodes and returns the bits.
    #[default]
    GarblerDecodes,
    /// Garbler ships the decoding information to the evaluator.
    ShipDecoding,
}

/// Which input wires belong to the garbler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ownership {
    garbler: Vec<bool>,
}

impl Ownership {
    pub fn from_mask(garbler: Vec<bool>) -> Self {
        Ownership { garbler }
    }

    /// The garbler owns the first `garbler_inputs` wires.
    pub fn split(n: usize, garbler_inputs: usize) -> Self {
        Ownership { garbler: (0..n).map(|i| i < garbler_inputs).collect() }
    }

    pub fn n(&self) -> usize {
        self.garbler.len()
    }

    pub fn is_garbler(&self, wire: usize) -> bool {
        self.garbler[wire]
    }

    pub fn garbler_wires(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.garbler[i]).collect()
    }

    pub fn evaluator_wires(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.garbler[i]).collect()
    }

    /// Full input vector from the two parties' slices.
    pub fn merge(&self, x_garbler: &[bool], x_evaluator: &[bool]) -> Result<Vec<bool>, RuntimeError> {
        let (ng, ne) = (self.garbler_wires().len(), self.evaluator_wires().len());
        if x_garbler.len() != ng {
            return Err(RuntimeError::Input { expected: ng, got: x_garbler.len() });
        }
        if x_evaluator.len() != ne {
            return Err(RuntimeError::Input { expected: ne, got: x_evaluator.len() });
        }
        let (mut g, mut e) = (x_garbler.iter(), x_evaluator.iter());
        Ok(self.garbler.iter().map(|&own| if own { *g.next().unwrap() } else { *e.next().unwrap() }).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub params: GarbleParams,
    pub mode: Mode,
    pub reveal: Reveal,
    pub ownership: Ownership,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyReport {
    pub output: Vec<bool>,
    /// Payload bytes of `GC_GATE` and `GC_BULK` frames.
    pub garbled_bytes: usize,
    /// Most gate blobs held in memory at once.
    pub peak_retained: usize,
}

fn check_shape(cfg: &ProtocolConfig, circuit: &Circuit, x: &[bool], ours: usize) -> Result<(), RuntimeError> {
    if cfg.ownership.n() != circuit.n() {
        return Err(RuntimeError::Input { expected: circuit.n(), got: cfg.ownership.n() });
    }
    if x.len() != ours {
        return Err(RuntimeError::Input { expected: ours, got: x.len() });
    }
    Ok(())
}

fn labels_bytes(labels: impl IntoIterator<Item = Label>, k: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for l in labels {
        l.write_bytes(k, &mut out);
    }
    out
}

fn labels_from(bytes: &[u8], k: usize, count: usize) -> Result<Vec<Label>, RuntimeError> {
    if bytes.len() != count * (k / 8) {
        return Err(RuntimeError::Protocol(format!("{} label bytes for {count} labels", bytes.len())));
    }
    Ok(bytes.chunks(k / 8).map(|c| Label::from_bytes(c, k)).collect())
}

fn plain_bytes(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| b as u8).collect()
}

fn plain_from(bytes: &[u8], m: usize) -> Result<Vec<bool>, RuntimeError> {
    if bytes.len() != m || bytes.iter().any(|&b| b > 1) {
        return Err(RuntimeError::Protocol("malformed OUTPUT_PLAIN".into()));
    }
    Ok(bytes.iter().map(|&b| b == 1).collect())
}

/// Receives either the plaintext output or an abort.
fn await_plain<C: Channel + ?Sized>(ch: &mut C, m: usize) -> Result<Vec<bool>, RuntimeError> {
    let f = ch.recv()?;
    match f.tag {
        Tag::OutputPlain => plain_from(&f.payload, m),
        Tag::Abort => Err(RuntimeError::Aborted),
        t => Err(RuntimeError::Protocol(format!("unexpected {t}"))),
    }
}

/// Decodes and reports the result, sending `ABORT` on bottom.
fn decode_and_reply<C: Channel + ?Sized>(ch: &mut C, d: &DecodingInfo, y: &[Label]) -> Result<Vec<bool>, RuntimeError> {
    match de(d, y) {
        Ok(bits) => {
            ch.send(Tag::OutputPlain, plain_bytes(&bits))?;
            Ok(bits)
        }
        Err(DecodeError::Bottom(i)) => {
            ch.send(Tag::Abort, vec![ABORT_AUTHENTICITY])?;
            Err(RuntimeError::Authenticity(i))
        }
        Err(e @ DecodeError::Length { .. }) => Err(RuntimeError::Protocol(e.to_string())),
    }
}

pub fn run_garbler<C: Channel + ?Sized>(cfg: &ProtocolConfig, circuit: &Circuit, x: &[bool], seed: u64, ch: &mut C) -> Result<PartyReport, RuntimeError> {
    let owned = cfg.ownership.garbler_wires();
    check_shape(cfg, circuit, x, owned.len())?;
    let k = cfg.params.k();
    let evw = cfg.ownership.evaluator_wires();
    let mut garbled_bytes = 0;
    let peak_retained;

    let send_inputs = |ch: &mut C, e: &crate::schemes::EncodingInfo| -> Result<(), RuntimeError> {
        ch.send(Tag::InputLabels, labels_bytes(owned.iter().zip(x).map(|(&w, &b)| e.label(w, b)), k))?;
        if !evw.is_empty() {
            let pairs: Vec<_> = evw.iter().map(|&w| (e.label(w, false), e.label(w, true))).collect();
            ot_send_labels(ch, k, &pairs)?;
        }
        Ok(())
    };

    let d = match cfg.mode {
        Mode::Monolithic => {
            let (f, e, d) = gb(cfg.params, circuit, seed)?;
            let mut bulk = Vec::new();
            for blob in &f.blobs {
                encode_blob(blob, k, &mut bulk);
            }
            garbled_bytes += bulk.len();
            peak_retained = f.blobs.len();
            ch.send(Tag::GcBulk, bulk)?;
            send_inputs(ch, &e)?;
            d
        }
        Mode::Pipelined => {
            let mut g = Garbler::new(cfg.params, circuit, seed)?;
            send_inputs(ch, &g.encoding())?;
            let mut buf = Vec::new();
            while let Some(blob) = g.next_gate() {
                buf.clear();
                encode_blob(&blob, k, &mut buf);
                garbled_bytes += buf.len();
                ch.send(Tag::GcGate, buf.clone())?;
            }
            peak_retained = 1.min(circuit.q());
            g.finish()
        }
    };

    let output = match cfg.reveal {
        Reveal::GarblerDecodes => {
            let y = labels_from(&ch.expect(Tag::OutputLabels)?, k, circuit.m())?;
            decode_and_reply(ch, &d, &y)?
        }
        Reveal::ShipDecoding => {
            ch.send(Tag::DecodeInfo, write_decoding(&d, k))?;
            await_plain(ch, circuit.m())?
        }
    };
    Ok(PartyReport { output, garbled_bytes, peak_retained })
}

pub fn run_evaluator<C: Channel + ?Sized>(cfg: &ProtocolConfig, circuit: &Circuit, x: &[bool], ch: &mut C) -> Result<PartyReport, RuntimeError> {
    let evw = cfg.ownership.evaluator_wires();
    check_shape(cfg, circuit, x, evw.len())?;
    let k = cfg.params.k();
    let gw = cfg.ownership.garbler_wires();
    let topology = circuit.topology();
    let mut garbled_bytes = 0;

    let recv_inputs = |ch: &mut C| -> Result<Vec<Label>, RuntimeError> {
        let own = labels_from(&ch.expect(Tag::InputLabels)?, k, gw.len())?;
        let chosen = if evw.is_empty() { Vec::new() } else { ot_receive_labels(ch, k, x)? };
        let mut inputs = vec![Label::ZERO; circuit.n()];
        for (&w, l) in gw.iter().zip(own) {
            inputs[w] = l;
        }
        for (&w, l) in evw.iter().zip(chosen) {
            inputs[w] = l;
        }
        Ok(inputs)
    };

    let (y, peak_retained) = match cfg.mode {
        Mode::Monolithic => {
            let bulk = ch.expect(Tag::GcBulk)?;
            garbled_bytes += bulk.len();
            let blobs = decode_blobs(&bulk, k)?;
            drop(bulk);
            if blobs.len() != circuit.q() {
                return Err(RuntimeError::Protocol(format!("{} blobs for {} gates", blobs.len(), circuit.q())));
            }
            let inputs = recv_inputs(ch)?;
            let mut ev = Evaluator::new(cfg.params, &topology, &inputs)?;
            for blob in blobs {
                ev.accept(blob);
            }
            ev.run_pending()?;
            (ev.outputs(), ev.peak_retained())
        }
        Mode::Pipelined => {
            let inputs = recv_inputs(ch)?;
            let mut ev = Evaluator::new(cfg.params, &topology, &inputs)?;
            while !ev.is_done() {
                let rec = ch.expect(Tag::GcGate)?;
                garbled_bytes += rec.len();
                ev.accept(decode_blob(&rec, k)?);
                ev.run_pending()?;
            }
            (ev.outputs(), ev.peak_retained())
        }
    };

    let output = match cfg.reveal {
        Reveal::GarblerDecodes => {
            ch.send(Tag::OutputLabels, labels_bytes(y.iter().copied(), k))?;
            await_plain(ch, circuit.m())?
        }
        Reveal::ShipDecoding => {
            let d = read_decoding(&ch.expect(Tag::DecodeInfo)?)?;
            if d.m() != circuit.m() {
                return Err(RuntimeError::Protocol("decoding info width".into()));
            }
            decode_and_reply(ch, &d, &y)?
        }
    };
    Ok(PartyReport { output, garbled_bytes, peak_retained })
}

/// Result of an in-process run with both parties on their own threads.
#[derive(Clone, Debug)]
pub struct Session {
    pub garbler: PartyReport,
    pub evaluator: PartyReport,
    pub garbler_transcript: Transcript,
    pub evaluator_transcript: Transcript,
}

impl Session {
    /// The evaluator's view of the session.
    pub fn transcript(&self) -> &Transcript {
        &self.evaluator_transcript
    }
}

/// Runs both parties over an in-process duplex channel.
pub fn run_2pc(cfg: &ProtocolConfig, circuit: &Circuit, x_garbler: &[bool], x_evaluator: &[bool], seed: u64) -> Result<Session, RuntimeError> {
    let (a, b) = mem_pair();
    let (g, e) = thread::scope(|s| {
        let g = s.spawn(|| {
            let mut ch = Recorder::new(a);
            let r = run_garbler(cfg, circuit, x_garbler, seed, &mut ch);
            (r, ch.into_parts().1)
        });
        let mut ch = Recorder::new(b);
        let r = run_evaluator(cfg, circuit, x_evaluator, &mut ch);
        // dropping the endpoint unblocks a garbler waiting on a failed peer
        let (_, et) = ch.into_parts();
        (g.join().expect("garbler thread panicked"), (r, et))
    });
    match (g, e) {
        ((Ok(gr), gt), (Ok(er), et)) => Ok(Session { garbler: gr, evaluator: er, garbler_transcript: gt, evaluator_transcript: et }),
        ((ge, _), (ee, _)) => {
            let errs = [ge.err(), ee.err()];
            let auth = errs.iter().flatten().position(|e| matches!(e, RuntimeError::Authenticity(_)));
            let mut errs: Vec<_> = errs.into_iter().flatten().collect();
            Err(errs.swap_remove(auth.unwrap_or(0)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::TruthTable;
    use crate::schemes::SchemeKind;

    #[test]
    fn and_gate_both_ones() {
        let c = Circuit::from_gates(2, 1, [(0, 1, TruthTable::AND)]).unwrap();
        for mode in [Mode::Monolithic, Mode::Pipelined] {
            let cfg = ProtocolConfig { params: GarbleParams::new(SchemeKind::HalfGates, 128).unwrap(), mode, reveal: Reveal::GarblerDecodes, ownership: Ownership::split(2, 1) };
            let s = run_2pc(&cfg, &c, &[true], &[true], 1).unwrap();
            assert_eq!(s.garbler.output, vec![true]);
            assert_eq!(s.evaluator.output, vec![true]);
        }
    }

    #[test]
    fn merge_follows_mask() {
        let o = Ownership::from_mask(vec![false, true, false]);
        assert_eq!(o.merge(&[true], &[false, true]).unwrap(), vec![false, true, true]);
        assert!(o.merge(&[], &[false, true]).is_err());
    }
}
