//! 1-out-of-m oblivious transfer for m in {2, 4}.
//!
//! The implementation is an ideal functionality. The receiver's request
//! carries its indices and the response carries only the chosen messages; the
//! selection happens inside [`ot_send`], so the caller on the sending side
//! never sees the indices. Each batch costs one `OT_REQ` and one `OT_RESP`
//! frame whatever its size.
//!
//! `OT_REQ` payload: `m: u8 | count: u32 | msg_len: u32 | count index bytes`.
//! `OT_RESP` payload: the `count` chosen messages, `ceil(msg_len / 8)` bytes each.

use thiserror::Error;

use crate::channel::{Channel, ChannelError, Tag};
use crate::label::Label;

#[derive(Debug, Error)]
pub enum OtError {
    #[error("unsupported OT arity {0}")]
    Arity(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OtBatch {
    pub m: usize,
    pub count: usize,
    /// Bits per message.
    pub msg_len: usize,
}

impl OtBatch {
    pub fn new(m: usize, count: usize, msg_len: usize) -> Result<Self, OtError> {
        if m != 2 && m != 4 {
            return Err(OtError::Arity(m));
        }
        if count > u32::MAX as usize || msg_len > u32::MAX as usize {
            return Err(OtError::Shape("batch too large".into()));
        }
        Ok(OtBatch { m, count, msg_len })
    }

    pub fn msg_bytes(&self) -> usize {
        self.msg_len.div_ceil(8)
    }

    fn header(&self) -> [u8; 9] {
        let mut h = [0u8; 9];
        h[0] = self.m as u8;
        h[1..5].copy_from_slice(&(self.count as u32).to_le_bytes());
        h[5..9].copy_from_slice(&(self.msg_len as u32).to_le_bytes());
        h
    }
}

/// Sender side. `messages[t * m + j]` is message `j` of transfer `t`.
pub fn ot_send<C: Channel + ?Sized>(ch: &mut C, batch: &OtBatch, messages: &[Vec<u8>]) -> Result<(), OtError> {
    if messages.len() != batch.m * batch.count {
        return Err(OtError::Shape(format!("{} messages for {} x {}", messages.len(), batch.count, batch.m)));
    }
    let mb = batch.msg_bytes();
    if let Some(bad) = messages.iter().find(|msg| msg.len() != mb) {
        return Err(OtError::Shape(format!("message of {} bytes, expected {mb}", bad.len())));
    }
    let req = ch.expect(Tag::OtReq)?;
    if req.len() != 9 + batch.count || req[..9] != batch.header() {
        return Err(OtError::Shape("request does not match batch".into()));
    }
    let mut resp = Vec::with_capacity(batch.count * mb);
    for (t, &j) in req[9..].iter().enumerate() {
        let j = j as usize;
        if j >= batch.m {
            return Err(OtError::Shape(format!("index {j} out of range")));
        }
        resp.extend_from_slice(&messages[t * batch.m + j]);
    }
    ch.send(Tag::OtResp, resp)?;
    Ok(())
}

/// Receiver side; returns `messages[t][indices[t]]` for every transfer.
pub fn ot_receive<C: Channel + ?Sized>(ch: &mut C, batch: &OtBatch, indices: &[usize]) -> Result<Vec<Vec<u8>>, OtError> {
    if indices.len() != batch.count {
        return Err(OtError::Shape(format!("{} indices for {} transfers", indices.len(), batch.count)));
    }
    let mut req = batch.header().to_vec();
    for &j in indices {
        if j >= batch.m {
            return Err(OtError::Shape(format!("index {j} out of range")));
        }
        req.push(j as u8);
    }
    ch.send(Tag::OtReq, req)?;
    let resp = ch.expect(Tag::OtResp)?;
    let mb = batch.msg_bytes();
    if resp.len() != batch.count * mb {
        return Err(OtError::Shape("response length".into()));
    }
    Ok(if mb == 0 { vec![Vec::new(); batch.count] } else { resp.chunks(mb).map(<[u8]>::to_vec).collect() })
}

/// 1-out-of-2 transfer of wire labels.
pub fn ot_send_labels<C: Channel + ?Sized>(ch: &mut C, k: usize, pairs: &[(Label, Label)]) -> Result<(), OtError> {
    let batch = OtBatch::new(2, pairs.len(), k)?;
    let msgs: Vec<Vec<u8>> = pairs.iter().flat_map(|(a, b)| [a.to_bytes(k), b.to_bytes(k)]).collect();
    ot_send(ch, &batch, &msgs)
}

pub fn ot_receive_labels<C: Channel + ?Sized>(ch: &mut C, k: usize, choices: &[bool]) -> Result<Vec<Label>, OtError> {
    let batch = OtBatch::new(2, choices.len(), k)?;
    let idx: Vec<usize> = choices.iter().map(|&c| c as usize).collect();
    Ok(ot_receive(ch, &batch, &idx)?.iter().map(|b| Label::from_bytes(b, k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::mem_pair;

    #[test]
    fn two_messages_pick_second() {
        let (mut s, mut r) = mem_pair();
        let batch = OtBatch::new(2, 1, 8).unwrap();
        let h = std::thread::spawn(move || ot_send(&mut s, &batch, &[vec![0xA], vec![0xB]]));
        assert_eq!(ot_receive(&mut r, &batch, &[1]).unwrap(), vec![vec![0xB]]);
        h.join().unwrap().unwrap();
    }

    #[test]
    fn arity_and_shape_checked() {
        assert!(matches!(OtBatch::new(3, 1, 8), Err(OtError::Arity(3))));
        let (mut s, _r) = mem_pair();
        let batch = OtBatch::new(4, 2, 8).unwrap();
        assert!(matches!(ot_send(&mut s, &batch, &vec![vec![0]; 7]), Err(OtError::Shape(_))));
        assert!(matches!(ot_receive(&mut s, &batch, &[0, 4]), Err(OtError::Shape(_))));
    }
}
