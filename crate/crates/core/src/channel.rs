//! Framed, ordered, bidirectional transport between the two parties.
//!
//! A frame on the wire is `tag: u8 | len: u32 LE | payload`. The in-process
//! duplex passes frames whole; [`StreamChannel`] writes the same bytes to any
//! `Read + Write` stream such as a `TcpStream`.

use std::fmt;
use std::io::{self, Read, Write};
use std::sync::mpsc::{channel, Receiver, Sender};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Tag {
    GcGate = 1,
    GcBulk = 2,
    InputLabels = 3,
    OtReq = 4,
    OtResp = 5,
    OutputLabels = 6,
    OutputPlain = 7,
    Abort = 8,
    DecodeInfo = 9,
    OsnOffline = 10,
    OsnBlindIn = 11,
    OsnBlindOut = 12,
    PfeGrouping = 13,
}

impl Tag {
    pub const ALL: [Tag; 13] = [
        Tag::GcGate,
        Tag::GcBulk,
        Tag::InputLabels,
        Tag::OtReq,
        Tag::OtResp,
        Tag::OutputLabels,
        Tag::OutputPlain,
        Tag::Abort,
        Tag::DecodeInfo,
        Tag::OsnOffline,
        Tag::OsnBlindIn,
        Tag::OsnBlindOut,
        Tag::PfeGrouping,
    ];

    pub fn from_u8(v: u8) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| *t as u8 == v)
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::GcGate => "GC_GATE",
            Tag::GcBulk => "GC_BULK",
            Tag::InputLabels => "INPUT_LABELS",
            Tag::OtReq => "OT_REQ",
            Tag::OtResp => "OT_RESP",
            Tag::OutputLabels => "OUTPUT_LABELS",
            Tag::OutputPlain => "OUTPUT_PLAIN",
            Tag::Abort => "ABORT",
            Tag::DecodeInfo => "DECODE_INFO",
            Tag::OsnOffline => "OSN_OFFLINE",
            Tag::OsnBlindIn => "OSN_BLIND_IN",
            Tag::OsnBlindOut => "OSN_BLIND_OUT",
            Tag::PfeGrouping => "PFE_GROUPING",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub tag: Tag,
    pub payload: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("peer disconnected")]
    Closed,
    #[error("unknown frame tag {0}")]
    UnknownTag(u8),
    #[error("frame too large ({0} bytes)")]
    TooLarge(usize),
    #[error("expected {expected} frame, got {got}")]
    Unexpected { expected: Tag, got: Tag },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub trait Channel {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError>;
    fn recv(&mut self) -> Result<Frame, ChannelError>;

    /// Receives one frame and fails unless it carries `tag`.
    fn expect(&mut self, tag: Tag) -> Result<Vec<u8>, ChannelError> {
        let f = self.recv()?;
        if f.tag != tag {
            return Err(ChannelError::Unexpected { expected: tag, got: f.tag });
        }
        Ok(f.payload)
    }
}

impl<C: Channel + ?Sized> Channel for &mut C {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError> {
        (**self).send(tag, payload)
    }
    fn recv(&mut self) -> Result<Frame, ChannelError> {
        (**self).recv()
    }
}

impl<C: Channel + ?Sized> Channel for Box<C> {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError> {
        (**self).send(tag, payload)
    }
    fn recv(&mut self) -> Result<Frame, ChannelError> {
        (**self).recv()
    }
}

/// One endpoint of an in-process duplex queue.
pub struct MemChannel {
    tx: Sender<Frame>,
    rx: Receiver<Frame>,
}

/// Two connected endpoints.
pub fn mem_pair() -> (MemChannel, MemChannel) {
    let (tx_a, rx_b) = channel();
    let (tx_b, rx_a) = channel();
    (MemChannel { tx: tx_a, rx: rx_a }, MemChannel { tx: tx_b, rx: rx_b })
}

impl Channel for MemChannel {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError> {
        if payload.len() > u32::MAX as usize {
            return Err(ChannelError::TooLarge(payload.len()));
        }
        self.tx.send(Frame { tag, payload }).map_err(|_| ChannelError::Closed)
    }

    fn recv(&mut self) -> Result<Frame, ChannelError> {
        self.rx.recv().map_err(|_| ChannelError::Closed)
    }
}

/// Length-prefixed frames over a byte stream.
pub struct StreamChannel<S> {
    stream: S,
}

impl<S: Read + Write> StreamChannel<S> {
    pub fn new(stream: S) -> Self {
        StreamChannel { stream }
    }

    pub fn into_inner(self) -> S {
        self.stream
    }
}

impl<S: Read + Write> Channel for StreamChannel<S> {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError> {
        let len = u32::try_from(payload.len()).map_err(|_| ChannelError::TooLarge(payload.len()))?;
        let mut head = [0u8; 5];
        head[0] = tag as u8;
        head[1..].copy_from_slice(&len.to_le_bytes());
        self.stream.write_all(&head)?;
        self.stream.write_all(&payload)?;
        self.stream.flush()?;
        Ok(())
    }

    fn recv(&mut self) -> Result<Frame, ChannelError> {
        let mut head = [0u8; 5];
        match self.stream.read_exact(&mut head) {
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Err(ChannelError::Closed),
            r => r?,
        }
        let tag = Tag::from_u8(head[0]).ok_or(ChannelError::UnknownTag(head[0]))?;
        let len = u32::from_le_bytes(head[1..].try_into().unwrap()) as usize;
        let mut payload = vec![0u8; len];
        self.stream.read_exact(&mut payload)?;
        Ok(Frame { tag, payload })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Sent,
    Received,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub tag: Tag,
    pub len: usize,
}

/// Ordered frame metadata as seen by one endpoint. Payloads are not kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn lengths(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.len).collect()
    }

    pub fn count(&self, tag: Tag) -> usize {
        self.entries.iter().filter(|e| e.tag == tag).count()
    }

    /// Total payload bytes carried by frames with `tag`.
    pub fn bytes(&self, tag: Tag) -> usize {
        self.entries.iter().filter(|e| e.tag == tag).map(|e| e.len).sum()
    }

    pub fn total_bytes(&self) -> usize {
        self.entries.iter().map(|e| e.len).sum()
    }
}

/// Wraps a channel and records every frame passing through it.
pub struct Recorder<C> {
    inner: C,
    transcript: Transcript,
}

impl<C: Channel> Recorder<C> {
    pub fn new(inner: C) -> Self {
        Recorder { inner, transcript: Transcript::default() }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_parts(self) -> (C, Transcript) {
        (self.inner, self.transcript)
    }
}

impl<C: Channel> Channel for Recorder<C> {
    fn send(&mut self, tag: Tag, payload: Vec<u8>) -> Result<(), ChannelError> {
        let len = payload.len();
        self.inner.send(tag, payload)?;
        self.transcript.entries.push(TranscriptEntry { direction: Direction::Sent, tag, len });
        Ok(())
    }

    fn recv(&mut self) -> Result<Frame, ChannelError> {
        let f = self.inner.recv()?;
        self.transcript.entries.push(TranscriptEntry { direction: Direction::Received, tag: f.tag, len: f.payload.len() });
        Ok(f)
    }
}
