use super::{GarbledCircuit, GateBlob};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum BlobKind {
    Free,
    Rows,
    Grr2Odd,
    Grr2Even,
    Half,
    Buffer,
    Unary,
    Constant,
}

impl BlobKind {
    pub fn of(blob: &GateBlob) -> BlobKind {
        match blob {
            GateBlob::Free => BlobKind::Free,
            GateBlob::Rows(_) => BlobKind::Rows,
            GateBlob::Grr2 { even: false, .. } => BlobKind::Grr2Odd,
            GateBlob::Grr2 { even: true, .. } => BlobKind::Grr2Even,
            GateBlob::Half { .. } => BlobKind::Half,
            GateBlob::Buffer(_) => BlobKind::Buffer,
            GateBlob::Unary { .. } => BlobKind::Unary,
            GateBlob::Constant { .. } => BlobKind::Constant,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BlobKind::Free => "free",
            BlobKind::Rows => "rows",
            BlobKind::Grr2Odd => "grr2-odd",
            BlobKind::Grr2Even => "grr2-even",
            BlobKind::Half => "half",
            BlobKind::Buffer => "buffer",
            BlobKind::Unary => "unary",
            BlobKind::Constant => "constant",
        }
    }
}

/// Transmitted size of the garbled tables, excluding topology and framing.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GarbledSize {
    pub gates: usize,
    pub ciphertexts: usize,
    pub payload_bits: usize,
    /// Sum over gates of the per-gate payload rounded up to whole bytes.
    pub bytes: usize,
    /// `(kind, gates, ciphertexts, bytes)` for every blob kind present.
    pub per_kind: Vec<(BlobKind, usize, usize, usize)>,
}

impl GarbledSize {
    pub fn bytes_per_gate(&self) -> f64 {
        if self.gates == 0 {
            0.0
        } else {
            self.bytes as f64 / self.gates as f64
        }
    }

    pub fn add(&mut self, blob: &GateBlob, k: usize) {
        let (ct, bits, bytes) = (blob.ciphertexts(), blob.payload_bits(k), blob.payload_bytes(k));
        self.gates += 1;
        self.ciphertexts += ct;
        self.payload_bits += bits;
        self.bytes += bytes;
        let kind = BlobKind::of(blob);
        match self.per_kind.iter_mut().find(|e| e.0 == kind) {
            Some(e) => {
                e.1 += 1;
                e.2 += ct;
                e.3 += bytes;
            }
            None => {
                self.per_kind.push((kind, 1, ct, bytes));
                self.per_kind.sort();
            }
        }
    }
}

pub fn garbled_size(f: &GarbledCircuit) -> GarbledSize {
    let mut s = GarbledSize::default();
    for b in &f.blobs {
        s.add(b, f.params.k());
    }
    s
}
