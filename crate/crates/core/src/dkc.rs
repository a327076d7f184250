//! Dual-key ciphers and the hash-based key derivation used by the schemes.
//!
//! Every construction here is a pad cipher: `E_{A,B}(T, C) = pad(A, B, T) ^ C`,
//! so decryption and encryption coincide.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use aes::cipher::{BlockEncrypt, KeyInit};
use aes::{Aes128, Aes256};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gf2k::Gf2k;
use crate::label::{mask, Label};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DkcError {
    #[error("label width {0} is not supported")]
    UnsupportedWidth(usize),
    #[error("value does not fit in {k} bits")]
    LengthMismatch { k: usize },
    #[error("key derivation output must be k or k+1 bits, got {got} for k = {k}")]
    KdfLength { k: usize, got: usize },
    #[error("key derivation takes one or two inputs, got {0}")]
    KdfInputs(usize),
}

/// Per-encryption domain separator: a gate identifier and a few position bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Tweak {
    pub gate_id: u64,
    pub pos: u8,
}

impl Tweak {
    pub const fn new(gate_id: u64, pos: u8) -> Tweak {
        Tweak { gate_id, pos }
    }

    /// Eight-byte big-endian gate id followed by the position byte.
    pub fn encode(self) -> [u8; 9] {
        let mut out = [0u8; 9];
        out[..8].copy_from_slice(&self.gate_id.to_be_bytes());
        out[8] = self.pos;
        out
    }

    /// The tweak read as an integer `gate_id * 256 + pos`, truncated to `k` bits.
    pub fn as_block(self, k: usize) -> u128 {
        (((self.gate_id as u128) << 8) | self.pos as u128) & mask(k)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DkcKind {
    /// `PRF(A, T) ^ PRF(B, T) ^ C` with a truncated keyed hash as the PRF.
    TwoPrf,
    /// `H(A || B || T) ^ C`.
    SingleHash,
    /// AES-256 keyed with `A || B`, applied to the tweak.
    KeyedAes256,
    /// `pi(K) ^ K ^ C` with `K = 2A ^ 4B ^ T` and `pi` AES-128 under a constant key.
    FixedKeyAes,
}

impl DkcKind {
    pub const ALL: [DkcKind; 4] = [DkcKind::TwoPrf, DkcKind::SingleHash, DkcKind::KeyedAes256, DkcKind::FixedKeyAes];

    pub fn name(self) -> &'static str {
        match self {
            DkcKind::TwoPrf => "two-prf",
            DkcKind::SingleHash => "single-hash",
            DkcKind::KeyedAes256 => "keyed-aes256",
            DkcKind::FixedKeyAes => "fixed-key-aes",
        }
    }

    pub fn from_name(s: &str) -> Option<DkcKind> {
        DkcKind::ALL.into_iter().find(|d| d.name() == s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DkcVariant {
    pub kind: DkcKind,
    pub k: usize,
}

static FIXED_KEY_SCHEDULES: AtomicUsize = AtomicUsize::new(0);

fn fixed_aes() -> &'static Aes128 {
    static CIPHER: OnceLock<Aes128> = OnceLock::new();
    CIPHER.get_or_init(|| {
        FIXED_KEY_SCHEDULES.fetch_add(1, Ordering::Relaxed);
        Aes128::new(&[0u8; 16].into())
    })
}

/// How many times the fixed-key AES schedule has been expanded in this process.
pub fn fixed_key_schedule_count() -> usize {
    FIXED_KEY_SCHEDULES.load(Ordering::Relaxed)
}

fn sha256(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

fn truncate(digest: &[u8; 32], k: usize) -> u128 {
    let mut buf = [0u8; 16];
    buf.copy_from_slice(&digest[..16]);
    u128::from_le_bytes(buf) & mask(k)
}

impl DkcVariant {
    pub fn new(kind: DkcKind, k: usize) -> Result<Self, DkcError> {
        if k % 8 != 0 || !(16..=128).contains(&k) {
            return Err(DkcError::UnsupportedWidth(k));
        }
        Gf2k::get(k).map_err(|_| DkcError::UnsupportedWidth(k))?;
        Ok(DkcVariant { kind, k })
    }

    /// Whether this instance is a real construction at a meaningful width.
    /// The AES variants fall back to a hash for `k < 128`.
    pub fn is_secure(&self) -> bool {
        match self.kind {
            DkcKind::TwoPrf | DkcKind::SingleHash => self.k >= 64,
            DkcKind::KeyedAes256 | DkcKind::FixedKeyAes => self.k == 128,
        }
    }

    /// The value XORed onto the payload. Inputs are assumed to fit in `k` bits.
    pub fn pad(&self, a: Label, b: Label, t: Tweak) -> Label {
        let k = self.k;
        let kb = k / 8;
        let tw = t.encode();
        let out = match self.kind {
            DkcKind::TwoPrf => {
                let pa = sha256(&[&a.0.to_le_bytes()[..kb], &tw]);
                let pb = sha256(&[&b.0.to_le_bytes()[..kb], &tw]);
                truncate(&pa, k) ^ truncate(&pb, k)
            }
            DkcKind::SingleHash => {
                let d = sha256(&[&a.0.to_le_bytes()[..kb], &b.0.to_le_bytes()[..kb], &tw]);
                truncate(&d, k)
            }
            DkcKind::KeyedAes256 if k == 128 => {
                let mut key = [0u8; 32];
                key[..16].copy_from_slice(&a.0.to_le_bytes());
                key[16..].copy_from_slice(&b.0.to_le_bytes());
                let cipher = Aes256::new(&key.into());
                let mut block = [0u8; 16];
                block[..9].copy_from_slice(&tw);
                let mut block = block.into();
                cipher.encrypt_block(&mut block);
                u128::from_le_bytes(block.into())
            }
            DkcKind::KeyedAes256 => {
                let d = sha256(&[b"keyed-aes256", &a.0.to_le_bytes()[..kb], &b.0.to_le_bytes()[..kb], &tw]);
                truncate(&d, k)
            }
            DkcKind::FixedKeyAes => {
                let key = self.fixed_key_input(a, b, t);
                if k == 128 {
                    let mut block = key.to_le_bytes().into();
                    fixed_aes().encrypt_block(&mut block);
                    u128::from_le_bytes(block.into()) ^ key
                } else {
                    let d = sha256(&[b"fixed-key-aes", &key.to_le_bytes()[..kb]]);
                    truncate(&d, k) ^ key
                }
            }
        };
        Label(out)
    }

    /// `K = 2A ^ 4B ^ T` in GF(2^k).
    pub fn fixed_key_input(&self, a: Label, b: Label, t: Tweak) -> u128 {
        let f = Gf2k::get(self.k).expect("width checked at construction");
        f.double(a.0) ^ f.double(f.double(b.0)) ^ t.as_block(self.k)
    }

    fn check(&self, vals: &[Label]) -> Result<(), DkcError> {
        if vals.iter().any(|v| v.0 & !mask(self.k) != 0) {
            return Err(DkcError::LengthMismatch { k: self.k });
        }
        Ok(())
    }
}

pub fn dkc_encrypt(v: &DkcVariant, a: Label, b: Label, t: Tweak, c: Label) -> Result<Label, DkcError> {
    v.check(&[a, b, c])?;
    Ok(v.pad(a, b, t) ^ c)
}

pub fn dkc_decrypt(v: &DkcVariant, a: Label, b: Label, t: Tweak, ct: Label) -> Result<Label, DkcError> {
    v.check(&[a, b, ct])?;
    Ok(v.pad(a, b, t) ^ ct)
}

/// Output of [`hash_kdf`]: a k-bit value and, for `k + 1` bit requests, one extra bit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KdfOutput {
    pub v: Label,
    pub m: Option<bool>,
}

/// Hash of one or two labels and a tweak, truncated to `out_len` bits.
pub fn hash_kdf(k: usize, inputs: &[Label], t: Tweak, out_len: usize) -> Result<KdfOutput, DkcError> {
    if !(1..=2).contains(&inputs.len()) {
        return Err(DkcError::KdfInputs(inputs.len()));
    }
    if out_len != k && out_len != k + 1 {
        return Err(DkcError::KdfLength { k, got: out_len });
    }
    if k % 8 != 0 || !(8..=128).contains(&k) {
        return Err(DkcError::UnsupportedWidth(k));
    }
    if inputs.iter().any(|v| v.0 & !mask(k) != 0) {
        return Err(DkcError::LengthMismatch { k });
    }
    Ok(kdf_raw(k, inputs, t, out_len == k + 1))
}

/// Unchecked form of [`hash_kdf`] for internal callers.
#[inline]
pub(crate) fn kdf_raw(k: usize, inputs: &[Label], t: Tweak, extra: bool) -> KdfOutput {
    let kb = k / 8;
    let mut buf = [0u8; 41];
    let mut len = 0;
    for x in inputs {
        buf[len..len + kb].copy_from_slice(&x.0.to_le_bytes()[..kb]);
        len += kb;
    }
    buf[len..len + 9].copy_from_slice(&t.encode());
    len += 9;
    let d: [u8; 32] = Sha256::digest(&buf[..len]).into();
    KdfOutput {
        v: Label(truncate(&d, k)),
        m: extra.then_some(d[kb] & 1 == 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn tweak_encoding() {
        let t = Tweak::new(0x0102, 3);
        assert_eq!(t.encode(), [0, 0, 0, 0, 0, 0, 1, 2, 3]);
        assert_eq!(t.as_block(128), 0x010203);
        assert_eq!(t.as_block(16), 0x0203);
    }

    #[test]
    fn all_variants_invert() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for kind in DkcKind::ALL {
            for k in [16, 32, 64, 128] {
                let v = DkcVariant::new(kind, k).unwrap();
                for _ in 0..50 {
                    let (a, b, c) = (Label::random(&mut rng, k), Label::random(&mut rng, k), Label::random(&mut rng, k));
                    let t = Tweak::new(rng.gen(), rng.gen());
                    let ct = dkc_encrypt(&v, a, b, t, c).unwrap();
                    assert_eq!(dkc_decrypt(&v, a, b, t, ct).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn rejects_wide_values() {
        let v = DkcVariant::new(DkcKind::SingleHash, 32).unwrap();
        assert_eq!(
            dkc_encrypt(&v, Label(1 << 40), Label(0), Tweak::default(), Label(0)),
            Err(DkcError::LengthMismatch { k: 32 })
        );
        assert!(DkcVariant::new(DkcKind::TwoPrf, 24).is_err());
        assert!(DkcVariant::new(DkcKind::TwoPrf, 8).is_err());
    }

    #[test]
    fn kdf_lengths() {
        let x = Label(5);
        assert!(matches!(hash_kdf(128, &[x], Tweak::default(), 64), Err(DkcError::KdfLength { .. })));
        assert!(hash_kdf(128, &[], Tweak::default(), 128).is_err());
        let a = hash_kdf(64, &[x], Tweak::new(1, 0), 65).unwrap();
        let b = hash_kdf(64, &[x], Tweak::new(1, 0), 64).unwrap();
        assert_eq!(a.v, b.v);
        assert!(a.m.is_some() && b.m.is_none());
    }
}
