//! Byte layouts for proofs and keys.
//!
//! Proof (`MockGroup`, 79 bytes):
//!
//! ```text
//! "CICP" | version u8 | backend u8 | count u8 (= 8) | 8 x element
//! ```
//!
//! where a mock element is a group tag byte followed by the 8-byte big-endian
//! exponent. Keys use the magics `CICV` and `CICE` with the layouts written
//! out in [`VerificationKey::to_bytes`] and [`EvaluationKey::to_bytes`]. All
//! integers are big-endian.
//!
//! [`VerificationKey::to_bytes`]: super::VerificationKey::to_bytes
//! [`EvaluationKey::to_bytes`]: super::EvaluationKey::to_bytes

use thiserror::Error;

pub const PROOF_MAGIC: [u8; 4] = *b"CICP";
pub const VK_MAGIC: [u8; 4] = *b"CICV";
pub const EK_MAGIC: [u8; 4] = *b"CICE";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u8),
    #[error("encoded for backend {found:#04x}, expected {expected:#04x}")]
    BadBackend { expected: u8, found: u8 },
    #[error("length mismatch: expected {expected} bytes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("key was generated over modulus {found}, expected {expected}")]
    ModulusMismatch { expected: u64, found: u64 },
    #[error("malformed element: {0}")]
    BadElement(String),
    #[error("malformed header: {0}")]
    BadHeader(String),
}

/// Cursor over an encoded buffer. Running past the end reports the total
/// length that would have been needed.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], EncodingError> {
        if self.buf.len() - self.pos < n {
            return Err(EncodingError::LengthMismatch {
                expected: self.pos + n,
                got: self.buf.len(),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, EncodingError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, EncodingError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, EncodingError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    /// Fails with `LengthMismatch` if unread bytes remain.
    pub fn finish(self) -> Result<(), EncodingError> {
        if self.pos != self.buf.len() {
            return Err(EncodingError::LengthMismatch {
                expected: self.pos,
                got: self.buf.len(),
            });
        }
        Ok(())
    }

    /// Checks magic, version and backend id.
    pub(crate) fn header(&mut self, magic: [u8; 4], backend: u8) -> Result<(), EncodingError> {
        if self.take(4).map_err(|_| EncodingError::BadMagic)? != magic {
            return Err(EncodingError::BadMagic);
        }
        let version = self.u8()?;
        if version != FORMAT_VERSION {
            return Err(EncodingError::BadVersion(version));
        }
        let found = self.u8()?;
        if found != backend {
            return Err(EncodingError::BadBackend {
                expected: backend,
                found,
            });
        }
        Ok(())
    }

    /// A `u32` length prefix, sanity-checked against the bytes left so a
    /// corrupted count cannot trigger a huge allocation.
    pub(crate) fn count(&mut self, item_bytes: usize) -> Result<usize, EncodingError> {
        let n = self.u32()? as usize;
        let need = n.saturating_mul(item_bytes);
        if need > self.remaining() {
            return Err(EncodingError::LengthMismatch {
                expected: self.pos.saturating_add(need),
                got: self.buf.len(),
            });
        }
        Ok(n)
    }
}

pub(crate) fn write_header(out: &mut Vec<u8>, magic: [u8; 4], backend: u8) {
    out.extend_from_slice(&magic);
    out.push(FORMAT_VERSION);
    out.push(backend);
}

/// Reads the field modulus from an encoded key without decoding the rest,
/// so a caller can construct the matching group first.
pub fn key_modulus(bytes: &[u8]) -> Result<u64, EncodingError> {
    let mut r = Reader::new(bytes);
    let magic = r.take(4).map_err(|_| EncodingError::BadMagic)?;
    if magic != VK_MAGIC && magic != EK_MAGIC {
        return Err(EncodingError::BadMagic);
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(EncodingError::BadVersion(version));
    }
    r.u8()?;
    r.u64()
}
