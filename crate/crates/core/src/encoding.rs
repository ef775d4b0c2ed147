//! Length-prefixed big-endian encodings shared by every wire payload.
//!
//! A field is a 4-byte big-endian length followed by that many bytes. Big
//! integers are unsigned magnitudes, optionally left-padded to a fixed width
//! so that encodings of values under the same modulus have equal size.

use num_bigint::BigUint;

use crate::error::{OtError, Result};

pub fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    let len = u32::try_from(bytes.len()).expect("field longer than 2^32 bytes");
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(bytes);
}

pub fn put_biguint(out: &mut Vec<u8>, value: &BigUint) {
    put_bytes(out, &value.to_bytes_be());
}

/// Encodes `value` left-padded with zeros to `width` bytes.
pub fn put_biguint_fixed(out: &mut Vec<u8>, value: &BigUint, width: usize) {
    put_bytes(out, &to_fixed_be(value, width));
}

pub fn put_u8(out: &mut Vec<u8>, value: u8) {
    out.push(value);
}

pub fn put_u32(out: &mut Vec<u8>, value: u32) {
    out.extend_from_slice(&value.to_be_bytes());
}

/// Big-endian magnitude of `value`, left-padded to `width` bytes.
///
/// Panics if the value needs more than `width` bytes.
pub fn to_fixed_be(value: &BigUint, width: usize) -> Vec<u8> {
    let raw = if value.bits() == 0 {
        Vec::new()
    } else {
        value.to_bytes_be()
    };
    assert!(raw.len() <= width, "value wider than {width} bytes");
    let mut buf = vec![0u8; width - raw.len()];
    buf.extend_from_slice(&raw);
    buf
}

pub fn byte_width(value: &BigUint) -> usize {
    value.bits().div_ceil(8) as usize
}

/// Cursor over an encoded buffer.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let have = self.buf.len() - self.pos;
        if have < n {
            return Err(OtError::DecodeError(format!(
                "need {n} bytes at offset {}, have {have}",
                self.pos
            )));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    pub fn biguint(&mut self) -> Result<BigUint> {
        Ok(BigUint::from_bytes_be(self.bytes()?))
    }

    /// Fails unless the whole buffer was consumed.
    pub fn finish(self) -> Result<()> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(OtError::DecodeError(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )))
        }
    }
}
