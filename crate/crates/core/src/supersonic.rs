//! Supersonic OT: three parties, one-time pads and two controlled swaps, no
//! public-key operations.

use rand::{CryptoRng, RngCore};

use crate::encoding::Reader;
use crate::error::{OtError, Result};
use crate::primitives::{controlled_swap, ss_share, xor_bytes, ByteString};

/// Receiver's pads. Consumed by [`sup_retrieve`], so a key pair is used once.
#[derive(Debug, PartialEq, Eq)]
pub struct PadKeys {
    pub k0: ByteString,
    pub k1: ByteString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncPair {
    pub c0: ByteString,
    pub c1: ByteString,
}

impl PadKeys {
    pub fn encode(&self, out: &mut Vec<u8>) {
        self.k0.encode(out);
        self.k1.encode(out);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(PadKeys { k0: ByteString::decode(r)?, k1: ByteString::decode(r)? })
    }

    /// A second handle on the same pads, for handing a copy to the sender.
    pub fn share_with_sender(&self) -> PadKeys {
        PadKeys { k0: self.k0.clone(), k1: self.k1.clone() }
    }
}

impl EncPair {
    pub fn encode(&self, out: &mut Vec<u8>) {
        self.c0.encode(out);
        self.c1.encode(out);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(EncPair { c0: ByteString::decode(r)?, c1: ByteString::decode(r)? })
    }
}

pub fn sup_setup<R: RngCore + CryptoRng + ?Sized>(sigma_bits: usize, rng: &mut R) -> Result<PadKeys> {
    if sigma_bits == 0 || !sigma_bits.is_multiple_of(8) {
        return Err(OtError::InvalidParameter(format!("{sigma_bits} is not a positive multiple of 8")));
    }
    let k0 = ByteString::random(sigma_bits / 8, rng);
    let k1 = ByteString::random(sigma_bits / 8, rng);
    Ok(PadKeys { k0, k1 })
}

/// `(q1, q2)` with `q1 XOR q2 = s`.
pub fn sup_gen_query<R: RngCore + CryptoRng + ?Sized>(s: bool, rng: &mut R) -> (bool, bool) {
    let shares = ss_share(s, rng);
    (shares.s1, shares.s2)
}

/// `swap(q1, (m0 XOR k0, m1 XOR k1))`.
pub fn sup_gen_res(m0: &ByteString, m1: &ByteString, keys: &PadKeys, q1: bool) -> Result<EncPair> {
    let c0 = xor_bytes(&keys.k0, m0)?;
    let c1 = xor_bytes(&keys.k1, m1)?;
    if c0.len() != c1.len() {
        return Err(OtError::LengthMismatch { expected: c0.len(), got: c1.len() });
    }
    let (c0, c1) = controlled_swap(q1, (c0, c1));
    Ok(EncPair { c0, c1 })
}

/// Head of `swap(q2, e')`; the other element is dropped here.
pub fn sup_obl_filter(e_prime: EncPair, q2: bool) -> ByteString {
    controlled_swap(q2, (e_prime.c0, e_prime.c1)).0
}

pub fn sup_retrieve(c: &ByteString, keys: PadKeys, s: bool) -> Result<ByteString> {
    let key = if s { keys.k1 } else { keys.k0 };
    xor_bytes(c, &key)
}
