//! Building blocks shared by all protocols: XOR secret sharing of a bit,
//! controlled swap, random pair permutation, the two random-oracle hashes
//! and the `parse` split.

use std::fmt;

use rand::{CryptoRng, Rng, RngCore};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::encoding::{self, Reader};
use crate::error::{OtError, Result};

/// Whole-byte bit string; messages, keys, tags and masks all use it.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ByteString(Vec<u8>);

impl ByteString {
    pub fn new(bytes: Vec<u8>) -> Self {
        ByteString(bytes)
    }

    pub fn zeros(len: usize) -> Self {
        ByteString(vec![0; len])
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0; len];
        rng.fill_bytes(&mut bytes);
        ByteString(bytes)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s.trim())
            .map(ByteString)
            .map_err(|e| OtError::DecodeError(format!("bad hex: {e}")))
    }

    /// Parses hex (odd digit counts allowed) and left-pads with zero bytes
    /// to `len`.
    pub fn from_hex_padded(s: &str, len: usize) -> Result<Self> {
        let s = s.trim();
        let raw = if s.len() % 2 == 1 { Self::from_hex(&format!("0{s}"))? } else { Self::from_hex(s)? };
        raw.left_pad(len)
    }

    pub fn left_pad(self, len: usize) -> Result<Self> {
        if self.0.len() > len {
            return Err(OtError::LengthMismatch { expected: len, got: self.0.len() });
        }
        let mut bytes = vec![0; len - self.0.len()];
        bytes.extend_from_slice(&self.0);
        Ok(ByteString(bytes))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit_len(&self) -> usize {
        8 * self.0.len()
    }

    pub fn concat(&self, other: &ByteString) -> ByteString {
        let mut bytes = self.0.clone();
        bytes.extend_from_slice(&other.0);
        ByteString(bytes)
    }

    pub fn encode(&self, out: &mut Vec<u8>) {
        encoding::put_bytes(out, &self.0);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(ByteString(r.bytes()?.to_vec()))
    }
}

impl fmt::Debug for ByteString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ByteString({})", self.to_hex())
    }
}

impl From<Vec<u8>> for ByteString {
    fn from(bytes: Vec<u8>) -> Self {
        ByteString(bytes)
    }
}

impl serde::Serialize for ByteString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> serde::Deserialize<'de> for ByteString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ByteString::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

impl From<&[u8]> for ByteString {
    fn from(bytes: &[u8]) -> Self {
        ByteString(bytes.to_vec())
    }
}

/// Two XOR shares of one bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitShares {
    pub s1: bool,
    pub s2: bool,
}

/// Splits `s` with a fresh uniform coin.
pub fn ss_share<R: RngCore + ?Sized>(s: bool, rng: &mut R) -> BitShares {
    share_with_coin(s, rng.gen::<bool>())
}

/// Deterministic sharing: `s1 = coin`, `s2 = s XOR coin`.
pub fn share_with_coin(s: bool, coin: bool) -> BitShares {
    BitShares { s1: coin, s2: s ^ coin }
}

pub fn ss_reconstruct(shares: BitShares) -> bool {
    shares.s1 ^ shares.s2
}

/// Returns the pair unchanged for `b = false`, exchanged for `b = true`.
pub fn controlled_swap<T>(b: bool, pair: (T, T)) -> (T, T) {
    if b {
        (pair.1, pair.0)
    } else {
        pair
    }
}

/// Uniform permutation of a pair, i.e. a controlled swap on a fresh coin.
pub fn random_permute_pair<T, R: RngCore + ?Sized>(pair: (T, T), rng: &mut R) -> (T, T) {
    controlled_swap(rng.gen::<bool>(), pair)
}

const TAG_H: u8 = b'H';
const TAG_G: u8 = b'G';

fn whole_bytes(bits: usize) -> Result<usize> {
    if !bits.is_multiple_of(8) {
        return Err(OtError::InvalidParameter(format!("{bits} is not a multiple of 8")));
    }
    Ok(bits / 8)
}

fn shake(tag: u8, input: &[u8], out_len: usize) -> ByteString {
    let mut hasher = Shake256::default();
    hasher.update(&[tag]);
    hasher.update(input);
    let mut out = vec![0u8; out_len];
    hasher.finalize_xof().read(&mut out);
    ByteString(out)
}

/// Random oracle `H: {0,1}* -> {0,1}^sigma`.
pub fn hash_h(input: &[u8], sigma_bits: usize) -> Result<ByteString> {
    Ok(shake(TAG_H, input, whole_bytes(sigma_bits)?))
}

/// Random oracle `G: {0,1}* -> {0,1}^(sigma + lambda)`.
pub fn hash_g(input: &[u8], sigma_bits: usize, lambda_bits: usize) -> Result<ByteString> {
    let len = whole_bytes(sigma_bits)? + whole_bytes(lambda_bits)?;
    Ok(shake(TAG_G, input, len))
}

/// Splits `y` into its leading `|y| - lambda` bits and trailing `lambda` bits.
pub fn parse(lambda_bits: usize, y: &ByteString) -> Result<(ByteString, ByteString)> {
    let suffix = whole_bytes(lambda_bits)?;
    if y.len() < suffix {
        return Err(OtError::InputTooShort { got: y.bit_len(), need: lambda_bits });
    }
    let (u1, u2) = y.0.split_at(y.len() - suffix);
    Ok((ByteString(u1.to_vec()), ByteString(u2.to_vec())))
}

pub fn xor_bytes(a: &ByteString, b: &ByteString) -> Result<ByteString> {
    if a.len() != b.len() {
        return Err(OtError::LengthMismatch { expected: a.len(), got: b.len() });
    }
    Ok(ByteString(a.0.iter().zip(&b.0).map(|(x, y)| x ^ y).collect()))
}

/// Draws a fresh bit from any random source.
pub fn random_bit<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> bool {
    rng.gen::<bool>()
}
