//! Paillier additively homomorphic encryption with generator `n + 1`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::encoding::{self, Reader};
use crate::error::{OtError, Result};
use crate::prime;

/// Smallest modulus accepted by [`kgen`].
pub const MIN_KEY_BITS: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaillierPublicKey {
    n: BigUint,
    n_squared: BigUint,
}

#[derive(Clone, Debug)]
pub struct PaillierSecretKey {
    lambda_tot: BigUint,
    mu: BigUint,
    pk: PaillierPublicKey,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomCiphertext(BigUint);

impl HomCiphertext {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn from_value(v: BigUint) -> Self {
        HomCiphertext(v)
    }
}

impl PaillierPublicKey {
    pub fn from_modulus(n: BigUint) -> Result<Self> {
        if n.bits() < MIN_KEY_BITS || n.is_even() {
            return Err(OtError::InvalidParameter("Paillier modulus must be odd and at least 64 bits".into()));
        }
        let n_squared = &n * &n;
        Ok(PaillierPublicKey { n, n_squared })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_squared(&self) -> &BigUint {
        &self.n_squared
    }

    pub fn generator(&self) -> BigUint {
        &self.n + 1u32
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }

    /// Byte width of a ciphertext under this key.
    pub fn ciphertext_bytes(&self) -> usize {
        encoding::byte_width(&self.n_squared)
    }

    /// Public keys travel as `n` alone.
    pub fn encode(&self, out: &mut Vec<u8>) {
        encoding::put_biguint(out, &self.n);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Self::from_modulus(r.biguint()?)
    }

    /// Ciphertexts are left-padded to the width of `n^2`, so encodings under
    /// one key always have the same length.
    pub fn encode_ciphertext(&self, out: &mut Vec<u8>, c: &HomCiphertext) {
        encoding::put_biguint_fixed(out, &c.0, self.ciphertext_bytes());
    }

    pub fn decode_ciphertext(&self, r: &mut Reader<'_>) -> Result<HomCiphertext> {
        let v = r.biguint()?;
        if v.is_zero() || v >= self.n_squared {
            return Err(OtError::DecodeError("ciphertext outside [1, n^2)".into()));
        }
        Ok(HomCiphertext(v))
    }
}

impl PaillierSecretKey {
    pub fn public_key(&self) -> &PaillierPublicKey {
        &self.pk
    }

    pub fn lambda_tot(&self) -> &BigUint {
        &self.lambda_tot
    }

    pub fn mu(&self) -> &BigUint {
        &self.mu
    }
}

/// Generates a keypair whose modulus has exactly `bits` bits.
pub fn kgen<R: RngCore + CryptoRng + ?Sized>(
    bits: u64,
    rng: &mut R,
) -> Result<(PaillierPublicKey, PaillierSecretKey)> {
    if bits < MIN_KEY_BITS || !bits.is_multiple_of(2) {
        return Err(OtError::InvalidParameter(format!(
            "Paillier modulus size must be even and >= {MIN_KEY_BITS}, got {bits}"
        )));
    }
    for _ in 0..64 {
        let p = prime::random_prime(bits / 2, rng);
        let q = prime::random_prime(bits / 2, rng);
        if p == q {
            continue;
        }
        let n = &p * &q;
        let p1 = &p - 1u32;
        let q1 = &q - 1u32;
        if !n.gcd(&(&p1 * &q1)).is_one() {
            continue;
        }
        // top two bits of each prime are set, so |n| is exactly `bits`
        debug_assert_eq!(n.bits(), bits);
        let lambda_tot = p1.lcm(&q1);
        // with g = n + 1, L(g^lambda mod n^2) = lambda mod n
        let mu = match (&lambda_tot % &n).modinv(&n) {
            Some(mu) => mu,
            None => continue,
        };
        let pk = PaillierPublicKey::from_modulus(n)?;
        let sk = PaillierSecretKey { lambda_tot, mu, pk: pk.clone() };
        return Ok((pk, sk));
    }
    Err(OtError::PrimeSearchExhausted)
}

fn random_unit<R: RngCore + CryptoRng + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let r = prime::random_below(n, rng);
        if !r.is_zero() && r.gcd(n).is_one() {
            return r;
        }
    }
}

pub fn enc<R: RngCore + CryptoRng + ?Sized>(
    pk: &PaillierPublicKey,
    m: &BigUint,
    rng: &mut R,
) -> Result<HomCiphertext> {
    if m >= &pk.n {
        return Err(OtError::PlaintextOutOfRange);
    }
    let r = random_unit(&pk.n, rng);
    // (1 + n)^m = 1 + m*n mod n^2
    let gm = (m * &pk.n + 1u32) % &pk.n_squared;
    let rn = r.modpow(&pk.n, &pk.n_squared);
    Ok(HomCiphertext((gm * rn) % &pk.n_squared))
}

pub fn enc_u64<R: RngCore + CryptoRng + ?Sized>(
    pk: &PaillierPublicKey,
    m: u64,
    rng: &mut R,
) -> Result<HomCiphertext> {
    enc(pk, &BigUint::from(m), rng)
}

pub fn dec(sk: &PaillierSecretKey, c: &HomCiphertext) -> Result<BigUint> {
    let pk = &sk.pk;
    if c.0.is_zero() || !c.0.gcd(&pk.n).is_one() {
        return Err(OtError::MalformedCiphertext);
    }
    let u = c.0.modpow(&sk.lambda_tot, &pk.n_squared);
    let l = (u - 1u32) / &pk.n;
    Ok((l * &sk.mu) % &pk.n)
}

/// Ciphertext of `m1 + m2 mod n`.
pub fn hadd(pk: &PaillierPublicKey, c1: &HomCiphertext, c2: &HomCiphertext) -> HomCiphertext {
    HomCiphertext((&c1.0 * &c2.0) % &pk.n_squared)
}

/// Ciphertext of `m * k mod n`.
pub fn hscale(pk: &PaillierPublicKey, c: &HomCiphertext, k: &BigUint) -> HomCiphertext {
    HomCiphertext(c.0.modpow(k, &pk.n_squared))
}

/// Encryption of zero with no randomness, the neutral element of [`hadd`].
pub fn zero_ciphertext() -> HomCiphertext {
    HomCiphertext(BigUint::one())
}

/// Homomorphic inner product `sum_i plaintexts[i] * Dec(selector[i])`.
///
/// Every plaintext must be below `n`.
pub fn inner_product(
    pk: &PaillierPublicKey,
    selector: &[HomCiphertext],
    plaintexts: &[BigUint],
) -> Result<HomCiphertext> {
    if selector.len() != plaintexts.len() {
        return Err(OtError::LengthMismatch { expected: selector.len(), got: plaintexts.len() });
    }
    let mut acc = zero_ciphertext();
    for (c, m) in selector.iter().zip(plaintexts) {
        if m >= &pk.n {
            return Err(OtError::EmbeddingOverflow);
        }
        acc = hadd(pk, &acc, &hscale(pk, c, m));
    }
    Ok(acc)
}

/// Encrypts the one-hot vector of length `len` with a 1 at `index`.
pub fn one_hot<R: RngCore + CryptoRng + ?Sized>(
    pk: &PaillierPublicKey,
    len: usize,
    index: usize,
    rng: &mut R,
) -> Result<Vec<HomCiphertext>> {
    if index >= len {
        return Err(OtError::IndexOutOfRange { index, len });
    }
    (0..len).map(|t| enc_u64(pk, (t == index) as u64, rng)).collect()
}
