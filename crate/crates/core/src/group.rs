//! Arithmetic in the prime-order subgroup of quadratic residues modulo a
//! safe prime `P = 2q + 1`.
//!
//! Every discrete-log protocol in the crate runs over [`GroupParams`]: the
//! modulus, the subgroup order `q`, a generator `g` and the public element
//! `C` whose discrete logarithm nobody keeps (except the trapdoor
//! constructors used by tests and the verifier).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::encoding::{self, Reader};
use crate::error::{OtError, Result};
use crate::prime::{self, MR_ROUNDS, SMALL_PRIMES};

/// Safe-prime subgroup orders generated offline for the common sizes, keyed
/// by the bit length of `q`. Each is re-checked with Miller-Rabin by the
/// unit tests; `g` and `C` are still drawn fresh for every group.
const FIXED_SUBGROUP_ORDERS: &[(u64, &str)] = &[
    (
        256,
        "965f25acb15d59b220438e9c3085ee75120c72cad72e68b301eec5268f289f59",
    ),
    (
        512,
        "d5fd6460991bbb4e210144c7bd9da71a7b216305cebd563dc3f98d8ef1ff53e1\
     76cf8679276c5e6e1b6f0242c0afc639e3ad27695f716ccf42a7fd21bf5a4873",
    ),
    (
        1024,
        "ef8bb54112198f7a05ecd68bbcb25d078768a8c8804cdf87e75d3b6e0897caa4\
     f533f1d8566e5219c02240b021575ae3ed3e7b25974cd5f6c712a7f0c552a99c\
     55fd6460991bbb4e210144c7bd9da71a7b216305cebd563dc3f98d8ef1ff53e1\
     76cf8679276c5e6e1b6f0242c0afc639e3ad27695f716ccf42a7fd21bf5a1641",
    ),
    (
        2048,
        "c173154651448b7b3c0421d17e70a4d81c99192ac3ebd13a6251414bb58f9dab\
     26681b3d64fedbd8f65437ab595a1b6bbd00ba8a9b676c6c845e8d9c992d8957\
     75ba5c8da9137f8ea19cd4dee6922bd4556d53a69dc44e317549d9a61b33dc7f\
     be5e09e1010afe795c87658ad6f024afc6a51284806f3a4ee08f99d59390e19e\
     319d3c6e58dec4f0583a124c7800b1d94b81f5c278ca32a151b37b7e397a5d50\
     544aeaf42d75bc3049f0e7d5c3df1dc34f73f6dd15a59249c4a3ee4f9af517da\
     228aef39aec7ec397233b24e59b0d7fa89fd78c7b740f7e48a2724cbccd7b664\
     844f35a76c1453b7ae4dc2131895f15d6fb3250cf3b95e46e71528ab3c53f52b",
    ),
];

/// Smallest subgroup order accepted by [`gen_group`].
pub const MIN_GROUP_BITS: u64 = 32;

/// Candidate budget for a fresh safe-prime search.
pub const DEFAULT_SEARCH_BUDGET: usize = 4_000_000;

/// Element of the order-`q` subgroup, as an integer in `[1, P-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement(BigUint);

impl GroupElement {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

/// Exponent in `[0, q-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(BigUint);

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Public group description `(P, q, g, C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    g: GroupElement,
    c: GroupElement,
    lambda_bits: u64,
}

/// Samples a fresh group with a `lambda_bits`-bit subgroup order.
///
/// Sizes with a precomputed safe prime reuse it; other sizes run a sieved
/// safe-prime search.
pub fn gen_group<R: RngCore + CryptoRng + ?Sized>(lambda_bits: u64, rng: &mut R) -> Result<GroupParams> {
    gen_group_with_trapdoor(lambda_bits, rng).map(|(params, _)| params)
}

/// Like [`gen_group`] but also returns `a = log_g C`.
pub fn gen_group_with_trapdoor<R: RngCore + CryptoRng + ?Sized>(
    lambda_bits: u64,
    rng: &mut R,
) -> Result<(GroupParams, Scalar)> {
    if lambda_bits < MIN_GROUP_BITS {
        return Err(OtError::InvalidParameter(format!(
            "group needs at least {MIN_GROUP_BITS} bits, got {lambda_bits}"
        )));
    }
    let q = match fixed_subgroup_order(lambda_bits) {
        Some(q) => q,
        None => search_safe_prime(lambda_bits, DEFAULT_SEARCH_BUDGET, rng)?,
    };
    Ok(GroupParams::from_subgroup_order(q, rng))
}

fn fixed_subgroup_order(bits: u64) -> Option<BigUint> {
    FIXED_SUBGROUP_ORDERS
        .iter()
        .find(|(b, _)| *b == bits)
        .map(|(_, hex)| BigUint::parse_bytes(hex.as_bytes(), 16).expect("valid hex constant"))
}

/// Searches for a prime `q` of exactly `bits` bits with `2q + 1` prime,
/// giving up after `budget` candidates.
pub fn search_safe_prime<R: RngCore + CryptoRng + ?Sized>(
    bits: u64,
    budget: usize,
    rng: &mut R,
) -> Result<BigUint> {
    let mut tried = 0usize;
    while tried < budget {
        let mut q = prime::random_bits(bits, 2, rng);
        q.set_bit(0, true);
        let mut residues: Vec<u32> = SMALL_PRIMES
            .iter()
            .map(|&sp| (&q % sp).to_u32_digits().first().copied().unwrap_or(0))
            .collect();
        // walk q, q+2, q+4, ... updating residues instead of dividing again
        for step in 0..4096u32 {
            if tried >= budget {
                break;
            }
            tried += 1;
            let sieved = SMALL_PRIMES.iter().zip(&residues).any(|(&sp, &r)| {
                r == 0 || (2 * r + 1) % sp == 0
            });
            if !sieved {
                let candidate = &q + 2u32 * step;
                if candidate.bits() != bits {
                    break;
                }
                let safe = (&candidate << 1) + 1u32;
                if prime::fermat_base2(&candidate)
                    && prime::fermat_base2(&safe)
                    && prime::is_probable_prime(&candidate, MR_ROUNDS, rng)
                    && prime::is_probable_prime(&safe, MR_ROUNDS, rng)
                {
                    return Ok(candidate);
                }
            }
            for (r, &sp) in residues.iter_mut().zip(SMALL_PRIMES) {
                *r = (*r + 2) % sp;
            }
        }
    }
    Err(OtError::PrimeSearchExhausted)
}

impl GroupParams {
    /// The toy group `P = 23, q = 11, g = 4` with a fresh `C`.
    pub fn toy<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> GroupParams {
        Self::toy_with_trapdoor(rng).0
    }

    pub fn toy_with_trapdoor<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> (GroupParams, Scalar) {
        let p = BigUint::from(23u32);
        let q = BigUint::from(11u32);
        let g = GroupElement(BigUint::from(4u32));
        Self::with_generator(p, q, g, rng)
    }

    /// Builds `P = 2q + 1` with a random generator and a random `C = g^a`.
    fn from_subgroup_order<R: RngCore + CryptoRng + ?Sized>(q: BigUint, rng: &mut R) -> (GroupParams, Scalar) {
        let p: BigUint = (&q << 1) + 1u32;
        let span = &p - 3u32;
        let g = loop {
            // squares of h in [2, P-2] are exactly the non-identity subgroup elements
            let h = prime::random_below(&span, rng) + 2u32;
            let g = h.modpow(&BigUint::from(2u32), &p);
            if !g.is_one() {
                break GroupElement(g);
            }
        };
        Self::with_generator(p, q, g, rng)
    }

    fn with_generator<R: RngCore + CryptoRng + ?Sized>(
        p: BigUint,
        q: BigUint,
        g: GroupElement,
        rng: &mut R,
    ) -> (GroupParams, Scalar) {
        let lambda_bits = q.bits();
        let mut params = GroupParams {
            c: g.clone(),
            p,
            q,
            g,
            lambda_bits,
        };
        let a = params.rand_nonzero_scalar(rng);
        params.c = params.exp_g(&a);
        (params, a)
    }

    /// Validates and assembles externally supplied parameters.
    pub fn from_parts<R: RngCore + CryptoRng + ?Sized>(
        p: BigUint,
        q: BigUint,
        g: BigUint,
        c: BigUint,
        rng: &mut R,
    ) -> Result<GroupParams> {
        let invalid = |what: &str| Err(OtError::InvalidParameter(what.to_string()));
        if p != (&q << 1) + 1u32 {
            return invalid("P != 2q + 1");
        }
        if !prime::is_probable_prime(&q, MR_ROUNDS, rng) || !prime::is_probable_prime(&p, MR_ROUNDS, rng) {
            return invalid("P or q is not prime");
        }
        let params = GroupParams {
            lambda_bits: q.bits(),
            g: GroupElement(g),
            c: GroupElement(c),
            p,
            q,
        };
        if params.g.0.is_one() || !params.contains(&params.g.0) {
            return invalid("g does not generate the order-q subgroup");
        }
        if !params.contains(&params.c.0) {
            return invalid("C is outside the subgroup");
        }
        Ok(params)
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn g(&self) -> &GroupElement {
        &self.g
    }

    pub fn c(&self) -> &GroupElement {
        &self.c
    }

    /// Bit length of the subgroup order.
    pub fn lambda_bits(&self) -> u64 {
        self.lambda_bits
    }

    /// Fixed byte width of an encoded element.
    pub fn element_bytes(&self) -> usize {
        encoding::byte_width(&self.p)
    }

    /// True if `x` lies in `[1, P-1]` and has order dividing `q`.
    pub fn contains(&self, x: &BigUint) -> bool {
        !x.is_zero() && x < &self.p && x.modpow(&self.q, &self.p).is_one()
    }

    /// Wraps a raw integer after checking subgroup membership.
    pub fn element(&self, x: BigUint) -> Result<GroupElement> {
        if self.contains(&x) {
            Ok(GroupElement(x))
        } else {
            Err(OtError::DecodeError("value is not a subgroup element".into()))
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(BigUint::one())
    }

    pub fn modexp(&self, base: &GroupElement, e: &Scalar) -> GroupElement {
        GroupElement(base.0.modpow(&e.0, &self.p))
    }

    pub fn exp_g(&self, e: &Scalar) -> GroupElement {
        self.modexp(&self.g, e)
    }

    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement((&x.0 * &y.0) % &self.p)
    }

    pub fn inverse(&self, x: &GroupElement) -> GroupElement {
        // subgroup elements are nonzero mod the prime P, hence units
        GroupElement(x.0.modinv(&self.p).expect("group elements are units"))
    }

    /// `x * y^-1 mod P`.
    pub fn div(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.mul(x, &self.inverse(y))
    }

    /// Uniform scalar in `[0, q-1]`.
    pub fn rand_scalar<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(prime::random_below(&self.q, rng))
    }

    /// Uniform scalar in `[1, q-1]`.
    pub fn rand_nonzero_scalar<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.rand_scalar(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// Reduces an arbitrary integer into the exponent ring.
    pub fn scalar(&self, v: impl Into<BigUint>) -> Scalar {
        Scalar(v.into() % &self.q)
    }

    pub fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % &self.q)
    }

    pub fn scalar_neg(&self, a: &Scalar) -> Scalar {
        if a.0.is_zero() {
            a.clone()
        } else {
            Scalar(&self.q - &a.0)
        }
    }

    pub fn scalar_sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.scalar_add(a, &self.scalar_neg(b))
    }

    pub fn encode_element(&self, out: &mut Vec<u8>, x: &GroupElement) {
        encoding::put_biguint_fixed(out, &x.0, self.element_bytes());
    }

    pub fn decode_element(&self, r: &mut Reader<'_>) -> Result<GroupElement> {
        self.element(r.biguint()?)
    }

    pub fn encode_scalar(&self, out: &mut Vec<u8>, s: &Scalar) {
        encoding::put_biguint_fixed(out, &s.0, encoding::byte_width(&self.q));
    }

    pub fn decode_scalar(&self, r: &mut Reader<'_>) -> Result<Scalar> {
        let v = r.biguint()?;
        if v >= self.q {
            return Err(OtError::DecodeError("scalar not below q".into()));
        }
        Ok(Scalar(v))
    }

    /// Fixed-width big-endian bytes of an element, the input fed to the
    /// random-oracle hashes.
    pub fn element_to_bytes(&self, x: &GroupElement) -> Vec<u8> {
        encoding::to_fixed_be(&x.0, self.element_bytes())
    }

    /// Serializes as the ordered tuple `(P, q, g, C)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for v in [&self.p, &self.q, &self.g.0, &self.c.0] {
            encoding::put_biguint(&mut out, v);
        }
        out
    }

    pub fn from_bytes<R: RngCore + CryptoRng + ?Sized>(bytes: &[u8], rng: &mut R) -> Result<GroupParams> {
        let mut r = Reader::new(bytes);
        let p = r.biguint()?;
        let q = r.biguint()?;
        let g = r.biguint()?;
        let c = r.biguint()?;
        r.finish()?;
        Self::from_parts(p, q, g, c, rng)
    }

    /// `value` if `negate` is false, `-value mod q` otherwise.
    pub(crate) fn signed(&self, value: &Scalar, negate: bool) -> Scalar {
        if negate {
            self.scalar_neg(value)
        } else {
            value.clone()
        }
    }

    #[cfg(test)]
    pub(crate) fn raw_element(x: u64) -> GroupElement {
        GroupElement(BigUint::from(x))
    }
}

impl std::fmt::Display for GroupParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "group(|q| = {} bits, |P| = {} bits)", self.lambda_bits, self.p.bits())
    }
}

/// Retained-trapdoor group for checking exponent identities directly.
#[derive(Clone, Debug)]
pub struct DebugGroup {
    pub params: GroupParams,
    /// `log_g C`.
    pub a: Scalar,
}

impl DebugGroup {
    pub fn toy<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> DebugGroup {
        let (params, a) = GroupParams::toy_with_trapdoor(rng);
        DebugGroup { params, a }
    }

    pub fn generate<R: RngCore + CryptoRng + ?Sized>(lambda_bits: u64, rng: &mut R) -> Result<DebugGroup> {
        let (params, a) = gen_group_with_trapdoor(lambda_bits, rng)?;
        Ok(DebugGroup { params, a })
    }
}
