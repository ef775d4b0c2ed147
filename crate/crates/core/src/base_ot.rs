//! Naor-Pinkas 1-out-of-2 OT and the four-operation contract that the
//! constant-response compiler wraps.

use rand::{CryptoRng, RngCore};

use crate::encoding::Reader;
use crate::error::{OtError, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::primitives::{controlled_swap, hash_h, xor_bytes, ByteString};

/// Receiver state kept between query and retrieval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpSecret {
    pub r: Scalar,
    pub s: bool,
}

/// One masked message: `(g^y, H(beta^y) XOR m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpElement {
    pub point: GroupElement,
    pub masked: ByteString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpResponse {
    pub e0: NpElement,
    pub e1: NpElement,
}

impl NpElement {
    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        pk.encode_element(out, &self.point);
        self.masked.encode(out);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        Ok(NpElement { point: pk.decode_element(r)?, masked: ByteString::decode(r)? })
    }
}

impl NpResponse {
    pub fn element(&self, index: bool) -> &NpElement {
        if index {
            &self.e1
        } else {
            &self.e0
        }
    }

    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        self.e0.encode(pk, out);
        self.e1.encode(pk, out);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        Ok(NpResponse { e0: NpElement::decode(pk, r)?, e1: NpElement::decode(pk, r)? })
    }
}

/// Masks `msg` under the public query element `beta` with fresh `y`.
pub(crate) fn mask_message<R: RngCore + CryptoRng + ?Sized>(
    pk: &GroupParams,
    beta: &GroupElement,
    msg: &ByteString,
    rng: &mut R,
) -> Result<NpElement> {
    let y = pk.rand_scalar(rng);
    let shared = pk.modexp(beta, &y);
    let pad = hash_h(&pk.element_to_bytes(&shared), msg.bit_len())?;
    Ok(NpElement { point: pk.exp_g(&y), masked: xor_bytes(&pad, msg)? })
}

/// `H(point^x) XOR masked`.
pub(crate) fn unmask_message(pk: &GroupParams, element: &NpElement, x: &Scalar) -> Result<ByteString> {
    let shared = pk.modexp(&element.point, x);
    let pad = hash_h(&pk.element_to_bytes(&shared), element.masked.bit_len())?;
    xor_bytes(&pad, &element.masked)
}

pub(crate) fn check_lengths(m0: &ByteString, m1: &ByteString) -> Result<()> {
    if m0.len() != m1.len() {
        return Err(OtError::LengthMismatch { expected: m0.len(), got: m1.len() });
    }
    Ok(())
}

/// Receiver query: `beta_s = g^r`, `beta_{1-s} = C / beta_s`; only `beta_0`
/// is sent.
pub fn np_gen_query<R: RngCore + CryptoRng + ?Sized>(
    pk: &GroupParams,
    s: bool,
    rng: &mut R,
) -> (GroupElement, NpSecret) {
    let r = pk.rand_nonzero_scalar(rng);
    np_query_with(pk, s, r)
}

/// Deterministic core of [`np_gen_query`].
pub fn np_query_with(pk: &GroupParams, s: bool, r: Scalar) -> (GroupElement, NpSecret) {
    let beta_s = pk.exp_g(&r);
    let beta_other = pk.div(pk.c(), &beta_s);
    let (beta0, _) = controlled_swap(s, (beta_s, beta_other));
    (beta0, NpSecret { r, s })
}

pub fn np_gen_res<R: RngCore + CryptoRng + ?Sized>(
    m0: &ByteString,
    m1: &ByteString,
    pk: &GroupParams,
    query: &GroupElement,
    rng: &mut R,
) -> Result<NpResponse> {
    check_lengths(m0, m1)?;
    let beta1 = pk.div(pk.c(), query);
    Ok(NpResponse {
        e0: mask_message(pk, query, m0, rng)?,
        e1: mask_message(pk, &beta1, m1, rng)?,
    })
}

pub fn np_retrieve(res: &NpResponse, secret: &NpSecret, pk: &GroupParams) -> Result<ByteString> {
    unmask_message(pk, res.element(secret.s), &secret.r)
}

/// One element of a conventional OT response, as a list of `w` byte-string
/// components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseElement {
    pub components: Vec<Vec<u8>>,
}

/// A conventional 1-out-of-n OT split into its four algorithms.
///
/// `gen_res` returns one [`ResponseElement`] per message; `retrieve` is
/// handed only the element at the receiver's index, which is what a
/// compressed response decrypts to.
pub trait ConventionalOtSuite {
    type PublicKey;
    type Query;
    type Secret;

    fn init<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<Self::PublicKey>;

    fn gen_query<R: RngCore + CryptoRng + ?Sized>(
        &self,
        pk: &Self::PublicKey,
        n: usize,
        s: usize,
        rng: &mut R,
    ) -> Result<(Self::Query, Self::Secret)>;

    fn gen_res<R: RngCore + CryptoRng + ?Sized>(
        &self,
        msgs: &[ByteString],
        pk: &Self::PublicKey,
        query: &Self::Query,
        rng: &mut R,
    ) -> Result<Vec<ResponseElement>>;

    fn retrieve(
        &self,
        element: &ResponseElement,
        query: &Self::Query,
        secret: &Self::Secret,
        pk: &Self::PublicKey,
        s: usize,
    ) -> Result<ByteString>;

    /// Maximum byte length of each of the `w` components of an element.
    fn component_widths(&self, pk: &Self::PublicKey) -> Vec<usize>;

    fn encode_query(&self, pk: &Self::PublicKey, query: &Self::Query, out: &mut Vec<u8>);

    fn decode_query(&self, pk: &Self::PublicKey, r: &mut Reader<'_>) -> Result<Self::Query>;
}

/// How the Naor-Pinkas suite creates the group in `init`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSource {
    Toy,
    Bits(u64),
}

/// Naor-Pinkas as a [`ConventionalOtSuite`].
///
/// For `n = 2` this is the textbook protocol. For `n > 2` the receiver sends
/// the degenerate query for bit 0 and every message is masked under
/// `beta_0`; receiver privacy against the sender is unchanged, and only the
/// compiler's selector keeps the other messages from the receiver.
#[derive(Clone, Debug)]
pub struct NaorPinkasSuite {
    pub sigma_bits: usize,
    pub group: GroupSource,
}

impl NaorPinkasSuite {
    pub fn new(sigma_bits: usize, group: GroupSource) -> Self {
        NaorPinkasSuite { sigma_bits, group }
    }
}

impl ConventionalOtSuite for NaorPinkasSuite {
    type PublicKey = GroupParams;
    type Query = GroupElement;
    type Secret = NpSecret;

    fn init<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<GroupParams> {
        match self.group {
            GroupSource::Toy => Ok(GroupParams::toy(rng)),
            GroupSource::Bits(bits) => crate::group::gen_group(bits, rng),
        }
    }

    fn gen_query<R: RngCore + CryptoRng + ?Sized>(
        &self,
        pk: &GroupParams,
        n: usize,
        s: usize,
        rng: &mut R,
    ) -> Result<(GroupElement, NpSecret)> {
        if n < 2 || s >= n {
            return Err(OtError::IndexOutOfRange { index: s, len: n });
        }
        let bit = n == 2 && s == 1;
        Ok(np_gen_query(pk, bit, rng))
    }

    fn gen_res<R: RngCore + CryptoRng + ?Sized>(
        &self,
        msgs: &[ByteString],
        pk: &GroupParams,
        query: &GroupElement,
        rng: &mut R,
    ) -> Result<Vec<ResponseElement>> {
        let sigma_bytes = self.sigma_bits / 8;
        if let Some(bad) = msgs.iter().find(|m| m.len() != sigma_bytes) {
            return Err(OtError::LengthMismatch { expected: sigma_bytes, got: bad.len() });
        }
        let to_element = |e: NpElement| ResponseElement {
            components: vec![pk.element_to_bytes(&e.point), e.masked.into_bytes()],
        };
        match msgs {
            [m0, m1] => {
                let res = np_gen_res(m0, m1, pk, query, rng)?;
                Ok(vec![to_element(res.e0), to_element(res.e1)])
            }
            _ if msgs.len() > 2 => msgs
                .iter()
                .map(|m| mask_message(pk, query, m, rng).map(to_element))
                .collect(),
            _ => Err(OtError::InvalidParameter("need at least two messages".into())),
        }
    }

    fn retrieve(
        &self,
        element: &ResponseElement,
        _query: &GroupElement,
        secret: &NpSecret,
        pk: &GroupParams,
        _s: usize,
    ) -> Result<ByteString> {
        let [point, masked] = element.components.as_slice() else {
            return Err(OtError::DecodeError(format!(
                "expected 2 components, got {}",
                element.components.len()
            )));
        };
        if point.len() != pk.element_bytes() || masked.len() != self.sigma_bits / 8 {
            return Err(OtError::DecodeError("response component has the wrong width".into()));
        }
        let point = pk.element(num_bigint::BigUint::from_bytes_be(point))?;
        let element = NpElement { point, masked: ByteString::from(masked.as_slice()) };
        unmask_message(pk, &element, &secret.r)
    }

    fn component_widths(&self, pk: &GroupParams) -> Vec<usize> {
        vec![pk.element_bytes(), self.sigma_bits / 8]
    }

    fn encode_query(&self, pk: &GroupParams, query: &GroupElement, out: &mut Vec<u8>) {
        pk.encode_element(out, query);
    }

    fn decode_query(&self, pk: &GroupParams, r: &mut Reader<'_>) -> Result<GroupElement> {
        pk.decode_element(r)
    }
}
