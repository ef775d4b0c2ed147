//! Delegated-query OT and its multi-receiver extension.

use rand::{CryptoRng, RngCore};

use crate::base_ot::{check_lengths, mask_message, unmask_message, NpResponse};
use crate::encoding::{put_u8, Reader};
use crate::error::{bit_from_u64, OtError, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::primitives::{controlled_swap, share_with_coin, ss_share, BitShares, ByteString};

/// `req_i = (s_i, r_i)` sent by the receiver to helper `P_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationRequest {
    pub share: bool,
    pub blind: Scalar,
}

/// `(delta_0, delta_1)` computed by `P2`; `delta_0 * delta_1 = C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialQueryPair {
    pub d0: GroupElement,
    pub d1: GroupElement,
}

/// `(beta_0, beta_1)` computed by `P1`; `beta_0 * beta_1 = C` when honest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalQueryPair {
    pub b0: GroupElement,
    pub b1: GroupElement,
}

impl DelegationRequest {
    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        put_u8(out, self.share as u8);
        pk.encode_scalar(out, &self.blind);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        let share = bit_from_u64(r.u8()? as u64)?;
        Ok(DelegationRequest { share, blind: pk.decode_scalar(r)? })
    }
}

impl PartialQueryPair {
    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        pk.encode_element(out, &self.d0);
        pk.encode_element(out, &self.d1);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        Ok(PartialQueryPair { d0: pk.decode_element(r)?, d1: pk.decode_element(r)? })
    }
}

impl FinalQueryPair {
    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        pk.encode_element(out, &self.b0);
        pk.encode_element(out, &self.b1);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        Ok(FinalQueryPair { b0: pk.decode_element(r)?, b1: pk.decode_element(r)? })
    }
}

/// The sender's `z` message pairs, all components of one common length.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<(ByteString, ByteString)>", into = "Vec<(ByteString, ByteString)>")]
pub struct MessageDatabase {
    pairs: Vec<(ByteString, ByteString)>,
}

impl MessageDatabase {
    pub fn new(pairs: Vec<(ByteString, ByteString)>) -> Result<Self> {
        let Some((first, _)) = pairs.first() else {
            return Err(OtError::InvalidParameter("database must hold at least one pair".into()));
        };
        let len = first.len();
        for (m0, m1) in &pairs {
            for m in [m0, m1] {
                if m.len() != len {
                    return Err(OtError::LengthMismatch { expected: len, got: m.len() });
                }
            }
        }
        Ok(MessageDatabase { pairs })
    }

    /// Parses one record per non-empty line: two whitespace-separated hex
    /// fields, each left-padded to `sigma_bytes`.
    pub fn parse_text(text: &str, sigma_bytes: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => continue,
                [a, b] => pairs.push((
                    ByteString::from_hex_padded(a, sigma_bytes)?,
                    ByteString::from_hex_padded(b, sigma_bytes)?,
                )),
                _ => {
                    return Err(OtError::DecodeError(format!(
                        "line {}: expected two hex fields, got {}",
                        lineno + 1,
                        fields.len()
                    )))
                }
            }
        }
        Self::new(pairs)
    }

    pub fn to_text(&self) -> String {
        self.pairs.iter().map(|(a, b)| format!("{} {}\n", a.to_hex(), b.to_hex())).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn message_len(&self) -> usize {
        self.pairs[0].0.len()
    }

    pub fn pairs(&self) -> &[(ByteString, ByteString)] {
        &self.pairs
    }

    pub fn pair(&self, t: usize) -> Result<&(ByteString, ByteString)> {
        self.pairs.get(t).ok_or(OtError::IndexOutOfRange { index: t, len: self.pairs.len() })
    }
}

impl TryFrom<Vec<(ByteString, ByteString)>> for MessageDatabase {
    type Error = OtError;

    fn try_from(pairs: Vec<(ByteString, ByteString)>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<MessageDatabase> for Vec<(ByteString, ByteString)> {
    fn from(db: MessageDatabase) -> Self {
        db.pairs
    }
}

/// Shares `s` and draws both blinds.
pub fn dq_r_request<R: RngCore + CryptoRng + ?Sized>(
    s: bool,
    pk: &GroupParams,
    rng: &mut R,
) -> (DelegationRequest, DelegationRequest) {
    let shares = ss_share(s, rng);
    let r1 = pk.rand_scalar(rng);
    let r2 = pk.rand_scalar(rng);
    dq_request_with(shares, r1, r2)
}

/// Deterministic core of [`dq_r_request`].
pub fn dq_request_with(shares: BitShares, r1: Scalar, r2: Scalar) -> (DelegationRequest, DelegationRequest) {
    (
        DelegationRequest { share: shares.s1, blind: r1 },
        DelegationRequest { share: shares.s2, blind: r2 },
    )
}

/// Same as [`dq_request_with`] with shares built from an explicit coin.
pub fn dq_request_from_coin(s: bool, coin: bool, r1: Scalar, r2: Scalar) -> (DelegationRequest, DelegationRequest) {
    dq_request_with(share_with_coin(s, coin), r1, r2)
}

/// `delta_{s2} = g^{r2}`, `delta_{1-s2} = C / g^{r2}`.
pub fn dq_p2_gen_query(req2: &DelegationRequest, pk: &GroupParams) -> PartialQueryPair {
    let g_r2 = pk.exp_g(&req2.blind);
    let other = pk.div(pk.c(), &g_r2);
    let (d0, d1) = controlled_swap(req2.share, (g_r2, other));
    PartialQueryPair { d0, d1 }
}

/// `beta_{s1} = delta_0 * g^{r1}`, `beta_{1-s1} = delta_1 / g^{r1}`.
pub fn dq_p1_gen_query(req1: &DelegationRequest, partial: &PartialQueryPair, pk: &GroupParams) -> FinalQueryPair {
    let g_r1 = pk.exp_g(&req1.blind);
    let up = pk.mul(&partial.d0, &g_r1);
    let down = pk.div(&partial.d1, &g_r1);
    let (b0, b1) = controlled_swap(req1.share, (up, down));
    FinalQueryPair { b0, b1 }
}

pub fn check_consistency(pk: &GroupParams, query: &FinalQueryPair) -> Result<()> {
    if &pk.mul(&query.b0, &query.b1) != pk.c() {
        return Err(OtError::ConsistencyAbort);
    }
    Ok(())
}

pub fn dq_s_gen_res<R: RngCore + CryptoRng + ?Sized>(
    m0: &ByteString,
    m1: &ByteString,
    pk: &GroupParams,
    query: &FinalQueryPair,
    rng: &mut R,
) -> Result<NpResponse> {
    check_lengths(m0, m1)?;
    check_consistency(pk, query)?;
    respond(m0, m1, pk, query, rng)
}

fn respond<R: RngCore + CryptoRng + ?Sized>(
    m0: &ByteString,
    m1: &ByteString,
    pk: &GroupParams,
    query: &FinalQueryPair,
    rng: &mut R,
) -> Result<NpResponse> {
    Ok(NpResponse {
        e0: mask_message(pk, &query.b0, m0, rng)?,
        e1: mask_message(pk, &query.b1, m1, rng)?,
    })
}

/// `x = r2 + r1 * (-1)^{s2} mod q`.
pub fn retrieval_exponent(pk: &GroupParams, r1: &Scalar, r2: &Scalar, s2: bool) -> Scalar {
    pk.scalar_add(r2, &pk.signed(r1, s2))
}

pub fn dq_r_retrieve(
    res: &NpResponse,
    req1: &DelegationRequest,
    req2: &DelegationRequest,
    s: bool,
    pk: &GroupParams,
) -> Result<ByteString> {
    let x = retrieval_exponent(pk, &req1.blind, &req2.blind, req2.share);
    unmask_message(pk, res.element(s), &x)
}

/// One independent response per database entry, after a single consistency
/// check.
pub fn dqmr_s_gen_res_multi<R: RngCore + CryptoRng + ?Sized>(
    db: &MessageDatabase,
    pk: &GroupParams,
    query: &FinalQueryPair,
    rng: &mut R,
) -> Result<Vec<NpResponse>> {
    check_consistency(pk, query)?;
    db.pairs().iter().map(|(m0, m1)| respond(m0, m1, pk, query, rng)).collect()
}

pub fn dqmr_p1_filter(responses: &[NpResponse], v: usize) -> Result<NpResponse> {
    responses.get(v).cloned().ok_or(OtError::IndexOutOfRange { index: v, len: responses.len() })
}
