//! Unknown-query OT, where an issuer `T` holds the index and the receiver
//! recognises its message by a tag, and the multi-receiver variant with
//! Paillier filtering at `P1`.

use num_bigint::BigUint;
use rand::{CryptoRng, RngCore};

use crate::dq::{check_consistency, retrieval_exponent, DelegationRequest, FinalQueryPair, MessageDatabase};
use crate::base_ot::check_lengths;
use crate::encoding::{byte_width, put_u8, to_fixed_be, Reader};
use crate::error::{bit_from_u64, OtError, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::paillier::{self, HomCiphertext, PaillierPublicKey, PaillierSecretKey};
use crate::primitives::{hash_g, parse, random_permute_pair, ss_share, xor_bytes, ByteString};

/// What `T` hands out: `s1` to `P1`, `s2` to `P2`, the tag to `S`, and
/// `(s2, tag)` to `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssuerBundle {
    pub share1: bool,
    pub share2: bool,
    pub tag: ByteString,
}

/// `(r1, r2)`; the receiver holds no share of the index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverBlinds {
    pub r1: Scalar,
    pub r2: Scalar,
}

/// `(g^y, G(beta^y) XOR (m || tag))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedElement {
    pub point: GroupElement,
    pub masked: ByteString,
}

/// A tagged pair in the order chosen by the sender's permutation coin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedResponse {
    pub e0: TaggedElement,
    pub e1: TaggedElement,
}

/// Encrypted one-hot vector with its 1 at the receiver's record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressVector {
    pub entries: Vec<HomCiphertext>,
}

/// `o_{i,i'}`: slot `i` of the permuted pair, component `i'` (0 = group
/// element, 1 = masked payload).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredResponse {
    pub o00: HomCiphertext,
    pub o01: HomCiphertext,
    pub o10: HomCiphertext,
    pub o11: HomCiphertext,
}

impl IssuerBundle {
    /// The secret parameter for `R`: `(s2, tag)`.
    pub fn encode_sp_r(&self, out: &mut Vec<u8>) {
        put_u8(out, self.share2 as u8);
        self.tag.encode(out);
    }

    pub fn decode_sp_r(r: &mut Reader<'_>) -> Result<(bool, ByteString)> {
        let share2 = bit_from_u64(r.u8()? as u64)?;
        Ok((share2, ByteString::decode(r)?))
    }
}

impl TaggedElement {
    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        pk.encode_element(out, &self.point);
        self.masked.encode(out);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        Ok(TaggedElement { point: pk.decode_element(r)?, masked: ByteString::decode(r)? })
    }
}

impl TaggedResponse {
    pub fn encode(&self, pk: &GroupParams, out: &mut Vec<u8>) {
        self.e0.encode(pk, out);
        self.e1.encode(pk, out);
    }

    pub fn decode(pk: &GroupParams, r: &mut Reader<'_>) -> Result<Self> {
        Ok(TaggedResponse { e0: TaggedElement::decode(pk, r)?, e1: TaggedElement::decode(pk, r)? })
    }
}

impl CompressVector {
    pub fn encode(&self, pk: &PaillierPublicKey, out: &mut Vec<u8>) {
        crate::encoding::put_u32(out, self.entries.len() as u32);
        for c in &self.entries {
            pk.encode_ciphertext(out, c);
        }
    }

    pub fn decode(pk: &PaillierPublicKey, r: &mut Reader<'_>) -> Result<Self> {
        let len = r.u32()? as usize;
        let entries = (0..len).map(|_| pk.decode_ciphertext(r)).collect::<Result<_>>()?;
        Ok(CompressVector { entries })
    }
}

impl FilteredResponse {
    pub fn ciphertexts(&self) -> [&HomCiphertext; 4] {
        [&self.o00, &self.o01, &self.o10, &self.o11]
    }

    pub fn encode(&self, pk: &PaillierPublicKey, out: &mut Vec<u8>) {
        for c in self.ciphertexts() {
            pk.encode_ciphertext(out, c);
        }
    }

    pub fn decode(pk: &PaillierPublicKey, r: &mut Reader<'_>) -> Result<Self> {
        Ok(FilteredResponse {
            o00: pk.decode_ciphertext(r)?,
            o01: pk.decode_ciphertext(r)?,
            o10: pk.decode_ciphertext(r)?,
            o11: pk.decode_ciphertext(r)?,
        })
    }
}

/// `T` shares `s` and draws a fresh `lambda`-bit tag.
pub fn duq_t_request<R: RngCore + CryptoRng + ?Sized>(
    s: bool,
    lambda_bits: usize,
    rng: &mut R,
) -> Result<IssuerBundle> {
    if lambda_bits == 0 || !lambda_bits.is_multiple_of(8) {
        return Err(OtError::InvalidParameter(format!("tag length {lambda_bits} is not a positive multiple of 8")));
    }
    let shares = ss_share(s, rng);
    Ok(IssuerBundle { share1: shares.s1, share2: shares.s2, tag: ByteString::random(lambda_bits / 8, rng) })
}

pub fn duq_r_request<R: RngCore + CryptoRng + ?Sized>(pk: &GroupParams, rng: &mut R) -> ReceiverBlinds {
    let r1 = pk.rand_scalar(rng);
    let r2 = pk.rand_scalar(rng);
    ReceiverBlinds { r1, r2 }
}

/// The helpers' inputs: `P1` gets `(s1, r1)`, `P2` gets `(s2, r2)`.
pub fn duq_delegation(bundle: &IssuerBundle, blinds: &ReceiverBlinds) -> (DelegationRequest, DelegationRequest) {
    (
        DelegationRequest { share: bundle.share1, blind: blinds.r1.clone() },
        DelegationRequest { share: bundle.share2, blind: blinds.r2.clone() },
    )
}

fn tag_element<R: RngCore + CryptoRng + ?Sized>(
    pk: &GroupParams,
    beta: &GroupElement,
    msg: &ByteString,
    tag: &ByteString,
    rng: &mut R,
) -> Result<TaggedElement> {
    let y = pk.rand_scalar(rng);
    let shared = pk.modexp(beta, &y);
    let pad = hash_g(&pk.element_to_bytes(&shared), msg.bit_len(), tag.bit_len())?;
    Ok(TaggedElement { point: pk.exp_g(&y), masked: xor_bytes(&pad, &msg.concat(tag))? })
}

fn respond<R: RngCore + CryptoRng + ?Sized>(
    m0: &ByteString,
    m1: &ByteString,
    pk: &GroupParams,
    query: &FinalQueryPair,
    tag: &ByteString,
    rng: &mut R,
) -> Result<TaggedResponse> {
    check_lengths(m0, m1)?;
    let e0 = tag_element(pk, &query.b0, m0, tag, rng)?;
    let e1 = tag_element(pk, &query.b1, m1, tag, rng)?;
    let (e0, e1) = random_permute_pair((e0, e1), rng);
    Ok(TaggedResponse { e0, e1 })
}

pub fn duq_s_gen_res<R: RngCore + CryptoRng + ?Sized>(
    m0: &ByteString,
    m1: &ByteString,
    pk: &GroupParams,
    query: &FinalQueryPair,
    tag: &ByteString,
    rng: &mut R,
) -> Result<TaggedResponse> {
    check_lengths(m0, m1)?;
    check_consistency(pk, query)?;
    respond(m0, m1, pk, query, tag, rng)
}

/// Unmasks one candidate; `None` when its suffix is not `tag`.
fn open_candidate(pk: &GroupParams, element: &TaggedElement, x: &Scalar, tag: &ByteString) -> Result<Option<ByteString>> {
    if element.masked.len() <= tag.len() {
        return Ok(None);
    }
    let shared = pk.modexp(&element.point, x);
    let sigma_bits = element.masked.bit_len() - tag.bit_len();
    let pad = hash_g(&pk.element_to_bytes(&shared), sigma_bits, tag.bit_len())?;
    let (u1, u2) = parse(tag.bit_len(), &xor_bytes(&pad, &element.masked)?)?;
    Ok((&u2 == tag).then_some(u1))
}

/// Tries both slots; undecodable slots count as non-matching.
fn retrieve_from_slots(
    slots: [Option<TaggedElement>; 2],
    x: &Scalar,
    tag: &ByteString,
    pk: &GroupParams,
) -> Result<ByteString> {
    let mut found = Vec::with_capacity(2);
    for element in slots.iter().flatten() {
        if let Some(m) = open_candidate(pk, element, x, tag)? {
            found.push(m);
        }
    }
    match found.len() {
        0 => Err(OtError::NoTagMatch),
        1 => Ok(found.pop().expect("one candidate")),
        _ => Err(OtError::AmbiguousTag),
    }
}

pub fn duq_r_retrieve(
    res: &TaggedResponse,
    blinds: &ReceiverBlinds,
    share2: bool,
    tag: &ByteString,
    pk: &GroupParams,
) -> Result<ByteString> {
    let x = retrieval_exponent(pk, &blinds.r1, &blinds.r2, share2);
    retrieve_from_slots([Some(res.e0.clone()), Some(res.e1.clone())], &x, tag, pk)
}

/// Smallest modulus size that embeds both a group element and a
/// `(sigma + lambda)`-bit payload.
pub fn required_key_bits(pk: &GroupParams, sigma_bits: usize, lambda_bits: usize) -> u64 {
    pk.p().bits().max((sigma_bits + lambda_bits) as u64) + 1
}

/// Receiver key generation, refusing sizes that cannot embed the response.
pub fn duqmr_r_setup<R: RngCore + CryptoRng + ?Sized>(
    bits: u64,
    pk: &GroupParams,
    sigma_bits: usize,
    lambda_bits: usize,
    rng: &mut R,
) -> Result<(PaillierPublicKey, PaillierSecretKey)> {
    let need = required_key_bits(pk, sigma_bits, lambda_bits);
    if bits < need {
        return Err(OtError::KeyTooSmall { have: bits, need });
    }
    paillier::kgen(bits, rng)
}

pub fn duqmr_t_setup<R: RngCore + CryptoRng + ?Sized>(
    z: usize,
    v: usize,
    pk_j: &PaillierPublicKey,
    rng: &mut R,
) -> Result<CompressVector> {
    Ok(CompressVector { entries: paillier::one_hot(pk_j, z, v, rng)? })
}

pub fn duqmr_s_gen_res_multi<R: RngCore + CryptoRng + ?Sized>(
    db: &MessageDatabase,
    pk: &GroupParams,
    query: &FinalQueryPair,
    tag: &ByteString,
    rng: &mut R,
) -> Result<Vec<TaggedResponse>> {
    check_consistency(pk, query)?;
    db.pairs().iter().map(|(m0, m1)| respond(m0, m1, pk, query, tag, rng)).collect()
}

/// `o_{i,i'} = sum_t w[t] * e'_{i,i',t}` over the homomorphic scheme.
pub fn duqmr_p1_filter(
    responses: &[TaggedResponse],
    w: &CompressVector,
    pk_j: &PaillierPublicKey,
) -> Result<FilteredResponse> {
    if responses.len() != w.entries.len() {
        return Err(OtError::LengthMismatch { expected: w.entries.len(), got: responses.len() });
    }
    let column = |pick: fn(&TaggedResponse) -> BigUint| -> Result<HomCiphertext> {
        let plaintexts: Vec<BigUint> = responses.iter().map(pick).collect();
        paillier::inner_product(pk_j, &w.entries, &plaintexts)
    };
    Ok(FilteredResponse {
        o00: column(|r| r.e0.point.value().clone())?,
        o01: column(|r| BigUint::from_bytes_be(r.e0.masked.as_bytes()))?,
        o10: column(|r| r.e1.point.value().clone())?,
        o11: column(|r| BigUint::from_bytes_be(r.e1.masked.as_bytes()))?,
    })
}

fn reassemble(pk: &GroupParams, point: BigUint, masked: BigUint, masked_len: usize) -> Option<TaggedElement> {
    let point = pk.element(point).ok()?;
    if byte_width(&masked) > masked_len {
        return None;
    }
    Some(TaggedElement { point, masked: ByteString::new(to_fixed_be(&masked, masked_len)) })
}

/// Decrypts the four components, rebuilds the permuted pair and runs the
/// tag-matching retrieval.
pub fn duqmr_r_retrieve(
    filtered: &FilteredResponse,
    sk_j: &PaillierSecretKey,
    blinds: &ReceiverBlinds,
    share2: bool,
    tag: &ByteString,
    pk: &GroupParams,
    sigma_bits: usize,
) -> Result<ByteString> {
    let [p0, c0, p1, c1] = filtered.ciphertexts().map(|c| paillier::dec(sk_j, c));
    let masked_len = sigma_bits / 8 + tag.len();
    let slots = [reassemble(pk, p0?, c0?, masked_len), reassemble(pk, p1?, c1?, masked_len)];
    let x = retrieval_exponent(pk, &blinds.r1, &blinds.r2, share2);
    retrieve_from_slots(slots, &x, tag, pk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dq::{dq_p1_gen_query, dq_p2_gen_query};
    use crate::group::gen_group;
    use crate::primitives::{ss_reconstruct, BitShares};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    struct Session {
        bundle: IssuerBundle,
        blinds: ReceiverBlinds,
        query: FinalQueryPair,
    }

    fn session(pk: &GroupParams, s: bool, lambda: usize, r: &mut ChaCha20Rng) -> Session {
        let bundle = duq_t_request(s, lambda, r).unwrap();
        let blinds = duq_r_request(pk, r);
        let (req1, req2) = duq_delegation(&bundle, &blinds);
        let query = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
        Session { bundle, blinds, query }
    }

    #[test]
    fn issuer_bundle_contract() {
        let mut r = rng(0);
        let mut tags = HashSet::new();
        for i in 0..10_000 {
            let s = i % 2 == 0;
            let b = duq_t_request(s, 128, &mut r).unwrap();
            assert_eq!(ss_reconstruct(BitShares { s1: b.share1, s2: b.share2 }), s);
            assert_eq!(b.tag.bit_len(), 128);
            assert!(tags.insert(b.tag));
        }
        assert!(duq_t_request(true, 12, &mut r).is_err());
    }

    #[test]
    fn blinds_are_seeded_and_in_range() {
        let pk = GroupParams::toy(&mut rng(1));
        let a = duq_r_request(&pk, &mut rng(2));
        assert_eq!(a, duq_r_request(&pk, &mut rng(2)));
        assert!(a.r1.value() < pk.q() && a.r2.value() < pk.q());
    }

    #[test]
    fn end_to_end_and_shape() {
        let pk = gen_group(256, &mut rng(3)).unwrap();
        for seed in 0..100u64 {
            let mut r = rng(seed);
            let m0 = ByteString::random(16, &mut r);
            let m1 = ByteString::random(16, &mut r);
            for s in [false, true] {
                let ss = session(&pk, s, 128, &mut r);
                let res = duq_s_gen_res(&m0, &m1, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
                assert_eq!(res.e0.masked.bit_len(), 256);
                assert_eq!(res.e1.masked.bit_len(), 256);
                let got = duq_r_retrieve(&res, &ss.blinds, ss.bundle.share2, &ss.bundle.tag, &pk).unwrap();
                assert_eq!(got, if s { m1.clone() } else { m0.clone() });
            }
        }
    }

    #[test]
    fn permutation_does_not_change_output() {
        let pk = gen_group(256, &mut rng(4)).unwrap();
        let mut r = rng(5);
        let m0 = ByteString::random(8, &mut r);
        let m1 = ByteString::random(8, &mut r);
        let ss = session(&pk, true, 64, &mut r);
        let res = duq_s_gen_res(&m0, &m1, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
        let flipped = TaggedResponse { e0: res.e1.clone(), e1: res.e0.clone() };
        for x in [res, flipped] {
            assert_eq!(duq_r_retrieve(&x, &ss.blinds, ss.bundle.share2, &ss.bundle.tag, &pk).unwrap(), m1);
        }
    }

    #[test]
    fn permutation_coin_is_balanced() {
        // the s-th message sits in slot 0 iff the coin was 0
        let pk = gen_group(256, &mut rng(6)).unwrap();
        let mut r = rng(7);
        let m0 = ByteString::zeros(8);
        let m1 = ByteString::from(vec![0xff; 8]);
        let n = 10_000;
        let mut stayed = 0u32;
        for _ in 0..n {
            let ss = session(&pk, false, 64, &mut r);
            let res = duq_s_gen_res(&m0, &m1, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
            let x = retrieval_exponent(&pk, &ss.blinds.r1, &ss.blinds.r2, ss.bundle.share2);
            stayed += open_candidate(&pk, &res.e0, &x, &ss.bundle.tag).unwrap().is_some() as u32;
        }
        let dev = (stayed as f64 - n as f64 / 2.0).abs();
        assert!(dev < 5.0 * (n as f64 / 4.0).sqrt(), "{stayed}");
    }

    #[test]
    fn wrong_tag_gives_no_match() {
        let pk = GroupParams::toy(&mut rng(8));
        let mut r = rng(9);
        let m = ByteString::zeros(8);
        for _ in 0..100 {
            let ss = session(&pk, false, 128, &mut r);
            let other = ByteString::random(16, &mut r);
            let res = duq_s_gen_res(&m, &m, &pk, &ss.query, &other, &mut r).unwrap();
            assert_eq!(
                duq_r_retrieve(&res, &ss.blinds, ss.bundle.share2, &ss.bundle.tag, &pk),
                Err(OtError::NoTagMatch)
            );
        }
    }

    #[test]
    fn tampered_query_aborts() {
        let pk = GroupParams::toy(&mut rng(10));
        let mut r = rng(11);
        let ss = session(&pk, true, 64, &mut r);
        let bad = FinalQueryPair { b0: pk.mul(&ss.query.b0, pk.g()), b1: ss.query.b1.clone() };
        let m = ByteString::zeros(8);
        assert_eq!(duq_s_gen_res(&m, &m, &pk, &bad, &ss.bundle.tag, &mut r), Err(OtError::ConsistencyAbort));
        let db = MessageDatabase::new(vec![(m.clone(), m.clone())]).unwrap();
        assert_eq!(
            duqmr_s_gen_res_multi(&db, &pk, &bad, &ss.bundle.tag, &mut r),
            Err(OtError::ConsistencyAbort)
        );
    }

    #[test]
    fn key_size_constraint() {
        let pk = gen_group(256, &mut rng(12)).unwrap();
        let need = required_key_bits(&pk, 128, 128);
        assert_eq!(need, 258);
        assert_eq!(
            duqmr_r_setup(256, &pk, 128, 128, &mut rng(13)).err(),
            Some(OtError::KeyTooSmall { have: 256, need })
        );
        let (pkj, skj) = duqmr_r_setup(258, &pk, 128, 128, &mut rng(13)).unwrap();
        let c = paillier::enc_u64(&pkj, 9, &mut rng(14)).unwrap();
        assert_eq!(paillier::dec(&skj, &c).unwrap(), BigUint::from(9u32));
    }

    #[test]
    fn compress_vector_shapes() {
        let (pkj, skj) = paillier::kgen(128, &mut rng(15)).unwrap();
        let w = duqmr_t_setup(4, 0, &pkj, &mut rng(16)).unwrap();
        let plain: Vec<u64> = w.entries.iter().map(|c| paillier::dec(&skj, c).unwrap().try_into().unwrap()).collect();
        assert_eq!(plain, vec![1, 0, 0, 0]);
        let distinct: HashSet<_> = w.entries.iter().collect();
        assert_eq!(distinct.len(), 4);
        assert_eq!(duqmr_t_setup(1, 0, &pkj, &mut rng(17)).unwrap().entries.len(), 1);
        assert!(duqmr_t_setup(4, 4, &pkj, &mut rng(17)).is_err());
    }

    fn database(z: usize, r: &mut ChaCha20Rng) -> MessageDatabase {
        MessageDatabase::new((0..z).map(|_| (ByteString::random(16, r), ByteString::random(16, r))).collect()).unwrap()
    }

    #[test]
    fn filter_is_exact() {
        let pk = gen_group(256, &mut rng(18)).unwrap();
        let (pkj, skj) = duqmr_r_setup(512, &pk, 128, 128, &mut rng(19)).unwrap();
        let mut r = rng(20);
        for z in [1usize, 4] {
            let db = database(z, &mut r);
            let ss = session(&pk, false, 128, &mut r);
            let all = duqmr_s_gen_res_multi(&db, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
            assert_eq!(all.len(), z);
            for v in 0..z {
                let w = duqmr_t_setup(z, v, &pkj, &mut r).unwrap();
                let f = duqmr_p1_filter(&all, &w, &pkj).unwrap();
                let dec: Vec<BigUint> = f.ciphertexts().iter().map(|c| paillier::dec(&skj, c).unwrap()).collect();
                let want = [
                    all[v].e0.point.value().clone(),
                    BigUint::from_bytes_be(all[v].e0.masked.as_bytes()),
                    all[v].e1.point.value().clone(),
                    BigUint::from_bytes_be(all[v].e1.masked.as_bytes()),
                ];
                assert_eq!(dec, want);
            }
        }
    }

    #[test]
    fn multi_receiver_end_to_end() {
        let pk = gen_group(256, &mut rng(21)).unwrap();
        let (pkj, skj) = duqmr_r_setup(512, &pk, 128, 128, &mut rng(22)).unwrap();
        let mut r = rng(23);
        let db = database(8, &mut r);
        for v in 0..8 {
            for s in [false, true] {
                let ss = session(&pk, s, 128, &mut r);
                let w = duqmr_t_setup(8, v, &pkj, &mut r).unwrap();
                let all = duqmr_s_gen_res_multi(&db, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
                let f = duqmr_p1_filter(&all, &w, &pkj).unwrap();
                let got = duqmr_r_retrieve(&f, &skj, &ss.blinds, ss.bundle.share2, &ss.bundle.tag, &pk, 128).unwrap();
                let (m0, m1) = db.pair(v).unwrap();
                assert_eq!(&got, if s { m1 } else { m0 });
            }
        }
    }

    #[test]
    fn wrong_secret_key_never_matches() {
        let pk = gen_group(256, &mut rng(24)).unwrap();
        let (pkj, _) = duqmr_r_setup(512, &pk, 128, 128, &mut rng(25)).unwrap();
        let (_, other_sk) = duqmr_r_setup(512, &pk, 128, 128, &mut rng(26)).unwrap();
        let mut r = rng(27);
        let db = database(2, &mut r);
        let ss = session(&pk, true, 128, &mut r);
        let all = duqmr_s_gen_res_multi(&db, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
        let w = duqmr_t_setup(2, 1, &pkj, &mut r).unwrap();
        let f = duqmr_p1_filter(&all, &w, &pkj).unwrap();
        let got = duqmr_r_retrieve(&f, &other_sk, &ss.blinds, ss.bundle.share2, &ss.bundle.tag, &pk, 128);
        assert!(matches!(got, Err(OtError::NoTagMatch) | Err(OtError::MalformedCiphertext)), "{got:?}");
    }

    #[test]
    fn filter_rejects_mismatch_and_overflow() {
        let pk = gen_group(256, &mut rng(28)).unwrap();
        let mut r = rng(29);
        let db = database(2, &mut r);
        let ss = session(&pk, true, 128, &mut r);
        let all = duqmr_s_gen_res_multi(&db, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
        let (big, _) = paillier::kgen(512, &mut r).unwrap();
        let w = duqmr_t_setup(3, 0, &big, &mut r).unwrap();
        assert!(matches!(duqmr_p1_filter(&all, &w, &big), Err(OtError::LengthMismatch { .. })));
        let (small, _) = paillier::kgen(128, &mut r).unwrap();
        let w = duqmr_t_setup(2, 0, &small, &mut r).unwrap();
        assert_eq!(duqmr_p1_filter(&all, &w, &small), Err(OtError::EmbeddingOverflow));
    }

    #[test]
    fn wire_round_trips() {
        let pk = GroupParams::toy(&mut rng(30));
        let (pkj, _) = paillier::kgen(128, &mut rng(31)).unwrap();
        let mut r = rng(32);
        let ss = session(&pk, false, 64, &mut r);
        let m = ByteString::zeros(8);
        let res = duq_s_gen_res(&m, &m, &pk, &ss.query, &ss.bundle.tag, &mut r).unwrap();
        let w = duqmr_t_setup(3, 1, &pkj, &mut r).unwrap();
        let mut out = Vec::new();
        ss.bundle.encode_sp_r(&mut out);
        res.encode(&pk, &mut out);
        w.encode(&pkj, &mut out);
        let mut rd = Reader::new(&out);
        assert_eq!(IssuerBundle::decode_sp_r(&mut rd).unwrap(), (ss.bundle.share2, ss.bundle.tag.clone()));
        assert_eq!(TaggedResponse::decode(&pk, &mut rd).unwrap(), res);
        assert_eq!(CompressVector::decode(&pkj, &mut rd).unwrap(), w);
        rd.finish().unwrap();
    }
}
