//! Constant-size responses for any [`ConventionalOtSuite`]: the sender
//! folds its `n` response elements into `w` ciphertexts with an encrypted
//! one-hot selector.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{CryptoRng, RngCore};

use crate::base_ot::{ConventionalOtSuite, ResponseElement};
use crate::encoding::{byte_width, put_u32, to_fixed_be, Reader};
use crate::error::{OtError, Result};
use crate::paillier::{self, HomCiphertext, PaillierPublicKey, PaillierSecretKey};
use crate::primitives::ByteString;

/// Encrypted one-hot vector at the receiver's index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorVector {
    pub entries: Vec<HomCiphertext>,
}

/// One ciphertext per component of a base response element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedResponse {
    pub components: Vec<HomCiphertext>,
}

fn encode_list(pk: &PaillierPublicKey, list: &[HomCiphertext], out: &mut Vec<u8>) {
    put_u32(out, list.len() as u32);
    for c in list {
        pk.encode_ciphertext(out, c);
    }
}

fn decode_list(pk: &PaillierPublicKey, r: &mut Reader<'_>) -> Result<Vec<HomCiphertext>> {
    let len = r.u32()? as usize;
    (0..len).map(|_| pk.decode_ciphertext(r)).collect()
}

impl SelectorVector {
    pub fn encode(&self, pk: &PaillierPublicKey, out: &mut Vec<u8>) {
        encode_list(pk, &self.entries, out);
    }

    pub fn decode(pk: &PaillierPublicKey, r: &mut Reader<'_>) -> Result<Self> {
        Ok(SelectorVector { entries: decode_list(pk, r)? })
    }
}

impl CompressedResponse {
    pub fn encode(&self, pk: &PaillierPublicKey, out: &mut Vec<u8>) {
        encode_list(pk, &self.components, out);
    }

    pub fn decode(pk: &PaillierPublicKey, r: &mut Reader<'_>) -> Result<Self> {
        Ok(CompressedResponse { components: decode_list(pk, r)? })
    }
}

const HEADER_BYTES: usize = 2;

/// `u16_be(len) || bytes`, read as a big-endian integer.
pub fn embed(bytes: &[u8]) -> Result<BigUint> {
    let len = u16::try_from(bytes.len()).map_err(|_| OtError::EmbeddingOverflow)?;
    let mut buf = Vec::with_capacity(bytes.len() + HEADER_BYTES);
    buf.extend_from_slice(&len.to_be_bytes());
    buf.extend_from_slice(bytes);
    Ok(BigUint::from_bytes_be(&buf))
}

/// Inverse of [`embed`]. The body length `L` is the unique value with
/// `floor(v / 256^L) = L`: the left side falls and the right side rises in
/// `L`.
pub fn decode_embedding(v: &BigUint) -> Result<Vec<u8>> {
    if v.is_zero() {
        return Ok(Vec::new());
    }
    let width = byte_width(v);
    for len in 0..width {
        let header: BigUint = v >> (8 * len);
        if header == BigUint::from(len) {
            let body = v - (header << (8 * len));
            return Ok(to_fixed_be(&body, len));
        }
    }
    Err(OtError::DecodeError("plaintext carries no valid length header".into()))
}

/// Bits a receiver modulus needs to embed components of `max_len` bytes.
pub fn required_key_bits(max_len: usize) -> u64 {
    8 * (max_len + HEADER_BYTES) as u64 + 1
}

fn check_key<S: ConventionalOtSuite>(suite: &S, pk_base: &S::PublicKey, pk_r: &PaillierPublicKey) -> Result<()> {
    let max_len = suite.component_widths(pk_base).into_iter().max().unwrap_or(0);
    let need = required_key_bits(max_len);
    if pk_r.bits() < need {
        return Err(OtError::KeyTooSmall { have: pk_r.bits(), need });
    }
    Ok(())
}

/// The base suite's query followed by a fresh selector for `s`.
pub fn comp_gen_query<S: ConventionalOtSuite, R: RngCore + CryptoRng + ?Sized>(
    suite: &S,
    pk_base: &S::PublicKey,
    n: usize,
    s: usize,
    pk_r: &PaillierPublicKey,
    rng: &mut R,
) -> Result<(S::Query, S::Secret, SelectorVector)> {
    if s >= n {
        return Err(OtError::IndexOutOfRange { index: s, len: n });
    }
    check_key(suite, pk_base, pk_r)?;
    let (query, secret) = suite.gen_query(pk_base, n, s, rng)?;
    let entries = paillier::one_hot(pk_r, n, s, rng)?;
    Ok((query, secret, SelectorVector { entries }))
}

/// Runs the base response and compresses it component-wise:
/// `e[j] = sum_i b'[i] * embed(e_i[j])`.
pub fn comp_gen_res<S: ConventionalOtSuite, R: RngCore + CryptoRng + ?Sized>(
    suite: &S,
    msgs: &[ByteString],
    pk_base: &S::PublicKey,
    base_query: &S::Query,
    selector: &SelectorVector,
    pk_r: &PaillierPublicKey,
    rng: &mut R,
) -> Result<CompressedResponse> {
    if msgs.len() != selector.entries.len() {
        return Err(OtError::LengthMismatch { expected: selector.entries.len(), got: msgs.len() });
    }
    let elements = suite.gen_res(msgs, pk_base, base_query, rng)?;
    compress(&elements, &selector.entries, pk_r, suite.component_widths(pk_base).len())
}

pub(crate) fn compress(
    elements: &[ResponseElement],
    selector: &[HomCiphertext],
    pk_r: &PaillierPublicKey,
    w: usize,
) -> Result<CompressedResponse> {
    let mut columns = vec![Vec::with_capacity(elements.len()); w];
    for element in elements {
        if element.components.len() != w {
            return Err(OtError::LengthMismatch { expected: w, got: element.components.len() });
        }
        for (column, component) in columns.iter_mut().zip(&element.components) {
            column.push(embed(component)?);
        }
    }
    let components = columns
        .iter()
        .map(|column| paillier::inner_product(pk_r, selector, column))
        .collect::<Result<_>>()?;
    Ok(CompressedResponse { components })
}

/// Decrypts and decodes the selected element, then hands it to the base
/// suite's retrieval.
pub fn comp_retrieve<S: ConventionalOtSuite>(
    suite: &S,
    compressed: &CompressedResponse,
    sk_r: &PaillierSecretKey,
    base_query: &S::Query,
    base_secret: &S::Secret,
    pk_base: &S::PublicKey,
    s: usize,
) -> Result<ByteString> {
    let widths = suite.component_widths(pk_base);
    if compressed.components.len() != widths.len() {
        return Err(OtError::DecodeError(format!(
            "expected {} compressed components, got {}",
            widths.len(),
            compressed.components.len()
        )));
    }
    let components = compressed
        .components
        .iter()
        .map(|c| decode_embedding(&paillier::dec(sk_r, c)?))
        .collect::<Result<Vec<_>>>()?;
    suite.retrieve(&ResponseElement { components }, base_query, base_secret, pk_base, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_ot::{GroupSource, NaorPinkasSuite};
    use crate::group::GroupParams;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn setup() -> (NaorPinkasSuite, GroupParams, PaillierPublicKey, PaillierSecretKey) {
        let suite = NaorPinkasSuite::new(128, GroupSource::Bits(256));
        let pk = suite.init(&mut rng(0)).unwrap();
        let (pkr, skr) = paillier::kgen(1024, &mut rng(1)).unwrap();
        (suite, pk, pkr, skr)
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(embed(&[]).unwrap(), BigUint::zero());
        assert_eq!(embed(&[0xab]).unwrap(), BigUint::from(0x0001abu32));
        assert_eq!(decode_embedding(&BigUint::from(0x0001abu32)).unwrap(), vec![0xab]);
        assert_eq!(decode_embedding(&BigUint::from(0x000200abu32)).unwrap(), vec![0x00, 0xab]);
        assert!(decode_embedding(&BigUint::from(0x0005abu32)).is_err());
        assert!(embed(&vec![0u8; 70_000]).is_err());
    }

    proptest! {
        #[test]
        fn embedding_round_trips(bytes in proptest::collection::vec(any::<u8>(), 0..300)) {
            prop_assert_eq!(decode_embedding(&embed(&bytes).unwrap()).unwrap(), bytes);
        }
    }

    #[test]
    fn query_shape_and_pass_through() {
        let (suite, pk, pkr, skr) = setup();
        let (q, _, sel) = comp_gen_query(&suite, &pk, 2, 1, &pkr, &mut rng(2)).unwrap();
        let plain: Vec<_> = sel.entries.iter().map(|c| paillier::dec(&skr, c).unwrap()).collect();
        assert_eq!(plain, vec![BigUint::zero(), BigUint::from(1u32)]);
        let (q_alone, _) = suite.gen_query(&pk, 2, 1, &mut rng(2)).unwrap();
        assert_eq!(q, q_alone);
        let (_, _, sel4) = comp_gen_query(&suite, &pk, 4, 0, &pkr, &mut rng(3)).unwrap();
        assert_eq!(sel4.entries.len(), 4);
        assert!(comp_gen_query(&suite, &pk, 4, 4, &pkr, &mut rng(3)).is_err());
    }

    #[test]
    fn key_size_is_checked() {
        let (suite, pk, _, _) = setup();
        let (small, _) = paillier::kgen(256, &mut rng(4)).unwrap();
        let need = required_key_bits(pk.element_bytes());
        assert_eq!(
            comp_gen_query(&suite, &pk, 2, 0, &small, &mut rng(5)).err(),
            Some(OtError::KeyTooSmall { have: 256, need })
        );
    }

    #[test]
    fn compiled_matches_plain() {
        let (suite, pk, pkr, skr) = setup();
        for seed in 0..100u64 {
            let mut msg_rng = rng(seed);
            let msgs: Vec<_> = (0..2).map(|_| ByteString::random(16, &mut msg_rng)).collect();
            for s in 0..2 {
                let (q, secret) = suite.gen_query(&pk, 2, s, &mut rng(seed)).unwrap();
                let plain_res = suite.gen_res(&msgs, &pk, &q, &mut rng(seed + 1000)).unwrap();
                let plain = suite.retrieve(&plain_res[s], &q, &secret, &pk, s).unwrap();

                let (cq, csecret, sel) = comp_gen_query(&suite, &pk, 2, s, &pkr, &mut rng(seed)).unwrap();
                let comp = comp_gen_res(&suite, &msgs, &pk, &cq, &sel, &pkr, &mut rng(seed + 1000)).unwrap();
                assert_eq!(comp.components.len(), 2);
                let got = comp_retrieve(&suite, &comp, &skr, &cq, &csecret, &pk, s).unwrap();
                assert_eq!(got, plain);
                assert_eq!(got, msgs[s]);
            }
        }
    }

    #[test]
    fn decrypted_components_equal_selected_element() {
        let (suite, pk, pkr, skr) = setup();
        let msgs: Vec<_> = (0..3).map(|i| ByteString::from(vec![i as u8; 16])).collect();
        let (q, _, sel) = comp_gen_query(&suite, &pk, 3, 2, &pkr, &mut rng(6)).unwrap();
        let base = suite.gen_res(&msgs, &pk, &q, &mut rng(7)).unwrap();
        let comp = comp_gen_res(&suite, &msgs, &pk, &q, &sel, &pkr, &mut rng(7)).unwrap();
        let decoded: Vec<_> =
            comp.components.iter().map(|c| decode_embedding(&paillier::dec(&skr, c).unwrap()).unwrap()).collect();
        assert_eq!(decoded, base[2].components);
    }

    #[test]
    fn all_zero_selector_yields_zero_plaintexts() {
        let (suite, pk, pkr, skr) = setup();
        let msgs = vec![ByteString::zeros(16); 2];
        let (q, _, _) = comp_gen_query(&suite, &pk, 2, 0, &pkr, &mut rng(8)).unwrap();
        let mut r = rng(9);
        let zeros = SelectorVector { entries: (0..2).map(|_| paillier::enc_u64(&pkr, 0, &mut r).unwrap()).collect() };
        let comp = comp_gen_res(&suite, &msgs, &pk, &q, &zeros, &pkr, &mut r).unwrap();
        for c in &comp.components {
            assert!(paillier::dec(&skr, c).unwrap().is_zero());
        }
    }

    #[test]
    fn response_size_is_constant_in_n() {
        let (suite, pk, pkr, _) = setup();
        let mut sizes = Vec::new();
        for n in [2usize, 4, 8] {
            let msgs: Vec<_> = (0..n).map(|_| ByteString::zeros(16)).collect();
            let (q, _, sel) = comp_gen_query(&suite, &pk, n, 1, &pkr, &mut rng(10)).unwrap();
            let comp = comp_gen_res(&suite, &msgs, &pk, &q, &sel, &pkr, &mut rng(11)).unwrap();
            let mut out = Vec::new();
            comp.encode(&pkr, &mut out);
            let mut rd = Reader::new(&out);
            assert_eq!(CompressedResponse::decode(&pkr, &mut rd).unwrap(), comp);
            sizes.push(out.len());
        }
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }

    #[test]
    fn wrong_key_never_panics() {
        let (suite, pk, pkr, _) = setup();
        let (_, other) = paillier::kgen(1024, &mut rng(12)).unwrap();
        let msgs: Vec<_> = (0..2).map(|_| ByteString::random(16, &mut rng(13))).collect();
        for seed in 0..20 {
            let (q, secret, sel) = comp_gen_query(&suite, &pk, 2, 0, &pkr, &mut rng(seed)).unwrap();
            let comp = comp_gen_res(&suite, &msgs, &pk, &q, &sel, &pkr, &mut rng(seed)).unwrap();
            if let Ok(m) = comp_retrieve(&suite, &comp, &other, &q, &secret, &pk, 0) { assert_ne!(m, msgs[0]) }
        }
    }

    #[test]
    fn mismatched_lengths() {
        let (suite, pk, pkr, _) = setup();
        let (q, _, sel) = comp_gen_query(&suite, &pk, 2, 0, &pkr, &mut rng(14)).unwrap();
        let msgs = vec![ByteString::zeros(16); 3];
        assert!(matches!(
            comp_gen_res(&suite, &msgs, &pk, &q, &sel, &pkr, &mut rng(15)),
            Err(OtError::LengthMismatch { .. })
        ));
    }
}
