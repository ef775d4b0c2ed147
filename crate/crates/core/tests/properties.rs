use std::sync::OnceLock;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use otkit::base_ot::{np_gen_query, np_gen_res, np_retrieve, NpResponse};
use otkit::dq::{dq_p1_gen_query, dq_p2_gen_query, dq_r_request};
use otkit::duq::{duq_delegation, duq_r_request, duq_r_retrieve, duq_s_gen_res, duq_t_request, TaggedResponse};
use otkit::encoding::Reader;
use otkit::group::{gen_group, GroupParams};
use otkit::harness::{run_session, MsgType, Protocol, Role, SessionConfig};
use otkit::paillier::{self, PaillierPublicKey, PaillierSecretKey};
use otkit::primitives::{ss_reconstruct, ss_share, ByteString};
use otkit::supersonic::{sup_gen_res, sup_obl_filter, sup_retrieve, sup_setup};

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn group() -> &'static GroupParams {
    static G: OnceLock<GroupParams> = OnceLock::new();
    G.get_or_init(|| gen_group(256, &mut rng(1)).unwrap())
}

fn keys() -> &'static (PaillierPublicKey, PaillierSecretKey) {
    static K: OnceLock<(PaillierPublicKey, PaillierSecretKey)> = OnceLock::new();
    K.get_or_init(|| paillier::kgen(512, &mut rng(2)).unwrap())
}

fn below_n(bytes: Vec<u8>) -> BigUint {
    BigUint::from_bytes_be(&bytes) % keys().0.n()
}

fn msg() -> impl Strategy<Value = ByteString> {
    proptest::collection::vec(any::<u8>(), 16).prop_map(ByteString::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn paillier_is_additively_homomorphic(a in proptest::collection::vec(any::<u8>(), 64),
                                          b in proptest::collection::vec(any::<u8>(), 64),
                                          seed in any::<u64>()) {
        let (pk, sk) = keys();
        let (m1, m2) = (below_n(a), below_n(b));
        let mut r = rng(seed);
        let c = paillier::hadd(pk, &paillier::enc(pk, &m1, &mut r).unwrap(), &paillier::enc(pk, &m2, &mut r).unwrap());
        prop_assert_eq!(paillier::dec(sk, &c).unwrap(), (&m1 + &m2) % pk.n());
    }

    #[test]
    fn paillier_scales(a in proptest::collection::vec(any::<u8>(), 64),
                       k in proptest::collection::vec(any::<u8>(), 64),
                       seed in any::<u64>()) {
        let (pk, sk) = keys();
        let (m, k) = (below_n(a), below_n(k));
        let c = paillier::hscale(pk, &paillier::enc(pk, &m, &mut rng(seed)).unwrap(), &k);
        prop_assert_eq!(paillier::dec(sk, &c).unwrap(), (&m * &k) % pk.n());
    }

    #[test]
    fn selector_picks_exactly_one(values in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 64), 1..6),
                                  pick in any::<prop::sample::Index>(),
                                  seed in any::<u64>()) {
        let (pk, sk) = keys();
        let plain: Vec<_> = values.into_iter().map(below_n).collect();
        let v = pick.index(plain.len());
        let sel = paillier::one_hot(pk, plain.len(), v, &mut rng(seed)).unwrap();
        let got = paillier::dec(sk, &paillier::inner_product(pk, &sel, &plain).unwrap()).unwrap();
        prop_assert_eq!(&got, &plain[v]);
    }

    #[test]
    fn naor_pinkas_returns_m_s(m0 in msg(), m1 in msg(), s in any::<bool>(), seed in any::<u64>()) {
        let pk = group();
        let mut r = rng(seed);
        let (beta0, secret) = np_gen_query(pk, s, &mut r);
        let beta1 = pk.div(pk.c(), &beta0);
        prop_assert_eq!(&pk.mul(&beta0, &beta1), pk.c());
        let res = np_gen_res(&m0, &m1, pk, &beta0, &mut r).unwrap();
        let mut bytes = Vec::new();
        res.encode(pk, &mut bytes);
        let decoded = NpResponse::decode(pk, &mut Reader::new(&bytes)).unwrap();
        prop_assert_eq!(&decoded, &res);
        prop_assert_eq!(np_retrieve(&res, &secret, pk).unwrap(), if s { m1 } else { m0 });
    }

    #[test]
    fn duq_output_ignores_the_permutation_coin(m0 in msg(), m1 in msg(), s in any::<bool>(), seed in any::<u64>()) {
        let pk = group();
        let mut r = rng(seed);
        let bundle = duq_t_request(s, 128, &mut r).unwrap();
        let blinds = duq_r_request(pk, &mut r);
        let (req1, req2) = duq_delegation(&bundle, &blinds);
        let fin = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
        let res = duq_s_gen_res(&m0, &m1, pk, &fin, &bundle.tag, &mut r).unwrap();
        let flipped = TaggedResponse { e0: res.e1.clone(), e1: res.e0.clone() };
        let want = if s { &m1 } else { &m0 };
        prop_assert_eq!(&duq_r_retrieve(&res, &blinds, bundle.share2, &bundle.tag, pk).unwrap(), want);
        prop_assert_eq!(&duq_r_retrieve(&flipped, &blinds, bundle.share2, &bundle.tag, pk).unwrap(), want);
    }

    #[test]
    fn delegated_queries_are_consistent(s in any::<bool>(), seed in any::<u64>()) {
        let pk = group();
        let (req1, req2) = dq_r_request(s, pk, &mut rng(seed));
        prop_assert_eq!(ss_reconstruct(otkit::primitives::BitShares { s1: req1.share, s2: req2.share }), s);
        let fin = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
        prop_assert_eq!(&pk.mul(&fin.b0, &fin.b1), pk.c());
    }

    #[test]
    fn supersonic_every_cell(m0 in msg(), m1 in msg(), s1 in any::<bool>(), s2 in any::<bool>(), seed in any::<u64>()) {
        let keys = sup_setup(128, &mut rng(seed)).unwrap();
        let pair = sup_gen_res(&m0, &m1, &keys.share_with_sender(), s1).unwrap();
        let head = sup_obl_filter(pair, s2);
        prop_assert_eq!(head.len(), 16);
        let s = s1 ^ s2;
        prop_assert_eq!(sup_retrieve(&head, keys, s).unwrap(), if s { m1 } else { m0 });
    }

    #[test]
    fn secret_sharing_round_trips(s in any::<bool>(), seed in any::<u64>()) {
        prop_assert_eq!(ss_reconstruct(ss_share(s, &mut rng(seed))), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sessions_are_deterministic_and_correct(seed in any::<u64>(), s in any::<bool>(),
                                               which in 0usize..5) {
        let protocol = [Protocol::NpOt, Protocol::DqOt, Protocol::DqMr, Protocol::DuqOt, Protocol::Supersonic][which];
        let cfg = SessionConfig {
            s: s as u64,
            group_bits: 256,
            messages: vec![ByteString::zeros(16), ByteString::new(vec![0xff; 16])],
            ..SessionConfig::new(protocol, seed)
        };
        let a = run_session(&cfg).unwrap();
        let b = run_session(&cfg).unwrap();
        prop_assert_eq!(a.frames(), b.frames());
        prop_assert_eq!(a.to_jsonl(), b.to_jsonl());
        if protocol != Protocol::DqMr {
            prop_assert_eq!(a.receiver_value(), Some(&cfg.messages[s as usize]));
        }
    }

    #[test]
    fn mr_receiver_sees_one_response_for_any_z(z in 1usize..10, seed in any::<u64>()) {
        let cfg = SessionConfig { z, v: z - 1, group_bits: 256, ..SessionConfig::new(Protocol::DqMr, seed) };
        let t = run_session(&cfg).unwrap();
        let inbound = t.inbound(Role::Receiver);
        prop_assert_eq!(inbound.len(), 1);
        prop_assert_eq!(inbound[0].msg_type, MsgType::Response);
    }
}
