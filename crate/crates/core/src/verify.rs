//! Exhaustive correctness checks behind the `verify` command.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::base_ot::{ConventionalOtSuite, GroupSource, NaorPinkasSuite};
use crate::compiler::{comp_gen_query, comp_gen_res, comp_retrieve};
use crate::dq::{
    dq_p1_gen_query, dq_p2_gen_query, dq_request_from_coin, dq_r_retrieve, dq_s_gen_res, dqmr_p1_filter,
    dqmr_s_gen_res_multi, retrieval_exponent, FinalQueryPair, MessageDatabase,
};
use crate::duq::{
    duq_delegation, duq_r_request, duq_r_retrieve, duq_s_gen_res, duq_t_request, duqmr_p1_filter, duqmr_r_setup,
    duqmr_s_gen_res_multi, duqmr_t_setup,
};
use crate::error::{OtError, Result};
use crate::group::{gen_group, DebugGroup, GroupParams, Scalar};
use crate::harness::{run_session, Protocol, Role, SessionConfig, Tamper};
use crate::paillier;
use crate::primitives::ByteString;
use crate::supersonic::{sup_gen_res, sup_obl_filter, sup_retrieve, sup_setup};

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct VerifyOptions {
    /// Small parameters: toy group where sound, 64-bit groups elsewhere.
    pub toy: bool,
    pub seed: u64,
    pub inject_tamper: Option<Tamper>,
}


#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {:<22} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

/// Closed forms of `(delta_0, delta_1, beta_0, beta_1)` as exponents of `g`,
/// written out per `(s1, s2)` cell with `a = log_g C`.
pub fn exponent_table(dg: &DebugGroup, s1: bool, s2: bool, r1: &Scalar, r2: &Scalar) -> [Scalar; 4] {
    let pk = &dg.params;
    let a_r2 = pk.scalar_sub(&dg.a, r2);
    match (s1, s2) {
        (false, false) => [r2.clone(), a_r2.clone(), pk.scalar_add(r2, r1), pk.scalar_sub(&a_r2, r1)],
        (false, true) => [a_r2.clone(), r2.clone(), pk.scalar_add(&a_r2, r1), pk.scalar_sub(r2, r1)],
        (true, false) => [r2.clone(), a_r2.clone(), pk.scalar_sub(&a_r2, r1), pk.scalar_add(r2, r1)],
        (true, true) => [a_r2.clone(), r2.clone(), pk.scalar_sub(r2, r1), pk.scalar_add(&a_r2, r1)],
    }
}

const CELLS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Every `(s1, s2)` cell over `seeds` blind draws: computed pairs equal the
/// closed forms and multiply to `C`.
pub fn check_exponent_table(dg: &DebugGroup, seeds: u64, seed: u64) -> std::result::Result<usize, String> {
    let pk = &dg.params;
    let mut count = 0;
    for i in 0..seeds {
        let mut r = rng(seed.wrapping_add(i));
        for (s1, s2) in CELLS {
            let (req1, req2) = dq_request_from_coin(s1 ^ s2, s1, pk.rand_scalar(&mut r), pk.rand_scalar(&mut r));
            let partial = dq_p2_gen_query(&req2, pk);
            let fin = dq_p1_gen_query(&req1, &partial, pk);
            let want = exponent_table(dg, s1, s2, &req1.blind, &req2.blind).map(|e| pk.exp_g(&e));
            let got = [partial.d0, partial.d1, fin.b0.clone(), fin.b1.clone()];
            if got != want {
                return Err(format!("cell (s1={}, s2={}) differs at seed {i}", s1 as u8, s2 as u8));
            }
            if &pk.mul(&fin.b0, &fin.b1) != pk.c() {
                return Err(format!("beta_0 * beta_1 != C in cell (s1={}, s2={})", s1 as u8, s2 as u8));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// All four share cells for both `s`: the retrieval exponent matches its
/// case (`r2 + r1` when `s2 = 0`, `r2 - r1` when `s2 = 1`) and the output
/// is `m_s`.
pub fn check_dq_cases(pk: &GroupParams, seeds: u64, seed: u64) -> std::result::Result<usize, String> {
    let mut runs = 0;
    for i in 0..seeds {
        let mut r = rng(seed.wrapping_add(i));
        let m0 = ByteString::random(16, &mut r);
        let m1 = ByteString::random(16, &mut r);
        for s in [false, true] {
            for coin in [false, true] {
                let (req1, req2) = dq_request_from_coin(s, coin, pk.rand_scalar(&mut r), pk.rand_scalar(&mut r));
                let x = retrieval_exponent(pk, &req1.blind, &req2.blind, req2.share);
                let want_x = if req2.share {
                    pk.scalar_sub(&req2.blind, &req1.blind)
                } else {
                    pk.scalar_add(&req2.blind, &req1.blind)
                };
                if x != want_x {
                    return Err("retrieval exponent does not match its case".into());
                }
                let fin = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
                let res = dq_s_gen_res(&m0, &m1, pk, &fin, &mut r).map_err(|e| e.to_string())?;
                let got = dq_r_retrieve(&res, &req1, &req2, s, pk).map_err(|e| e.to_string())?;
                if &got != if s { &m1 } else { &m0 } {
                    return Err(format!("wrong output for s={} s1={}", s as u8, coin as u8));
                }
                runs += 1;
            }
        }
    }
    Ok(runs)
}

/// Supersonic over all `(s1, s2)` cells with random messages.
pub fn check_supersonic_table(pairs: u64, sigma_bits: usize, seed: u64) -> std::result::Result<usize, String> {
    let mut r = rng(seed);
    let mut runs = 0;
    for _ in 0..pairs {
        let m0 = ByteString::random(sigma_bits / 8, &mut r);
        let m1 = ByteString::random(sigma_bits / 8, &mut r);
        for (s1, s2) in CELLS {
            let keys = sup_setup(sigma_bits, &mut r).map_err(|e| e.to_string())?;
            let e = sup_gen_res(&m0, &m1, &keys.share_with_sender(), s1).map_err(|e| e.to_string())?;
            let s = s1 ^ s2;
            let got = sup_retrieve(&sup_obl_filter(e, s2), keys, s).map_err(|e| e.to_string())?;
            if &got != if s { &m1 } else { &m0 } {
                return Err(format!("cell (s1={}, s2={}) returned the wrong message", s1 as u8, s2 as u8));
            }
            runs += 1;
        }
    }
    Ok(runs)
}

/// Compiled and plain Naor-Pinkas give the same output under the same
/// seeds.
pub fn check_compiler_equivalence(
    suite: &NaorPinkasSuite,
    pk: &GroupParams,
    paillier_bits: u64,
    trials: u64,
    seed: u64,
) -> Result<usize> {
    let (pkr, skr) = paillier::kgen(paillier_bits, &mut rng(seed))?;
    let mut runs = 0;
    for i in 0..trials {
        let base = seed.wrapping_add(i).wrapping_mul(2);
        let mut mr = rng(base ^ 0x5555);
        let msgs: Vec<_> = (0..2).map(|_| ByteString::random(suite.sigma_bits / 8, &mut mr)).collect();
        for s in 0..2 {
            let (q, secret) = suite.gen_query(pk, 2, s, &mut rng(base))?;
            let plain = suite.gen_res(&msgs, pk, &q, &mut rng(base + 1))?;
            let plain = suite.retrieve(&plain[s], &q, &secret, pk, s)?;
            let (cq, csecret, selector) = comp_gen_query(suite, pk, 2, s, &pkr, &mut rng(base))?;
            let comp = comp_gen_res(suite, &msgs, pk, &cq, &selector, &pkr, &mut rng(base + 1))?;
            let compiled = comp_retrieve(suite, &comp, &skr, &cq, &csecret, pk, s)?;
            if compiled != plain || plain != msgs[s] {
                return Err(OtError::Flow(format!("compiled output differs at trial {i}, s={s}")));
            }
            runs += 1;
        }
    }
    Ok(runs)
}

fn random_db(z: usize, r: &mut ChaCha20Rng) -> MessageDatabase {
    MessageDatabase::new((0..z).map(|_| (ByteString::random(16, r), ByteString::random(16, r))).collect())
        .expect("uniform lengths")
}

/// Both filters return exactly record `v` for every `v`.
pub fn check_filter_exactness(pk: &GroupParams, paillier_bits: u64, z: usize, seed: u64) -> Result<usize> {
    let mut r = rng(seed);
    let db = random_db(z, &mut r);
    let (req1, req2) = dq_request_from_coin(true, r.gen(), pk.rand_scalar(&mut r), pk.rand_scalar(&mut r));
    let fin = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
    let all = dqmr_s_gen_res_multi(&db, pk, &fin, &mut r)?;
    let tag = ByteString::random(16, &mut r);
    let tagged = duqmr_s_gen_res_multi(&db, pk, &fin, &tag, &mut r)?;
    let (pkj, skj) = duqmr_r_setup(paillier_bits, pk, 128, 128, &mut r)?;
    let mut checked = 0;
    for v in 0..z {
        if dqmr_p1_filter(&all, v)? != all[v] {
            return Err(OtError::Flow(format!("DQ filter returned the wrong record for v={v}")));
        }
        let w = duqmr_t_setup(z, v, &pkj, &mut r)?;
        let f = duqmr_p1_filter(&tagged, &w, &pkj)?;
        let got = f.ciphertexts().map(|c| paillier::dec(&skj, c));
        let want = [
            tagged[v].e0.point.value().clone(),
            BigUint::from_bytes_be(tagged[v].e0.masked.as_bytes()),
            tagged[v].e1.point.value().clone(),
            BigUint::from_bytes_be(tagged[v].e1.masked.as_bytes()),
        ];
        for (g, w) in got.into_iter().zip(want) {
            if g? != w {
                return Err(OtError::Flow(format!("DUQ filter component differs for v={v}")));
            }
        }
        checked += 1;
    }
    Ok(checked)
}

/// Honest runs: exactly one candidate carries the tag.
pub fn check_duq_tags(pk: &GroupParams, runs: u64, lambda_bits: usize, seed: u64) -> Result<usize> {
    let mut r = rng(seed);
    let m0 = ByteString::random(16, &mut r);
    let m1 = ByteString::random(16, &mut r);
    for i in 0..runs {
        let s = i % 2 == 1;
        let bundle = duq_t_request(s, lambda_bits, &mut r)?;
        let blinds = duq_r_request(pk, &mut r);
        let (req1, req2) = duq_delegation(&bundle, &blinds);
        let fin = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
        let res = duq_s_gen_res(&m0, &m1, pk, &fin, &bundle.tag, &mut r)?;
        let got = duq_r_retrieve(&res, &blinds, bundle.share2, &bundle.tag, pk)?;
        if &got != if s { &m1 } else { &m0 } {
            return Err(OtError::Flow(format!("run {i} returned the wrong message")));
        }
    }
    Ok(runs as usize)
}

/// Multiplying one query element by a random non-identity element makes the
/// sender abort, in both single and multi-record responders.
pub fn check_tamper_abort(pk: &GroupParams, trials: u64, seed: u64) -> Result<usize> {
    let mut r = rng(seed);
    let m = ByteString::zeros(16);
    let db = random_db(2, &mut r);
    let tag = ByteString::random(16, &mut r);
    for i in 0..trials {
        let (req1, req2) = dq_request_from_coin(r.gen(), r.gen(), pk.rand_scalar(&mut r), pk.rand_scalar(&mut r));
        let fin = dq_p1_gen_query(&req1, &dq_p2_gen_query(&req2, pk), pk);
        let h = pk.exp_g(&pk.rand_nonzero_scalar(&mut r));
        let bad = if i % 2 == 0 {
            FinalQueryPair { b0: pk.mul(&fin.b0, &h), ..fin }
        } else {
            FinalQueryPair { b1: pk.mul(&fin.b1, &h), ..fin }
        };
        let outcomes = [
            dq_s_gen_res(&m, &m, pk, &bad, &mut r).err(),
            dqmr_s_gen_res_multi(&db, pk, &bad, &mut r).err(),
            duq_s_gen_res(&m, &m, pk, &bad, &tag, &mut r).err(),
            duqmr_s_gen_res_multi(&db, pk, &bad, &tag, &mut r).err(),
        ];
        if outcomes.iter().any(|o| o != &Some(OtError::ConsistencyAbort)) {
            return Err(OtError::Flow(format!("trial {i}: tampered query was answered")));
        }
    }
    Ok(trials as usize)
}

/// Additive and scalar homomorphism on random plaintexts, and the selector
/// property at every position for each length in `lens`.
pub fn check_paillier(bits: u64, trials: u64, lens: &[usize], seed: u64) -> Result<usize> {
    let (pk, sk) = paillier::kgen(bits, &mut rng(seed))?;
    let mut r = rng(seed ^ 0x9e37);
    let n = pk.n();
    let below_n = |r: &mut ChaCha20Rng| BigUint::from_bytes_be(ByteString::random(pk.ciphertext_bytes(), r).as_bytes()) % n;
    for i in 0..trials {
        let (m1, m2, k) = (below_n(&mut r), below_n(&mut r), below_n(&mut r));
        let c1 = paillier::enc(&pk, &m1, &mut r)?;
        let c2 = paillier::enc(&pk, &m2, &mut r)?;
        if paillier::dec(&sk, &paillier::hadd(&pk, &c1, &c2))? != (&m1 + &m2) % n
            || paillier::dec(&sk, &paillier::hscale(&pk, &c1, &k))? != (&m1 * &k) % n
        {
            return Err(OtError::Flow(format!("homomorphism fails at trial {i}")));
        }
    }
    let mut positions = 0;
    for &len in lens {
        let plain: Vec<_> = (0..len).map(|_| below_n(&mut r)).collect();
        for v in 0..len {
            let sel = paillier::one_hot(&pk, len, v, &mut r)?;
            if paillier::dec(&sk, &paillier::inner_product(&pk, &sel, &plain)?)? != plain[v] {
                return Err(OtError::Flow(format!("selector of length {len} misses position {v}")));
            }
            positions += 1;
        }
    }
    Ok(trials as usize + positions)
}

/// Two runs of every protocol under one config give identical bytes.
pub fn check_determinism(group_bits: u64, paillier_bits: u64, seed: u64) -> Result<usize> {
    for protocol in Protocol::ALL {
        let cfg = SessionConfig { group_bits, paillier_bits, ..SessionConfig::new(protocol, seed) };
        let (a, b) = (run_session(&cfg)?, run_session(&cfg)?);
        if a.frames() != b.frames() || a.to_jsonl() != b.to_jsonl() {
            return Err(OtError::Flow(format!("{protocol} transcripts differ")));
        }
        if let Some((role, e)) = a.failure() {
            return Err(OtError::Flow(format!("{protocol}: {role} failed with {e}")));
        }
    }
    Ok(Protocol::ALL.len())
}

fn record<T: std::fmt::Display, E: std::fmt::Display>(
    checks: &mut Vec<CheckResult>,
    name: &'static str,
    unit: &str,
    run: impl FnOnce() -> std::result::Result<T, E>,
) {
    let start = Instant::now();
    let outcome = run();
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let (passed, detail) = match outcome {
        Ok(n) => (true, format!("{n} {unit} ({ms:.0} ms)")),
        Err(e) => (false, e.to_string()),
    };
    checks.push(CheckResult { name, passed, detail });
}

/// Runs every check. With `toy`, the exponent table and the DQ cases use
/// the toy group; tag and compiler checks use 64-bit groups because a toy
/// group collides tags by chance.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let seed = opts.seed;
    let (group_bits, paillier_bits, seeds, tag_runs) = if opts.toy { (64, 512, 10, 200) } else { (512, 1024, 50, 1000) };
    let mut checks = Vec::new();
    let group = gen_group(group_bits, &mut rng(seed));
    let pk = match group {
        Ok(pk) => pk,
        Err(e) => {
            checks.push(CheckResult { name: "group-setup", passed: false, detail: e.to_string() });
            return VerifyReport { checks };
        }
    };

    record(&mut checks, "exponent-table-toy", "cells", || check_exponent_table(&DebugGroup::toy(&mut rng(seed)), 50, seed));
    if !opts.toy {
        record(&mut checks, "exponent-table-512", "cells", || {
            let dg = DebugGroup::generate(512, &mut rng(seed)).map_err(|e| e.to_string())?;
            check_exponent_table(&dg, 50, seed)
        });
    }
    let dq_group = if opts.toy { GroupParams::toy(&mut rng(seed)) } else { pk.clone() };
    record(&mut checks, "dq-retrieval-cases", "runs", || check_dq_cases(&dq_group, seeds, seed));
    record(&mut checks, "supersonic-table", "runs", || check_supersonic_table(if opts.toy { 1000 } else { 10_000 }, 128, seed));
    let suite = NaorPinkasSuite::new(128, GroupSource::Bits(group_bits));
    record(&mut checks, "compiler-equivalence", "runs", || {
        check_compiler_equivalence(&suite, &pk, paillier_bits, seeds, seed)
    });
    record(&mut checks, "filter-exactness", "records", || check_filter_exactness(&pk, paillier_bits, 8, seed));
    record(&mut checks, "duq-tag-uniqueness", "runs", || check_duq_tags(&pk, tag_runs, 128, seed));
    record(&mut checks, "tamper-abort", "trials", || check_tamper_abort(&pk, 100, seed));
    record(&mut checks, "paillier-properties", "checks", || {
        check_paillier(paillier_bits, if opts.toy { 50 } else { 200 }, &[1, 4, 16], seed)
    });
    record(&mut checks, "determinism", "protocols", || check_determinism(group_bits, paillier_bits, seed));

    if let Some(tamper) = opts.inject_tamper {
        record(&mut checks, "injected-tamper", "sessions", || {
            let protocols: &[Protocol] = match tamper {
                Tamper::Tag => &[Protocol::DuqOt, Protocol::DuqMr],
                _ => &[Protocol::DqOt, Protocol::DqMr, Protocol::DuqOt, Protocol::DuqMr],
            };
            let expected = match tamper {
                Tamper::Tag => (Role::Receiver, OtError::NoTagMatch),
                _ => (Role::Sender, OtError::ConsistencyAbort),
            };
            for &protocol in protocols {
                let cfg = SessionConfig {
                    group_bits,
                    paillier_bits,
                    tamper: Some(tamper),
                    ..SessionConfig::new(protocol, seed)
                };
                let t = run_session(&cfg)?;
                match t.failure() {
                    Some((role, e)) if role == expected.0 && *e == expected.1 => {}
                    other => {
                        return Err(OtError::Flow(format!("{protocol}: expected {} triggered, got {other:?}", expected.1.name())))
                    }
                }
            }
            Ok::<_, OtError>(format!("{} triggered in {}", expected.1.name(), protocols.len()))
        });
    }
    VerifyReport { checks }
}
