//! Session configuration and the per-protocol role schedules.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::bus::Bus;
use super::envelope::{MsgType, Role};
use super::transcript::{PhaseTiming, RoleOutput, SessionTranscript};
use crate::base_ot::{np_gen_query, np_gen_res, np_retrieve, GroupSource, NaorPinkasSuite, NpResponse};
use crate::compiler::{self, comp_gen_query, comp_gen_res, comp_retrieve, CompressedResponse, SelectorVector};
use crate::dq::{
    dq_p1_gen_query, dq_p2_gen_query, dq_r_request, dq_r_retrieve, dq_s_gen_res, dqmr_p1_filter,
    dqmr_s_gen_res_multi, DelegationRequest, FinalQueryPair, MessageDatabase, PartialQueryPair,
};
use crate::duq::{
    self, duq_r_request, duq_r_retrieve, duq_s_gen_res, duq_t_request, duqmr_p1_filter, duqmr_r_retrieve,
    duqmr_r_setup, duqmr_s_gen_res_multi, duqmr_t_setup, CompressVector, FilteredResponse, IssuerBundle,
    ReceiverBlinds, TaggedResponse,
};
use crate::encoding::{put_u32, put_u8, Reader};
use crate::error::{bit_from_u64, OtError, Result};
use crate::group::{gen_group, GroupParams, MIN_GROUP_BITS};
use crate::paillier::{self, PaillierPublicKey};
use crate::primitives::ByteString;
use crate::supersonic::{sup_gen_query, sup_gen_res, sup_obl_filter, sup_retrieve, sup_setup, EncPair, PadKeys};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    NpOt,
    #[default]
    DqOt,
    DqMr,
    DuqOt,
    DuqMr,
    CompiledNp,
    Supersonic,
}

impl Protocol {
    pub const ALL: [Protocol; 7] = [
        Protocol::NpOt,
        Protocol::DqOt,
        Protocol::DqMr,
        Protocol::DuqOt,
        Protocol::DuqMr,
        Protocol::CompiledNp,
        Protocol::Supersonic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Protocol::NpOt => "np-ot",
            Protocol::DqOt => "dq-ot",
            Protocol::DqMr => "dq-mr",
            Protocol::DuqOt => "duq-ot",
            Protocol::DuqMr => "duq-mr",
            Protocol::CompiledNp => "compiled-np",
            Protocol::Supersonic => "supersonic",
        }
    }

    pub fn is_multi_receiver(self) -> bool {
        matches!(self, Protocol::DqMr | Protocol::DuqMr)
    }

    fn has_query_pair(self) -> bool {
        matches!(self, Protocol::DqOt | Protocol::DqMr | Protocol::DuqOt | Protocol::DuqMr)
    }

    fn uses_group(self) -> bool {
        self != Protocol::Supersonic
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Protocol {
    type Err = OtError;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| OtError::InvalidParameter(format!("unknown protocol {s:?}")))
    }
}

/// Fault injected by an otherwise honest party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tamper {
    /// `P1` multiplies `beta_0` by `g` before sending.
    Beta0,
    /// `P1` multiplies `beta_1` by `g` before sending.
    Beta1,
    /// `T` hands `S` a different tag from the one it gives `R`.
    Tag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub seed: u64,
    /// Use the toy group `P = 23` instead of a generated one.
    pub toy: bool,
    /// Bit length of the subgroup order `q`.
    pub group_bits: u64,
    pub sigma_bits: usize,
    pub lambda_bits: usize,
    pub paillier_bits: u64,
    /// Receiver's (or issuer's) index: a bit, or `< n` for `compiled-np`.
    pub s: u64,
    /// Record index for the multi-receiver protocols.
    pub v: usize,
    /// Sender messages; generated from the seed when empty.
    pub messages: Vec<ByteString>,
    /// Multi-receiver database; generated with `z` records when absent.
    pub db: Option<MessageDatabase>,
    pub z: usize,
    pub tamper: Option<Tamper>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            protocol: Protocol::default(),
            seed: 0,
            toy: false,
            group_bits: 512,
            sigma_bits: 128,
            lambda_bits: 128,
            paillier_bits: 1024,
            s: 0,
            v: 0,
            messages: Vec::new(),
            db: None,
            z: 4,
            tamper: None,
        }
    }
}

const TOY_P_BITS: u64 = 5;

impl SessionConfig {
    pub fn new(protocol: Protocol, seed: u64) -> Self {
        SessionConfig { protocol, seed, ..Self::default() }
    }

    fn sigma_bytes(&self) -> usize {
        self.sigma_bits / 8
    }

    fn p_bits(&self) -> u64 {
        if self.toy {
            TOY_P_BITS
        } else {
            self.group_bits + 1
        }
    }

    fn message_count(&self) -> usize {
        if self.protocol == Protocol::CompiledNp && !self.messages.is_empty() {
            self.messages.len()
        } else {
            2
        }
    }

    fn db_len(&self) -> usize {
        self.db.as_ref().map_or(self.z, MessageDatabase::len)
    }

    /// Checks every parameter constraint of the chosen protocol.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(OtError::InvalidParameter(msg));
        for (name, bits) in [("sigma", self.sigma_bits), ("lambda", self.lambda_bits)] {
            if bits == 0 || bits % 8 != 0 {
                return invalid(format!("{name} must be a positive multiple of 8, got {bits}"));
            }
        }
        if self.protocol.uses_group() && !self.toy && self.group_bits < MIN_GROUP_BITS {
            return invalid(format!("group bits must be at least {MIN_GROUP_BITS}"));
        }
        if self.protocol == Protocol::CompiledNp {
            let n = self.message_count();
            if n < 2 {
                return invalid("compiled-np needs at least two messages".into());
            }
            if self.s >= n as u64 {
                return Err(OtError::IndexOutOfRange { index: self.s as usize, len: n });
            }
        } else {
            bit_from_u64(self.s)?;
            if !self.messages.is_empty() && self.messages.len() != 2 {
                return invalid(format!("{} takes exactly two messages", self.protocol));
            }
        }
        for m in &self.messages {
            if m.len() != self.sigma_bytes() {
                return Err(OtError::LengthMismatch { expected: self.sigma_bytes(), got: m.len() });
            }
        }
        if self.protocol.is_multi_receiver() {
            if let Some(db) = &self.db {
                if db.message_len() != self.sigma_bytes() {
                    return Err(OtError::LengthMismatch { expected: self.sigma_bytes(), got: db.message_len() });
                }
            } else if self.z == 0 {
                return invalid("z must be at least 1".into());
            }
            if self.v >= self.db_len() {
                return Err(OtError::IndexOutOfRange { index: self.v, len: self.db_len() });
            }
        }
        if let Some(t) = self.tamper {
            let fits = match t {
                Tamper::Beta0 | Tamper::Beta1 => self.protocol.has_query_pair(),
                Tamper::Tag => matches!(self.protocol, Protocol::DuqOt | Protocol::DuqMr),
            };
            if !fits {
                return invalid(format!("tamper {t:?} does not apply to {}", self.protocol));
            }
        }
        let needs_paillier = matches!(self.protocol, Protocol::DuqMr | Protocol::CompiledNp);
        if needs_paillier {
            if self.paillier_bits < paillier::MIN_KEY_BITS || !self.paillier_bits.is_multiple_of(2) {
                return invalid(format!("Paillier bits must be even and >= {}", paillier::MIN_KEY_BITS));
            }
            let need = if self.protocol == Protocol::DuqMr {
                self.p_bits().max((self.sigma_bits + self.lambda_bits) as u64) + 1
            } else {
                let element_bytes = self.p_bits().div_ceil(8) as usize;
                compiler::required_key_bits(element_bytes.max(self.sigma_bytes()))
            };
            if self.paillier_bits < need {
                return Err(OtError::KeyTooSmall { have: self.paillier_bits, need });
            }
        }
        Ok(())
    }
}

const SETUP_STREAM: u64 = 0;

fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

type Step<T> = std::result::Result<T, (Role, OtError)>;

struct Ctx<'a> {
    cfg: &'a SessionConfig,
    bus: Bus,
    rngs: BTreeMap<Role, ChaCha20Rng>,
    timings: Vec<PhaseTiming>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a SessionConfig) -> Self {
        let rngs = Role::ALL.iter().map(|&r| (r, stream_rng(cfg.seed, r.code() as u64))).collect();
        Ctx { cfg, bus: Bus::new(), rngs, timings: Vec::new() }
    }

    fn rng(&mut self, role: Role) -> &mut ChaCha20Rng {
        self.rngs.get_mut(&role).expect("every role has a stream")
    }

    /// Runs one step of `role`, timing it and tagging any error with the role.
    fn phase<T>(&mut self, role: Role, phase: &'static str, f: impl FnOnce(&mut Self) -> Result<T>) -> Step<T> {
        let start = Instant::now();
        let out = f(self);
        self.timings.push(PhaseTiming { role: Some(role), phase, elapsed: start.elapsed() });
        out.map_err(|e| (role, e))
    }
}

fn payload(f: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
    let mut out = Vec::new();
    f(&mut out);
    out
}

fn parse<'b, T>(bytes: &'b [u8], f: impl FnOnce(&mut Reader<'b>) -> Result<T>) -> Result<T> {
    let mut r = Reader::new(bytes);
    let value = f(&mut r)?;
    r.finish()?;
    Ok(value)
}

fn read_bit(r: &mut Reader<'_>) -> Result<bool> {
    bit_from_u64(r.u8()? as u64)
}

fn apply_tamper(pk: &GroupParams, query: FinalQueryPair, tamper: Option<Tamper>) -> FinalQueryPair {
    match tamper {
        Some(Tamper::Beta0) => FinalQueryPair { b0: pk.mul(&query.b0, pk.g()), ..query },
        Some(Tamper::Beta1) => FinalQueryPair { b1: pk.mul(&query.b1, pk.g()), ..query },
        _ => query,
    }
}

fn encode_list<T>(items: &[T], out: &mut Vec<u8>, mut f: impl FnMut(&T, &mut Vec<u8>)) {
    put_u32(out, items.len() as u32);
    for item in items {
        f(item, out);
    }
}

fn decode_list<'b, T>(r: &mut Reader<'b>, mut f: impl FnMut(&mut Reader<'b>) -> Result<T>) -> Result<Vec<T>> {
    let len = r.u32()? as usize;
    (0..len).map(|_| f(r)).collect()
}

/// Executes the protocol named in `config`. Configuration errors are
/// returned directly; protocol errors end the session and appear in the
/// transcript's outputs under the failing role.
pub fn run_session(config: &SessionConfig) -> Result<SessionTranscript> {
    config.validate()?;
    let mut setup_rng = stream_rng(config.seed, SETUP_STREAM);
    let start = Instant::now();
    let group = if !config.protocol.uses_group() {
        None
    } else if config.toy {
        Some(GroupParams::toy(&mut setup_rng))
    } else {
        Some(gen_group(config.group_bits, &mut setup_rng)?)
    };
    let sigma = config.sigma_bytes();
    let messages = if config.messages.is_empty() {
        (0..config.message_count()).map(|_| ByteString::random(sigma, &mut setup_rng)).collect()
    } else {
        config.messages.clone()
    };
    let db = match &config.db {
        Some(db) => db.clone(),
        None => MessageDatabase::new(
            (0..config.z)
                .map(|_| (ByteString::random(sigma, &mut setup_rng), ByteString::random(sigma, &mut setup_rng)))
                .collect(),
        )?,
    };
    let setup = PhaseTiming { role: None, phase: "setup", elapsed: start.elapsed() };

    let mut ctx = Ctx::new(config);
    ctx.timings.push(setup);
    let s = config.s;
    let bit = s == 1;
    let result = match (config.protocol, &group) {
        (Protocol::NpOt, Some(pk)) => run_np(&mut ctx, pk, &messages, bit),
        (Protocol::DqOt, Some(pk)) => run_dq(&mut ctx, pk, &messages, bit),
        (Protocol::DqMr, Some(pk)) => run_dq_mr(&mut ctx, pk, &db, bit),
        (Protocol::DuqOt, Some(pk)) => run_duq(&mut ctx, pk, &messages, bit),
        (Protocol::DuqMr, Some(pk)) => run_duq_mr(&mut ctx, pk, &db, bit),
        (Protocol::CompiledNp, Some(pk)) => run_compiled(&mut ctx, pk, &messages, s as usize),
        (Protocol::Supersonic, _) => run_supersonic(&mut ctx, &messages, bit),
        (_, None) => unreachable!("group-based protocols always get a group"),
    };
    let mut outputs = BTreeMap::new();
    match result {
        Ok(m) => outputs.insert(Role::Receiver, RoleOutput::Value(m)),
        Err((role, e)) => outputs.insert(role, RoleOutput::Error(e)),
    };
    Ok(SessionTranscript {
        protocol: config.protocol,
        seed: config.seed,
        events: ctx.bus.into_events(),
        outputs,
        timings: ctx.timings,
    })
}

use Role::{Issuer as T, Receiver as R, Sender as S, Server as P, P1, P2};

fn run_np(ctx: &mut Ctx<'_>, pk: &GroupParams, msgs: &[ByteString], s: bool) -> Step<ByteString> {
    let secret = ctx.phase(R, "query", |c| {
        let (query, secret) = np_gen_query(pk, s, c.rng(R));
        c.bus.send(R, S, MsgType::NpQuery, payload(|o| pk.encode_element(o, &query)))?;
        Ok(secret)
    })?;
    ctx.phase(S, "response", |c| {
        let e = c.bus.recv(S, MsgType::NpQuery)?;
        let query = parse(&e.payload, |r| pk.decode_element(r))?;
        let res = np_gen_res(&msgs[0], &msgs[1], pk, &query, c.rng(S))?;
        c.bus.send(S, R, MsgType::Response, payload(|o| res.encode(pk, o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let e = c.bus.recv(R, MsgType::Response)?;
        let res = parse(&e.payload, |r| NpResponse::decode(pk, r))?;
        np_retrieve(&res, &secret, pk)
    })
}

/// `R` shares `s` and sends both delegation requests.
fn dq_request(ctx: &mut Ctx<'_>, pk: &GroupParams, s: bool) -> Step<(DelegationRequest, DelegationRequest)> {
    ctx.phase(R, "request", |c| {
        let (req1, req2) = dq_r_request(s, pk, c.rng(R));
        c.bus.send(R, P1, MsgType::Req1, payload(|o| req1.encode(pk, o)))?;
        c.bus.send(R, P2, MsgType::Req2, payload(|o| req2.encode(pk, o)))?;
        Ok((req1, req2))
    })
}

fn p2_partial(ctx: &mut Ctx<'_>, pk: &GroupParams, req2: DelegationRequest) -> Result<()> {
    let partial = dq_p2_gen_query(&req2, pk);
    ctx.bus.send(P2, P1, MsgType::PartialQ, payload(|o| partial.encode(pk, o)))
}

fn p1_final(ctx: &mut Ctx<'_>, pk: &GroupParams, req1: DelegationRequest) -> Result<()> {
    let e = ctx.bus.recv(P1, MsgType::PartialQ)?;
    let partial = parse(&e.payload, |r| PartialQueryPair::decode(pk, r))?;
    let query = apply_tamper(pk, dq_p1_gen_query(&req1, &partial, pk), ctx.cfg.tamper);
    ctx.bus.send(P1, S, MsgType::FinalQ, payload(|o| query.encode(pk, o)))
}

/// `P2` then `P1` turn the delegation requests into the final query.
fn dq_helpers(ctx: &mut Ctx<'_>, pk: &GroupParams) -> Step<()> {
    ctx.phase(P2, "partial query", |c| {
        let e = c.bus.recv(P2, MsgType::Req2)?;
        let req2 = parse(&e.payload, |r| DelegationRequest::decode(pk, r))?;
        p2_partial(c, pk, req2)
    })?;
    ctx.phase(P1, "final query", |c| {
        let e = c.bus.recv(P1, MsgType::Req1)?;
        let req1 = parse(&e.payload, |r| DelegationRequest::decode(pk, r))?;
        p1_final(c, pk, req1)
    })
}

fn recv_final_query(ctx: &mut Ctx<'_>, pk: &GroupParams) -> Result<FinalQueryPair> {
    let e = ctx.bus.recv(S, MsgType::FinalQ)?;
    parse(&e.payload, |r| FinalQueryPair::decode(pk, r))
}

fn run_dq(ctx: &mut Ctx<'_>, pk: &GroupParams, msgs: &[ByteString], s: bool) -> Step<ByteString> {
    let (req1, req2) = dq_request(ctx, pk, s)?;
    dq_helpers(ctx, pk)?;
    ctx.phase(S, "response", |c| {
        let query = recv_final_query(c, pk)?;
        let res = dq_s_gen_res(&msgs[0], &msgs[1], pk, &query, c.rng(S))?;
        c.bus.send(S, R, MsgType::Response, payload(|o| res.encode(pk, o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let e = c.bus.recv(R, MsgType::Response)?;
        let res = parse(&e.payload, |r| NpResponse::decode(pk, r))?;
        dq_r_retrieve(&res, &req1, &req2, s, pk)
    })
}

fn run_dq_mr(ctx: &mut Ctx<'_>, pk: &GroupParams, db: &MessageDatabase, s: bool) -> Step<ByteString> {
    let (req1, req2) = dq_request(ctx, pk, s)?;
    dq_helpers(ctx, pk)?;
    ctx.phase(S, "response", |c| {
        let query = recv_final_query(c, pk)?;
        let all = dqmr_s_gen_res_multi(db, pk, &query, c.rng(S))?;
        let bytes = payload(|o| encode_list(&all, o, |res, o| res.encode(pk, o)));
        c.bus.send(S, P1, MsgType::ResponseVec, bytes)
    })?;
    ctx.phase(P1, "filter", |c| {
        let e = c.bus.recv(P1, MsgType::ResponseVec)?;
        let all = parse(&e.payload, |r| decode_list(r, |r| NpResponse::decode(pk, r)))?;
        let one = dqmr_p1_filter(&all, c.cfg.v)?;
        c.bus.send(P1, R, MsgType::Response, payload(|o| one.encode(pk, o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let e = c.bus.recv(R, MsgType::Response)?;
        let res = parse(&e.payload, |r| NpResponse::decode(pk, r))?;
        dq_r_retrieve(&res, &req1, &req2, s, pk)
    })
}

/// `R` sends the blinds; `T` shares `s` and distributes the tag.
fn duq_requests(ctx: &mut Ctx<'_>, pk: &GroupParams, s: bool) -> Step<ReceiverBlinds> {
    let blinds = ctx.phase(R, "request", |c| {
        let blinds = duq_r_request(pk, c.rng(R));
        c.bus.send(R, P1, MsgType::Req1, payload(|o| pk.encode_scalar(o, &blinds.r1)))?;
        c.bus.send(R, P2, MsgType::Req2, payload(|o| pk.encode_scalar(o, &blinds.r2)))?;
        Ok(blinds)
    })?;
    ctx.phase(T, "issue", |c| {
        let lambda = c.cfg.lambda_bits;
        let bundle = duq_t_request(s, lambda, c.rng(T))?;
        let sender_tag = match c.cfg.tamper {
            Some(Tamper::Tag) => ByteString::random(lambda / 8, c.rng(T)),
            _ => bundle.tag.clone(),
        };
        c.bus.send(T, P1, MsgType::IssuerReq1, payload(|o| put_u8(o, bundle.share1 as u8)))?;
        c.bus.send(T, P2, MsgType::IssuerReq2, payload(|o| put_u8(o, bundle.share2 as u8)))?;
        c.bus.send(T, S, MsgType::SpS, payload(|o| sender_tag.encode(o)))?;
        c.bus.send(T, R, MsgType::SpR, payload(|o| bundle.encode_sp_r(o)))
    })?;
    Ok(blinds)
}

fn duq_helpers(ctx: &mut Ctx<'_>, pk: &GroupParams) -> Step<()> {
    ctx.phase(P2, "partial query", |c| {
        let blind = parse(&c.bus.recv(P2, MsgType::Req2)?.payload, |r| pk.decode_scalar(r))?;
        let share = parse(&c.bus.recv(P2, MsgType::IssuerReq2)?.payload, read_bit)?;
        p2_partial(c, pk, DelegationRequest { share, blind })
    })?;
    ctx.phase(P1, "final query", |c| {
        let blind = parse(&c.bus.recv(P1, MsgType::Req1)?.payload, |r| pk.decode_scalar(r))?;
        let share = parse(&c.bus.recv(P1, MsgType::IssuerReq1)?.payload, read_bit)?;
        p1_final(c, pk, DelegationRequest { share, blind })
    })
}

fn recv_sp_r(ctx: &mut Ctx<'_>) -> Result<(bool, ByteString)> {
    let e = ctx.bus.recv(R, MsgType::SpR)?;
    parse(&e.payload, IssuerBundle::decode_sp_r)
}

fn run_duq(ctx: &mut Ctx<'_>, pk: &GroupParams, msgs: &[ByteString], s: bool) -> Step<ByteString> {
    let blinds = duq_requests(ctx, pk, s)?;
    duq_helpers(ctx, pk)?;
    ctx.phase(S, "response", |c| {
        let tag = parse(&c.bus.recv(S, MsgType::SpS)?.payload, ByteString::decode)?;
        let query = recv_final_query(c, pk)?;
        let res = duq_s_gen_res(&msgs[0], &msgs[1], pk, &query, &tag, c.rng(S))?;
        c.bus.send(S, R, MsgType::TaggedResponse, payload(|o| res.encode(pk, o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let (share2, tag) = recv_sp_r(c)?;
        let e = c.bus.recv(R, MsgType::TaggedResponse)?;
        let res = parse(&e.payload, |r| TaggedResponse::decode(pk, r))?;
        duq_r_retrieve(&res, &blinds, share2, &tag, pk)
    })
}

fn run_duq_mr(ctx: &mut Ctx<'_>, pk: &GroupParams, db: &MessageDatabase, s: bool) -> Step<ByteString> {
    let (sigma, lambda) = (ctx.cfg.sigma_bits, ctx.cfg.lambda_bits);
    let sk = ctx.phase(R, "key setup", |c| {
        let (pkj, skj) = duqmr_r_setup(c.cfg.paillier_bits, pk, sigma, lambda, c.rng(R))?;
        let key = payload(|o| pkj.encode(o));
        c.bus.send(R, T, MsgType::HePublicKey, key.clone())?;
        c.bus.send(R, S, MsgType::HePublicKey, key)?;
        Ok(skj)
    })?;
    ctx.phase(T, "compress vector", |c| {
        let pkj = parse(&c.bus.recv(T, MsgType::HePublicKey)?.payload, PaillierPublicKey::decode)?;
        let w = duqmr_t_setup(db.len(), c.cfg.v, &pkj, c.rng(T))?;
        c.bus.send(T, P1, MsgType::CompressVec, payload(|o| {
            pkj.encode(o);
            w.encode(&pkj, o);
        }))
    })?;
    let (pkj, w) = ctx.phase(P1, "store compress vector", |c| {
        let e = c.bus.recv(P1, MsgType::CompressVec)?;
        parse(&e.payload, |r| {
            let pkj = PaillierPublicKey::decode(r)?;
            let w = CompressVector::decode(&pkj, r)?;
            Ok((pkj, w))
        })
    })?;
    let blinds = duq_requests(ctx, pk, s)?;
    duq_helpers(ctx, pk)?;
    ctx.phase(S, "response", |c| {
        let pkj = parse(&c.bus.recv(S, MsgType::HePublicKey)?.payload, PaillierPublicKey::decode)?;
        let need = duq::required_key_bits(pk, sigma, lambda);
        if pkj.bits() < need {
            return Err(OtError::KeyTooSmall { have: pkj.bits(), need });
        }
        let tag = parse(&c.bus.recv(S, MsgType::SpS)?.payload, ByteString::decode)?;
        let query = recv_final_query(c, pk)?;
        let all = duqmr_s_gen_res_multi(db, pk, &query, &tag, c.rng(S))?;
        let bytes = payload(|o| encode_list(&all, o, |res, o| res.encode(pk, o)));
        c.bus.send(S, P1, MsgType::TaggedResponseVec, bytes)
    })?;
    ctx.phase(P1, "filter", |c| {
        let e = c.bus.recv(P1, MsgType::TaggedResponseVec)?;
        let all = parse(&e.payload, |r| decode_list(r, |r| TaggedResponse::decode(pk, r)))?;
        let filtered = duqmr_p1_filter(&all, &w, &pkj)?;
        c.bus.send(P1, R, MsgType::FilteredResponse, payload(|o| filtered.encode(&pkj, o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let (share2, tag) = recv_sp_r(c)?;
        let e = c.bus.recv(R, MsgType::FilteredResponse)?;
        let filtered = parse(&e.payload, |r| FilteredResponse::decode(sk.public_key(), r))?;
        duqmr_r_retrieve(&filtered, &sk, &blinds, share2, &tag, pk, sigma)
    })
}

fn run_compiled(ctx: &mut Ctx<'_>, pk: &GroupParams, msgs: &[ByteString], s: usize) -> Step<ByteString> {
    let suite = NaorPinkasSuite::new(ctx.cfg.sigma_bits, GroupSource::Bits(pk.lambda_bits()));
    let n = msgs.len();
    let sk = ctx.phase(R, "key setup", |c| {
        let (pkr, skr) = paillier::kgen(c.cfg.paillier_bits, c.rng(R))?;
        c.bus.send(R, S, MsgType::HePublicKey, payload(|o| pkr.encode(o)))?;
        Ok(skr)
    })?;
    let pkr = sk.public_key().clone();
    let (query, secret) = ctx.phase(R, "query", |c| {
        let (query, secret, selector) = comp_gen_query(&suite, pk, n, s, &pkr, c.rng(R))?;
        c.bus.send(R, S, MsgType::NpQuery, payload(|o| pk.encode_element(o, &query)))?;
        c.bus.send(R, S, MsgType::SelectorVec, payload(|o| selector.encode(&pkr, o)))?;
        Ok((query, secret))
    })?;
    ctx.phase(S, "response", |c| {
        let pkr = parse(&c.bus.recv(S, MsgType::HePublicKey)?.payload, PaillierPublicKey::decode)?;
        let query = parse(&c.bus.recv(S, MsgType::NpQuery)?.payload, |r| pk.decode_element(r))?;
        let selector = parse(&c.bus.recv(S, MsgType::SelectorVec)?.payload, |r| SelectorVector::decode(&pkr, r))?;
        let res = comp_gen_res(&suite, msgs, pk, &query, &selector, &pkr, c.rng(S))?;
        c.bus.send(S, R, MsgType::CompressedResponse, payload(|o| res.encode(&pkr, o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let e = c.bus.recv(R, MsgType::CompressedResponse)?;
        let res = parse(&e.payload, |r| CompressedResponse::decode(&pkr, r))?;
        comp_retrieve(&suite, &res, &sk, &query, &secret, pk, s)
    })
}

fn run_supersonic(ctx: &mut Ctx<'_>, msgs: &[ByteString], s: bool) -> Step<ByteString> {
    let keys = ctx.phase(R, "setup", |c| {
        let keys = sup_setup(c.cfg.sigma_bits, c.rng(R))?;
        c.bus.send(R, S, MsgType::PadKeys, payload(|o| keys.encode(o)))?;
        Ok(keys)
    })?;
    ctx.phase(R, "query", |c| {
        let (q1, q2) = sup_gen_query(s, c.rng(R));
        c.bus.send(R, S, MsgType::SupQ1, payload(|o| put_u8(o, q1 as u8)))?;
        c.bus.send(R, P, MsgType::SupQ2, payload(|o| put_u8(o, q2 as u8)))
    })?;
    ctx.phase(S, "response", |c| {
        let keys = parse(&c.bus.recv(S, MsgType::PadKeys)?.payload, PadKeys::decode)?;
        let q1 = parse(&c.bus.recv(S, MsgType::SupQ1)?.payload, read_bit)?;
        let e = sup_gen_res(&msgs[0], &msgs[1], &keys, q1)?;
        c.bus.send(S, P, MsgType::SupEpair, payload(|o| e.encode(o)))
    })?;
    ctx.phase(P, "filter", |c| {
        let q2 = parse(&c.bus.recv(P, MsgType::SupQ2)?.payload, read_bit)?;
        let e = parse(&c.bus.recv(P, MsgType::SupEpair)?.payload, EncPair::decode)?;
        let head = sup_obl_filter(e, q2);
        c.bus.send(P, R, MsgType::SupResult, payload(|o| head.encode(o)))
    })?;
    ctx.phase(R, "retrieve", |c| {
        let head = parse(&c.bus.recv(R, MsgType::SupResult)?.payload, ByteString::decode)?;
        sup_retrieve(&head, keys, s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(protocol: Protocol, seed: u64) -> SessionConfig {
        SessionConfig { group_bits: 256, paillier_bits: 600, ..SessionConfig::new(protocol, seed) }
    }

    fn types(t: &SessionTranscript) -> Vec<(Role, Role, &'static str)> {
        t.events.iter().map(|e| (e.from, e.to, e.msg_type.label())).collect()
    }

    #[test]
    fn dq_toy_returns_m1() {
        let m0 = ByteString::from_hex("00").unwrap();
        let m1 = ByteString::from_hex("ff").unwrap();
        let cfg = SessionConfig {
            toy: true,
            sigma_bits: 8,
            s: 1,
            messages: vec![m0, m1.clone()],
            ..SessionConfig::new(Protocol::DqOt, 3)
        };
        let t = run_session(&cfg).unwrap();
        assert_eq!(t.receiver_value(), Some(&m1));
        assert_eq!(
            types(&t),
            vec![
                (R, P1, "REQ1"),
                (R, P2, "REQ2"),
                (P2, P1, "PARTIAL_Q"),
                (P1, S, "FINAL_Q"),
                (S, R, "RESPONSE"),
            ]
        );
    }

    #[test]
    fn golden_orders() {
        let golden: [(Protocol, &[&str]); 6] = [
            (Protocol::NpOt, &["NP_QUERY", "RESPONSE"]),
            (Protocol::DqMr, &["REQ1", "REQ2", "PARTIAL_Q", "FINAL_Q", "RESPONSE_VEC", "RESPONSE"]),
            (
                Protocol::DuqOt,
                &["REQ1", "REQ2", "ISSUER_REQ1", "ISSUER_REQ2", "SP_S", "SP_R", "PARTIAL_Q", "FINAL_Q", "TAGGED_RESPONSE"],
            ),
            (
                Protocol::DuqMr,
                &[
                    "HE_PUBLIC_KEY",
                    "HE_PUBLIC_KEY",
                    "COMPRESS_VEC",
                    "REQ1",
                    "REQ2",
                    "ISSUER_REQ1",
                    "ISSUER_REQ2",
                    "SP_S",
                    "SP_R",
                    "PARTIAL_Q",
                    "FINAL_Q",
                    "TAGGED_RESPONSE_VEC",
                    "FILTERED_RESPONSE",
                ],
            ),
            (Protocol::CompiledNp, &["HE_PUBLIC_KEY", "NP_QUERY", "SELECTOR_VEC", "COMPRESSED_RESPONSE"]),
            (Protocol::Supersonic, &["PAD_KEYS", "SUP_Q1", "SUP_Q2", "SUP_EPAIR", "SUP_RESULT"]),
        ];
        for (protocol, order) in golden {
            let t = run_session(&config(protocol, 1)).unwrap();
            let got: Vec<_> = t.events.iter().map(|e| e.msg_type.label()).collect();
            assert_eq!(got, order, "{protocol}");
            assert!(t.receiver_value().is_some(), "{protocol}: {:?}", t.outputs);
        }
    }

    #[test]
    fn every_protocol_returns_the_chosen_message() {
        for protocol in Protocol::ALL {
            for s in 0..2u64 {
                let mut cfg = config(protocol, 10 + s);
                cfg.s = s;
                cfg.v = 2;
                let t = run_session(&cfg).unwrap();
                // regenerate the inputs from the setup stream to find the expected value
                let mut setup = stream_rng(cfg.seed, SETUP_STREAM);
                if protocol.uses_group() {
                    gen_group(cfg.group_bits, &mut setup).unwrap();
                }
                let msgs: Vec<_> = (0..2).map(|_| ByteString::random(16, &mut setup)).collect();
                let pairs: Vec<_> =
                    (0..cfg.z).map(|_| (ByteString::random(16, &mut setup), ByteString::random(16, &mut setup))).collect();
                let want = if protocol.is_multi_receiver() {
                    let (m0, m1) = &pairs[2];
                    if s == 1 { m1.clone() } else { m0.clone() }
                } else {
                    msgs[s as usize].clone()
                };
                assert_eq!(t.receiver_value(), Some(&want), "{protocol} s={s}");
            }
        }
    }

    #[test]
    fn transcripts_are_deterministic() {
        for protocol in Protocol::ALL {
            let a = run_session(&config(protocol, 7)).unwrap();
            let b = run_session(&config(protocol, 7)).unwrap();
            assert_eq!(a.to_jsonl(), b.to_jsonl());
            assert_eq!(a.frames(), b.frames());
            let c = run_session(&config(protocol, 8)).unwrap();
            assert_ne!(a.frames(), c.frames());
        }
    }

    #[test]
    fn views_follow_the_message_flow() {
        let t = run_session(&config(Protocol::DqOt, 2)).unwrap();
        assert!(t.view(R).iter().all(|e| e.msg_type != MsgType::PartialQ));
        assert!(t.view(P2).iter().all(|e| e.msg_type != MsgType::FinalQ));
        assert_eq!(t.view(S).len(), 2);
    }

    #[test]
    fn receiver_inbound_is_constant_in_z() {
        for protocol in [Protocol::DqMr, Protocol::DuqMr] {
            let mut sizes = Vec::new();
            for z in [1usize, 4, 8] {
                let cfg = SessionConfig { z, v: z - 1, ..config(protocol, 5) };
                let t = run_session(&cfg).unwrap();
                assert!(t.receiver_value().is_some());
                let inbound: Vec<_> = t.inbound(R).iter().map(|e| (e.msg_type, e.payload.len())).collect();
                sizes.push(inbound);
            }
            assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{protocol}: {sizes:?}");
        }
    }

    #[test]
    fn tampering_aborts_at_the_sender() {
        for protocol in [Protocol::DqOt, Protocol::DqMr, Protocol::DuqOt, Protocol::DuqMr] {
            for tamper in [Tamper::Beta0, Tamper::Beta1] {
                let cfg = SessionConfig { tamper: Some(tamper), ..config(protocol, 4) };
                let t = run_session(&cfg).unwrap();
                assert_eq!(t.failure(), Some((S, &OtError::ConsistencyAbort)), "{protocol}");
                assert!(t.receiver_value().is_none());
                assert!(t.inbound(R).iter().all(|e| e.from != S));
            }
        }
        for protocol in [Protocol::DuqOt, Protocol::DuqMr] {
            let cfg = SessionConfig { tamper: Some(Tamper::Tag), ..config(protocol, 4) };
            let t = run_session(&cfg).unwrap();
            assert_eq!(t.failure(), Some((R, &OtError::NoTagMatch)));
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad_s = SessionConfig { s: 2, ..config(Protocol::DqOt, 0) };
        assert_eq!(run_session(&bad_s).err(), Some(OtError::InvalidBit(2)));
        let bad_v = SessionConfig { v: 4, ..config(Protocol::DqMr, 0) };
        assert!(matches!(run_session(&bad_v), Err(OtError::IndexOutOfRange { .. })));
        let small = SessionConfig { paillier_bits: 256, ..config(Protocol::DuqMr, 0) };
        assert!(matches!(run_session(&small), Err(OtError::KeyTooSmall { .. })));
        let small = SessionConfig { paillier_bits: 256, ..config(Protocol::CompiledNp, 0) };
        assert!(matches!(run_session(&small), Err(OtError::KeyTooSmall { .. })));
        let tamper = SessionConfig { tamper: Some(Tamper::Tag), ..config(Protocol::DqOt, 0) };
        assert!(run_session(&tamper).is_err());
        let sigma = SessionConfig { sigma_bits: 12, ..config(Protocol::Supersonic, 0) };
        assert!(run_session(&sigma).is_err());
        let len = SessionConfig { messages: vec![ByteString::zeros(1), ByteString::zeros(2)], ..config(Protocol::NpOt, 0) };
        assert!(matches!(run_session(&len), Err(OtError::LengthMismatch { .. })));
    }

    #[test]
    fn compiled_accepts_more_than_two_messages() {
        let msgs: Vec<_> = (0..5u8).map(|i| ByteString::from(vec![i; 16])).collect();
        let cfg = SessionConfig { messages: msgs.clone(), s: 3, ..config(Protocol::CompiledNp, 9) };
        assert_eq!(run_session(&cfg).unwrap().receiver_value(), Some(&msgs[3]));
    }

    #[test]
    fn config_json_round_trips() {
        let cfg = SessionConfig {
            db: Some(MessageDatabase::parse_text("00 01\n02 03\n", 16).unwrap()),
            tamper: Some(Tamper::Beta1),
            ..config(Protocol::DqMr, 99)
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"protocol\":\"dq-mr\""));
        assert_eq!(serde_json::from_str::<SessionConfig>(&json).unwrap(), cfg);
        let minimal: SessionConfig = serde_json::from_str(r#"{"protocol":"supersonic","seed":3}"#).unwrap();
        assert_eq!(minimal, SessionConfig::new(Protocol::Supersonic, 3));
        assert!(serde_json::from_str::<SessionConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn jsonl_export_shape() {
        let t = run_session(&config(Protocol::Supersonic, 1)).unwrap();
        let text = t.to_jsonl();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 5 + 1);
        assert!(lines[0].starts_with(r#"{"record":"session","protocol":"supersonic","seed":1,"events":5}"#));
        assert!(lines[1].starts_with(r#"{"record":"envelope","seq":0,"from":"RECEIVER","to":"SENDER","msg_type":"PAD_KEYS""#));
        assert!(lines[6].starts_with(r#"{"record":"output","role":"RECEIVER","status":"ok","value":""#));
    }
}
