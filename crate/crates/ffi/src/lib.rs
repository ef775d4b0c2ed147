//! C ABI over `otkit`. Handles are opaque and owned by the caller once
//! returned; every function reports an [`OtkitStatus`]. Output buffers
//! follow one convention: the required length is always written to `*len`,
//! and `OTKIT_STATUS_BUFFER_TOO_SMALL` is returned when `cap` is short.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use otkit::group::{gen_group, GroupParams};
use otkit::harness::{run_session, SessionConfig, SessionTranscript};
use otkit::primitives::ByteString;
use otkit::supersonic::{sup_gen_res, sup_obl_filter, sup_retrieve, EncPair, PadKeys};
use otkit::OtError;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Result codes. Values from 10 up mirror the library's error variants.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OtkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    BufferTooSmall = 4,
    Panic = 5,
    PrimeSearchExhausted = 10,
    InputTooShort = 11,
    LengthMismatch = 12,
    PlaintextOutOfRange = 13,
    MalformedCiphertext = 14,
    ConsistencyAbort = 15,
    IndexOutOfRange = 16,
    NoTagMatch = 17,
    AmbiguousTag = 18,
    KeyTooSmall = 19,
    EmbeddingOverflow = 20,
    DecodeError = 21,
    TruncatedFrame = 22,
    UnknownTag = 23,
    UnknownRole = 24,
    InvalidBit = 25,
    InvalidParameter = 26,
    Flow = 27,
}

impl From<&OtError> for OtkitStatus {
    fn from(e: &OtError) -> Self {
        match e {
            OtError::PrimeSearchExhausted => OtkitStatus::PrimeSearchExhausted,
            OtError::InputTooShort { .. } => OtkitStatus::InputTooShort,
            OtError::LengthMismatch { .. } => OtkitStatus::LengthMismatch,
            OtError::PlaintextOutOfRange => OtkitStatus::PlaintextOutOfRange,
            OtError::MalformedCiphertext => OtkitStatus::MalformedCiphertext,
            OtError::ConsistencyAbort => OtkitStatus::ConsistencyAbort,
            OtError::IndexOutOfRange { .. } => OtkitStatus::IndexOutOfRange,
            OtError::NoTagMatch => OtkitStatus::NoTagMatch,
            OtError::AmbiguousTag => OtkitStatus::AmbiguousTag,
            OtError::KeyTooSmall { .. } => OtkitStatus::KeyTooSmall,
            OtError::EmbeddingOverflow => OtkitStatus::EmbeddingOverflow,
            OtError::DecodeError(_) => OtkitStatus::DecodeError,
            OtError::TruncatedFrame { .. } => OtkitStatus::TruncatedFrame,
            OtError::UnknownTag(_) => OtkitStatus::UnknownTag,
            OtError::UnknownRole(_) => OtkitStatus::UnknownRole,
            OtError::InvalidBit(_) => OtkitStatus::InvalidBit,
            OtError::InvalidParameter(_) => OtkitStatus::InvalidParameter,
            OtError::Flow(_) => OtkitStatus::Flow,
        }
    }
}

impl OtkitStatus {
    fn name(self) -> &'static CStr {
        match self {
            OtkitStatus::Ok => c"Ok",
            OtkitStatus::NullPointer => c"NullPointer",
            OtkitStatus::InvalidUtf8 => c"InvalidUtf8",
            OtkitStatus::InvalidJson => c"InvalidJson",
            OtkitStatus::BufferTooSmall => c"BufferTooSmall",
            OtkitStatus::Panic => c"Panic",
            OtkitStatus::PrimeSearchExhausted => c"PrimeSearchExhausted",
            OtkitStatus::InputTooShort => c"InputTooShort",
            OtkitStatus::LengthMismatch => c"LengthMismatch",
            OtkitStatus::PlaintextOutOfRange => c"PlaintextOutOfRange",
            OtkitStatus::MalformedCiphertext => c"MalformedCiphertext",
            OtkitStatus::ConsistencyAbort => c"ConsistencyAbort",
            OtkitStatus::IndexOutOfRange => c"IndexOutOfRange",
            OtkitStatus::NoTagMatch => c"NoTagMatch",
            OtkitStatus::AmbiguousTag => c"AmbiguousTag",
            OtkitStatus::KeyTooSmall => c"KeyTooSmall",
            OtkitStatus::EmbeddingOverflow => c"EmbeddingOverflow",
            OtkitStatus::DecodeError => c"DecodeError",
            OtkitStatus::TruncatedFrame => c"TruncatedFrame",
            OtkitStatus::UnknownTag => c"UnknownTag",
            OtkitStatus::UnknownRole => c"UnknownRole",
            OtkitStatus::InvalidBit => c"InvalidBit",
            OtkitStatus::InvalidParameter => c"InvalidParameter",
            OtkitStatus::Flow => c"Flow",
        }
    }
}

/// A finished protocol session.
pub struct OtkitTranscript {
    inner: SessionTranscript,
}

/// Public group parameters `(P, q, g, C)`.
pub struct OtkitGroup {
    inner: GroupParams,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(e: &OtError) -> OtkitStatus {
    set_last_error(e.to_string());
    e.into()
}

/// Runs `f`, converting panics into `OTKIT_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> Result<(), OtkitStatus> + UnwindSafe) -> OtkitStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => OtkitStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside otkit");
            OtkitStatus::Panic
        }
    }
}

unsafe fn bytes<'a>(p: *const u8, len: usize) -> Result<&'a [u8], OtkitStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(OtkitStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out(data: &[u8], buf: *mut u8, cap: usize, len: *mut usize) -> Result<(), OtkitStatus> {
    if len.is_null() {
        return Err(OtkitStatus::NullPointer);
    }
    *len = data.len();
    if cap < data.len() {
        return Err(OtkitStatus::BufferTooSmall);
    }
    if !data.is_empty() {
        if buf.is_null() {
            return Err(OtkitStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
    }
    Ok(())
}

fn bit(v: u8) -> Result<bool, OtkitStatus> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(fail(&OtError::InvalidBit(other as u64))),
    }
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn otkit_status_name(status: OtkitStatus) -> *const c_char {
    status.name().as_ptr()
}

/// Message of the last failure on this thread; valid until the next call
/// into the library from the same thread.
#[no_mangle]
pub extern "C" fn otkit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Runs the session described by a JSON configuration object, for example
/// `{"protocol":"dq-ot","seed":7,"s":1}`. A protocol abort still yields a
/// transcript; query it with `otkit_transcript_failure`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn otkit_run_session_json(config_json: *const c_char, out: *mut *mut OtkitTranscript) -> OtkitStatus {
    guard(|| {
        if config_json.is_null() || out.is_null() {
            return Err(OtkitStatus::NullPointer);
        }
        let text = CStr::from_ptr(config_json).to_str().map_err(|_| OtkitStatus::InvalidUtf8)?;
        let config: SessionConfig = serde_json::from_str(text).map_err(|e| {
            set_last_error(e.to_string());
            OtkitStatus::InvalidJson
        })?;
        let transcript = run_session(&config).map_err(|e| fail(&e))?;
        *out = Box::into_raw(Box::new(OtkitTranscript { inner: transcript }));
        Ok(())
    })
}

/// `OTKIT_STATUS_OK` when the receiver produced an output, otherwise the
/// code of the error that ended the session.
///
/// # Safety
/// `t` must come from `otkit_run_session_json` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn otkit_transcript_failure(t: *const OtkitTranscript) -> OtkitStatus {
    let Some(t) = t.as_ref() else {
        return OtkitStatus::NullPointer;
    };
    match t.inner.failure() {
        Some((_, e)) => fail(e),
        None => OtkitStatus::Ok,
    }
}

/// Copies the receiver's output bytes.
///
/// # Safety
/// `t` must be a live transcript; `buf` must hold `cap` bytes; `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn otkit_transcript_receiver_output(
    t: *const OtkitTranscript,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> OtkitStatus {
    guard(|| {
        let t = t.as_ref().ok_or(OtkitStatus::NullPointer)?;
        match (t.inner.receiver_value(), t.inner.failure()) {
            (Some(v), _) => write_out(v.as_bytes(), buf, cap, len),
            (None, Some((_, e))) => Err(fail(e)),
            (None, None) => Err(OtkitStatus::Flow),
        }
    })
}

/// Number of envelopes exchanged.
///
/// # Safety
/// `t` must be a live transcript or NULL.
#[no_mangle]
pub unsafe extern "C" fn otkit_transcript_event_count(t: *const OtkitTranscript) -> usize {
    t.as_ref().map_or(0, |t| t.inner.events.len())
}

/// Writes the line-delimited JSON export followed by a NUL; `*len`
/// excludes the NUL.
///
/// # Safety
/// `t` must be a live transcript; `buf` must hold `cap` bytes; `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn otkit_transcript_export_jsonl(
    t: *const OtkitTranscript,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> OtkitStatus {
    guard(|| {
        let t = t.as_ref().ok_or(OtkitStatus::NullPointer)?;
        let mut text = t.inner.to_jsonl().into_bytes();
        text.push(0);
        let status = write_out(&text, buf.cast(), cap, len);
        if !len.is_null() {
            *len -= 1;
        }
        status
    })
}

/// Concatenated wire frames of every envelope.
///
/// # Safety
/// As for `otkit_transcript_receiver_output`.
#[no_mangle]
pub unsafe extern "C" fn otkit_transcript_frames(
    t: *const OtkitTranscript,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> OtkitStatus {
    guard(|| {
        let t = t.as_ref().ok_or(OtkitStatus::NullPointer)?;
        write_out(&t.inner.frames(), buf, cap, len)
    })
}

/// # Safety
/// `t` must come from `otkit_run_session_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn otkit_transcript_free(t: *mut OtkitTranscript) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Safe-prime group with a `q_bits`-bit subgroup order, or the toy group
/// `P = 23` when `q_bits` is 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn otkit_group_generate(q_bits: u64, seed: u64, out: *mut *mut OtkitGroup) -> OtkitStatus {
    guard(|| {
        if out.is_null() {
            return Err(OtkitStatus::NullPointer);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let inner = if q_bits == 0 { GroupParams::toy(&mut rng) } else { gen_group(q_bits, &mut rng).map_err(|e| fail(&e))? };
        *out = Box::into_raw(Box::new(OtkitGroup { inner }));
        Ok(())
    })
}

/// Bit length of `P`.
///
/// # Safety
/// `g` must be a live group or NULL.
#[no_mangle]
pub unsafe extern "C" fn otkit_group_p_bits(g: *const OtkitGroup) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.p().bits())
}

/// Serialized `(P, q, g, C)`.
///
/// # Safety
/// `g` must be a live group; `buf` must hold `cap` bytes; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn otkit_group_to_bytes(g: *const OtkitGroup, buf: *mut u8, cap: usize, len: *mut usize) -> OtkitStatus {
    guard(|| {
        let g = g.as_ref().ok_or(OtkitStatus::NullPointer)?;
        write_out(&g.inner.to_bytes(), buf, cap, len)
    })
}

/// # Safety
/// `g` must come from `otkit_group_generate` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn otkit_group_free(g: *mut OtkitGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Sender step of Supersonic OT: `swap(q1, (m0 ^ k0, m1 ^ k1))`. All six
/// buffers are `len` bytes.
///
/// # Safety
/// Inputs must be readable and outputs writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn otkit_sup_gen_res(
    m0: *const u8,
    m1: *const u8,
    k0: *const u8,
    k1: *const u8,
    len: usize,
    q1: u8,
    out0: *mut u8,
    out1: *mut u8,
) -> OtkitStatus {
    guard(|| {
        let keys = PadKeys { k0: ByteString::from(bytes(k0, len)?), k1: ByteString::from(bytes(k1, len)?) };
        let m0 = ByteString::from(bytes(m0, len)?);
        let m1 = ByteString::from(bytes(m1, len)?);
        let e = sup_gen_res(&m0, &m1, &keys, bit(q1)?).map_err(|e| fail(&e))?;
        let mut n = 0;
        write_out(e.c0.as_bytes(), out0, len, &mut n)?;
        write_out(e.c1.as_bytes(), out1, len, &mut n)
    })
}

/// Server step: the head of `swap(q2, (c0, c1))`.
///
/// # Safety
/// Inputs must be readable and `out` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn otkit_sup_obl_filter(c0: *const u8, c1: *const u8, len: usize, q2: u8, out: *mut u8) -> OtkitStatus {
    guard(|| {
        let pair = EncPair { c0: ByteString::from(bytes(c0, len)?), c1: ByteString::from(bytes(c1, len)?) };
        let head = sup_obl_filter(pair, bit(q2)?);
        write_out(head.as_bytes(), out, len, &mut 0)
    })
}

/// Receiver step: `c ^ k_s`.
///
/// # Safety
/// Inputs must be readable and `out` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn otkit_sup_retrieve(
    c: *const u8,
    k0: *const u8,
    k1: *const u8,
    len: usize,
    s: u8,
    out: *mut u8,
) -> OtkitStatus {
    guard(|| {
        let keys = PadKeys { k0: ByteString::from(bytes(k0, len)?), k1: ByteString::from(bytes(k1, len)?) };
        let c = ByteString::from(bytes(c, len)?);
        let m = sup_retrieve(&c, keys, bit(s)?).map_err(|e| fail(&e))?;
        write_out(m.as_bytes(), out, len, &mut 0)
    })
}
