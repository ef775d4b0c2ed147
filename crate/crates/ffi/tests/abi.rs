use std::ffi::{CStr, CString};
use std::ptr;

use otkit_ffi::*;

fn run(json: &str) -> (OtkitStatus, *mut OtkitTranscript) {
    let c = CString::new(json).unwrap();
    let mut t = ptr::null_mut();
    let st = unsafe { otkit_run_session_json(c.as_ptr(), &mut t) };
    (st, t)
}

fn receiver_output(t: *const OtkitTranscript) -> Vec<u8> {
    let mut len = 0usize;
    let st = unsafe { otkit_transcript_receiver_output(t, ptr::null_mut(), 0, &mut len) };
    if len > 0 {
        assert_eq!(st, OtkitStatus::BufferTooSmall);
    }
    let mut buf = vec![0u8; len];
    let st = unsafe { otkit_transcript_receiver_output(t, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(st, OtkitStatus::Ok);
    buf
}

#[test]
fn dq_session_returns_chosen_message() {
    let (st, t) = run(r#"{"protocol":"dq-ot","seed":3,"toy":true,"s":1,"sigma_bits":16,"messages":["beef","cafe"]}"#);
    assert_eq!(st, OtkitStatus::Ok);
    assert_eq!(unsafe { otkit_transcript_failure(t) }, OtkitStatus::Ok);
    assert_eq!(receiver_output(t), vec![0xca, 0xfe]);
    assert_eq!(unsafe { otkit_transcript_event_count(t) }, 5);
    unsafe { otkit_transcript_free(t) };
}

#[test]
fn jsonl_export_is_nul_terminated() {
    let (_, t) = run(r#"{"protocol":"supersonic","seed":1,"sigma_bits":8}"#);
    let mut len = 0usize;
    unsafe { otkit_transcript_export_jsonl(t, ptr::null_mut(), 0, &mut len) };
    let mut buf = vec![0 as std::ffi::c_char; len + 1];
    let st = unsafe { otkit_transcript_export_jsonl(t, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(st, OtkitStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(text.len(), len);
    assert_eq!(text.lines().count(), 1 + 5 + 1);
    assert!(text.lines().last().unwrap().contains("\"role\":\"RECEIVER\""));
    unsafe { otkit_transcript_free(t) };
}

#[test]
fn tampered_session_reports_abort() {
    let (st, t) = run(r#"{"protocol":"dq-ot","seed":9,"toy":true,"s":0,"tamper":"beta0"}"#);
    assert_eq!(st, OtkitStatus::Ok);
    assert_eq!(unsafe { otkit_transcript_failure(t) }, OtkitStatus::ConsistencyAbort);
    let mut len = 0;
    let st = unsafe { otkit_transcript_receiver_output(t, ptr::null_mut(), 0, &mut len) };
    assert_eq!(st, OtkitStatus::ConsistencyAbort);
    let msg = unsafe { CStr::from_ptr(otkit_last_error_message()) };
    assert!(!msg.to_bytes().is_empty());
    unsafe { otkit_transcript_free(t) };
}

#[test]
fn bad_inputs_map_to_status_codes() {
    assert_eq!(run("{not json").0, OtkitStatus::InvalidJson);
    assert_eq!(run(r#"{"protocol":"dq-ot","s":2}"#).0, OtkitStatus::InvalidBit);
    assert_eq!(run(r#"{"protocol":"dq-ot","bogus":1}"#).0, OtkitStatus::InvalidJson);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { otkit_run_session_json(ptr::null(), &mut t) }, OtkitStatus::NullPointer);
    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { otkit_run_session_json(bad.as_ptr().cast(), &mut t) }, OtkitStatus::InvalidUtf8);
    assert_eq!(unsafe { otkit_transcript_failure(ptr::null()) }, OtkitStatus::NullPointer);
    unsafe { otkit_transcript_free(ptr::null_mut()) };
}

#[test]
fn status_names_are_static() {
    let name = unsafe { CStr::from_ptr(otkit_status_name(OtkitStatus::ConsistencyAbort)) };
    assert_eq!(name.to_str().unwrap(), "ConsistencyAbort");
    assert_eq!(OtkitStatus::Ok as i32, 0);
}

#[test]
fn group_handles() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { otkit_group_generate(0, 1, &mut g) }, OtkitStatus::Ok);
    assert_eq!(unsafe { otkit_group_p_bits(g) }, 5);
    unsafe { otkit_group_free(g) };

    assert_eq!(unsafe { otkit_group_generate(64, 1, &mut g) }, OtkitStatus::Ok);
    assert_eq!(unsafe { otkit_group_p_bits(g) }, 65);
    let mut len = 0;
    assert_eq!(unsafe { otkit_group_to_bytes(g, ptr::null_mut(), 0, &mut len) }, OtkitStatus::BufferTooSmall);
    let mut buf = vec![0u8; len];
    assert_eq!(unsafe { otkit_group_to_bytes(g, buf.as_mut_ptr(), len, &mut len) }, OtkitStatus::Ok);
    unsafe { otkit_group_free(g) };

    assert_eq!(unsafe { otkit_group_generate(8, 1, &mut g) }, OtkitStatus::InvalidParameter);
}

#[test]
fn supersonic_round_trip_all_cells() {
    let m = [[0x11u8, 0x22], [0x33, 0x44]];
    let k = [[0xa5u8, 0x5a], [0x0f, 0xf0]];
    for s in 0..2u8 {
        for q2 in 0..2u8 {
            let q1 = s ^ q2;
            let (mut c0, mut c1, mut head, mut out) = ([0u8; 2], [0u8; 2], [0u8; 2], [0u8; 2]);
            unsafe {
                assert_eq!(
                    otkit_sup_gen_res(m[0].as_ptr(), m[1].as_ptr(), k[0].as_ptr(), k[1].as_ptr(), 2, q1, c0.as_mut_ptr(), c1.as_mut_ptr()),
                    OtkitStatus::Ok
                );
                assert_eq!(otkit_sup_obl_filter(c0.as_ptr(), c1.as_ptr(), 2, q2, head.as_mut_ptr()), OtkitStatus::Ok);
                assert_eq!(otkit_sup_retrieve(head.as_ptr(), k[0].as_ptr(), k[1].as_ptr(), 2, s, out.as_mut_ptr()), OtkitStatus::Ok);
            }
            assert_eq!(out, m[s as usize], "s={s} q2={q2}");
        }
    }
    let mut out = [0u8; 2];
    let st = unsafe { otkit_sup_obl_filter(m[0].as_ptr(), m[1].as_ptr(), 2, 2, out.as_mut_ptr()) };
    assert_eq!(st, OtkitStatus::InvalidBit);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/otkit.h")).unwrap();
    for name in [
        "otkit_status_name",
        "otkit_last_error_message",
        "otkit_run_session_json",
        "otkit_transcript_failure",
        "otkit_transcript_receiver_output",
        "otkit_transcript_event_count",
        "otkit_transcript_export_jsonl",
        "otkit_transcript_frames",
        "otkit_transcript_free",
        "otkit_group_generate",
        "otkit_group_p_bits",
        "otkit_group_to_bytes",
        "otkit_group_free",
        "otkit_sup_gen_res",
        "otkit_sup_obl_filter",
        "otkit_sup_retrieve",
        "OTKIT_STATUS_CONSISTENCY_ABORT",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
