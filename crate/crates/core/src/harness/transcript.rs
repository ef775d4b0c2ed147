//! Session transcripts: the ordered envelopes, per-role outputs, per-role
//! views and the line-delimited JSON export.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

use super::envelope::{encode_envelope, Envelope, Role};
use super::session::Protocol;
use crate::error::OtError;
use crate::primitives::ByteString;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoleOutput {
    Value(ByteString),
    Error(OtError),
}

/// Wall-clock time of one protocol phase; not part of the exported bytes.
#[derive(Clone, Debug)]
pub struct PhaseTiming {
    pub role: Option<Role>,
    pub phase: &'static str,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SessionTranscript {
    pub protocol: Protocol,
    pub seed: u64,
    pub events: Vec<Envelope>,
    pub outputs: BTreeMap<Role, RoleOutput>,
    pub timings: Vec<PhaseTiming>,
}

#[derive(Serialize)]
struct HeaderRecord<'a> {
    record: &'a str,
    protocol: &'a str,
    seed: u64,
    events: usize,
}

#[derive(Serialize)]
struct EnvelopeRecord<'a> {
    record: &'a str,
    seq: usize,
    from: &'a str,
    to: &'a str,
    msg_type: &'a str,
    len: usize,
    payload: String,
}

#[derive(Serialize)]
struct OutputRecord<'a> {
    record: &'a str,
    role: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

impl SessionTranscript {
    pub fn output(&self, role: Role) -> Option<&RoleOutput> {
        self.outputs.get(&role)
    }

    pub fn receiver_value(&self) -> Option<&ByteString> {
        match self.output(Role::Receiver) {
            Some(RoleOutput::Value(v)) => Some(v),
            _ => None,
        }
    }

    /// The first role that failed, with its error.
    pub fn failure(&self) -> Option<(Role, &OtError)> {
        self.outputs.iter().find_map(|(role, out)| match out {
            RoleOutput::Error(e) => Some((*role, e)),
            RoleOutput::Value(_) => None,
        })
    }

    /// Envelopes sent or received by `role`, in send order.
    pub fn view(&self, role: Role) -> Vec<&Envelope> {
        self.events.iter().filter(|e| e.from == role || e.to == role).collect()
    }

    pub fn inbound(&self, role: Role) -> Vec<&Envelope> {
        self.events.iter().filter(|e| e.to == role).collect()
    }

    /// Concatenated wire frames of all events.
    pub fn frames(&self) -> Vec<u8> {
        self.events.iter().flat_map(|e| encode_envelope(e).expect("recorded envelopes fit a frame")).collect()
    }

    /// One JSON object per line: a header, every envelope, then every role
    /// output. Field order is fixed.
    pub fn to_jsonl(&self) -> String {
        let mut lines = Vec::with_capacity(self.events.len() + self.outputs.len() + 1);
        let header = HeaderRecord {
            record: "session",
            protocol: self.protocol.id(),
            seed: self.seed,
            events: self.events.len(),
        };
        lines.push(serde_json::to_string(&header).expect("serializable"));
        for (seq, e) in self.events.iter().enumerate() {
            let record = EnvelopeRecord {
                record: "envelope",
                seq,
                from: e.from.label(),
                to: e.to.label(),
                msg_type: e.msg_type.label(),
                len: e.payload.len(),
                payload: hex::encode(&e.payload),
            };
            lines.push(serde_json::to_string(&record).expect("serializable"));
        }
        for (role, out) in &self.outputs {
            let (status, value, error) = match out {
                RoleOutput::Value(v) => ("ok", Some(v.to_hex()), None),
                RoleOutput::Error(e) => ("error", None, Some(e.name())),
            };
            let record = OutputRecord { record: "output", role: role.label(), status, value, error };
            lines.push(serde_json::to_string(&record).expect("serializable"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}
