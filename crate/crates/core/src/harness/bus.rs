//! In-process synchronous transport. Every envelope is encoded and decoded
//! on the way through so the recorded events are exactly what a wire would
//! carry.

use std::collections::{BTreeMap, VecDeque};

use super::envelope::{decode_envelope, encode_envelope, Envelope, MsgType, Role};
use crate::error::{OtError, Result};

#[derive(Debug, Default)]
pub struct Bus {
    events: Vec<Envelope>,
    inboxes: BTreeMap<Role, VecDeque<Envelope>>,
}

impl Bus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, from: Role, to: Role, msg_type: MsgType, payload: Vec<u8>) -> Result<()> {
        let frame = encode_envelope(&Envelope { from, to, msg_type, payload })?;
        let delivered = decode_envelope(&frame)?;
        self.events.push(delivered.clone());
        self.inboxes.entry(to).or_default().push_back(delivered);
        Ok(())
    }

    /// Next message for `to`, which must be of type `expected`.
    pub fn recv(&mut self, to: Role, expected: MsgType) -> Result<Envelope> {
        let next = self.inboxes.get_mut(&to).and_then(VecDeque::pop_front);
        match next {
            Some(e) if e.msg_type == expected => Ok(e),
            Some(e) => Err(OtError::Flow(format!("{to} expected {expected}, got {}", e.msg_type))),
            None => Err(OtError::Flow(format!("{to} expected {expected}, inbox empty"))),
        }
    }

    pub fn pending(&self, role: Role) -> usize {
        self.inboxes.get(&role).map_or(0, VecDeque::len)
    }

    pub fn events(&self) -> &[Envelope] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Envelope> {
        self.events
    }
}
