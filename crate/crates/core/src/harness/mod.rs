//! Session engine: role state machines over an in-process bus, transcript
//! capture and the wire encoding.

mod bus;
mod envelope;
mod session;
mod transcript;

pub use bus::Bus;
pub use envelope::{decode_envelope, decode_frame, encode_envelope, Envelope, MsgType, Role, HEADER_LEN};
pub use session::{run_session, Protocol, SessionConfig, Tamper};
pub use transcript::{PhaseTiming, RoleOutput, SessionTranscript};
