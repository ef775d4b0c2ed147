//! Roles, message tags and the wire frame:
//! `u32_be(total length) || from || to || msg_type || payload`, where the
//! total length counts the 7 header bytes.

use std::fmt;

use crate::error::{OtError, Result};

macro_rules! byte_enum {
    ($(#[$meta:meta])* $name:ident, $err:ident { $($variant:ident = $code:expr => $label:expr),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant = $code),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn code(self) -> u8 {
                self as u8
            }

            pub fn from_code(code: u8) -> Result<Self> {
                match code {
                    $($code => Ok($name::$variant),)+
                    other => Err(OtError::$err(other)),
                }
            }

            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    };
}

byte_enum!(
    /// The six parties: sender `S`, receiver `R`, helpers `P1`/`P2`, issuer
    /// `T` and the Supersonic server `P`.
    Role, UnknownRole {
        Sender = 1 => "SENDER",
        Receiver = 2 => "RECEIVER",
        P1 = 3 => "P1",
        P2 = 4 => "P2",
        Issuer = 5 => "ISSUER",
        Server = 6 => "SERVER",
    }
);

byte_enum!(
    MsgType, UnknownTag {
        Req1 = 0x01 => "REQ1",
        Req2 = 0x02 => "REQ2",
        PartialQ = 0x03 => "PARTIAL_Q",
        FinalQ = 0x04 => "FINAL_Q",
        Response = 0x05 => "RESPONSE",
        ResponseVec = 0x06 => "RESPONSE_VEC",
        IssuerReq1 = 0x10 => "ISSUER_REQ1",
        IssuerReq2 = 0x11 => "ISSUER_REQ2",
        SpS = 0x12 => "SP_S",
        SpR = 0x13 => "SP_R",
        CompressVec = 0x14 => "COMPRESS_VEC",
        TaggedResponseVec = 0x15 => "TAGGED_RESPONSE_VEC",
        FilteredResponse = 0x16 => "FILTERED_RESPONSE",
        TaggedResponse = 0x17 => "TAGGED_RESPONSE",
        SelectorVec = 0x20 => "SELECTOR_VEC",
        CompressedResponse = 0x21 => "COMPRESSED_RESPONSE",
        NpQuery = 0x22 => "NP_QUERY",
        HePublicKey = 0x23 => "HE_PUBLIC_KEY",
        PadKeys = 0x30 => "PAD_KEYS",
        SupQ1 = 0x31 => "SUP_Q1",
        SupQ2 = 0x32 => "SUP_Q2",
        SupEpair = 0x33 => "SUP_EPAIR",
        SupResult = 0x34 => "SUP_RESULT",
    }
);

pub const HEADER_LEN: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub from: Role,
    pub to: Role,
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

pub fn encode_envelope(e: &Envelope) -> Result<Vec<u8>> {
    let total = u32::try_from(e.payload.len() + HEADER_LEN)
        .map_err(|_| OtError::InvalidParameter("payload does not fit a frame".into()))?;
    let mut out = Vec::with_capacity(total as usize);
    out.extend_from_slice(&total.to_be_bytes());
    out.extend_from_slice(&[e.from.code(), e.to.code(), e.msg_type.code()]);
    out.extend_from_slice(&e.payload);
    Ok(out)
}

/// Decodes one frame and returns it with the number of bytes consumed.
pub fn decode_frame(bytes: &[u8]) -> Result<(Envelope, usize)> {
    if bytes.len() < HEADER_LEN {
        return Err(OtError::TruncatedFrame { need: HEADER_LEN, have: bytes.len() });
    }
    let total = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
    if total < HEADER_LEN {
        return Err(OtError::DecodeError(format!("frame length {total} is shorter than the header")));
    }
    if bytes.len() < total {
        return Err(OtError::TruncatedFrame { need: total, have: bytes.len() });
    }
    let envelope = Envelope {
        from: Role::from_code(bytes[4])?,
        to: Role::from_code(bytes[5])?,
        msg_type: MsgType::from_code(bytes[6])?,
        payload: bytes[HEADER_LEN..total].to_vec(),
    };
    Ok((envelope, total))
}

/// Decodes exactly one frame; trailing bytes are an error.
pub fn decode_envelope(bytes: &[u8]) -> Result<Envelope> {
    let (envelope, used) = decode_frame(bytes)?;
    if used != bytes.len() {
        return Err(OtError::DecodeError(format!("{} trailing bytes after frame", bytes.len() - used)));
    }
    Ok(envelope)
}
