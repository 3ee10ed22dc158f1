//! Messages exchanged on the simulated links and their byte encodings.
//!
//! Every message travels as a frame `u8 kind ‖ u32 LE payload length ‖ payload`.
//! Payload layouts (all little-endian):
//!
//! | kind | tag | payload |
//! |------|-----|---------|
//! | KeyExchange | 1 | 32-byte key |
//! | CharacteristicsQuery | 2 | chr(7) ‖ u64 ts |
//! | LeakyCharacteristicsQuery | 3 | u8 axis ‖ u32 coordinate ‖ chr(7) ‖ u64 ts |
//! | KeyedCharacteristicsQuery | 4 | u64 key_id ‖ chr(7) ‖ u64 ts |
//! | FilterTransfer | 5 | serialized filter |
//! | HmacProbe | 6 | 32-byte MAC |
//! | ProbeAnswer | 7 | u8 hit |
//!
//! `chr` is `u8 device_type ‖ u16 antenna_height_m ‖ u16 low_channel ‖ u16 high_channel`.

use crate::cuckoo::{MacTag, SecretKey, KEY_BYTES, MAC_BYTES};
use crate::spectrum::{Axis, DeviceCharacteristics, DeviceType, EpochDay};

use super::ProtocolError;

pub const FRAME_HEADER_BYTES: usize = 5;
pub const CHR_BYTES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum MessageKind {
    KeyExchange = 1,
    CharacteristicsQuery = 2,
    LeakyCharacteristicsQuery = 3,
    KeyedCharacteristicsQuery = 4,
    FilterTransfer = 5,
    HmacProbe = 6,
    ProbeAnswer = 7,
}

impl MessageKind {
    pub fn from_tag(tag: u8) -> Option<Self> {
        use MessageKind::*;
        Some(match tag {
            1 => KeyExchange,
            2 => CharacteristicsQuery,
            3 => LeakyCharacteristicsQuery,
            4 => KeyedCharacteristicsQuery,
            5 => FilterTransfer,
            6 => HmacProbe,
            7 => ProbeAnswer,
            _ => return None,
        })
    }

    pub fn tag(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    KeyExchange {
        key: SecretKey,
    },
    CharacteristicsQuery {
        chr: DeviceCharacteristics,
        ts: EpochDay,
    },
    LeakyCharacteristicsQuery {
        axis: Axis,
        coordinate: u32,
        chr: DeviceCharacteristics,
        ts: EpochDay,
    },
    KeyedCharacteristicsQuery {
        key_id: u64,
        chr: DeviceCharacteristics,
        ts: EpochDay,
    },
    FilterTransfer {
        filter_bytes: Vec<u8>,
    },
    HmacProbe {
        tag: MacTag,
    },
    ProbeAnswer {
        hit: bool,
    },
}

fn put_chr(out: &mut Vec<u8>, chr: &DeviceCharacteristics) {
    out.push(chr.device_type as u8);
    out.extend_from_slice(&chr.antenna_height_m.to_le_bytes());
    out.extend_from_slice(&chr.low_channel.to_le_bytes());
    out.extend_from_slice(&chr.high_channel.to_le_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    kind: MessageKind,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ProtocolError> {
        if self.bytes.len() < n {
            return Err(ProtocolError::Malformed(format!(
                "{:?} payload too short",
                self.kind
            )));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, ProtocolError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ProtocolError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ProtocolError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ProtocolError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn chr(&mut self) -> Result<DeviceCharacteristics, ProtocolError> {
        let device_type = DeviceType::from_u8(self.u8()?)
            .ok_or_else(|| ProtocolError::Malformed("unknown device type".into()))?;
        let antenna_height_m = self.u16()?;
        let low = self.u16()?;
        let high = self.u16()?;
        DeviceCharacteristics::new(device_type, antenna_height_m, low, high)
            .map_err(|e| ProtocolError::Malformed(e.to_string()))
    }
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::KeyExchange { .. } => MessageKind::KeyExchange,
            Message::CharacteristicsQuery { .. } => MessageKind::CharacteristicsQuery,
            Message::LeakyCharacteristicsQuery { .. } => MessageKind::LeakyCharacteristicsQuery,
            Message::KeyedCharacteristicsQuery { .. } => MessageKind::KeyedCharacteristicsQuery,
            Message::FilterTransfer { .. } => MessageKind::FilterTransfer,
            Message::HmacProbe { .. } => MessageKind::HmacProbe,
            Message::ProbeAnswer { .. } => MessageKind::ProbeAnswer,
        }
    }

    pub fn encode_payload(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Message::KeyExchange { key } => out.extend_from_slice(key.as_bytes()),
            Message::CharacteristicsQuery { chr, ts } => {
                put_chr(&mut out, chr);
                out.extend_from_slice(&ts.0.to_le_bytes());
            }
            Message::LeakyCharacteristicsQuery {
                axis,
                coordinate,
                chr,
                ts,
            } => {
                out.push(match axis {
                    Axis::X => 0,
                    Axis::Y => 1,
                });
                out.extend_from_slice(&coordinate.to_le_bytes());
                put_chr(&mut out, chr);
                out.extend_from_slice(&ts.0.to_le_bytes());
            }
            Message::KeyedCharacteristicsQuery { key_id, chr, ts } => {
                out.extend_from_slice(&key_id.to_le_bytes());
                put_chr(&mut out, chr);
                out.extend_from_slice(&ts.0.to_le_bytes());
            }
            Message::FilterTransfer { filter_bytes } => out.extend_from_slice(filter_bytes),
            Message::HmacProbe { tag } => out.extend_from_slice(tag.as_bytes()),
            Message::ProbeAnswer { hit } => out.push(*hit as u8),
        }
        out
    }

    /// Parses a payload, returning the message and any bytes left over
    /// after the schema's fields. Receivers act on the parsed fields; the
    /// privacy audit treats leftovers as undeclared content.
    pub fn decode_payload(
        kind: MessageKind,
        payload: &[u8],
    ) -> Result<(Message, &[u8]), ProtocolError> {
        let mut c = Cursor {
            bytes: payload,
            kind,
        };
        let msg = match kind {
            MessageKind::KeyExchange => {
                let key: [u8; KEY_BYTES] = c.take(KEY_BYTES)?.try_into().unwrap();
                Message::KeyExchange {
                    key: SecretKey::from_bytes(key),
                }
            }
            MessageKind::CharacteristicsQuery => {
                let chr = c.chr()?;
                Message::CharacteristicsQuery {
                    chr,
                    ts: EpochDay(c.u64()?),
                }
            }
            MessageKind::LeakyCharacteristicsQuery => {
                let axis = match c.u8()? {
                    0 => Axis::X,
                    1 => Axis::Y,
                    v => return Err(ProtocolError::Malformed(format!("axis {v}"))),
                };
                let coordinate = c.u32()?;
                let chr = c.chr()?;
                Message::LeakyCharacteristicsQuery {
                    axis,
                    coordinate,
                    chr,
                    ts: EpochDay(c.u64()?),
                }
            }
            MessageKind::KeyedCharacteristicsQuery => {
                let key_id = c.u64()?;
                let chr = c.chr()?;
                Message::KeyedCharacteristicsQuery {
                    key_id,
                    chr,
                    ts: EpochDay(c.u64()?),
                }
            }
            MessageKind::FilterTransfer => {
                let all = c.take(payload.len())?;
                Message::FilterTransfer {
                    filter_bytes: all.to_vec(),
                }
            }
            MessageKind::HmacProbe => {
                let tag: [u8; MAC_BYTES] = c.take(MAC_BYTES)?.try_into().unwrap();
                Message::HmacProbe {
                    tag: MacTag::from_bytes(tag),
                }
            }
            MessageKind::ProbeAnswer => match c.u8()? {
                0 => Message::ProbeAnswer { hit: false },
                1 => Message::ProbeAnswer { hit: true },
                v => return Err(ProtocolError::Malformed(format!("probe answer {v}"))),
            },
        };
        Ok((msg, c.bytes))
    }
}

/// `u8 kind ‖ u32 LE length ‖ payload`.
pub fn encode_frame(kind: MessageKind, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_HEADER_BYTES + payload.len());
    out.push(kind.tag());
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(payload);
    out
}

pub fn decode_frame(frame: &[u8]) -> Result<(MessageKind, &[u8]), ProtocolError> {
    if frame.len() < FRAME_HEADER_BYTES {
        return Err(ProtocolError::Malformed("short frame".into()));
    }
    let kind = MessageKind::from_tag(frame[0])
        .ok_or_else(|| ProtocolError::Malformed(format!("unknown message kind {}", frame[0])))?;
    let len = u32::from_le_bytes(frame[1..5].try_into().unwrap()) as usize;
    if frame.len() != FRAME_HEADER_BYTES + len {
        return Err(ProtocolError::Malformed(format!(
            "frame declares {len} payload bytes, carries {}",
            frame.len() - FRAME_HEADER_BYTES
        )));
    }
    Ok((kind, &frame[FRAME_HEADER_BYTES..]))
}
