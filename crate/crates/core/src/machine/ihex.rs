//! Intel HEX reading and writing (record types 00 and 01).

use super::LoadError;

/// A contiguous run of bytes at an absolute address.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub addr: u32,
    pub data: Vec<u8>,
}

fn parse_hex_bytes(line: &str, lineno: usize) -> Result<Vec<u8>, LoadError> {
    let bad = |why: &str| LoadError::MalformedHex {
        line: lineno,
        reason: why.to_string(),
    };
    let body = line.strip_prefix(':').ok_or_else(|| bad("missing ':'"))?;
    if body.len() % 2 != 0 {
        return Err(bad("odd number of hex digits"));
    }
    (0..body.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&body[i..i + 2], 16).map_err(|_| bad("invalid hex digit")))
        .collect()
}

/// Parses data (00) and end-of-file (01) records. Data records are merged
/// when contiguous.
pub fn parse_ihex(text: &str) -> Result<Vec<Segment>, LoadError> {
    let mut segments: Vec<Segment> = Vec::new();
    let mut saw_eof = false;
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        if saw_eof {
            return Err(LoadError::MalformedHex {
                line: lineno,
                reason: "record after end-of-file".into(),
            });
        }
        let bytes = parse_hex_bytes(line, lineno)?;
        if bytes.len() < 5 || bytes.len() != bytes[0] as usize + 5 {
            return Err(LoadError::MalformedHex {
                line: lineno,
                reason: "length field does not match record".into(),
            });
        }
        let checksum = bytes.iter().fold(0u8, |acc, b| acc.wrapping_add(*b));
        if checksum != 0 {
            return Err(LoadError::MalformedHex {
                line: lineno,
                reason: "checksum mismatch".into(),
            });
        }
        let addr = u16::from_be_bytes([bytes[1], bytes[2]]) as u32;
        let data = &bytes[4..bytes.len() - 1];
        match bytes[3] {
            0x00 => match segments.last_mut() {
                Some(seg) if seg.addr + seg.data.len() as u32 == addr => {
                    seg.data.extend_from_slice(data)
                }
                _ => segments.push(Segment {
                    addr,
                    data: data.to_vec(),
                }),
            },
            0x01 => saw_eof = true,
            other => {
                return Err(LoadError::MalformedHex {
                    line: lineno,
                    reason: format!("unsupported record type {other:02x}"),
                })
            }
        }
    }
    if !saw_eof {
        return Err(LoadError::MalformedHex {
            line: text.lines().count(),
            reason: "missing end-of-file record".into(),
        });
    }
    Ok(segments)
}

/// Writes `data` at `addr` as 16-byte data records plus an EOF record.
///
/// Addresses must fit in 16 bits.
pub fn write_ihex(addr: u16, data: &[u8]) -> String {
    let mut out = String::new();
    for (i, chunk) in data.chunks(16).enumerate() {
        let a = addr.wrapping_add((i * 16) as u16);
        let mut rec = vec![chunk.len() as u8, (a >> 8) as u8, a as u8, 0x00];
        rec.extend_from_slice(chunk);
        let sum = rec.iter().fold(0u8, |acc, b| acc.wrapping_add(*b));
        rec.push(sum.wrapping_neg());
        out.push(':');
        for b in rec {
            out.push_str(&format!("{b:02X}"));
        }
        out.push('\n');
    }
    out.push_str(":00000001FF\n");
    out
}
