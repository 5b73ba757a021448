//! PD-code ingestion.
//!
//! Two textual forms are accepted: Knot Atlas records `X[a,b,c,d]` separated
//! by whitespace or commas (optionally wrapped in `PD[...]`), and a JSON
//! array of 4-tuples `[[a,b,c,d], ...]`. Labels are positive integers and
//! need not be dense.

use super::DiagramError;

/// Upper bound on the number of crossing records accepted from text.
pub const MAX_CROSSINGS: usize = 4096;

pub fn parse_records(text: &str) -> Result<Vec<[u64; 4]>, DiagramError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return parse_json(trimmed);
    }
    let mut body = trimmed;
    if let Some(rest) = body.strip_prefix("PD[") {
        body = rest
            .strip_suffix(']')
            .ok_or_else(|| malformed("unterminated PD[ wrapper"))?;
    }
    let mut records = Vec::new();
    let bytes = body.as_bytes();
    let mut pos = 0;
    loop {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b',') {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] != b'X' {
            return Err(malformed(format!("expected 'X[' at byte {pos}")));
        }
        pos += 1;
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if bytes.get(pos) != Some(&b'[') {
            return Err(malformed(format!("expected '[' at byte {pos}")));
        }
        pos += 1;
        let close = body[pos..]
            .find(']')
            .ok_or_else(|| malformed("unterminated crossing record"))?
            + pos;
        records.push(parse_quad(&body[pos..close])?);
        if records.len() > MAX_CROSSINGS {
            return Err(malformed("too many crossings"));
        }
        pos = close + 1;
    }
    Ok(records)
}

fn parse_json(text: &str) -> Result<Vec<[u64; 4]>, DiagramError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let arr = value.as_array().ok_or_else(|| malformed("expected a JSON array"))?;
    if arr.len() > MAX_CROSSINGS {
        return Err(malformed("too many crossings"));
    }
    arr.iter()
        .map(|rec| {
            let quad = rec
                .as_array()
                .filter(|q| q.len() == 4)
                .ok_or_else(|| malformed("each crossing must be an array of 4 labels"))?;
            let mut out = [0u64; 4];
            for (slot, v) in out.iter_mut().zip(quad) {
                *slot = v
                    .as_u64()
                    .filter(|&x| x > 0)
                    .ok_or_else(|| malformed("arc labels must be positive integers"))?;
            }
            Ok(out)
        })
        .collect()
}

fn parse_quad(inner: &str) -> Result<[u64; 4], DiagramError> {
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(malformed(format!("crossing record needs 4 labels, got {}", parts.len())));
    }
    let mut out = [0u64; 4];
    for (slot, p) in out.iter_mut().zip(parts) {
        let v: u64 = p.parse().map_err(|_| malformed(format!("bad arc label {p:?}")))?;
        if v == 0 {
            return Err(malformed("arc labels must be positive"));
        }
        *slot = v;
    }
    Ok(out)
}

fn malformed(msg: impl Into<String>) -> DiagramError {
    DiagramError::MalformedInput(msg.into())
}
