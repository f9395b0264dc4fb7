//! NPY format: header parsing (versions 1.0, 2.0, 3.0) and array writing
//! (version 1.0, little endian, C order, 64-byte payload alignment).

use thiserror::Error;

/// The NPY magic string.
pub const MAGIC: [u8; 6] = *b"\x93NUMPY";

/// Payload alignment for written arrays, in bytes.
pub const PAYLOAD_ALIGN: usize = 64;

#[derive(Debug, Error)]
pub enum NpyError {
    #[error("not an NPY payload: bad magic")]
    BadMagic,
    #[error("unsupported NPY version {0}.{1}")]
    UnsupportedVersion(u8, u8),
    #[error("unsupported dtype string {0:?}")]
    UnsupportedDtype(String),
    #[error("malformed header at byte {position}: {message}")]
    HeaderSyntax { position: usize, message: String },
    #[error("truncated input: needed {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("payload length {got} does not match descriptor ({want} bytes)")]
    PayloadMismatch { want: usize, got: usize },
}

/// Element types this store reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F64,
    F32,
    I64,
    I32,
    Bool,
}

impl Dtype {
    pub fn descr(&self) -> &'static str {
        match self {
            Dtype::F64 => "<f8",
            Dtype::F32 => "<f4",
            Dtype::I64 => "<i8",
            Dtype::I32 => "<i4",
            Dtype::Bool => "|b1",
        }
    }

    pub fn from_descr(s: &str) -> Option<Dtype> {
        match s {
            "<f8" => Some(Dtype::F64),
            "<f4" => Some(Dtype::F32),
            "<i8" => Some(Dtype::I64),
            "<i4" => Some(Dtype::I32),
            "|b1" => Some(Dtype::Bool),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Dtype::F64 | Dtype::I64 => 8,
            Dtype::F32 | Dtype::I32 => 4,
            Dtype::Bool => 1,
        }
    }
}

/// Parsed NPY header: element type, memory order, and shape.
#[derive(Debug, Clone, PartialEq)]
pub struct NpyDescriptor {
    pub dtype: Dtype,
    pub fortran_order: bool,
    pub shape: Vec<usize>,
}

impl NpyDescriptor {
    pub fn element_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn payload_len(&self) -> usize {
        self.element_count() * self.dtype.size()
    }
}

/// Parse an NPY header from the start of `bytes`. Returns the descriptor
/// and the offset at which the payload begins.
pub fn parse_npy_header(bytes: &[u8]) -> Result<(NpyDescriptor, usize), NpyError> {
    if bytes.len() < 8 {
        if bytes.len() < 6 || bytes[..bytes.len().min(6)] != MAGIC[..bytes.len().min(6)] {
            return Err(NpyError::BadMagic);
        }
        return Err(NpyError::Truncated { needed: 8, have: bytes.len() });
    }
    if bytes[..6] != MAGIC {
        return Err(NpyError::BadMagic);
    }
    let (major, minor) = (bytes[6], bytes[7]);
    let (header_len, header_start) = match (major, minor) {
        (1, 0) => {
            if bytes.len() < 10 {
                return Err(NpyError::Truncated { needed: 10, have: bytes.len() });
            }
            (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10)
        }
        (2, 0) | (3, 0) => {
            if bytes.len() < 12 {
                return Err(NpyError::Truncated { needed: 12, have: bytes.len() });
            }
            (
                u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize,
                12,
            )
        }
        (maj, min) => return Err(NpyError::UnsupportedVersion(maj, min)),
    };
    let payload_offset = header_start + header_len;
    if bytes.len() < payload_offset {
        return Err(NpyError::Truncated { needed: payload_offset, have: bytes.len() });
    }
    let header = &bytes[header_start..payload_offset];
    let descriptor = parse_header_dict(header, header_start)?;
    Ok((descriptor, payload_offset))
}

/// Parse the Python-dict-literal header. Accepts exactly the keys `descr`,
/// `fortran_order`, and `shape`, in any order, with arbitrary whitespace.
fn parse_header_dict(header: &[u8], base: usize) -> Result<NpyDescriptor, NpyError> {
    let mut p = Cursor { buf: header, pos: 0, base };
    p.skip_ws();
    p.expect(b'{')?;

    let mut descr: Option<String> = None;
    let mut fortran: Option<bool> = None;
    let mut shape: Option<Vec<usize>> = None;

    loop {
        p.skip_ws();
        if p.peek() == Some(b'}') {
            p.pos += 1;
            break;
        }
        let key = p.parse_string()?;
        p.skip_ws();
        p.expect(b':')?;
        p.skip_ws();
        match key.as_str() {
            "descr" => {
                if descr.is_some() {
                    return Err(p.err("duplicate key 'descr'"));
                }
                descr = Some(p.parse_string()?);
            }
            "fortran_order" => {
                if fortran.is_some() {
                    return Err(p.err("duplicate key 'fortran_order'"));
                }
                fortran = Some(p.parse_bool()?);
            }
            "shape" => {
                if shape.is_some() {
                    return Err(p.err("duplicate key 'shape'"));
                }
                shape = Some(p.parse_shape()?);
            }
            other => {
                return Err(p.err(&format!("unexpected key {other:?}")));
            }
        }
        p.skip_ws();
        match p.peek() {
            Some(b',') => {
                p.pos += 1;
            }
            Some(b'}') => {}
            _ => return Err(p.err("expected ',' or '}' after entry")),
        }
    }
    // Only whitespace (numpy pads with spaces and a trailing newline) may follow.
    p.skip_ws();
    if p.pos != p.buf.len() {
        return Err(p.err("trailing bytes after closing '}'"));
    }

    let descr = descr.ok_or_else(|| NpyError::HeaderSyntax {
        position: base,
        message: "missing key 'descr'".into(),
    })?;
    let fortran_order = fortran.ok_or_else(|| NpyError::HeaderSyntax {
        position: base,
        message: "missing key 'fortran_order'".into(),
    })?;
    let shape = shape.ok_or_else(|| NpyError::HeaderSyntax {
        position: base,
        message: "missing key 'shape'".into(),
    })?;
    let dtype = Dtype::from_descr(&descr).ok_or(NpyError::UnsupportedDtype(descr))?;
    Ok(NpyDescriptor { dtype, fortran_order, shape })
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: &str) -> NpyError {
        NpyError::HeaderSyntax { position: self.base + self.pos, message: message.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.buf.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), NpyError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {:?}", byte as char)))
        }
    }

    fn parse_string(&mut self) -> Result<String, NpyError> {
        let quote = match self.peek() {
            Some(q @ (b'\'' | b'"')) => q,
            _ => return Err(self.err("expected a quoted string")),
        };
        self.pos += 1;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == quote {
                let s = std::str::from_utf8(&self.buf[start..self.pos])
                    .map_err(|_| self.err("string is not UTF-8"))?
                    .to_string();
                self.pos += 1;
                return Ok(s);
            }
            self.pos += 1;
        }
        Err(self.err("unterminated string"))
    }

    fn parse_bool(&mut self) -> Result<bool, NpyError> {
        if self.buf[self.pos..].starts_with(b"True") {
            self.pos += 4;
            Ok(true)
        } else if self.buf[self.pos..].starts_with(b"False") {
            self.pos += 5;
            Ok(false)
        } else {
            Err(self.err("expected True or False"))
        }
    }

    fn parse_shape(&mut self) -> Result<Vec<usize>, NpyError> {
        self.expect(b'(')?;
        let mut dims = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    return Ok(dims);
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.buf[start..self.pos]).unwrap();
                    let dim: usize =
                        text.parse().map_err(|_| self.err("dimension out of range"))?;
                    dims.push(dim);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => {}
                        _ => return Err(self.err("expected ',' or ')' in shape")),
                    }
                }
                _ => return Err(self.err("expected a dimension or ')'")),
            }
        }
    }
}

/// Encode a header block for a v1.0 array, padded so the payload starts at
/// a multiple of [`PAYLOAD_ALIGN`] bytes.
pub fn encode_npy_header(dtype: Dtype, shape: &[usize]) -> Vec<u8> {
    let shape_text = match shape.len() {
        0 => "()".to_string(),
        1 => format!("({},)", shape[0]),
        _ => format!(
            "({})",
            shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
        ),
    };
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        dtype.descr(),
        shape_text
    );
    let prefix_len = MAGIC.len() + 2 + 2; // magic + version + u16 header length
    let unpadded = prefix_len + dict.len() + 1; // trailing newline
    let total = unpadded.div_ceil(PAYLOAD_ALIGN) * PAYLOAD_ALIGN;
    let header_len = total - prefix_len;

    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&MAGIC);
    out.push(1);
    out.push(0);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.resize(total - 1, b' ');
    out.push(b'\n');
    out
}

/// Typed payload view used when decoding members.
#[derive(Debug, Clone, PartialEq)]
pub enum NpyValues {
    F64(Vec<f64>),
    F32(Vec<f32>),
    I64(Vec<i64>),
    I32(Vec<i32>),
    Bool(Vec<bool>),
}

impl NpyValues {
    pub fn len(&self) -> usize {
        match self {
            NpyValues::F64(v) => v.len(),
            NpyValues::F32(v) => v.len(),
            NpyValues::I64(v) => v.len(),
            NpyValues::I32(v) => v.len(),
            NpyValues::Bool(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Decode a whole NPY member (header + payload) into typed values.
pub fn decode_npy(bytes: &[u8]) -> Result<(NpyDescriptor, NpyValues), NpyError> {
    let (desc, offset) = parse_npy_header(bytes)?;
    let payload = &bytes[offset..];
    let want = desc.payload_len();
    if payload.len() < want {
        return Err(NpyError::PayloadMismatch { want, got: payload.len() });
    }
    let payload = &payload[..want];
    let values = match desc.dtype {
        Dtype::F64 => NpyValues::F64(
            payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::F32 => NpyValues::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::I64 => NpyValues::I64(
            payload
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::I32 => NpyValues::I32(
            payload
                .chunks_exact(4)
                .map(|c| i32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::Bool => NpyValues::Bool(payload.iter().map(|&b| b != 0).collect()),
    };
    Ok((desc, values))
}

/// Encode a full NPY member from f64 values.
pub fn encode_npy_f64(values: &[f64], shape: &[usize]) -> Vec<u8> {
    debug_assert_eq!(values.len(), shape.iter().product::<usize>());
    let mut out = encode_npy_header(Dtype::F64, shape);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Encode a full NPY member from i64 values.
pub fn encode_npy_i64(values: &[i64], shape: &[usize]) -> Vec<u8> {
    debug_assert_eq!(values.len(), shape.iter().product::<usize>());
    let mut out = encode_npy_header(Dtype::I64, shape);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
