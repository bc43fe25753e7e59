//! Delimited vector files and the binary matrix format.
//!
//! Vector files are line-oriented: one vector per line, coordinates split by
//! a single-character delimiter, optionally preceded by a label field. Blank
//! lines and lines starting with `#` are skipped. Errors carry 1-based line
//! numbers. Floats are written in shortest round-trip form, so write-read is
//! lossless.
//!
//! Matrix files hold the support representation verbatim:
//!
//! ```text
//! magic "SSCM" | version u32 | d u64 | m u64 | s u64 |
//! master_seed u64 | stream_id u64 | supports m*s x u32 | signs m x u8
//! ```
//!
//! all little-endian, signs encoded 1 for +1 and 0 for -1. Reading validates
//! the full structure, so a file round-trips to a bit-identical matrix or
//! fails loudly.

use std::io::{BufRead, Read, Write};

use sscjl_core::{SeedSpec, SscMatrix, VectorBatch};

use crate::LabError;

/// Shape of a delimited vector file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VectorFormat {
    pub delimiter: char,
    /// Whether each line starts with a label field.
    pub labeled: bool,
}

impl Default for VectorFormat {
    fn default() -> Self {
        VectorFormat { delimiter: '\t', labeled: false }
    }
}

/// Parses a delimiter argument: a single character, or one of the names
/// `tab`, `space`, `comma`.
pub fn parse_delimiter(s: &str) -> Result<char, LabError> {
    match s {
        "tab" => Ok('\t'),
        "space" => Ok(' '),
        "comma" => Ok(','),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(LabError::InvalidArgument(format!(
                    "delimiter must be one character or tab/space/comma, got {s:?}"
                ))),
            }
        }
    }
}

/// Reads a vector batch, enforcing rectangular shape and finite values.
pub fn read_vector_batch<R: BufRead>(reader: R, format: &VectorFormat) -> Result<VectorBatch, LabError> {
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut expected: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split(format.delimiter);
        if format.labeled {
            // split always yields at least one field.
            labels.push(fields.next().unwrap_or_default().trim().to_string());
        }
        let mut coords = Vec::new();
        for field in fields {
            let token = field.trim();
            let value: f64 = token.parse().map_err(|_| LabError::Parse {
                line: lineno,
                message: format!("cannot parse {token:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(LabError::NonFiniteInput { line: lineno });
            }
            coords.push(value);
        }
        match expected {
            None => {
                if coords.is_empty() {
                    return Err(LabError::Ragged { line: lineno, expected: 1, got: 0 });
                }
                expected = Some(coords.len());
            }
            Some(e) if e != coords.len() => {
                return Err(LabError::Ragged { line: lineno, expected: e, got: coords.len() });
            }
            Some(_) => {}
        }
        vectors.push(coords);
    }
    if vectors.is_empty() {
        return Err(LabError::EmptyInput);
    }
    let batch = if format.labeled {
        VectorBatch::with_labels(vectors, labels)
    } else {
        VectorBatch::new(vectors)
    };
    Ok(batch?)
}

/// Writes a batch in the same format [`read_vector_batch`] accepts,
/// including labels when the batch carries them.
pub fn write_vector_batch<W: Write>(
    mut w: W,
    batch: &VectorBatch,
    format: &VectorFormat,
) -> Result<(), LabError> {
    let mut line = String::new();
    for i in 0..batch.len() {
        line.clear();
        if let Some(label) = batch.label(i) {
            line.push_str(label);
            line.push(format.delimiter);
        }
        for (k, v) in batch.vector(i).iter().enumerate() {
            if k > 0 {
                line.push(format.delimiter);
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

const MATRIX_MAGIC: &[u8; 4] = b"SSCM";
const MATRIX_VERSION: u32 = 1;

/// Writes the support representation of a matrix.
pub fn write_matrix<W: Write>(mut w: W, a: &SscMatrix) -> Result<(), LabError> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&MATRIX_VERSION.to_le_bytes())?;
    w.write_all(&(a.d() as u64).to_le_bytes())?;
    w.write_all(&(a.m() as u64).to_le_bytes())?;
    w.write_all(&(a.s() as u64).to_le_bytes())?;
    w.write_all(&a.seed().master_seed.to_le_bytes())?;
    w.write_all(&a.seed().stream_id.to_le_bytes())?;
    for j in 0..a.m() {
        for &i in a.support(j) {
            w.write_all(&i.to_le_bytes())?;
        }
    }
    for j in 0..a.m() {
        w.write_all(&[if a.sign(j) == 1 { 1u8 } else { 0u8 }])?;
    }
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], LabError> {
        if self.data.len() - self.pos < n {
            return Err(LabError::BadMatrixFile { message: "truncated".into() });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, LabError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, LabError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Reads and fully validates a matrix file.
pub fn read_matrix<R: Read>(mut r: R) -> Result<SscMatrix, LabError> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let mut cur = Cursor { data: &data, pos: 0 };

    if cur.take(4)? != MATRIX_MAGIC {
        return Err(LabError::BadMatrixFile { message: "bad magic".into() });
    }
    let version = cur.u32()?;
    if version != MATRIX_VERSION {
        return Err(LabError::BadMatrixFile {
            message: format!("unsupported version {version}, expected {MATRIX_VERSION}"),
        });
    }
    let dims: Vec<usize> = (0..3)
        .map(|_| {
            cur.u64()?.try_into().map_err(|_| LabError::BadMatrixFile {
                message: "dimension exceeds this platform's address space".into(),
            })
        })
        .collect::<Result<_, _>>()?;
    let (d, m, s) = (dims[0], dims[1], dims[2]);
    let seed = SeedSpec { master_seed: cur.u64()?, stream_id: cur.u64()? };

    let entries = m.checked_mul(s).ok_or(LabError::BadMatrixFile {
        message: "support count overflows".into(),
    })?;
    // The remaining payload has a known exact size; check it before
    // allocating anything proportional to the header's claims.
    let payload = entries
        .checked_mul(4)
        .and_then(|b| b.checked_add(m))
        .ok_or(LabError::BadMatrixFile { message: "support count overflows".into() })?;
    if data.len() - cur.pos != payload {
        return Err(LabError::BadMatrixFile {
            message: format!(
                "payload is {} bytes, header implies {payload}",
                data.len() - cur.pos
            ),
        });
    }

    let mut supports = Vec::with_capacity(entries);
    for _ in 0..entries {
        supports.push(cur.u32()?);
    }
    let mut signs = Vec::with_capacity(m);
    for &b in cur.take(m)? {
        signs.push(match b {
            1 => 1i8,
            0 => -1i8,
            other => {
                return Err(LabError::BadMatrixFile {
                    message: format!("invalid sign byte {other}"),
                })
            }
        });
    }

    SscMatrix::from_parts(d, m, s, supports, signs, seed)
        .map_err(|e| LabError::BadMatrixFile { message: e.to_string() })
}
