// The module docs show a literal TSV snippet; its tabs are load-bearing.
#![allow(clippy::tabs_in_doc_comments)]

//! Points of the boolean hypercube `{0,1}^d` and the on-disk dataset format.
//!
//! Points are bit-packed into machine words so Hamming distance is a handful
//! of xor/popcount instructions even for `d` in the thousands. Bits are
//! stored most-significant-first inside each word, which makes the derived
//! ordering on [`Point`] agree with lexicographic order of the bit string;
//! several downstream tie-breaking rules rely on that.
//!
//! Dataset files are TSV with a `#dim=<d>` header line:
//!
//! ```text
//! #dim=4
//! a	0110
//! b	1010	0.75
//! ```
//!
//! Points may be written either as a `d`-character `0/1` string or as
//! `ceil(d/4)` hex digits (high bit first, unused low bits zero). The `0/1`
//! form is canonical on output. The third column is an optional nonnegative
//! weight; a file must use weights on all records or on none (uniform).

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

/// A point of `{0,1}^d`, bit-packed MSB-first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    dim: usize,
    words: Vec<u64>,
}

impl Point {
    /// The all-zeros point.
    pub fn zero(dim: usize) -> Self {
        Point {
            dim,
            words: vec![0; dim.div_ceil(WORD_BITS)],
        }
    }

    /// Build from the positions of the one-bits. Positions outside `0..dim`
    /// are rejected.
    pub fn from_ones(dim: usize, ones: &[usize]) -> Result<Self> {
        let mut p = Point::zero(dim);
        for &i in ones {
            if i >= dim {
                return Err(Error::Invalid(format!(
                    "bit position {i} out of range for dimension {dim}"
                )));
            }
            p.set(i, true);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.dim);
        self.words[i / WORD_BITS] >> (WORD_BITS - 1 - (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.dim);
        let mask = 1u64 << (WORD_BITS - 1 - (i % WORD_BITS));
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let mask = 1u64 << (WORD_BITS - 1 - (i % WORD_BITS));
        self.words[i / WORD_BITS] ^= mask;
    }

    /// Number of one-bits.
    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Canonical `0/1` string.
    pub fn to_bit_string(&self) -> String {
        (0..self.dim)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Hamming distance between two points of the same dimension.
///
/// Dimension equality is a precondition; datasets are checked once at load
/// so the hot path can stay panic-free in release builds.
pub fn hamming_distance(x: &Point, y: &Point) -> u32 {
    debug_assert_eq!(x.dim, y.dim, "hamming_distance on mismatched dimensions");
    x.words
        .iter()
        .zip(&y.words)
        .map(|(a, b)| (a ^ b).count_ones())
        .sum()
}

/// Parse a point from text.
///
/// A string of length `d` over `0/1` is read as bits; a string of length
/// `ceil(d/4)` over hex digits is expanded four bits per digit, high bit
/// first. Hex padding bits beyond `d` must be zero.
pub fn parse_point(text: &str, dim: usize) -> Result<Point> {
    if dim == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    if text.len() == dim && text.bytes().all(|b| b == b'0' || b == b'1') {
        let mut p = Point::zero(dim);
        for (i, b) in text.bytes().enumerate() {
            if b == b'1' {
                p.set(i, true);
            }
        }
        return Ok(p);
    }
    let hex_len = dim.div_ceil(4);
    if text.len() == hex_len && text.bytes().all(|b| b.is_ascii_hexdigit()) {
        let mut p = Point::zero(dim);
        for (digit_idx, b) in text.bytes().enumerate() {
            let nibble = (b as char).to_digit(16).expect("checked hex digit");
            for bit in 0..4 {
                let pos = digit_idx * 4 + bit;
                let on = nibble >> (3 - bit) & 1 == 1;
                if pos < dim {
                    if on {
                        p.set(pos, true);
                    }
                } else if on {
                    return Err(Error::Parse(format!(
                        "hex point {text:?} has nonzero padding bits past dimension {dim}"
                    )));
                }
            }
        }
        return Ok(p);
    }
    Err(Error::Parse(format!(
        "point {text:?} is neither a {dim}-character 0/1 string nor {hex_len} hex digits"
    )))
}

/// One line of a dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub point: Point,
    /// Explicit weight, if the file carries a weight column.
    pub weight: Option<f64>,
}

/// A parsed dataset file: identified points with optional weights.
///
/// Records keep file order. Duplicate points across records are allowed here
/// (each record is one observation); they are merged when the dataset is
/// turned into a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub records: Vec<Record>,
}

impl Dataset {
    pub fn new(dim: usize, records: Vec<Record>) -> Result<Self> {
        let ds = Dataset { dim, records };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if self.records.is_empty() {
            return Err(Error::Invalid("dataset has no records".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(self.records.len());
        let weighted = self.records[0].weight.is_some();
        for r in &self.records {
            if r.point.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    left: self.dim,
                    right: r.point.dim(),
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::Invalid(format!("duplicate record id {:?}", r.id)));
            }
            if r.weight.is_some() != weighted {
                return Err(Error::Invalid(
                    "weight column must be present on all records or on none".into(),
                ));
            }
            if let Some(w) = r.weight {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Invalid(format!(
                        "record {:?} has invalid weight {w}",
                        r.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(Ok(line)) => line,
            Some(Err(e)) => return Err(Error::Parse(format!("unreadable header line: {e}"))),
            None => return Err(Error::Parse("empty dataset file".into())),
        };
        let dim: usize = header
            .trim()
            .strip_prefix("#dim=")
            .ok_or_else(|| Error::Parse(format!("first line must be #dim=<d>, got {header:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension in header {header:?}")))?;
        let mut records = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("unreadable line: {e}")))?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.is_empty() {
                continue;
            }
            let mut fields = trimmed.split('\t');
            let id = fields
                .next()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Parse(format!("line {}: missing id", lineno + 2)))?;
            let bits = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing point", lineno + 2)))?;
            let point = parse_point(bits, dim)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            let weight = match fields.next() {
                Some(w) => Some(w.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: bad weight {w:?}", lineno + 2))
                })?),
                None => None,
            };
            if fields.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: too many fields",
                    lineno + 2
                )));
            }
            records.push(Record {
                id: id.to_string(),
                point,
                weight,
            });
        }
        Dataset::new(dim, records)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Dataset::parse(std::io::BufReader::new(file))
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "#dim={}", self.dim)?;
        for r in &self.records {
            match r.weight {
                Some(weight) => writeln!(w, "{}\t{}\t{}", r.id, r.point, weight)?,
                None => writeln!(w, "{}\t{}", r.id, r.point)?,
            }
        }
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to Vec cannot fail");
        std::fs::write(path, buf).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Points only, in record order.
    pub fn points(&self) -> Vec<Point> {
        self.records.iter().map(|r| r.point.clone()).collect()
    }
}
