//! MSB-first bit packing and the `PFS1` section container.
//!
//! Container layout:
//!
//! ```text
//! "PFS1" | version u8 | kind u8 | section_count u8 |
//!   { tag u8 | bit_length u64 LE | ceil(bit_length/8) bytes, MSB-first }*
//! ```

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("unknown structure kind {0}")]
    BadKind(u8),
    #[error("truncated input")]
    Truncated,
    #[error("missing section {0}")]
    MissingSection(u8),
    #[error("malformed section {tag}: {why}")]
    Malformed { tag: u8, why: String },
}

pub const MAGIC: &[u8; 4] = b"PFS1";
pub const VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Kind {
    Bfs = 1,
    Covering = 2,
    Sliced = 3,
    Bars = 4,
}

impl Kind {
    pub fn from_byte(b: u8) -> Result<Kind, CodecError> {
        Ok(match b {
            1 => Kind::Bfs,
            2 => Kind::Covering,
            3 => Kind::Sliced,
            4 => Kind::Bars,
            _ => return Err(CodecError::BadKind(b)),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Bfs => "bfs",
            Kind::Covering => "nice",
            Kind::Sliced => "sliced",
            Kind::Bars => "bar",
        }
    }
}

#[derive(Default, Clone, Debug)]
pub struct BitWriter {
    bytes: Vec<u8>,
    nbits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        let off = (self.nbits % 8) as u32;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> off;
        }
        self.nbits += 1;
    }

    /// Low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for s in (0..width).rev() {
            self.push((value >> s) & 1 == 1);
        }
    }

    /// 8 bytes, little-endian byte order (each byte MSB-first).
    pub fn push_u64_le(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.push_bits(b as u64, 8);
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.nbits
    }

    pub fn into_section(self, tag: u8) -> Section {
        Section { tag, bit_len: self.nbits, bytes: self.bytes }
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    end: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(section: &'a Section) -> Self {
        BitReader { bytes: &section.bytes, pos: 0, end: section.bit_len }
    }

    pub fn remaining(&self) -> u64 {
        self.end - self.pos
    }

    pub fn bit(&mut self) -> Result<bool, CodecError> {
        if self.pos >= self.end {
            return Err(CodecError::Truncated);
        }
        let b = self.bytes[(self.pos / 8) as usize] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(b)
    }

    pub fn bits(&mut self, width: u32) -> Result<u64, CodecError> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.bit()? as u64;
        }
        Ok(v)
    }

    pub fn u64_le(&mut self) -> Result<u64, CodecError> {
        let mut buf = [0u8; 8];
        for b in buf.iter_mut() {
            *b = self.bits(8)? as u8;
        }
        Ok(u64::from_le_bytes(buf))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub tag: u8,
    pub bit_len: u64,
    pub bytes: Vec<u8>,
}

impl Section {
    pub fn u64(tag: u8, v: u64) -> Section {
        let mut w = BitWriter::new();
        w.push_u64_le(v);
        w.into_section(tag)
    }

    pub fn read_u64(&self) -> Result<u64, CodecError> {
        BitReader::new(self).u64_le()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Container {
    pub kind: Kind,
    pub sections: Vec<Section>,
}

impl Container {
    pub fn payload_bits(&self) -> u64 {
        self.sections.iter().map(|s| s.bit_len).sum()
    }

    pub fn section(&self, tag: u8) -> Result<&Section, CodecError> {
        self.sections.iter().find(|s| s.tag == tag).ok_or(CodecError::MissingSection(tag))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(self.kind as u8);
        out.push(self.sections.len() as u8);
        for s in &self.sections {
            out.push(s.tag);
            out.extend_from_slice(&s.bit_len.to_le_bytes());
            out.extend_from_slice(&s.bytes);
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Container, CodecError> {
        if data.len() < 7 {
            return Err(CodecError::Truncated);
        }
        if &data[..4] != MAGIC {
            return Err(CodecError::BadMagic);
        }
        if data[4] != VERSION {
            return Err(CodecError::BadVersion(data[4]));
        }
        let kind = Kind::from_byte(data[5])?;
        let count = data[6] as usize;
        let mut at = 7;
        let mut sections = Vec::with_capacity(count);
        for _ in 0..count {
            if data.len() < at + 9 {
                return Err(CodecError::Truncated);
            }
            let tag = data[at];
            let bit_len = u64::from_le_bytes(data[at + 1..at + 9].try_into().unwrap());
            at += 9;
            let nbytes = bit_len.div_ceil(8) as usize;
            if data.len() < at + nbytes {
                return Err(CodecError::Truncated);
            }
            sections.push(Section { tag, bit_len, bytes: data[at..at + nbytes].to_vec() });
            at += nbytes;
        }
        if at != data.len() {
            return Err(CodecError::Malformed { tag: 0, why: "trailing bytes".into() });
        }
        Ok(Container { kind, sections })
    }
}
