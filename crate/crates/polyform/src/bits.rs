//! Static bitvectors with rank and select.
//!
//! Positions are 1-based and `rank1(i)` counts ones in `1..=i`, so
//! `rank1(0) == 0`. `select1(j)` returns the position of the `j`-th one, or
//! `None` past the last one.
//!
//! * [`Mode::Plain`]: raw words + superblock counts + per-word relative counts
//!   + sampled select hints. The superblock width grows like `log² n`, so the
//!   directory overhead shrinks as the vector grows.
//! * [`Mode::Sparse`]: Elias–Fano. Low `⌊log2(n/k)⌋` bits of each one's
//!   position are stored verbatim, the high parts in unary in a plain vector.

use crate::codec::{BitReader, BitWriter, CodecError, Section};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Sparse,
}

#[derive(Clone, Debug)]
pub struct BitVector {
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Plain(Plain),
    Sparse(Sparse),
}

const SELECT_SAMPLE: usize = 512;

/// `SELECT_IN_BYTE[b][r]`: position of the (r+1)-th set bit of byte `b`.
const SELECT_IN_BYTE: [[u8; 8]; 256] = {
    let mut t = [[8u8; 8]; 256];
    let mut b = 0;
    while b < 256 {
        let (mut i, mut r) = (0, 0);
        while i < 8 {
            if b >> i & 1 == 1 {
                t[b][r] = i as u8;
                r += 1;
            }
            i += 1;
        }
        b += 1;
    }
    t
};

/// Position of the (r+1)-th set bit of `w`; caller guarantees it exists.
/// Broadword byte prefix sums pick the byte, a table finishes it.
#[inline]
fn select_in_word(w: u64, r: u32) -> u32 {
    const L8: u64 = 0x0101_0101_0101_0101;
    const H8: u64 = 0x8080_8080_8080_8080;
    let mut s = w - ((w >> 1) & 0x5555_5555_5555_5555);
    s = (s & 0x3333_3333_3333_3333) + ((s >> 2) & 0x3333_3333_3333_3333);
    s = (s + (s >> 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    // byte i holds the ones in bytes 0..=i (≤ 64, so no carries)
    let cum = s.wrapping_mul(L8);
    // high bit of byte i set iff cum_i ≤ r
    let below = (((r as u64 * L8) | H8) - cum) & H8;
    let place = below.count_ones() * 8;
    let before = ((cum << 8) >> place) as u32 & 0xff;
    place + SELECT_IN_BYTE[((w >> place) & 0xff) as usize][(r - before) as usize] as u32
}

#[derive(Clone, Debug)]
struct Plain {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    sb_words: usize,
    /// ones before each superblock; one extra entry at the end
    sb: Vec<u64>,
    /// ones before each word, relative to its superblock
    rel: Vec<u16>,
    /// superblock holding the (t·SELECT_SAMPLE + 1)-th one / zero
    hint1: Vec<u32>,
    hint0: Vec<u32>,
}

impl Plain {
    fn new(words: Vec<u64>, len: usize) -> Plain {
        let nw = words.len();
        let lg = usize::BITS - (len + 2).leading_zeros();
        let sb_words = ((lg * lg) as usize).div_ceil(64).clamp(1, 64);
        let nsb = nw.div_ceil(sb_words).max(1);
        let mut sb = Vec::with_capacity(nsb + 1);
        let mut rel = Vec::with_capacity(nw);
        let mut total = 0u64;
        for (i, w) in words.iter().enumerate() {
            if i % sb_words == 0 {
                sb.push(total);
            }
            rel.push((total - sb[i / sb_words]) as u16);
            total += w.count_ones() as u64;
        }
        while sb.len() < nsb {
            sb.push(total);
        }
        sb.push(total);
        let ones = total as usize;
        let mut p = Plain { words, len, ones, sb_words, sb, rel, hint1: Vec::new(), hint0: Vec::new() };
        p.hint1 = p.hints(true);
        p.hint0 = p.hints(false);
        p
    }

    fn hints(&self, one: bool) -> Vec<u32> {
        let total = if one { self.ones } else { self.len - self.ones };
        let nsb = self.sb.len() - 1;
        let mut out = Vec::with_capacity(total / SELECT_SAMPLE + 2);
        let mut s = 0;
        let mut target = 1;
        while target <= total {
            while s + 1 < nsb && self.before_sb(s + 1, one) < target {
                s += 1;
            }
            out.push(s as u32);
            target += SELECT_SAMPLE;
        }
        out.push((nsb - 1) as u32);
        out
    }

    #[inline]
    fn before_sb(&self, s: usize, one: bool) -> usize {
        let o = self.sb[s] as usize;
        if one {
            o
        } else {
            (s * self.sb_words * 64).min(self.len) - o
        }
    }

    #[inline]
    fn get(&self, p: usize) -> bool {
        (self.words[p / 64] >> (p % 64)) & 1 == 1
    }

    /// ones in positions [0, p)
    #[inline]
    fn rank(&self, p: usize) -> usize {
        let w = p / 64;
        if w >= self.words.len() {
            return self.ones;
        }
        let masked = self.words[w] & ((1u64 << (p % 64)) - 1);
        self.sb[w / self.sb_words] as usize + self.rel[w] as usize + masked.count_ones() as usize
    }

    /// 0-based position of the j-th one (or zero), j ≥ 1
    fn select(&self, j: usize, one: bool) -> Option<usize> {
        let total = if one { self.ones } else { self.len - self.ones };
        if j == 0 || j > total {
            return None;
        }
        let hints = if one { &self.hint1 } else { &self.hint0 };
        let t = (j - 1) / SELECT_SAMPLE;
        let mut lo = hints[t] as usize;
        let mut hi = hints[(t + 1).min(hints.len() - 1)] as usize;
        // last superblock s in [lo, hi] with before_sb(s) < j
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.before_sb(mid, one) < j {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let s = lo;
        let mut r = j - self.before_sb(s, one);
        let first = s * self.sb_words;
        let last = (first + self.sb_words).min(self.words.len());
        let mut w = first;
        while w + 1 < last {
            let before = if one {
                self.rel[w + 1] as usize
            } else {
                (w + 1 - first) * 64 - self.rel[w + 1] as usize
            };
            if before >= r {
                break;
            }
            w += 1;
        }
        let before = if one { self.rel[w] as usize } else { (w - first) * 64 - self.rel[w] as usize };
        r -= before;
        let word = if one { self.words[w] } else { !self.words[w] };
        Some(w * 64 + select_in_word(word, (r - 1) as u32) as usize)
    }

    fn index_bits(&self) -> usize {
        self.sb.len() * 64 + self.rel.len() * 16 + (self.hint1.len() + self.hint0.len()) * 32
    }
}

#[derive(Clone, Debug)]
struct Sparse {
    len: usize,
    ones: usize,
    low_width: u32,
    lows: Vec<u64>,
    high: Plain,
}

fn low_width(len: usize, ones: usize) -> u32 {
    if ones == 0 || len <= ones {
        0
    } else {
        (len / ones).ilog2()
    }
}

impl Sparse {
    /// `positions` strictly increasing, 0-based.
    fn new(len: usize, positions: &[usize]) -> Sparse {
        let ones = positions.len();
        let l = low_width(len, ones);
        let high_len = ones + (len >> l) + 1;
        let mut high = vec![0u64; high_len.div_ceil(64)];
        let mut lows = vec![0u64; (ones * l as usize).div_ceil(64)];
        for (i, &p) in positions.iter().enumerate() {
            let h = (p >> l) + i;
            high[h / 64] |= 1 << (h % 64);
            if l > 0 {
                put_packed(&mut lows, i * l as usize, l, (p & ((1 << l) - 1)) as u64);
            }
        }
        Sparse { len, ones, low_width: l, lows, high: Plain::new(high, high_len) }
    }

    #[inline]
    fn low(&self, i: usize) -> usize {
        if self.low_width == 0 {
            0
        } else {
            get_packed(&self.lows, i * self.low_width as usize, self.low_width) as usize
        }
    }

    /// 0-based position of the j-th one
    #[inline]
    fn select(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.ones {
            return None;
        }
        let h = self.high.select(j, true)? - (j - 1);
        Some((h << self.low_width) | self.low(j - 1))
    }

    /// bit at 0-based `p`: scan the one bucket that could hold it
    fn get(&self, p: usize) -> bool {
        if self.ones == 0 || p >= self.len {
            return false;
        }
        let h = p >> self.low_width;
        let (mut cnt, mut pos) = if h == 0 {
            (0, 0)
        } else {
            let z = self.high.select(h, false).expect("bucket terminator");
            (z + 1 - h, z + 1)
        };
        let lo = p & ((1 << self.low_width) - 1);
        while pos < self.high.len && self.high.get(pos) {
            let v = self.low(cnt);
            if v >= lo {
                return v == lo;
            }
            cnt += 1;
            pos += 1;
        }
        false
    }

    /// ones in [0, p)
    fn rank(&self, p: usize) -> usize {
        if self.ones == 0 || p == 0 {
            return 0;
        }
        if p >= self.len {
            return self.ones;
        }
        let h = p >> self.low_width;
        let (mut cnt, mut pos) = if h == 0 {
            (0, 0)
        } else {
            let z = self.high.select(h, false).expect("bucket terminator");
            (z + 1 - h, z + 1)
        };
        while pos < self.high.len && self.high.get(pos) {
            let v = (h << self.low_width) | self.low(cnt);
            if v >= p {
                break;
            }
            cnt += 1;
            pos += 1;
        }
        cnt
    }

    fn payload_bits(&self) -> usize {
        64 + self.ones * self.low_width as usize + self.high.len
    }
}

fn put_packed(buf: &mut [u64], at: usize, width: u32, v: u64) {
    let (w, o) = (at / 64, at % 64);
    buf[w] |= v << o;
    if o + width as usize > 64 {
        buf[w + 1] |= v >> (64 - o);
    }
}

fn get_packed(buf: &[u64], at: usize, width: u32) -> u64 {
    let (w, o) = (at / 64, at % 64);
    let mut v = buf[w] >> o;
    if o + width as usize > 64 {
        v |= buf[w + 1] << (64 - o);
    }
    v & ((1u64 << width) - 1)
}

impl BitVector {
    pub fn from_bits(bits: &[bool], mode: Mode) -> BitVector {
        match mode {
            Mode::Plain => {
                let mut words = vec![0u64; bits.len().div_ceil(64)];
                for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
                    words[i / 64] |= 1 << (i % 64);
                }
                BitVector { repr: Repr::Plain(Plain::new(words, bits.len())) }
            }
            Mode::Sparse => {
                let pos: Vec<usize> = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
                BitVector { repr: Repr::Sparse(Sparse::new(bits.len(), &pos)) }
            }
        }
    }

    /// Build from the 1-based positions of the ones (strictly increasing).
    pub fn from_ones(len: usize, ones: &[usize], mode: Mode) -> BitVector {
        debug_assert!(ones.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(ones.iter().all(|&p| p >= 1 && p <= len));
        match mode {
            Mode::Plain => {
                let mut words = vec![0u64; len.div_ceil(64)];
                for &p in ones {
                    words[(p - 1) / 64] |= 1 << ((p - 1) % 64);
                }
                BitVector { repr: Repr::Plain(Plain::new(words, len)) }
            }
            Mode::Sparse => {
                let pos: Vec<usize> = ones.iter().map(|p| p - 1).collect();
                BitVector { repr: Repr::Sparse(Sparse::new(len, &pos)) }
            }
        }
    }

    /// Parse a `0`/`1` string (anything else is ignored).
    pub fn from_str_bits(s: &str, mode: Mode) -> BitVector {
        let bits: Vec<bool> = s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect();
        Self::from_bits(&bits, mode)
    }

    pub fn mode(&self) -> Mode {
        match self.repr {
            Repr::Plain(_) => Mode::Plain,
            Repr::Sparse(_) => Mode::Sparse,
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Plain(p) => p.len,
            Repr::Sparse(s) => s.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count_ones(&self) -> usize {
        match &self.repr {
            Repr::Plain(p) => p.ones,
            Repr::Sparse(s) => s.ones,
        }
    }

    /// Bit at 1-based position `i`. Panics if out of range.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len(), "bit {i} out of range");
        match &self.repr {
            Repr::Plain(p) => p.get(i - 1),
            Repr::Sparse(s) => s.get(i - 1),
        }
    }

    /// Ones among positions `1..=i`. Panics if `i > len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len(), "rank index {i} out of range");
        match &self.repr {
            Repr::Plain(p) => p.rank(i),
            Repr::Sparse(s) => s.rank(i),
        }
    }

    pub fn checked_rank1(&self, i: usize) -> Result<usize, BitsError> {
        if i > self.len() {
            return Err(BitsError::IndexOutOfRange { index: i, len: self.len() });
        }
        Ok(self.rank1(i))
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    #[inline]
    pub fn select1(&self, j: usize) -> Option<usize> {
        match &self.repr {
            Repr::Plain(p) => p.select(j, true),
            Repr::Sparse(s) => s.select(j),
        }
        .map(|p| p + 1)
    }

    pub fn select0(&self, j: usize) -> Option<usize> {
        match &self.repr {
            Repr::Plain(p) => p.select(j, false).map(|p| p + 1),
            Repr::Sparse(s) => {
                let zeros = s.len - s.ones;
                if j == 0 || j > zeros {
                    return None;
                }
                // smallest i with rank0(i) = j
                let (mut lo, mut hi) = (1, s.len);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if mid - s.rank(mid) >= j {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                Some(lo)
            }
        }
    }

    /// Bits of the stored (serialized) representation.
    pub fn payload_bits(&self) -> usize {
        match &self.repr {
            Repr::Plain(p) => p.len,
            Repr::Sparse(s) => s.payload_bits(),
        }
    }

    /// Bits of the rank/select acceleration data rebuilt on load.
    pub fn index_bits(&self) -> usize {
        match &self.repr {
            Repr::Plain(p) => p.index_bits(),
            Repr::Sparse(s) => s.high.index_bits(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len()).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        match &self.repr {
            Repr::Plain(p) => (0..p.len).map(|i| p.get(i)).collect(),
            Repr::Sparse(s) => {
                let mut v = vec![false; s.len];
                for j in 1..=s.ones {
                    v[s.select(j).unwrap()] = true;
                }
                v
            }
        }
    }

    /// Mode byte, 8-byte LE length, then the payload bits MSB-first.
    pub fn write(&self, w: &mut BitWriter) {
        w.push_bits(matches!(self.repr, Repr::Sparse(_)) as u64, 8);
        w.push_u64_le(self.len() as u64);
        match &self.repr {
            Repr::Plain(p) => {
                for i in 0..p.len {
                    w.push(p.get(i));
                }
            }
            Repr::Sparse(s) => {
                w.push_u64_le(s.ones as u64);
                for i in 0..s.ones {
                    w.push_bits(s.low(i) as u64, s.low_width);
                }
                for i in 0..s.high.len {
                    w.push(s.high.get(i));
                }
            }
        }
    }

    pub fn read(r: &mut BitReader) -> Result<BitVector, CodecError> {
        let bad = |why: &str| CodecError::Malformed { tag: 0, why: why.into() };
        let mode = r.bits(8)?;
        let len = r.u64_le()? as usize;
        match mode {
            0 => {
                if (r.remaining() as usize) < len {
                    return Err(CodecError::Truncated);
                }
                let mut words = vec![0u64; len.div_ceil(64)];
                for i in 0..len {
                    if r.bit()? {
                        words[i / 64] |= 1 << (i % 64);
                    }
                }
                Ok(BitVector { repr: Repr::Plain(Plain::new(words, len)) })
            }
            1 => {
                let ones = r.u64_le()? as usize;
                if ones > len {
                    return Err(bad("more ones than bits"));
                }
                let l = low_width(len, ones);
                let mut lows = Vec::with_capacity(ones);
                for _ in 0..ones {
                    lows.push(r.bits(l)? as usize);
                }
                let high_len = ones + (len >> l) + 1;
                let mut pos = Vec::with_capacity(ones);
                let mut bucket = 0usize;
                for _ in 0..high_len {
                    if r.bit()? {
                        let i = pos.len();
                        if i >= ones {
                            return Err(bad("too many high ones"));
                        }
                        pos.push((bucket << l) | lows[i]);
                    } else {
                        bucket += 1;
                    }
                }
                if pos.len() != ones || pos.windows(2).any(|w| w[0] >= w[1]) || pos.last().is_some_and(|&p| p >= len) {
                    return Err(bad("inconsistent Elias-Fano payload"));
                }
                Ok(BitVector { repr: Repr::Sparse(Sparse::new(len, &pos)) })
            }
            m => Err(bad(&format!("unknown bitvector mode {m}"))),
        }
    }

    pub fn to_section(&self, tag: u8) -> Section {
        let mut w = BitWriter::new();
        self.write(&mut w);
        w.into_section(tag)
    }

    pub fn from_section(s: &Section) -> Result<BitVector, CodecError> {
        let mut r = BitReader::new(s);
        BitVector::read(&mut r).map_err(|e| match e {
            CodecError::Malformed { why, .. } => CodecError::Malformed { tag: s.tag, why },
            e => e,
        })
    }
}
