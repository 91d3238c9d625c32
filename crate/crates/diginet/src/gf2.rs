//! Bit-packed linear algebra over GF(2).
//!
//! A [`BitVector`] stores up to 63 bits in one word; bit `i` of the word is
//! entry `i` of the vector. A [`BitMatrix`] stores one such word per row, so
//! entry `(i, k)` is bit `k` of `rows[i]`.
//!
//! Two digit orderings appear in net constructions. The digit vector of an
//! integer `r = r_0 + 2 r_1 + ...` keeps `r_0` at index 0
//! ([`BitVector::from_integer_digits`]). A digit tuple `(y_1, ..., y_n)` that
//! is read as the binary fraction `y_1/2 + ... + y_n/2^n` keeps `y_1` at
//! index 0 ([`BitVector::from_fraction_numerator`]). Converting between the
//! two is always done through these named functions.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BitVector {
    len: usize,
    bits: u64,
}

fn mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::Dimension(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    Ok(())
}

impl BitVector {
    pub fn zeros(len: usize) -> Result<Self> {
        check_dim(len)?;
        Ok(BitVector { len, bits: 0 })
    }

    /// Builds a vector from the low `len` bits of `word`; higher bits must be zero.
    pub fn from_word(len: usize, word: u64) -> Result<Self> {
        check_dim(len)?;
        if word & !mask(len) != 0 {
            return Err(Error::Dimension(format!(
                "word {word:#x} has bits beyond length {len}"
            )));
        }
        Ok(BitVector { len, bits: word })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_dim(bits.len())?;
        let mut word = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => word |= 1 << i,
                _ => return Err(Error::Parse(format!("bit value {b} is not 0 or 1"))),
            }
        }
        Ok(BitVector { len: bits.len(), bits: word })
    }

    /// Digit vector `(r_0, ..., r_{n-1})` of `r = r_0 + 2 r_1 + ... + 2^{n-1} r_{n-1}`.
    pub fn from_integer_digits(r: u64, n: usize) -> Result<Self> {
        Self::from_word(n, r)
    }

    /// The integer `r_0 + 2 r_1 + ...` whose digit vector this is.
    pub fn to_integer_digits(&self) -> u64 {
        self.bits
    }

    /// Digit tuple `(y_1, ..., y_n)` of the fraction `num / 2^n = y_1/2 + ... + y_n/2^n`.
    pub fn from_fraction_numerator(num: u64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if num >> n != 0 {
            return Err(Error::Dimension(format!("{num} is not below 2^{n}")));
        }
        Ok(BitVector { len: n, bits: reverse_low(num, n) })
    }

    /// Radix collapse: the numerator of `y_1/2 + ... + y_n/2^n` over `2^n`.
    pub fn to_fraction_numerator(&self) -> u64 {
        reverse_low(self.bits, self.len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        ((self.bits >> i) & 1) as u8
    }

    pub fn set(&mut self, i: usize, value: u8) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.bits = (self.bits & !(1 << i)) | (u64::from(value & 1) << i);
    }

    pub fn word(&self) -> u64 {
        self.bits
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::Dimension(format!(
                "xor of lengths {} and {}",
                self.len, other.len
            )));
        }
        Ok(BitVector { len: self.len, bits: self.bits ^ other.bits })
    }

    /// Same bits in reverse order.
    pub fn reversed(&self) -> BitVector {
        BitVector { len: self.len, bits: reverse_low(self.bits, self.len) }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

fn reverse_low(word: u64, len: usize) -> u64 {
    if len == 0 {
        0
    } else {
        word.reverse_bits() >> (64 - len)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix dimension must be positive".into()));
        }
        check_dim(n)?;
        Ok(BitMatrix { n, rows: vec![0; n] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        Ok(m)
    }

    /// Ones on the anti-diagonal: entry `(i, n-1-i)`.
    pub fn anti_identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.rows[i] = 1 << (n - 1 - i);
        }
        Ok(m)
    }

    /// Builds a matrix from row words; bit `k` of `rows[i]` is entry `(i, k)`.
    pub fn from_row_words(rows: Vec<u64>) -> Result<Self> {
        let n = rows.len();
        let m = Self::zeros(n)?;
        if rows.iter().any(|r| r & !mask(n) != 0) {
            return Err(Error::Dimension(format!("row has bits beyond column {n}")));
        }
        Ok(BitMatrix { rows, ..m })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut words = Vec::with_capacity(n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row of length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
            words.push(BitVector::from_bits(row)?.word());
        }
        Self::from_row_words(words)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> u8 {
        assert!(i < self.n && k < self.n, "entry ({i},{k}) out of range");
        ((self.rows[i] >> k) & 1) as u8
    }

    pub fn set(&mut self, i: usize, k: usize, value: u8) {
        assert!(i < self.n && k < self.n, "entry ({i},{k}) out of range");
        self.rows[i] = (self.rows[i] & !(1 << k)) | (u64::from(value & 1) << k);
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector { len: self.n, bits: self.rows[i] }
    }

    pub fn row_words(&self) -> &[u64] {
        &self.rows
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        mat_vec_mul(self, v)
    }

    /// Parses `n` lines of `n` characters `0`/`1`. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            rows.push(parse_bits(line)?);
        }
        Self::from_rows(&rows)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
        })
        .collect()
}

/// Result bit `i` is the XOR over `k` of `M(i,k) v(k)`.
pub fn mat_vec_mul(m: &BitMatrix, v: &BitVector) -> Result<BitVector> {
    if m.n != v.len {
        return Err(Error::Dimension(format!(
            "{}x{} matrix times vector of length {}",
            m.n, m.n, v.len
        )));
    }
    let mut out = 0u64;
    for (i, row) in m.rows.iter().enumerate() {
        out |= u64::from((row & v.bits).count_ones() & 1) << i;
    }
    Ok(BitVector { len: m.n, bits: out })
}

/// GF(2) rank of the given rows by Gaussian elimination.
///
/// Returns an error when the rows do not all have the same length; the empty
/// list has rank 0.
pub fn rank_of_stacked_rows(rows: &[BitVector]) -> Result<usize> {
    if let Some(first) = rows.first() {
        if rows.iter().any(|r| r.len != first.len) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
    }
    Ok(rank_of_words(rows.iter().map(|r| r.bits)))
}

/// Rank of row words, each already reduced to a common width.
pub(crate) fn rank_of_words(rows: impl IntoIterator<Item = u64>) -> usize {
    // basis[b] holds a reduced row whose highest set bit is b
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut w in rows {
        while w != 0 {
            let top = 63 - w.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = w;
                rank += 1;
                break;
            }
            w ^= basis[top];
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BitVector {
        BitVector::from_bits(bits).unwrap()
    }

    #[test]
    fn identity_times_vector() {
        let m = BitMatrix::identity(3).unwrap();
        assert_eq!(mat_vec_mul(&m, &bv(&[1, 0, 1])).unwrap(), bv(&[1, 0, 1]));
    }

    #[test]
    fn anti_identity_reverses() {
        let m = BitMatrix::anti_identity(2).unwrap();
        assert_eq!(mat_vec_mul(&m, &bv(&[1, 0])).unwrap(), bv(&[0, 1]));
    }

    #[test]
    fn upper_triangular_product() {
        let m = BitMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(mat_vec_mul(&m, &bv(&[1, 1])).unwrap(), bv(&[0, 1]));
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let m = BitMatrix::identity(3).unwrap();
        assert!(mat_vec_mul(&m, &bv(&[1, 0])).is_err());
        assert!(rank_of_stacked_rows(&[bv(&[1]), bv(&[1, 0])]).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_of_stacked_rows(&[bv(&[1, 0]), bv(&[0, 1])]).unwrap(), 2);
        assert_eq!(rank_of_stacked_rows(&[bv(&[1, 1]), bv(&[1, 1])]).unwrap(), 1);
        assert_eq!(rank_of_stacked_rows(&[]).unwrap(), 0);
        assert_eq!(rank_of_stacked_rows(&[bv(&[0, 0, 0])]).unwrap(), 0);
    }

    #[test]
    fn digit_orderings() {
        // r = 6 = 0 + 2*1 + 4*1
        let r = BitVector::from_integer_digits(6, 3).unwrap();
        assert_eq!(r.to_bits(), vec![0, 1, 1]);
        // 6/8 = 1/2 + 1/4
        let y = BitVector::from_fraction_numerator(6, 3).unwrap();
        assert_eq!(y.to_bits(), vec![1, 1, 0]);
        assert_eq!(y.to_fraction_numerator(), 6);
        assert_eq!(r.reversed(), y);
        assert!(BitVector::from_fraction_numerator(8, 3).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let m = BitMatrix::parse("110\n011\n001\n").unwrap();
        assert_eq!(m.get(0, 1), 1);
        assert_eq!(m.get(2, 0), 0);
        assert_eq!(BitMatrix::parse(&m.to_string()).unwrap(), m);
        assert!(BitMatrix::parse("10\n1\n").is_err());
        assert!(BitMatrix::parse("1x\n01\n").is_err());
    }

    #[test]
    fn dimension_cap() {
        assert!(BitMatrix::identity(63).is_ok());
        assert!(BitMatrix::identity(64).is_err());
        assert!(BitMatrix::zeros(0).is_err());
    }
}
