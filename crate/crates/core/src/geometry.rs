//! Binary occupancy matrices over an `n × n` static trap lattice.
//!
//! Rows are bit-packed: column `j` of row `i` lives in bit `j % 64` of word
//! `i * words_per_row + j / 64`. Indices are 0-based internally; the JSON
//! formats in [`crate::format`] and all `Display` output use 1-based indices.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("lattice side must be positive")]
    ZeroSide,
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} contains {ch:?}; only '0' and '1' are allowed")]
    BadCell { row: usize, ch: char },
    #[error("row {row} contains value {value}; only 0 and 1 are allowed")]
    BadValue { row: usize, value: u8 },
    #[error("geometries have different sides ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
}

/// A lattice site, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub row: usize,
    pub col: usize,
}

impl Site {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row + 1, self.col + 1)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Geometry {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Geometry {
    pub fn empty(n: usize) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::ZeroSide);
        }
        let words = n.div_ceil(64);
        Ok(Self {
            n,
            words,
            bits: vec![0; words * n],
        })
    }

    pub fn full(n: usize) -> Result<Self, GeometryError> {
        Self::from_fn(n, |_, _| true)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self, GeometryError> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    g.set(i, j, true);
                }
            }
        }
        Ok(g)
    }

    /// Builds a geometry from a square 0/1 matrix.
    pub fn from_matrix<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, GeometryError> {
        let n = rows.len();
        let mut g = Self::empty(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(GeometryError::RowLength {
                    row: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => g.set(i, j, true),
                    value => return Err(GeometryError::BadValue { row: i + 1, value }),
                }
            }
        }
        Ok(g)
    }

    /// Parses rows written as strings of `'0'`/`'1'`.
    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, GeometryError> {
        let n = rows.len();
        let mut g = Self::empty(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let len = row.chars().count();
            if len != n {
                return Err(GeometryError::RowLength {
                    row: i + 1,
                    expected: n,
                    found: len,
                });
            }
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => g.set(i, j, true),
                    ch => return Err(GeometryError::BadCell { row: i + 1, ch }),
                }
            }
        }
        Ok(g)
    }

    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, occupied: bool) {
        debug_assert!(i < self.n && j < self.n);
        let w = &mut self.bits[i * self.words + j / 64];
        if occupied {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn atom_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `rᵢ`, the number of atoms in each row.
    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.row_count(i)).collect()
    }

    /// `cⱼ`, the number of atoms in each column.
    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.n];
        for i in 0..self.n {
            for (w, &word) in self.row(i).iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    sums[w * 64 + rest.trailing_zeros() as usize] += 1;
                    rest &= rest - 1;
                }
            }
        }
        sums
    }

    /// Occupied sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.n).flat_map(move |i| {
            self.row(i).iter().enumerate().flat_map(move |(w, &word)| {
                BitIter(word).map(move |b| Site::new(i, w * 64 + b))
            })
        })
    }

    /// Rotates the matrix 90° counter-clockwise: site `(i, j)` moves to
    /// `(n-1-j, i)`. Under this rotation a left shift in the rotated frame is
    /// an up shift in the original frame.
    pub fn rotate90(&self) -> Geometry {
        let n = self.n;
        let mut out = Geometry::empty(n).expect("n > 0");
        for s in self.sites() {
            out.set(n - 1 - s.col, s.row, true);
        }
        out
    }

    /// Inverse of [`Geometry::rotate90`].
    pub fn rotate270(&self) -> Geometry {
        let n = self.n;
        let mut out = Geometry::empty(n).expect("n > 0");
        for s in self.sites() {
            out.set(s.col, n - 1 - s.row, true);
        }
        out
    }

    /// First site where `self` and `other` differ, row-major.
    pub fn first_difference(&self, other: &Geometry) -> Option<Site> {
        if self.n != other.n {
            return Some(Site::new(0, 0));
        }
        for i in 0..self.n {
            for (w, (a, b)) in self.row(i).iter().zip(other.row(i)).enumerate() {
                if a != b {
                    return Some(Site::new(i, w * 64 + (a ^ b).trailing_zeros() as usize));
                }
            }
        }
        None
    }

    /// Left-aligned property restricted to columns `x..n` (0-based): in every
    /// row, occupied columns at or after `x` form a prefix `x..x+k`.
    pub fn is_partially_left_aligned(&self, x: usize) -> bool {
        let mut mask = vec![0u64; self.words];
        (0..self.n).all(|i| {
            let row = self.row(i);
            let k: usize = row
                .iter()
                .enumerate()
                .map(|(w, &word)| (word & range_word(w, x, self.n)).count_ones() as usize)
                .sum();
            fill_range(&mut mask, x, x + k);
            row.iter()
                .enumerate()
                .all(|(w, &word)| word & range_word(w, x, self.n) == mask[w])
        })
    }

    pub fn is_left_aligned(&self) -> bool {
        self.is_partially_left_aligned(0)
    }

    /// Whether columns `0..x` of every row agree with `other`.
    pub fn prefix_columns_match(&self, other: &Geometry, x: usize) -> bool {
        (0..self.n).all(|i| {
            self.row(i)
                .iter()
                .zip(other.row(i))
                .enumerate()
                .all(|(w, (a, b))| (a ^ b) & range_word(w, 0, x) == 0)
        })
    }

    #[inline]
    pub(crate) fn words_per_row(&self) -> usize {
        self.words
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words..(i + 1) * self.words]
    }
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Geometry(n={})", self.n)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_row_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Iterates set bit positions of a word, lowest first.
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Bits of word `w` that fall in the column range `lo..hi`.
#[inline]
pub(crate) fn range_word(w: usize, lo: usize, hi: usize) -> u64 {
    let start = w * 64;
    let end = start + 64;
    if hi <= start || lo >= end || lo >= hi {
        return 0;
    }
    let a = lo.max(start) - start;
    let b = hi.min(end) - start;
    let upper = if b == 64 { u64::MAX } else { (1u64 << b) - 1 };
    upper & !((1u64 << a) - 1)
}

pub(crate) fn fill_range(buf: &mut [u64], lo: usize, hi: usize) {
    for (w, word) in buf.iter_mut().enumerate() {
        *word = range_word(w, lo, hi);
    }
}
