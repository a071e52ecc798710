//! Bit-packed linear algebra over GF(2).
//!
//! Elimination always pivots on the first nonzero column and, within it, the
//! first nonzero row, so echelon forms are reproducible bit-for-bit.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

const W: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum F2Error {
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for F2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F2Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected length {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for F2Error {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        BitVec { len, words }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / W] >> (i % W) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % W);
        if value {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        xor_into(&mut self.words, &other.words);
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        parity_and(&self.words, &other.words)
    }

    pub fn first_one(&self) -> Option<usize> {
        first_one(&self.words)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> Ones<'_> {
        Ones { words: &self.words, idx: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Lexicographic comparison of supports (as sorted index lists).
    pub fn cmp_support(&self, other: &BitVec) -> core::cmp::Ordering {
        self.ones().cmp(other.ones())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * W + b);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn parity_and(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

#[inline]
pub(crate) fn first_one(words: &[u64]) -> Option<usize> {
    words.iter().position(|&w| w != 0).map(|i| i * W + words[i].trailing_zeros() as usize)
}

#[inline]
pub(crate) fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Row-major packed matrix; each row occupies `stride` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Result<Self, F2Error> {
        let mut m = Self::zeros(0, cols);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// Each inner list holds the column indices of the ones in that row;
    /// repeated indices cancel.
    pub fn from_sparse_rows(cols: usize, rows: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, idx) in rows.iter().enumerate() {
            for &c in idx {
                m.flip(r, c);
            }
        }
        m
    }

    pub fn from_dense(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &b) in row.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_ones(&self, r: usize) -> Ones<'_> {
        let w = self.row_words(r);
        Ones { words: w, idx: 0, cur: w.first().copied().unwrap_or(0) }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        popcount(self.row_words(r))
    }

    pub fn sparse_rows(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| self.row_ones(r).collect()).collect()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / W] >> (c % W) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let m = 1u64 << (c % W);
        let w = &mut self.data[r * self.stride + c / W];
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / W] ^= 1u64 << (c % W);
    }

    pub fn push_row(&mut self, v: &BitVec) -> Result<(), F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        self.data.extend_from_slice(v.words());
        self.rows += 1;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · otherᵀ`: entry (i, j) is the parity of row i of `self` against row j of `other`.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.cols != other.cols {
            return Err(F2Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut out = BitMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row_words(i);
            for j in 0..other.rows {
                if parity_and(a, other.row_words(j)) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// `self · vᵀ`, one bit per row.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if parity_and(self.row_words(r), v.words()) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, k, true);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(0, self.cols);
        for &r in rows {
            out.data.extend_from_slice(self.row_words(r));
            out.rows += 1;
        }
        out
    }

    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.cols != other.cols {
            return Err(F2Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    /// `row[dst] ^= row[src]`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            xor_into(&mut tail[..s], &head[src * s..(src + 1) * s]);
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            xor_into(&mut head[dst * s..(dst + 1) * s], &tail[..s]);
        }
    }

    fn row_has(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / W] >> (c % W) & 1 == 1
    }

    /// In-place reduced row echelon form; returns pivot columns in order.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.row_has(r, c)) else { continue };
            self.swap_rows(rank, p);
            for r in 0..self.rows {
                if r != rank && self.row_has(r, c) {
                    self.add_row(rank, r);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        m.rows = pivots.len();
        m.data.truncate(pivots.len() * m.stride);
        Echelon { basis: m, pivots }
    }

    pub fn rank(&self) -> usize {
        // Forward elimination only.
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| m.row_has(r, c)) else { continue };
            m.swap_rows(rank, p);
            for r in rank + 1..m.rows {
                if m.row_has(r, c) {
                    m.add_row(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of `{v : self · vᵀ = 0}`, one vector per free column.
    pub fn nullspace(&self) -> BitMatrix {
        let e = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let mut out = BitMatrix::zeros(0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (r, &p) in e.pivots.iter().enumerate() {
                if e.basis.row_has(r, free) {
                    v.set(p, true);
                }
            }
            out.push_row(&v).expect("width matches");
        }
        out
    }

    pub fn in_row_space(&self, v: &BitVec) -> Result<bool, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let e = self.rref();
        Ok(e.reduce(v).is_zero())
    }

    /// Keep only columns where `keep` is true, in order.
    pub fn retain_columns(&self, keep: &[bool]) -> BitMatrix {
        let cols: Vec<usize> = (0..self.cols).filter(|&c| keep[c]).collect();
        self.select_columns(&cols)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reduced row echelon basis with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub basis: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut w = v.clone();
        for (r, &p) in self.pivots.iter().enumerate() {
            if w.get(p) {
                xor_into(&mut w.words, self.basis.row_words(r));
            }
        }
        w
    }
}

/// Incrementally grown span, for repeated membership tests.
///
/// Each stored vector has a pivot bit that is clear in every vector stored
/// after it, so a single pass in insertion order fully reduces.
#[derive(Clone, Debug)]
pub struct RowBasis {
    len: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl RowBasis {
    pub fn new(len: usize) -> Self {
        RowBasis { len, rows: Vec::new() }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut b = Self::new(m.cols());
        for r in 0..m.rows() {
            b.insert_words(m.row_words(r));
        }
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_words(&self, w: &mut [u64]) {
        for (p, row) in &self.rows {
            if w[p / W] >> (p % W) & 1 == 1 {
                xor_into(w, row);
            }
        }
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.len);
        let mut w = v.words.clone();
        self.reduce_words(&mut w);
        BitVec::from_words(self.len, w)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Returns true when `v` was independent of the current span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len);
        self.insert_words(v.words())
    }

    fn insert_words(&mut self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce_words(&mut w);
        match first_one(&w) {
            Some(p) => {
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}

/// Inverse of a square matrix, if it exists.
pub fn invert(m: &BitMatrix) -> Option<BitMatrix> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let mut aug = BitMatrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in m.row_ones(r) {
            aug.set(r, c, true);
        }
        aug.set(r, n + r, true);
    }
    let pivots = aug.rref_in_place();
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let right: Vec<usize> = (n..2 * n).collect();
    Some(aug.select_columns(&right))
}
