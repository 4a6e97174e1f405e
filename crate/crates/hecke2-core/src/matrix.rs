//! Dense GF(2) linear algebra on bit-packed storage.

use alloc::vec::Vec;

use crate::bits;

/// Dense GF(2) matrix, row-major bit storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let row_words = bits::words_for(cols).max(1);
        BitMatrix {
            rows,
            cols,
            row_words,
            data: alloc::vec![0u64; rows * row_words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from row bit-vectors.
    pub fn from_rows(rows: &[Vec<u64>], cols: usize) -> Self {
        let mut m = Self::zero(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let dst = m.row_mut(i);
            for (w, &s) in dst.iter_mut().zip(r) {
                *w = s;
            }
            bits::trim(m.row_mut(i), cols);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.row_words..(i + 1) * self.row_words]
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.row_words..(i + 1) * self.row_words]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        bits::get(self.row(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            bits::set(self.row_mut(i), j);
        } else {
            bits::clear(self.row_mut(i), j);
        }
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * self.row_words);
            (
                &mut lo[dst * self.row_words..(dst + 1) * self.row_words],
                &hi[..self.row_words],
            )
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * self.row_words);
            (
                &mut hi[..self.row_words],
                &lo[src * self.row_words..(src + 1) * self.row_words],
            )
        };
        for (d, &s) in a.iter_mut().zip(b) {
            *d ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.row_words {
            self.data.swap(a * self.row_words + k, b * self.row_words + k);
        }
    }

    /// Matrix-vector product m * x (x over columns, result over rows).
    pub fn mat_vec(&self, x: &[u64]) -> Vec<u64> {
        let mut out = bits::zero_vec(self.rows.max(1));
        for i in 0..self.rows {
            let mut acc = 0u64;
            for (w, &xw) in self.row(i).iter().zip(x) {
                acc ^= w & xw;
            }
            if acc.count_ones() % 2 == 1 {
                bits::set(&mut out, i);
            }
        }
        out
    }

    /// Reduced row echelon form with pivot map and transform.
    /// Deterministic: pivots chosen lowest column first, then lowest row.
    pub fn echelonize(&self) -> Echelon {
        let mut r = self.clone();
        let mut t = BitMatrix::identity(self.rows);
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..self.cols {
            let Some(pr) = (rank..self.rows).find(|&i| r.get(i, col)) else {
                continue;
            };
            r.swap_rows(rank, pr);
            t.swap_rows(rank, pr);
            for i in 0..self.rows {
                if i != rank && r.get(i, col) {
                    r.xor_rows(i, rank);
                    t.xor_rows(i, rank);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        Echelon {
            rref: r,
            transform: t,
            pivots,
        }
    }

    /// Some x with m*x = rhs (free variables zero), or None.
    pub fn solve(&self, rhs: &[u64]) -> Option<Vec<u64>> {
        solve_columns(
            &(0..self.cols).map(|j| self.column(j)).collect::<Vec<_>>(),
            self.rows,
            rhs,
        )
    }

    /// Basis of {x : m*x = 0}; size = cols - rank.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        kernel_columns(
            &(0..self.cols).map(|j| self.column(j)).collect::<Vec<_>>(),
            self.rows,
        )
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        let mut c = bits::zero_vec(self.rows.max(1));
        for i in 0..self.rows {
            if self.get(i, j) {
                bits::set(&mut c, i);
            }
        }
        c
    }
}

#[derive(Debug, Clone)]
pub struct Echelon {
    pub rref: BitMatrix,
    /// Row operations applied: transform * original = rref.
    pub transform: BitMatrix,
    /// Pivot column per pivot row.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Forward-eliminated column basis used by `solve_columns`/`kernel_columns`:
/// each entry is (pivot row, body bits || selection tag bits).
fn forward(cols: &[Vec<u64>], nrows: usize) -> (Vec<(usize, Vec<u64>)>, Vec<Vec<u64>>) {
    let total = nrows + cols.len();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut kernel = Vec::new();
    for (i, c) in cols.iter().enumerate() {
        let mut v = bits::zero_vec(total.max(1));
        for (w, &s) in v.iter_mut().zip(c) {
            *w = s;
        }
        bits::trim(&mut v, nrows);
        bits::set(&mut v, nrows + i);
        for (piv, bv) in &basis {
            if bits::get(&v, *piv) {
                bits::xor_assign(&mut v, bv);
            }
        }
        let mut body = v.clone();
        bits::trim(&mut body, nrows);
        match bits::lowest_set(&body) {
            None => {
                let mut tag = bits::zero_vec(cols.len().max(1));
                for b in bits::iter_ones(&v).filter(|&b| b >= nrows) {
                    bits::set(&mut tag, b - nrows);
                }
                kernel.push(tag);
            }
            Some(piv) => basis.push((piv, v)),
        }
    }
    (basis, kernel)
}

/// Solve sum_i x_i * cols[i] = rhs over GF(2); deterministic (free vars 0).
pub fn solve_columns(cols: &[Vec<u64>], nrows: usize, rhs: &[u64]) -> Option<Vec<u64>> {
    let (basis, _) = forward(cols, nrows);
    let mut r = bits::zero_vec(nrows.max(1));
    for (w, &s) in r.iter_mut().zip(rhs) {
        *w = s;
    }
    bits::trim(&mut r, nrows);
    let mut sel = bits::zero_vec(cols.len().max(1));
    for (piv, bv) in &basis {
        if bits::get(&r, *piv) {
            let mut body = bv.clone();
            bits::trim(&mut body, nrows);
            bits::xor_assign(&mut r, &body);
            for b in bits::iter_ones(bv).filter(|&b| b >= nrows) {
                let idx = b - nrows;
                if bits::get(&sel, idx) {
                    bits::clear(&mut sel, idx);
                } else {
                    bits::set(&mut sel, idx);
                }
            }
        }
    }
    if bits::is_zero(&r) {
        Some(sel)
    } else {
        None
    }
}

/// Kernel basis of the column map, as selection bit-vectors over columns.
pub fn kernel_columns(cols: &[Vec<u64>], nrows: usize) -> Vec<Vec<u64>> {
    forward(cols, nrows).1
}

/// Reduced echelon basis of the span of the given vectors (deterministic,
/// pivots ascending, each pivot unique to its vector).
pub fn echelon_span(vecs: &[Vec<u64>], nbits: usize) -> Vec<Vec<u64>> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for vsrc in vecs {
        let mut v = bits::zero_vec(nbits.max(1));
        for (w, &s) in v.iter_mut().zip(vsrc) {
            *w = s;
        }
        bits::trim(&mut v, nbits);
        for (piv, bv) in &basis {
            if bits::get(&v, *piv) {
                bits::xor_assign(&mut v, bv);
            }
        }
        if let Some(piv) = bits::lowest_set(&v) {
            for (_, bv) in basis.iter_mut() {
                if bits::get(bv, piv) {
                    bits::xor_assign(bv, &v);
                }
            }
            basis.push((piv, v));
            basis.sort_by_key(|(p, _)| *p);
        }
    }
    basis.into_iter().map(|(_, v)| v).collect()
}

/// Reduce v against an echelonized basis; result is the canonical coset
/// representative (zero iff v is in the span).
pub fn reduce_mod(v: &mut [u64], basis: &[Vec<u64>]) {
    for b in basis {
        if let Some(piv) = bits::lowest_set(b) {
            if bits::get(v, piv) {
                bits::xor_assign(v, b);
            }
        }
    }
}

/// Membership in the span of an echelonized basis.
pub fn in_span(v: &[u64], basis: &[Vec<u64>]) -> bool {
    let mut w = v.to_vec();
    reduce_mod(&mut w, basis);
    bits::is_zero(&w)
}
