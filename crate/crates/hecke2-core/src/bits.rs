//! Helpers for `Vec<u64>`-backed bit vectors (bit i of word w = index 64w+i).

use alloc::vec;
use alloc::vec::Vec;

pub const WORD_BITS: usize = 64;

pub fn words_for(bits: usize) -> usize {
    (bits + WORD_BITS - 1) / WORD_BITS
}

pub fn zero_vec(bits: usize) -> Vec<u64> {
    vec![0u64; words_for(bits)]
}

pub fn get(v: &[u64], i: usize) -> bool {
    let w = i / WORD_BITS;
    w < v.len() && (v[w] >> (i % WORD_BITS)) & 1 == 1
}

pub fn set(v: &mut [u64], i: usize) {
    v[i / WORD_BITS] |= 1 << (i % WORD_BITS);
}

pub fn clear(v: &mut [u64], i: usize) {
    v[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
}

pub fn xor_assign(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

pub fn is_zero(v: &[u64]) -> bool {
    v.iter().all(|&w| w == 0)
}

/// Index of the lowest set bit, if any.
pub fn lowest_set(v: &[u64]) -> Option<usize> {
    for (wi, &w) in v.iter().enumerate() {
        if w != 0 {
            return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
        }
    }
    None
}

pub fn popcount(v: &[u64]) -> usize {
    v.iter().map(|w| w.count_ones() as usize).sum()
}

/// Zero out all bits at positions >= n.
pub fn trim(v: &mut [u64], n: usize) {
    let nw = words_for(n);
    for w in v.iter_mut().skip(nw) {
        *w = 0;
    }
    if n % WORD_BITS != 0 && nw >= 1 && nw <= v.len() {
        v[nw - 1] &= (1u64 << (n % WORD_BITS)) - 1;
    }
}

/// dst ^= src << shift, where shift is in bits. dst must be long enough to
/// hold every nonzero result word it is asked to absorb; excess is dropped.
pub fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / WORD_BITS;
    let bs = shift % WORD_BITS;
    if bs == 0 {
        for (i, &s) in src.iter().enumerate() {
            if let Some(d) = dst.get_mut(i + ws) {
                *d ^= s;
            }
        }
    } else {
        let mut carry = 0u64;
        for (i, &s) in src.iter().enumerate() {
            if let Some(d) = dst.get_mut(i + ws) {
                *d ^= (s << bs) | carry;
            }
            carry = s >> (WORD_BITS - bs);
        }
        if carry != 0 {
            if let Some(d) = dst.get_mut(src.len() + ws) {
                *d ^= carry;
            }
        }
    }
}

/// Iterator over the indices of set bits.
pub fn iter_ones(v: &[u64]) -> impl Iterator<Item = usize> + '_ {
    v.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        core::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + b)
            }
        })
    })
}
