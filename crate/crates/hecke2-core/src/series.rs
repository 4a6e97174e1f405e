//! Truncated power series over GF(2) with explicit precision tracking.

use alloc::vec::Vec;

use crate::bits;
use crate::{Error, Result};

/// Word-count threshold below which multiplication falls back to schoolbook.
/// Tunable; chosen by benchmark on commodity hardware.
pub const KARATSUBA_THRESHOLD_WORDS: usize = 32;

/// A truncated power series over GF(2): bit n = coefficient of x^n,
/// coefficients 0..prec-1 are meaningful. Storage invariant: every bit at
/// position >= prec is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSeries {
    words: Vec<u64>,
    prec: usize,
}

impl BitSeries {
    pub fn zero(prec: usize) -> Self {
        assert!(prec >= 1, "precision must be at least 1");
        BitSeries {
            words: bits::zero_vec(prec),
            prec,
        }
    }

    pub fn one(prec: usize) -> Self {
        let mut s = Self::zero(prec);
        s.words[0] = 1;
        s
    }

    /// Monomial x^n (zero if n >= prec).
    pub fn monomial(n: usize, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if n < prec {
            bits::set(&mut s.words, n);
        }
        s
    }

    /// Build from an iterator of set exponents; out-of-range exponents are
    /// dropped (they are beyond known precision).
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        for e in exps {
            if e < prec {
                bits::set(&mut s.words, e);
            }
        }
        s
    }

    /// The theta series x + x^9 + x^25 + ... (exponents the odd squares).
    pub fn theta_f(prec: usize) -> Self {
        let mut s = Self::zero(prec);
        let mut m = 1usize;
        while m.checked_mul(m).is_some_and(|sq| sq < prec) {
            bits::set(&mut s.words, m * m);
            m += 2;
        }
        s
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn coeff(&self, n: usize) -> bool {
        n < self.prec && bits::get(&self.words, n)
    }

    pub fn is_zero(&self) -> bool {
        bits::is_zero(&self.words)
    }

    pub fn popcount(&self) -> usize {
        bits::popcount(&self.words)
    }

    /// Valuation: index of the lowest nonzero coefficient. `None` means the
    /// series is zero to known precision (valuation >= prec).
    pub fn val(&self) -> Option<usize> {
        bits::lowest_set(&self.words)
    }

    fn val_capped(&self) -> usize {
        self.val().unwrap_or(self.prec).min(self.prec)
    }

    fn from_words(mut words: Vec<u64>, prec: usize) -> Self {
        assert!(prec >= 1);
        words.resize(bits::words_for(prec), 0);
        bits::trim(&mut words, prec);
        BitSeries { words, prec }
    }

    pub fn add(&self, other: &BitSeries) -> BitSeries {
        let prec = self.prec.min(other.prec);
        let nw = bits::words_for(prec);
        let mut words: Vec<u64> = self.words[..nw.min(self.words.len())].to_vec();
        for (d, s) in words.iter_mut().zip(&other.words) {
            *d ^= s;
        }
        Self::from_words(words, prec)
    }

    /// Carryless product. Output precision is valuation-aware:
    /// min(prec_a + val(b), prec_b + val(a)), with val(0) capped at the
    /// operand's precision.
    pub fn mul(&self, other: &BitSeries) -> BitSeries {
        let prec = (self.prec + other.val_capped()).min(other.prec + self.val_capped());
        let pa = bits::popcount(&self.words);
        let pb = bits::popcount(&other.words);
        if pa == 0 || pb == 0 {
            return Self::zero(prec);
        }
        let max_words = self.words.len().max(other.words.len());
        let words = if pa.min(pb) <= max_words {
            let (sparse, dense) = if pa <= pb {
                (self, other)
            } else {
                (other, self)
            };
            let mut out = bits::zero_vec(prec);
            for i in bits::iter_ones(&sparse.words) {
                if i >= prec {
                    break;
                }
                bits::xor_shifted(&mut out, &dense.words, i);
            }
            out
        } else {
            mul_words(&self.words, &other.words)
        };
        Self::from_words(words, prec)
    }

    /// Frobenius fast path: bit 2n of the result = bit n of self.
    pub fn square(&self) -> BitSeries {
        let prec = 2 * self.prec;
        let mut out = bits::zero_vec(prec);
        for (i, &w) in self.words.iter().enumerate() {
            out[2 * i] = spread_u32((w & 0xffff_ffff) as u32);
            if 2 * i + 1 < out.len() {
                out[2 * i + 1] = spread_u32((w >> 32) as u32);
            }
        }
        Self::from_words(out, prec)
    }

    /// Substitute x -> x^k.
    pub fn compose_xk(&self, k: usize) -> BitSeries {
        assert!(k >= 1);
        let prec = k * self.prec;
        let mut out = bits::zero_vec(prec);
        for i in bits::iter_ones(&self.words) {
            bits::set(&mut out, k * i);
        }
        Self::from_words(out, prec)
    }

    /// pr: delete every coefficient whose exponent is divisible by l.
    pub fn drop_multiples(&self, l: usize) -> BitSeries {
        let mut out = self.clone();
        let mut n = 0;
        while n < out.prec {
            bits::clear(&mut out.words, n);
            n += l;
        }
        out
    }

    /// Keep only coefficients whose exponent is divisible by l.
    pub fn keep_multiples(&self, l: usize) -> BitSeries {
        let mut out = Self::zero(self.prec);
        let mut n = 0;
        while n < self.prec {
            if bits::get(&self.words, n) {
                bits::set(&mut out.words, n);
            }
            n += l;
        }
        out
    }

    pub fn truncate(&self, n: usize) -> Result<BitSeries> {
        if n > self.prec || n < 1 {
            return Err(Error::InsufficientPrecision {
                needed: n,
                have: self.prec,
            });
        }
        let mut words = self.words.clone();
        bits::trim(&mut words, n);
        words.truncate(bits::words_for(n));
        Ok(BitSeries { words, prec: n })
    }

    /// Exact division by a series of possibly positive valuation: returns q
    /// with q * g = f to available precision; prec_q = prec_f - val(g).
    pub fn laurent_div(&self, g: &BitSeries) -> Result<BitSeries> {
        let vg = g.val().ok_or(Error::Valuation)?;
        if let Some(vf) = self.val() {
            if vf < vg {
                return Err(Error::Valuation);
            }
        }
        if self.prec <= vg {
            return Err(Error::InsufficientPrecision {
                needed: vg + 1,
                have: self.prec,
            });
        }
        let pq = self.prec - vg;
        let mut r = self.words.clone();
        r.resize(bits::words_for(pq + vg) + g.words.len() + 1, 0);
        let mut q = bits::zero_vec(pq);
        loop {
            let mut masked = r.clone();
            bits::trim(&mut masked, pq + vg);
            match bits::lowest_set(&masked) {
                None => break,
                Some(i) => {
                    if i - vg >= pq {
                        break;
                    }
                    bits::set(&mut q, i - vg);
                    bits::xor_shifted(&mut r, &g.words, i - vg);
                }
            }
        }
        Ok(Self::from_words(q, pq))
    }

    /// The sanctioned comparison: coefficientwise equality of the first n
    /// coefficients. Errors if n exceeds either precision.
    pub fn agree_up_to(&self, other: &BitSeries, n: usize) -> Result<bool> {
        let have = self.prec.min(other.prec);
        if n > have {
            return Err(Error::InsufficientPrecision { needed: n, have });
        }
        let nw = bits::words_for(n);
        let mut diff: Vec<u64> = self.words[..nw.min(self.words.len())].to_vec();
        diff.resize(nw, 0);
        for (d, s) in diff.iter_mut().zip(&other.words) {
            *d ^= s;
        }
        bits::trim(&mut diff, n);
        Ok(bits::is_zero(&diff))
    }

    /// Equality on the common known prefix.
    pub fn agree(&self, other: &BitSeries) -> bool {
        self.agree_up_to(other, self.prec.min(other.prec))
            .expect("common prefix is always available")
    }
}

/// Interleave a zero bit after every bit of x.
fn spread_u32(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

/// Carryless 64x64 -> 128 multiply via 4-bit windowing.
fn clmul64(a: u64, b: u64) -> u128 {
    let mut table = [0u128; 16];
    let wide = b as u128;
    for i in 1..16usize {
        let tz = i.trailing_zeros();
        table[i] = table[i ^ (1 << tz)] ^ (wide << tz);
    }
    let mut acc = 0u128;
    for k in 0..16 {
        let nib = ((a >> (4 * k)) & 0xf) as usize;
        acc ^= table[nib] << (4 * k);
    }
    acc
}

fn schoolbook(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &aw) in a.iter().enumerate() {
        if aw == 0 {
            continue;
        }
        for (j, &bw) in b.iter().enumerate() {
            if bw == 0 {
                continue;
            }
            let p = clmul64(aw, bw);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

fn karatsuba(a: &[u64], b: &[u64], out: &mut [u64]) {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    if n <= KARATSUBA_THRESHOLD_WORDS {
        schoolbook(a, b, out);
        return;
    }
    let m = n / 2;
    let (a0, a1) = a.split_at(m);
    let (b0, b1) = b.split_at(m);

    let mut z0 = bits::zero_vec((2 * m) * bits::WORD_BITS);
    karatsuba(a0, b0, &mut z0);
    let hi = n - m;
    let mut z2 = bits::zero_vec((2 * hi) * bits::WORD_BITS);
    karatsuba(a1, b1, &mut z2);

    let mut sa: Vec<u64> = a1.to_vec();
    for (d, s) in sa.iter_mut().zip(a0) {
        *d ^= s;
    }
    let mut sb: Vec<u64> = b1.to_vec();
    for (d, s) in sb.iter_mut().zip(b0) {
        *d ^= s;
    }
    let mut z1 = bits::zero_vec((2 * hi) * bits::WORD_BITS);
    karatsuba(&sa, &sb, &mut z1);
    for i in 0..2 * m {
        z1[i] ^= z0[i];
    }
    for i in 0..2 * hi {
        z1[i] ^= z2[i];
    }

    for (i, &w) in z0.iter().enumerate() {
        out[i] ^= w;
    }
    for (i, &w) in z1.iter().enumerate() {
        out[m + i] ^= w;
    }
    for (i, &w) in z2.iter().enumerate() {
        out[2 * m + i] ^= w;
    }
}

/// Full carryless product of two word vectors.
pub fn mul_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = bits::zero_vec(2 * n * bits::WORD_BITS + 1);
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD_WORDS {
        schoolbook(a, b, &mut out);
    } else {
        let mut pa = a.to_vec();
        pa.resize(n, 0);
        let mut pb = b.to_vec();
        pb.resize(n, 0);
        karatsuba(&pa, &pb, &mut out);
    }
    out
}
