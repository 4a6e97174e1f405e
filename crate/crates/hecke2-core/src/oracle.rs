//! Independent slow-path reference implementations used to cross-check the
//! packed kernel. One byte per coefficient, straight-line definitions,
//! deliberately sharing no code with the fast path.

use alloc::vec::Vec;

use crate::series::BitSeries;
use crate::{Error, Result};

/// Largest precision the oracle will accept; it is quadratic-time.
pub const ORACLE_MAX_PREC: usize = 1 << 14;

/// One coefficient per byte, value 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSeries {
    pub coeffs: Vec<u8>,
}

impl DenseSeries {
    pub fn zero(prec: usize) -> Result<DenseSeries> {
        if prec > ORACLE_MAX_PREC || prec < 1 {
            return Err(Error::InsufficientPrecision {
                needed: prec,
                have: ORACLE_MAX_PREC,
            });
        }
        Ok(DenseSeries {
            coeffs: alloc::vec![0u8; prec],
        })
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn from_bits(s: &BitSeries) -> Result<DenseSeries> {
        let mut d = Self::zero(s.prec())?;
        for n in 0..s.prec() {
            d.coeffs[n] = s.coeff(n) as u8;
        }
        Ok(d)
    }

    pub fn to_bits(&self) -> BitSeries {
        BitSeries::from_exponents(
            (0..self.prec()).filter(|&n| self.coeffs[n] == 1),
            self.prec(),
        )
    }

    pub fn add(&self, other: &DenseSeries) -> DenseSeries {
        let prec = self.prec().min(other.prec());
        let mut out = DenseSeries::zero(prec).expect("shrinking precision");
        for n in 0..prec {
            out.coeffs[n] = self.coeffs[n] ^ other.coeffs[n];
        }
        out
    }

    /// Schoolbook product with the same valuation-aware output precision
    /// as the fast path.
    pub fn mul(&self, other: &DenseSeries) -> DenseSeries {
        let va = self.val_capped();
        let vb = other.val_capped();
        let prec = (self.prec() + vb).min(other.prec() + va).min(ORACLE_MAX_PREC);
        let mut out = DenseSeries::zero(prec).expect("capped precision");
        for i in 0..self.prec() {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..other.prec().min(prec - i.min(prec)) {
                if i + j < prec {
                    out.coeffs[i + j] ^= other.coeffs[j];
                }
            }
        }
        out
    }

    fn val_capped(&self) -> usize {
        self.coeffs
            .iter()
            .position(|&c| c == 1)
            .unwrap_or(self.prec())
    }

    /// T_p by direct index arithmetic.
    pub fn tp(&self, p: usize) -> DenseSeries {
        let po = (self.prec() - 1) / p + 1;
        let mut out = DenseSeries::zero(po).expect("contracted precision");
        for n in 0..po {
            out.coeffs[n] ^= self.coeffs[p * n];
        }
        for n in 0..po.div_ceil(p) {
            if p * n < po {
                out.coeffs[p * n] ^= self.coeffs[n];
            }
        }
        out
    }

    /// U_l by direct index arithmetic.
    pub fn u(&self, l: usize) -> DenseSeries {
        let po = (self.prec() - 1) / l + 1;
        let mut out = DenseSeries::zero(po).expect("contracted precision");
        for n in 0..po {
            out.coeffs[n] = self.coeffs[l * n];
        }
        out
    }
}
