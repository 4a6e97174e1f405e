//! Formal Hecke operators T_p and U_l on truncated GF(2) series, with exact
//! precision contracts, plus iterated monomial / truncated-polynomial action.

use alloc::vec::Vec;

use crate::series::BitSeries;
use crate::theta::TSeries;
use crate::{Error, Result};

/// The working level and its generator primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    One,
    Three,
    Five,
}

impl Level {
    pub fn from_u32(v: u32) -> Option<Level> {
        match v {
            1 => Some(Level::One),
            3 => Some(Level::Three),
            5 => Some(Level::Five),
            _ => None,
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            Level::One => 1,
            Level::Three => 3,
            Level::Five => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet {
    pub level: Level,
    s: Vec<u32>,
}

impl PrimeSet {
    pub fn for_level(level: Level) -> PrimeSet {
        let s = match level {
            Level::One => alloc::vec![3, 5],
            Level::Three => alloc::vec![5, 7, 11, 13],
            Level::Five => alloc::vec![3, 7, 11, 13],
        };
        PrimeSet { level, s }
    }

    /// Ordered generator primes.
    pub fn s(&self) -> &[u32] {
        &self.s
    }

    /// The excluded level prime, if any.
    pub fn level_prime(&self) -> Option<u32> {
        match self.level {
            Level::One => None,
            Level::Three => Some(3),
            Level::Five => Some(5),
        }
    }

    pub fn max_prime(&self) -> u32 {
        *self.s.last().expect("prime set is nonempty")
    }
}

/// Output precision of T_p / U_p on input precision n.
pub fn contracted_prec(n: usize, p: usize) -> usize {
    (n - 1) / p + 1
}

/// U_l: coefficient extraction c_n -> c_{ln}.
pub fn apply_u(f: &BitSeries, l: usize) -> BitSeries {
    let po = contracted_prec(f.prec(), l);
    BitSeries::from_exponents(
        (0..po).filter(|&n| f.coeff(l * n)),
        po,
    )
}

/// T_p: sum c_n x^n -> sum c_{pn} x^n + sum c_n x^{pn}.
pub fn apply_tp(f: &BitSeries, p: usize) -> BitSeries {
    let po = contracted_prec(f.prec(), p);
    let extract = BitSeries::from_exponents((0..po).filter(|&n| f.coeff(p * n)), po);
    let spread_limit = contracted_prec(po, p);
    let spread = BitSeries::from_exponents(
        (0..spread_limit).filter(|&n| f.coeff(n)).map(|n| p * n),
        po,
    );
    extract.add(&spread)
}

/// Iterated T_p application for a monomial in the t-variables, given as
/// ascending primes with multiplicity. Ascending order is normative.
pub fn apply_monomial(f: &BitSeries, mono: &[u32]) -> Result<BitSeries> {
    debug_assert!(mono.windows(2).all(|w| w[0] <= w[1]));
    let mut cur = f.clone();
    for &p in mono {
        if cur.prec() < 1 {
            return Err(Error::PrecisionExhausted);
        }
        cur = apply_tp(&cur, p as usize);
    }
    Ok(cur)
}

/// Apply a truncated polynomial in the t-variables: XOR of the monomial
/// applications, at the worst monomial's precision contract.
pub fn apply_tseries(f: &BitSeries, u: &TSeries) -> Result<BitSeries> {
    let mut out_prec = f.prec();
    for m in u.support() {
        let mut p = f.prec();
        for &q in m {
            p = contracted_prec(p, q as usize);
        }
        out_prec = out_prec.min(p);
    }
    let mut acc = BitSeries::zero(out_prec);
    for m in u.support() {
        let img = apply_monomial(f, m)?;
        acc = acc.add(&img.truncate(out_prec)?);
    }
    Ok(acc)
}

/// Least e <= bound with T_p^e(f) = 0 to the available (contracting)
/// precision, by direct iteration.
pub fn nilpotency_index_series(f: &BitSeries, p: usize, bound: usize) -> Result<usize> {
    let mut cur = f.clone();
    for e in 0..=bound {
        if cur.is_zero() {
            return Ok(e);
        }
        if cur.prec() < 2 {
            return Err(Error::PrecisionExhausted);
        }
        cur = apply_tp(&cur, p);
    }
    Err(Error::BoundExceeded { bound })
}
