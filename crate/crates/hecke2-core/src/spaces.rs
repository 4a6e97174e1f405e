//! The spaces V, M(odd), N1, N2, W as finite degree-saturated chunks, with
//! decomposition, the trace map, the filtration, and the W splitting.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bits;
use crate::hecke::{apply_tp, Level, PrimeSet};
use crate::matrix::kernel_columns;
use crate::series::BitSeries;
use crate::{Error, Result};

/// Base data of a level: F, and for levels 3/5 also G = F(x^l), D = pr(F).
pub struct LevelContext {
    pub level: Level,
    pub n: usize,
    pub f: BitSeries,
    pub g: Option<BitSeries>,
    pub d: Option<BitSeries>,
    pub primes: PrimeSet,
}

impl LevelContext {
    pub fn ell(&self) -> Option<usize> {
        self.primes.level_prime().map(|p| p as usize)
    }

    pub fn g(&self) -> &BitSeries {
        self.g.as_ref().expect("no G at level 1")
    }

    pub fn d(&self) -> &BitSeries {
        self.d.as_ref().expect("no D at level 1")
    }

    /// Degree of F over Z/2(G): the i-exponent cap of reduced generators.
    pub fn imax(&self) -> u32 {
        match self.level {
            Level::One => u32::MAX,
            Level::Three => 3,
            Level::Five => 5,
        }
    }
}

pub fn build_context(level: Level, n: usize) -> Result<LevelContext> {
    build_context_with_f(level, BitSeries::theta_f(n))
}

/// Build a context from an externally supplied F (e.g. a cached series).
/// The eager sanity checks still apply, so a wrong F is caught here.
pub fn build_context_with_f(level: Level, f: BitSeries) -> Result<LevelContext> {
    let n = f.prec();
    if n < 64 {
        return Err(Error::InsufficientPrecision { needed: 64, have: n });
    }
    let primes = PrimeSet::for_level(level);
    let (g, d) = match level {
        Level::One => (None, None),
        _ => {
            let l = primes.level_prime().unwrap() as usize;
            let g = f.truncate((n - 1) / l + 1)?.compose_xk(l).truncate(n)?;
            let d = f.drop_multiples(l);
            (Some(g), Some(d))
        }
    };
    let ctx = LevelContext {
        level,
        n,
        f,
        g,
        d,
        primes,
    };
    if level == Level::Three {
        let d3 = pow(ctx.d(), 3, n)?;
        if !ctx.g().agree(&d3) {
            return Err(Error::Internal("G != D^3 at level 3"));
        }
    }
    Ok(ctx)
}

/// f^k truncated to precision n.
pub fn pow(f: &BitSeries, k: u32, n: usize) -> Result<BitSeries> {
    if k == 0 {
        return Ok(BitSeries::one(n));
    }
    let mut acc: Option<BitSeries> = None;
    let mut cur = f.clone();
    let mut kk = k;
    loop {
        if kk & 1 == 1 {
            acc = Some(match acc {
                None => cur.clone(),
                Some(a) => cap(a.mul(&cur), n)?,
            });
        }
        kk >>= 1;
        if kk == 0 {
            break;
        }
        cur = cap(cur.square(), n)?;
    }
    cap(acc.unwrap(), n)
}

fn cap(s: BitSeries, n: usize) -> Result<BitSeries> {
    if s.prec() > n {
        s.truncate(n)
    } else if s.prec() < n {
        Err(Error::InsufficientPrecision {
            needed: n,
            have: s.prec(),
        })
    } else {
        Ok(s)
    }
}

/// Odd powers base^k, k = 1,3,..,kmax, via the sparse square chain.
pub fn odd_power_chain(base: &BitSeries, kmax: u32, n: usize) -> Result<BTreeMap<u32, BitSeries>> {
    let sq = cap(base.truncate((n + 1) / 2)?.square(), n)?;
    let mut out = BTreeMap::new();
    let mut cur = cap(base.clone(), n)?;
    out.insert(1, cur.clone());
    let mut k = 1;
    while k + 2 <= kmax {
        cur = cap(cur.mul(&sq), n)?;
        k += 2;
        out.insert(k, cur.clone());
    }
    Ok(out)
}

/// All powers base^0..kmax.
pub fn power_chain(base: &BitSeries, kmax: u32, n: usize) -> Result<BTreeMap<u32, BitSeries>> {
    let mut out = BTreeMap::new();
    out.insert(0, BitSeries::one(n));
    if kmax >= 1 {
        let mut cur = cap(base.clone(), n)?;
        out.insert(1, cur.clone());
        for k in 2..=kmax {
            cur = cap(cur.mul(base), n)?;
            out.insert(k, cur.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpaceTag {
    V,
    Modd,
    N1,
    N2,
    W,
    VKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    /// F^k, G^k, or D_k depending on the space.
    K(u32),
    /// F^i G^j.
    IJ(u32, u32),
}

enum Decomp {
    /// Distinct leading degrees: valuation -> generator index.
    Greedy(BTreeMap<usize, usize>),
    /// Colliding leading degrees: certified echelon basis.
    Echelon(EchBasis),
}

pub struct SpaceChunk {
    pub tag: SpaceTag,
    pub k: u32,
    pub labels: Vec<Label>,
    gens: Vec<BitSeries>,
    decomp: Decomp,
}

impl SpaceChunk {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen(&self, i: usize) -> &BitSeries {
        &self.gens[i]
    }

    pub fn gens(&self) -> &[BitSeries] {
        &self.gens
    }

    pub fn label_index(&self, lab: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == lab)
    }

    fn new_greedy(tag: SpaceTag, k: u32, labels: Vec<Label>, gens: Vec<BitSeries>) -> Result<Self> {
        let mut by_val = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            let v = g.val().ok_or(Error::DependentGenerators)?;
            if by_val.insert(v, i).is_some() {
                return Err(Error::DependentGenerators);
            }
        }
        Ok(SpaceChunk {
            tag,
            k,
            labels,
            gens,
            decomp: Decomp::Greedy(by_val),
        })
    }

    fn new_echelon(tag: SpaceTag, k: u32, labels: Vec<Label>, gens: Vec<BitSeries>) -> Result<Self> {
        let ech = EchBasis::build(&gens)?;
        Ok(SpaceChunk {
            tag,
            k,
            labels,
            gens,
            decomp: Decomp::Echelon(ech),
        })
    }

    /// Express f exactly over the generators. The selection is certified by
    /// full-precision re-expansion: the residual must vanish through the
    /// whole common precision, not just the cutoff.
    pub fn decompose(&self, f: &BitSeries) -> Result<Vec<u64>> {
        let prec = self
            .gens
            .iter()
            .map(|g| g.prec())
            .min()
            .unwrap_or(f.prec())
            .min(f.prec());
        let mut sel = bits::zero_vec(self.gens.len().max(1));
        match &self.decomp {
            Decomp::Greedy(by_val) => {
                let mut r = f.truncate(prec)?;
                loop {
                    let Some(v) = r.val() else { break };
                    let Some(&i) = by_val.get(&v) else {
                        return Err(Error::NotInSpan { valuation: v });
                    };
                    r = r.add(&self.gens[i].truncate(prec)?);
                    if bits::get(&sel, i) {
                        return Err(Error::Internal("greedy revisited a generator"));
                    }
                    bits::set(&mut sel, i);
                }
            }
            Decomp::Echelon(ech) => {
                sel = ech.decompose(f)?;
                let mut r = f.truncate(prec)?;
                for i in bits::iter_ones(&sel.clone()) {
                    r = r.add(&self.gens[i].truncate(prec)?);
                }
                if let Some(v) = r.val() {
                    return Err(Error::NotInSpan { valuation: v });
                }
            }
        }
        Ok(sel)
    }

    /// Membership probe.
    pub fn contains(&self, f: &BitSeries) -> bool {
        self.decompose(f).is_ok()
    }

    /// XOR of the selected generators at precision n.
    pub fn expand(&self, sel: &[u64], n: usize) -> Result<BitSeries> {
        let mut acc = BitSeries::zero(n);
        for i in bits::iter_ones(sel) {
            acc = acc.add(&self.gens[i].truncate(n)?);
        }
        Ok(acc)
    }
}

/// Echelon basis over an adaptively grown coefficient cutoff: the cutoff
/// doubles until every generator receives a pivot, certifying independence.
pub struct EchBasis {
    cutoff: usize,
    /// (pivot coefficient index, cutoff-bits body || generator tag bits).
    rows: Vec<(usize, Vec<u64>)>,
    n: usize,
}

impl EchBasis {
    pub fn build(gens: &[BitSeries]) -> Result<EchBasis> {
        let min_prec = gens.iter().map(|g| g.prec()).min().unwrap_or(1);
        let max_val = gens
            .iter()
            .map(|g| g.val().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let mut cutoff = (((max_val + 1 + 63) / 64) * 64).min(min_prec);
        loop {
            match Self::try_build(gens, cutoff) {
                Ok(e) => return Ok(e),
                Err(Error::DependentGenerators) if cutoff < min_prec => {
                    cutoff = (cutoff * 2).min(min_prec);
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn try_build(gens: &[BitSeries], cutoff: usize) -> Result<EchBasis> {
        let n = gens.len();
        let total = cutoff + n;
        let mut rows: Vec<(usize, Vec<u64>)> = Vec::with_capacity(n);
        for (i, g) in gens.iter().enumerate() {
            let mut v = bits::zero_vec(total.max(1));
            for (w, &s) in v.iter_mut().zip(g.words()) {
                *w = s;
            }
            bits::trim(&mut v, cutoff);
            bits::set(&mut v, cutoff + i);
            for (piv, bv) in &rows {
                if bits::get(&v, *piv) {
                    bits::xor_assign(&mut v, bv);
                }
            }
            let mut body = v.clone();
            bits::trim(&mut body, cutoff);
            match bits::lowest_set(&body) {
                None => return Err(Error::DependentGenerators),
                Some(piv) => rows.push((piv, v)),
            }
        }
        Ok(EchBasis { cutoff, rows, n })
    }

    fn decompose(&self, f: &BitSeries) -> Result<Vec<u64>> {
        if f.prec() < self.cutoff {
            return Err(Error::InsufficientPrecision {
                needed: self.cutoff,
                have: f.prec(),
            });
        }
        let mut v = bits::zero_vec((self.cutoff + self.n).max(1));
        for (w, &s) in v.iter_mut().zip(f.words()) {
            *w = s;
        }
        bits::trim(&mut v, self.cutoff);
        for (piv, bv) in &self.rows {
            if bits::get(&v, *piv) {
                bits::xor_assign(&mut v, bv);
            }
        }
        let mut body = v.clone();
        bits::trim(&mut body, self.cutoff);
        if let Some(val) = bits::lowest_set(&body) {
            return Err(Error::NotInSpan { valuation: val });
        }
        let mut sel = bits::zero_vec(self.n.max(1));
        for b in bits::iter_ones(&v).filter(|&b| b >= self.cutoff) {
            bits::set(&mut sel, b - self.cutoff);
        }
        Ok(sel)
    }
}

/// V chunk: F^k, k odd, k <= K.
pub fn v_chunk(ctx: &LevelContext, k: u32) -> Result<SpaceChunk> {
    let chain = odd_power_chain(&ctx.f, k, ctx.n)?;
    let (labels, gens) = chain
        .into_iter()
        .map(|(kk, g)| (Label::K(kk), g))
        .unzip();
    SpaceChunk::new_greedy(SpaceTag::V, k, labels, gens)
}

/// N1 chunk: G^k, k odd, k <= K.
pub fn n1_chunk(ctx: &LevelContext, k: u32) -> Result<SpaceChunk> {
    let chain = odd_power_chain(ctx.g(), k, ctx.n)?;
    let (labels, gens) = chain
        .into_iter()
        .map(|(kk, g)| (Label::K(kk), g))
        .unzip();
    SpaceChunk::new_greedy(SpaceTag::N1, k, labels, gens)
}

fn modd_labels(imax: u32, k: u32, top_included: bool) -> Vec<Label> {
    let mut labels = Vec::new();
    let icap = if top_included { imax } else { imax - 1 };
    for i in 0..=icap {
        for j in 0..=k.saturating_sub(i) {
            if (i + j) % 2 == 1 {
                labels.push(Label::IJ(i, j));
            }
        }
    }
    labels
}

fn modd_gens(ctx: &LevelContext, labels: &[Label]) -> Result<Vec<BitSeries>> {
    let imax = ctx.imax();
    let jmax = labels
        .iter()
        .map(|l| match l {
            Label::IJ(_, j) => *j,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let fpow = power_chain(&ctx.f, imax, ctx.n)?;
    let gpow = power_chain(ctx.g(), jmax, ctx.n)?;
    labels
        .iter()
        .map(|l| {
            let Label::IJ(i, j) = *l else {
                return Err(Error::Internal("bad modd label"));
            };
            cap(fpow[&i].mul(&gpow[&j]), ctx.n)
        })
        .collect()
}

/// M(odd) chunk, saturated by filtration degree: F^i G^j with i <= imax,
/// i + j odd, i + j <= K.
pub fn modd_chunk(ctx: &LevelContext, k: u32) -> Result<SpaceChunk> {
    let labels = modd_labels(ctx.imax(), k, true);
    let gens = modd_gens(ctx, &labels)?;
    SpaceChunk::new_echelon(SpaceTag::Modd, k, labels, gens)
}

/// N2 chunk: the kernel of the trace, i.e. the i < imax part of the M(odd)
/// chunk (trace(F^i G^j) = 0 iff i < imax).
pub fn n2_chunk(ctx: &LevelContext, k: u32) -> Result<SpaceChunk> {
    let labels = modd_labels(ctx.imax(), k, false);
    let gens = modd_gens(ctx, &labels)?;
    SpaceChunk::new_echelon(SpaceTag::N2, k, labels, gens)
}

/// W chunk: level 3, D^k for k = 1,5 mod 6; level 5, D_k for
/// k = 1,3,7,9 mod 10 with D_3 = D^8/G, D_7 = D^2 G, D_9 = D^4 G and
/// D_{k+10} = G^2 D_k.
pub fn w_chunk(ctx: &LevelContext, k: u32) -> Result<SpaceChunk> {
    let n = ctx.n;
    let mut labels = Vec::new();
    let mut gens = Vec::new();
    match ctx.level {
        Level::Three => {
            let chain = odd_power_chain(ctx.d(), k, n)?;
            for (kk, g) in chain {
                if kk % 6 == 1 || kk % 6 == 5 {
                    labels.push(Label::K(kk));
                    gens.push(g);
                }
            }
        }
        Level::Five => {
            let d = ctx.d();
            let g = ctx.g();
            let d2 = cap(d.truncate((n + 1) / 2)?.square(), n)?;
            let d8 = pow(d, 8, n + g.val().unwrap())?;
            let d3 = cap(d8.laurent_div(g)?, n)?;
            let d7 = cap(d2.mul(g), n)?;
            let d9 = cap(d2.mul(&d2).truncate(n)?.mul(g), n)?;
            let g2 = cap(g.truncate((n + 1) / 2)?.square(), n)?;
            for (k0, base) in [(1u32, d.clone()), (3, d3), (7, d7), (9, d9)] {
                let mut cur = base;
                let mut kk = k0;
                while kk <= k {
                    labels.push(Label::K(kk));
                    gens.push(cur.clone());
                    kk += 10;
                    if kk <= k {
                        cur = cap(cur.mul(&g2), n)?;
                    }
                }
            }
            let mut order: Vec<usize> = (0..labels.len()).collect();
            order.sort_by_key(|&i| labels[i]);
            labels = order.iter().map(|&i| labels[i]).collect();
            gens = order.iter().map(|&i| gens[i].clone()).collect();
        }
        Level::One => return Err(Error::Internal("no W at level 1")),
    }
    SpaceChunk::new_greedy(SpaceTag::W, k, labels, gens)
}

/// Residue-class split of the W chunk into its two halves, as index lists.
/// Level 3: k mod 6 in {1} vs {5}; level 5: k mod 20 in {1,3,7,9} vs rest.
pub fn split_w(chunk: &SpaceChunk, level: Level) -> (Vec<usize>, Vec<usize>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, lab) in chunk.labels.iter().enumerate() {
        let Label::K(k) = *lab else { continue };
        let first = match level {
            Level::Three => k % 6 == 1,
            Level::Five => matches!(k % 20, 1 | 3 | 7 | 9),
            Level::One => true,
        };
        if first {
            a.push(i);
        } else {
            b.push(i);
        }
    }
    (a, b)
}

/// Does T_p stabilize the two halves of W, or swap them?
pub fn w_crossing_swaps(level: Level, p: u32) -> bool {
    match level {
        Level::Three => p % 6 == 5,
        Level::Five => !matches!(p % 20, 1 | 3 | 7 | 9),
        Level::One => false,
    }
}

/// Kernel of T_p on the V chunk, as a chunk of combination generators.
pub fn kernel_subchunk(ctx: &LevelContext, v: &SpaceChunk, p: u32) -> Result<SpaceChunk> {
    let cols: Vec<Vec<u64>> = v
        .gens()
        .iter()
        .map(|g| v.decompose(&apply_tp(g, p as usize)))
        .collect::<Result<_>>()?;
    let kernel = kernel_columns(&cols, v.len());
    let mut labels = Vec::new();
    let mut gens = Vec::new();
    for (i, sel) in kernel.iter().enumerate() {
        labels.push(Label::K(i as u32));
        gens.push(v.expand(sel, ctx.n)?);
    }
    SpaceChunk::new_echelon(SpaceTag::VKernel, v.k, labels, gens)
}

/// M(odd) bundled with what the trace map needs.
pub struct ModdSpace {
    pub chunk: SpaceChunk,
    gpow: BTreeMap<u32, BitSeries>,
    imax: u32,
}

/// Z/2[G^2]-module basis element index, for zg2_decompose results.
/// Level 3 order: [G, F, F^2 G, F^3]; level 5: [G, F, F^2 G, F^3, F^4 G, F^5].
pub type Zg2Coord = (usize, u32);

pub fn modd_space(ctx: &LevelContext, k: u32) -> Result<ModdSpace> {
    let chunk = modd_chunk(ctx, k)?;
    let gpow = power_chain(ctx.g(), k + 1, ctx.n)?;
    Ok(ModdSpace {
        chunk,
        gpow,
        imax: ctx.imax(),
    })
}

impl ModdSpace {
    /// Trace from the basis-image table: F^i G^j maps to G^{j+1} when
    /// i = imax, else to 0; extended Z/2[G^2]-linearly.
    pub fn trace(&self, f: &BitSeries) -> Result<BitSeries> {
        let sel = self.chunk.decompose(f)?;
        let mut acc = BitSeries::zero(f.prec().min(self.gpow[&1].prec()));
        for i in bits::iter_ones(&sel) {
            if let Label::IJ(ii, j) = self.chunk.labels[i] {
                if ii == self.imax {
                    acc = acc.add(&self.gpow[&(j + 1)]);
                }
            }
        }
        Ok(acc)
    }

    /// Coordinates over the Z/2[G^2]-module basis: (basis index, G^2 power).
    pub fn zg2_decompose(&self, f: &BitSeries) -> Result<Vec<Zg2Coord>> {
        let sel = self.chunk.decompose(f)?;
        let mut out = Vec::new();
        for i in bits::iter_ones(&sel) {
            let Label::IJ(ii, j) = self.chunk.labels[i] else {
                return Err(Error::Internal("bad modd label"));
            };
            let par = 1 - ii % 2;
            out.push((ii as usize, (j - par) / 2));
        }
        Ok(out)
    }

    /// Re-expand zg2 coordinates (for cross-checks).
    pub fn zg2_expand(&self, ctx: &LevelContext, coords: &[Zg2Coord]) -> Result<BitSeries> {
        let fpow = power_chain(&ctx.f, self.imax, ctx.n)?;
        let mut acc = BitSeries::zero(ctx.n);
        for &(bi, e) in coords {
            let i = bi as u32;
            let par = 1 - i % 2;
            let j = 2 * e + par;
            let term = cap(fpow[&i].mul(&self.gpow[&j]), ctx.n)?;
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiltrationPosition {
    InN1,
    InN2NotN1,
    OutsideN2,
}

pub fn filtration_check(
    modd: &ModdSpace,
    n1: &SpaceChunk,
    f: &BitSeries,
) -> Result<FiltrationPosition> {
    let tr = modd.trace(f)?;
    if !tr.is_zero() {
        return Ok(FiltrationPosition::OutsideN2);
    }
    if n1.contains(f) {
        Ok(FiltrationPosition::InN1)
    } else {
        Ok(FiltrationPosition::InN2NotN1)
    }
}

/// pr: N2 -> W. Checks the kernel correspondence: pr(f) = 0 iff f is in N1.
pub fn pr_to_w(
    ctx: &LevelContext,
    w: &SpaceChunk,
    n1: &SpaceChunk,
    f: &BitSeries,
) -> Result<(BitSeries, Vec<u64>)> {
    let l = ctx.ell().ok_or(Error::Internal("pr needs a level prime"))?;
    let img = f.drop_multiples(l);
    let in_n1 = n1.contains(f);
    if in_n1 != img.is_zero() {
        return Err(Error::Internal("pr kernel mismatch with N1"));
    }
    let sel = w.decompose(&img)?;
    Ok((img, sel))
}
