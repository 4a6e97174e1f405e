//! Run configuration and the shared artifacts (contexts, chunks, operator
//! actions, solvers) that the checks consume.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use hecke2_core::hecke::Level;
use hecke2_core::spaces::{
    build_context_with_f, kernel_subchunk, modd_space, n1_chunk, n2_chunk, v_chunk, w_chunk,
    LevelContext, ModdSpace, SpaceChunk,
};
use hecke2_core::theta::{
    extract_abc, solve_lambda, ActionSolver, ChunkAction, IdealChunk, IdealGens, TSeries,
};

use crate::cache;

/// Default m-adic base precision: chunk * 13^mdeg rounded up to a word.
pub fn default_prec(chunk: u32, mdeg: usize) -> usize {
    let n = chunk as usize * 13usize.pow(mdeg as u32);
    n.div_ceil(64) * 64
}

/// Base precision of the cheap kernel-identity tier.
pub const KERNEL_TIER_PREC: usize = 4096;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub level: Level,
    pub prec: usize,
    pub mdeg: usize,
    pub chunk: u32,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Up-front validation: the m-adic tier must keep at least chunk+1
    /// output coefficients after mdeg worst-case contractions.
    pub fn validate(&self) -> Result<()> {
        if self.mdeg < 2 {
            bail!("config error: --mdeg must be at least 2");
        }
        if self.chunk < 3 {
            bail!("config error: --chunk must be at least 3");
        }
        let max_s = match self.level {
            Level::One => 5usize,
            _ => 13,
        };
        let need = self.chunk as usize * max_s.pow(self.mdeg as u32);
        if self.prec < need {
            bail!(
                "config error: --prec {} is below chunk*maxS^mdeg = {} for level {}",
                self.prec,
                need,
                self.level.as_u32()
            );
        }
        Ok(())
    }

    pub fn theta_f(&self, prec: usize) -> Result<hecke2_core::series::BitSeries> {
        let (f, _hit) = cache::theta_f_cached(self.cache_dir.as_deref(), prec)?;
        Ok(f)
    }

    /// Level constants: (lambda target prime q, lambda two-variable subring,
    /// V-kernel prime, B leading prime, C leading prime, A leading primes).
    pub fn level_constants(&self) -> Option<LevelConstants> {
        match self.level {
            Level::One => None,
            Level::Three => Some(LevelConstants {
                q_lambda: 5,
                vars2: [7, 13],
                kernel_p: 3,
                b_prime: 7,
                c_prime: 11,
                a_primes: [5, 7, 13],
            }),
            Level::Five => Some(LevelConstants {
                q_lambda: 11,
                vars2: [3, 7],
                kernel_p: 5,
                b_prime: 7,
                c_prime: 13,
                a_primes: [3, 7, 11],
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LevelConstants {
    pub q_lambda: u32,
    pub vars2: [u32; 2],
    pub kernel_p: u32,
    pub b_prime: u32,
    pub c_prime: u32,
    pub a_primes: [u32; 3],
}

/// Kernel-identity tier: just the context at low precision.
pub fn build_kernel_ctx(cfg: &RunConfig) -> Result<LevelContext> {
    let prec = KERNEL_TIER_PREC.min(cfg.prec);
    let f = cfg.theta_f(prec)?;
    build_context_with_f(cfg.level, f).map_err(|e| anyhow!("kernel tier context: {e}"))
}

/// The m-adic tier for levels 3 and 5.
pub struct Madic {
    pub ctx: LevelContext,
    pub v: SpaceChunk,
    pub n1: SpaceChunk,
    pub n2: SpaceChunk,
    pub w: SpaceChunk,
    pub modd: ModdSpace,
    pub sub: SpaceChunk,
    pub act_v: ChunkAction,
    pub act_w: ChunkAction,
    pub act_m: ChunkAction,
    pub sol_v: ActionSolver,
    pub sol_w: ActionSolver,
    pub sol_m: ActionSolver,
    /// Annihilators mod m^2 (leading-form checks) and mod m^mdeg.
    pub ann_v2: IdealChunk,
    pub ann_w2: IdealChunk,
    pub ann_v: IdealChunk,
    pub ann_w: IdealChunk,
    pub ann_m: IdealChunk,
    pub ann_sub: IdealChunk,
    pub lam_d: TSeries,
    pub eps: TSeries,
    pub gens: IdealGens,
}

pub fn build_madic(cfg: &RunConfig) -> Result<Madic> {
    let f = cfg.theta_f(cfg.prec)?;
    let ctx = build_context_with_f(cfg.level, f).map_err(|e| anyhow!("m-adic context: {e}"))?;
    let k = cfg.chunk;
    let err = |what: &'static str| move |e| anyhow!("building {what}: {e:?}");
    let v = v_chunk(&ctx, k).map_err(err("V chunk"))?;
    let n1 = n1_chunk(&ctx, k).map_err(err("N1 chunk"))?;
    let n2 = n2_chunk(&ctx, k).map_err(err("N2 chunk"))?;
    let w = w_chunk(&ctx, k).map_err(err("W chunk"))?;
    let modd = modd_space(&ctx, k).map_err(err("M(odd) chunk"))?;
    let consts = cfg
        .level_constants()
        .ok_or_else(|| anyhow!("level 1 has no m-adic tier of this shape"))?;
    let sub = kernel_subchunk(&ctx, &v, consts.kernel_p).map_err(err("V kernel subchunk"))?;
    let s = ctx.primes.s().to_vec();
    let act_v = ChunkAction::build(&v, &s).map_err(err("V action"))?;
    let act_w = ChunkAction::build(&w, &s).map_err(err("W action"))?;
    let act_m = ChunkAction::build(&modd.chunk, &s).map_err(err("M(odd) action"))?;
    let act_sub = ChunkAction::build(&sub, &s).map_err(err("subchunk action"))?;
    let sol_v = ActionSolver::new(&act_v, &s).map_err(err("V solver"))?;
    let sol_w = ActionSolver::new(&act_w, &s).map_err(err("W solver"))?;
    let sol_m = ActionSolver::new(&act_m, &s).map_err(err("M(odd) solver"))?;
    let sol_sub = ActionSolver::new(&act_sub, &s).map_err(err("subchunk solver"))?;
    let d = cfg.mdeg;
    let ann_v2 = sol_v.annihilator(&act_v, 2).map_err(err("ann(V) mod m^2"))?;
    let ann_w2 = sol_w.annihilator(&act_w, 2).map_err(err("ann(W) mod m^2"))?;
    let ann_v = sol_v.annihilator(&act_v, d).map_err(err("ann(V)"))?;
    let ann_w = sol_w.annihilator(&act_w, d).map_err(err("ann(W)"))?;
    let ann_m = sol_m.annihilator(&act_m, d).map_err(err("ann(M)"))?;
    let ann_sub = sol_sub
        .annihilator(&act_sub, d)
        .map_err(err("ann(V kernel)"))?;
    let (lam_full, lam_d) = solve_lambda(&act_w, &consts.vars2, consts.q_lambda, d)
        .map_err(err("lambda"))?;
    let eps = hecke2_core::theta::epsilon_checked(&act_w, &s, consts.q_lambda, &lam_full)
        .map_err(err("epsilon"))?;
    let gens = extract_abc(&ann_v, &ann_w, &eps, consts.b_prime).map_err(err("A/B/C"))?;
    Ok(Madic {
        ctx,
        v,
        n1,
        n2,
        w,
        modd,
        sub,
        act_v,
        act_w,
        act_m,
        sol_v,
        sol_w,
        sol_m,
        ann_v2,
        ann_w2,
        ann_v,
        ann_w,
        ann_m,
        ann_sub,
        lam_d,
        eps,
        gens,
    })
}

/// The m-adic tier at level 1: the V chunk and its two-variable solver, with
/// action matrices for the expressible primes 7, 11, 13 as well.
pub struct MadicL1 {
    pub ctx: LevelContext,
    pub v: SpaceChunk,
    pub act_v: ChunkAction,
    pub sol_v: ActionSolver,
}

pub fn build_madic_l1(cfg: &RunConfig) -> Result<MadicL1> {
    let f = cfg.theta_f(cfg.prec)?;
    let ctx = build_context_with_f(cfg.level, f).map_err(|e| anyhow!("m-adic context: {e}"))?;
    let v = v_chunk(&ctx, cfg.chunk).map_err(|e| anyhow!("building V chunk: {e:?}"))?;
    let act_v = ChunkAction::build(&v, &[3, 5, 7, 11, 13])
        .map_err(|e| anyhow!("building V action: {e:?}"))?;
    let sol_v =
        ActionSolver::new(&act_v, &[3, 5]).map_err(|e| anyhow!("building V solver: {e:?}"))?;
    Ok(MadicL1 { ctx, v, act_v, sol_v })
}
