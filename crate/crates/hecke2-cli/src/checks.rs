//! The individual verification checks and the parallel runner.

use std::time::Instant;

use anyhow::{anyhow, bail, ensure, Result};
use rayon::prelude::*;

use hecke2_core::bits;
use hecke2_core::hecke::{apply_tp, apply_u, contracted_prec, Level};
use hecke2_core::matrix::{echelon_span, in_span, solve_columns};
use hecke2_core::spaces::{
    pow, pr_to_w, split_w, v_chunk, w_chunk, w_crossing_swaps, Label, LevelContext,
};
use hecke2_core::theta::{self, verify_ideal_structure, TSeries};

use crate::report::{CheckRecord, Status};
use crate::session::{build_kernel_ctx, build_madic, build_madic_l1, Madic, MadicL1, RunConfig};

pub const CHECKS_L35: &[&str] = &[
    "annihilator_forms",
    "composite_iso",
    "conjugate_sum",
    "embedding",
    "filtration",
    "ideal_structure",
    "kernel_identities",
    "lambda_epsilon",
    "mutation_control",
    "nilpotency",
    "solve_u",
    "trace_table",
    "u_consistency",
    "w_crossing",
    "w_surjectivity",
];

pub const CHECKS_L1: &[&str] = &["nilpotency", "solve_u", "v_divisibility"];

pub fn applicable(level: Level) -> &'static [&'static str] {
    match level {
        Level::One => CHECKS_L1,
        _ => CHECKS_L35,
    }
}

pub fn all_names() -> Vec<&'static str> {
    let mut v: Vec<&'static str> = CHECKS_L35.to_vec();
    for n in CHECKS_L1 {
        if !v.contains(n) {
            v.push(n);
        }
    }
    v.sort_unstable();
    v
}

/// Run the selected checks. `selected` is None for "all applicable"; names
/// applicable to other levels only are reported as skipped.
pub fn run(cfg: &RunConfig, selected: Option<&[String]>) -> Result<Vec<CheckRecord>> {
    let applicable_names = applicable(cfg.level);
    let mut enabled: Vec<&'static str> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    match selected {
        None => enabled.extend_from_slice(applicable_names),
        Some(list) => {
            for name in list {
                match applicable_names.iter().find(|n| *n == name) {
                    Some(n) => enabled.push(n),
                    None if all_names().contains(&name.as_str()) => skipped.push(name.clone()),
                    None => bail!("config error: unknown check name {name:?}"),
                }
            }
        }
    }
    enabled.sort_unstable();
    enabled.dedup();

    let need_kernel = enabled.contains(&"kernel_identities");
    let need_madic = enabled.iter().any(|&n| n != "kernel_identities");
    let kctx = if need_kernel {
        Some(build_kernel_ctx(cfg))
    } else {
        None
    };
    let (madic, madic_l1) = if need_madic {
        match cfg.level {
            Level::One => (None, Some(build_madic_l1(cfg))),
            _ => (Some(build_madic(cfg)), None),
        }
    } else {
        (None, None)
    };

    let params = format!(
        "level={} K={} N={} d={}",
        cfg.level.as_u32(),
        cfg.chunk,
        cfg.prec,
        cfg.mdeg
    );
    let mut records: Vec<CheckRecord> = enabled
        .par_iter()
        .map(|&name| {
            let start = Instant::now();
            let outcome = dispatch(name, cfg, kctx.as_ref(), madic.as_ref(), madic_l1.as_ref());
            let wall_ms = start.elapsed().as_millis();
            match outcome {
                Ok(()) => CheckRecord {
                    name: name.to_string(),
                    status: Status::Pass,
                    parameters: params.clone(),
                    witness: None,
                    wall_ms,
                },
                Err(e) => CheckRecord {
                    name: name.to_string(),
                    status: Status::Fail,
                    parameters: params.clone(),
                    witness: Some(format!("{e:#}")),
                    wall_ms,
                },
            }
        })
        .collect();
    for name in skipped {
        records.push(CheckRecord {
            name,
            status: Status::Skipped,
            parameters: params.clone(),
            witness: None,
            wall_ms: 0,
        });
    }
    Ok(records)
}

type BuildResult<'a, T> = Option<&'a Result<T>>;

fn dispatch(
    name: &str,
    cfg: &RunConfig,
    kctx: BuildResult<LevelContext>,
    madic: BuildResult<Madic>,
    madic_l1: BuildResult<MadicL1>,
) -> Result<()> {
    fn unwrap_tier<'a, T>(tier: BuildResult<'a, T>) -> Result<&'a T> {
        tier.ok_or_else(|| anyhow!("required tier not built"))?
            .as_ref()
            .map_err(|e| anyhow!("{e:#}"))
    }
    match name {
        "kernel_identities" => kernel_identities(unwrap_tier(kctx)?),
        "trace_table" => trace_table(unwrap_tier(madic)?),
        "conjugate_sum" => conjugate_sum(unwrap_tier(madic)?),
        "composite_iso" => composite_iso(unwrap_tier(madic)?),
        "filtration" => filtration(unwrap_tier(madic)?),
        "w_crossing" => w_crossing(unwrap_tier(madic)?),
        "embedding" => embedding(cfg, unwrap_tier(madic)?),
        "w_surjectivity" => w_surjectivity(cfg, unwrap_tier(madic)?),
        "nilpotency" => match cfg.level {
            Level::One => nilpotency_l1(cfg, unwrap_tier(madic_l1)?),
            _ => nilpotency(cfg, unwrap_tier(madic)?),
        },
        "solve_u" => match cfg.level {
            Level::One => solve_u_l1(cfg, unwrap_tier(madic_l1)?),
            _ => solve_u(cfg, unwrap_tier(madic)?),
        },
        "v_divisibility" => v_divisibility(cfg, unwrap_tier(madic_l1)?),
        "u_consistency" => u_consistency(cfg, unwrap_tier(madic)?),
        "lambda_epsilon" => lambda_epsilon(cfg, unwrap_tier(madic)?),
        "annihilator_forms" => annihilator_forms(cfg, unwrap_tier(madic)?),
        "ideal_structure" => ideal_structure(cfg, unwrap_tier(madic)?),
        "mutation_control" => mutation_control(cfg, unwrap_tier(madic)?),
        other => bail!("internal error: unhandled check {other}"),
    }
}

pub fn kernel_identities(ctx: &LevelContext) -> Result<()> {
    let n = ctx.n;
    let f = &ctx.f;
    let g = ctx.g();
    let e = match ctx.level {
        Level::Three => 4,
        Level::Five => 6,
        Level::One => bail!("no kernel identities at level 1"),
    };
    let lhs = pow(&f.add(g), e, n).map_err(|er| anyhow!("(F+G)^{e}: {er:?}"))?;
    let fg = f.mul(g).truncate(n).map_err(|er| anyhow!("FG: {er:?}"))?;
    ensure!(
        lhs.agree_up_to(&fg, n).map_err(|er| anyhow!("{er:?}"))?,
        "(F+G)^{e} != FG below x^{n}"
    );
    match ctx.level {
        Level::Three => {
            let d3 = pow(ctx.d(), 3, n).map_err(|er| anyhow!("D^3: {er:?}"))?;
            ensure!(d3.agree(g), "G != D^3 below x^{n}");
        }
        Level::Five => {
            let lim = n / 2;
            let d8 = pow(ctx.d(), 8, n).map_err(|er| anyhow!("D^8: {er:?}"))?;
            let q = d8.laurent_div(g).map_err(|er| anyhow!("D^8/G: {er:?}"))?;
            let fg2 = f
                .mul(&pow(&f.add(g), 2, n).map_err(|er| anyhow!("{er:?}"))?)
                .truncate(n)
                .map_err(|er| anyhow!("{er:?}"))?;
            let rhs = fg2.drop_multiples(5);
            ensure!(
                q.agree_up_to(&rhs, lim).map_err(|er| anyhow!("{er:?}"))?,
                "D^8/G != pr(F(F+G)^2) below x^{lim}"
            );
        }
        Level::One => unreachable!(),
    }
    Ok(())
}

pub fn trace_table(m: &Madic) -> Result<()> {
    let ctx = &m.ctx;
    let imax = ctx.imax();
    for i in 0..=imax {
        let par = (i + 1) % 2;
        let idx = m
            .modd
            .chunk
            .label_index(Label::IJ(i, par))
            .ok_or_else(|| anyhow!("basis element F^{i}G^{par} missing from chunk"))?;
        let tr = m
            .modd
            .trace(m.modd.chunk.gen(idx))
            .map_err(|e| anyhow!("trace(F^{i}G^{par}): {e:?}"))?;
        if i == imax {
            ensure!(
                !tr.is_zero() && tr.agree(ctx.g()),
                "trace(F^{i}G^{par}) != G"
            );
        } else {
            ensure!(tr.is_zero(), "trace(F^{i}G^{par}) != 0");
        }
    }
    Ok(())
}

pub fn conjugate_sum(m: &Madic) -> Result<()> {
    let ctx = &m.ctx;
    let l = ctx.ell().unwrap();
    for k in (1..=25u32).step_by(2) {
        let fk = m
            .v
            .gen(m.v.label_index(Label::K(k)).ok_or_else(|| anyhow!("F^{k} missing"))?);
        let tr = m.modd.trace(fk).map_err(|e| anyhow!("trace(F^{k}): {e:?}"))?;
        let conj = fk.compose_xk(l * l).add(&fk.keep_multiples(l));
        ensure!(
            tr.prec().min(conj.prec()) >= 256,
            "conjugate-sum precision below 256 at k={k}"
        );
        ensure!(tr.agree(&conj), "conjugate-sum mismatch at k={k}");
    }
    Ok(())
}

pub fn composite_iso(m: &Madic) -> Result<()> {
    let ctx = &m.ctx;
    let l = ctx.ell().unwrap();
    for k in (1..=49u32).step_by(2) {
        let fk = m
            .v
            .gen(m.v.label_index(Label::K(k)).ok_or_else(|| anyhow!("F^{k} missing"))?);
        let tr = m.modd.trace(fk).map_err(|e| anyhow!("trace(F^{k}): {e:?}"))?;
        let lhs = apply_u(&tr, l);
        let rhs = apply_tp(fk, l);
        ensure!(
            lhs.prec().min(rhs.prec()) >= 128,
            "composite precision below 128 at k={k}"
        );
        ensure!(lhs.agree(&rhs), "U_{l}(Tr(F^{k})) != T_{l}(F^{k})");
    }
    Ok(())
}

pub fn filtration(m: &Madic) -> Result<()> {
    let s = m.ctx.primes.s().to_vec();
    for gi in 0..m.n2.len() {
        for &p in &s {
            let img = apply_tp(m.n2.gen(gi), p as usize);
            let tr = m
                .modd
                .trace(&img)
                .map_err(|e| anyhow!("trace(T_{p}(N2 gen {gi})): {e:?}"))?;
            ensure!(tr.is_zero(), "T_{p} image of N2 generator {gi} left N2");
        }
    }
    for gi in 0..m.n1.len() {
        for &p in &s {
            let img = apply_tp(m.n1.gen(gi), p as usize);
            ensure!(
                m.n1.contains(&img),
                "T_{p} image of N1 generator {gi} left N1"
            );
        }
    }
    Ok(())
}

pub fn w_crossing(m: &Madic) -> Result<()> {
    let ctx = &m.ctx;
    let level = ctx.level;
    let (ha, hb) = split_w(&m.w, level);
    for &p in ctx.primes.s() {
        let swaps = w_crossing_swaps(level, p);
        let halves = [
            (&ha, if swaps { &hb } else { &ha }),
            (&hb, if swaps { &ha } else { &hb }),
        ];
        for (src, dst) in halves {
            for &i in src.iter() {
                let img = apply_tp(m.w.gen(i), p as usize);
                let sel = m
                    .w
                    .decompose(&img)
                    .map_err(|e| anyhow!("T_{p}(W gen {i}) decomposition: {e:?}"))?;
                for j in bits::iter_ones(&sel) {
                    ensure!(
                        dst.contains(&j),
                        "T_{p} image of W generator {i} crossed to the wrong half"
                    );
                }
            }
        }
    }
    match level {
        Level::Three => {
            let d5 = m
                .w
                .gen(m.w.label_index(Label::K(5)).ok_or_else(|| anyhow!("D^5 missing"))?);
            ensure!(apply_tp(d5, 5).agree(ctx.d()), "T_5(D^5) != D");
            ensure!(apply_tp(d5, 11).is_zero(), "T_11(D^5) != 0");
        }
        Level::Five => {
            let d11 = m
                .w
                .gen(m.w.label_index(Label::K(11)).ok_or_else(|| anyhow!("D_11 missing"))?);
            ensure!(apply_tp(d11, 13).is_zero(), "T_13(D_11) != 0");
            ensure!(apply_tp(d11, 11).val() == Some(1), "T_11(D_11) != x + ...");
        }
        Level::One => bail!("no W at level 1"),
    }
    Ok(())
}

pub fn embedding(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let ctx = &m.ctx;
    let l = ctx.ell().unwrap();
    ensure!(
        m.sub.contains(&ctx.f),
        "F is not in the V kernel subchunk"
    );
    // pr images of kernel elements can involve D_k beyond the chunk cutoff
    // (observed at level 5), so decompose in an enlarged W chunk.
    let wide = w_chunk(ctx, 7 * cfg.chunk + 6).map_err(|e| anyhow!("enlarged W chunk: {e:?}"))?;
    let dsel = wide
        .decompose(ctx.d())
        .map_err(|e| anyhow!("D decomposition in W: {e:?}"))?;
    let didx = wide.label_index(Label::K(1)).unwrap();
    ensure!(
        bits::iter_ones(&dsel).collect::<Vec<_>>() == vec![didx],
        "pr(F) != D in the W chunk"
    );
    for gi in 0..m.sub.len() {
        let f = m.sub.gen(gi);
        let tr = m
            .modd
            .trace(f)
            .map_err(|e| anyhow!("trace(kernel gen {gi}): {e:?}"))?;
        ensure!(tr.is_zero(), "kernel generator {gi} is outside N2");
        let (img, _sel) = pr_to_w(ctx, &wide, &m.n1, f)
            .map_err(|e| anyhow!("pr of kernel gen {gi}: {e:?}"))?;
        for &p in ctx.primes.s() {
            let lhs = apply_tp(f, p as usize).drop_multiples(l);
            let rhs = apply_tp(&img, p as usize);
            ensure!(
                lhs.agree(&rhs),
                "pr does not commute with T_{p} on kernel generator {gi}"
            );
        }
    }
    Ok(())
}

pub fn w_surjectivity(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let ctx = &m.ctx;
    let wide = w_chunk(ctx, 7 * cfg.chunk + 6).map_err(|e| anyhow!("enlarged W chunk: {e:?}"))?;
    let pc = contracted_prec(ctx.n, 7);
    let cols: Vec<Vec<u64>> = (0..wide.len())
        .map(|i| {
            Ok(apply_tp(wide.gen(i), 7)
                .truncate(pc)
                .map_err(|e| anyhow!("{e:?}"))?
                .words()
                .to_vec())
        })
        .collect::<Result<_>>()?;
    for i in 0..m.w.len() {
        let rhs = m
            .w
            .gen(i)
            .truncate(pc)
            .map_err(|e| anyhow!("{e:?}"))?
            .words()
            .to_vec();
        ensure!(
            solve_columns(&cols, pc, &rhs).is_some(),
            "W generator {i} has no T_7 preimage in the enlarged chunk"
        );
    }
    Ok(())
}

pub fn v_divisibility(cfg: &RunConfig, m1: &MadicL1) -> Result<()> {
    let ctx = &m1.ctx;
    for p in [3u32, 5] {
        let wide = v_chunk(ctx, p * cfg.chunk + 6).map_err(|e| anyhow!("enlarged V chunk: {e:?}"))?;
        let pc = contracted_prec(ctx.n, p as usize);
        let cols: Vec<Vec<u64>> = (0..wide.len())
            .map(|i| {
                Ok(apply_tp(wide.gen(i), p as usize)
                    .truncate(pc)
                    .map_err(|e| anyhow!("{e:?}"))?
                    .words()
                    .to_vec())
            })
            .collect::<Result<_>>()?;
        for i in 0..m1.v.len() {
            let rhs = m1
                .v
                .gen(i)
                .truncate(pc)
                .map_err(|e| anyhow!("{e:?}"))?
                .words()
                .to_vec();
            ensure!(
                solve_columns(&cols, pc, &rhs).is_some(),
                "V generator {i} has no T_{p} preimage in the enlarged chunk"
            );
        }
    }
    Ok(())
}

pub fn nilpotency(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let bound = 2 * cfg.chunk as usize;
    for &p in m.ctx.primes.s() {
        for gi in 0..m.act_m.dim {
            let mut v = bits::zero_vec(m.act_m.dim);
            bits::set(&mut v, gi);
            m.act_m
                .nilpotency_index(p, &v, bound)
                .map_err(|e| anyhow!("M(odd) generator {gi}, p={p}: {e:?}"))?;
        }
    }
    Ok(())
}

pub fn nilpotency_l1(cfg: &RunConfig, m1: &MadicL1) -> Result<()> {
    let bound = 2 * cfg.chunk as usize;
    for p in [3u32, 5] {
        for gi in 0..m1.act_v.dim {
            let mut v = bits::zero_vec(m1.act_v.dim);
            bits::set(&mut v, gi);
            m1.act_v
                .nilpotency_index(p, &v, bound)
                .map_err(|e| anyhow!("V generator {gi}, p={p}: {e:?}"))?;
        }
    }
    Ok(())
}

pub fn solve_u(cfg: &RunConfig, m: &Madic) -> Result<()> {
    for &p in m.ctx.primes.s() {
        m.sol_m
            .solve_u(&m.act_m, p, cfg.mdeg)
            .map_err(|e| anyhow!("no u with T_{p} = u on M(odd): {e:?}"))?;
    }
    Ok(())
}

pub fn solve_u_l1(cfg: &RunConfig, m1: &MadicL1) -> Result<()> {
    let expected: &[(u32, &[u32])] = &[(7, &[3, 5]), (11, &[3]), (13, &[5])];
    for &(p, mono) in expected {
        let (_, u_d) = m1
            .sol_v
            .solve_u(&m1.act_v, p, cfg.mdeg)
            .map_err(|e| anyhow!("no u with T_{p} = u on V: {e:?}"))?;
        let want = TSeries::monomial(u_d.ambient(), mono).map_err(|e| anyhow!("{e:?}"))?;
        let lf = u_d
            .leading_form()
            .map(|(_, lf)| lf)
            .ok_or_else(|| anyhow!("u for p={p} is zero"))?;
        ensure!(lf == want, "u for p={p} has leading form {lf}, wanted {want}");
    }
    for p in [3u32, 5] {
        let (u_full, _) = m1
            .sol_v
            .solve_u(&m1.act_v, p, cfg.mdeg)
            .map_err(|e| anyhow!("no u with T_{p} = u on V: {e:?}"))?;
        let tp = TSeries::var(u_full.ambient(), p);
        let diff = u_full.add(&tp).map_err(|e| anyhow!("{e:?}"))?;
        for gi in 0..m1.act_v.dim {
            let mut v = bits::zero_vec(m1.act_v.dim);
            bits::set(&mut v, gi);
            ensure!(
                bits::is_zero(&theta::apply_coeffs(&m1.act_v, &diff, &v)),
                "u for p={p} differs from t_{p} by a non-annihilator"
            );
        }
    }
    Ok(())
}

pub fn u_consistency(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let nbits = m.ann_v.amb.len();
    let mut span_gens: Vec<Vec<u64>> = m
        .ann_v
        .basis
        .iter()
        .map(|t| t.coeff_bits().to_vec())
        .collect();
    span_gens.extend(m.ann_w.basis.iter().map(|t| t.coeff_bits().to_vec()));
    let sum_ideal = echelon_span(&span_gens, nbits);
    for &p in m.ctx.primes.s() {
        let u_v = m
            .sol_v
            .solve_u(&m.act_v, p, cfg.mdeg)
            .map_err(|e| anyhow!("u on V for p={p}: {e:?}"))?
            .1;
        let u_w = m
            .sol_w
            .solve_u(&m.act_w, p, cfg.mdeg)
            .map_err(|e| anyhow!("u on W for p={p}: {e:?}"))?
            .1;
        let diff = u_v.add(&u_w).map_err(|e| anyhow!("{e:?}"))?;
        ensure!(
            in_span(diff.coeff_bits(), &sum_ideal),
            "u_V and u_W for p={p} disagree modulo ann(V)+ann(W)"
        );
    }
    Ok(())
}

pub fn lambda_epsilon(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let consts = cfg.level_constants().unwrap();
    let amb = m.lam_d.ambient();
    let want_lam = TSeries::var(amb, consts.vars2[0])
        .add(&TSeries::var(amb, consts.vars2[1]))
        .map_err(|e| anyhow!("{e:?}"))?;
    let lf = m
        .lam_d
        .leading_form()
        .map(|(_, lf)| lf)
        .ok_or_else(|| anyhow!("lambda is zero"))?;
    ensure!(
        lf == want_lam,
        "lambda has leading form {lf}, wanted {want_lam}"
    );
    let eamb = m.eps.ambient();
    let mut want_eps = TSeries::var(eamb, consts.q_lambda);
    for p in consts.vars2 {
        want_eps = want_eps
            .add(&TSeries::var(eamb, p))
            .map_err(|e| anyhow!("{e:?}"))?;
    }
    let elf = m
        .eps
        .leading_form()
        .map(|(_, lf)| lf)
        .ok_or_else(|| anyhow!("epsilon is zero"))?;
    ensure!(
        elf == want_eps,
        "epsilon has leading form {elf}, wanted {want_eps}"
    );
    Ok(())
}

pub fn annihilator_forms(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let consts = cfg.level_constants().unwrap();
    let amb2 = &m.ann_v2.amb;
    let mut a_form = TSeries::zero(amb2);
    for p in consts.a_primes {
        a_form = a_form
            .add(&TSeries::var(amb2, p))
            .map_err(|e| anyhow!("{e:?}"))?;
    }
    let b_form = TSeries::var(amb2, consts.b_prime);
    let expected = echelon_span(
        &[a_form.coeff_bits().to_vec(), b_form.coeff_bits().to_vec()],
        amb2.len(),
    );
    let actual = echelon_span(
        &m.ann_v2
            .basis
            .iter()
            .map(|t| t.coeff_bits().to_vec())
            .collect::<Vec<_>>(),
        amb2.len(),
    );
    ensure!(
        expected == actual,
        "ann(V) mod m^2 span mismatch: {} elements vs {} expected",
        actual.len(),
        expected.len()
    );
    let wamb = &m.ann_w2.amb;
    let c_form = TSeries::var(wamb, consts.c_prime);
    ensure!(
        m.ann_w2.contains(&c_form),
        "ann(W) mod m^2 does not contain t{}",
        consts.c_prime
    );
    Ok(())
}

pub fn ideal_structure(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let consts = cfg.level_constants().unwrap();
    let amb = m.gens.a.ambient();
    let mut a_lf = TSeries::zero(amb);
    for p in consts.a_primes {
        a_lf = a_lf
            .add(&TSeries::var(amb, p))
            .map_err(|e| anyhow!("{e:?}"))?;
    }
    let b_lf = TSeries::var(amb, consts.b_prime);
    let c_lf = TSeries::var(amb, consts.c_prime);
    let clauses = verify_ideal_structure(&m.gens, &m.ann_m, &m.ann_sub, &a_lf, &b_lf, &c_lf)
        .map_err(|e| anyhow!("{e:?}"))?;
    let failed: Vec<String> = clauses
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {}", c.name, c.witness))
        .collect();
    ensure!(failed.is_empty(), "failed clauses: {}", failed.join("; "));
    Ok(())
}

pub fn mutation_control(cfg: &RunConfig, m: &Madic) -> Result<()> {
    let consts = cfg.level_constants().unwrap();
    let detected = theta::mutation_control(&m.gens, &m.ann_m, consts.b_prime)
        .map_err(|e| anyhow!("{e:?}"))?;
    ensure!(
        detected,
        "perturbing A by t{} was not detected by the A^2 clause",
        consts.b_prime
    );
    Ok(())
}
