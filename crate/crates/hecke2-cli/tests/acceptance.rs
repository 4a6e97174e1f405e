//! Acceptance gate: the twelve criteria, each as one test emitting a single
//! pass/fail line. Sessions are built once and shared across criteria.

use std::process::Command;
use std::sync::OnceLock;

use anyhow::{anyhow, ensure, Result};
use hecke2_cli::{cache, checks, session};
use hecke2_core::hecke::{apply_tp, Level};
use hecke2_core::oracle::DenseSeries;
use hecke2_core::series::BitSeries;
use hecke2_core::spaces::{build_context, LevelContext};
use hecke2_core::{bits, theta};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use session::{build_kernel_ctx, build_madic, build_madic_l1, Madic, MadicL1, RunConfig};

fn cfg(level: Level) -> RunConfig {
    RunConfig {
        level,
        prec: session::default_prec(63, 3),
        mdeg: 3,
        chunk: 63,
        cache_dir: None,
    }
}

fn m3() -> &'static Madic {
    static M: OnceLock<Madic> = OnceLock::new();
    M.get_or_init(|| build_madic(&cfg(Level::Three)).expect("level 3 session"))
}

fn m5() -> &'static Madic {
    static M: OnceLock<Madic> = OnceLock::new();
    M.get_or_init(|| build_madic(&cfg(Level::Five)).expect("level 5 session"))
}

fn m1() -> &'static MadicL1 {
    static M: OnceLock<MadicL1> = OnceLock::new();
    M.get_or_init(|| build_madic_l1(&cfg(Level::One)).expect("level 1 session"))
}

fn k3() -> &'static LevelContext {
    static K: OnceLock<LevelContext> = OnceLock::new();
    K.get_or_init(|| build_kernel_ctx(&cfg(Level::Three)).expect("level 3 kernel tier"))
}

fn k5() -> &'static LevelContext {
    static K: OnceLock<LevelContext> = OnceLock::new();
    K.get_or_init(|| build_kernel_ctx(&cfg(Level::Five)).expect("level 5 kernel tier"))
}

fn report(num: u32, desc: &str, result: Result<()>) {
    match result {
        Ok(()) => println!("criterion {num:02} {desc}: PASS"),
        Err(e) => {
            println!("criterion {num:02} {desc}: FAIL ({e:#})");
            panic!("criterion {num:02} {desc} failed: {e:#}");
        }
    }
}

#[test]
fn criterion_01_kernel_identities() {
    let run = || -> Result<()> {
        checks::kernel_identities(k3())?;
        checks::kernel_identities(k5())?;
        Ok(())
    };
    report(1, "kernel identities below x^4096 / x^2048", run());
}

#[test]
fn criterion_02_trace_table_and_conjugate_sum() {
    let run = || -> Result<()> {
        checks::trace_table(m3())?;
        checks::trace_table(m5())?;
        checks::conjugate_sum(m3())?;
        checks::conjugate_sum(m5())?;
        Ok(())
    };
    report(2, "trace table and conjugate-sum cross-check (odd k <= 25)", run());
}

#[test]
fn criterion_03_composite_isomorphism() {
    let run = || -> Result<()> {
        checks::composite_iso(m3())?;
        checks::composite_iso(m5())?;
        Ok(())
    };
    report(3, "U_l(trace(F^k)) = T_l(F^k) for odd k <= 49", run());
}

#[test]
fn criterion_04_filtration_stability() {
    let run = || -> Result<()> {
        checks::filtration(m3())?;
        checks::filtration(m5())?;
        Ok(())
    };
    report(4, "T_p stabilizes N1 and N2 on K=63 chunks", run());
}

#[test]
fn criterion_05_w_splitting() {
    let run = || -> Result<()> {
        checks::w_crossing(m3())?;
        checks::w_crossing(m5())?;
        Ok(())
    };
    report(5, "W splitting with crossing rules and witnesses", run());
}

#[test]
fn criterion_06_level1_u_expressions() {
    let run = || checks::solve_u_l1(&cfg(Level::One), m1());
    report(6, "level-1 u leading forms t3, t5, t3*t5", run());
}

#[test]
fn criterion_07_lambda_epsilon() {
    let run = || -> Result<()> {
        for m in [m3(), m5()] {
            checks::lambda_epsilon(&cfg(m.ctx.level), m)?;
            // epsilon^2 annihilates every W-chunk generator, re-checked here
            // directly on the coefficient action.
            let eps2 = m.eps.mul(&m.eps).map_err(|e| anyhow!("{e:?}"))?;
            for gi in 0..m.act_w.dim {
                let mut e = bits::zero_vec(m.act_w.dim);
                bits::set(&mut e, gi);
                ensure!(
                    bits::is_zero(&theta::apply_coeffs(&m.act_w, &eps2, &e)),
                    "epsilon^2 misses W generator {gi} at level {}",
                    m.ctx.level.as_u32()
                );
            }
        }
        Ok(())
    };
    report(7, "lambda leading forms and epsilon^2 kills W", run());
}

#[test]
fn criterion_08_annihilator_leading_forms() {
    let run = || -> Result<()> {
        checks::annihilator_forms(&cfg(Level::Three), m3())?;
        checks::annihilator_forms(&cfg(Level::Five), m5())?;
        Ok(())
    };
    report(8, "annihilator leading-form spans mod m^2", run());
}

#[test]
fn criterion_09_ideal_structure() {
    let run = || -> Result<()> {
        checks::ideal_structure(&cfg(Level::Three), m3())?;
        checks::ideal_structure(&cfg(Level::Five), m5())?;
        Ok(())
    };
    report(9, "ideal (A^2, AC, BC) equals the chunk annihilator", run());
}

#[test]
fn criterion_10_nilpotence_sweep() {
    let run = || -> Result<()> {
        checks::nilpotency(&cfg(Level::Three), m3())?;
        checks::nilpotency(&cfg(Level::Five), m5())?;
        Ok(())
    };
    report(10, "finite nilpotency index for all M(odd) generators", run());
}

#[test]
fn criterion_11_property_suites() {
    let run = || -> Result<()> {
        let primes = [3usize, 5, 7, 11, 13];
        let mut rng = StdRng::seed_from_u64(0x616363);
        let random_series = |rng: &mut StdRng, prec: usize| {
            let density = rng.gen_range(0.02..0.5);
            BitSeries::from_exponents((0..prec).filter(|_| rng.gen_bool(density)), prec)
        };
        for case in 0..1000 {
            let na = rng.gen_range(1..1200);
            let nb = rng.gen_range(1..1200);
            let a = random_series(&mut rng, na);
            let b = random_series(&mut rng, nb);
            let fast = a.mul(&b);
            let slow = DenseSeries::from_bits(&a)
                .map_err(|e| anyhow!("{e:?}"))?
                .mul(&DenseSeries::from_bits(&b).map_err(|e| anyhow!("{e:?}"))?);
            ensure!(
                fast.prec() == slow.prec() && fast.agree(&slow.to_bits()),
                "mul oracle mismatch, case {case}"
            );
        }
        for case in 0..1000 {
            let p = primes[case % primes.len()];
            let nf = rng.gen_range(p..4000);
            let f = random_series(&mut rng, nf);
            let fast = apply_tp(&f, p);
            let slow = DenseSeries::from_bits(&f).map_err(|e| anyhow!("{e:?}"))?.tp(p);
            ensure!(
                fast.prec() == slow.prec() && fast.agree(&slow.to_bits()),
                "T_{p} oracle mismatch, case {case}"
            );
        }
        for case in 0..200 {
            let p = primes[case % primes.len()];
            let q = primes[(case / primes.len()) % primes.len()];
            let nf = rng.gen_range(500..4000);
            let f = random_series(&mut rng, nf);
            ensure!(
                apply_tp(&apply_tp(&f, p), q).agree(&apply_tp(&apply_tp(&f, q), p)),
                "T_{p} and T_{q} do not commute, case {case}"
            );
        }
        // Doubled-N soundness on the real kernel series.
        for level in [Level::Three, Level::Five] {
            let lo = build_context(level, 2048).map_err(|e| anyhow!("{e}"))?;
            let hi = build_context(level, 4096).map_err(|e| anyhow!("{e}"))?;
            ensure!(lo.f.agree(&hi.f), "F changes with precision");
            ensure!(lo.g().agree(hi.g()), "G changes with precision");
            ensure!(lo.d().agree(hi.d()), "D changes with precision");
            for p in primes {
                ensure!(
                    apply_tp(&lo.f, p).agree(&apply_tp(&hi.f, p)),
                    "T_{p}(F) changes with precision"
                );
            }
        }
        Ok(())
    };
    report(11, "oracle equivalence, commutativity, doubled-N soundness", run());
}

#[test]
fn criterion_12_negative_controls() {
    let run = || -> Result<()> {
        // Perturbed A must be caught by the A^2 clause.
        ensure!(
            theta::mutation_control(&m3().gens, &m3().ann_m, 7).map_err(|e| anyhow!("{e:?}"))?,
            "perturbed A undetected at level 3"
        );
        ensure!(
            theta::mutation_control(&m5().gens, &m5().ann_m, 7).map_err(|e| anyhow!("{e:?}"))?,
            "perturbed A undetected at level 5"
        );
        // A corrupted cache file must turn into a failing check (exit 1).
        let bin = env!("CARGO_BIN_EXE_hecke2");
        let dir = tempfile::tempdir()?;
        let args = [
            "verify",
            "--level",
            "3",
            "--checks",
            "kernel_identities",
            "--cache-dir",
        ];
        let ok = Command::new(bin)
            .args(args)
            .arg(dir.path())
            .output()?;
        ensure!(
            ok.status.code() == Some(0),
            "clean run failed: {}",
            String::from_utf8_lossy(&ok.stdout)
        );
        let path = cache::series_path(dir.path(), "theta_f", session::KERNEL_TIER_PREC);
        let mut data = std::fs::read(&path)?;
        data[24 + 100] ^= 0x10;
        std::fs::write(&path, &data)?;
        let bad = Command::new(bin)
            .args(args)
            .arg(dir.path())
            .output()?;
        ensure!(
            bad.status.code() == Some(1),
            "corrupted cache exited {:?}, wanted 1; output: {}",
            bad.status.code(),
            String::from_utf8_lossy(&bad.stdout)
        );
        ensure!(
            String::from_utf8_lossy(&bad.stdout).contains("FAIL"),
            "corrupted cache did not report a failing check"
        );
        Ok(())
    };
    report(12, "negative controls fail as documented", run());
}
