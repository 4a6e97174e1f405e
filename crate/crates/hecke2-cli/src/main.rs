use hecke2_cli::{checks, report, session};

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use hecke2_core::bits;
use hecke2_core::hecke::Level;
use hecke2_core::spaces::Label;

use report::{ConfigEcho, Report};
use session::RunConfig;

#[derive(Parser)]
#[command(name = "hecke2", version, about = "Verifier for mod-2 Hecke operator identities on theta series")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the verification checklist and emit a report.
    Verify(CommonArgs),
    /// Print the operator-algebra element u with T_p = u on the level's space.
    Express {
        #[command(flatten)]
        common: CommonArgs,
        /// Prime to express.
        #[arg(long)]
        p: u32,
    },
    /// Print the nilpotency index table of T_p on the chunk generators.
    Nilpotency {
        #[command(flatten)]
        common: CommonArgs,
        /// Operator prime.
        #[arg(long)]
        p: u32,
        /// Iteration bound.
        #[arg(long, default_value_t = 256)]
        kmax: usize,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Level: 1, 3 or 5.
    #[arg(long, default_value_t = 3)]
    level: u32,
    /// Base x-adic precision of the m-adic tier (default chunk * 13^mdeg).
    #[arg(long)]
    prec: Option<usize>,
    /// m-adic truncation degree d (work in O/m^d).
    #[arg(long, default_value_t = 3)]
    mdeg: usize,
    /// Chunk cutoff K (max generator leading degree).
    #[arg(long, default_value_t = 63)]
    chunk: u32,
    /// Comma-separated check names (verify only; default all applicable).
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Series cache directory (fallback: HECKE2_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

impl CommonArgs {
    fn config(&self) -> Result<RunConfig> {
        let level = Level::from_u32(self.level)
            .ok_or_else(|| anyhow!("config error: --level must be 1, 3 or 5"))?;
        if self.format != "text" && self.format != "json" {
            bail!("config error: --format must be text or json");
        }
        let cache_dir = self
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os("HECKE2_CACHE_DIR").map(PathBuf::from));
        let cfg = RunConfig {
            level,
            prec: self
                .prec
                .unwrap_or_else(|| session::default_prec(self.chunk, self.mdeg)),
            mdeg: self.mdeg,
            chunk: self.chunk,
            cache_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Verify(common) => {
            let cfg = common.config()?;
            let records = checks::run(&cfg, common.checks.as_deref())?;
            let echo = ConfigEcho {
                level: cfg.level.as_u32(),
                prec: cfg.prec,
                mdeg: cfg.mdeg,
                chunk: cfg.chunk,
                checks: common
                    .checks
                    .clone()
                    .unwrap_or_else(|| checks::applicable(cfg.level).iter().map(|s| s.to_string()).collect()),
                cache_dir: cfg.cache_dir.as_ref().map(|p| p.display().to_string()),
                format: common.format.clone(),
            };
            let report = Report::assemble(echo, records);
            if common.format == "json" {
                println!("{}", report.render_json());
            } else {
                print!("{}", report.render_text());
            }
            Ok(report.exit_code() as u8)
        }
        Cmd::Express { common, p } => {
            let cfg = common.config()?;
            cmd_express(&cfg, p)?;
            Ok(0)
        }
        Cmd::Nilpotency { common, p, kmax } => {
            let cfg = common.config()?;
            cmd_nilpotency(&cfg, p, kmax)?;
            Ok(0)
        }
    }
}

fn cmd_express(cfg: &RunConfig, p: u32) -> Result<()> {
    let s: Vec<u32> = match cfg.level {
        Level::One => vec![3, 5],
        Level::Three => vec![5, 7, 11, 13],
        Level::Five => vec![3, 7, 11, 13],
    };
    if s.contains(&p) {
        // t_p acts as T_p by definition; any other representative differs
        // by an annihilator element.
        println!("u = t{p}");
        println!("leading form: t{p}");
        return Ok(());
    }
    if cfg.level != Level::One {
        bail!(
            "config error: T_{p} is not in the operator algebra at level {}",
            cfg.level.as_u32()
        );
    }
    if ![7u32, 11, 13].contains(&p) {
        bail!("config error: p must be one of 3, 5, 7, 11, 13 at level 1");
    }
    let m1 = session::build_madic_l1(cfg)?;
    let (_, u_d) = m1
        .sol_v
        .solve_u(&m1.act_v, p, cfg.mdeg)
        .map_err(|e| anyhow!("solve_u failed: {e:?}"))?;
    println!("u = {u_d}");
    match u_d.leading_form() {
        Some((_, lf)) => println!("leading form: {lf}"),
        None => println!("leading form: 0"),
    }
    Ok(())
}

fn label_name(level: Level, lab: Label) -> String {
    match (level, lab) {
        (Level::One, Label::K(k)) => format!("F^{k}"),
        (_, Label::K(k)) => format!("D_{k}"),
        (_, Label::IJ(i, j)) => format!("F^{i}G^{j}"),
    }
}

fn cmd_nilpotency(cfg: &RunConfig, p: u32, kmax: usize) -> Result<()> {
    match cfg.level {
        Level::One => {
            if ![3u32, 5, 7, 11, 13].contains(&p) {
                bail!("config error: p must be one of 3, 5, 7, 11, 13 at level 1");
            }
            let m1 = session::build_madic_l1(cfg)?;
            for (i, &lab) in m1.v.labels.iter().enumerate() {
                let mut v = bits::zero_vec(m1.act_v.dim);
                bits::set(&mut v, i);
                let e = m1
                    .act_v
                    .nilpotency_index(p, &v, kmax)
                    .map_err(|e| anyhow!("{}: {e:?}", label_name(cfg.level, lab)))?;
                println!("{:<10} {}", label_name(cfg.level, lab), e);
            }
        }
        _ => {
            let m = session::build_madic(cfg)?;
            if !m.ctx.primes.s().contains(&p) {
                bail!(
                    "config error: p must be in the level's prime set {:?}",
                    m.ctx.primes.s()
                );
            }
            for (i, &lab) in m.modd.chunk.labels.iter().enumerate() {
                let mut v = bits::zero_vec(m.act_m.dim);
                bits::set(&mut v, i);
                let e = m
                    .act_m
                    .nilpotency_index(p, &v, kmax)
                    .map_err(|e| anyhow!("{}: {e:?}", label_name(cfg.level, lab)))?;
                println!("{:<10} {}", label_name(cfg.level, lab), e);
            }
        }
    }
    Ok(())
}
