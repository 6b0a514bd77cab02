//! `weil`: reports and verification suites for the finite Weil representation.
//!
//! Exit status is 0 when every asserted identity holds, 2 when one fails (a replayable
//! counterexample is written), and 1 on usage or input errors.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use weil_core::bundle::KernelSign;

pub const THREADS_ENV: &str = "WEIL_THREADS";

#[derive(Parser, Debug)]
#[command(name = "weil", version, about = "Weil representation of Sp(2m, F_q) by contraction of the lagrangian bundle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Canonical list of lagrangians.
    Lagrangians,
    /// Geometric, reduced and classical Gauss sums side by side.
    GaussTable,
    /// Connection laws, fiber membership and equivariance.
    ConnectionVerify,
    /// Operator cocycle against the Gauss phase.
    CocycleTable,
    /// Character values of the Weil representation.
    Character,
    /// Restriction to SL(n) through exterior powers.
    SlReport,
    /// Every verification suite.
    VerifyAll,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Field order; `sl-report` accepts a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',', default_value = "3")]
    pub q: Vec<u64>,
    /// Half the dimension of W.
    #[arg(long, global = true, default_value_t = 1)]
    pub m: usize,
    /// Dimension of V for `sl-report`.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,
    /// Element index `a` of the character `x ↦ ψ(a x)`.
    #[arg(long, global = true, default_value_t = 1)]
    pub psi_scale: u32,
    /// Base point `a;b` with rows separated by `/` and entries by `,` (element indices).
    #[arg(long, global = true)]
    pub base_point: Option<String>,
    /// Case budget per suite; exhaustive when the full set fits.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Where to write a counterexample (default: next to `--out`, else stderr).
    #[arg(long, global = true)]
    pub counterexample: Option<PathBuf>,
    /// Re-check a stored counterexample instead of running suites.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,
    /// Worker threads (overrides the WEIL_THREADS environment variable).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Sign in the connection kernel.
    #[arg(long, global = true, value_enum, default_value = "minus")]
    pub kernel_sign: SignArg,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignArg {
    Minus,
    Plus,
}

impl From<SignArg> for KernelSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Minus => KernelSign::Minus,
            SignArg::Plus => KernelSign::Plus,
        }
    }
}

/// What a command produced.
pub struct Output {
    pub body: Body,
    pub failed: bool,
    /// The failing case, already serialized.
    pub counterexample: Option<String>,
}

pub enum Body {
    Json(serde_json::Value),
    Csv(Vec<u8>),
}

impl Output {
    pub fn json<T: Serialize>(value: &T) -> anyhow::Result<Self> {
        Ok(Output { body: Body::Json(serde_json::to_value(value)?), failed: false, counterexample: None })
    }
}

fn configure_threads(common: &Common) -> anyhow::Result<()> {
    let threads = match common.threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer"))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    Ok(())
}

fn emit(common: &Common, out: Output) -> anyhow::Result<bool> {
    let bytes = match out.body {
        Body::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s.into_bytes()
        }
        Body::Csv(b) => b,
    };
    match &common.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    if !out.failed {
        return Ok(true);
    }
    let Some(cx) = out.counterexample else {
        return Ok(false);
    };
    let target = common.counterexample.clone().or_else(|| {
        common.out.as_ref().map(|o| {
            let mut name = o.file_name().unwrap_or_default().to_os_string();
            name.push(".counterexample.json");
            o.with_file_name(name)
        })
    });
    match target {
        Some(path) => {
            std::fs::write(&path, cx + "\n")?;
            eprintln!("identity failed; counterexample written to {}", path.display());
        }
        None => eprintln!("identity failed; counterexample:\n{cx}"),
    }
    Ok(false)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = || -> anyhow::Result<bool> {
        configure_threads(&cli.common)?;
        let out = commands::run(cli.command, &cli.common)?;
        emit(&cli.common, out)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
