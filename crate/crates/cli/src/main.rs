use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use sigchange_cli::{execute, Command, RunConfig};

#[derive(Parser)]
#[command(name = "sigchange", version, about = "Signature-changing metrics on 2D charts")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the metric on a grid (CSV) and optionally draw its cone field (SVG).
    Field(Flags),
    /// Run the full check suite and write a JSON verdict bundle.
    Verify(Flags),
    /// Integrate one geodesic from `--init t,x,vt,vx`.
    Geodesic(Flags),
    /// Classify the radical along the degeneracy locus.
    Radical(Flags),
    /// Launch an ensemble of causal curves from a stripe of the rotating metric.
    Trap(Flags),
    /// Compare the metric across the seams of the chosen topology.
    Seam(Flags),
}

/// Every configuration key, available on every subcommand. Flags override `--config`.
#[derive(Args, Default)]
struct Flags {
    /// key = value file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// flat | rotating | crosscap | transformed
    #[arg(long)]
    model: Option<String>,
    /// base metric of a transformed model
    #[arg(long)]
    base: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    angle_rate: Option<String>,
    /// prescription scalar, e.g. "t^2 + x^2"
    #[arg(long)]
    f: Option<String>,
    /// vector field components "vt, vx"
    #[arg(long = "V", allow_hyphen_values = true)]
    v: Option<String>,
    /// plane | mobius-inf | mobius-compact | rp2
    #[arg(long)]
    topology: Option<String>,
    /// tmin,tmax,xmin,xmax
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    svg: Option<String>,
    /// geodesic status and seam events (JSON)
    #[arg(long)]
    seams: Option<String>,
    #[arg(long)]
    tol_deg: Option<String>,
    #[arg(long)]
    tol_tangent: Option<String>,
    #[arg(long)]
    tol_grad: Option<String>,
    #[arg(long)]
    dlambda: Option<String>,
    #[arg(long)]
    lambda_max: Option<String>,
    /// geodesic norm drift that ends a trace, or "off"
    #[arg(long)]
    norm_guard: Option<String>,
    /// t,x,vt,vx
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    stripe: Option<String>,
    #[arg(long)]
    curves: Option<String>,
    /// timelike | null | spacelike
    #[arg(long)]
    kind: Option<String>,
    /// geodesics | polylines | both
    #[arg(long)]
    mix: Option<String>,
    /// seam comparison order, 0 or 1 (both when omitted)
    #[arg(long)]
    order: Option<String>,
    /// samples per seam
    #[arg(long)]
    samples: Option<String>,
}

impl Flags {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let pairs: [(&str, &Option<String>); 25] = [
            ("model", &self.model),
            ("base", &self.base),
            ("angle-rate", &self.angle_rate),
            ("f", &self.f),
            ("V", &self.v),
            ("topology", &self.topology),
            ("window", &self.window),
            ("grid", &self.grid),
            ("seed", &self.seed),
            ("out", &self.out),
            ("svg", &self.svg),
            ("seams", &self.seams),
            ("tol-deg", &self.tol_deg),
            ("tol-tangent", &self.tol_tangent),
            ("tol-grad", &self.tol_grad),
            ("dlambda", &self.dlambda),
            ("lambda-max", &self.lambda_max),
            ("norm-guard", &self.norm_guard),
            ("init", &self.init),
            ("stripe", &self.stripe),
            ("curves", &self.curves),
            ("kind", &self.kind),
            ("mix", &self.mix),
            ("order", &self.order),
            ("samples", &self.samples),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<i32> {
    let (cmd, flags) = match cli.command {
        Cmd::Field(f) => (Command::Field, f),
        Cmd::Verify(f) => (Command::Verify, f),
        Cmd::Geodesic(f) => (Command::Geodesic, f),
        Cmd::Radical(f) => (Command::Radical, f),
        Cmd::Trap(f) => (Command::Trap, f),
        Cmd::Seam(f) => (Command::Seam, f),
    };
    let cfg = flags.config()?;
    let art = execute(cmd, &cfg)?;
    art.write()?;
    for n in &art.notes {
        eprintln!("{n}");
    }
    Ok(art.exit_code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
