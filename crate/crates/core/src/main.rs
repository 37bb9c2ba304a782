use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use renorm_lab::circle_map::closest_returns;
use renorm_lab::commuting_pair::{k_control, pair_rotation_digits, pair_to_json};
use renorm_lab::experiments::{run_named, solve_all, solve_map, ExperimentConfig, OutputFormat};
use renorm_lab::numerics::Scalar;
use renorm_lab::Result;

#[derive(Parser, Debug)]
#[command(name = "renorm-lab", version, about = "Renormalization experiments for critical circle maps")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in bits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Renormalization depth.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Metric grid points per side.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continued-fraction digits of the first family at a given parameter.
    Rotnum {
        /// Parameter value (decimal or p/q).
        #[arg(long)]
        omega: String,
        /// Number of digits.
        #[arg(long, default_value_t = 12)]
        levels: usize,
    },
    /// Solve every configured family for the target rotation number.
    Solve,
    /// Extract, validate and optionally save the pair of a level.
    Pair {
        /// Level.
        #[arg(long)]
        level: usize,
        /// File receiving the serialized pair.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Periods and K-control along the renormalization orbit of the first family.
    RenormOrbit,
    /// Distances between renormalizations of two maps.
    Converge,
    /// Fundamental-domain geometry for a large digit.
    Yoccoz {
        /// The large digit (defaults to the configured one).
        #[arg(long)]
        digit: Option<u64>,
    },
    /// Parameter derivative of the renormalized boundary point.
    Expand,
    /// Synchronization profile of two pairs.
    Sync,
    /// Lipschitz ratios of renormalization.
    Lipschitz,
    /// Ratio-discrepancy decay of dynamical partitions.
    Rigidity,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = cli.precision {
        cfg.precision_bits = p;
    }
    if let Some(d) = cli.depth {
        cfg.depth = d;
    }
    if let Some(g) = cli.grid {
        cfg.grid_size = g;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.check()?;
    Ok(cfg)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let prec = cfg.precision_bits;
    match &cli.command {
        Command::Rotnum { omega, levels } => {
            let family = cfg.families[0].build(prec)?;
            let map = renorm_lab::circle_map::CircleMapLift::new(family, Scalar::parse(omega, prec)?);
            let cf = closest_returns(&map, *levels, cfg.max_iterations)?;
            print_json(&json!({ "digits": cf.digits, "convergents": cf.convergents, "truncated": cf.truncated }));
        }
        Command::Solve => {
            let target = cfg.target.digits();
            let maps = solve_all(&cfg.families, &target, cfg.depth, &cfg)?;
            let out: Vec<_> = maps
                .iter()
                .map(|m| {
                    json!({
                        "family": m.spec,
                        "omega": m.solve.omega.to_decimal_string(),
                        "achieved_depth": m.solve.achieved_depth,
                        "refined": m.solve.refined,
                        "digits": m.solve.cf.digits,
                        "birkhoff_residual": m.solve.birkhoff_residual.to_sci_string(6),
                        "birkhoff_bound": m.solve.birkhoff_bound.to_sci_string(6),
                    })
                })
                .collect();
            print_json(&json!(out));
        }
        Command::Pair { level, save } => {
            let sm = solve_map(&cfg.families[0], &cfg.target.digits(), level + 2 + cfg.solve_margin, &cfg)?;
            let pair = sm.pair(*level)?;
            let report = pair.validation_report();
            let period = pair.period()?;
            if let Some(path) = save {
                std::fs::write(path, pair_to_json(&pair)?)?;
            }
            print_json(&json!({
                "level": level,
                "period": format!("{period:?}"),
                "eta0": pair.eta0().to_sci_string(20),
                "xi0": pair.xi0().to_sci_string(20),
                "valid": report.ok(),
                "clauses": report.clauses,
            }));
        }
        Command::RenormOrbit => {
            let sm = solve_map(&cfg.families[0], &cfg.target.digits(), cfg.depth + 2 + cfg.solve_margin, &cfg)?;
            let mut rows = Vec::new();
            for n in 1..=cfg.depth {
                let pair = sm.normalized_pair(n)?;
                let (digits, _) = pair_rotation_digits(&pair, 3)?;
                let k = k_control(&pair)?;
                rows.push(json!({
                    "n": n,
                    "digits": digits,
                    "xi0": pair.xi0().to_sci_string(12),
                    "minimal_k": k.minimal_k.to_sci_string(6),
                    "violated": k.violated,
                }));
            }
            print_json(&json!(rows));
        }
        Command::Yoccoz { digit } => {
            let a = digit.unwrap_or(cfg.large_digit);
            let r = renorm_lab::experiments::run_yoccoz(&cfg, a)?;
            emit(&cfg, &r.report)?;
        }
        other => {
            let name = match other {
                Command::Converge => "converge",
                Command::Expand => "expand",
                Command::Sync => "sync",
                Command::Lipschitz => "lipschitz",
                Command::Rigidity => "rigidity",
                _ => unreachable!("handled above"),
            };
            let report = run_named(name, &cfg)?;
            emit(&cfg, &report)?;
        }
    }
    Ok(())
}

fn emit(cfg: &ExperimentConfig, report: &renorm_lab::experiments::ExperimentReport) -> Result<()> {
    if let Some(dir) = &cfg.out_dir {
        for p in report.write(dir, cfg.format)? {
            eprintln!("wrote {}", p.display());
        }
    }
    match cfg.format {
        OutputFormat::Json => println!("{}", report.to_json()?),
        OutputFormat::Csv => {
            print!("{}", report.csv_bodies());
            print_json(&json!({ "constants": report.constants, "fits": report.fits }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
