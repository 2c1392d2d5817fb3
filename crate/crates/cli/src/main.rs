//! Command line front end: evaluates the collected correlation expressions
//! on named states, checks joint-measurability of unsharp pairs, runs
//! scenario files, and re-derives every collected extremal value.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

mod config;
mod parse;
mod report;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use bellmeas::inequalities::{bounds, HierarchyRegime};
use bellmeas::search;
use clap::{Args, Parser, Subcommand};

use crate::parse::{parse_direction, parse_state};
use crate::report::{Format, ReportRow};
use crate::scenarios::RunOptions;

#[derive(Parser)]
#[command(name = "bellmeas", version, about = "Unsharp joint measurements against Bell-type bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output rendering (default: table)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Search seed for optimizer-backed runs
    #[arg(long, global = true, default_value_t = search::DEFAULT_SEED)]
    seed: u64,

    /// Objective evaluation budget for optimizer-backed runs
    #[arg(long, global = true, default_value_t = search::DEFAULT_BUDGET)]
    budget: usize,

    /// Pass threshold for closed-form checks
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Two-party two-setting combination on a two-qubit state
    Chsh(ChshArgs),
    /// Three-party combination of one x and one y setting per party
    Mermin(MerminArgs),
    /// Two-party three- or four-setting inequalities, sharp or joint
    Gisin(GisinArgs),
    /// GHZ maximum under sharp and joint measurement regimes
    Hierarchy(HierarchyArgs),
    /// Joint-measurability check for a pair of unsharp spin observables
    PovmCheck(PovmCheckArgs),
    /// Run a scenario description file
    Scan(ScanArgs),
    /// Re-derive the collected extremal values and verify each one
    Reproduce,
}

#[derive(Args)]
struct ChshArgs {
    /// singlet or random:SEED
    #[arg(long, default_value = "singlet")]
    state: String,

    /// Search all four directions instead of using fixed settings
    #[arg(long)]
    optimize: bool,

    /// First setting of party 1 (axis name or x,y,z triple)
    #[arg(long)]
    a1: Option<String>,

    /// Second setting of party 1
    #[arg(long)]
    b1: Option<String>,

    /// First setting of party 2
    #[arg(long)]
    a2: Option<String>,

    /// Second setting of party 2
    #[arg(long)]
    b2: Option<String>,
}

#[derive(Args)]
struct MerminArgs {
    /// ghz or random:SEED
    #[arg(long, default_value = "ghz")]
    state: String,

    /// Search all six directions instead of using fixed settings
    #[arg(long)]
    optimize: bool,

    /// x setting of party 1
    #[arg(long)]
    x1: Option<String>,

    /// y setting of party 1
    #[arg(long)]
    y1: Option<String>,

    /// x setting of party 2
    #[arg(long)]
    x2: Option<String>,

    /// y setting of party 2
    #[arg(long)]
    y2: Option<String>,

    /// x setting of party 3
    #[arg(long)]
    x3: Option<String>,

    /// y setting of party 3
    #[arg(long)]
    y3: Option<String>,
}

#[derive(Args)]
struct GisinArgs {
    /// Number of settings for party 1 (3 or 4)
    #[arg(long, default_value_t = 3)]
    settings: u8,

    /// sharp or joint-on-one
    #[arg(long, default_value = "sharp")]
    regime: String,

    /// Common sharpness factor for the joint regime
    #[arg(long)]
    alpha: Option<f64>,

    /// Search the coplanar geometry (three-setting sharp runs only)
    #[arg(long)]
    optimize: bool,

    /// singlet or random:SEED
    #[arg(long, default_value = "singlet")]
    state: String,
}

#[derive(Args)]
struct HierarchyArgs {
    /// sharp, joint-on-one, or joint-on-two; omitted runs all three
    #[arg(long)]
    regime: Option<String>,
}

#[derive(Args)]
struct PovmCheckArgs {
    /// Sharpness of the first observable
    #[arg(long)]
    alpha: f64,

    /// Sharpness of the second observable
    #[arg(long)]
    beta: f64,

    /// Direction of the first observable (axis name or x,y,z triple)
    #[arg(long)]
    a: String,

    /// Direction of the second observable
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct ScanArgs {
    /// Path to a TOML scenario file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let opts = RunOptions {
        seed: cli.seed,
        budget: cli.budget,
        tolerance: cli.tolerance,
    };
    let format = cli.format.unwrap_or(Format::Table);
    let out = cli.out.as_deref();

    match &cli.command {
        Command::Chsh(args) => {
            let rows = vec![run_chsh(args, &opts)?];
            finish(&rows, None, format, out)?;
            Ok(0)
        }
        Command::Mermin(args) => {
            let rows = vec![run_mermin(args, &opts)?];
            finish(&rows, None, format, out)?;
            Ok(0)
        }
        Command::Gisin(args) => {
            let rows = vec![run_gisin(args, &opts)?];
            finish(&rows, None, format, out)?;
            Ok(0)
        }
        Command::Hierarchy(args) => {
            let regimes = match &args.regime {
                Some(r) => vec![r.parse::<HierarchyRegime>()?],
                None => vec![
                    HierarchyRegime::Sharp,
                    HierarchyRegime::JointOnOne,
                    HierarchyRegime::JointOnTwo,
                ],
            };
            let rows = scenarios::hierarchy_rows(&regimes, &opts)?;
            finish(&rows, None, format, out)?;
            Ok(0)
        }
        Command::PovmCheck(args) => run_povm_check(args, &opts, format, out),
        Command::Scan(args) => {
            let cfg = config::load_config(&args.config)?;
            let rows = config::run_config(&cfg, &opts)?;
            let format = cli
                .format
                .or(config::config_format(&cfg)?)
                .unwrap_or(Format::Table);
            let out = cli.out.as_deref().or(cfg.out.as_deref());
            finish(&rows, None, format, out)?;
            Ok(0)
        }
        Command::Reproduce => {
            let checked = scenarios::reproduce_suite(&opts)?;
            let rows: Vec<ReportRow> = checked.iter().map(|c| c.row.clone()).collect();
            let statuses: Vec<bool> = checked.iter().map(|c| c.pass).collect();
            let all_pass = statuses.iter().all(|&p| p);
            finish(&rows, Some(&statuses), format, out)?;
            for c in &checked {
                if !c.pass {
                    eprintln!(
                        "check failed: {} ({}) residual {:.3e} exceeds {:.1e}",
                        c.row.scenario, c.row.regime, c.row.residual, c.tolerance
                    );
                }
            }
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

fn finish(
    rows: &[ReportRow],
    statuses: Option<&[bool]>,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<(), String> {
    let text = match format {
        Format::Csv => report::render_csv(rows),
        Format::Table => report::render_table(rows, statuses),
    };
    report::emit(&text, out)
}

fn run_chsh(args: &ChshArgs, opts: &RunOptions) -> Result<ReportRow, String> {
    let rho = parse_state(&args.state, 2)?;
    let explicit = [&args.a1, &args.b1, &args.a2, &args.b2];
    let given = explicit.iter().filter(|d| d.is_some()).count();
    if args.optimize {
        if given != 0 {
            return Err("--optimize searches the settings; drop the direction flags".into());
        }
        let placeholder = bellmeas::pauli::Direction::X;
        return scenarios::chsh_row(&rho, [placeholder; 4], args.state == "singlet", true, opts);
    }
    match given {
        0 => {
            let (ones, twos) = bellmeas::inequalities::presets::chsh_optimal();
            scenarios::chsh_row(
                &rho,
                [ones[0], ones[1], twos[0], twos[1]],
                args.state == "singlet",
                false,
                opts,
            )
        }
        4 => {
            let names = ["a1", "b1", "a2", "b2"];
            let mut dirs = [bellmeas::pauli::Direction::X; 4];
            for (i, (slot, name)) in explicit.iter().zip(names).enumerate() {
                dirs[i] = parse_direction(slot.as_deref().unwrap())
                    .map_err(|e| format!("--{name}: {e}"))?;
            }
            scenarios::chsh_row(&rho, dirs, false, false, opts)
        }
        _ => Err("give all of --a1 --b1 --a2 --b2 or none".into()),
    }
}

fn run_mermin(args: &MerminArgs, opts: &RunOptions) -> Result<ReportRow, String> {
    let rho = parse_state(&args.state, 3)?;
    let explicit = [
        &args.x1, &args.y1, &args.x2, &args.y2, &args.x3, &args.y3,
    ];
    let given = explicit.iter().filter(|d| d.is_some()).count();
    if args.optimize {
        if given != 0 {
            return Err("--optimize searches the settings; drop the direction flags".into());
        }
        let placeholder = [bellmeas::pauli::Direction::X; 3];
        return scenarios::mermin_row(&rho, placeholder, placeholder, args.state == "ghz", true, opts);
    }
    match given {
        0 => {
            let (xs, ys) = bellmeas::inequalities::presets::ghz_xy();
            scenarios::mermin_row(&rho, xs, ys, args.state == "ghz", false, opts)
        }
        6 => {
            let names = ["x1", "y1", "x2", "y2", "x3", "y3"];
            let mut dirs = [bellmeas::pauli::Direction::X; 6];
            for (i, (slot, name)) in explicit.iter().zip(names).enumerate() {
                dirs[i] = parse_direction(slot.as_deref().unwrap())
                    .map_err(|e| format!("--{name}: {e}"))?;
            }
            scenarios::mermin_row(
                &rho,
                [dirs[0], dirs[2], dirs[4]],
                [dirs[1], dirs[3], dirs[5]],
                false,
                false,
                opts,
            )
        }
        _ => Err("give all of --x1 --y1 --x2 --y2 --x3 --y3 or none".into()),
    }
}

fn run_gisin(args: &GisinArgs, opts: &RunOptions) -> Result<ReportRow, String> {
    match args.regime.as_str() {
        "sharp" => {
            if args.alpha.is_some() {
                return Err("--alpha belongs to the joint regime".into());
            }
            let rho = parse_state(&args.state, 2)?;
            let canonical = args.state == "singlet";
            match args.settings {
                3 if args.optimize => scenarios::gisin3_optimized_row(&rho, canonical, opts),
                3 => {
                    let (ones, twos) = bellmeas::inequalities::presets::gisin_coplanar();
                    scenarios::gisin3_row(&rho, ones, twos, canonical)
                }
                4 if args.optimize => {
                    Err("--optimize is only wired up for the three-setting geometry".into())
                }
                4 => {
                    let (ones, twos) = bellmeas::inequalities::presets::gisin_xyz();
                    scenarios::gisin4_row(&rho, ones, twos, canonical)
                }
                n => Err(format!("--settings must be 3 or 4, got {n}")),
            }
        }
        "joint-on-one" => {
            if args.optimize {
                return Err("--optimize applies to the sharp three-setting run".into());
            }
            match args.settings {
                3 => {
                    let rho = parse_state(&args.state, 2)?;
                    let alpha = args
                        .alpha
                        .unwrap_or_else(bounds::coplanar_max_sharpness);
                    scenarios::gisin3_joint_row(&rho, alpha, args.state == "singlet")
                }
                4 => {
                    if args.state != "singlet" {
                        return Err(
                            "the four-setting joint scheme is defined on the singlet".into()
                        );
                    }
                    let alpha = args.alpha.unwrap_or_else(|| 1.0 / 3f64.sqrt());
                    scenarios::gisin_xyz_joint_row(alpha)
                }
                n => Err(format!("--settings must be 3 or 4, got {n}")),
            }
        }
        other => Err(format!(
            "unknown regime '{other}' (expected sharp or joint-on-one)"
        )),
    }
}

fn run_povm_check(
    args: &PovmCheckArgs,
    opts: &RunOptions,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<u8, String> {
    let a = parse_direction(&args.a).map_err(|e| format!("--a: {e}"))?;
    let b = parse_direction(&args.b).map_err(|e| format!("--b: {e}"))?;
    let chk = scenarios::povm_check(args.alpha, a, args.beta, b, opts.tolerance)?;
    let text = match format {
        Format::Csv => {
            let row = ReportRow {
                scenario: "povm_check".into(),
                regime: "joint-pair".into(),
                value: chk.margin,
                classical_bound: 0.0,
                quantum_bound: None,
                violated: !chk.feasible,
                residual: (-chk.margin).max(0.0),
            };
            report::render_csv(std::slice::from_ref(&row))
        }
        Format::Table => {
            let verdict = if chk.feasible { "FEASIBLE" } else { "INFEASIBLE" };
            format!(
                "margin           {}\nbias             {}\nmax symmetric    {}\nverdict          {verdict}\n",
                report::sig12(chk.margin),
                report::sig12(chk.bias),
                report::sig12(chk.max_symmetric),
            )
        }
    };
    report::emit(&text, out)?;
    Ok(if chk.feasible { 0 } else { 1 })
}
