//! `atlas` — scan and render the phase portrait of the cubic quadratic
//! differential `-e^{2i theta} (z - a)(z^2 - 1) dz^2`.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::path::PathBuf;
use std::process::ExitCode;
use stokes_atlas::config::{AtlasConfig, GridSpec, Window};
use stokes_atlas::render::{render_graph, render_sigma, render_xi, RenderSpec};
use stokes_atlas::scan::{cmd_atlas, cmd_classify, cmd_find_flat, cmd_phase_scan, cmd_table};
use stokes_atlas::AtlasError;
use stokes_core::Complex64;

#[derive(Parser)]
#[command(
    name = "atlas",
    version,
    about = "Phase-portrait atlas of a cubic quadratic differential",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the special points t, s, e for one or more rotations.
    Table {
        /// Rotations in [0, pi/4]; defaults to the four canonical values.
        #[arg(long = "theta", value_delimiter = ',')]
        theta: Vec<f64>,
    },
    /// Classify a single configuration and print its scan record.
    Classify {
        /// Movable zero as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long)]
        theta: f64,
    },
    /// Scan a grid of movable zeros at a fixed rotation.
    Atlas {
        #[arg(long)]
        theta: f64,
        /// Grid as NxM.
        #[arg(long, default_value = "50x50", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Window as X0,X1,Y0,Y1.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<Window>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan rotations for the existence boundary of the double-tree point e.
    PhaseScan {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
    },
    /// Find a rotation whose configuration has the maximal two strip domains.
    FindFlat {
        /// Movable zero as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
    },
    /// Emit an SVG plot.
    Render {
        #[command(subcommand)]
        what: RenderCmd,
    },
    /// Inspect the embedded configuration.
    Config {
        #[command(subcommand)]
        what: ConfigCmd,
    },
}

#[derive(Args)]
struct RenderCommon {
    /// Window as X0,X1,Y0,Y1.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Pixel size as WxH.
    #[arg(long, default_value = "800x800", value_parser = parse_grid)]
    size: (usize, usize),
    /// Output SVG file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum RenderCmd {
    /// Full level sets of the three period functions.
    Sigma {
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        common: RenderCommon,
    },
    /// Trimmed walls (the arcs that carry short trajectories).
    Xi {
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        common: RenderCommon,
    },
    /// The Stokes graph of one configuration.
    Graph {
        /// Movable zero as RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        common: RenderCommon,
    },
}

#[derive(Subcommand)]
enum ConfigCmd {
    /// Print every embedded default.
    Show,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| format!("bad real part `{re}`"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| format!("bad imaginary part `{im}`"))?;
    Ok(Complex64::new(re, im))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (nx, ny) = s
        .split_once('x')
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let nx: usize = nx.parse().map_err(|_| format!("bad grid count `{nx}`"))?;
    let ny: usize = ny.parse().map_err(|_| format!("bad grid count `{ny}`"))?;
    if nx == 0 || ny == 0 {
        return Err("grid counts must be positive".to_string());
    }
    Ok((nx, ny))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected X0,X1,Y0,Y1, got `{s}`"));
    }
    let mut vals = [0.0f64; 4];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("bad window bound `{part}`"))?;
    }
    let w = Window {
        x0: vals[0],
        x1: vals[1],
        y0: vals[2],
        y1: vals[3],
    };
    if !(w.x0 < w.x1 && w.y0 < w.y1) {
        return Err("window must satisfy x0 < x1 and y0 < y1".to_string());
    }
    Ok(w)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), AtlasError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(AtlasError::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), AtlasError> {
    let cfg = AtlasConfig::default();
    match cli.cmd {
        Cmd::Table { theta } => {
            let thetas = if theta.is_empty() {
                vec![0.0, 0.5 * 0.5f64.atan(), FRAC_PI_8, FRAC_PI_4]
            } else {
                theta
            };
            print!("{}", cmd_table(&thetas)?);
            Ok(())
        }
        Cmd::Classify { a, theta } => {
            print!("{}", cmd_classify(a, theta, &cfg)?);
            Ok(())
        }
        Cmd::Atlas {
            theta,
            grid,
            window,
            out,
        } => {
            let spec = GridSpec {
                nx: grid.0,
                ny: grid.1,
                window: window.unwrap_or(cfg.grid.window),
            };
            let text = cmd_atlas(theta, &spec, &cfg)?;
            emit(out.as_ref(), &text)
        }
        Cmd::PhaseScan { from, to, step } => {
            print!("{}", cmd_phase_scan(from, to, step)?);
            Ok(())
        }
        Cmd::FindFlat { a } => {
            print!("{}", cmd_find_flat(a, &cfg)?);
            Ok(())
        }
        Cmd::Render { what } => {
            let build_spec = |common: &RenderCommon| {
                let mut spec = RenderSpec::with_defaults(&cfg);
                if let Some(w) = common.window {
                    spec.window = w;
                }
                spec.width = common.size.0 as u32;
                spec.height = common.size.1 as u32;
                spec
            };
            match what {
                RenderCmd::Sigma { theta, common } => {
                    let svg = render_sigma(theta, build_spec(&common))?;
                    emit(Some(&common.out), &svg)
                }
                RenderCmd::Xi { theta, common } => {
                    let svg = render_xi(theta, build_spec(&common))?;
                    emit(Some(&common.out), &svg)
                }
                RenderCmd::Graph { a, theta, common } => {
                    let svg = render_graph(a, theta, build_spec(&common))?;
                    emit(Some(&common.out), &svg)
                }
            }
        }
        Cmd::Config { what } => match what {
            ConfigCmd::Show => {
                print!("{}", cfg.show());
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    // Cap the worker pool before any parallel work starts.
    if let Ok(threads) = std::env::var("ATLAS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap's message already ends with a newline.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("atlas: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
