//! Command-line front end.

pub mod config;
pub mod registry;
pub mod runner;

pub use config::{Component, ConfigError, Experiment, ExperimentConfig};
pub use registry::list_registry;
pub use runner::{run_config, run_experiment, RunManifest};

use crate::circle::{build_denjoy, DenjoyMap};
use crate::error::{Error, Result};
use crate::interval::{attractor_coding, cascade, cascade_ratios};
use crate::seq::{default_grid, quadratic_rational_spectrum, scan_grid, uniform_grid};
use crate::torus::{normal_form, ModularMatrix};
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "oscillate", version, about = "Oscillating sequences, flows and weighted ergodic averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every experiment in a config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Fallback seed for stochastic sequences.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $OSCILLATE_OUT or ./oscillate-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the registry of sequences, flows and observables.
    List,
    /// Period-doubling parameters t_n as CSV `n,t_n,ratio`.
    Cascade {
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Word table `word,image` of the attracting 2^depth-cycle at t.
    Coding {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        depth: usize,
    },
    /// Persist (or reload and verify) the Denjoy gap table `n,x_n,H_x_n,ell_n`.
    Denjoy {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 10_000)]
        trunc: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cesàro means on a grid as CSV `t,re_sigma,im_sigma,abs_sigma,N`.
    Spectrum {
        /// Registry sequence name.
        #[arg(long)]
        sequence: String,
        /// Sequence parameters as key=value (TOML values).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        n: usize,
        /// Uniform grid size; default mixes 512 points with rationals of denominator <= 8.
        #[arg(long)]
        grid: Option<usize>,
        /// Print the exact spectrum of e(n^2 p/q) instead, as `r,s,re,im,abs`.
        #[arg(long, value_name = "P/Q")]
        gauss: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normal form P^-1 M P = sign * T_t of a parabolic matrix "a,b;c,d".
    NormalForm {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
    },
}

/// Parses arguments, dispatches, and returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Run { config, jobs, seed, out } => run_command(&config, jobs, seed, out),
        Command::List => {
            print!("{}", list_registry());
            0
        }
        other => match simple_command(other) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
    }
}

fn run_command(path: &std::path::Path, jobs: usize, seed: Option<u64>, out: Option<PathBuf>) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    let cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return 2;
        }
    };
    let out = out.unwrap_or_else(runner::default_out_dir);
    match run_config(&text, &cfg, &out, jobs, seed) {
        Ok(m) => {
            for s in &m.experiments {
                match (&s.verdict, &s.error) {
                    (Some(v), _) => println!("{}: {v}", s.name),
                    (_, Some(e)) => eprintln!("{}: error: {e}", s.name),
                    _ => {}
                }
            }
            if m.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn simple_command(cmd: Command) -> Result<String> {
    let mut out = String::new();
    match cmd {
        Command::Cascade { depth } => {
            let ts = cascade(depth)?;
            let ratios = cascade_ratios(&ts);
            out.push_str("n,t_n,ratio\n");
            let _ = writeln!(out, "0,{:?},", -0.5);
            for (i, t) in ts.iter().enumerate() {
                let ratio = if i >= 1 { format!("{:?}", ratios[i - 1]) } else { String::new() };
                let _ = writeln!(out, "{},{t:?},{ratio}", i + 1);
            }
        }
        Command::Coding { t, depth } => {
            let report = attractor_coding(t, depth)?;
            out = report.to_csv();
            eprintln!("adding machine: {}", if report.adding_machine { "yes" } else { "no" });
        }
        Command::Denjoy { rho, trunc, out: dir } => {
            let dir = dir.unwrap_or_else(runner::default_out_dir);
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io(e.to_string()))?;
            let path = dir.join(format!("denjoy-{}-{trunc}.csv", sanitize(rho)));
            let d = if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(e.to_string()))?;
                let d = DenjoyMap::from_csv(&text)?;
                if d.rho() != rho || d.trunc() != trunc {
                    return Err(Error::Parse(format!("{} holds a different table", path.display())));
                }
                let _ = writeln!(out, "reloaded {}", path.display());
                d
            } else {
                let d = build_denjoy(rho, trunc)?;
                runner::write_atomic(&path, &d.to_csv())?;
                let _ = writeln!(out, "wrote {}", path.display());
                d
            };
            let _ = writeln!(out, "rho = {:?}, trunc = {}, tail_mass = {:e}, tail_bound = {:e}", d.rho(), d.trunc(), d.tail_mass(), d.tail_bound());
        }
        Command::Spectrum { sequence, params, n, grid, gauss, seed } => {
            if let Some(pq) = gauss {
                let (p, q) = pq
                    .split_once('/')
                    .and_then(|(p, q)| Some((p.trim().parse::<u64>().ok()?, q.trim().parse::<u64>().ok()?)))
                    .ok_or_else(|| Error::Parse(format!("`{pq}`: expected P/Q")))?;
                out.push_str("r,s,re,im,abs\n");
                for a in quadratic_rational_spectrum(p, q)? {
                    let _ = writeln!(out, "{},{},{:?},{:?},{:?}", a.r, a.s, a.amplitude.re, a.amplitude.im, a.amplitude.norm());
                }
                return Ok(out);
            }
            let mut table = toml::Table::new();
            for kv in &params {
                let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("`{kv}`: expected KEY=VALUE")))?;
                let parsed: toml::Table =
                    toml::from_str(&format!("v = {}", v.trim())).map_err(|e| Error::Parse(format!("`{kv}`: {}", e.message())))?;
                table.insert(k.trim().to_string(), parsed["v"].clone());
            }
            table.entry("n").or_insert(toml::Value::Integer(n as i64));
            let comp = Component { name: sequence, params: table };
            registry::check_component(registry::Kind::Sequence, &comp).map_err(Error::InvalidArgument)?;
            let w = registry::build_sequence(&comp, seed)?;
            let g = grid.map(uniform_grid).unwrap_or_else(default_grid);
            out = scan_grid(&w, &g, n)?.to_csv();
        }
        Command::NormalForm { matrix } => {
            let m: ModularMatrix = matrix.parse()?;
            let nf = normal_form(&m)?;
            let _ = writeln!(out, "P = {}", nf.p);
            let _ = writeln!(out, "t = {}", nf.t);
            let _ = writeln!(out, "sign = {}", nf.sign);
        }
        Command::Run { .. } | Command::List => unreachable!(),
    }
    Ok(out)
}

fn sanitize(x: f64) -> String {
    format!("{x:?}").replace(['.', '-'], "_")
}
