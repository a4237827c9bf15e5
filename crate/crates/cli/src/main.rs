//! `phongfield` command-line tool.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when an input file or
//! the data in it is bad, 3 when `validate` finds a failing check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use phongfield::baker::{
    bake_all_with_threads, load_bundle, save_bundle, LightMapSet, DEFAULT_RESOLUTION,
    DEFAULT_SHININESS,
};
use phongfield::bench::{
    bench_continuity, bench_shading, BenchReport, ShadingConfig, DEFAULT_CONTINUITY_SAMPLES,
    DEFAULT_ENV_RESOLUTIONS, DEFAULT_QUERIES,
};
use phongfield::envmap::load_hdr;
use phongfield::mls::fixtures::bend_fixture;
use phongfield::mls::grid::{padded_bounds, sample_grid, write_grid};
use phongfield::mls::{ControlSet, MlsField, SurfaceField, DEFAULT_ALPHA};
use phongfield::volume::{load_scene, render, RenderSettings, DEFAULT_SAMPLES};
use phongfield::{par, validate};

const THREADS_ENV: &str = "PHONGFIELD_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "phongfield",
    version,
    about = "Lightmap baking, MLS deformation and intrinsic volume rendering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prefilter an environment map into diffuse and specular lightmaps.
    Bake {
        /// Equirectangular `.hdr` (Radiance) or `.pfm` environment.
        #[arg(long)]
        env: PathBuf,
        /// Output lightmap bundle.
        #[arg(long)]
        out: PathBuf,
        /// Lightmap resolution, `WxH` with W = 2H.
        #[arg(long, value_parser = parse_resolution, default_value = "128x64")]
        res: (usize, usize),
        /// Strictly increasing shininess exponents.
        #[arg(long, value_delimiter = ',', default_value = "1,16,32,64")]
        shininess: Vec<u32>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render a JSON scene into per-channel PFM and PNG images.
    Render {
        #[arg(long)]
        scene: PathBuf,
        /// Lightmap bundle, or an environment map to bake with the defaults.
        #[arg(long)]
        lights: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Multiplier applied before tone mapping the shading channels.
        #[arg(long, default_value_t = 1.0)]
        exposure: f64,
        /// Jitter samples within their segments (seeded by `--seed`).
        #[arg(long)]
        jitter: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Sample a deformation field on a regular grid over the posed controls.
    DeformGrid {
        /// Control set JSON.
        #[arg(long)]
        controls: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Mls)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Nodes per axis.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time lookups against brute force, or measure field continuity.
    Bench {
        #[arg(long, value_enum)]
        mode: BenchMode,
        /// JSON report path; a `.tsv` table is written next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_QUERIES)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Split queries over worker threads (throughput mode).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the closed-form self-check table.
    Validate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Mls,
    Sf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchMode {
    Shading,
    Continuity,
}

enum Failure {
    Usage(String),
    Data(String),
    Checks,
}

impl From<phongfield::Error> for Failure {
    fn from(e: phongfield::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: usize = w
        .trim()
        .parse()
        .map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h
        .trim()
        .parse()
        .map_err(|_| format!("bad height in {s:?}"))?;
    if h == 0 || w != 2 * h {
        return Err(format!("resolution {w}x{h} must be nonzero with W = 2H"));
    }
    Ok((w, h))
}

/// Flag, then the environment variable, then hardware parallelism.
fn resolve_threads(flag: Option<usize>) -> Result<usize, Failure> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::Usage(format!("{THREADS_ENV}={v:?} is not a thread count"))
            })?,
            Err(_) => par::default_threads(),
        },
    };
    if n == 0 {
        return Err(Failure::Usage("thread count must be at least 1".into()));
    }
    Ok(n)
}

fn check_shininess(set: &[u32]) -> Result<(), Failure> {
    if set.is_empty() || set[0] == 0 || set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Usage(format!(
            "shininess list {set:?} must be nonempty, positive and strictly increasing"
        )));
    }
    Ok(())
}

fn load_lights(path: &Path, threads: usize) -> Result<LightMapSet, Failure> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("hdr" | "pfm") => {
            let env = load_hdr(path)?;
            Ok(bake_all_with_threads(
                &env,
                &DEFAULT_SHININESS,
                DEFAULT_RESOLUTION,
                Some(threads),
            )?)
        }
        _ => Ok(load_bundle(path)?),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bake {
            env,
            out,
            res,
            shininess,
            threads,
        } => {
            check_shininess(&shininess)?;
            let threads = resolve_threads(threads)?;
            let env = load_hdr(&env)?;
            let lights = bake_all_with_threads(&env, &shininess, res, Some(threads))?;
            save_bundle(&lights, &out)?;
            println!(
                "baked {}x{} lightmaps (diffuse + shininess {:?}) to {}",
                res.0,
                res.1,
                shininess,
                out.display()
            );
        }
        Command::Render {
            scene,
            lights,
            out,
            samples,
            exposure,
            jitter,
            seed,
            threads,
        } => {
            if samples < 2 {
                return Err(Failure::Usage("--samples must be at least 2".into()));
            }
            if !(exposure > 0.0 && exposure.is_finite()) {
                return Err(Failure::Usage("--exposure must be positive".into()));
            }
            let threads = resolve_threads(threads)?;
            let (scene, camera) = load_scene(&scene)?;
            let lights = load_lights(&lights, threads)?;
            let settings = RenderSettings {
                samples,
                threads: Some(threads),
                jitter: jitter.then_some(seed),
            };
            let image = render(&scene, &camera, &lights, &settings)?;
            let files = image.write_channels(&out, exposure)?;
            println!("wrote {} files to {}", files.len(), out.display());
        }
        Command::DeformGrid {
            controls,
            method,
            alpha,
            grid,
            out,
        } => {
            if grid < 2 {
                return Err(Failure::Usage("--grid must be at least 2".into()));
            }
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Failure::Usage("--alpha must be positive".into()));
            }
            let controls = ControlSet::load(&controls)?;
            let bounds = padded_bounds(&controls, 0.1);
            let sampled = match method {
                Method::Mls => {
                    let field = MlsField::new(controls, alpha)?;
                    sample_grid(|p| field.transform(p), grid, bounds)?
                }
                Method::Sf => {
                    let field = SurfaceField::new(&controls)?;
                    sample_grid(|p| Ok(field.transform(p)), grid, bounds)?
                }
            };
            std::fs::write(&out, write_grid(&sampled)).map_err(phongfield::Error::from)?;
            println!("wrote {grid}³ displacement grid to {}", out.display());
        }
        Command::Bench {
            mode,
            out,
            queries,
            seed,
            threads,
        } => {
            if threads == Some(0) {
                return Err(Failure::Usage("thread count must be at least 1".into()));
            }
            let mut report = BenchReport::default();
            let checks = match mode {
                BenchMode::Shading => {
                    let config = ShadingConfig {
                        queries,
                        seed,
                        threads,
                        ..Default::default()
                    };
                    let s = bench_shading(&DEFAULT_ENV_RESOLUTIONS, &config)
                        .map_err(|e| Failure::Usage(e.to_string()))?;
                    let checks = s.checks(2.0, 32.0, 50.0);
                    report.shading = Some(s);
                    checks
                }
                BenchMode::Continuity => {
                    let c = bench_continuity(
                        &bend_fixture(),
                        &DEFAULT_CONTINUITY_SAMPLES,
                        DEFAULT_ALPHA,
                    )?;
                    let checks = c.checks(10.0, 0.55, 0.10);
                    report.continuity = Some(c);
                    checks
                }
            };
            std::fs::write(&out, report.to_json()?).map_err(phongfield::Error::from)?;
            let mut tsv = out.clone().into_os_string();
            tsv.push(".tsv");
            std::fs::write(&tsv, report.to_tsv()).map_err(phongfield::Error::from)?;
            for c in checks {
                println!("{c}");
            }
        }
        Command::Validate => {
            let checks = validate::run()?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            for c in &checks {
                println!("{c}");
            }
            println!(
                "{} of {} checks passed",
                checks.len() - failed,
                checks.len()
            );
            if failed > 0 {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks) => ExitCode::from(3),
    }
}
