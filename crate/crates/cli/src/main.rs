//! `rmx` — command-line front end for the desk-scale R-matrix pipeline.
//!
//! Every subcommand is a thin wrapper over the library: flag parsing, unit
//! conversion at the boundary (meV flags to Rydberg), and file plumbing.
//! Outputs land in files; stdout carries logs and report tables only.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rmx_core::eigen::{diagonalize_block, max_residual, surface_amplitudes};
use rmx_core::kernel::{bench_kernels, bench_rows_to_csv, KernelVariant};
use rmx_core::rmxio::{
    read_hfile, reduce_dipole, stripe_count_for_size, write_dipole, write_hfile, ReadMode,
    StripePolicy,
};
use rmx_core::sched::{render_report, run_scaling_bench, ReportFormat, TimingReport};
use rmx_core::spectrum::{
    admix, convolve_gaussian, fit_resonance, mesh_avoiding_poles, read_spectrum_csv,
    sweep_response, write_spectrum_csv,
};
use rmx_core::synth::{
    build_boundary_projector, build_dipole_blocks, build_hamiltonian, load_case, save_case,
};
use rmx_core::types::{mev_to_ry, CaseDefinition};

#[derive(Parser)]
#[command(
    name = "rmx",
    version,
    about = "Desk-scale outer-region R-matrix pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic case, diagonalize it and write the eigendata file.
    Gen {
        /// Coupled channels (nchan).
        #[arg(long, default_value_t = 20)]
        channels: usize,
        /// Poles per block (N >= nchan).
        #[arg(long, default_value_t = 200)]
        poles: usize,
        /// Hamiltonian seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Boundary projector seed; defaults to seed + 1.
        #[arg(long)]
        boundary_seed: Option<u64>,
        /// Pole energy window in Ry, as `low,high`.
        #[arg(long, default_value = "-2,8", value_parser = parse_pair)]
        range: (f64, f64),
        /// Read the case from a key=value file instead of the flags above.
        #[arg(long, conflicts_with_all = ["channels", "poles", "seed", "boundary_seed", "range"])]
        case: Option<PathBuf>,
        /// Also save the case definition as a key=value file.
        #[arg(long)]
        save_case: Option<PathBuf>,
        /// Output eigendata file.
        #[arg(long)]
        out: PathBuf,
        /// Also write a synthetic dipole file with this many initial states.
        #[arg(long, requires = "dipole_out")]
        dipole_states: Option<usize>,
        #[arg(long)]
        dipole_out: Option<PathBuf>,
    },
    /// Check an eigendata file against its regenerated case.
    Diag {
        #[arg(long)]
        hfile: PathBuf,
        /// Rewrite freshly regenerated eigendata here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the spectral response over an energy mesh.
    Sweep {
        #[arg(long)]
        hfile: PathBuf,
        /// Mesh start, Ry.
        #[arg(long)]
        start: f64,
        /// Mesh stop, Ry.
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "gemm", value_parser = parse_variant)]
        variant: KernelVariant,
        #[arg(long)]
        out: PathBuf,
    },
    /// Broaden a spectrum with a Gaussian of the given FWHM.
    Convolve {
        #[arg(long = "in")]
        input: PathBuf,
        /// FWHM in meV (converted to Ry at this boundary).
        #[arg(long)]
        fwhm_mev: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted admixture of spectra sharing one mesh.
    Admix {
        /// Input spectra (comma separated).
        #[arg(long = "in", value_delimiter = ',', required = true)]
        inputs: Vec<PathBuf>,
        /// Weights, ratios allowed (e.g. 2,1).
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a Lorentzian to one resonance window.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Window `low,high` in Ry.
        #[arg(long, value_parser = parse_pair)]
        window: (f64, f64),
        /// Write the fit summary here as well as printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Keep only the listed states of a dipole file.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        /// State indices to keep, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Strong-scaling benchmark of the sweep pipeline.
    BenchScale {
        #[arg(long)]
        hfile: PathBuf,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long, default_value_t = 200_000)]
        points: usize,
        /// Worker counts, strictly ascending (e.g. 1,2,4).
        #[arg(long, value_delimiter = ',', required = true)]
        workers: Vec<usize>,
        #[arg(long, default_value = "gemm", value_parser = parse_variant)]
        variant: KernelVariant,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: ReportFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time kernel variants across multiply shapes.
    BenchKernel {
        /// Shapes as `channels x poles` (e.g. 64x512,128x1024).
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_shape)]
        shapes: Vec<(usize, usize)>,
        #[arg(long, value_delimiter = ',', default_value = "naive,gemm,gemm-blocked:64",
              value_parser = parse_variant)]
        variants: Vec<KernelVariant>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Write the CSV table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive speed-up and core-hour columns from wall timings.
    Report {
        /// Timings as `workers:seconds` pairs (e.g. 1024:584.19,2048:430.80).
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_timing)]
        timings: Vec<(usize, f64)>,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `low,high`, got `{s}`"))?;
    let lo = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    Ok((lo, hi))
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| format!("expected `channelsxpoles`, got `{s}`"))?;
    let nchan = a.trim().parse().map_err(|_| format!("bad count `{a}`"))?;
    let npoles = b.trim().parse().map_err(|_| format!("bad count `{b}`"))?;
    Ok((nchan, npoles))
}

fn parse_timing(s: &str) -> Result<(usize, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `workers:seconds`, got `{s}`"))?;
    let workers = a.trim().parse().map_err(|_| format!("bad count `{a}`"))?;
    let seconds = b.trim().parse().map_err(|_| format!("bad seconds `{b}`"))?;
    Ok((workers, seconds))
}

fn parse_variant(s: &str) -> Result<KernelVariant, String> {
    s.parse().map_err(|e: rmx_core::RmxError| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    match s {
        "text" => Ok(ReportFormat::Text),
        "csv" => Ok(ReportFormat::Csv),
        _ => Err(format!("unknown format `{s}` (expected text or csv)")),
    }
}

fn log_written(path: &Path, bytes: u64) -> Result<()> {
    let policy = StripePolicy::from_env()?;
    eprintln!(
        "wrote {} ({bytes} bytes); recommended stripe count {}",
        path.display(),
        stripe_count_for_size(bytes, &policy)
    );
    Ok(())
}

fn load_single_hfile(path: &Path) -> Result<rmx_core::rmxio::HFileData> {
    Ok(read_hfile(path, ReadMode::RootReadBroadcast, 1)?
        .pop()
        .expect("one worker requested"))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen {
            channels,
            poles,
            seed,
            boundary_seed,
            range,
            case,
            save_case: save_case_path,
            out,
            dipole_states,
            dipole_out,
        } => {
            let case = match case {
                Some(path) => load_case(path)?,
                None => CaseDefinition::new(
                    channels,
                    poles,
                    range,
                    boundary_seed.unwrap_or(seed + 1),
                    seed,
                )?,
            };
            if let Some(path) = save_case_path {
                save_case(&case, &path)?;
                eprintln!("wrote {}", path.display());
            }
            let h = build_hamiltonian(&case)?;
            let es = diagonalize_block(&h)?;
            let b = build_boundary_projector(&case)?;
            let w = surface_amplitudes(&b, &es)?;
            let bytes = write_hfile(&out, &case, &es, &w)?;
            log_written(&out, bytes)?;

            if let Some(dpath) = dipole_out {
                let blocks = build_dipole_blocks(&case, dipole_states.unwrap_or(4))?;
                let bytes = write_dipole(&dpath, &blocks)?;
                log_written(&dpath, bytes)?;
            }
            Ok(())
        }

        Command::Diag { hfile, out } => {
            let data = load_single_hfile(&hfile)?;
            let case = data.header.case.clone();
            let h = build_hamiltonian(&case)?;
            let es = diagonalize_block(&h)?;

            let stored = data.eigensystem()?;
            let max_dev = es
                .eigenvalues
                .iter()
                .zip(&stored.eigenvalues)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let ortho = stored.orthogonality_defect();
            let resid = max_residual(&h, &stored);
            println!(
                "{}: n_channels={} n_poles={} max|E-E'|={max_dev:.3e} orthogonality={ortho:.3e} residual={resid:.3e}",
                hfile.display(),
                case.n_channels,
                case.n_poles
            );
            if ortho > 1e-10 || resid > 1e-9 {
                bail!("stored eigendata violates the solve contract");
            }
            if let Some(path) = out {
                let b = build_boundary_projector(&case)?;
                let w = surface_amplitudes(&b, &es)?;
                let bytes = write_hfile(&path, &case, &es, &w)?;
                log_written(&path, bytes)?;
            }
            Ok(())
        }

        Command::Sweep {
            hfile,
            start,
            stop,
            points,
            workers,
            variant,
            out,
        } => {
            let data = load_single_hfile(&hfile)?;
            let w = data.surface_amplitudes()?;
            let mesh = mesh_avoiding_poles(start, stop, points, data.poles())?;
            let spectrum = sweep_response(&w, data.poles(), &mesh, variant, workers)?;
            write_spectrum_csv(&spectrum, &out)?;
            eprintln!("wrote {} ({} points)", out.display(), points);
            Ok(())
        }

        Command::Convolve {
            input,
            fwhm_mev,
            out,
        } => {
            let s = read_spectrum_csv(&input)?;
            let blurred = convolve_gaussian(&s, mev_to_ry(fwhm_mev))?;
            write_spectrum_csv(&blurred, &out)?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }

        Command::Admix {
            inputs,
            weights,
            out,
        } => {
            let spectra = inputs
                .iter()
                .map(read_spectrum_csv)
                .collect::<rmx_core::Result<Vec<_>>>()?;
            let mixed = admix(&spectra, &weights)?;
            write_spectrum_csv(&mixed, &out)?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }

        Command::Fit { input, window, out } => {
            let s = read_spectrum_csv(&input)?;
            let fit = fit_resonance(&s, window)?;
            let line = format!(
                "center_ry={} gamma_ry={} peak={} background={} rms_residual={}\n",
                fit.center, fit.gamma, fit.peak, fit.background, fit.rms_residual
            );
            print!("{line}");
            if let Some(path) = out {
                fs::write(&path, line).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }

        Command::Reduce { input, keep, out } => {
            let bytes = reduce_dipole(&input, &keep, &out)?;
            log_written(&out, bytes)?;
            Ok(())
        }

        Command::BenchScale {
            hfile,
            start,
            stop,
            points,
            workers,
            variant,
            format,
            out,
        } => {
            let data = load_single_hfile(&hfile)?;
            let mesh = mesh_avoiding_poles(start, stop, points, data.poles())?;
            let report = run_scaling_bench(&data.header.case, &mesh, &workers, variant)?;
            emit(&render_report(&report, format)?, out.as_ref())
        }

        Command::BenchKernel {
            shapes,
            variants,
            repeats,
            out,
        } => {
            let rows = bench_kernels(&shapes, &variants, repeats)?;
            for row in rows.iter().filter(|r| r.flagged) {
                eprintln!(
                    "warning: {}x{} {} median {:.1e}s is below timer resolution",
                    row.n_channels, row.n_poles, row.variant, row.median_seconds
                );
            }
            emit(&bench_rows_to_csv(&rows), out.as_ref())
        }

        Command::Report {
            timings,
            format,
            out,
        } => {
            let report = TimingReport::from_timings(&timings)?;
            emit(&render_report(&report, format)?, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
