use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use drops_core::export::droplet_mesh;
use drops_core::tomo::{rms_error, RmsReport};
use drops_core::{
    full_basis, Backend, DropletFunction, Error, ExperimentConfig, Result, SampleSet, SamplingPath,
    TomographyGrid,
};

#[derive(Parser)]
#[command(
    name = "drops",
    version,
    about = "Droplet tomography of coupled spin-1/2 systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the spherical tensor basis and check its orthonormality.
    Basis {
        #[arg(short, long)]
        n: usize,
        /// Print every component matrix.
        #[arg(long)]
        matrices: bool,
    },
    /// Run a tomography scan described by a config file.
    Tomo(TomoArgs),
    /// Write one PLY mesh per droplet from samples (CSV) or coefficients (JSON).
    ExportMesh {
        input: PathBuf,
        /// Grid for coefficient input, as betaStep,alphaStep in degrees.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(f64, f64)>,
        /// Catmull-Rom refinement factor; 1 keeps the raw grid.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// RMS difference between two sample files.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
struct TomoArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    flip_error: Option<f64>,
    /// betaStep,alphaStep in degrees.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_path)]
    path: Option<SamplingPath>,
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> std::result::Result<(f64, f64), String> {
    let (b, a) = s.split_once(',').ok_or("expected betaStep,alphaStep")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok((num(b)?, num(a)?))
}

fn parse_path(s: &str) -> std::result::Result<SamplingPath, String> {
    match s.parse() {
        Ok(SamplingPath::Averaged) | Err(_) => {
            Err("expected analytic, expectation or indirect".into())
        }
        Ok(p) => Ok(p),
    }
}

fn parse_backend(s: &str) -> std::result::Result<Backend, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Basis { n, matrices } => cmd_basis(n, matrices),
        Command::Tomo(args) => cmd_tomo(args),
        Command::ExportMesh {
            input,
            grid,
            refine,
            out,
        } => cmd_export_mesh(&input, grid, refine, &out),
        Command::Compare { a, b } => cmd_compare(&a, &b),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Contract(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn cmd_basis(n: usize, matrices: bool) -> Result<()> {
    let basis = full_basis(n)?;
    println!("{} components for {n} spin(s)", basis.len());
    println!("{:<6} {:>2} {:>3} {:>12}", "label", "j", "m", "norm");
    for t in basis.components() {
        println!(
            "{:<6} {:>2} {:>3} {:>12.9}",
            t.label.to_string(),
            t.j,
            t.m,
            t.op.norm()
        );
        if matrices {
            for row in t.op.matrix().row_iter() {
                let cells: Vec<String> = row
                    .iter()
                    .map(|c| format!("{:+.4}{:+.4}i", c.re, c.im))
                    .collect();
                println!("    [{}]", cells.join(", "));
            }
        }
    }
    let defect = basis.orthonormality_defect();
    println!("max orthonormality deviation: {defect:.3e}");
    if defect > 1e-12 {
        return Err(Error::Contract(format!(
            "basis is not orthonormal ({defect:e})"
        )));
    }
    Ok(())
}

fn print_report(report: &RmsReport) {
    println!("{:<8} {:>12}", "droplet", "rms");
    for (label, e) in &report.per_label {
        println!("{:<8} {:>12.6e}", label.to_string(), e);
    }
    println!("{:<8} {:>12.6e}", "overall", report.overall);
}

fn write_report(report: &RmsReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["droplet", "rms"])?;
    for (label, e) in &report.per_label {
        w.write_record([label.to_string(), e.to_string()])?;
    }
    w.write_record(["overall".to_string(), report.overall.to_string()])?;
    w.flush()?;
    Ok(())
}

fn cmd_tomo(args: TomoArgs) -> Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.noise.seed = Some(seed);
    }
    if let Some(sigma) = args.sigma {
        config.noise.sigma = sigma;
    }
    if let Some(eps) = args.flip_error {
        config.noise.flip_error = eps;
    }
    if let Some((b, a)) = args.grid {
        config.grid.beta_step_deg = b;
        config.grid.alpha_step_deg = a;
    }
    if let Some(p) = args.path {
        config.path = p;
    }
    if let Some(b) = args.backend {
        config.backend = b;
    }
    let out = match args.out {
        Some(o) => o,
        None => config.base_dir.join(&config.out),
    };
    let run = config.run()?;
    fs::create_dir_all(&out)?;
    run.samples.save_csv(&out.join("samples.csv"))?;
    run.reference.save_csv(&out.join("reference.csv"))?;
    write_report(&run.report, &out.join("rms.csv"))?;
    println!(
        "{} samples ({} path) written to {}",
        run.samples.len(),
        run.samples.path(),
        out.display()
    );
    print_report(&run.report);
    Ok(())
}

fn cmd_export_mesh(
    input: &Path,
    grid: Option<(f64, f64)>,
    refine: usize,
    out: &Path,
) -> Result<()> {
    let is_json = input.extension().is_some_and(|e| e == "json");
    let set = if is_json {
        let d = DropletFunction::read_json(input)?;
        let grid = match grid {
            Some((b, a)) => TomographyGrid::from_steps(b, a)?,
            None => TomographyGrid::default(),
        };
        SampleSet::from_droplets(&d, &d.labels(), &grid)
    } else {
        if grid.is_some() {
            return Err(Error::InvalidArgument(
                "--grid applies to coefficient input only".into(),
            ));
        }
        SampleSet::load_csv(input)?
    };
    fs::create_dir_all(out)?;
    for label in set.labels() {
        let mesh = droplet_mesh(&set, label, refine)?;
        if mesh.is_degenerate() {
            eprintln!("warning: droplet {label} vanishes; writing a point mesh");
        }
        let path = out.join(format!("droplet_{label}.ply"));
        mesh.save_ply(&path, &format!("droplet {label}"))?;
        println!(
            "{} ({} vertices, {} faces)",
            path.display(),
            mesh.vertices.len(),
            mesh.faces.len()
        );
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path) -> Result<()> {
    let sa = SampleSet::load_csv(a)?;
    let sb = SampleSet::load_csv(b)?;
    print_report(&rms_error(&sa, &sb)?);
    Ok(())
}
