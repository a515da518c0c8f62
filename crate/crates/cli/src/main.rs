use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use dpg_core::adaptivity::{adaptive_loop_with, Refinement};
use dpg_core::experiment::{csv_row, ExperimentConfig, ProblemKind, CSV_HEADER};
use dpg_core::mesh::Mesh;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    Manufactured,
    Unaligned,
    Lshape,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RefineArg {
    Uniform,
    Adaptive,
}

/// DPG solver for -ε Δu + c u = f with balanced-norm error control.
#[derive(Debug, Parser)]
#[command(name = "dpg", version)]
struct Args {
    #[arg(long, value_enum, default_value = "manufactured")]
    problem: ProblemArg,

    /// ε = 10^n.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eps_exp: f64,

    #[arg(long, default_value_t = 0.25)]
    alpha: f64,

    #[arg(long, default_value_t = 0.5)]
    beta: f64,

    /// Polynomial order r of the broken test space (0..=6).
    #[arg(long, default_value_t = 4)]
    test_order: usize,

    #[arg(long, value_enum, default_value = "adaptive")]
    refine: RefineArg,

    /// Dörfler bulk parameter.
    #[arg(long, default_value_t = 0.75)]
    theta: f64,

    /// Stop before a mesh with more elements would be solved.
    #[arg(long, default_value_t = 20_000)]
    max_elements: usize,

    /// Stop after this many solved meshes.
    #[arg(long)]
    max_steps: Option<usize>,

    /// Relative residual tolerance of conjugate gradients.
    #[arg(long, default_value_t = 1e-10)]
    cg_tol: f64,

    /// Diagonal scaling in conjugate gradients (off by default).
    #[arg(long)]
    jacobi: bool,

    /// Output directory; CSV goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads for assembly and estimation; 1 gives bitwise reproducible output.
    #[arg(long)]
    threads: Option<usize>,

    /// Write every mesh in text format to the output directory.
    #[arg(long)]
    dump_meshes: bool,

    /// Start from this mesh instead of the built-in one.
    #[arg(long)]
    initial_mesh: Option<PathBuf>,

    /// Repeat the run for every test order 0..=6, one CSV per order.
    #[arg(long)]
    sweep_test_order: bool,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Args {
    fn config(&self) -> Result<ExperimentConfig> {
        let eps = 10f64.powf(self.eps_exp);
        if !(eps > 0.0 && eps.is_finite()) {
            bail!("--eps-exp {} gives ε outside the floating-point range", self.eps_exp);
        }
        let initial_mesh = match &self.initial_mesh {
            Some(p) => Some(Mesh::read(p).with_context(|| format!("reading mesh {}", p.display()))?),
            None => None,
        };
        let config = ExperimentConfig {
            problem: match self.problem {
                ProblemArg::Manufactured => ProblemKind::Manufactured,
                ProblemArg::Unaligned => ProblemKind::Unaligned,
                ProblemArg::Lshape => ProblemKind::LShape,
            },
            eps,
            alpha: self.alpha,
            beta: self.beta,
            test_order: self.test_order,
            refinement: match self.refine {
                RefineArg::Uniform => Refinement::Uniform,
                RefineArg::Adaptive => Refinement::Adaptive,
            },
            theta: self.theta,
            max_elements: self.max_elements,
            max_steps: self.max_steps,
            cg_tol: self.cg_tol,
            jacobi: self.jacobi,
            initial_mesh,
            output_dir: self.out.clone(),
            dump_meshes: self.dump_meshes,
            seed: self.seed,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }
}

fn write_metadata(dir: &Path, config: &ExperimentConfig) -> Result<()> {
    let mut f = BufWriter::new(File::create(dir.join("metadata.txt"))?);
    writeln!(f, "problem={}", config.problem)?;
    writeln!(f, "eps={:e}", config.eps)?;
    writeln!(f, "alpha={}", config.alpha)?;
    writeln!(f, "beta={}", config.beta)?;
    writeln!(f, "test_order={}", config.test_order)?;
    writeln!(f, "refine={}", config.refinement)?;
    writeln!(f, "theta={}", config.theta)?;
    writeln!(f, "max_elements={}", config.max_elements)?;
    writeln!(f, "cg_tol={:e}", config.cg_tol)?;
    writeln!(f, "jacobi={}", config.jacobi)?;
    writeln!(f, "seed={}", config.seed)?;
    Ok(())
}

fn run(config: &ExperimentConfig, csv_name: &str) -> Result<()> {
    let mut out: Box<dyn Write> = match &config.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write_metadata(dir, config)?;
            Box::new(BufWriter::new(File::create(dir.join(csv_name))?))
        }
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "{CSV_HEADER}")?;
    let mesh_prefix = csv_name.trim_end_matches(".csv");
    adaptive_loop_with(config, |step| {
        let row = csv_row(step);
        writeln!(out, "{row}")?;
        out.flush()?;
        eprintln!(
            "step {:>3}  #T {:>7}  eta^2 {:.6e}  cg {:>6}  {:.0} ms",
            step.step, step.report.n_elements, step.report.eta_sq, step.report.cg_iterations, step.wall_ms
        );
        if config.dump_meshes {
            if let Some(dir) = &config.output_dir {
                step.mesh.write(dir.join(format!("{mesh_prefix}_mesh_{:03}.txt", step.step)))?;
            }
        }
        Ok(())
    })
    .context("experiment failed")?;
    Ok(())
}

fn main() -> Result<()> {
    let args = Args::parse();
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let config = args.config()?;
    if args.dump_meshes && config.output_dir.is_none() {
        bail!("--dump-meshes needs --out");
    }
    if args.sweep_test_order {
        if config.output_dir.is_none() {
            bail!("--sweep-test-order needs --out");
        }
        // a failing order (low orders can stall CG) does not stop the sweep
        let mut failed = Vec::new();
        for r in 0..=dpg_core::basis::MAX_ORDER {
            let c = ExperimentConfig {
                test_order: r,
                ..config.clone()
            };
            eprintln!("test order {r}");
            if let Err(e) = run(&c, &format!("{}_r{r}.csv", config.problem)) {
                eprintln!("test order {r} failed: {e:#}");
                failed.push(r);
            }
        }
        if !failed.is_empty() {
            bail!("sweep failed for test orders {failed:?}");
        }
        return Ok(());
    }
    run(&config, &format!("{}.csv", config.problem))
}
