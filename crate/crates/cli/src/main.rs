//! `fem`: solve, convergence studies, assembly benchmarks and mesh reports.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use fem_core::{AssemblyStrategy, BoundarySpec, Method, Preconditioner, Preset, Shape};

#[derive(Parser)]
#[command(name = "fem", version, about = "P1 finite elements for the Poisson equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write the nodal solution.
    Solve(SolveArgs),
    /// Solve on a sequence of meshes and report error rates.
    Convergence(ConvergenceArgs),
    /// Time the assembly strategies over a range of mesh sizes.
    Bench(BenchArgs),
    /// Summarize a mesh, or print the quadrature tables.
    MeshInfo(MeshInfoArgs),
}

/// `shape:n`, e.g. `unit_square:8`.
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub shape: Shape,
    pub n: usize,
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (shape, n) = s.split_once(':').ok_or_else(|| format!("expected shape:n, got '{s}'"))?;
        let shape = shape.parse::<Shape>().map_err(|e| e.to_string())?;
        let n = n.parse::<usize>().map_err(|_| format!("'{n}' is not a subdivision count"))?;
        if n == 0 {
            return Err("subdivision count must be at least 1".into());
        }
        Ok(GenSpec { shape, n })
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
pub struct MeshSource {
    /// Mesh file to read.
    #[arg(long, value_name = "PATH")]
    pub mesh: Option<PathBuf>,
    /// Generated mesh, `unit_square:n`, `lshape:n` or `unit_cube:n`.
    #[arg(long = "gen", value_name = "SHAPE:N")]
    pub generate: Option<GenSpec>,
}

#[derive(Args)]
pub struct SolverArgs {
    #[arg(long, default_value = "cg", value_name = "cg|dense")]
    pub method: Method,
    #[arg(long, default_value = "auto", value_name = "none|jacobi|auto")]
    pub precond: Preconditioner,
    /// Relative residual tolerance of CG.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// CG iteration cap; ten times the system order by default.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Node (one-based) pinned to zero in pure-Neumann problems.
    #[arg(long, default_value_t = 1)]
    pub pin: usize,
    #[arg(long, default_value = "blockwise", value_name = "dense_oracle|triplet_loop|blockwise")]
    pub assembly: AssemblyStrategy,
}

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: MeshSource,
    #[arg(long, default_value = "sinsin")]
    pub problem: Preset,
    /// Boundary labelling; the preset's own choice if omitted. Ignored for mesh files.
    #[arg(long, value_name = "dirichlet|pure-neumann|mixed")]
    pub bc: Option<BoundarySpec>,
    /// Solution CSV; written to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// MatrixMarket dump of the full stiffness matrix.
    #[arg(long, value_name = "PATH")]
    pub matrix_out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value = "unit_square")]
    pub shape: Shape,
    #[arg(long, default_value = "sinsin")]
    pub problem: Preset,
    #[arg(long, value_name = "dirichlet|pure-neumann|mixed")]
    pub bc: Option<BoundarySpec>,
    /// Subdivision counts, e.g. `8,16,32,64`.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub levels: Vec<usize>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Include wall-clock columns in the CSV (makes it run-dependent).
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "unit_square")]
    pub shape: Shape,
    #[arg(long, value_delimiter = ',', default_value = "triplet_loop,blockwise")]
    pub strategies: Vec<AssemblyStrategy>,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    pub sizes: Vec<usize>,
    /// Repetitions per point; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Compute only the upper local blocks and mirror them.
    #[arg(long)]
    pub symmetric: bool,
}

#[derive(Args)]
#[group(required = true, multiple = true)]
pub struct MeshInfoSource {
    #[arg(long, value_name = "PATH", conflicts_with = "generate")]
    pub mesh: Option<PathBuf>,
    #[arg(long = "gen", value_name = "SHAPE:N")]
    pub generate: Option<GenSpec>,
    /// Print every quadrature rule.
    #[arg(long)]
    pub rules: bool,
}

#[derive(Args)]
pub struct MeshInfoArgs {
    #[command(flatten)]
    pub source: MeshInfoSource,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Convergence(a) => commands::convergence(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::MeshInfo(a) => commands::mesh_info(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_spec_parsing() {
        let g: GenSpec = "lshape:4".parse().unwrap();
        assert_eq!((g.shape, g.n), (Shape::LShape, 4));
        assert!("unit_cube".parse::<GenSpec>().is_err());
        assert!("unit_cube:x".parse::<GenSpec>().is_err());
        assert!("unit_cube:0".parse::<GenSpec>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
