use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use fem_core::assembly::assemble;
use fem_core::benchmark::{run_bench, BenchConfig};
use fem_core::convergence::{run_convergence, StudyConfig};
use fem_core::mesh::{generate, read_mesh};
use fem_core::quadrature::all_rules;
use fem_core::solver::{build_reduced_system, expand_solution, solve_reduced};
use fem_core::sparse::write_matrix_market;
use fem_core::{Mesh, Shape, SolveOptions};

use crate::output::{mesh_report, rules_report, solution_csv};
use crate::{BenchArgs, ConvergenceArgs, GenSpec, MeshInfoArgs, SolveArgs, SolverArgs};

fn solve_options(a: &SolverArgs) -> Result<SolveOptions> {
    if a.pin == 0 {
        bail!("--pin is one-based");
    }
    let opts = SolveOptions {
        rel_tol: a.tol,
        max_iter: a.max_iter,
        preconditioner: a.precond,
        method: a.method,
        pin_node: a.pin - 1,
        assembly: a.assembly,
    };
    opts.validate()?;
    Ok(opts)
}

/// Reads or generates the mesh; the shape is known only for generated meshes.
fn load_mesh(path: Option<&Path>, gen: Option<GenSpec>) -> Result<(Mesh, Option<Shape>)> {
    match (path, gen) {
        (Some(p), _) => Ok((read_mesh(p).with_context(|| format!("reading {}", p.display()))?, None)),
        (None, Some(g)) => Ok((generate(g.shape, g.n)?, Some(g.shape))),
        (None, None) => bail!("no mesh given"),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn solve(a: &SolveArgs) -> Result<()> {
    let opts = solve_options(&a.solver)?;
    let (mesh, shape) = load_mesh(a.source.mesh.as_deref(), a.source.generate)?;
    let mesh = match (shape, a.bc) {
        (Some(_), None) => a.problem.default_boundary().apply(&mesh)?,
        (_, Some(bc)) => bc.apply(&mesh)?,
        (None, None) => mesh,
    };
    if opts.pin_node >= mesh.n_nodes() {
        bail!("--pin {} exceeds the {} mesh nodes", a.solver.pin, mesh.n_nodes());
    }
    let problem = a.problem.manufactured(mesh.dim()).problem_on(&mesh, shape);

    let start = Instant::now();
    if let Some(path) = &a.matrix_out {
        write_matrix_market(&assemble(&mesh, opts.assembly)?, path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let sys = build_reduced_system(&mesh, &problem, &opts)?;
    let out = solve_reduced(&sys, &opts)?;
    let sol = expand_solution(&mesh, sys, out);
    let elapsed = start.elapsed().as_secs_f64();

    let csv = solution_csv(&mesh, &sol.u);
    let summary = format!(
        "N {} NT {} free {} iterations {} relres {:.3e} time {elapsed:.3}s",
        mesh.n_nodes(),
        mesh.n_elems(),
        sol.partition.free_nodes.len(),
        sol.iterations,
        sol.final_relres
    );
    match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            println!("{summary}");
        }
        None => {
            print!("{csv}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

pub fn convergence(a: &ConvergenceArgs) -> Result<()> {
    if a.levels.is_empty() || a.levels.contains(&0) {
        bail!("--levels needs positive subdivision counts");
    }
    let mut cfg = StudyConfig::new(a.shape, a.problem, a.levels.clone());
    if let Some(bc) = a.bc {
        cfg.boundary = bc;
    }
    cfg.opts = solve_options(&a.solver)?;
    let report = run_convergence(&cfg)?;
    print!("{}", report.to_table());
    if let Some(path) = &a.csv {
        write_file(path, &report.to_csv(a.timings))?;
    }
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Result<()> {
    if a.reps == 0 || a.sizes.is_empty() || a.strategies.is_empty() {
        bail!("--reps, --sizes and --strategies must be non-empty");
    }
    let mut cfg = BenchConfig::new(a.shape, a.sizes.clone(), a.strategies.clone());
    cfg.reps = a.reps;
    cfg.symmetric = a.symmetric;
    let report = run_bench(&cfg)?;
    print!("{}", report.to_table());
    if let Some(path) = &a.csv {
        write_file(path, &report.to_csv())?;
    }
    Ok(())
}

pub fn mesh_info(a: &MeshInfoArgs) -> Result<()> {
    let s = &a.source;
    if s.mesh.is_some() || s.generate.is_some() {
        let (mesh, _) = load_mesh(s.mesh.as_deref(), s.generate)?;
        print!("{}", mesh_report(&mesh));
    }
    if s.rules {
        print!("{}", rules_report(&all_rules()));
    }
    Ok(())
}
