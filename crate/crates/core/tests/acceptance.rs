//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p fem-core --test acceptance`.

// `ensure!` negates the condition on purpose: a NaN measurement must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fem_core::assembly::{
    assemble, assemble_standard_dense, local_stiffness_normals, local_stiffness_reference, AssemblyStrategy,
};
use fem_core::benchmark::{run_bench, BenchConfig};
use fem_core::convergence::{run_convergence, ConvergenceReport, StudyConfig};
use fem_core::dense::dense_direct_solve;
use fem_core::geometry::{factorial, is_degenerate, signed_measure};
use fem_core::mesh::{generate, Mesh, Shape};
use fem_core::presets::{BoundarySpec, Preset};
use fem_core::quadrature::{all_rules, integrate, simpson_interval, QuadRule};
use fem_core::solver::{build_reduced_system, cg_solve, solve_poisson, Preconditioner, SolveOptions};
use fem_core::sparse::{CscMatrix, Triplets};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

// 1 ------------------------------------------------------------------------

fn csc_fidelity() -> Outcome {
    // one-based data of the 4x3 example
    let (i1, j1, s) = ([1, 2, 4, 2], [1, 2, 2, 3], [1.0, 2.0, 9.0, 4.0]);
    let t = Triplets::from_parts(
        4,
        3,
        i1.iter().map(|v| v - 1).collect(),
        j1.iter().map(|v| v - 1).collect(),
        s.to_vec(),
    )
    .map_err(|e| e.to_string())?;
    let a = CscMatrix::from_triplets(&t).map_err(|e| e.to_string())?;
    let col_ptr: Vec<usize> = a.col_ptr().iter().map(|p| p + 1).collect();
    ensure!(col_ptr == [1, 2, 4, 5], "column pointer {col_ptr:?}");
    let rows: Vec<usize> = a.row_idx().iter().map(|r| r + 1).collect();
    ensure!(rows == [1, 2, 4, 2], "row indices {rows:?}");
    ensure!(a.values() == [1.0, 2.0, 9.0, 4.0], "values {:?}", a.values());
    let found: Vec<(usize, usize, f64)> = a.find().iter().map(|(i, j, v)| (i + 1, j + 1, v)).collect();
    ensure!(
        found == [(1, 1, 1.0), (2, 2, 2.0), (4, 2, 9.0), (2, 3, 4.0)],
        "find order {found:?}"
    );
    Ok("col_ptr [1 2 4 5], find column-major".into())
}

// 2 ------------------------------------------------------------------------

fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..(dim + 1) * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = signed_measure(dim, &v);
        if is_degenerate(dim, m, &v) {
            continue;
        }
        // keep shape-regular simplices, reorder to positive orientation
        let longest = fem_core::geometry::longest_edge(dim, &v);
        if m.abs() < 0.02 * longest.powi(dim as i32) {
            continue;
        }
        let mut v = v;
        if m < 0.0 {
            for c in 0..dim {
                v.swap(c, dim + c);
            }
        }
        return v;
    }
}

fn local_stiffness_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_diff: f64 = 0.0;
    let mut worst_row: f64 = 0.0;
    for dim in [2, 3] {
        for _ in 0..1000 {
            let v = random_simplex(&mut rng, dim);
            let a = local_stiffness_reference(dim, &v).map_err(|e| e.to_string())?;
            let b = local_stiffness_normals(dim, &v).map_err(|e| e.to_string())?;
            // differences are measured against the entry scale of the element
            let scale = (0..=dim)
                .flat_map(|i| (0..=dim).map(move |j| (i, j)))
                .fold(0.0f64, |m, (i, j)| m.max(a.get(i, j).abs()));
            for i in 0..=dim {
                for j in 0..=dim {
                    worst_diff = worst_diff.max((a.get(i, j) - b.get(i, j)).abs() / scale);
                }
                worst_row = worst_row.max(a.row(i).iter().sum::<f64>().abs());
                worst_row = worst_row.max(b.row(i).iter().sum::<f64>().abs());
            }
        }
    }
    ensure!(worst_diff <= 1e-14, "routes differ by {worst_diff:e} relative");
    ensure!(worst_row <= 1e-13, "row sum {worst_row:e}");
    Ok(format!("max relative diff {worst_diff:.1e}, max row sum {worst_row:.1e}"))
}

// 3, 4 --------------------------------------------------------------------

fn oracle_meshes() -> Vec<(Shape, usize)> {
    let mut v = Vec::new();
    for n in [1, 2, 3, 4, 8, 16] {
        v.push((Shape::UnitSquare, n));
    }
    for n in [1, 2, 4, 8] {
        v.push((Shape::LShape, n));
    }
    for n in [1, 2, 3, 4] {
        v.push((Shape::UnitCube, n));
    }
    v
}

fn cross_strategy() -> Outcome {
    let mut worst: f64 = 0.0;
    for (shape, n) in oracle_meshes() {
        let mesh = generate(shape, n).map_err(|e| e.to_string())?;
        let dense = assemble_standard_dense(&mesh).map_err(|e| e.to_string())?;
        for s in [AssemblyStrategy::TripletLoop, AssemblyStrategy::Blockwise] {
            let a = assemble(&mesh, s).map_err(|e| e.to_string())?.to_dense();
            for (x, y) in a.as_slice().iter().zip(dense.as_slice()) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    ensure!(worst <= 1e-14, "max entry difference {worst:e}");
    Ok(format!("{} meshes, max difference {worst:.1e}", oracle_meshes().len()))
}

fn kernel_symmetry() -> Outcome {
    let mut meshes = oracle_meshes();
    meshes.extend([(Shape::UnitSquare, 64), (Shape::LShape, 16), (Shape::UnitCube, 8)]);
    let mut worst_kernel: f64 = 0.0;
    let mut count = 0;
    for (shape, n) in meshes {
        let mesh = generate(shape, n).map_err(|e| e.to_string())?;
        for s in AssemblyStrategy::ALL {
            if s == AssemblyStrategy::DenseOracle && mesh.n_nodes() > fem_core::dense::DENSE_LIMIT {
                continue;
            }
            let a = assemble(&mesh, s).map_err(|e| e.to_string())?;
            let r = a.matvec(&vec![1.0; mesh.n_nodes()]).map_err(|e| e.to_string())?;
            let k = r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / a.max_abs();
            worst_kernel = worst_kernel.max(k);
            ensure!(a == a.transpose(), "{s} on {shape}:{n} is not symmetric");
            count += 1;
        }
    }
    ensure!(worst_kernel <= 1e-10, "|A 1| / max|A| = {worst_kernel:e}");
    Ok(format!("{count} matrices symmetric, max |A1|/max|A| {worst_kernel:.1e}"))
}

// 5 ------------------------------------------------------------------------

/// Exact `int prod lambda_k^{a_k}` over a `dim`-simplex divided by its measure.
fn barycentric_moment(exps: &[usize]) -> f64 {
    let dim = exps.len() - 1;
    let total: usize = exps.iter().sum();
    factorial(dim) * exps.iter().map(|&a| factorial(a)).product::<f64>() / factorial(total + dim)
}

fn exponent_tuples(parts: usize, max_total: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return (0..=max_total).map(|a| vec![a]).collect();
    }
    let mut out = Vec::new();
    for a in 0..=max_total {
        for mut rest in exponent_tuples(parts - 1, max_total - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

fn reference_simplex(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; (dim + 1) * dim];
    for k in 0..dim {
        v[(k + 1) * dim + k] = 1.0;
    }
    v
}

fn check_rule(r: &QuadRule) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for exps in exponent_tuples(r.dim + 1, r.order) {
        let q: f64 = r
            .points()
            .map(|(l, w)| w * l.iter().zip(&exps).map(|(x, &a)| x.powi(a as i32)).product::<f64>())
            .sum();
        let exact = barycentric_moment(&exps);
        worst = worst.max((q - exact).abs() / exact);
    }
    // Cartesian monomials through the public integrator on the reference simplex
    let verts = reference_simplex(r.dim);
    let measure = 1.0 / factorial(r.dim);
    for exps in exponent_tuples(r.dim, r.order) {
        let q = integrate(r, &verts, |p| p.iter().zip(&exps).map(|(x, &a)| x.powi(a as i32)).product())
            .map_err(|e| e.to_string())?;
        let mut full = vec![0];
        full.extend(&exps);
        let exact = barycentric_moment(&full) * measure;
        worst = worst.max((q - exact).abs() / exact);
    }
    Ok(worst)
}

fn quadrature_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let rules = all_rules();
    for r in &rules {
        let e = check_rule(r)?;
        ensure!(e <= 1e-12, "{} ({}-D, order {}) relative error {e:e}", r.name, r.dim, r.order);
        worst = worst.max(e);
        if r.name.starts_with("gauss") {
            let n: usize = r.name[5..].parse().unwrap();
            ensure!(r.order == 2 * n - 1, "{} declares order {}", r.name, r.order);
        }
    }
    let s = simpson_interval(0.0, 1.0, |x| x.powi(3)).map_err(|e| e.to_string())?;
    ensure!((s - 0.25).abs() <= 1e-12 * 0.25, "Simpson x^3 gives {s}");
    Ok(format!("{} rules, max relative error {worst:.1e}", rules.len()))
}

// 6-9 ---------------------------------------------------------------------

fn study(shape: Shape, preset: Preset, levels: &[usize]) -> Result<ConvergenceReport, String> {
    run_convergence(&StudyConfig::new(shape, preset, levels.to_vec())).map_err(|e| e.to_string())
}

fn in_range(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

fn rates(rep: &ConvergenceReport) -> String {
    rep.rows
        .iter()
        .filter_map(|r| r.l2_rate)
        .map(|r| format!("{r:.3}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn dirichlet_2d() -> Outcome {
    let rep = study(Shape::UnitSquare, Preset::SinSin, &[8, 16, 32, 64])?;
    let last = rep.last().unwrap();
    let (l2, h1) = (last.l2_rate.unwrap(), last.h1_rate.unwrap());
    ensure!(in_range(l2, 1.9, 2.1), "L2 rate {l2:.4}");
    ensure!(in_range(h1, 0.95, 1.05), "H1 rate {h1:.4}");
    Ok(format!("L2 rate {l2:.3}, H1 rate {h1:.3}"))
}

fn pure_neumann() -> Outcome {
    let rep = study(Shape::UnitSquare, Preset::NeumannPure, &[8, 16, 32])?;
    let l2 = rep.last().unwrap().l2_rate.unwrap();
    ensure!(in_range(l2, 1.8, 2.2), "L2 rate {l2:.4} (rates {})", rates(&rep));

    let mut worst: f64 = 0.0;
    for n in [8, 16, 32] {
        let mesh = BoundarySpec::PureNeumann
            .apply(&generate(Shape::UnitSquare, n).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let problem = Preset::NeumannPure.manufactured(2).problem_on(&mesh, Some(Shape::UnitSquare));
        let solve = |pin: usize| {
            let opts = SolveOptions {
                rel_tol: 1e-13,
                pin_node: pin,
                ..Default::default()
            };
            solve_poisson(&mesh, &problem, &opts).map_err(|e| e.to_string())
        };
        let first = solve(0)?;
        let last = solve(mesh.n_nodes() - 1)?;
        for (a, b) in first.u.iter().zip(&last.u) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure!(worst <= 1e-9, "pin choice changes solution by {worst:e}");
    Ok(format!("L2 rate {l2:.3}, pin sensitivity {worst:.1e}"))
}

fn mixed_bc() -> Outcome {
    let rep = study(Shape::UnitSquare, Preset::Mixed, &[8, 16, 32, 64])?;
    for r in rep.rows.iter().filter_map(|r| r.l2_rate) {
        ensure!(in_range(r, 1.85, 2.15), "L2 rates {}", rates(&rep));
    }
    Ok(format!("L2 rates {}", rates(&rep)))
}

fn convergence_3d() -> Outcome {
    let rep = study(Shape::UnitCube, Preset::SinSin, &[2, 4, 8])?;
    let l2 = rep.last().unwrap().l2_rate.unwrap();
    ensure!(in_range(l2, 1.7, 2.2), "L2 rate {l2:.4} (rates {})", rates(&rep));
    Ok(format!("L2 rates {}", rates(&rep)))
}

// 10 -----------------------------------------------------------------------

fn linear_exactness() -> Outcome {
    let meshes = [
        (Shape::UnitSquare, 1),
        (Shape::UnitSquare, 8),
        (Shape::UnitSquare, 32),
        (Shape::LShape, 2),
        (Shape::LShape, 16),
        (Shape::UnitCube, 1),
        (Shape::UnitCube, 4),
        (Shape::UnitCube, 8),
    ];
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for (shape, n) in meshes {
        let base = generate(shape, n).map_err(|e| e.to_string())?;
        let man = Preset::Linear.manufactured(shape.dim());
        for bc in [BoundarySpec::Dirichlet, BoundarySpec::Mixed] {
            let mesh = bc.apply(&base).map_err(|e| e.to_string())?;
            let problem = man.problem_on(&mesh, Some(shape));
            let sol = solve_poisson(&mesh, &problem, &SolveOptions::default()).map_err(|e| e.to_string())?;
            for (i, u) in sol.u.iter().enumerate() {
                worst = worst.max((u - (man.exact)(mesh.node(i))).abs());
            }
            solves += 1;
        }
    }
    ensure!(worst <= 1e-9, "nodal error {worst:e}");
    Ok(format!("{solves} solves, max nodal error {worst:.1e}"))
}

// 11 -----------------------------------------------------------------------

fn scaling() -> Outcome {
    let rep = run_bench(&BenchConfig::new(
        Shape::UnitSquare,
        vec![16, 32, 64, 128],
        vec![AssemblyStrategy::Blockwise],
    ))
    .map_err(|e| e.to_string())?;
    let p = rep.fit(AssemblyStrategy::Blockwise).unwrap().time_exponent;
    ensure!(p <= 1.3, "blockwise time exponent {p:.3}");
    let m: Mesh = generate(Shape::UnitSquare, 64).map_err(|e| e.to_string())?;
    let ratio = m.n_elems() as f64 / m.n_nodes() as f64;
    ensure!(in_range(ratio, 1.85, 2.0), "NT/N = {ratio:.4}");
    Ok(format!("exponent {p:.3}, NT/N at n=64 {ratio:.4}"))
}

// 12 -----------------------------------------------------------------------

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> CscMatrix {
    let mut t = Triplets::new(n, n);
    let mut row_abs = vec![0.0; n];
    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let v: f64 = rng.gen_range(-1.0..1.0);
        t.push(i, j, v);
        t.push(j, i, v);
        row_abs[i] += v.abs();
        row_abs[j] += v.abs();
    }
    for (k, s) in row_abs.iter().enumerate() {
        t.push(k, k, s + rng.gen_range(0.1..2.0));
    }
    CscMatrix::from_triplets(&t).unwrap()
}

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn cg_vs_dense(a: &CscMatrix, b: &[f64], opts: &SolveOptions) -> Result<f64, String> {
    let x = cg_solve(a, b, opts).map_err(|e| e.to_string())?.x;
    let y = dense_direct_solve(&a.to_dense(), b).map_err(|e| e.to_string())?;
    Ok(relative_gap(&x, &y))
}

fn solver_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let opts = SolveOptions {
        rel_tol: 1e-12,
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let n = rng.gen_range(1..=200);
        let a = random_spd(&mut rng, n);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pc = if k % 2 == 0 { Preconditioner::None } else { Preconditioner::Jacobi };
        worst = worst.max(cg_vs_dense(&a, &b, &SolveOptions { preconditioner: pc, ..opts.clone() })?);
    }
    let mut fem_systems = 0;
    for preset in [Preset::SinSin, Preset::NeumannPure, Preset::Mixed] {
        for n in [8, 16, 32, 64] {
            let mesh = preset
                .default_boundary()
                .apply(&generate(Shape::UnitSquare, n).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let problem = preset.manufactured(2).problem_on(&mesh, Some(Shape::UnitSquare));
            let sys = build_reduced_system(&mesh, &problem, &opts).map_err(|e| e.to_string())?;
            if sys.matrix.nrows() > 500 {
                continue;
            }
            worst = worst.max(cg_vs_dense(&sys.matrix, &sys.rhs, &opts)?);
            fem_systems += 1;
        }
    }
    ensure!(worst <= 1e-8, "relative gap {worst:e}");
    Ok(format!("50 random + {fem_systems} FEM systems, max relative gap {worst:.1e}"))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "CSC fidelity", budget: Duration::from_millis(1), run: csc_fidelity },
        Criterion { id: 2, name: "local stiffness oracle", budget: Duration::from_secs(1), run: local_stiffness_oracle },
        Criterion { id: 3, name: "cross-strategy assembly", budget: Duration::from_secs(10), run: cross_strategy },
        Criterion { id: 4, name: "kernel and symmetry", budget: Duration::from_secs(5), run: kernel_symmetry },
        Criterion { id: 5, name: "quadrature exactness", budget: Duration::from_secs(1), run: quadrature_exactness },
        Criterion { id: 6, name: "Dirichlet convergence 2-D", budget: Duration::from_secs(30), run: dirichlet_2d },
        Criterion { id: 7, name: "pure Neumann", budget: Duration::from_secs(20), run: pure_neumann },
        Criterion { id: 8, name: "mixed boundary conditions", budget: Duration::from_secs(30), run: mixed_bc },
        Criterion { id: 9, name: "3-D convergence", budget: Duration::from_secs(60), run: convergence_3d },
        Criterion { id: 10, name: "linear exactness", budget: Duration::from_secs(5), run: linear_exactness },
        Criterion { id: 11, name: "assembly scaling", budget: Duration::from_secs(60), run: scaling },
        Criterion { id: 12, name: "solver cross-check", budget: Duration::from_secs(30), run: solver_cross_check },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str()) || *f == c.id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > c.budget => Err(format!("took {elapsed:?}, budget {:?}", c.budget)),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS  criterion {:>2} {:<28} {:>10.3?}  {detail}", c.id, c.name, elapsed),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {:>2} {:<28} {:>10.3?}  {detail}", c.id, c.name, elapsed);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
