//! Reduced free-node solve and the full Poisson pipeline.

use std::fmt;
use std::str::FromStr;

use crate::assembly::{assemble, AssemblyStrategy};
use crate::dense::dense_direct_solve;
use crate::error::{Error, Result};
use crate::mesh::{BoundaryFlag, Mesh};
use crate::sparse::CscMatrix;
use crate::system::{
    apply_dirichlet, apply_neumann, assemble_load, enforce_compatibility, zero_average_shift, BoundaryPartition,
    PoissonProblem,
};

/// Systems at least this large get Jacobi preconditioning under [`Preconditioner::Auto`].
pub const AUTO_JACOBI_MIN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    None,
    Jacobi,
    /// Jacobi for systems of order >= [`AUTO_JACOBI_MIN`].
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Cg,
    DenseDirect,
}

impl FromStr for Preconditioner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Preconditioner::None),
            "jacobi" => Ok(Preconditioner::Jacobi),
            "auto" => Ok(Preconditioner::Auto),
            _ => Err(Error::InvalidParameter(format!("unknown preconditioner '{s}'"))),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cg" => Ok(Method::Cg),
            "dense" | "dense_direct" => Ok(Method::DenseDirect),
            _ => Err(Error::InvalidParameter(format!("unknown solve method '{s}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Method::Cg => "cg",
            Method::DenseDirect => "dense_direct",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub rel_tol: f64,
    /// Defaults to ten times the system order.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
    pub method: Method,
    /// Node fixed to zero before the pure-Neumann solve.
    pub pin_node: usize,
    pub assembly: AssemblyStrategy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_tol: 1e-10,
            max_iter: None,
            preconditioner: Preconditioner::Auto,
            method: Method::Cg,
            pin_node: 0,
            assembly: AssemblyStrategy::Blockwise,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relres: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradients from a zero initial guess.
///
/// Stops when `|b - A x| <= rel_tol |b|` (recursive residual). On hitting the
/// iteration cap the best iterate is returned inside [`Error::MaxIterExceeded`].
pub fn cg_solve(a: &CscMatrix, b: &[f64], opts: &SolveOptions) -> Result<CgOutcome> {
    opts.validate()?;
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "CG on {:?} matrix with rhs of length {}",
            a.shape(),
            b.len()
        )));
    }
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relres: 0.0,
        });
    }
    let jacobi = match opts.preconditioner {
        Preconditioner::None => false,
        Preconditioner::Jacobi => true,
        Preconditioner::Auto => n >= AUTO_JACOBI_MIN,
    };
    let inv_diag: Option<Vec<f64>> = if jacobi {
        let diag = a.diagonal();
        if let Some((k, &d)) = diag.iter().enumerate().find(|(_, &d)| d.is_nan() || d <= 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: k, value: d });
        }
        Some(diag.iter().map(|d| 1.0 / d).collect())
    } else {
        None
    };
    let precondition = |r: &[f64], z: &mut Vec<f64>| match &inv_diag {
        Some(inv) => {
            z.clear();
            z.extend(r.iter().zip(inv).map(|(x, d)| x * d));
        }
        None => {
            z.clear();
            z.extend_from_slice(r);
        }
    };

    let max_iter = opts.max_iter.unwrap_or(10 * n).max(1);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = Vec::with_capacity(n);
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut relres = 1.0;
    for it in 1..=max_iter {
        a.matvec_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: it, value: pap });
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        relres = norm(&r) / bnorm;
        if relres <= opts.rel_tol {
            return Ok(CgOutcome {
                x,
                iterations: it,
                relres,
            });
        }
        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::MaxIterExceeded {
        x,
        iterations: max_iter,
        relres,
    })
}

/// Free-node system `A(free, free) x = b(free)` with the fixed values already in `u_fixed`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CscMatrix,
    pub rhs: Vec<f64>,
    /// Full-length vector holding the Dirichlet (or pinned) values, zero elsewhere.
    pub u_fixed: Vec<f64>,
    pub partition: BoundaryPartition,
    pub pure_neumann: bool,
}

/// Assembles the stiffness matrix and load, applies Neumann then Dirichlet
/// data, and restricts to the free nodes. Without Dirichlet faces the load
/// is made compatible and `pin_node` is fixed to zero.
pub fn build_reduced_system(mesh: &Mesh, problem: &PoissonProblem, opts: &SolveOptions) -> Result<ReducedSystem> {
    if mesh.has_flag(BoundaryFlag::Robin) {
        return Err(Error::UnsupportedBoundaryType(BoundaryFlag::Robin.value()));
    }
    let n = mesh.n_nodes();
    let a = assemble(mesh, opts.assembly)?;
    let mut b = assemble_load(mesh, problem.f.as_ref());
    if let Some(g_n) = &problem.g_n {
        b = apply_neumann(b, mesh, g_n.as_ref());
    }

    let (u_fixed, b, partition, pure_neumann) = if mesh.has_flag(BoundaryFlag::Dirichlet) {
        let g_d = problem.g_d.as_ref().ok_or_else(|| {
            Error::InvalidParameter("mesh has Dirichlet faces but the problem has no Dirichlet data".into())
        })?;
        let lift = apply_dirichlet(&a, &b, mesh, g_d.as_ref())?;
        (lift.u0, lift.b, lift.partition, false)
    } else {
        if opts.pin_node >= n {
            return Err(Error::IndexOutOfRange {
                index: opts.pin_node,
                bound: n,
            });
        }
        let b = enforce_compatibility(b);
        (vec![0.0; n], b, BoundaryPartition::pinned(mesh, opts.pin_node), true)
    };
    let free = &partition.free_nodes;
    let matrix = a.submatrix(free, free)?;
    let rhs = free.iter().map(|&k| b[k]).collect();
    Ok(ReducedSystem {
        matrix,
        rhs,
        u_fixed,
        partition,
        pure_neumann,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub final_relres: f64,
    pub partition: BoundaryPartition,
    pub pure_neumann: bool,
}

/// Solves the reduced system with the configured method; returns `(x, iterations, relres)`.
pub fn solve_reduced(sys: &ReducedSystem, opts: &SolveOptions) -> Result<CgOutcome> {
    match opts.method {
        Method::Cg => cg_solve(&sys.matrix, &sys.rhs, opts),
        Method::DenseDirect => {
            let x = dense_direct_solve(&sys.matrix.to_dense(), &sys.rhs)?;
            let ax = sys.matrix.matvec(&x)?;
            let r: Vec<f64> = ax.iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
            let bn = norm(&sys.rhs);
            let relres = if bn == 0.0 { norm(&r) } else { norm(&r) / bn };
            Ok(CgOutcome {
                x,
                iterations: 0,
                relres,
            })
        }
    }
}

/// Full solve of `-Δu = f` with the boundary conditions flagged on the mesh.
pub fn solve_poisson(mesh: &Mesh, problem: &PoissonProblem, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    let sys = build_reduced_system(mesh, problem, opts)?;
    let out = solve_reduced(&sys, opts)?;
    Ok(expand_solution(mesh, sys, out))
}

/// Writes the free values next to the fixed ones; pure-Neumann results are
/// shifted to zero average.
pub fn expand_solution(mesh: &Mesh, sys: ReducedSystem, out: CgOutcome) -> Solution {
    let mut u = sys.u_fixed;
    for (&k, &v) in sys.partition.free_nodes.iter().zip(&out.x) {
        u[k] = v;
    }
    if sys.pure_neumann {
        u = zero_average_shift(mesh, &u);
    }
    Solution {
        u,
        iterations: out.iterations,
        final_relres: out.relres,
        partition: sys.partition,
        pure_neumann: sys.pure_neumann,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::mesh::{generate, Shape};

    fn tridiag3() -> CscMatrix {
        CscMatrix::from_dense(
            &DenseMatrix::from_rows(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]).unwrap(),
        )
    }

    #[test]
    fn scaled_identity_in_one_step() {
        let a = CscMatrix::from_dense(&DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap());
        let out = cg_solve(&a, &[2.0, 4.0], &SolveOptions::default()).unwrap();
        assert_eq!(out.x, vec![1.0, 2.0]);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn tridiagonal() {
        for pc in [Preconditioner::None, Preconditioner::Jacobi] {
            let opts = SolveOptions {
                preconditioner: pc,
                ..Default::default()
            };
            let out = cg_solve(&tridiag3(), &[1.0, 1.0, 1.0], &opts).unwrap();
            for (u, v) in out.x.iter().zip([1.5, 2.0, 1.5]) {
                assert!((u - v).abs() < 1e-12);
            }
            assert!(out.iterations <= 3);
        }
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let out = cg_solve(&tridiag3(), &[0.0; 3], &SolveOptions::default()).unwrap();
        assert_eq!((out.x, out.iterations), (vec![0.0; 3], 0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            cg_solve(&tridiag3(), &[1.0; 2], &SolveOptions::default()),
            Err(Error::ShapeMismatch(_))
        ));
        let a = generate(Shape::UnitSquare, 8).unwrap();
        let k = assemble(&a, AssemblyStrategy::Blockwise).unwrap();
        let free: Vec<usize> = (1..k.nrows()).collect();
        let k = k.submatrix(&free, &free).unwrap();
        let b: Vec<f64> = (0..k.nrows()).map(|i| (i % 7) as f64 - 3.0).collect();
        let opts = SolveOptions {
            max_iter: Some(2),
            ..Default::default()
        };
        match cg_solve(&k, &b, &opts) {
            Err(Error::MaxIterExceeded { x, iterations: 2, relres }) => {
                assert_eq!(x.len(), k.nrows());
                assert!(relres > opts.rel_tol);
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = SolveOptions {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(cg_solve(&tridiag3(), &[1.0; 3], &bad), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn harmonic_linear_is_reproduced() {
        let m = generate(Shape::UnitSquare, 6).unwrap();
        let exact = |p: &[f64]| p[0] + p[1];
        let problem = PoissonProblem::new(|_| 0.0).with_dirichlet(exact);
        let sol = solve_poisson(&m, &problem, &SolveOptions::default()).unwrap();
        for i in 0..m.n_nodes() {
            assert!((sol.u[i] - exact(m.node(i))).abs() <= 1e-10);
        }
        for &v in &sol.partition.dirichlet_nodes {
            assert_eq!(sol.u[v], exact(m.node(v)));
        }
    }

    #[test]
    fn pure_neumann_zero_data() {
        let m = generate(Shape::UnitSquare, 4).unwrap().with_boundary_flags(|_| 2).unwrap();
        let sol = solve_poisson(&m, &PoissonProblem::new(|_| 0.0), &SolveOptions::default()).unwrap();
        assert!(sol.pure_neumann);
        assert!(sol.u.iter().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn robin_is_rejected() {
        let m = generate(Shape::UnitSquare, 2).unwrap().with_boundary_flags(|_| 3).unwrap();
        let problem = PoissonProblem::new(|_| 1.0).with_dirichlet(|_| 0.0);
        assert!(matches!(
            solve_poisson(&m, &problem, &SolveOptions::default()),
            Err(Error::UnsupportedBoundaryType(3))
        ));
    }

    #[test]
    fn missing_dirichlet_data() {
        let m = generate(Shape::UnitSquare, 2).unwrap();
        assert!(matches!(
            solve_poisson(&m, &PoissonProblem::new(|_| 1.0), &SolveOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn dense_method_agrees_with_cg() {
        let m = generate(Shape::LShape, 3).unwrap();
        let problem = PoissonProblem::new(|p| 1.0 + p[0]).with_dirichlet(|p| p[1]);
        let tight = SolveOptions {
            rel_tol: 1e-13,
            ..Default::default()
        };
        let cg = solve_poisson(&m, &problem, &tight).unwrap();
        let dense = solve_poisson(
            &m,
            &problem,
            &SolveOptions {
                method: Method::DenseDirect,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, b) in cg.u.iter().zip(&dense.u) {
            assert!((a - b).abs() <= 1e-10);
        }
    }
}
