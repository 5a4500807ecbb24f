//! Manufactured-solution convergence studies.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::Result;
use crate::mesh::{generate, Shape};
use crate::presets::{BoundarySpec, Preset};
use crate::solver::{build_reduced_system, expand_solution, solve_reduced, SolveOptions};
use crate::system::{discrete_average, error_norms};

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub shape: Shape,
    pub preset: Preset,
    pub boundary: BoundarySpec,
    /// Subdivisions per unit length, one solve each.
    pub levels: Vec<usize>,
    pub opts: SolveOptions,
}

impl StudyConfig {
    pub fn new(shape: Shape, preset: Preset, levels: Vec<usize>) -> Self {
        StudyConfig {
            shape,
            preset,
            boundary: preset.default_boundary(),
            levels,
            opts: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub n_nodes: usize,
    pub n_elems: usize,
    pub l2_error: f64,
    pub h1_error: f64,
    pub l2_rate: Option<f64>,
    pub h1_rate: Option<f64>,
    pub cg_iters: usize,
    /// Seconds spent assembling the reduced system.
    pub assemble_time: f64,
    /// Seconds spent in the linear solve.
    pub solve_time: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

/// Observed order between consecutive levels: `log(e_coarse / e_fine) / log(h_coarse / h_fine)`,
/// which is `log2` of the error ratio when `h` halves.
pub fn observed_rate(h_coarse: f64, e_coarse: f64, h_fine: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

pub const CSV_HEADER: &str = "# fem convergence csv v1";

impl ConvergenceReport {
    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }

    /// CSV with a versioned comment line. Timings are only written on request
    /// so that repeated runs give identical files.
    pub fn to_csv(&self, with_timings: bool) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push('\n');
        s.push_str("h,N,NT,l2_error,h1_error,l2_rate,h1_rate,cg_iters");
        if with_timings {
            s.push_str(",assemble_time,solve_time");
        }
        s.push('\n');
        let rate = |r: Option<f64>| r.map(|v| format!("{v:.6}")).unwrap_or_default();
        for r in &self.rows {
            write!(
                s,
                "{:.16e},{},{},{:.16e},{:.16e},{},{},{}",
                r.h,
                r.n_nodes,
                r.n_elems,
                r.l2_error,
                r.h1_error,
                rate(r.l2_rate),
                rate(r.h1_rate),
                r.cg_iters
            )
            .unwrap();
            if with_timings {
                write!(s, ",{:.6e},{:.6e}", r.assemble_time, r.solve_time).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{:>10} {:>8} {:>8} {:>12} {:>6} {:>12} {:>6} {:>6} {:>10} {:>10}",
            "h", "N", "NT", "L2 error", "rate", "H1 error", "rate", "iters", "assemble", "solve"
        )
        .unwrap();
        let rate = |r: Option<f64>| r.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            writeln!(
                s,
                "{:>10.4e} {:>8} {:>8} {:>12.4e} {:>6} {:>12.4e} {:>6} {:>6} {:>9.3}s {:>9.3}s",
                r.h,
                r.n_nodes,
                r.n_elems,
                r.l2_error,
                rate(r.l2_rate),
                r.h1_error,
                rate(r.h1_rate),
                r.cg_iters,
                r.assemble_time,
                r.solve_time
            )
            .unwrap();
        }
        s
    }
}

/// Solves the preset on every level and measures the errors against the exact solution.
///
/// For pure-Neumann runs both the discrete solution and the exact solution are
/// compared after removing their discrete averages.
pub fn run_convergence(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::default();
    let man = cfg.preset.manufactured(cfg.shape.dim());
    for &n in &cfg.levels {
        let mesh = cfg.boundary.apply(&generate(cfg.shape, n)?)?;
        let problem = man.problem_on(&mesh, Some(cfg.shape));

        let start = Instant::now();
        let sys = build_reduced_system(&mesh, &problem, &cfg.opts)?;
        let assemble_time = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let out = solve_reduced(&sys, &cfg.opts)?;
        let solve_time = start.elapsed().as_secs_f64();
        let sol = expand_solution(&mesh, sys, out);

        let shift = if sol.pure_neumann {
            discrete_average(&mesh, &man.interpolate(&mesh))
        } else {
            0.0
        };
        let exact = man.exact.clone();
        let errs = error_norms(&mesh, &sol.u, &move |p| exact(p) - shift, man.grad.as_ref());

        let h = 1.0 / n as f64;
        let (l2_rate, h1_rate) = match report.rows.last() {
            Some(prev) => (
                Some(observed_rate(prev.h, prev.l2_error, h, errs.l2)),
                Some(observed_rate(prev.h, prev.h1_error, h, errs.h1_semi)),
            ),
            None => (None, None),
        };
        report.rows.push(ConvergenceRow {
            h,
            n_nodes: mesh.n_nodes(),
            n_elems: mesh.n_elems(),
            l2_error: errs.l2,
            h1_error: errs.h1_semi,
            l2_rate,
            h1_rate,
            cg_iters: sol.iterations,
            assemble_time,
            solve_time,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_formula() {
        assert!((observed_rate(0.5, 4.0, 0.25, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_study_and_csv() {
        let cfg = StudyConfig::new(Shape::UnitSquare, Preset::SinSin, vec![4, 8]);
        let rep = run_convergence(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.rows[0].l2_rate.is_none());
        assert!(rep.rows[1].l2_rate.unwrap() > 1.5);
        let csv = rep.to_csv(false);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv, run_convergence(&cfg).unwrap().to_csv(false));
        assert!(rep.to_table().contains("L2 error"));
    }
}
