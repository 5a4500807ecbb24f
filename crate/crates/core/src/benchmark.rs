//! Timing of the assembly strategies across mesh sizes.

use std::fmt::Write as _;
use std::time::Instant;

use crate::assembly::{assemble, assemble_blockwise_with, AssemblyStrategy};
use crate::dense::DENSE_LIMIT;
use crate::error::{Error, Result};
use crate::mesh::{generate, Mesh, Shape};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub shape: Shape,
    pub sizes: Vec<usize>,
    pub strategies: Vec<AssemblyStrategy>,
    /// Timed repetitions per point; the median is reported.
    pub reps: usize,
    /// Use the upper-triangle variant of the blockwise strategy.
    pub symmetric: bool,
}

impl BenchConfig {
    pub fn new(shape: Shape, sizes: Vec<usize>, strategies: Vec<AssemblyStrategy>) -> Self {
        BenchConfig {
            shape,
            sizes,
            strategies,
            reps: 5,
            symmetric: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub strategy: AssemblyStrategy,
    pub n: usize,
    pub n_nodes: usize,
    pub n_elems: usize,
    /// Median wall time in seconds.
    pub wall_time: f64,
    pub nnz: usize,
    /// Bytes of working storage: `8 N^2` for the dense oracle, triplet arrays plus CSC otherwise.
    pub footprint: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub strategy: AssemblyStrategy,
    /// Slope of `log(time)` against `log(N)`.
    pub time_exponent: f64,
    /// Slope of `log(footprint)` against `log(N)`.
    pub footprint_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub fits: Vec<ScalingFit>,
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn run_strategy(mesh: &Mesh, strategy: AssemblyStrategy, symmetric: bool) -> Result<usize> {
    let a = match strategy {
        AssemblyStrategy::Blockwise => assemble_blockwise_with(mesh, symmetric)?,
        s => assemble(mesh, s)?,
    };
    Ok(a.nnz())
}

fn footprint(mesh: &Mesh, strategy: AssemblyStrategy, nnz: usize) -> usize {
    let n = mesh.n_nodes();
    let k = mesh.nodes_per_elem();
    match strategy {
        AssemblyStrategy::DenseOracle => 8 * n * n,
        _ => 24 * k * k * mesh.n_elems() + 16 * nnz + 8 * (n + 1),
    }
}

/// Times each strategy on each mesh size after checking that all strategies
/// produce the same number of stored entries.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if cfg.strategies.is_empty() || cfg.sizes.is_empty() {
        return Err(Error::InvalidParameter("need at least one strategy and one size".into()));
    }
    let meshes: Vec<(usize, Mesh)> = cfg
        .sizes
        .iter()
        .map(|&n| generate(cfg.shape, n).map(|m| (n, m)))
        .collect::<Result<_>>()?;
    if cfg.strategies.contains(&AssemblyStrategy::DenseOracle) {
        if let Some((_, m)) = meshes.iter().find(|(_, m)| m.n_nodes() > DENSE_LIMIT) {
            return Err(Error::TooLargeForDense {
                n: m.n_nodes(),
                limit: DENSE_LIMIT,
            });
        }
    }

    let mut report = BenchReport::default();
    for (n, mesh) in &meshes {
        let counts: Vec<usize> = cfg
            .strategies
            .iter()
            .map(|&s| run_strategy(mesh, s, cfg.symmetric))
            .collect::<Result<_>>()?;
        if counts.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidParameter(format!(
                "strategies disagree on nnz for n = {n}: {counts:?}"
            )));
        }
        for (&strategy, &nnz) in cfg.strategies.iter().zip(&counts) {
            let mut times = Vec::with_capacity(cfg.reps);
            for _ in 0..cfg.reps {
                let start = Instant::now();
                std::hint::black_box(run_strategy(mesh, strategy, cfg.symmetric)?);
                times.push(start.elapsed().as_secs_f64());
            }
            report.rows.push(BenchRow {
                strategy,
                n: *n,
                n_nodes: mesh.n_nodes(),
                n_elems: mesh.n_elems(),
                wall_time: median(&mut times),
                nnz,
                footprint: footprint(mesh, strategy, nnz),
            });
        }
    }
    if meshes.len() >= 2 {
        for &strategy in &cfg.strategies {
            let rows: Vec<&BenchRow> = report.rows.iter().filter(|r| r.strategy == strategy).collect();
            let xs: Vec<f64> = rows.iter().map(|r| r.n_nodes as f64).collect();
            let ts: Vec<f64> = rows.iter().map(|r| r.wall_time.max(1e-9)).collect();
            let fs: Vec<f64> = rows.iter().map(|r| r.footprint as f64).collect();
            report.fits.push(ScalingFit {
                strategy,
                time_exponent: fit_exponent(&xs, &ts),
                footprint_exponent: fit_exponent(&xs, &fs),
            });
        }
    }
    Ok(report)
}

pub const CSV_HEADER: &str = "# fem bench csv v1";

impl BenchReport {
    pub fn fit(&self, strategy: AssemblyStrategy) -> Option<&ScalingFit> {
        self.fits.iter().find(|f| f.strategy == strategy)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push_str("\nstrategy,n,N,NT,wall_time,nnz,footprint\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{:.6e},{},{}",
                r.strategy, r.n, r.n_nodes, r.n_elems, r.wall_time, r.nnz, r.footprint
            )
            .unwrap();
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{:<13} {:>5} {:>8} {:>8} {:>12} {:>9} {:>12}",
            "strategy", "n", "N", "NT", "time [s]", "nnz", "bytes"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{:<13} {:>5} {:>8} {:>8} {:>12.4e} {:>9} {:>12}",
                r.strategy, r.n, r.n_nodes, r.n_elems, r.wall_time, r.nnz, r.footprint
            )
            .unwrap();
        }
        for f in &self.fits {
            writeln!(
                s,
                "{:<13} time ~ N^{:.2}, storage ~ N^{:.2}",
                f.strategy, f.time_exponent, f.footprint_exponent
            )
            .unwrap();
        }
        s
    }
}
