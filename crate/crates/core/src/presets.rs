//! Manufactured-solution problems on boxes and the L-shape.
//!
//! Each preset bundles an exact solution, its gradient and the matching
//! source term. Boundary data is taken from the exact solution: `g_D = u`
//! and `g_N = grad(u) . n` with the outward normal of the domain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::{BoundaryFlag, Mesh, Shape};
use crate::system::{PoissonProblem, ScalarField, VectorField};

/// Tolerance for deciding that a face centroid lies on a domain side.
pub const GEOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `prod sin(pi x_k)`, zero on the unit box boundary.
    SinSin,
    /// `x + y (+ z)`, reproduced exactly by linear elements.
    Linear,
    /// `prod sin(pi x_k)` with a Neumann bottom side.
    Mixed,
    /// `prod cos(pi x_k)`, zero normal derivative on the unit box.
    NeumannPure,
    Zero,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::SinSin, Preset::Linear, Preset::Mixed, Preset::NeumannPure, Preset::Zero];

    pub fn default_boundary(self) -> BoundarySpec {
        match self {
            Preset::Mixed => BoundarySpec::Mixed,
            Preset::NeumannPure => BoundarySpec::PureNeumann,
            _ => BoundarySpec::Dirichlet,
        }
    }

    /// Exact solution, gradient and source term in `dim` dimensions.
    pub fn manufactured(self, dim: usize) -> Manufactured {
        let d = dim;
        match self {
            Preset::SinSin | Preset::Mixed => Manufactured {
                dim,
                exact: Arc::new(move |p: &[f64]| p[..d].iter().map(|x| (PI * x).sin()).product()),
                grad: Arc::new(move |p: &[f64]| {
                    let mut g = [0.0; 3];
                    for (c, gc) in g.iter_mut().enumerate().take(d) {
                        *gc = (0..d)
                            .map(|k| if k == c { PI * (PI * p[k]).cos() } else { (PI * p[k]).sin() })
                            .product();
                    }
                    g
                }),
                source: Arc::new(move |p: &[f64]| d as f64 * PI * PI * p[..d].iter().map(|x| (PI * x).sin()).product::<f64>()),
            },
            Preset::NeumannPure => Manufactured {
                dim,
                exact: Arc::new(move |p: &[f64]| p[..d].iter().map(|x| (PI * x).cos()).product()),
                grad: Arc::new(move |p: &[f64]| {
                    let mut g = [0.0; 3];
                    for (c, gc) in g.iter_mut().enumerate().take(d) {
                        *gc = (0..d)
                            .map(|k| if k == c { -PI * (PI * p[k]).sin() } else { (PI * p[k]).cos() })
                            .product();
                    }
                    g
                }),
                source: Arc::new(move |p: &[f64]| d as f64 * PI * PI * p[..d].iter().map(|x| (PI * x).cos()).product::<f64>()),
            },
            Preset::Linear => Manufactured {
                dim,
                exact: Arc::new(move |p: &[f64]| p[..d].iter().sum()),
                grad: Arc::new(move |_: &[f64]| {
                    let mut g = [0.0; 3];
                    g[..d].fill(1.0);
                    g
                }),
                source: Arc::new(|_: &[f64]| 0.0),
            },
            Preset::Zero => Manufactured {
                dim,
                exact: Arc::new(|_: &[f64]| 0.0),
                grad: Arc::new(|_: &[f64]| [0.0; 3]),
                source: Arc::new(|_: &[f64]| 0.0),
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Preset::SinSin => "sinsin",
            Preset::Linear => "linear",
            Preset::Mixed => "mixed",
            Preset::NeumannPure => "neumann-pure",
            Preset::Zero => "zero",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sinsin" | "sinsinsin" => Ok(Preset::SinSin),
            "linear" => Ok(Preset::Linear),
            "mixed" => Ok(Preset::Mixed),
            "neumann-pure" | "neumann_pure" => Ok(Preset::NeumannPure),
            "zero" => Ok(Preset::Zero),
            _ => Err(Error::InvalidParameter(format!("unknown problem preset '{s}'"))),
        }
    }
}

/// How exterior faces are flagged before solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySpec {
    Dirichlet,
    PureNeumann,
    /// Neumann on the side of smallest `y`, Dirichlet elsewhere.
    Mixed,
}

impl FromStr for BoundarySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BoundarySpec::Dirichlet),
            "pure-neumann" | "neumann" => Ok(BoundarySpec::PureNeumann),
            "mixed" => Ok(BoundarySpec::Mixed),
            _ => Err(Error::InvalidParameter(format!("unknown boundary spec '{s}'"))),
        }
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            BoundarySpec::Dirichlet => "dirichlet",
            BoundarySpec::PureNeumann => "pure-neumann",
            BoundarySpec::Mixed => "mixed",
        })
    }
}

impl BoundarySpec {
    pub fn apply(self, mesh: &Mesh) -> Result<Mesh> {
        let ymin = mesh.bounding_box()[1].0;
        mesh.with_boundary_flags(|c| {
            let flag = match self {
                BoundarySpec::Dirichlet => BoundaryFlag::Dirichlet,
                BoundarySpec::PureNeumann => BoundaryFlag::Neumann,
                BoundarySpec::Mixed if c[1] - ymin < GEOMETRY_TOL => BoundaryFlag::Neumann,
                BoundarySpec::Mixed => BoundaryFlag::Dirichlet,
            };
            flag as i64
        })
    }
}

#[derive(Clone)]
pub struct Manufactured {
    pub dim: usize,
    pub exact: ScalarField,
    pub grad: VectorField,
    pub source: ScalarField,
}

impl fmt::Debug for Manufactured {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manufactured").field("dim", &self.dim).finish_non_exhaustive()
    }
}

/// Outward unit normal at a boundary point of an axis-aligned box.
pub fn box_normal(bbox: &[(f64, f64)], p: &[f64]) -> Vec3 {
    let mut n = [0.0; 3];
    for (c, &(lo, hi)) in bbox.iter().enumerate() {
        if (p[c] - lo).abs() < GEOMETRY_TOL {
            n[c] = -1.0;
            return n;
        }
        if (p[c] - hi).abs() < GEOMETRY_TOL {
            n[c] = 1.0;
            return n;
        }
    }
    n
}

/// Outward unit normal on the boundary of `(-1,1)^2` minus `[0,1] x [-1,0]`.
pub fn lshape_normal(p: &[f64]) -> Vec3 {
    if p[0].abs() < GEOMETRY_TOL && p[1] < 0.0 {
        return [1.0, 0.0, 0.0];
    }
    if p[1].abs() < GEOMETRY_TOL && p[0] > 0.0 {
        return [0.0, -1.0, 0.0];
    }
    box_normal(&[(-1.0, 1.0), (-1.0, 1.0)], p)
}

impl Manufactured {
    /// Problem with `g_D = u` and `g_N = grad(u) . normal(x)`.
    pub fn problem<N>(&self, normal: N) -> PoissonProblem
    where
        N: Fn(&[f64]) -> Vec3 + Send + Sync + 'static,
    {
        let exact = self.exact.clone();
        let grad = self.grad.clone();
        let f = self.source.clone();
        let d = self.dim;
        PoissonProblem::new(move |p| f(p))
            .with_dirichlet(move |p| exact(p))
            .with_neumann(move |p| {
                let g = grad(p);
                let n = normal(p);
                (0..d).map(|c| g[c] * n[c]).sum()
            })
    }

    /// Problem on `mesh`; the normal is the L-shape one for `Shape::LShape`,
    /// otherwise that of the mesh bounding box.
    pub fn problem_on(&self, mesh: &Mesh, shape: Option<Shape>) -> PoissonProblem {
        match shape {
            Some(Shape::LShape) => self.problem(lshape_normal),
            _ => {
                let bbox = mesh.bounding_box();
                self.problem(move |p| box_normal(&bbox, p))
            }
        }
    }

    pub fn interpolate(&self, mesh: &Mesh) -> Vec<f64> {
        (0..mesh.n_nodes()).map(|i| (self.exact)(mesh.node(i))).collect()
    }

    /// Largest `|-Δu_fd - f|` at `points`, with a second-order central
    /// difference Laplacian of step `step`.
    pub fn laplacian_residual(&self, points: &[Vec3], step: f64) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for p in points {
            let u0 = (self.exact)(&p[..d]);
            let mut lap = 0.0;
            for c in 0..d {
                let mut a = *p;
                let mut b = *p;
                a[c] += step;
                b[c] -= step;
                lap += ((self.exact)(&a[..d]) - 2.0 * u0 + (self.exact)(&b[..d])) / (step * step);
            }
            worst = worst.max((-lap - (self.source)(&p[..d])).abs());
        }
        worst
    }
}
