//! Right-hand side and boundary conditions for `-Δu = f`, plus error norms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{self, Vec3};
use crate::mesh::{BoundaryFlag, FaceList, Mesh};
use crate::quadrature::{self, RuleName};
use crate::sparse::{accumulate, CscMatrix};

/// Scalar field evaluated at a point given as `dim` coordinates.
pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Vector field; components beyond `dim` are ignored.
pub type VectorField = Arc<dyn Fn(&[f64]) -> Vec3 + Send + Sync>;

/// Source term and boundary data. Missing Neumann data means `g_N = 0`.
#[derive(Clone)]
pub struct PoissonProblem {
    pub f: ScalarField,
    pub g_d: Option<ScalarField>,
    pub g_n: Option<ScalarField>,
}

impl PoissonProblem {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        PoissonProblem {
            f: Arc::new(f),
            g_d: None,
            g_n: None,
        }
    }

    pub fn with_dirichlet(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.g_d = Some(Arc::new(g));
        self
    }

    pub fn with_neumann(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.g_n = Some(Arc::new(g));
        self
    }
}

impl fmt::Debug for PoissonProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonProblem")
            .field("g_d", &self.g_d.is_some())
            .field("g_n", &self.g_n.is_some())
            .finish_non_exhaustive()
    }
}

/// Split of the nodes into Dirichlet and free sets.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPartition {
    pub dirichlet_nodes: Vec<usize>,
    pub free_nodes: Vec<usize>,
    pub dirichlet_faces: FaceList,
    pub neumann_faces: FaceList,
}

impl BoundaryPartition {
    /// Marks the vertices of Dirichlet faces in a boolean array instead of sorting them.
    pub fn from_mesh(mesh: &Mesh) -> Self {
        let dirichlet_faces = mesh.boundary_faces(BoundaryFlag::Dirichlet);
        let neumann_faces = mesh.boundary_faces(BoundaryFlag::Neumann);
        let mut is_bd = vec![false; mesh.n_nodes()];
        for f in dirichlet_faces.iter() {
            for &v in f {
                is_bd[v] = true;
            }
        }
        let (dirichlet_nodes, free_nodes) = split_marked(&is_bd);
        BoundaryPartition {
            dirichlet_nodes,
            free_nodes,
            dirichlet_faces,
            neumann_faces,
        }
    }

    /// Pure-Neumann partition: one pinned node, every other node free.
    pub fn pinned(mesh: &Mesh, pin: usize) -> Self {
        let mut is_pinned = vec![false; mesh.n_nodes()];
        is_pinned[pin] = true;
        let (dirichlet_nodes, free_nodes) = split_marked(&is_pinned);
        BoundaryPartition {
            dirichlet_nodes,
            free_nodes,
            dirichlet_faces: mesh.boundary_faces(BoundaryFlag::Dirichlet),
            neumann_faces: mesh.boundary_faces(BoundaryFlag::Neumann),
        }
    }
}

fn split_marked(marked: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for (k, &m) in marked.iter().enumerate() {
        if m {
            yes.push(k)
        } else {
            no.push(k)
        }
    }
    (yes, no)
}

/// Load vector `b_i = int f phi_i`.
///
/// Triangles use the edge-midpoint rule on `f phi_i`, which reduces to
/// `|tau| (f(m_j) + f(m_k)) / 6` for vertex `i`; tetrahedra use the
/// symmetric 4-point rule.
pub fn assemble_load(mesh: &Mesh, f: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
    let n = mesh.n_nodes();
    let nt = mesh.n_elems();
    let k = mesh.nodes_per_elem();
    let d = mesh.dim();
    // face-major: all elements' vertex 0 contributions, then vertex 1, ...
    let mut idx = vec![0usize; k * nt];
    let mut vals = vec![0.0; k * nt];
    if d == 2 {
        for t in 0..nt {
            let e = mesh.elem(t);
            let c = mesh.element_coords(t);
            let area = geometry::signed_measure(2, &c[..6]);
            let p = |a: usize| geometry::vertex(2, &c, a);
            let mid = |a: usize, b: usize| {
                let (pa, pb) = (p(a), p(b));
                [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0]
            };
            let f1 = f(&mid(1, 2));
            let f2 = f(&mid(2, 0));
            let f3 = f(&mid(0, 1));
            let bt = [area * (f2 + f3) / 6.0, area * (f3 + f1) / 6.0, area * (f1 + f2) / 6.0];
            for i in 0..3 {
                idx[i * nt + t] = e[i];
                vals[i * nt + t] = bt[i];
            }
        }
    } else {
        let rule = quadrature::rule(3, RuleName::Tet4).expect("tabulated");
        for t in 0..nt {
            let e = mesh.elem(t);
            let c = mesh.element_coords(t);
            let verts = &c[..12];
            let vol = geometry::signed_measure(3, verts);
            let mut bt = [0.0; 4];
            for (lambda, w) in rule.points() {
                let fx = w * f(&geometry::from_barycentric(3, verts, lambda));
                for i in 0..4 {
                    bt[i] += fx * lambda[i];
                }
            }
            for i in 0..4 {
                idx[i * nt + t] = e[i];
                vals[i * nt + t] = vol * bt[i];
            }
        }
    }
    accumulate(&idx, &vals, n).expect("element indices validated by the mesh")
}

/// Measure and quadrature point of a boundary face: the midpoint of an edge,
/// the barycenter of a triangle.
fn face_midpoint(mesh: &Mesh, face: &[usize]) -> (f64, Vec3) {
    let d = mesh.dim();
    let p = |v: usize| geometry::vertex(d, mesh.coords(), v);
    let mut mid = [0.0; 3];
    for &v in face {
        let x = p(v);
        for c in 0..3 {
            mid[c] += x[c] / face.len() as f64;
        }
    }
    let measure = if d == 2 {
        let e = geometry::sub(p(face[1]), p(face[0]));
        geometry::dot(e, e).sqrt()
    } else {
        let n = geometry::cross(geometry::sub(p(face[1]), p(face[0])), geometry::sub(p(face[2]), p(face[0])));
        0.5 * geometry::dot(n, n).sqrt()
    };
    (measure, mid)
}

/// Adds `int_{Γ_N} g_N phi_i` by the one-point midpoint rule per face.
pub fn apply_neumann(mut b: Vec<f64>, mesh: &Mesh, g_n: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
    let faces = mesh.boundary_faces(BoundaryFlag::Neumann);
    if faces.is_empty() {
        return b;
    }
    let d = mesh.dim();
    let m = faces.len();
    let mut idx = vec![0usize; d * m];
    let mut vals = vec![0.0; d * m];
    for (k, face) in faces.iter().enumerate() {
        let (measure, mid) = face_midpoint(mesh, face);
        let share = measure * g_n(&mid[..d]) / d as f64;
        for (slot, &v) in face.iter().enumerate() {
            idx[slot * m + k] = v;
            vals[slot * m + k] = share;
        }
    }
    let add = accumulate(&idx, &vals, b.len()).expect("face indices validated by the mesh");
    for (bi, ai) in b.iter_mut().zip(add) {
        *bi += ai;
    }
    b
}

/// Dirichlet lift and the reduced right-hand side.
#[derive(Debug, Clone)]
pub struct DirichletLift {
    /// Zero except `g_D` at the Dirichlet nodes.
    pub u0: Vec<f64>,
    /// `b - A u0`.
    pub b: Vec<f64>,
    pub partition: BoundaryPartition,
}

pub fn apply_dirichlet(
    a: &CscMatrix,
    b: &[f64],
    mesh: &Mesh,
    g_d: &dyn Fn(&[f64]) -> f64,
) -> Result<DirichletLift> {
    let n = mesh.n_nodes();
    if a.shape() != (n, n) || b.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "system of size {:?} with rhs {} for mesh with {n} nodes",
            a.shape(),
            b.len()
        )));
    }
    let partition = BoundaryPartition::from_mesh(mesh);
    if partition.dirichlet_nodes.is_empty() {
        return Err(Error::NoDirichletBoundary);
    }
    let mut u0 = vec![0.0; n];
    for &v in &partition.dirichlet_nodes {
        u0[v] = g_d(mesh.node(v));
    }
    let au = a.matvec(&u0)?;
    let b = b.iter().zip(&au).map(|(x, y)| x - y).collect();
    Ok(DirichletLift { u0, b, partition })
}

/// Subtracts the mean so the discrete compatibility condition `mean(b) = 0` holds.
pub fn enforce_compatibility(mut b: Vec<f64>) -> Vec<f64> {
    if b.is_empty() {
        return b;
    }
    let mean = b.iter().sum::<f64>() / b.len() as f64;
    for v in &mut b {
        *v -= mean;
    }
    b
}

/// Average of a piecewise-linear function: each element contributes its vertex mean times its measure.
pub fn discrete_average(mesh: &Mesh, u: &[f64]) -> f64 {
    let k = mesh.nodes_per_elem() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..mesh.n_elems() {
        let area = mesh.signed_measure(t);
        let mean: f64 = mesh.elem(t).iter().map(|&v| u[v]).sum::<f64>() / k;
        num += mean * area;
        den += area;
    }
    num / den
}

/// `u - c` with `c` the discrete average, so the result integrates to zero.
pub fn zero_average_shift(mesh: &Mesh, u: &[f64]) -> Vec<f64> {
    let c = discrete_average(mesh, u);
    u.iter().map(|v| v - c).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
}

/// `L2` and `H1`-seminorm errors of the nodal vector `u_h` against the exact
/// solution, integrated with the order-2 rule of each element.
pub fn error_norms(
    mesh: &Mesh,
    u_h: &[f64],
    u_exact: &dyn Fn(&[f64]) -> f64,
    grad_exact: &dyn Fn(&[f64]) -> Vec3,
) -> ErrorNorms {
    let d = mesh.dim();
    let rule = quadrature::order2_rule(d);
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for t in 0..mesh.n_elems() {
        let e = mesh.elem(t);
        let c = mesh.element_coords(t);
        let verts = &c[..(d + 1) * d];
        let (grads, measure) = geometry::barycentric_gradients(d, verts);
        let mut grad_h = [0.0; 3];
        for (k, &v) in e.iter().enumerate() {
            for c in 0..d {
                grad_h[c] += u_h[v] * grads[k][c];
            }
        }
        let mut el2 = 0.0;
        let mut eh1 = 0.0;
        for (lambda, w) in rule.points() {
            let x = geometry::from_barycentric(d, verts, lambda);
            let uh: f64 = e.iter().zip(lambda).map(|(&v, l)| u_h[v] * l).sum();
            let diff = uh - u_exact(&x[..d]);
            el2 += w * diff * diff;
            let g = grad_exact(&x[..d]);
            eh1 += w * (0..d).map(|c| (grad_h[c] - g[c]).powi(2)).sum::<f64>();
        }
        l2 += measure * el2;
        h1 += measure * eh1;
    }
    ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: h1.sqrt(),
    }
}
