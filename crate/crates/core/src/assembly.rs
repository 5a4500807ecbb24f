//! Stiffness matrix `a_ij = int grad(phi_j) . grad(phi_i)` for linear elements.
//!
//! Three strategies produce the same operator:
//!
//! * [`AssemblyStrategy::DenseOracle`]: reference-map local matrices added
//!   entry by entry into dense `N x N` storage.
//! * [`AssemblyStrategy::TripletLoop`]: reference-map local matrices recorded
//!   element by element as triplets, compressed once.
//! * [`AssemblyStrategy::Blockwise`]: scaled face normals computed for all
//!   elements at once, triplets filled one local `(i, j)` block at a time.

use std::fmt;
use std::str::FromStr;

use crate::dense::{DenseMatrix, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::geometry::{self, Vec3};
use crate::mesh::Mesh;
use crate::sparse::{CscMatrix, Triplets};

/// Element stiffness matrix, `(dim+1) x (dim+1)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStiffness {
    size: usize,
    entries: [f64; 16],
    pub measure: f64,
}

impl LocalStiffness {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }
}

fn check_simplex(dim: usize, verts: &[f64]) -> Result<f64> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidParameter(format!("stiffness needs dim 2 or 3, got {dim}")));
    }
    if verts.len() != (dim + 1) * dim {
        return Err(Error::ShapeMismatch(format!(
            "{}-simplex needs {} coordinates, got {}",
            dim,
            (dim + 1) * dim,
            verts.len()
        )));
    }
    let measure = geometry::signed_measure(dim, verts);
    if geometry::is_degenerate(dim, measure, verts) {
        return Err(Error::DegenerateElement { elem: 0, measure });
    }
    Ok(measure)
}

/// Local stiffness through the affine map from the reference simplex.
///
/// `B` has rows `x_k - x_last`; the reference gradients are the unit vectors
/// for the first `dim` vertices and `-(1, ..., 1)` for the last. Each physical
/// gradient solves `B g = g_ref`.
pub fn local_stiffness_reference(dim: usize, verts: &[f64]) -> Result<LocalStiffness> {
    check_simplex(dim, verts)?;
    let last = geometry::vertex(dim, verts, dim);
    let mut b = [[0.0; 3]; 3];
    for (k, row) in b.iter_mut().enumerate().take(dim) {
        *row = geometry::sub(geometry::vertex(dim, verts, k), last);
    }
    let inv = inverse(dim, &b);
    let det = determinant(dim, &b);
    let scale = det.abs() / geometry::factorial(dim);

    let mut grads = [[0.0; 3]; 4];
    for (k, g) in grads.iter_mut().enumerate().take(dim + 1) {
        let mut reference = [0.0; 3];
        if k < dim {
            reference[k] = 1.0;
        } else {
            reference[..dim].fill(-1.0);
        }
        for r in 0..dim {
            g[r] = (0..dim).map(|c| inv[r][c] * reference[c]).sum();
        }
    }
    let size = dim + 1;
    let mut entries = [0.0; 16];
    for i in 0..size {
        for j in 0..size {
            entries[i * size + j] = scale * geometry::dot(grads[i], grads[j]);
        }
    }
    Ok(LocalStiffness {
        size,
        entries,
        measure: scale,
    })
}

fn determinant(dim: usize, b: &[Vec3; 3]) -> f64 {
    match dim {
        2 => b[0][0] * b[1][1] - b[0][1] * b[1][0],
        _ => geometry::dot(b[0], geometry::cross(b[1], b[2])),
    }
}

fn inverse(dim: usize, b: &[Vec3; 3]) -> [Vec3; 3] {
    let det = determinant(dim, b);
    let mut inv = [[0.0; 3]; 3];
    if dim == 2 {
        inv[0][0] = b[1][1] / det;
        inv[0][1] = -b[0][1] / det;
        inv[1][0] = -b[1][0] / det;
        inv[1][1] = b[0][0] / det;
    } else {
        // columns of the inverse are cross products of the rows
        let c0 = geometry::cross(b[1], b[2]);
        let c1 = geometry::cross(b[2], b[0]);
        let c2 = geometry::cross(b[0], b[1]);
        for r in 0..3 {
            inv[r] = [c0[r] / det, c1[r] / det, c2[r] / det];
        }
    }
    inv
}

/// Local stiffness from scaled inward normals: `a_ij = n_i . n_j / (dim!^2 |tau|)`.
pub fn local_stiffness_normals(dim: usize, verts: &[f64]) -> Result<LocalStiffness> {
    let measure = check_simplex(dim, verts)?;
    let normals = geometry::scaled_normals(dim, verts);
    let denom = geometry::factorial(dim).powi(2) * measure;
    let size = dim + 1;
    let mut entries = [0.0; 16];
    for i in 0..size {
        for j in 0..size {
            entries[i * size + j] = geometry::dot(normals[i], normals[j]) / denom;
        }
    }
    Ok(LocalStiffness {
        size,
        entries,
        measure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssemblyStrategy {
    DenseOracle,
    TripletLoop,
    Blockwise,
}

impl AssemblyStrategy {
    pub const ALL: [AssemblyStrategy; 3] = [
        AssemblyStrategy::DenseOracle,
        AssemblyStrategy::TripletLoop,
        AssemblyStrategy::Blockwise,
    ];
}

impl fmt::Display for AssemblyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            AssemblyStrategy::DenseOracle => "dense_oracle",
            AssemblyStrategy::TripletLoop => "triplet_loop",
            AssemblyStrategy::Blockwise => "blockwise",
        })
    }
}

impl FromStr for AssemblyStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AssemblyStrategy::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown assembly strategy '{s}'")))
    }
}

fn element_reference_stiffness(mesh: &Mesh, t: usize) -> Result<LocalStiffness> {
    let d = mesh.dim();
    let c = mesh.element_coords(t);
    local_stiffness_reference(d, &c[..(d + 1) * d]).map_err(|e| match e {
        Error::DegenerateElement { measure, .. } => Error::DegenerateElement { elem: t, measure },
        other => other,
    })
}

/// Dense `N x N` assembly, one entry update at a time.
pub fn assemble_standard_dense(mesh: &Mesh) -> Result<DenseMatrix> {
    let n = mesh.n_nodes();
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense { n, limit: DENSE_LIMIT });
    }
    let mut a = DenseMatrix::zeros(n, n);
    for t in 0..mesh.n_elems() {
        let at = element_reference_stiffness(mesh, t)?;
        let e = mesh.elem(t);
        for (i, &gi) in e.iter().enumerate() {
            for (j, &gj) in e.iter().enumerate() {
                a.add(gi, gj, at.get(i, j));
            }
        }
    }
    Ok(a)
}

/// Element-major triplets from reference-map local matrices, compressed once.
pub fn assemble_triplets(mesh: &Mesh) -> Result<CscMatrix> {
    let n = mesh.n_nodes();
    let k = mesh.nodes_per_elem();
    let mut trip = Triplets::with_capacity(n, n, k * k * mesh.n_elems());
    for t in 0..mesh.n_elems() {
        let at = element_reference_stiffness(mesh, t)?;
        let e = mesh.elem(t);
        for (i, &gi) in e.iter().enumerate() {
            for (j, &gj) in e.iter().enumerate() {
                trip.push(gi, gj, at.get(i, j));
            }
        }
    }
    CscMatrix::from_triplets(&trip)
}

/// Scaled normals and measures of every element, stored block-major:
/// `normals[i * NT + t]` is the normal of face `i` of element `t`.
struct BulkGeometry {
    normals: Vec<Vec3>,
    measures: Vec<f64>,
}

fn bulk_geometry(mesh: &Mesh) -> BulkGeometry {
    let nt = mesh.n_elems();
    let d = mesh.dim();
    let x = |v: usize| geometry::vertex(d, mesh.coords(), v);
    let mut normals = vec![[0.0; 3]; (d + 1) * nt];
    let mut measures = vec![0.0; nt];
    if d == 2 {
        // edge vectors l_i = x_{i+1} - x_{i-1}; normal is l_i rotated clockwise
        let rot = |l: Vec3| [l[1], -l[0], 0.0];
        for (t, e) in mesh.connectivity().chunks_exact(3).enumerate() {
            let (p1, p2, p3) = (x(e[0]), x(e[1]), x(e[2]));
            let ve3 = geometry::sub(p2, p1);
            let ve1 = geometry::sub(p3, p2);
            let ve2 = geometry::sub(p1, p3);
            measures[t] = 0.5 * (-ve3[0] * ve2[1] + ve3[1] * ve2[0]);
            normals[t] = rot(ve1);
            normals[nt + t] = rot(ve2);
            normals[2 * nt + t] = rot(ve3);
        }
    } else {
        let faces = geometry::local_faces(3);
        for (i, face) in faces.iter().enumerate() {
            for (t, e) in mesh.connectivity().chunks_exact(4).enumerate() {
                let f1 = x(e[face[0]]);
                let v12 = geometry::sub(x(e[face[1]]), f1);
                let v13 = geometry::sub(x(e[face[2]]), f1);
                normals[i * nt + t] = geometry::cross(v12, v13);
            }
        }
        for (t, e) in mesh.connectivity().chunks_exact(4).enumerate() {
            let p1 = x(e[0]);
            let v12 = geometry::sub(x(e[1]), p1);
            let v13 = geometry::sub(x(e[2]), p1);
            let v14 = geometry::sub(x(e[3]), p1);
            measures[t] = geometry::dot(geometry::cross(v12, v13), v14) / 6.0;
        }
    }
    BulkGeometry { normals, measures }
}

/// Blockwise assembly; see [`assemble_blockwise_with`].
pub fn assemble_blockwise(mesh: &Mesh) -> Result<CscMatrix> {
    assemble_blockwise_with(mesh, false)
}

/// Fills the triplet array one local block at a time: each diagonal block
/// `(i, i)` is an `NT`-long slice, each off-diagonal pair `(i, j)`, `(j, i)`
/// a `2 NT`-long slice, elements ascending.
///
/// With `symmetric`, `n_j . n_i` is not recomputed for the mirrored entry.
/// The result is the same bit for bit; only the flop count changes.
pub fn assemble_blockwise_with(mesh: &Mesh, symmetric: bool) -> Result<CscMatrix> {
    let n = mesh.n_nodes();
    let nt = mesh.n_elems();
    let k = mesh.nodes_per_elem();
    let d = mesh.dim();
    let geo = bulk_geometry(mesh);
    let denom: Vec<f64> = geo
        .measures
        .iter()
        .map(|m| geometry::factorial(d).powi(2) * m)
        .collect();

    let mut ii = vec![0usize; k * k * nt];
    let mut jj = vec![0usize; k * k * nt];
    let mut sa = vec![0.0f64; k * k * nt];
    let elems = mesh.connectivity();
    // Off-diagonal blocks (i, j) and (j, i) are interleaved element by
    // element, so a_ij and a_ji are summed in the same order and the result
    // is bitwise symmetric.
    let mut index = 0;
    for i in 0..k {
        let ni = &geo.normals[i * nt..(i + 1) * nt];
        for t in 0..nt {
            let v = elems[t * k + i];
            ii[index + t] = v;
            jj[index + t] = v;
            sa[index + t] = geometry::dot(ni[t], ni[t]) / denom[t];
        }
        index += nt;
        for j in i + 1..k {
            let nj = &geo.normals[j * nt..(j + 1) * nt];
            for t in 0..nt {
                let (vi, vj) = (elems[t * k + i], elems[t * k + j]);
                let a = geometry::dot(ni[t], nj[t]) / denom[t];
                let at = if symmetric { a } else { geometry::dot(nj[t], ni[t]) / denom[t] };
                let p = index + 2 * t;
                (ii[p], jj[p], sa[p]) = (vi, vj, a);
                (ii[p + 1], jj[p + 1], sa[p + 1]) = (vj, vi, at);
            }
            index += 2 * nt;
        }
    }
    debug_assert_eq!(index, k * k * nt);
    CscMatrix::from_triplets(&Triplets {
        m: n,
        n,
        i: ii,
        j: jj,
        s: sa,
    })
}

/// Assembles with the chosen strategy. The dense oracle is compressed by
/// dropping exact zeros.
pub fn assemble(mesh: &Mesh, strategy: AssemblyStrategy) -> Result<CscMatrix> {
    match strategy {
        AssemblyStrategy::DenseOracle => Ok(CscMatrix::from_dense(&assemble_standard_dense(mesh)?)),
        AssemblyStrategy::TripletLoop => assemble_triplets(mesh),
        AssemblyStrategy::Blockwise => assemble_blockwise(mesh),
    }
}
