//! Simplicial triangulations with per-face boundary flags.
//!
//! A mesh stores node coordinates, element connectivity and one flag per
//! element face. Face `i` of an element is the face opposite its local
//! vertex `i`. All indices are zero-based in memory; the text format is
//! one-based.

mod generate;
mod io;

use std::fmt;

pub use generate::{generate, Shape};
pub use io::{read_mesh, write_mesh, parse_mesh, format_mesh};

use crate::error::{Error, Result};
use crate::geometry;

/// Boundary condition type of an element face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum BoundaryFlag {
    Interior = 0,
    Dirichlet = 1,
    Neumann = 2,
    Robin = 3,
}

impl BoundaryFlag {
    pub const ALL: [BoundaryFlag; 4] = [
        BoundaryFlag::Interior,
        BoundaryFlag::Dirichlet,
        BoundaryFlag::Neumann,
        BoundaryFlag::Robin,
    ];

    pub fn from_value(value: i64) -> Result<Self> {
        match value {
            0 => Ok(BoundaryFlag::Interior),
            1 => Ok(BoundaryFlag::Dirichlet),
            2 => Ok(BoundaryFlag::Neumann),
            3 => Ok(BoundaryFlag::Robin),
            v => Err(Error::InvalidFlagValue(v)),
        }
    }

    pub fn value(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for BoundaryFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BoundaryFlag::Interior => "interior",
            BoundaryFlag::Dirichlet => "dirichlet",
            BoundaryFlag::Neumann => "neumann",
            BoundaryFlag::Robin => "robin",
        };
        f.write_str(name)
    }
}

/// A validated, positively oriented simplicial mesh in 2-D or 3-D.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<f64>,
    elems: Vec<usize>,
    flags: Vec<BoundaryFlag>,
}

fn check_shapes(dim: usize, nodes: &[f64], elems: &[usize], flags: Option<&[i64]>) -> Result<()> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidParameter(format!("mesh dimension must be 2 or 3, got {dim}")));
    }
    if !nodes.len().is_multiple_of(dim) {
        return Err(Error::ShapeMismatch(format!(
            "{} coordinates is not a multiple of dimension {dim}",
            nodes.len()
        )));
    }
    if !elems.len().is_multiple_of(dim + 1) {
        return Err(Error::ShapeMismatch(format!(
            "{} element indices is not a multiple of {}",
            elems.len(),
            dim + 1
        )));
    }
    if let Some(f) = flags {
        if f.len() != elems.len() {
            return Err(Error::ShapeMismatch(format!(
                "boundary flags have {} entries, elements have {}",
                f.len(),
                elems.len()
            )));
        }
    }
    let n = nodes.len() / dim;
    if let Some(&bad) = elems.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { index: bad, bound: n });
    }
    Ok(())
}

fn convert_flags(flags: Option<&[i64]>, len: usize) -> Result<Vec<BoundaryFlag>> {
    match flags {
        Some(f) => f.iter().map(|&v| BoundaryFlag::from_value(v)).collect(),
        None => Ok(vec![BoundaryFlag::Interior; len]),
    }
}

impl Mesh {
    /// Validates and builds a mesh. Missing flags default to all interior.
    pub fn new(dim: usize, nodes: Vec<f64>, elems: Vec<usize>, flags: Option<&[i64]>) -> Result<Self> {
        check_shapes(dim, &nodes, &elems, flags)?;
        let flags = convert_flags(flags, elems.len())?;
        let mesh = Mesh { dim, nodes, elems, flags };
        for t in 0..mesh.n_elems() {
            let measure = mesh.signed_measure(t);
            if measure <= 0.0 {
                return Err(Error::NonPositiveVolume { elem: t, measure });
            }
        }
        Ok(mesh)
    }

    pub(crate) fn from_parts_unchecked(
        dim: usize,
        nodes: Vec<f64>,
        elems: Vec<usize>,
        flags: Vec<BoundaryFlag>,
    ) -> Self {
        Mesh { dim, nodes, elems, flags }
    }

    /// Like [`Mesh::new`], but swaps two vertices (and their face flags) of every
    /// negatively oriented element.
    pub fn fix_orientation(
        dim: usize,
        nodes: Vec<f64>,
        mut elems: Vec<usize>,
        flags: Option<&[i64]>,
    ) -> Result<Self> {
        check_shapes(dim, &nodes, &elems, flags)?;
        let mut flags = convert_flags(flags, elems.len())?;
        let k = dim + 1;
        let mut coords = [0.0; 12];
        for t in 0..elems.len() / k {
            let e = &elems[t * k..(t + 1) * k];
            fill_coords(dim, &nodes, e, &mut coords);
            let verts = &coords[..k * dim];
            let measure = geometry::signed_measure(dim, verts);
            if geometry::is_degenerate(dim, measure, verts) {
                return Err(Error::DegenerateElement { elem: t, measure });
            }
            if measure < 0.0 {
                elems.swap(t * k + k - 2, t * k + k - 1);
                flags.swap(t * k + k - 2, t * k + k - 1);
            }
        }
        Ok(Mesh { dim, nodes, elems, flags })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn n_elems(&self) -> usize {
        self.elems.len() / (self.dim + 1)
    }

    /// Vertices per element, `dim + 1`.
    pub fn nodes_per_elem(&self) -> usize {
        self.dim + 1
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn elem(&self, t: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.elems[t * k..(t + 1) * k]
    }

    pub fn flags(&self, t: usize) -> &[BoundaryFlag] {
        let k = self.dim + 1;
        &self.flags[t * k..(t + 1) * k]
    }

    pub fn coords(&self) -> &[f64] {
        &self.nodes
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.elems
    }

    pub fn all_flags(&self) -> &[BoundaryFlag] {
        &self.flags
    }

    /// Vertex coordinates of element `t`, vertex-major, in the first `(dim+1)*dim` slots.
    #[inline]
    pub fn element_coords(&self, t: usize) -> [f64; 12] {
        let mut out = [0.0; 12];
        fill_coords(self.dim, &self.nodes, self.elem(t), &mut out);
        out
    }

    pub fn signed_measure(&self, t: usize) -> f64 {
        let c = self.element_coords(t);
        geometry::signed_measure(self.dim, &c[..(self.dim + 1) * self.dim])
    }

    pub fn measures(&self) -> Vec<f64> {
        (0..self.n_elems()).map(|t| self.signed_measure(t)).collect()
    }

    pub fn total_measure(&self) -> f64 {
        self.measures().iter().sum()
    }

    pub fn has_flag(&self, flag: BoundaryFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// All faces carrying `flag`, ordered face-major: every element's face 0,
    /// then every element's face 1, and so on.
    pub fn boundary_faces(&self, flag: BoundaryFlag) -> FaceList {
        let d = self.dim;
        let nt = self.n_elems();
        let mut out = FaceList::empty(d);
        for (local, face) in geometry::local_faces(d).iter().enumerate() {
            for t in 0..nt {
                if self.flags[t * (d + 1) + local] == flag {
                    let e = self.elem(t);
                    out.faces.extend(face.iter().map(|&k| e[k]));
                    out.parent_elem.push(t);
                    out.local_face.push(local);
                }
            }
        }
        out
    }

    /// `(element, local face)` pairs of faces that belong to exactly one element.
    pub fn exterior_faces(&self) -> Vec<(usize, usize)> {
        let d = self.dim;
        let mut keys: Vec<([usize; 3], usize, usize)> = Vec::with_capacity(self.elems.len());
        for t in 0..self.n_elems() {
            let e = self.elem(t);
            for (local, face) in geometry::local_faces(d).iter().enumerate() {
                let mut key = [usize::MAX; 3];
                for (slot, &k) in key.iter_mut().zip(face.iter()) {
                    *slot = e[k];
                }
                key[..d].sort_unstable();
                keys.push((key, t, local));
            }
        }
        keys.sort_unstable();
        let mut out = Vec::new();
        let mut a = 0;
        while a < keys.len() {
            let mut b = a + 1;
            while b < keys.len() && keys[b].0 == keys[a].0 {
                b += 1;
            }
            if b - a == 1 {
                out.push((keys[a].1, keys[a].2));
            }
            a = b;
        }
        out.sort_unstable();
        out
    }

    /// Re-flags every face: exterior faces get `classifier(centroid)`, interior faces 0.
    pub fn with_boundary_flags<F>(&self, classifier: F) -> Result<Mesh>
    where
        F: Fn(&[f64]) -> i64,
    {
        let d = self.dim;
        let mut flags = vec![BoundaryFlag::Interior; self.flags.len()];
        for (t, local) in self.exterior_faces() {
            let e = self.elem(t);
            let mut centroid = [0.0; 3];
            for &k in geometry::local_faces(d)[local] {
                for (c, x) in centroid.iter_mut().zip(self.node(e[k])) {
                    *c += x / d as f64;
                }
            }
            flags[t * (d + 1) + local] = BoundaryFlag::from_value(classifier(&centroid[..d]))?;
        }
        Ok(Mesh {
            dim: d,
            nodes: self.nodes.clone(),
            elems: self.elems.clone(),
            flags,
        })
    }

    /// Number of faces per flag value, indexed by `BoundaryFlag as usize`.
    pub fn flag_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for &f in &self.flags {
            counts[f as usize] += 1;
        }
        counts
    }

    /// Per-coordinate (min, max) over all nodes.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bb = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.nodes.chunks_exact(self.dim) {
            for (b, &x) in bb.iter_mut().zip(p) {
                b.0 = b.0.min(x);
                b.1 = b.1.max(x);
            }
        }
        bb
    }
}

#[inline]
fn fill_coords(dim: usize, nodes: &[f64], elem: &[usize], out: &mut [f64; 12]) {
    for (k, &v) in elem.iter().enumerate() {
        out[k * dim..(k + 1) * dim].copy_from_slice(&nodes[v * dim..(v + 1) * dim]);
    }
}

/// Faces selected from a mesh, with the element and local face each came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceList {
    verts_per_face: usize,
    faces: Vec<usize>,
    pub parent_elem: Vec<usize>,
    pub local_face: Vec<usize>,
}

impl FaceList {
    fn empty(verts_per_face: usize) -> Self {
        FaceList {
            verts_per_face,
            faces: Vec::new(),
            parent_elem: Vec::new(),
            local_face: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent_elem.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent_elem.is_empty()
    }

    pub fn verts_per_face(&self) -> usize {
        self.verts_per_face
    }

    pub fn face(&self, k: usize) -> &[usize] {
        &self.faces[k * self.verts_per_face..(k + 1) * self.verts_per_face]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.faces.chunks_exact(self.verts_per_face)
    }
}
