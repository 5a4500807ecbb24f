use std::fmt;
use std::str::FromStr;

use super::{BoundaryFlag, Mesh};
use crate::error::{Error, Result};

/// Domains with a structured mesh generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `(0,1)^2`
    UnitSquare,
    /// `(0,1)^3`
    UnitCube,
    /// `(-1,1)^2` minus `[0,1] x [-1,0]`
    LShape,
}

impl Shape {
    pub fn dim(self) -> usize {
        match self {
            Shape::UnitCube => 3,
            _ => 2,
        }
    }

    pub fn measure(self) -> f64 {
        match self {
            Shape::LShape => 3.0,
            _ => 1.0,
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_square" | "square" => Ok(Shape::UnitSquare),
            "unit_cube" | "cube" => Ok(Shape::UnitCube),
            "lshape" | "l_shape" => Ok(Shape::LShape),
            other => Err(Error::InvalidParameter(format!("unknown mesh shape '{other}'"))),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Shape::UnitSquare => "unit_square",
            Shape::UnitCube => "unit_cube",
            Shape::LShape => "lshape",
        })
    }
}

/// Structured mesh with `n` subdivisions per unit length.
///
/// Every exterior face is flagged Dirichlet; use [`Mesh::with_boundary_flags`]
/// to choose other conditions.
pub fn generate(shape: Shape, n: usize) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("subdivisions must be >= 1, got {n}")));
    }
    let raw = match shape {
        Shape::UnitSquare => square_grid(n, 0.0, 0.0, n, n, |_, _| true),
        Shape::LShape => square_grid(n, -1.0, -1.0, 2 * n, 2 * n, |i, j| !(i >= n && j < n)),
        Shape::UnitCube => cube(n),
    };
    raw.with_boundary_flags(|_| BoundaryFlag::Dirichlet as i64)
}

/// Triangulates the cells `(i, j)` of a `cells_x` by `cells_y` grid of spacing `1/n`
/// for which `keep(i, j)` holds. Each cell is split along its `(0,0)-(1,1)` diagonal.
fn square_grid<K>(n: usize, x0: f64, y0: f64, cells_x: usize, cells_y: usize, keep: K) -> Mesh
where
    K: Fn(usize, usize) -> bool,
{
    let h = 1.0 / n as f64;
    let (nx, ny) = (cells_x + 1, cells_y + 1);
    let mut used = vec![false; nx * ny];
    for j in 0..cells_y {
        for i in 0..cells_x {
            if keep(i, j) {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    used[(j + dj) * nx + i + di] = true;
                }
            }
        }
    }
    let mut index = vec![usize::MAX; nx * ny];
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if used[j * nx + i] {
                index[j * nx + i] = nodes.len() / 2;
                nodes.push(x0 + i as f64 * h);
                nodes.push(y0 + j as f64 * h);
            }
        }
    }
    let mut elems = Vec::new();
    for j in 0..cells_y {
        for i in 0..cells_x {
            if !keep(i, j) {
                continue;
            }
            let p00 = index[j * nx + i];
            let p10 = index[j * nx + i + 1];
            let p01 = index[(j + 1) * nx + i];
            let p11 = index[(j + 1) * nx + i + 1];
            elems.extend_from_slice(&[p00, p10, p11, p00, p11, p01]);
        }
    }
    let nflags = elems.len();
    Mesh::from_parts_unchecked(2, nodes, elems, vec![BoundaryFlag::Interior; nflags])
}

/// Kuhn triangulation: six tetrahedra per cell sharing the `(0,0,0)-(1,1,1)` diagonal.
fn cube(n: usize) -> Mesh {
    let h = 1.0 / n as f64;
    let m = n + 1;
    let id = |i: usize, j: usize, k: usize| (k * m + j) * m + i;
    let mut nodes = Vec::with_capacity(3 * m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                nodes.extend_from_slice(&[i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    // axis permutations with their parity
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let mut elems = Vec::with_capacity(24 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for (perm, even) in PERMS {
                    let mut c = [i, j, k];
                    let v0 = id(c[0], c[1], c[2]);
                    c[perm[0]] += 1;
                    let v1 = id(c[0], c[1], c[2]);
                    c[perm[1]] += 1;
                    let v2 = id(c[0], c[1], c[2]);
                    let v3 = id(i + 1, j + 1, k + 1);
                    if even {
                        elems.extend_from_slice(&[v0, v1, v2, v3]);
                    } else {
                        elems.extend_from_slice(&[v0, v1, v3, v2]);
                    }
                }
            }
        }
    }
    let nflags = elems.len();
    Mesh::from_parts_unchecked(3, nodes, elems, vec![BoundaryFlag::Interior; nflags])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let m = generate(Shape::UnitSquare, 1).unwrap();
        assert_eq!((m.n_nodes(), m.n_elems()), (4, 2));
        let m = generate(Shape::UnitCube, 1).unwrap();
        assert_eq!((m.n_nodes(), m.n_elems()), (8, 6));
        let m = generate(Shape::UnitSquare, 64).unwrap();
        assert_eq!((m.n_nodes(), m.n_elems()), (4225, 8192));
        let m = generate(Shape::LShape, 4).unwrap();
        assert_eq!(m.n_elems(), 3 * 2 * 16);
        assert_eq!(m.n_nodes(), 81 - 16);
    }

    #[test]
    fn zero_subdivisions_rejected() {
        assert!(matches!(generate(Shape::UnitSquare, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn generated_meshes_are_valid_and_fill_the_domain() {
        for (shape, n) in [(Shape::UnitSquare, 5), (Shape::UnitCube, 3), (Shape::LShape, 3)] {
            let m = generate(shape, n).unwrap();
            let again = Mesh::new(m.dim(), m.coords().to_vec(), m.connectivity().to_vec(), None);
            assert!(again.is_ok(), "{shape} mesh not positively oriented");
            let total = m.total_measure();
            assert!((total - shape.measure()).abs() <= 1e-12 * shape.measure(), "{shape}: {total}");
        }
    }

    #[test]
    fn square_boundary_edge_count() {
        let n = 6;
        let m = generate(Shape::UnitSquare, n).unwrap();
        assert_eq!(m.boundary_faces(BoundaryFlag::Dirichlet).len(), 4 * n);
        assert_eq!(m.flag_counts()[BoundaryFlag::Dirichlet as usize], 4 * n);
    }

    #[test]
    fn cube_boundary_face_count() {
        let n = 3;
        let m = generate(Shape::UnitCube, n).unwrap();
        // two triangles per boundary square
        assert_eq!(m.boundary_faces(BoundaryFlag::Dirichlet).len(), 6 * 2 * n * n);
    }

    #[test]
    fn shape_names() {
        assert_eq!("lshape".parse::<Shape>().unwrap(), Shape::LShape);
        assert!("disk".parse::<Shape>().is_err());
    }
}
