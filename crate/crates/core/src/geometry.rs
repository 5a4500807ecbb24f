//! Simplex geometry on flat vertex arrays.
//!
//! A simplex in `dim` dimensions is passed as `(dim + 1) * dim` coordinates,
//! vertex-major. Vectors are padded to three components so 2-D and 3-D code
//! can share fixed-size arrays.

pub type Vec3 = [f64; 3];

/// Relative tolerance of the degeneracy test `|measure| < tol * longest_edge^dim`.
pub const DEGENERACY_TOL: f64 = 1e-14;

#[inline]
pub(crate) fn vertex(dim: usize, verts: &[f64], k: usize) -> Vec3 {
    let mut p = [0.0; 3];
    p[..dim].copy_from_slice(&verts[k * dim..(k + 1) * dim]);
    p
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Signed measure: length in 1-D, area in 2-D, volume in 3-D.
///
/// Positive when the vertices are ordered counter-clockwise (2-D) or the
/// first three vertices seen from the fourth are counter-clockwise (3-D).
pub fn signed_measure(dim: usize, verts: &[f64]) -> f64 {
    match dim {
        1 => verts[1] - verts[0],
        2 => {
            let (x1, x2, x3) = (vertex(2, verts, 0), vertex(2, verts, 1), vertex(2, verts, 2));
            let e3 = sub(x2, x1);
            let e2 = sub(x1, x3);
            0.5 * (-e3[0] * e2[1] + e3[1] * e2[0])
        }
        3 => {
            let x1 = vertex(3, verts, 0);
            let v12 = sub(vertex(3, verts, 1), x1);
            let v13 = sub(vertex(3, verts, 2), x1);
            let v14 = sub(vertex(3, verts, 3), x1);
            dot(cross(v12, v13), v14) / 6.0
        }
        _ => panic!("unsupported simplex dimension {dim}"),
    }
}

pub fn longest_edge(dim: usize, verts: &[f64]) -> f64 {
    let mut longest: f64 = 0.0;
    for a in 0..=dim {
        for b in a + 1..=dim {
            let e = sub(vertex(dim, verts, a), vertex(dim, verts, b));
            longest = longest.max(dot(e, e).sqrt());
        }
    }
    longest
}

/// Scale-invariant degeneracy test.
pub fn is_degenerate(dim: usize, measure: f64, verts: &[f64]) -> bool {
    measure.abs() < DEGENERACY_TOL * longest_edge(dim, verts).powi(dim as i32)
}

/// Local vertex lists of the faces of a simplex; face `i` is opposite vertex `i`.
///
/// The 3-D orderings make `(x2 - x1) x (x3 - x1)` point into the element.
pub fn local_faces(dim: usize) -> &'static [&'static [usize]] {
    match dim {
        1 => &[&[1], &[0]],
        2 => &[&[1, 2], &[2, 0], &[0, 1]],
        3 => &[&[1, 3, 2], &[0, 2, 3], &[0, 3, 1], &[0, 1, 2]],
        _ => panic!("unsupported simplex dimension {dim}"),
    }
}

/// Inward normals of the faces scaled to magnitude `(dim-1)! |F_i|`.
pub fn scaled_normals(dim: usize, verts: &[f64]) -> [Vec3; 4] {
    let mut normals = [[0.0; 3]; 4];
    match dim {
        2 => {
            for (i, n) in normals.iter_mut().take(3).enumerate() {
                let l = sub(vertex(2, verts, (i + 1) % 3), vertex(2, verts, (i + 2) % 3));
                *n = [l[1], -l[0], 0.0];
            }
        }
        3 => {
            for (i, face) in local_faces(3).iter().enumerate() {
                let x1 = vertex(3, verts, face[0]);
                let v12 = sub(vertex(3, verts, face[1]), x1);
                let v13 = sub(vertex(3, verts, face[2]), x1);
                normals[i] = cross(v12, v13);
            }
        }
        _ => panic!("scaled normals need dim 2 or 3, got {dim}"),
    }
    normals
}

/// Gradients of the barycentric coordinates, `n_i / (dim! |tau|)`, and the signed measure.
pub fn barycentric_gradients(dim: usize, verts: &[f64]) -> ([Vec3; 4], f64) {
    let measure = signed_measure(dim, verts);
    let scale = 1.0 / (factorial(dim) * measure);
    let mut grads = scaled_normals(dim, verts);
    for g in grads.iter_mut().take(dim + 1) {
        for c in g.iter_mut() {
            *c *= scale;
        }
    }
    (grads, measure)
}

/// Cartesian point `sum_k lambda_k x_k`.
pub fn from_barycentric(dim: usize, verts: &[f64], lambda: &[f64]) -> Vec3 {
    let mut p = [0.0; 3];
    for (k, &l) in lambda.iter().enumerate() {
        for c in 0..dim {
            p[c] += l * verts[k * dim + c];
        }
    }
    p
}
