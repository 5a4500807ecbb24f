//! Shared fixtures for the criterion benches.

use fem_core::mesh::generate;
use fem_core::presets::Preset;
use fem_core::solver::build_reduced_system;
use fem_core::{Mesh, Shape, SolveOptions, Triplets};

/// Square mesh with `n` subdivisions per side.
pub fn square(n: usize) -> Mesh {
    generate(Shape::UnitSquare, n).expect("valid subdivision count")
}

/// Element-major stiffness triplets of `mesh`, as the triplet loop emits them.
pub fn stiffness_triplets(mesh: &Mesh) -> Triplets {
    let k = mesh.nodes_per_elem();
    let mut t = Triplets::with_capacity(mesh.n_nodes(), mesh.n_nodes(), k * k * mesh.n_elems());
    for e in 0..mesh.n_elems() {
        let coords = mesh.element_coords(e);
        let local = fem_core::assembly::local_stiffness_normals(mesh.dim(), &coords[..k * mesh.dim()])
            .expect("generated meshes are non-degenerate");
        let nodes = mesh.elem(e);
        for i in 0..k {
            for j in 0..k {
                t.push(nodes[i], nodes[j], local.get(i, j));
            }
        }
    }
    t
}

/// Free-node sin-sin system on the square.
pub fn dirichlet_system(n: usize) -> (fem_core::CscMatrix, Vec<f64>) {
    let mesh = square(n);
    let problem = Preset::SinSin.manufactured(2).problem_on(&mesh, Some(Shape::UnitSquare));
    let sys = build_reduced_system(&mesh, &problem, &SolveOptions::default()).expect("well-posed");
    (sys.matrix, sys.rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fem_core::{assembly, AssemblyStrategy, CscMatrix};

    #[test]
    fn fixture_triplets_build_the_stiffness_matrix() {
        let m = square(6);
        let a = CscMatrix::from_triplets(&stiffness_triplets(&m)).unwrap();
        let b = assembly::assemble(&m, AssemblyStrategy::TripletLoop).unwrap();
        assert_eq!(a.row_idx(), b.row_idx());
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= 1e-14));
    }

    #[test]
    fn system_is_free_node_sized() {
        let (a, b) = dirichlet_system(8);
        assert_eq!(a.nrows(), 49);
        assert_eq!(b.len(), 49);
    }
}
