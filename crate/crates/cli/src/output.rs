use std::fmt::Write as _;

use fem_core::{Mesh, QuadRule};

pub const SOLUTION_HEADER: &str = "# fem solution csv v1";

/// One row per node: one-based index, coordinates, value.
pub fn solution_csv(mesh: &Mesh, u: &[f64]) -> String {
    let axes = ["x", "y", "z"];
    let mut s = String::new();
    writeln!(s, "{SOLUTION_HEADER}").unwrap();
    writeln!(s, "node,{},value", axes[..mesh.dim()].join(",")).unwrap();
    for (i, v) in u.iter().enumerate() {
        write!(s, "{}", i + 1).unwrap();
        for x in mesh.node(i) {
            write!(s, ",{x}").unwrap();
        }
        writeln!(s, ",{v:e}").unwrap();
    }
    s
}

pub fn mesh_report(mesh: &Mesh) -> String {
    let measures = mesh.measures();
    let min = measures.iter().copied().fold(f64::INFINITY, f64::min);
    let max = measures.iter().copied().fold(0.0, f64::max);
    let counts = mesh.flag_counts();
    let mut s = String::new();
    writeln!(s, "dimension     {}", mesh.dim()).unwrap();
    writeln!(s, "nodes         {}", mesh.n_nodes()).unwrap();
    writeln!(s, "elements      {}", mesh.n_elems()).unwrap();
    writeln!(s, "NT/N          {:.4}", mesh.n_elems() as f64 / mesh.n_nodes() as f64).unwrap();
    writeln!(s, "min measure   {min:.6e}").unwrap();
    writeln!(s, "max measure   {max:.6e}").unwrap();
    writeln!(s, "total measure {:.12}", mesh.total_measure()).unwrap();
    writeln!(
        s,
        "faces         dirichlet {} neumann {} robin {}",
        counts[1], counts[2], counts[3]
    )
    .unwrap();
    s
}

pub fn rules_report(rules: &[QuadRule]) -> String {
    let mut s = String::new();
    for r in rules {
        let sum: f64 = r.weights.iter().sum();
        writeln!(s, "{} dim {} order {} points {} weight sum {sum:.16}", r.name, r.dim, r.order, r.len()).unwrap();
        for (lambda, w) in r.points() {
            let coords: Vec<String> = lambda.iter().map(|l| format!("{l:.16}")).collect();
            writeln!(s, "  {w:.16}  [{}]", coords.join(", ")).unwrap();
        }
    }
    s
}
