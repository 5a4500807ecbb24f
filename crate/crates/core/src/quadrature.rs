//! Quadrature rules on simplices in barycentric form.
//!
//! A rule approximates `int_tau f` by `|tau| * sum_q w_q f(sum_k lambda_qk x_k)`
//! with weights normalized to sum to one.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleName {
    /// One point at the barycenter.
    Center,
    /// Trapezoidal rule: equal weights at the vertices.
    Vertex,
    /// Edge midpoints of a triangle.
    MidpointEdges,
    /// Symmetric 4-point rule on a tetrahedron.
    Tet4,
    /// Simpson rule on an interval.
    Simpson,
}

impl RuleName {
    pub const ALL: [RuleName; 5] = [
        RuleName::Center,
        RuleName::Vertex,
        RuleName::MidpointEdges,
        RuleName::Tet4,
        RuleName::Simpson,
    ];
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            RuleName::Center => "center",
            RuleName::Vertex => "vertex",
            RuleName::MidpointEdges => "midpoint_edges",
            RuleName::Tet4 => "tet4",
            RuleName::Simpson => "simpson",
        })
    }
}

impl FromStr for RuleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleName::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// Barycentric points, normalized weights and the declared exactness degree.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub name: String,
    pub dim: usize,
    points: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadRule {
    fn new(name: impl Into<String>, dim: usize, points: Vec<f64>, weights: Vec<f64>, order: usize) -> Self {
        debug_assert_eq!(points.len(), weights.len() * (dim + 1));
        QuadRule {
            name: name.into(),
            dim,
            points,
            weights,
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Barycentric coordinates of point `q`.
    pub fn point(&self, q: usize) -> &[f64] {
        let k = self.dim + 1;
        &self.points[q * k..(q + 1) * k]
    }

    pub fn points(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.chunks_exact(self.dim + 1).zip(self.weights.iter().copied())
    }
}

// (5 - sqrt 5)/20 and (5 + 3 sqrt 5)/20
const TET4_B: f64 = 0.138_196_601_125_010_5;
const TET4_A: f64 = 0.585_410_196_624_968_5;

/// Tabulated rule `name` on the `dim`-simplex.
pub fn rule(dim: usize, name: RuleName) -> Result<QuadRule> {
    let unknown = || Error::UnknownRule(format!("{name} in {dim}-D"));
    if !(1..=3).contains(&dim) {
        return Err(unknown());
    }
    let k = dim + 1;
    let r = match name {
        RuleName::Center => QuadRule::new("center", dim, vec![1.0 / k as f64; k], vec![1.0], 1),
        RuleName::Vertex => {
            let mut pts = vec![0.0; k * k];
            for v in 0..k {
                pts[v * k + v] = 1.0;
            }
            QuadRule::new("vertex", dim, pts, vec![1.0 / k as f64; k], 1)
        }
        RuleName::MidpointEdges if dim == 2 => QuadRule::new(
            "midpoint_edges",
            2,
            vec![0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0],
            vec![1.0 / 3.0; 3],
            2,
        ),
        RuleName::Tet4 if dim == 3 => {
            let mut pts = vec![TET4_B; 16];
            for v in 0..4 {
                pts[v * 4 + v] = TET4_A;
            }
            QuadRule::new("tet4", 3, pts, vec![0.25; 4], 2)
        }
        RuleName::Simpson if dim == 1 => QuadRule::new(
            "simpson",
            1,
            vec![1.0, 0.0, 0.5, 0.5, 0.0, 1.0],
            vec![1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0],
            3,
        ),
        _ => return Err(unknown()),
    };
    Ok(r)
}

/// Lowest-cost tabulated rule exact for quadratics on the `dim`-simplex.
pub fn order2_rule(dim: usize) -> QuadRule {
    match dim {
        1 => gauss_legendre_1d(2).expect("tabulated"),
        2 => rule(2, RuleName::MidpointEdges).expect("tabulated"),
        3 => rule(3, RuleName::Tet4).expect("tabulated"),
        _ => panic!("no order-2 rule in {dim}-D"),
    }
}

// Gauss-Legendre nodes (non-negative half) and weights on [-1, 1].
const GAUSS: [&[(f64, f64)]; 5] = [
    &[(0.0, 2.0)],
    &[(0.577_350_269_189_625_8, 1.0)],
    &[(0.0, 0.888_888_888_888_889), (0.774_596_669_241_483_4, 0.555_555_555_555_555_6)],
    &[
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ],
    &[
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ],
];

/// `n`-point Gauss-Legendre rule on an interval, exact through degree `2n - 1`.
pub fn gauss_legendre_1d(n: usize) -> Result<QuadRule> {
    if !(1..=5).contains(&n) {
        return Err(Error::UnknownRule(format!("gauss{n}")));
    }
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &(x, w) in GAUSS[n - 1].iter().rev() {
        if x != 0.0 {
            nodes.push((-x, w));
        }
    }
    for &(x, w) in GAUSS[n - 1] {
        nodes.push((x, w));
    }
    let mut pts = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(n);
    for (x, w) in nodes {
        pts.push((1.0 - x) / 2.0);
        pts.push((1.0 + x) / 2.0);
        weights.push(w / 2.0);
    }
    Ok(QuadRule::new(format!("gauss{n}"), 1, pts, weights, 2 * n - 1))
}

/// `|tau| * sum_q w_q f(x_q)` over the simplex with the given vertices
/// (`(dim+1) * dim` coordinates, vertex-major).
pub fn integrate<F>(r: &QuadRule, vertices: &[f64], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let d = r.dim;
    if vertices.len() != (d + 1) * d {
        return Err(Error::ShapeMismatch(format!(
            "{}-D rule needs {} vertex coordinates, got {}",
            d,
            (d + 1) * d,
            vertices.len()
        )));
    }
    let measure = geometry::signed_measure(d, vertices);
    if geometry::is_degenerate(d, measure, vertices) {
        return Err(Error::DegenerateElement { elem: 0, measure });
    }
    Ok(measure.abs() * weighted_sum(r, vertices, f))
}

/// `sum_q w_q f(x_q)` without the measure factor.
#[inline]
pub(crate) fn weighted_sum<F>(r: &QuadRule, vertices: &[f64], f: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let d = r.dim;
    r.points()
        .map(|(lambda, w)| w * f(&geometry::from_barycentric(d, vertices, lambda)[..d]))
        .sum()
}

/// Simpson's rule on `[a, b]`.
pub fn simpson_interval<F>(a: f64, b: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::InvalidParameter(format!("Simpson interval needs a < b, got [{a}, {b}]")));
    }
    Ok((b - a) / 6.0 * (f(a) + 4.0 * f((a + b) / 2.0) + f(b)))
}

/// Every tabulated rule, for listing.
pub fn all_rules() -> Vec<QuadRule> {
    let mut out = Vec::new();
    for dim in 1..=3 {
        for name in RuleName::ALL {
            if let Ok(r) = rule(dim, name) {
                out.push(r);
            }
        }
    }
    out.extend((1..=5).map(|n| gauss_legendre_1d(n).expect("tabulated")));
    out
}
