//! Symmetric triangle quadrature rules in barycentric coordinates and
//! uniform sub-triangulation of a reference cell.

/// Quadrature rule with weights normalized to sum to one.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    /// Six-point rule, exact for polynomials of degree 4.
    pub fn degree4() -> Self {
        let mut rule = TriangleRule {
            points: Vec::new(),
            weights: Vec::new(),
            degree: 4,
        };
        rule.push_orbit3(0.223381589678011, 0.445948490915965);
        rule.push_orbit3(0.109951743655322, 0.091576213509771);
        rule
    }

    /// Twelve-point rule, exact for polynomials of degree 6.
    pub fn degree6() -> Self {
        let mut rule = TriangleRule {
            points: Vec::new(),
            weights: Vec::new(),
            degree: 6,
        };
        rule.push_orbit3(0.116786275726379, 0.249286745170910);
        rule.push_orbit3(0.050844906370207, 0.063089014491502);
        rule.push_orbit6(0.082851075618374, 0.053145049844817, 0.310352451033784);
        rule
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    // points (a, a, 1 - 2a) and permutations
    fn push_orbit3(&mut self, w: f64, a: f64) {
        let c = 1.0 - 2.0 * a;
        for p in [[a, a, c], [a, c, a], [c, a, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }

    // points (a, b, 1 - a - b) and all six permutations
    fn push_orbit6(&mut self, w: f64, a: f64, b: f64) {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }
}

/// A sub-triangle given by the barycentric coordinates of its three corners.
pub type SubTriangle = [[f64; 3]; 3];

fn mid(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// Splits `tri` into four congruent children.
pub fn split4(tri: &SubTriangle) -> [SubTriangle; 4] {
    let [a, b, c] = *tri;
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
}

/// `4^depth` sub-triangles covering the reference cell.
pub fn subdivide(depth: usize) -> Vec<SubTriangle> {
    let mut tris = vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]];
    for _ in 0..depth {
        tris = tris.iter().flat_map(split4).collect();
    }
    tris
}

/// Composite rule on a uniform subdivision of the reference cell: points in
/// parent barycentric coordinates, weights summing to one.
pub fn composite(rule: &TriangleRule, depth: usize) -> TriangleRule {
    let tris = subdivide(depth);
    let scale = 1.0 / tris.len() as f64;
    let mut out = TriangleRule {
        points: Vec::with_capacity(tris.len() * rule.len()),
        weights: Vec::with_capacity(tris.len() * rule.len()),
        degree: rule.degree,
    };
    for t in &tris {
        for (p, &w) in rule.points.iter().zip(&rule.weights) {
            let mut q = [0.0; 3];
            for (corner, &l) in t.iter().zip(p) {
                for j in 0..3 {
                    q[j] += l * corner[j];
                }
            }
            out.points.push(q);
            out.weights.push(w * scale);
        }
    }
    out
}
