//! Triangle quadrature rules in barycentric coordinates. Weights sum to one
//! and are multiplied by the element area at the call site.

use crate::mesh::Point;

#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Edge-midpoint rule, exact for quadratics.
    pub fn edge_midpoints() -> Self {
        Self {
            points: vec![[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
            weights: vec![1.0 / 3.0; 3],
        }
    }

    /// Seven-point symmetric rule, exact for polynomials of degree 5.
    pub fn seven_point() -> Self {
        let s15 = 15f64.sqrt();
        let a = (6.0 - s15) / 21.0;
        let b = (6.0 + s15) / 21.0;
        let wa = (155.0 - s15) / 1200.0;
        let wb = (155.0 + s15) / 1200.0;
        Self {
            points: vec![
                [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
                [a, a, 1.0 - 2.0 * a],
                [a, 1.0 - 2.0 * a, a],
                [1.0 - 2.0 * a, a, a],
                [b, b, 1.0 - 2.0 * b],
                [b, 1.0 - 2.0 * b, b],
                [1.0 - 2.0 * b, b, b],
            ],
            weights: vec![9.0 / 40.0, wa, wa, wa, wb, wb, wb],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn map_point(v: &[Point; 3], bary: &[f64; 3]) -> Point {
    [
        bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
        bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫ λ0^a λ1^b λ2^c over the reference triangle (area 1/2) is
    /// a! b! c! / (a+b+c+2)!.
    fn exact_monomial(a: u32, b: u32, c: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) * fact(c) / fact(a + b + c + 2)
    }

    fn check(rule: &TriangleRule, degree: u32) {
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                for c in 0..=(degree - a - b) {
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * 0.5 * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                        .sum();
                    assert!(
                        (q - exact_monomial(a, b, c)).abs() < 1e-15,
                        "monomial ({a},{b},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn midpoint_rule_degree_two() {
        check(&TriangleRule::edge_midpoints(), 2);
    }

    #[test]
    fn seven_point_degree_five() {
        check(&TriangleRule::seven_point(), 5);
    }
}
