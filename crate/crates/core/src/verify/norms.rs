//! Error norms evaluated with the seven-point rule.

use crate::error::Result;
use crate::mesh::Point;
use crate::quadrature::{map_point, TriangleRule};
use crate::spaces::Field;

/// Errors of a finite element function against an exact function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    /// Zero when no exact gradient was supplied.
    pub h1_semi: f64,
    pub linf_nodal: f64,
}

impl ErrorNorms {
    /// Full H¹ norm `√(‖e‖₀² + |e|₁²)`.
    pub fn h1(&self) -> f64 {
        self.l2.hypot(self.h1_semi)
    }
}

pub type ExactValue<'a> = &'a dyn Fn(Point) -> Vec<f64>;
pub type ExactGradient<'a> = &'a dyn Fn(Point) -> Vec<[f64; 2]>;

/// `‖fh − exact‖` in L², the H¹ seminorm (if `grad` is given) and the
/// maximum nodal difference. Components are summed in the Euclidean sense.
pub fn error_norms(fh: &Field, exact: ExactValue<'_>, grad: Option<ExactGradient<'_>>) -> Result<ErrorNorms> {
    let space = fh.space();
    let mesh = space.mesh();
    let nc = space.components();
    let rule = TriangleRule::seven_point();
    let (mut l2, mut h1) = (0.0, 0.0);
    for t in 0..mesh.n_triangles() {
        let g = mesh.element_geometry(t)?;
        let v = mesh.vertices(t);
        let tri = mesh.triangles()[t];
        let grads: Vec<[f64; 2]> = (0..nc)
            .map(|c| {
                let mut d = [0.0; 2];
                for a in 0..3 {
                    let coef = fh.coeffs()[space.dof(c, tri[a])];
                    d[0] += coef * g.grad_bary[a][0];
                    d[1] += coef * g.grad_bary[a][1];
                }
                d
            })
            .collect();
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let x = map_point(&v, bary);
            let vh = fh.evaluate_in(t, bary);
            let ex = exact(x);
            l2 += g.area * w * (0..nc).map(|c| (vh[c] - ex[c]).powi(2)).sum::<f64>();
            if let Some(gr) = grad {
                let ge = gr(x);
                h1 += g.area
                    * w
                    * (0..nc)
                        .map(|c| (grads[c][0] - ge[c][0]).powi(2) + (grads[c][1] - ge[c][1]).powi(2))
                        .sum::<f64>();
            }
        }
    }
    let linf_nodal = mesh
        .nodes()
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| {
            let ex = exact(x);
            (0..nc).map(move |c| (c, i, ex[c]))
        })
        .map(|(c, i, e)| (fh.coeffs()[space.dof(c, i)] - e).abs())
        .fold(0.0, f64::max);
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: h1.sqrt(),
        linf_nodal,
    })
}

/// `‖fh‖₀`, exact for P1 up to rounding.
pub fn l2_norm(fh: &Field) -> Result<f64> {
    let nc = fh.space().components();
    Ok(error_norms(fh, &|_| vec![0.0; nc], None)?.l2)
}

/// `‖div uh‖₀` of a 2-component P1 field (the divergence is elementwise
/// constant).
pub fn divergence_l2(uh: &Field) -> Result<f64> {
    let space = uh.space();
    let mesh = space.mesh();
    let mut s = 0.0;
    for t in 0..mesh.n_triangles() {
        let g = mesh.element_geometry(t)?;
        let tri = mesh.triangles()[t];
        let div: f64 = (0..3)
            .map(|a| {
                uh.coeffs()[space.dof(0, tri[a])] * g.grad_bary[a][0]
                    + uh.coeffs()[space.dof(1, tri[a])] * g.grad_bary[a][1]
            })
            .sum();
        s += g.area * div * div;
    }
    Ok(s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Domain};
    use crate::spaces::FeSpace;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn space(n: usize, c: usize) -> Arc<FeSpace> {
        FeSpace::p1(Arc::new(build_structured_mesh(n, Domain::UnitSquare).unwrap()), c).unwrap()
    }

    #[test]
    fn linear_functions_are_reproduced() {
        let f = Field::interpolate(space(5, 1), |p| p[0] + p[1]).unwrap();
        let e = error_norms(&f, &|p| vec![p[0] + p[1]], Some(&|_| vec![[1.0, 1.0]])).unwrap();
        assert!(e.l2 < 1e-13 && e.h1_semi < 1e-13 && e.linf_nodal < 1e-13);
    }

    #[test]
    fn quadratic_interpolation_error_matches_closed_form() {
        // For f = x² the P1 interpolant error on an x-interval of width h is
        // the bubble (x−a)(b−x); its L² norm over the square is h²/√30.
        let n = 8;
        let h = 1.0 / n as f64;
        let f = Field::interpolate(space(n, 1), |p| p[0] * p[0]).unwrap();
        let e = error_norms(&f, &|p| vec![p[0] * p[0]], None).unwrap();
        assert!((e.l2 - h * h / 30f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn interpolation_l2_order_two() {
        let errs: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| {
                let f = |p: Point| (std::f64::consts::PI * p[0]).sin() * (std::f64::consts::PI * p[1]).sin();
                let fh = Field::interpolate(space(n, 1), f).unwrap();
                error_norms(&fh, &|p| vec![f(p)], None).unwrap().l2
            })
            .collect();
        let order = (errs[1] / errs[2]).log2();
        assert!((order - 2.0).abs() < 0.1, "{order}");
    }

    #[test]
    fn divergence_of_linear_field() {
        let u = Field::interpolate_vector(space(4, 2), |p| [2.0 * p[0], -p[1] + 3.0 * p[0]]).unwrap();
        assert!((divergence_l2(&u).unwrap() - 1.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn norms_are_homogeneous(c in -5.0f64..5.0) {
            let s = space(4, 1);
            let f = |p: Point| (p[0] * 3.0).sin() + p[1] * p[1];
            let fh = Field::interpolate(s.clone(), f).unwrap();
            let base = error_norms(&fh, &|p| vec![f(p)], None).unwrap();
            let scaled = error_norms(&fh.scaled(c), &|p| vec![c * f(p)], None).unwrap();
            prop_assert!((scaled.l2 - c.abs() * base.l2).abs() <= 1e-12);
            prop_assert!((scaled.linf_nodal - c.abs() * base.linf_nodal).abs() <= 1e-12);
        }
    }
}
