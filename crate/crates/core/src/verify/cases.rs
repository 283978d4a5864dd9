//! Manufactured Stokes solutions on the unit square.
//!
//! Every case is built from a product stream function `ψ = c a(x) a(y)`,
//! so `u = curl ψ = (ψ_y, −ψ_x)` is divergence free by construction and
//! vanishes on the boundary when `a` and `a'` do.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::operators::{ScalarFn, VectorFn};

/// `[a, a', a'', a''']` at `x`.
type Profile = fn(f64) -> [f64; 4];

fn poly_profile(x: f64) -> [f64; 4] {
    // a = x²(1−x)²
    [
        x * x * (1.0 - x) * (1.0 - x),
        2.0 * x - 6.0 * x * x + 4.0 * x * x * x,
        2.0 - 12.0 * x + 12.0 * x * x,
        -12.0 + 24.0 * x,
    ]
}

fn quartic_profile(x: f64) -> [f64; 4] {
    // a = s⁴ with s = x(1−x); a through a''' all vanish at 0 and 1.
    let (s, d) = (x * (1.0 - x), 1.0 - 2.0 * x);
    [
        s.powi(4),
        4.0 * s.powi(3) * d,
        12.0 * s * s * d * d - 8.0 * s.powi(3),
        24.0 * s * d.powi(3) - 72.0 * s * s * d,
    ]
}

fn sine_profile(x: f64) -> [f64; 4] {
    // a = sin²(πx)
    let s = (PI * x).sin();
    [
        s * s,
        PI * (2.0 * PI * x).sin(),
        2.0 * PI * PI * (2.0 * PI * x).cos(),
        -4.0 * PI * PI * PI * (2.0 * PI * x).sin(),
    ]
}

/// An exact Stokes pair `(u, p)` with `ν = 1` and its forcing
/// `f = −Δu + grad p`.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub u: VectorFn,
    /// Rows are components, columns are `∂_x`, `∂_y`.
    pub grad_u: Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>,
    pub laplacian_u: VectorFn,
    pub p: ScalarFn,
    pub grad_p: VectorFn,
    pub f: VectorFn,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).finish()
    }
}

/// Names accepted by [`manufactured_stokes`].
pub const CASE_NAMES: [&str; 3] = ["stream4", "trig", "bubble8"];

fn from_stream(name: &str, c: f64, a: Profile, p: ScalarFn, grad_p: VectorFn) -> ManufacturedCase {
    let u: VectorFn = Arc::new(move |x: Point| {
        let (ax, ay) = (a(x[0]), a(x[1]));
        [c * ax[0] * ay[1], -c * ax[1] * ay[0]]
    });
    let grad_u = Arc::new(move |x: Point| {
        let (ax, ay) = (a(x[0]), a(x[1]));
        [
            [c * ax[1] * ay[1], c * ax[0] * ay[2]],
            [-c * ax[2] * ay[0], -c * ax[1] * ay[1]],
        ]
    });
    let laplacian_u: VectorFn = Arc::new(move |x: Point| {
        let (ax, ay) = (a(x[0]), a(x[1]));
        [
            c * (ax[2] * ay[1] + ax[0] * ay[3]),
            -c * (ax[3] * ay[0] + ax[1] * ay[2]),
        ]
    });
    let (lap, gp) = (laplacian_u.clone(), grad_p.clone());
    let f: VectorFn = Arc::new(move |x: Point| {
        let (l, g) = (lap(x), gp(x));
        [-l[0] + g[0], -l[1] + g[1]]
    });
    ManufacturedCase {
        name: name.into(),
        u,
        grad_u,
        laplacian_u,
        p,
        grad_p,
        f,
    }
}

/// Looks up a case by name: `"stream4"` (polynomial stream function
/// `x²(1−x)²y²(1−y)²`, `p = x³ + y³ − 1/2`) or `"trig"` (stream function
/// `sin²(πx) sin²(πy) / π`, `p = cos(πx) cos(πy)`) or `"bubble8"` (stream
/// function `x⁴(1−x)⁴y⁴(1−y)⁴`, same pressure as `"stream4"`; unlike the
/// other two cases its `Δu` also vanishes on the boundary).
pub fn manufactured_stokes(name: &str) -> Result<ManufacturedCase> {
    match name {
        "stream4" => Ok(from_stream(
            name,
            1.0,
            poly_profile,
            Arc::new(|x: Point| x[0].powi(3) + x[1].powi(3) - 0.5),
            Arc::new(|x: Point| [3.0 * x[0] * x[0], 3.0 * x[1] * x[1]]),
        )),
        "trig" => Ok(from_stream(
            name,
            1.0 / PI,
            sine_profile,
            Arc::new(|x: Point| (PI * x[0]).cos() * (PI * x[1]).cos()),
            Arc::new(|x: Point| {
                [
                    -PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                    -PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                ]
            }),
        )),
        "bubble8" => Ok(from_stream(
            name,
            1.0,
            quartic_profile,
            Arc::new(|x: Point| x[0].powi(3) + x[1].powi(3) - 0.5),
            Arc::new(|x: Point| [3.0 * x[0] * x[0], 3.0 * x[1] * x[1]]),
        )),
        other => Err(Error::UnknownCase(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn points(n: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
    }

    /// Central differences as an independent check of the closed forms.
    fn fd_grad(f: &dyn Fn(Point) -> f64, x: Point) -> [f64; 2] {
        let h = 1e-5;
        [
            (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h),
            (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h),
        ]
    }

    #[test]
    fn velocity_is_divergence_free() {
        for name in CASE_NAMES {
            let c = manufactured_stokes(name).unwrap();
            for x in points(100) {
                let g = (c.grad_u)(x);
                assert!((g[0][0] + g[1][1]).abs() <= 1e-12, "{name}");
            }
        }
    }

    #[test]
    fn velocity_vanishes_on_boundary() {
        for name in CASE_NAMES {
            let c = manufactured_stokes(name).unwrap();
            for k in 0..=40 {
                let s = k as f64 / 40.0;
                for x in [[s, 0.0], [s, 1.0], [0.0, s], [1.0, s]] {
                    let u = (c.u)(x);
                    assert!(u[0].abs() < 1e-15 && u[1].abs() < 1e-15, "{name} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn pressure_has_zero_mean() {
        // Tensor Gauss-Legendre, 5 points per direction: exact for stream4's
        // cubic pressure and accurate to round-off for the trig pressure.
        let g = [
            (0.0, 128.0 / 225.0),
            (-(5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 + 13.0 * 70f64.sqrt()) / 900.0),
            ((5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 + 13.0 * 70f64.sqrt()) / 900.0),
            (-(5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 - 13.0 * 70f64.sqrt()) / 900.0),
            ((5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, (322.0 - 13.0 * 70f64.sqrt()) / 900.0),
        ];
        for name in CASE_NAMES {
            let c = manufactured_stokes(name).unwrap();
            let mut s = 0.0;
            for &(xi, wi) in &g {
                for &(yj, wj) in &g {
                    s += 0.25 * wi * wj * (c.p)([0.5 * (xi + 1.0), 0.5 * (yj + 1.0)]);
                }
            }
            assert!(s.abs() < 1e-6, "{name}: {s}");
        }
    }

    #[test]
    fn closed_forms_match_finite_differences() {
        for name in CASE_NAMES {
            let c = manufactured_stokes(name).unwrap();
            for x in points(20) {
                let x = [0.05 + 0.9 * x[0], 0.05 + 0.9 * x[1]];
                let g = (c.grad_u)(x);
                for k in 0..2 {
                    let uk = |y: Point| (c.u)(y)[k];
                    let fd = fd_grad(&uk, x);
                    assert!((fd[0] - g[k][0]).abs() < 1e-6 && (fd[1] - g[k][1]).abs() < 1e-6);
                    let gk = |y: Point| (c.grad_u)(y)[k][0];
                    let gk2 = |y: Point| (c.grad_u)(y)[k][1];
                    let lap = fd_grad(&gk, x)[0] + fd_grad(&gk2, x)[1];
                    assert!((lap - (c.laplacian_u)(x)[k]).abs() < 1e-5);
                }
                let gp = fd_grad(c.p.as_ref(), x);
                let e = (c.grad_p)(x);
                assert!((gp[0] - e[0]).abs() < 1e-6 && (gp[1] - e[1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn unknown_case_rejected() {
        assert!(matches!(manufactured_stokes("cavity"), Err(Error::UnknownCase(_))));
    }
}
