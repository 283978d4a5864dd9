//! Data bundle and configuration for the extended system.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::operators::{ScalarFn, VectorFn};

/// Which discrete space carries `z_h` (the `−Δu` unknown).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZMode {
    /// `z_h ∈ X_h`, defined by `(z_h, w) + (grad p_h, w) = (f_Δ, w)` on `X_h`.
    Full,
    /// `z_h ∈ X_0h`, defined by `(z_h, w) − (p_h, div w) = (f_Δ, w)` on
    /// `X_0h`; this ties `z_h` to the discrete Laplacian of `u_h`.
    #[default]
    Interior,
}

impl std::str::FromStr for ZMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "interior" => Ok(Self::Interior),
            other => Err(Error::Parse(format!("unknown z-mode {other:?} (expected full or interior)"))),
        }
    }
}

impl std::fmt::Display for ZMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Interior => "interior",
        })
    }
}

/// Right-hand sides of the ten equations plus the parameter `α`.
///
/// Absent entries are zero. Densities are integrated with the edge-midpoint
/// rule; `g_hat` and `ell_s` enter nodal identities and are interpolated.
#[derive(Clone)]
pub struct StokesData {
    pub alpha: f64,
    pub nu: f64,
    /// Momentum forcing `f`.
    pub f: Option<VectorFn>,
    /// `ĝ` in `p − (q + p̂) = ĝ`.
    pub g_hat: Option<ScalarFn>,
    /// `ℓ_S` in `p_S − p = ℓ_S`.
    pub ell_s: Option<ScalarFn>,
    /// `g` in the divergence equation.
    pub g: Option<ScalarFn>,
    pub psi: Option<ScalarFn>,
    pub psi_hat: Option<ScalarFn>,
    /// `f_Δ` in the `z` equation.
    pub f_tri: Option<VectorFn>,
    pub rho: Option<ScalarFn>,
    pub rho_hat: Option<ScalarFn>,
    /// `f̂` in the `t` equation.
    pub f_hat: Option<VectorFn>,
}

impl std::fmt::Debug for StokesData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StokesData")
            .field("alpha", &self.alpha)
            .field("nu", &self.nu)
            .field("stokes_mode", &self.is_stokes_mode())
            .finish_non_exhaustive()
    }
}

fn ptr_eq(a: &Option<VectorFn>, b: &Option<VectorFn>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => Arc::ptr_eq(a, b),
        (None, None) => true,
        _ => false,
    }
}

impl StokesData {
    /// All-zero data.
    pub fn zero(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            nu: 1.0,
            f: None,
            g_hat: None,
            ell_s: None,
            g: None,
            psi: None,
            psi_hat: None,
            f_tri: None,
            rho: None,
            rho_hat: None,
            f_hat: None,
        })
    }

    /// Data under which the extended system contains the Stokes problem
    /// `−Δu + grad p = f`, `div u = 0`: `f_Δ = f̂ = f` and everything else
    /// zero.
    pub fn stokes(f: VectorFn, alpha: f64) -> Result<Self> {
        let mut d = Self::zero(alpha)?;
        d.f = Some(f.clone());
        d.f_tri = Some(f.clone());
        d.f_hat = Some(f);
        Ok(d)
    }

    pub fn stokes_fn(f: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static, alpha: f64) -> Result<Self> {
        Self::stokes(Arc::new(f), alpha)
    }

    /// Same data with a different `α`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let mut d = self.clone();
        d.alpha = alpha;
        Ok(d)
    }

    /// Data for viscosity `ν`: the system is solved with `f/ν`, and the
    /// computed pressure is `p/ν`.
    pub fn with_viscosity(&self, nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidArgument(format!("viscosity must be positive, got {nu}")));
        }
        let mut d = self.clone();
        d.nu = nu;
        Ok(d)
    }

    /// True when the bundle has the pattern `ĝ = ℓ_S = g = ψ = ψ̂ = ϱ = ϱ̂ = 0`
    /// and `f_Δ = f̂ = f` (the same function object).
    pub fn is_stokes_mode(&self) -> bool {
        self.g_hat.is_none()
            && self.ell_s.is_none()
            && self.g.is_none()
            && self.psi.is_none()
            && self.psi_hat.is_none()
            && self.rho.is_none()
            && self.rho_hat.is_none()
            && ptr_eq(&self.f_tri, &self.f)
            && ptr_eq(&self.f_hat, &self.f)
    }

    pub fn check(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidArgument(format!("viscosity must be positive, got {}", self.nu)));
        }
        Ok(())
    }

    pub(crate) fn scalar(&self, f: &Option<ScalarFn>) -> Option<ScalarFn> {
        let nu = self.nu;
        f.as_ref().map(|f| {
            if nu == 1.0 {
                f.clone()
            } else {
                let f = f.clone();
                Arc::new(move |x: Point| f(x) / nu) as ScalarFn
            }
        })
    }

    pub(crate) fn vector(&self, f: &Option<VectorFn>) -> Option<VectorFn> {
        let nu = self.nu;
        f.as_ref().map(|f| {
            if nu == 1.0 {
                f.clone()
            } else {
                let f = f.clone();
                Arc::new(move |x: Point| {
                    let v = f(x);
                    [v[0] / nu, v[1] / nu]
                }) as VectorFn
            }
        })
    }
}

/// Rejects `α = 1`, for which the pressure equation degenerates.
pub fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    if alpha == 1.0 {
        return Err(Error::ParameterSingularity(alpha));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_one_rejected() {
        let err = StokesData::zero(1.0).unwrap_err();
        assert!(matches!(err, Error::ParameterSingularity(_)));
        assert!(err.to_string().contains("alpha must differ from 1"));
        assert!(StokesData::zero(0.999).is_ok());
        assert!(StokesData::zero(f64::NAN).is_err());
    }

    #[test]
    fn stokes_mode_detection() {
        let d = StokesData::stokes_fn(|_| [1.0, 0.0], 0.0).unwrap();
        assert!(d.is_stokes_mode());
        let mut e = d.clone();
        e.f_hat = Some(Arc::new(|_| [1.0, 0.0]));
        assert!(!e.is_stokes_mode());
        let mut g = d.clone();
        g.psi = Some(Arc::new(|_| 0.0));
        assert!(!g.is_stokes_mode());
        assert!(StokesData::zero(2.0).unwrap().is_stokes_mode());
    }

    #[test]
    fn z_mode_parsing() {
        assert_eq!("full".parse::<ZMode>().unwrap(), ZMode::Full);
        assert_eq!("interior".parse::<ZMode>().unwrap(), ZMode::Interior);
        assert!("boundary".parse::<ZMode>().is_err());
        assert_eq!(ZMode::default(), ZMode::Interior);
    }
}
