//! The free Dirac resolvent kernel and its Hilbert–Schmidt norm.
//!
//! For `z ∉ σ(H₀) = (-∞, -m] ∪ [m, ∞)` and `d = x - x'`, `r = |d|`,
//!
//! ```text
//! (H₀ - z)⁻¹(x, x') = e^{-κr} / (4πr) · ( iα·d / r² + κ iα·d / r + m α₄ + z )
//! ```
//!
//! with `κ = sqrt(m² - z²)` on the principal branch.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{DiracBasis, Matrix4C};
use crate::constants::{C1, C2};
use crate::error::{Error, Result};
use crate::Vec3;

/// Principal square root: `Re ≥ 0`, cut along the negative real axis.
///
/// On the cut itself (`w` negative real, either sign of zero imaginary part)
/// the result is `+i sqrt(|w|)`. The real part is computed without
/// cancellation, which keeps `Re κ` accurate close to the essential spectrum.
pub fn principal_sqrt(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    if a == 0.0 && b == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let modulus = a.hypot(b);
    let t = ((a.abs() + modulus) / 2.0).sqrt();
    if a >= 0.0 {
        Complex64::new(t, b / (2.0 * t))
    } else {
        let im = if b < 0.0 { -t } else { t };
        Complex64::new(b.abs() / (2.0 * t), im)
    }
}

/// Spectral parameter `z` together with the mass `m ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub m: f64,
}

impl SpectralPoint {
    pub fn new(z: Complex64, m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::Config(format!("mass must be finite and nonnegative, got {m}")));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Config(format!("spectral parameter must be finite, got {z}")));
        }
        Ok(SpectralPoint { z, m })
    }

    /// True iff `z` lies off `(-∞, -m] ∪ [m, ∞)`.
    pub fn is_resolvent_point(&self) -> bool {
        !(self.z.im == 0.0 && self.z.re.abs() >= self.m)
    }

    /// `κ = sqrt(m² - z²)`.
    pub fn kappa(&self) -> Complex64 {
        kappa(self)
    }

    fn m2_minus_z2(&self) -> Complex64 {
        let (x, y) = (self.z.re, self.z.im);
        Complex64::new(self.m * self.m - (x * x - y * y), -2.0 * x * y)
    }
}

/// `κ = sqrt(m² - z²)` on the principal branch.
pub fn kappa(point: &SpectralPoint) -> Complex64 {
    principal_sqrt(point.m2_minus_z2())
}

/// A single kernel evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEval {
    pub matrix: Matrix4C,
    pub displacement: Vec3,
    pub kappa: Complex64,
}

fn displacement(x: Vec3, xp: Vec3) -> (Vec3, f64) {
    let d = [x[0] - xp[0], x[1] - xp[1], x[2] - xp[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    (d, r)
}

/// Evaluates the resolvent kernel at `(x, x')`.
///
/// Refuses points of the essential spectrum and coincident arguments.
pub fn kernel(point: &SpectralPoint, x: Vec3, xp: Vec3, basis: &DiracBasis) -> Result<KernelEval> {
    if !point.is_resolvent_point() {
        return Err(Error::Domain(format!(
            "z = {} lies in the essential spectrum for m = {}",
            point.z, point.m
        )));
    }
    let (d, r) = displacement(x, xp);
    if r == 0.0 {
        return Err(Error::Domain("kernel is singular at coincident points".into()));
    }
    let k = point.kappa();
    let prefactor = (-k * r).exp() / (4.0 * PI * r);
    let i = Complex64::i();
    let d_c = d.map(|v| Complex64::new(v, 0.0));
    // iα·d/r² + κ iα·d/r
    let alpha_d = basis.dot(d_c).scale(i * (1.0 / (r * r) + k / r));
    let matrix = (alpha_d + basis.alpha(4).scale_real(point.m) + Matrix4C::identity().scale(point.z)).scale(prefactor);
    Ok(KernelEval { matrix, displacement: d, kappa: k })
}

/// Coefficients of the rescaled kernel `A = a·α + a₄α₄ + a₀I`, where
/// `(H₀ - z)⁻¹(x, x') = A e^{-κr} / (4πr³)`:
/// `a = i(1 + κr) d`, `a₄ = m r²`, `a₀ = z r²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RescaledKernel {
    pub a: [Complex64; 3],
    pub a4: f64,
    pub a0: Complex64,
    pub r: f64,
    pub kappa: Complex64,
}

impl RescaledKernel {
    pub fn new(point: &SpectralPoint, d: Vec3) -> Result<Self> {
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if r == 0.0 {
            return Err(Error::Domain("zero displacement".into()));
        }
        let k = point.kappa();
        let f = Complex64::i() * (1.0 + k * r);
        Ok(RescaledKernel { a: d.map(|v| f * v), a4: point.m * r * r, a0: point.z * (r * r), r, kappa: k })
    }

    pub fn matrix(&self, basis: &DiracBasis) -> Matrix4C {
        basis.dot(self.a) + basis.alpha(4).scale_real(self.a4) + Matrix4C::identity().scale(self.a0)
    }

    /// `e^{-κr} / (4πr³)`.
    pub fn prefactor(&self) -> Complex64 {
        (-self.kappa * self.r).exp() / (4.0 * PI * self.r.powi(3))
    }

    /// `B = A*A - (|a|² + a₄² + |a₀|²) I`, which is traceless.
    pub fn traceless_part(&self, basis: &DiracBasis) -> Matrix4C {
        let a = self.matrix(basis);
        let scalar: f64 = self.a.iter().map(|v| v.norm_sqr()).sum::<f64>() + self.a4 * self.a4 + self.a0.norm_sqr();
        a.adjoint() * a - Matrix4C::identity().scale_real(scalar)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("separation must be positive and finite, got {r}")))
    }
}

/// `|(H₀ - z)⁻¹(x, x')|²_HS` as a function of `r = |x - x'|`:
///
/// ```text
/// 4 e^{-2 Re κ r} / ((4π)² r⁴) · (1 + 2 Re κ r + 2 [(Re κ)² + (Re z)²] r²)
/// ```
///
/// Defined for every `z ∈ ℂ`; on the essential spectrum `Re κ = 0`.
pub fn hs_closed_form(point: &SpectralPoint, r: f64) -> Result<f64> {
    check_radius(r)?;
    let kr = point.kappa().re;
    let x = point.z.re;
    let s = kr * r;
    let poly = 1.0 + 2.0 * s + 2.0 * (kr * kr + x * x) * r * r;
    Ok(4.0 * (-2.0 * s).exp() / ((4.0 * PI).powi(2) * r.powi(4)) * poly)
}

/// Pointwise upper bound `c₁² / r⁴ + c₂² (Re z)² e^{-2 Re κ r} / r²` on
/// [`hs_closed_form`].
pub fn hs_bound(point: &SpectralPoint, r: f64) -> Result<f64> {
    check_radius(r)?;
    let kr = point.kappa().re;
    let x = point.z.re;
    Ok(C1 * C1 / r.powi(4) + C2 * C2 * x * x * (-2.0 * kr * r).exp() / (r * r))
}
