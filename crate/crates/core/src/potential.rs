//! Potential models, Lebesgue norms of `|V|` and admissibility checks.
//!
//! `|V(x)|` always denotes the operator norm of the 4×4 matrix `V(x)`; for
//! scalar potentials `V = v I` it is `|v(x)|`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::Matrix4C;
use crate::constants::FORM_BOUND_THRESHOLD;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::Vec3;

pub type RadialProfile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type ScalarField = Arc<dyn Fn(Vec3) -> Complex64 + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(Vec3) -> Matrix4C + Send + Sync>;

/// Functional form of a potential.
#[derive(Clone)]
pub enum PotentialKind {
    /// `V(x) = v(|x|) I`.
    ScalarRadial(RadialProfile),
    /// `V(x) = v(x) I`.
    ScalarGeneral(ScalarField),
    /// Arbitrary, possibly non-Hermitian, matrix values.
    MatrixGeneral(MatrixField),
}

/// A matrix-valued potential on ℝ³ with optional declared norms.
#[derive(Clone)]
pub struct PotentialModel {
    kind: PotentialKind,
    name: String,
    length_scale: f64,
    singular_at_origin: bool,
    declared_norm3: Option<f64>,
    declared_norm32: Option<f64>,
}

impl fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            PotentialKind::ScalarRadial(_) => "scalar_radial",
            PotentialKind::ScalarGeneral(_) => "scalar_general",
            PotentialKind::MatrixGeneral(_) => "matrix_general",
        };
        f.debug_struct("PotentialModel")
            .field("name", &self.name)
            .field("kind", &kind)
            .field("length_scale", &self.length_scale)
            .field("singular_at_origin", &self.singular_at_origin)
            .field("declared_norm3", &self.declared_norm3)
            .field("declared_norm32", &self.declared_norm32)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be finite, got {v}")))
    }
}

impl PotentialModel {
    fn with_kind(kind: PotentialKind, name: impl Into<String>, length_scale: f64) -> Result<Self> {
        Ok(PotentialModel {
            kind,
            name: name.into(),
            length_scale: positive("length scale", length_scale)?,
            singular_at_origin: false,
            declared_norm3: None,
            declared_norm32: None,
        })
    }

    /// `v(r) I` for a radial profile; `length_scale` seeds the radial shells.
    pub fn scalar_radial<F>(profile: F, length_scale: f64) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::with_kind(PotentialKind::ScalarRadial(Arc::new(profile)), "scalar_radial", length_scale)
    }

    pub fn scalar_general<F>(field: F, length_scale: f64) -> Result<Self>
    where
        F: Fn(Vec3) -> Complex64 + Send + Sync + 'static,
    {
        Self::with_kind(PotentialKind::ScalarGeneral(Arc::new(field)), "scalar_general", length_scale)
    }

    pub fn matrix_general<F>(field: F, length_scale: f64) -> Result<Self>
    where
        F: Fn(Vec3) -> Matrix4C + Send + Sync + 'static,
    {
        Self::with_kind(PotentialKind::MatrixGeneral(Arc::new(field)), "matrix_general", length_scale)
    }

    /// `v₀ exp(-|x|² / width²) I`.
    pub fn gaussian(v0: f64, width: f64) -> Result<Self> {
        let v0 = finite("v0", v0)?;
        let w = positive("width", width)?;
        let mut p = Self::scalar_radial(move |r| Complex64::new(v0 * (-(r * r) / (w * w)).exp(), 0.0), w)?;
        p.name = format!("gaussian({v0},{w})");
        Ok(p)
    }

    /// `Z / |x|` inside the ball of radius `R`, zero outside.
    pub fn cutoff_coulomb(z: f64, radius: f64) -> Result<Self> {
        let z = finite("Z", z)?;
        let r0 = positive("R", radius)?;
        let mut p = Self::scalar_radial(move |r| Complex64::new(if r < r0 { z / r } else { 0.0 }, 0.0), r0)?;
        p.name = format!("cutoff_coulomb({z},{r0})");
        p.singular_at_origin = z != 0.0;
        Ok(p)
    }

    /// Smooth bump `v₀ exp(1 - 1/(1 - (r/R)²))` supported in the ball of radius `R`.
    pub fn bump(v0: f64, radius: f64) -> Result<Self> {
        let v0 = finite("v0", v0)?;
        let r0 = positive("R", radius)?;
        let profile = move |r: f64| {
            let t = r / r0;
            let v = if t < 1.0 { v0 * (1.0 - 1.0 / (1.0 - t * t)).exp() } else { 0.0 };
            Complex64::new(v, 0.0)
        };
        let mut p = Self::scalar_radial(profile, r0)?;
        p.name = format!("bump({v0},{r0})");
        Ok(p)
    }

    /// The zero potential.
    pub fn zero() -> Self {
        let mut p = Self::scalar_radial(|_| Complex64::new(0.0, 0.0), 1.0).expect("unit scale is valid");
        p.name = "zero".into();
        p
    }

    /// Marks the origin as a singular point of the potential.
    pub fn with_singularity_at_origin(mut self) -> Self {
        self.singular_at_origin = true;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches externally known norms; they take precedence over quadrature.
    pub fn with_declared_norms(mut self, norm3: Option<f64>, norm32: Option<f64>) -> Result<Self> {
        for v in [norm3, norm32].into_iter().flatten() {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("declared norms must be nonnegative, got {v}")));
            }
        }
        self.declared_norm3 = norm3;
        self.declared_norm32 = norm32;
        Ok(self)
    }

    /// `c V`; declared norms scale by `|c|`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let kind = match &self.kind {
            PotentialKind::ScalarRadial(f) => {
                let f = f.clone();
                PotentialKind::ScalarRadial(Arc::new(move |r| c * f(r)))
            }
            PotentialKind::ScalarGeneral(f) => {
                let f = f.clone();
                PotentialKind::ScalarGeneral(Arc::new(move |x| c * f(x)))
            }
            PotentialKind::MatrixGeneral(f) => {
                let f = f.clone();
                PotentialKind::MatrixGeneral(Arc::new(move |x| f(x).scale(c)))
            }
        };
        PotentialModel {
            kind,
            name: format!("({c})*{}", self.name),
            length_scale: self.length_scale,
            singular_at_origin: self.singular_at_origin,
            declared_norm3: self.declared_norm3.map(|n| n * c.norm()),
            declared_norm32: self.declared_norm32.map(|n| n * c.norm()),
        }
    }

    /// `V₁ + V₂`. Radial plus radial stays radial; any matrix operand gives a
    /// matrix potential. Declared norms are dropped.
    pub fn sum(&self, other: &PotentialModel) -> PotentialModel {
        use PotentialKind::*;
        let kind = match (&self.kind, &other.kind) {
            (ScalarRadial(f), ScalarRadial(g)) => {
                let (f, g) = (f.clone(), g.clone());
                ScalarRadial(Arc::new(move |r| f(r) + g(r)))
            }
            (MatrixGeneral(_), _) | (_, MatrixGeneral(_)) => {
                let (a, b) = (self.clone(), other.clone());
                MatrixGeneral(Arc::new(move |x| a.matrix_value(x) + b.matrix_value(x)))
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                ScalarGeneral(Arc::new(move |x| {
                    a.scalar_value(x).expect("scalar operand") + b.scalar_value(x).expect("scalar operand")
                }))
            }
        };
        PotentialModel {
            kind,
            name: format!("{}+{}", self.name, other.name),
            length_scale: self.length_scale.max(other.length_scale),
            singular_at_origin: self.singular_at_origin || other.singular_at_origin,
            declared_norm3: None,
            declared_norm32: None,
        }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn is_scalar(&self) -> bool {
        !matches!(self.kind, PotentialKind::MatrixGeneral(_))
    }

    pub fn declared_norm3(&self) -> Option<f64> {
        self.declared_norm3
    }

    pub fn declared_norm32(&self) -> Option<f64> {
        self.declared_norm32
    }

    fn check_point(&self, x: Vec3) -> Result<()> {
        if self.singular_at_origin && x == [0.0; 3] {
            return Err(Error::Domain(format!("{} is singular at the origin", self.name)));
        }
        Ok(())
    }

    /// Scalar value `v(x)` for scalar kinds, `None` for matrix potentials.
    pub fn scalar_value(&self, x: Vec3) -> Option<Complex64> {
        match &self.kind {
            PotentialKind::ScalarRadial(f) => Some(f(norm3d(x))),
            PotentialKind::ScalarGeneral(f) => Some(f(x)),
            PotentialKind::MatrixGeneral(_) => None,
        }
    }

    pub fn matrix_value(&self, x: Vec3) -> Matrix4C {
        match &self.kind {
            PotentialKind::MatrixGeneral(f) => f(x),
            _ => Matrix4C::identity().scale(self.scalar_value(x).expect("scalar kind")),
        }
    }

    fn abs_unchecked(&self, x: Vec3) -> f64 {
        match &self.kind {
            PotentialKind::ScalarRadial(f) => f(norm3d(x)).norm(),
            PotentialKind::ScalarGeneral(f) => f(x).norm(),
            PotentialKind::MatrixGeneral(f) => f(x).operator_norm(),
        }
    }

    /// `|V(x)|`, the operator norm of the matrix value.
    pub fn pointwise_norm(&self, x: Vec3) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.abs_unchecked(x))
    }

    /// `(∫ |V(x)|^p dx)^{1/p}` by adaptive quadrature.
    ///
    /// Radial kinds integrate `4π r² |v(r)|^p` over dyadic shells around the
    /// length scale; general kinds integrate over cubes of doubling
    /// half-width. Non-integrable behaviour at the origin or at infinity
    /// yields `value = ∞, converged = false`.
    pub fn lp_norm(&self, p: LpExponent, tol: f64) -> Result<QuadratureResult> {
        if !(tol > 0.0 && tol <= 0.1) {
            return Err(Error::Config(format!("quadrature tolerance must lie in (0, 0.1], got {tol}")));
        }
        let exponent = p.value();
        let raw = match &self.kind {
            PotentialKind::ScalarRadial(f) => {
                let f = f.clone();
                radial_integral(&|r| 4.0 * PI * r * r * f(r).norm().powf(exponent), self.length_scale, tol)
            }
            _ => cube_integral(&|x| self.abs_unchecked(x).powf(exponent), self.length_scale, tol),
        };
        Ok(raw.into_norm(exponent, tol))
    }

    /// Declared norms where present, quadrature otherwise.
    pub fn resolve_norms(&self, tol: f64, need_norm32: bool) -> Result<ResolvedNorms> {
        let resolve = |declared: Option<f64>, p: LpExponent| -> Result<NormValue> {
            match declared {
                Some(v) => Ok(NormValue::declared(v)),
                None => {
                    let q = self.lp_norm(p, tol)?;
                    Ok(NormValue { value: q.value, provenance: NormProvenance::Computed(q) })
                }
            }
        };
        let norm3 = resolve(self.declared_norm3, LpExponent::Three)?;
        let norm32 = if need_norm32 || self.declared_norm32.is_some() {
            Some(resolve(self.declared_norm32, LpExponent::ThreeHalves)?)
        } else {
            None
        };
        Ok(ResolvedNorms { norm3, norm32 })
    }
}

fn norm3d(x: Vec3) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Parses `NAME:p1,p2`, e.g. `gaussian:0.1,1`, `cutoff_coulomb:1,1`, `bump:0.2,2`, `zero`.
impl FromStr for PotentialModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let values: Vec<f64> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad potential parameter `{t}`: {e}"))))
                .collect::<Result<_>>()?
        };
        let two = |what: &str| -> Result<(f64, f64)> {
            match values.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::Config(format!("{name} expects two parameters ({what}), got {}", values.len()))),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "gaussian" => {
                let (v0, w) = two("v0,width")?;
                PotentialModel::gaussian(v0, w)
            }
            "cutoff_coulomb" | "coulomb" => {
                let (z, r) = two("Z,R")?;
                PotentialModel::cutoff_coulomb(z, r)
            }
            "bump" => {
                let (v0, r) = two("v0,R")?;
                PotentialModel::bump(v0, r)
            }
            "zero" if values.is_empty() => Ok(PotentialModel::zero()),
            other => Err(Error::Config(format!(
                "unknown potential `{other}` (expected gaussian:V0,WIDTH, cutoff_coulomb:Z,R, bump:V0,R or zero)"
            ))),
        }
    }
}

/// Lebesgue exponent of the norms entering the criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpExponent {
    Three,
    ThreeHalves,
}

impl LpExponent {
    pub fn value(self) -> f64 {
        match self {
            LpExponent::Three => 3.0,
            LpExponent::ThreeHalves => 1.5,
        }
    }
}

/// A quadrature-computed norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub estimated_relative_error: f64,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn is_divergent(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Where a norm value came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormProvenance {
    Declared,
    Computed(QuadratureResult),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub provenance: NormProvenance,
}

impl NormValue {
    pub fn declared(value: f64) -> Self {
        NormValue { value, provenance: NormProvenance::Declared }
    }

    pub fn describe(&self) -> String {
        match self.provenance {
            NormProvenance::Declared => "declared".to_string(),
            NormProvenance::Computed(q) if q.is_divergent() => "computed, divergent".to_string(),
            NormProvenance::Computed(q) => format!(
                "computed, est. rel. error {:.1e}{}",
                q.estimated_relative_error,
                if q.converged { "" } else { ", NOT converged" }
            ),
        }
    }
}

/// The L³ norm and, optionally, the L^{3/2} norm of `|V|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedNorms {
    pub norm3: NormValue,
    pub norm32: Option<NormValue>,
}

impl ResolvedNorms {
    pub fn declared(norm3: f64, norm32: Option<f64>) -> Result<Self> {
        for v in std::iter::once(norm3).chain(norm32) {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("norms must be nonnegative, got {v}")));
            }
        }
        Ok(ResolvedNorms { norm3: NormValue::declared(norm3), norm32: norm32.map(NormValue::declared) })
    }
}

/// Raw value of `∫|V|^p` before taking the root.
struct RawIntegral {
    value: f64,
    abs_error: f64,
    converged: bool,
    divergent: bool,
}

impl RawIntegral {
    fn into_norm(self, exponent: f64, tol: f64) -> QuadratureResult {
        if self.divergent {
            return QuadratureResult { value: f64::INFINITY, estimated_relative_error: f64::INFINITY, converged: false };
        }
        if self.value <= 0.0 {
            return QuadratureResult { value: 0.0, estimated_relative_error: 0.0, converged: self.converged };
        }
        // relative error of I^{1/p} is (1/p) times that of I
        let rel = self.abs_error / self.value / exponent;
        QuadratureResult {
            value: self.value.powf(1.0 / exponent),
            estimated_relative_error: rel,
            converged: self.converged && rel <= tol,
        }
    }
}

const MAX_SHELLS: usize = 200;
const MAX_PANELS: usize = 400;
/// Shells that shrink by less than this factor count as non-decaying.
const NON_DECAY_RATIO: f64 = 0.999;
const DIVERGENCE_STREAK: usize = 3;

/// Tracks successive shell contributions for one direction of the radial
/// sweep: convergence once two consecutive shells are negligible, divergence
/// once `DIVERGENCE_STREAK` consecutive shells fail to decay.
struct ShellSweep {
    prev: Option<f64>,
    negligible_run: usize,
    non_decay_run: usize,
}

enum ShellVerdict {
    Continue,
    Done,
    Divergent,
}

impl ShellSweep {
    fn new() -> Self {
        ShellSweep { prev: None, negligible_run: 0, non_decay_run: 0 }
    }

    fn push(&mut self, delta: f64, total: f64, tol: f64) -> ShellVerdict {
        let delta = delta.abs();
        if let Some(prev) = self.prev {
            if prev > 0.0 && delta >= NON_DECAY_RATIO * prev {
                self.non_decay_run += 1;
            } else {
                self.non_decay_run = 0;
            }
        }
        self.prev = Some(delta);
        if !delta.is_finite() || self.non_decay_run >= DIVERGENCE_STREAK {
            return ShellVerdict::Divergent;
        }
        if delta <= tol / 10.0 * total.abs() || (total == 0.0 && delta == 0.0) {
            self.negligible_run += 1;
        } else {
            self.negligible_run = 0;
        }
        if self.negligible_run >= 2 {
            ShellVerdict::Done
        } else {
            ShellVerdict::Continue
        }
    }
}

/// `∫₀^∞ g(r) dr` over dyadic shells `[s 2^k, s 2^{k+1}]` sweeping outward
/// and `[s 2^{-k-1}, s 2^{-k}]` sweeping inward.
fn radial_integral(g: &dyn Fn(f64) -> f64, scale: f64, tol: f64) -> RawIntegral {
    let shell_tol = tol / 20.0;
    let mut total = 0.0;
    let mut abs_error = 0.0;
    let mut converged = true;

    // core shell [s/2, 2s] first so `total` is meaningful for the stopping test
    for (a, b) in [(0.5 * scale, scale), (scale, 2.0 * scale)] {
        let e = quadrature::integrate(g, a, b, 0.0, shell_tol, MAX_PANELS);
        total += e.value;
        abs_error += e.abs_error;
        converged &= e.converged;
    }

    for outward in [false, true] {
        let mut sweep = ShellSweep::new();
        let mut finished = false;
        for k in 1..MAX_SHELLS {
            let (a, b) = if outward {
                (scale * 2f64.powi(k as i32), scale * 2f64.powi(k as i32 + 1))
            } else {
                (scale * 2f64.powi(-(k as i32) - 1), scale * 2f64.powi(-(k as i32)))
            };
            let e = quadrature::integrate(g, a, b, 0.0, shell_tol, MAX_PANELS);
            total += e.value;
            abs_error += e.abs_error;
            converged &= e.converged;
            match sweep.push(e.value, total, tol) {
                ShellVerdict::Continue => {}
                ShellVerdict::Done => {
                    // geometric tail estimate from the last shell
                    abs_error += e.value.abs();
                    finished = true;
                    break;
                }
                ShellVerdict::Divergent => {
                    return RawIntegral { value: f64::INFINITY, abs_error: f64::INFINITY, converged: false, divergent: true };
                }
            }
        }
        converged &= finished;
    }
    RawIntegral { value: total, abs_error, converged, divergent: false }
}

/// `∫_{ℝ³} g` over cubes `[-L, L]³` with `L` doubling until the last shell
/// contributes less than `tol/10` relatively.
fn cube_integral(g: &(dyn Fn(Vec3) -> f64 + Sync), scale: f64, tol: f64) -> RawIntegral {
    let inner_tol = tol / 10.0;
    let mut half = 2.0 * scale;
    let first = quadrature::integrate_box(&|x| g(x), [-half; 3], [half; 3], inner_tol, MAX_PANELS);
    let mut total = first.value;
    let mut abs_error = first.abs_error;
    let mut converged = first.converged;
    if !total.is_finite() {
        return RawIntegral { value: f64::INFINITY, abs_error: f64::INFINITY, converged: false, divergent: true };
    }
    let mut sweep = ShellSweep::new();
    for _ in 0..40 {
        let next_half = 2.0 * half;
        let e = quadrature::integrate_box(&|x| g(x), [-next_half; 3], [next_half; 3], inner_tol, MAX_PANELS);
        let delta = e.value - total;
        total = e.value;
        abs_error = e.abs_error;
        converged &= e.converged;
        half = next_half;
        match sweep.push(delta, total, tol) {
            ShellVerdict::Continue => {}
            ShellVerdict::Done => {
                abs_error += delta.abs();
                return RawIntegral { value: total, abs_error, converged, divergent: false };
            }
            ShellVerdict::Divergent => {
                return RawIntegral { value: f64::INFINITY, abs_error: f64::INFINITY, converged: false, divergent: true };
            }
        }
    }
    RawIntegral { value: total, abs_error, converged: false, divergent: false }
}

/// Sufficient condition for the form bound: `‖v₁‖_{L³} < (2π²)^{1/3}`
/// (strict), where `|V| = v₁ + v₂` with `v₂` bounded.
pub fn check_proposition_sufficient(v1_norm3: f64) -> bool {
    (0.0..FORM_BOUND_THRESHOLD).contains(&v1_norm3)
}

/// Monte-Carlo falsification check of `|V(x)| ≤ a (2/π)/|x| + b`.
///
/// Sample points have uniformly distributed directions and radii
/// log-uniform on `[1e-6, 1e6]`, so every scale from the origin to the far
/// field is probed. Returns `false` on the first violation found. A `true`
/// result is evidence, not proof.
pub fn check_kato_pointwise(v: &PotentialModel, a: f64, b: f64, samples: usize, seed: u64) -> Result<bool> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Config(format!("Kato constant a must lie in (0, 1), got {a}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let dir: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = norm3d(dir);
        if n == 0.0 {
            continue;
        }
        let r = 10f64.powf(rng.random_range(-6.0..6.0));
        let x = dir.map(|c| c / n * r);
        let bound = a * (2.0 / PI) / r + b;
        if v.pointwise_norm(x)? > bound {
            return Ok(false);
        }
    }
    Ok(true)
}
